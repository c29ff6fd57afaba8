//! PSNR and SSIM on the BT.601 full-range luma channel.

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::scalar::Real;

pub const PSNR_CAP_DB: f64 = 100.0;
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
pub const PEAK: f64 = 255.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub psnr_db: f64,
    pub ssim: f64,
}

/// `Y = 0.299 R + 0.587 G + 0.114 B`.
pub fn rgb_to_y<S: Real>(image: &RgbImage) -> Plane<S> {
    let (kr, kg, kb) = (S::of(0.299), S::of(0.587), S::of(0.114));
    Plane::from_fn(image.height() as usize, image.width() as usize, |y, x| {
        let [r, g, b] = image.get_pixel(x as u32, y as u32).0;
        kr * S::of(r as f64) + kg * S::of(g as f64) + kb * S::of(b as f64)
    })
}

fn same_dims(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::dims(a.dimensions(), b.dimensions()));
    }
    Ok(())
}

pub fn psnr_plane<S: Real>(a: &Plane<S>, b: &Plane<S>) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::dims(a.dims(), b.dims()));
    }
    if a.as_slice().is_empty() {
        return Err(Error::EmptyImage);
    }
    let mse = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| (x - y).as_f64().powi(2))
        .sum::<f64>()
        / a.as_slice().len() as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (PEAK * PEAK / mse).log10()).min(PSNR_CAP_DB))
}

pub fn psnr_y(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    same_dims(a, b)?;
    psnr_plane(&rgb_to_y::<f64>(a), &rgb_to_y::<f64>(b))
}

/// Normalized 1-D Gaussian taps.
pub fn gaussian_taps(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size / 2) as f64;
    let raw: Vec<f64> = (0..size)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Valid-mode separable filtering.
fn filter_valid<S: Real>(src: &[S], h: usize, w: usize, taps: &[S]) -> Vec<S> {
    let k = taps.len();
    let (oh, ow) = (h + 1 - k, w + 1 - k);
    let mut rows = vec![S::zero(); h * ow];
    for y in 0..h {
        let line = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = taps.iter().zip(&line[x..x + k]).map(|(&t, &v)| t * v).sum();
        }
    }
    let mut out = vec![S::zero(); oh * ow];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps.iter().enumerate().map(|(i, &t)| t * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// Mean SSIM over every fully contained 11x11 Gaussian window.
pub fn ssim_plane<S: Real>(a: &Plane<S>, b: &Plane<S>) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::dims(a.dims(), b.dims()));
    }
    let (h, w) = a.dims();
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::ImageTooSmall {
            window: SSIM_WINDOW,
            height: h,
            width: w,
        });
    }
    let taps: Vec<S> = gaussian_taps(SSIM_WINDOW, SSIM_SIGMA).into_iter().map(S::of).collect();
    let (xa, xb) = (a.as_slice(), b.as_slice());
    let prod = |f: &dyn Fn(S, S) -> S| xa.iter().zip(xb).map(|(&p, &q)| f(p, q)).collect::<Vec<S>>();
    let mu_a = filter_valid(xa, h, w, &taps);
    let mu_b = filter_valid(xb, h, w, &taps);
    let aa = filter_valid(&prod(&|p, _| p * p), h, w, &taps);
    let bb = filter_valid(&prod(&|_, q| q * q), h, w, &taps);
    let ab = filter_valid(&prod(&|p, q| p * q), h, w, &taps);

    let c1 = S::of((SSIM_K1 * PEAK).powi(2));
    let c2 = S::of((SSIM_K2 * PEAK).powi(2));
    let two = S::of(2.0);
    let mut total = 0.0f64;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = aa[i] - ma * ma;
        let vb = bb[i] - mb * mb;
        let cov = ab[i] - ma * mb;
        let num = (two * ma * mb + c1) * (two * cov + c2);
        let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
        total += (num / den).as_f64();
    }
    Ok(total / mu_a.len() as f64)
}

pub fn ssim_y(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    same_dims(a, b)?;
    ssim_plane(&rgb_to_y::<f64>(a), &rgb_to_y::<f64>(b))
}

pub fn evaluate(reference: &RgbImage, test: &RgbImage) -> Result<MetricReport> {
    Ok(MetricReport {
        psnr_db: psnr_y(reference, test)?,
        ssim: ssim_y(reference, test)?,
    })
}
