//! Integrate-and-fire sensor simulation.
//!
//! Each pixel owns an accumulator `A`. Every input frame is held for
//! `upsample_factor` substeps of length `dt = 1 / upsample_factor`; per
//! substep `A += max(I + eta, 0) * dt` with `eta ~ N(0, sigma_g^2 + sigma_p^2 I)`,
//! and a spike is emitted when `A >= threshold`.

use image::RgbImage;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bayer::BayerMask;
use super::stream::{ResetMode, SpikeStream, StreamMeta};
use crate::error::{Error, Result};
use crate::frame::IntensityFrame;
use crate::plane::Plane;
use crate::rng::child_rng;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraConfig {
    pub threshold: f64,
    pub sigma_g: f64,
    pub sigma_p: f64,
    pub upsample_factor: u32,
    pub reset_mode: ResetMode,
    pub seed: u64,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            threshold: 1.0,
            sigma_g: 0.0,
            sigma_p: 0.0,
            upsample_factor: 1,
            reset_mode: ResetMode::SubtractThreshold,
            seed: 7,
        }
    }
}

impl CameraConfig {
    pub fn noise_free(threshold: f64, upsample_factor: u32) -> Self {
        Self {
            threshold,
            upsample_factor,
            ..Self::default()
        }
    }

    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            out.push(("threshold".into(), "threshold must be positive".into()));
        }
        if !(self.sigma_g >= 0.0 && self.sigma_g.is_finite()) {
            out.push(("sigma_g".into(), "sigma_g must be nonnegative".into()));
        }
        if !(self.sigma_p >= 0.0 && self.sigma_p.is_finite()) {
            out.push(("sigma_p".into(), "sigma_p must be nonnegative".into()));
        }
        if self.upsample_factor < 1 {
            out.push(("upsample_factor".into(), "upsample factor must be at least 1".into()));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some((field, msg)) => Err(Error::InvalidParam(format!("{field}: {msg}"))),
        }
    }

    pub fn meta(&self) -> StreamMeta {
        StreamMeta {
            pattern: None,
            reset_mode: self.reset_mode,
            threshold: self.threshold as f32,
            sigma_g: self.sigma_g as f32,
            sigma_p: self.sigma_p as f32,
        }
    }

    fn noisy(&self) -> bool {
        self.sigma_g > 0.0 || self.sigma_p > 0.0
    }
}

/// Simulates one pixel over the full intensity trace, returning spike times.
fn fire_pixel<S: Real>(trace: impl Iterator<Item = S>, cfg: &CameraConfig, y: usize, x: usize) -> Vec<u32> {
    let theta = S::of(cfg.threshold);
    let dt = S::one() / S::of(cfg.upsample_factor as f64);
    let sg2 = cfg.sigma_g * cfg.sigma_g;
    let sp2 = cfg.sigma_p * cfg.sigma_p;
    let mut rng = cfg.noisy().then(|| child_rng(cfg.seed, &[y as u64, x as u64]));
    let mut acc = S::zero();
    let mut times = Vec::new();
    let mut t = 0u32;
    for intensity in trace {
        for _ in 0..cfg.upsample_factor {
            let inst = match rng.as_mut() {
                None => intensity,
                Some(rng) => {
                    let z: f64 = StandardNormal.sample(rng);
                    let sd = (sg2 + sp2 * intensity.as_f64()).sqrt();
                    (intensity + S::of(sd * z)).max(S::zero())
                }
            };
            acc += inst * dt;
            if acc >= theta {
                times.push(t);
                acc = match cfg.reset_mode {
                    ResetMode::ResetToZero => S::zero(),
                    ResetMode::SubtractThreshold => acc - theta,
                };
            }
            t += 1;
        }
    }
    times
}

pub fn integrate_and_fire<S: Real>(frames: &[IntensityFrame<S>], cfg: &CameraConfig) -> Result<SpikeStream> {
    cfg.validate()?;
    let first = frames.first().ok_or(Error::EmptyInput("frame list"))?;
    let (h, w) = first.dims();
    if let Some(bad) = frames.iter().find(|f| f.dims() != (h, w)) {
        return Err(Error::dims((h, w), bad.dims()));
    }
    let timesteps = frames.len() * cfg.upsample_factor as usize;

    let per_pixel: Vec<Vec<u32>> = (0..h * w)
        .into_par_iter()
        .map(|i| {
            let (y, x) = (i / w, i % w);
            fire_pixel(frames.iter().map(|f| f.get(y, x)), cfg, y, x)
        })
        .collect();

    let mut stream = SpikeStream::zeros((h, w, timesteps), cfg.meta());
    for (i, times) in per_pixel.iter().enumerate() {
        for &t in times {
            stream.set(t as usize, i / w, i % w, true);
        }
    }
    Ok(stream)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColorSpikeStream {
    pub stream: SpikeStream,
    pub mask: BayerMask,
}

/// Converts RGB frames to the single-channel mosaic seen through `mask`.
pub fn mosaic_intensity<S: Real>(frame: &RgbImage, mask: &BayerMask) -> Result<IntensityFrame<S>> {
    let (h, w) = mask.dims();
    if (frame.height() as usize, frame.width() as usize) != (h, w) {
        return Err(Error::dims((h, w), (frame.height(), frame.width())));
    }
    let scale = S::of(255.0);
    let plane = Plane::from_fn(h, w, |y, x| {
        let c = mask.channel_at(y, x).index();
        S::of(frame.get_pixel(x as u32, y as u32).0[c] as f64) / scale
    });
    Ok(IntensityFrame::clamped(plane))
}

pub fn simulate_color_spikes<S: Real>(
    rgb_frames: &[RgbImage],
    mask: &BayerMask,
    cfg: &CameraConfig,
) -> Result<ColorSpikeStream> {
    let frames = rgb_frames
        .iter()
        .map(|f| mosaic_intensity::<S>(f, mask))
        .collect::<Result<Vec<_>>>()?;
    let mut stream = integrate_and_fire(&frames, cfg)?;
    stream.meta.pattern = Some(mask.pattern());
    Ok(ColorSpikeStream {
        stream,
        mask: mask.clone(),
    })
}
