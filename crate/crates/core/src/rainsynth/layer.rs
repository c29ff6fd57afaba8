use image::RgbImage;

use super::kernel::BlurKernel;
use super::noise::NoiseMap;
use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::scalar::Real;

pub const MAX_RAIN: f64 = 255.0;

/// Additive rain-streak intensity, nonnegative and at most 255.
#[derive(Debug, Clone, PartialEq)]
pub struct RainLayer<S> {
    values: Plane<S>,
}

impl<S: Real> RainLayer<S> {
    /// Clamps into `[0, 255]`.
    pub fn from_plane(values: Plane<S>) -> Self {
        let hi = S::of(MAX_RAIN);
        Self {
            values: values.map(|v| v.max(S::zero()).min(hi)),
        }
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            values: Plane::zeros(height, width),
        }
    }

    pub fn plane(&self) -> &Plane<S> {
        &self.values
    }

    pub fn dims(&self) -> (usize, usize) {
        self.values.dims()
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> S {
        self.values.get(y, x)
    }
}

/// Same-size 2-D convolution with zero padding outside the input.
pub fn convolve_zero_pad<S: Real>(input: &Plane<S>, kernel: &BlurKernel<S>) -> Plane<S> {
    let (h, w) = input.dims();
    let r = kernel.radius() as isize;
    let mut out = Plane::zeros(h, w);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = S::zero();
            for ky in -r..=r {
                let sy = y - ky;
                if sy < 0 || sy >= h as isize {
                    continue;
                }
                for kx in -r..=r {
                    let sx = x - kx;
                    if sx < 0 || sx >= w as isize {
                        continue;
                    }
                    acc += kernel.at(ky, kx) * input.get(sy as usize, sx as usize);
                }
            }
            out.set(y as usize, x as usize, acc);
        }
    }
    out
}

/// Convolves the thresholded noise with the streak kernel.
///
/// Only nonzero noise pixels contribute, so the work scales with the number
/// of surviving highlights rather than the image area.
pub fn synthesize_rain_layer<S: Real>(noise: &NoiseMap, kernel: &BlurKernel<S>) -> Result<RainLayer<S>> {
    let (h, w) = noise.dims();
    if kernel.side() > h || kernel.side() > w {
        return Err(Error::KernelExceedsImage {
            kernel: kernel.side(),
            height: h,
            width: w,
        });
    }
    let r = kernel.radius() as isize;
    let mut out = Plane::zeros(h, w);
    for sy in 0..h {
        for sx in 0..w {
            let n = noise.get(sy, sx);
            if n == 0 {
                continue;
            }
            let n = S::of(n as f64);
            for ky in -r..=r {
                let y = sy as isize + ky;
                if y < 0 || y >= h as isize {
                    continue;
                }
                for kx in -r..=r {
                    let x = sx as isize + kx;
                    if x < 0 || x >= w as isize {
                        continue;
                    }
                    let k = kernel.at(ky, kx);
                    if k != S::zero() {
                        let idx = y as usize * w + x as usize;
                        out.as_mut_slice()[idx] += k * n;
                    }
                }
            }
        }
    }
    Ok(RainLayer::from_plane(out))
}

/// `out = clamp(round(background + opacity * rain), 0, 255)` on every channel.
pub fn compose_rainy_frame<S: Real>(background: &RgbImage, rain: &RainLayer<S>, opacity: f64) -> Result<RgbImage> {
    let (h, w) = rain.dims();
    if (background.height() as usize, background.width() as usize) != (h, w) {
        return Err(Error::dims((h, w), (background.height(), background.width())));
    }
    if !(0.0..=1.0).contains(&opacity) {
        return Err(Error::InvalidParam("opacity out of [0,1]".into()));
    }
    let mut out = background.clone();
    for (x, y, px) in out.enumerate_pixels_mut() {
        let add = opacity * rain.get(y as usize, x as usize).as_f64();
        for c in px.0.iter_mut() {
            *c = (*c as f64 + add).round().clamp(0.0, 255.0) as u8;
        }
    }
    Ok(out)
}
