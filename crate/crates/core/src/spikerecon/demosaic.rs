use image::RgbImage;

use super::estimators::{tfi_scaled, tfp_scaled};
use super::{Demosaic, Method, ReconConfig};
use crate::error::{Error, Result};
use crate::frame::IntensityFrame;
use crate::plane::Plane;
use crate::scalar::Real;
use crate::spikecam::{BayerPattern, Channel, SpikeStream};

const TENT: [[f64; 3]; 3] = [[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]];

/// Splits a mosaic into three full-resolution channels.
///
/// Sampled pixels keep their value. Each missing pixel takes the tent-weighted
/// mean of the same-channel samples in its 3x3 neighbourhood, which is the
/// usual bilinear Bayer interpolation in the interior and renormalizes over
/// the available samples at the border.
pub fn demosaic_bilinear<S: Real>(mosaic: &Plane<S>, pattern: BayerPattern) -> [Plane<S>; 3] {
    let (h, w) = mosaic.dims();
    Channel::ALL.map(|c| {
        Plane::from_fn(h, w, |y, x| {
            if pattern.channel_at(y, x) == c {
                return mosaic.get(y, x);
            }
            let (mut num, mut den) = (S::zero(), S::zero());
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let (sy, sx) = (y as isize + dy, x as isize + dx);
                    if sy < 0 || sx < 0 || sy >= h as isize || sx >= w as isize {
                        continue;
                    }
                    let (sy, sx) = (sy as usize, sx as usize);
                    if pattern.channel_at(sy, sx) != c {
                        continue;
                    }
                    let k = S::of(TENT[(dy + 1) as usize][(dx + 1) as usize]);
                    num += k * mosaic.get(sy, sx);
                    den += k;
                }
            }
            if den > S::zero() {
                num / den
            } else {
                S::zero()
            }
        })
    })
}

fn masked<S: Real>(mosaic: &Plane<S>, pattern: BayerPattern) -> [Plane<S>; 3] {
    let (h, w) = mosaic.dims();
    Channel::ALL.map(|c| {
        Plane::from_fn(h, w, |y, x| {
            if pattern.channel_at(y, x) == c {
                mosaic.get(y, x)
            } else {
                S::zero()
            }
        })
    })
}

/// Reconstructs an RGB frame around `center_t` from a Bayer-pattern stream.
pub fn cfa_reconstruct<S: Real>(stream: &SpikeStream, config: &ReconConfig, center_t: usize) -> Result<RgbImage> {
    let pattern = stream.meta.pattern.ok_or(Error::NotColorStream)?;
    let theta = S::of(config.threshold.unwrap_or(stream.meta.threshold as f64));
    let mosaic: IntensityFrame<S> = match config.method {
        Method::Tfp => {
            let window = config.resolved_window(stream.timesteps())?;
            tfp_scaled(stream, center_t, window, theta, config.upsample_factor)?
        }
        Method::Tfi => tfi_scaled(stream, center_t, theta, config.upsample_factor)?,
    };
    let planes = match config.demosaic {
        Demosaic::Bilinear => demosaic_bilinear(mosaic.plane(), pattern),
        Demosaic::None => masked(mosaic.plane(), pattern),
    };
    let (h, w) = mosaic.dims();
    let to_u8 = |v: S| (v.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8;
    Ok(RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let (y, x) = (y as usize, x as usize);
        image::Rgb([
            to_u8(planes[0].get(y, x)),
            to_u8(planes[1].get(y, x)),
            to_u8(planes[2].get(y, x)),
        ])
    }))
}
