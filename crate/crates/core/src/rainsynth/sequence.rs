//! Temporally coherent rain: one base layer drifting across frames.

use image::RgbImage;
use rayon::prelude::*;

use super::kernel::build_motion_kernel;
use super::layer::{compose_rainy_frame, synthesize_rain_layer, RainLayer};
use super::noise::generate_noise_map;
use super::params::RainParams;
use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct RainSequence<S> {
    pub base_layer: RainLayer<S>,
    pub drift: (f64, f64),
    pub frames: Vec<RainLayer<S>>,
}

impl<S> RainSequence<S> {
    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }
}

#[inline]
fn wrap(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// Translates by `(dy, dx)` with toroidal wrap: `out(y, x) = src(y - dy, x - dx)`.
///
/// Integer shifts are pure index rolls; fractional shifts are resampled
/// bilinearly on the torus.
pub fn translate_toroidal<S: Real>(src: &Plane<S>, dy: f64, dx: f64) -> Plane<S> {
    let (h, w) = src.dims();
    if dy.fract() == 0.0 && dx.fract() == 0.0 {
        let (iy, ix) = (dy as isize, dx as isize);
        return Plane::from_fn(h, w, |y, x| src.get(wrap(y as isize - iy, h), wrap(x as isize - ix, w)));
    }
    let (fy, fx) = (dy.floor(), dx.floor());
    let (ay, ax) = (S::of(dy - fy), S::of(dx - fx));
    let (iy, ix) = (fy as isize, fx as isize);
    let one = S::one();
    Plane::from_fn(h, w, |y, x| {
        // Source position y - dy lies between y - iy - 1 and y - iy.
        let y0 = wrap(y as isize - iy, h);
        let y1 = wrap(y as isize - iy - 1, h);
        let x0 = wrap(x as isize - ix, w);
        let x1 = wrap(x as isize - ix - 1, w);
        (one - ay) * (one - ax) * src.get(y0, x0)
            + (one - ay) * ax * src.get(y0, x1)
            + ay * (one - ax) * src.get(y1, x0)
            + ay * ax * src.get(y1, x1)
    })
}

/// Builds the base rain layer for `params` on an image of `dims`.
pub fn base_layer<S: Real>(dims: (usize, usize), params: &RainParams) -> Result<RainLayer<S>> {
    params.validate()?;
    let noise = generate_noise_map(dims, params.noise_level, params.seed)?;
    let kernel = build_motion_kernel::<S>(params.length_px, params.width_px, params.angle_deg)?;
    synthesize_rain_layer(&noise, &kernel)
}

pub fn drifted_layers<S: Real>(base: &RainLayer<S>, drift: (f64, f64), n_frames: usize) -> Vec<RainLayer<S>> {
    (0..n_frames)
        .into_par_iter()
        .map(|t| {
            let t = t as f64;
            RainLayer::from_plane(translate_toroidal(base.plane(), t * drift.0, t * drift.1))
        })
        .collect()
}

/// Renders `n_frames` rainy frames over a fixed background.
pub fn generate_sequence<S: Real>(
    background: &RgbImage,
    params: &RainParams,
    n_frames: usize,
) -> Result<(Vec<RgbImage>, RainSequence<S>)> {
    if n_frames < 1 {
        return Err(Error::InvalidParam("n_frames must be at least 1".into()));
    }
    let dims = (background.height() as usize, background.width() as usize);
    let base = base_layer::<S>(dims, params)?;
    let frames = drifted_layers(&base, params.drift_per_frame, n_frames);
    let images = frames
        .par_iter()
        .map(|layer| compose_rainy_frame(background, layer, params.opacity))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        images,
        RainSequence {
            base_layer: base,
            drift: params.drift_per_frame,
            frames,
        },
    ))
}
