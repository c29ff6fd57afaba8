//! Same-size 2-D convolution over `(T, B, C, H, W)` tensors.

use ndarray::{Array1, Array4, Array5, ArrayView5};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvWeights<S> {
    /// `(out_channels, in_channels, k, k)`, `k` odd.
    pub weight: Array4<S>,
    pub bias: Array1<S>,
}

impl<S: Real> ConvWeights<S> {
    pub fn zeros(out_channels: usize, in_channels: usize, k: usize) -> Self {
        Self {
            weight: Array4::zeros((out_channels, in_channels, k, k)),
            bias: Array1::zeros(out_channels),
        }
    }

    /// Uniform in `±scale / sqrt(fan_in)` for weights, `±0.1` for biases.
    pub fn random<R: Rng>(out_channels: usize, in_channels: usize, k: usize, scale: f64, rng: &mut R) -> Self {
        let bound = scale / ((in_channels * k * k) as f64).sqrt();
        Self {
            weight: Array4::from_shape_fn((out_channels, in_channels, k, k), |_| {
                S::of(rng.random_range(-bound..=bound))
            }),
            bias: Array1::from_shape_fn(out_channels, |_| S::of(rng.random_range(-0.1..=0.1))),
        }
    }

    pub fn out_channels(&self) -> usize {
        self.weight.shape()[0]
    }

    pub fn in_channels(&self) -> usize {
        self.weight.shape()[1]
    }

    pub fn kernel_size(&self) -> usize {
        self.weight.shape()[2]
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.weight.shape();
        if s[2] != s[3] || s[2].is_multiple_of(2) {
            return Err(Error::ShapeMismatch(format!(
                "kernel {}x{} must be odd and square",
                s[2], s[3]
            )));
        }
        if self.bias.len() != s[0] {
            return Err(Error::ShapeMismatch(format!(
                "bias has {} entries for {} outputs",
                self.bias.len(),
                s[0]
            )));
        }
        Ok(())
    }
}

/// Stride-1, zero-padded cross-correlation keeping the spatial size.
pub fn conv2d_same<S: Real>(x: ArrayView5<'_, S>, w: &ConvWeights<S>) -> Result<Array5<S>> {
    w.validate()?;
    let (t, b, cin, h, wd) = x.dim();
    if cin != w.in_channels() {
        return Err(Error::ShapeMismatch(format!(
            "input has {cin} channels, kernel expects {}",
            w.in_channels()
        )));
    }
    let cout = w.out_channels();
    let k = w.kernel_size();
    let pad = (k / 2) as isize;
    let x = x.as_standard_layout();
    let src = x.as_slice().expect("standard layout");
    let weight = w.weight.as_standard_layout();
    let wts = weight.as_slice().expect("standard layout");
    let mut out = Array5::<S>::zeros((t, b, cout, h, wd));
    let dst = out.as_slice_mut().expect("fresh array is contiguous");
    let plane = h * wd;

    for tb in 0..t * b {
        let src_tb = &src[tb * cin * plane..(tb + 1) * cin * plane];
        let dst_tb = &mut dst[tb * cout * plane..(tb + 1) * cout * plane];
        for co in 0..cout {
            let out_plane = &mut dst_tb[co * plane..(co + 1) * plane];
            out_plane.fill(w.bias[co]);
            for ci in 0..cin {
                let in_plane = &src_tb[ci * plane..(ci + 1) * plane];
                for ky in 0..k {
                    let dy = ky as isize - pad;
                    let (y0, y1) = ((-dy).max(0) as usize, (h as isize - dy.max(0)).max(0) as usize);
                    for kx in 0..k {
                        let wv = wts[((co * cin + ci) * k + ky) * k + kx];
                        if wv == S::zero() {
                            continue;
                        }
                        let dx = kx as isize - pad;
                        let (x0, x1) = ((-dx).max(0) as usize, (wd as isize - dx.max(0)).max(0) as usize);
                        if x0 >= x1 {
                            continue;
                        }
                        for y in y0..y1 {
                            let sy = (y as isize + dy) as usize;
                            let s0 = (sy * wd) as isize + x0 as isize + dx;
                            let src_row = &in_plane[s0 as usize..s0 as usize + (x1 - x0)];
                            let dst_row = &mut out_plane[y * wd + x0..y * wd + x1];
                            for (d, &s) in dst_row.iter_mut().zip(src_row) {
                                *d += wv * s;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Multiply-accumulate count of one [`conv2d_same`] call on `(T, B, _, H, W)`.
pub fn conv_macs(dims: (usize, usize, usize, usize, usize), w: &ConvWeights<impl Real>) -> u64 {
    let (t, b, _, h, wd) = dims;
    let k = w.kernel_size();
    (t * b * w.out_channels() * h * wd * w.in_channels() * k * k) as u64
}
