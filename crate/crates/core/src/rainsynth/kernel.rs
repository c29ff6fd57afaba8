//! Normalized motion-blur kernels for raindrop trails.
//!
//! Each weight is the exact area of its pixel covered by a centered
//! `length x width` rectangle tilted by the requested angle. The result is
//! cropped to the smallest odd square holding all nonzero weights and
//! normalized to unit sum.

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct BlurKernel<S> {
    weights: Plane<S>,
}

impl<S: Real> BlurKernel<S> {
    /// Wraps explicit weights. The side must be odd; weights are normalized.
    pub fn from_weights(side: usize, weights: Vec<S>) -> Result<Self> {
        if side == 0 || side.is_multiple_of(2) {
            return Err(Error::DegenerateKernel(format!("side {side} is not odd")));
        }
        if weights.iter().any(|w| !(*w >= S::zero())) {
            return Err(Error::DegenerateKernel("negative weight".into()));
        }
        let total: S = weights.iter().copied().sum();
        if total <= S::zero() {
            return Err(Error::DegenerateKernel("zero total weight".into()));
        }
        let plane = Plane::from_vec(side, side, weights.into_iter().map(|w| w / total).collect())?;
        Ok(Self { weights: plane })
    }

    pub fn side(&self) -> usize {
        self.weights.height()
    }

    pub fn radius(&self) -> usize {
        self.side() / 2
    }

    /// Weight at offset `(dy, dx)` from the center.
    pub fn at(&self, dy: isize, dx: isize) -> S {
        let r = self.radius() as isize;
        if dy.abs() > r || dx.abs() > r {
            return S::zero();
        }
        self.weights.get((dy + r) as usize, (dx + r) as usize)
    }

    pub fn weights(&self) -> &Plane<S> {
        &self.weights
    }

    pub fn sum(&self) -> S {
        self.weights.sum()
    }
}

/// Coverage below this does not widen the cropped kernel.
const SLIVER: f64 = 1e-12;

/// Keeps the part of a convex polygon where `inside(p) >= 0`.
fn clip(poly: &[(f64, f64)], inside: impl Fn((f64, f64)) -> f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (i, &a) in poly.iter().enumerate() {
        let b = poly[(i + 1) % poly.len()];
        let (da, db) = (inside(a), inside(b));
        if da >= 0.0 {
            out.push(a);
        }
        if (da >= 0.0) != (db >= 0.0) {
            let t = da / (da - db);
            out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
        }
    }
    out
}

fn area(poly: &[(f64, f64)]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let twice: f64 = (0..poly.len())
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    twice.abs() / 2.0
}

/// Side of the rotation canvas: the next odd integer at or above
/// `L|cos| + L|sin| + w`.
pub fn canvas_side(length_px: u32, width_px: u32, angle_deg: f64) -> usize {
    let t = angle_deg.to_radians();
    let extent = length_px as f64 * (t.cos().abs() + t.sin().abs()) + width_px as f64;
    let n = extent.ceil() as usize;
    if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    }
}

pub fn build_motion_kernel<S: Real>(length_px: u32, width_px: u32, angle_deg: f64) -> Result<BlurKernel<S>> {
    if length_px < 1 {
        return Err(Error::DegenerateKernel("length must be at least 1".into()));
    }
    if width_px < 1 {
        return Err(Error::DegenerateKernel("width must be at least 1".into()));
    }
    if !(angle_deg.is_finite() && angle_deg.abs() < 90.0) {
        return Err(Error::InvalidParam(format!("angle {angle_deg} out of (-90,90)")));
    }
    // A single pixel has no orientation.
    if length_px == 1 && width_px == 1 {
        return BlurKernel::from_weights(1, vec![S::one()]);
    }

    let (sin, cos) = angle_deg.to_radians().sin_cos();
    let (hl, hw) = (length_px as f64 / 2.0, width_px as f64 / 2.0);
    // Corners as (row, col): the long axis points down and toward +x.
    let (dy, dx) = (cos, sin);
    let (ny, nx) = (-sin, cos);
    let corners: Vec<(f64, f64)> = [(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0)]
        .iter()
        .map(|&(a, b)| (a * hl * dy + b * hw * ny, a * hl * dx + b * hw * nx))
        .collect();

    let side = canvas_side(length_px, width_px, angle_deg);
    let rad = (side / 2) as isize;
    let mut canvas = vec![0.0f64; side * side];
    for oy in -rad..=rad {
        for ox in -rad..=rad {
            let (py, px) = (oy as f64, ox as f64);
            let mut poly = clip(&corners, |p| p.0 - (py - 0.5));
            poly = clip(&poly, |p| (py + 0.5) - p.0);
            poly = clip(&poly, |p| p.1 - (px - 0.5));
            poly = clip(&poly, |p| (px + 0.5) - p.1);
            canvas[((oy + rad) as usize) * side + (ox + rad) as usize] = area(&poly);
        }
    }

    let mut reach = 0isize;
    for oy in -rad..=rad {
        for ox in -rad..=rad {
            if canvas[((oy + rad) as usize) * side + (ox + rad) as usize] > SLIVER {
                reach = reach.max(oy.abs()).max(ox.abs());
            }
        }
    }
    let total: f64 = canvas.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateKernel("rotated line vanished".into()));
    }
    let out_side = (2 * reach + 1) as usize;
    let mut weights = Vec::with_capacity(out_side * out_side);
    for oy in -reach..=reach {
        for ox in -reach..=reach {
            let v = canvas[((oy + rad) as usize) * side + (ox + rad) as usize];
            weights.push(S::of(v / total));
        }
    }
    BlurKernel::from_weights(out_side, weights)
}
