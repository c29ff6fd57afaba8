use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complete description of one continuous rain pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RainParams {
    /// Streak length in pixels.
    pub length_px: u32,
    /// Streak thickness in pixels.
    pub width_px: u32,
    /// Tilt from vertical in degrees; positive moves the lower end toward +x.
    pub angle_deg: f64,
    /// Noise level `v`: raw samples below `255 - v` are discarded.
    pub noise_level: u8,
    /// Fusion weight of the rain layer.
    pub opacity: f64,
    /// Per-frame displacement `(rows, cols)` of the rain layer.
    pub drift_per_frame: (f64, f64),
    pub seed: u64,
}

impl Default for RainParams {
    fn default() -> Self {
        Self {
            length_px: 9,
            width_px: 1,
            angle_deg: 20.0,
            noise_level: 10,
            opacity: 0.8,
            drift_per_frame: (2.0, 1.0),
            seed: 42,
        }
    }
}

impl RainParams {
    /// Returns every range violation, each prefixed with its field name.
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if self.length_px < 1 {
            out.push(("length_px".into(), "length must be at least 1".into()));
        }
        if self.width_px < 1 {
            out.push(("width_px".into(), "width must be at least 1".into()));
        }
        if !(self.angle_deg.is_finite() && self.angle_deg.abs() < 90.0) {
            out.push(("angle_deg".into(), "angle out of (-90,90)".into()));
        }
        if !(0.0..=1.0).contains(&self.opacity) {
            out.push(("opacity".into(), "opacity out of [0,1]".into()));
        }
        if !(self.drift_per_frame.0.is_finite() && self.drift_per_frame.1.is_finite()) {
            out.push(("drift_per_frame".into(), "drift must be finite".into()));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some((field, msg)) => Err(Error::InvalidParam(format!("{field}: {msg}"))),
        }
    }
}
