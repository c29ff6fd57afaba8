//! Per-background parameter sampling for continuous-rain datasets.
//!
//! Each draw is uniform over the configured closed ranges. Background `i`
//! draws from its own ChaCha8 stream derived from `(seed, i)`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::params::RainParams;
use crate::rng::{child_rng, derive_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamRanges {
    pub length_px: (u32, u32),
    pub width_px: (u32, u32),
    pub angle_deg: (f64, f64),
    pub noise_level: (u8, u8),
    pub opacity: (f64, f64),
    pub drift_rows: (f64, f64),
    pub drift_cols: (f64, f64),
    /// Round drifts to whole pixels so frames are exact rolls.
    pub integer_drift: bool,
}

impl Default for ParamRanges {
    fn default() -> Self {
        Self {
            length_px: (7, 31),
            width_px: (1, 3),
            angle_deg: (-30.0, 30.0),
            noise_level: (4, 24),
            opacity: (0.5, 1.0),
            drift_rows: (1.0, 6.0),
            drift_cols: (-2.0, 2.0),
            integer_drift: true,
        }
    }
}

impl ParamRanges {
    pub fn sample(&self, seed: u64, index: u64) -> RainParams {
        let mut rng = child_rng(seed, &[0x5241_494e, index]);
        let mut real = |(lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..=hi) } else { lo };
        let angle = real(self.angle_deg).clamp(-89.0, 89.0);
        let opacity = real(self.opacity).clamp(0.0, 1.0);
        let mut dy = real(self.drift_rows);
        let mut dx = real(self.drift_cols);
        if self.integer_drift {
            dy = dy.round();
            dx = dx.round();
        }
        let mut int = |(lo, hi): (u32, u32)| if hi > lo { rng.random_range(lo..=hi) } else { lo };
        let length = int(self.length_px).max(1);
        let width = int(self.width_px).max(1);
        let noise = int((self.noise_level.0 as u32, self.noise_level.1 as u32)).min(255) as u8;
        RainParams {
            length_px: length,
            width_px: width,
            angle_deg: angle,
            noise_level: noise,
            opacity,
            drift_per_frame: (dy, dx),
            seed: derive_seed(seed, &[0x4e4f_4953, index]),
        }
    }
}
