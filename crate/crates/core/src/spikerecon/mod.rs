//! Classical spike-to-intensity reconstruction: spike counting (TFP), inter-
//! spike intervals (TFI) and CFA-aware per-channel demosaicing.

mod demosaic;
mod estimators;

use serde::{Deserialize, Serialize};

pub use demosaic::{cfa_reconstruct, demosaic_bilinear};
pub use estimators::{tfi, tfi_scaled, tfp, tfp_scaled, tfp_window};

use crate::error::{Error, Result};

/// Temporal window default, matching a 39-frame training input.
pub const DEFAULT_WINDOW: usize = 39;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Tfp,
    Tfi,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tfp" => Ok(Method::Tfp),
            "tfi" => Ok(Method::Tfi),
            _ => Err(Error::InvalidParam(format!("unknown reconstruction method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Demosaic {
    None,
    Bilinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconConfig {
    pub method: Method,
    /// TFP window in timesteps; `0` means the whole stream.
    pub window: usize,
    /// Overrides the threshold recorded in the stream header.
    pub threshold: Option<f64>,
    pub demosaic: Demosaic,
    /// Substeps per unit of integration time used by the camera.
    pub upsample_factor: u32,
}

impl Default for ReconConfig {
    fn default() -> Self {
        Self {
            method: Method::Tfp,
            window: DEFAULT_WINDOW,
            threshold: None,
            demosaic: Demosaic::Bilinear,
            upsample_factor: 1,
        }
    }
}

impl ReconConfig {
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t.is_finite()) {
                out.push(("threshold".into(), "threshold must be positive".into()));
            }
        }
        if self.upsample_factor < 1 {
            out.push(("upsample_factor".into(), "upsample factor must be at least 1".into()));
        }
        out
    }

    /// Window length for a stream of `timesteps`, resolving `0` to the full
    /// stream and rejecting windows longer than the stream.
    pub fn resolved_window(&self, timesteps: usize) -> Result<usize> {
        match self.window {
            0 => Ok(timesteps),
            w if w > timesteps => Err(Error::InvalidParam(format!(
                "window {w} exceeds stream length {timesteps}"
            ))),
            w => Ok(w),
        }
    }
}
