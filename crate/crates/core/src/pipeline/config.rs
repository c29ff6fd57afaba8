use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::energy::EnergyConfig;
use crate::rainsynth::{RainParams, RAIN100C_FRAMES};
use crate::rng::derive_seed;
use crate::snnkernel::DEFAULT_TIMESTEPS;
use crate::spikecam::{BayerPattern, CameraConfig};
use crate::spikerecon::ReconConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CardStyle {
    /// Uniform mid gray.
    Gray,
    /// 16x16 blocks of slightly different colors.
    Blocks,
}

/// Synthetic background used when no background image is configured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CardConfig {
    pub height: u32,
    pub width: u32,
    pub style: CardStyle,
}

impl Default for CardConfig {
    fn default() -> Self {
        Self {
            height: 64,
            width: 64,
            style: CardStyle::Gray,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Background image (PNG or PPM); the card is used when absent.
    pub background: Option<PathBuf>,
    /// Directory receiving `run-<hash>` output directories.
    pub output: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            background: None,
            output: PathBuf::from("runs"),
        }
    }
}

/// Spiking residual block run over the spike stream for the energy census.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnnConfig {
    pub timesteps: usize,
    pub hidden: usize,
    pub gain: f64,
    pub seed: u64,
}

impl Default for SnnConfig {
    fn default() -> Self {
        Self {
            timesteps: DEFAULT_TIMESTEPS,
            hidden: 4,
            gain: 3.0,
            seed: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Master seed; when set it replaces every per-stage seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub n_frames: usize,
    pub pattern: BayerPattern,
    pub rain: RainParams,
    pub camera: CameraConfig,
    #[serde(default = "pipeline_recon")]
    pub recon: ReconConfig,
    pub card: CardConfig,
    pub paths: PathsConfig,
    pub snn: SnnConfig,
    /// Energy report; skipped when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyConfig>,
}

fn pipeline_recon() -> ReconConfig {
    // Whole-stream window: the default 39 exceeds a 14-frame stream.
    ReconConfig {
        window: 0,
        ..ReconConfig::default()
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: None,
            n_frames: RAIN100C_FRAMES,
            pattern: BayerPattern::Rggb,
            rain: RainParams::default(),
            camera: CameraConfig::default(),
            recon: pipeline_recon(),
            card: CardConfig::default(),
            paths: PathsConfig::default(),
            snn: SnnConfig::default(),
            energy: None,
        }
    }
}

/// One failed range check, addressed by its dotted field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

fn prefixed(section: &str, items: Vec<(String, String)>) -> impl Iterator<Item = Violation> + '_ {
    items.into_iter().map(move |(field, message)| Violation {
        path: format!("{section}.{field}"),
        message,
    })
}

impl PipelineConfig {
    /// Total camera timesteps.
    pub fn timesteps(&self) -> usize {
        self.n_frames * self.camera.upsample_factor.max(1) as usize
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |path: &str, message: String| {
            out.push(Violation {
                path: path.into(),
                message,
            })
        };
        if self.n_frames < 1 {
            push("n_frames", "n_frames must be at least 1".into());
        }
        if self.card.height < 11 || self.card.width < 11 {
            push("card", "card must be at least 11x11".into());
        }
        if self.recon.window > self.timesteps() {
            push(
                "recon.window",
                format!(
                    "window {} exceeds stream length {}",
                    self.recon.window,
                    self.timesteps()
                ),
            );
        }
        if self.energy.is_some() && (self.snn.timesteps < 1 || self.snn.timesteps > self.n_frames) {
            push("snn.timesteps", format!("timesteps must be in [1, {}]", self.n_frames));
        }
        if self.snn.hidden < 1 {
            push("snn.hidden", "hidden channels must be at least 1".into());
        }
        if let Some(e) = &self.energy {
            for (name, v) in [("e_sop", e.e_sop), ("e_sign", e.e_sign), ("e_flop", e.e_flop)] {
                if !(v >= 0.0 && v.is_finite()) {
                    push(&format!("energy.{name}"), format!("{name} must be nonnegative"));
                }
            }
        }
        out.extend(prefixed("rain", self.rain.violations()));
        out.extend(prefixed("camera", self.camera.violations()));
        out.extend(prefixed("recon", self.recon.violations()));
        out
    }

    /// Applies the master seed, if any, to each stage and clears it, so the
    /// result fully describes the run.
    pub fn resolved(&self) -> Self {
        let mut cfg = self.clone();
        if let Some(seed) = cfg.seed.take() {
            cfg.rain.seed = derive_seed(seed, &[0x52]);
            cfg.camera.seed = derive_seed(seed, &[0x43]);
            cfg.snn.seed = derive_seed(seed, &[0x53]);
        }
        // The reconstruction must use the camera's time base.
        cfg.recon.upsample_factor = cfg.camera.upsample_factor;
        cfg
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Parses and range-checks a TOML pipeline config.
pub fn validate_config(text: &str) -> Result<PipelineConfig, Vec<Violation>> {
    let cfg: PipelineConfig = toml::from_str(text).map_err(|e| {
        vec![Violation {
            path: String::new(),
            message: e.message().to_string(),
        }]
    })?;
    let v = cfg.violations();
    if v.is_empty() {
        Ok(cfg)
    } else {
        Err(v)
    }
}
