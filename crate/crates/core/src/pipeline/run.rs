use std::fs;
use std::path::{Path, PathBuf};

use image::RgbImage;
use ndarray::Array5;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{CardConfig, CardStyle, PipelineConfig};
use crate::energy::{census_from_run, energy_report, EnergyReport, OpCensus};
use crate::error::{Error, Result};
use crate::imageio::{load_rgb, save_png};
use crate::metrics::{evaluate, MetricReport};
use crate::rainsynth::generate_sequence;
use crate::snnkernel::{srb_forward_traced, srb_op_count, IdentityMau, LIFConfig, SRBWeights};
use crate::spikecam::{make_bayer_mask, save_stream, simulate_color_spikes, stream_stats, SpikeStream};
use crate::spikerecon::cfa_reconstruct;

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const REPORT_FILE: &str = "report.toml";
pub const PARTIAL_MARKER: &str = ".partial";
pub const STREAM_FILE: &str = "stream.spks";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMetrics {
    pub frame: usize,
    pub psnr_db: f64,
    pub ssim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub hash: String,
    /// Mean reconstruction quality against the clean frames.
    pub mean: MetricReport,
    pub total_spikes: u64,
    pub firing_rate: f64,
    pub frames: Vec<FrameMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub census: Option<OpCensus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run, plus digests of what it wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub hash: String,
    pub config: PipelineConfig,
    pub artifacts: Vec<Artifact>,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::format("manifest", e.message()))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Recompute even when a finished run with the same hash exists.
    pub force: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub report: RunReport,
    /// The outputs were found on disk and not recomputed.
    pub reused: bool,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Content hash of a resolved config and its background bytes. The output
/// root does not contribute.
pub fn config_hash(cfg: &PipelineConfig, background: Option<&[u8]>) -> String {
    let mut cfg = cfg.resolved();
    cfg.paths.output = PathBuf::new();
    let mut h = Sha256::new();
    h.update(cfg.to_toml().as_bytes());
    if let Some(bytes) = background {
        h.update(b"\0background\0");
        h.update(bytes);
    }
    hex(&h.finalize()[..8])
}

/// Deterministic synthetic background.
pub fn test_card(card: &CardConfig) -> RgbImage {
    match card.style {
        CardStyle::Gray => RgbImage::from_pixel(card.width, card.height, image::Rgb([128, 128, 128])),
        CardStyle::Blocks => RgbImage::from_fn(card.width, card.height, |x, y| {
            let k = (x / 16 + 3 * (y / 16)) as u8;
            image::Rgb([112 + 4 * (k % 5), 120 + 4 * ((k / 2) % 4), 116 + 4 * ((k + 1) % 3)])
        }),
    }
}

struct Writer {
    dir: PathBuf,
    written: Vec<String>,
}

impl Writer {
    fn png(&mut self, rel: String, img: &RgbImage) -> Result<()> {
        let path = self.dir.join(&rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        save_png(img, path)?;
        self.written.push(rel);
        Ok(())
    }

    fn stream(&mut self, stream: &SpikeStream) -> Result<()> {
        save_stream(stream, self.dir.join(STREAM_FILE))?;
        self.written.push(STREAM_FILE.into());
        Ok(())
    }

    fn text(&mut self, rel: &str, text: &str) -> Result<()> {
        fs::write(self.dir.join(rel), text)?;
        self.written.push(rel.into());
        Ok(())
    }

    fn artifacts(&self) -> Result<Vec<Artifact>> {
        self.written
            .iter()
            .map(|rel| {
                Ok(Artifact {
                    path: rel.clone(),
                    sha256: sha256_hex(&fs::read(self.dir.join(rel))?),
                })
            })
            .collect()
    }
}

fn frame_name(kind: &str, i: usize) -> String {
    format!("{kind}/frame_{i:03}.png")
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunOutcome> {
    run_pipeline_with(cfg, RunOptions::default())
}

/// Rain synthesis, color spike simulation, reconstruction, metrics and the
/// optional energy census, written under `<paths.output>/run-<hash>`.
///
/// A `.partial` marker stays in the run directory if any stage fails.
pub fn run_pipeline_with(cfg: &PipelineConfig, opts: RunOptions) -> Result<RunOutcome> {
    let violations = cfg.violations();
    if !violations.is_empty() {
        return Err(Error::Config(violations.iter().map(ToString::to_string).collect()));
    }
    let cfg = cfg.resolved();

    let (background, bg_bytes) = match &cfg.paths.background {
        Some(path) => {
            let bytes = fs::read(path).map_err(|e| Error::stage("load")(e.into()))?;
            (load_rgb(path).map_err(Error::stage("load"))?, Some(bytes))
        }
        None => (test_card(&cfg.card), None),
    };
    let hash = config_hash(&cfg, bg_bytes.as_deref());
    let dir = cfg.paths.output.join(format!("run-{hash}"));
    let marker = dir.join(PARTIAL_MARKER);

    if !opts.force && dir.join(REPORT_FILE).is_file() && !marker.exists() {
        let text = fs::read_to_string(dir.join(REPORT_FILE))?;
        let report = toml::from_str(&text).map_err(|e| Error::format("report", e.message()))?;
        return Ok(RunOutcome {
            dir,
            report,
            reused: true,
        });
    }

    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::create_dir_all(&dir)?;
    fs::write(&marker, b"")?;
    let mut out = Writer {
        dir: dir.clone(),
        written: Vec::new(),
    };

    let (rainy, _) =
        generate_sequence::<f64>(&background, &cfg.rain, cfg.n_frames).map_err(Error::stage("rainsynth"))?;
    for (i, frame) in rainy.iter().enumerate() {
        out.png(frame_name("rainy", i), frame)?;
        out.png(frame_name("clean", i), &background)?;
    }

    let dims = (background.height() as usize, background.width() as usize);
    let stream = make_bayer_mask(dims, cfg.pattern)
        .and_then(|mask| simulate_color_spikes::<f64>(&rainy, &mask, &cfg.camera))
        .map_err(Error::stage("spikecam"))?
        .stream;
    out.stream(&stream)?;

    let u = cfg.camera.upsample_factor as usize;
    let mut frames = Vec::with_capacity(cfg.n_frames);
    for i in 0..cfg.n_frames {
        let recon = cfa_reconstruct::<f64>(&stream, &cfg.recon, i * u + u / 2).map_err(Error::stage("spikerecon"))?;
        let m = evaluate(&background, &recon).map_err(Error::stage("metrics"))?;
        out.png(frame_name("recon", i), &recon)?;
        frames.push(FrameMetrics {
            frame: i,
            psnr_db: m.psnr_db,
            ssim: m.ssim,
        });
    }
    let n = frames.len() as f64;
    let mean = MetricReport {
        psnr_db: frames.iter().map(|f| f.psnr_db).sum::<f64>() / n,
        ssim: frames.iter().map(|f| f.ssim).sum::<f64>() / n,
    };

    let (census, energy) = match &cfg.energy {
        Some(ecfg) => {
            let census = snn_census(&stream, &cfg).map_err(Error::stage("snnkernel"))?;
            let report = energy_report(&census, ecfg).map_err(Error::stage("energy"))?;
            (Some(census), Some(report))
        }
        None => (None, None),
    };

    let stats = stream_stats(&stream);
    let report = RunReport {
        hash: hash.clone(),
        mean,
        total_spikes: stats.total_spikes,
        firing_rate: stats.firing_rate,
        frames,
        census,
        energy,
    };
    out.text(REPORT_FILE, &toml::to_string(&report).expect("report serializes"))?;
    let manifest = Manifest {
        hash,
        config: cfg,
        artifacts: out.artifacts()?,
    };
    fs::write(
        dir.join(MANIFEST_FILE),
        toml::to_string(&manifest).expect("manifest serializes"),
    )?;
    fs::remove_file(&marker)?;
    Ok(RunOutcome {
        dir,
        report,
        reused: false,
    })
}

/// Runs one spiking residual block over the first `snn.timesteps` spike
/// frames and measures its activity.
/// Feeds the block one step per frame interval: the TFP intensity over that interval.
fn snn_census(stream: &SpikeStream, cfg: &PipelineConfig) -> Result<OpCensus> {
    let (h, w, _) = stream.dims();
    let t = cfg.snn.timesteps;
    let u = cfg.camera.upsample_factor as usize;
    let theta = cfg.camera.threshold;
    let input = Array5::from_shape_fn((t, 1, 1, h, w), |(ti, _, _, y, x)| {
        theta * (ti * u..(ti + 1) * u).filter(|&s| stream.get(s, y, x)).count() as f64
    });
    let weights = SRBWeights::<f64>::seeded(1, cfg.snn.hidden, cfg.snn.gain, cfg.snn.seed);
    let trace = srb_forward_traced(input.view(), &weights, &LIFConfig::default(), &IdentityMau)?;
    let ops = srb_op_count((t, 1, 1, h, w), &weights, &IdentityMau);
    let mut census = census_from_run(&trace.spikes, ops.ann_adds, t as u32)?;
    census.ann_flops = Some(ops.flops);
    Ok(census)
}

/// Re-runs the config recorded in a manifest, optionally into another root.
pub fn rerun_from_manifest(manifest: impl AsRef<Path>, output: Option<&Path>) -> Result<RunOutcome> {
    let mut cfg = Manifest::load(manifest)?.config;
    if let Some(root) = output {
        cfg.paths.output = root.to_path_buf();
    }
    run_pipeline_with(&cfg, RunOptions { force: true })
}
