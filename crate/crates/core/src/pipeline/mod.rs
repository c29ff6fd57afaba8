//! End-to-end orchestration and dataset generation.

mod config;
mod rain100c;
mod run;

pub use config::{validate_config, CardConfig, CardStyle, PathsConfig, PipelineConfig, SnnConfig, Violation};
pub use rain100c::{load_backgrounds, rain100c, BackgroundManifest, PARAMS_FILE};
pub use run::{
    config_hash, rerun_from_manifest, run_pipeline, run_pipeline_with, sha256_hex, test_card, Artifact, FrameMetrics,
    Manifest, RunOptions, RunOutcome, RunReport, MANIFEST_FILE, PARTIAL_MARKER, REPORT_FILE, STREAM_FILE,
};
