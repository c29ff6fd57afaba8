//! Bayer-CFA color spike camera simulation.

mod bayer;
mod format;
mod simulate;
mod stream;

pub use bayer::{make_bayer_mask, BayerMask, BayerPattern, Channel};
pub use format::{encode_header, load_stream, read_stream, save_stream, write_stream, HEADER_LEN, MAGIC, VERSION};
pub use simulate::{integrate_and_fire, mosaic_intensity, simulate_color_spikes, CameraConfig, ColorSpikeStream};
pub use stream::{payload_len, stream_stats, ResetMode, SpikeStream, StreamMeta, StreamStats};
