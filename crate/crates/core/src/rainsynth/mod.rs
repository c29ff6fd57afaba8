//! Parameterized continuous rain-streak synthesis.

mod kernel;
mod layer;
mod noise;
mod params;
mod sampler;
mod sequence;

pub use kernel::{build_motion_kernel, canvas_side, BlurKernel};
pub use layer::{compose_rainy_frame, convolve_zero_pad, synthesize_rain_layer, RainLayer};
pub use noise::{generate_noise_map, uniform_noise, NoiseMap};
pub use params::RainParams;
pub use sampler::ParamRanges;
pub use sequence::{base_layer, drifted_layers, generate_sequence, translate_toroidal, RainSequence};

/// Frames per background in the continuous-rain dataset recipe.
pub const RAIN100C_FRAMES: usize = 14;
