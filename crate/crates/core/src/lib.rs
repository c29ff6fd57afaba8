//! Simulation and verification toolkit for spike-camera rain removal
//! research: continuous rain synthesis, color spike-camera simulation,
//! classical spike reconstruction, forward spiking-neuron kernels, SNN energy
//! accounting and Y-channel quality metrics.
//!
//! Numeric kernels are generic over [`Real`] (`f32` or `f64`); the `*F32` and
//! `*F64` aliases below name the common instantiations.

pub mod energy;
pub mod error;
pub mod frame;
pub mod imageio;
pub mod metrics;
pub mod pipeline;
pub mod plane;
pub mod rainsynth;
pub mod rng;
pub mod scalar;
pub mod snnkernel;
pub mod spikecam;
pub mod spikerecon;

pub use error::{Error, Result};
pub use frame::IntensityFrame;
pub use plane::Plane;
pub use scalar::Real;

pub type PlaneF32 = Plane<f32>;
pub type PlaneF64 = Plane<f64>;
pub type IntensityFrameF32 = IntensityFrame<f32>;
pub type IntensityFrameF64 = IntensityFrame<f64>;
pub type BlurKernelF32 = rainsynth::BlurKernel<f32>;
pub type BlurKernelF64 = rainsynth::BlurKernel<f64>;
pub type RainLayerF32 = rainsynth::RainLayer<f32>;
pub type RainLayerF64 = rainsynth::RainLayer<f64>;
pub type RainSequenceF64 = rainsynth::RainSequence<f64>;
pub type LIFConfigF32 = snnkernel::LIFConfig<f32>;
pub type LIFConfigF64 = snnkernel::LIFConfig<f64>;
pub type TdBNParamsF32 = snnkernel::TdBNParams<f32>;
pub type TdBNParamsF64 = snnkernel::TdBNParams<f64>;
pub type SRBWeightsF32 = snnkernel::SRBWeights<f32>;
pub type SRBWeightsF64 = snnkernel::SRBWeights<f64>;
