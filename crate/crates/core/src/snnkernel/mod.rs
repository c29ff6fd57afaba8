//! Forward-only spiking building blocks: LIF neurons, tdBN, convolution and
//! the spiking residual block.

mod container;
mod conv;
mod lif;
mod srb;
mod tdbn;

pub use container::{NamedTensor, TensorContainer};
pub use conv::{conv2d_same, conv_macs, ConvWeights};
pub use lif::{heaviside, lif_scalar, lif_step, lif_step_inplace, LIFConfig, LIFState, SpikeTensor};
pub use srb::{
    scu_forward, srb_forward, srb_forward_traced, srb_op_count, IdentityMau, Mau, SRBWeights, SrbOpCount, SrbTrace,
};
pub use tdbn::{channel_stats, tdbn, tdbn_normalize, TdBNParams, CHANNEL_AXIS};

/// Default number of SNN timesteps.
pub const DEFAULT_TIMESTEPS: usize = 5;
