//! Spiking residual block.
//!
//! ```text
//! Î1 = SCU(SCU(I))        SCU = conv -> LIF over T with carried state
//! Î2 = tdBN(Conv(I))
//! out = MAU(Î1 + Î2) + I
//! ```

use ndarray::{Array5, ArrayView5, Axis};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::conv::{conv2d_same, conv_macs, ConvWeights};
use super::lif::{lif_step_inplace, LIFConfig, LIFState, SpikeTensor};
use super::tdbn::{tdbn, TdBNParams};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Attention stage applied to the merged branches.
///
/// `IdentityMau` is the default; implementors supply their own weighting.
pub trait Mau<S: Real>: Send + Sync {
    fn apply(&self, x: Array5<S>) -> Result<Array5<S>>;

    /// Operation count of one application on a tensor with `elements` entries.
    fn op_count(&self, _elements: u64) -> u64 {
        0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMau;

impl<S: Real> Mau<S> for IdentityMau {
    fn apply(&self, x: Array5<S>) -> Result<Array5<S>> {
        Ok(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SRBWeights<S> {
    pub scu1: ConvWeights<S>,
    pub scu2: ConvWeights<S>,
    pub shortcut: ConvWeights<S>,
    pub tdbn: TdBNParams<S>,
}

impl<S: Real> SRBWeights<S> {
    pub fn zeros(channels: usize, hidden: usize) -> Self {
        Self {
            scu1: ConvWeights::zeros(hidden, channels, 3),
            scu2: ConvWeights::zeros(channels, hidden, 3),
            shortcut: ConvWeights::zeros(channels, channels, 3),
            tdbn: TdBNParams::identity(channels, S::one(), S::one()),
        }
    }

    /// Seeded weights; `gain` scales the SCU kernels so the LIF layers see
    /// supra-threshold drive.
    pub fn seeded(channels: usize, hidden: usize, gain: f64, seed: u64) -> Self {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut tdbn = TdBNParams::identity(channels, S::one(), S::one());
        for (l, b) in tdbn.lambda_k.iter_mut().zip(tdbn.beta_k.iter_mut()) {
            *l = S::of(rand::Rng::random_range(&mut rng, 0.5..1.5));
            *b = S::of(rand::Rng::random_range(&mut rng, -0.2..0.2));
        }
        Self {
            scu1: ConvWeights::random(hidden, channels, 3, gain, &mut rng),
            scu2: ConvWeights::random(channels, hidden, 3, gain, &mut rng),
            shortcut: ConvWeights::random(channels, channels, 3, 1.0, &mut rng),
            tdbn,
        }
    }

    pub fn channels(&self) -> usize {
        self.shortcut.in_channels()
    }

    pub fn validate(&self) -> Result<()> {
        for w in [&self.scu1, &self.scu2, &self.shortcut] {
            w.validate()?;
        }
        let c = self.scu1.in_channels();
        let ok = self.scu2.in_channels() == self.scu1.out_channels()
            && self.scu2.out_channels() == c
            && self.shortcut.in_channels() == c
            && self.shortcut.out_channels() == c;
        if !ok {
            return Err(Error::ShapeMismatch(
                "SRB convolutions disagree on channel counts".into(),
            ));
        }
        self.tdbn.validate(c)
    }
}

/// Convolution followed by an LIF layer run across the time axis.
///
/// Returns the spike train as reals and one spike tensor per timestep.
pub fn scu_forward<S: Real>(
    x: ArrayView5<'_, S>,
    conv: &ConvWeights<S>,
    cfg: &LIFConfig<S>,
) -> Result<(Array5<S>, Vec<SpikeTensor>)> {
    let current = conv2d_same(x, conv)?;
    let step_shape = &current.shape()[1..];
    let mut state = LIFState::resting(step_shape, cfg);
    let mut out = Array5::<S>::zeros(current.raw_dim());
    let mut spikes = Vec::with_capacity(current.shape()[0]);
    for (xt, mut ot) in current.axis_iter(Axis(0)).zip(out.axis_iter_mut(Axis(0))) {
        let s = lif_step_inplace(&mut state, xt.into_dyn(), cfg)?;
        ot.assign(
            &s.to_real::<S>()
                .into_dimensionality::<ndarray::Ix4>()
                .expect("step rank is 4"),
        );
        spikes.push(s);
    }
    Ok((out, spikes))
}

#[derive(Debug, Clone)]
pub struct SrbTrace<S> {
    pub output: Array5<S>,
    /// Per-timestep spikes of the first SCU, then of the second.
    pub spikes: Vec<SpikeTensor>,
}

pub fn srb_forward_traced<S: Real>(
    input: ArrayView5<'_, S>,
    weights: &SRBWeights<S>,
    cfg: &LIFConfig<S>,
    mau: &dyn Mau<S>,
) -> Result<SrbTrace<S>> {
    cfg.validate()?;
    weights.validate()?;
    if input.shape()[0] < 1 {
        return Err(Error::EmptyInput("SRB needs at least one timestep"));
    }
    if input.shape()[2] != weights.channels() {
        return Err(Error::ShapeMismatch(format!(
            "input has {} channels, block expects {}",
            input.shape()[2],
            weights.channels()
        )));
    }
    let (s1, mut spikes) = scu_forward(input, &weights.scu1, cfg)?;
    let (branch1, spikes2) = scu_forward(s1.view(), &weights.scu2, cfg)?;
    spikes.extend(spikes2);
    let branch2 = tdbn(conv2d_same(input, &weights.shortcut)?.view(), &weights.tdbn)?;
    let mut output = mau.apply(branch1 + &branch2)?;
    output += &input;
    Ok(SrbTrace { output, spikes })
}

pub fn srb_forward<S: Real>(
    input: ArrayView5<'_, S>,
    weights: &SRBWeights<S>,
    cfg: &LIFConfig<S>,
    mau: &dyn Mau<S>,
) -> Result<Array5<S>> {
    Ok(srb_forward_traced(input, weights, cfg, mau)?.output)
}

/// Analytic operation census of one SRB forward pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrbOpCount {
    /// Multiply-accumulates in the three convolutions.
    pub conv_macs: u64,
    /// Additions in the equivalent ANN (one per multiply-accumulate plus the
    /// branch merge and residual sums).
    pub ann_adds: u64,
    /// Floating-point operations in the equivalent ANN.
    pub flops: u64,
}

pub fn srb_op_count<S: Real>(
    dims: (usize, usize, usize, usize, usize),
    weights: &SRBWeights<S>,
    mau: &dyn Mau<S>,
) -> SrbOpCount {
    let (t, b, c, h, w) = dims;
    let hidden = weights.scu1.out_channels();
    let conv_macs = conv_macs(dims, &weights.scu1)
        + conv_macs((t, b, hidden, h, w), &weights.scu2)
        + conv_macs(dims, &weights.shortcut);
    let elems = (t * b * c * h * w) as u64;
    let hidden_elems = (t * b * hidden * h * w) as u64;
    // LIF: 5 ops per neuron-step; tdBN: 4 normalize + 2 affine per element.
    let lif = 5 * (hidden_elems + elems);
    let bn = 6 * elems;
    let merge = 2 * elems;
    let ann_adds = conv_macs + merge;
    let flops = 2 * conv_macs + lif + bn + merge + mau.op_count(elems);
    SrbOpCount {
        conv_macs,
        ann_adds,
        flops,
    }
}
