//! Threshold-dependent batch normalization.
//!
//! Per channel `k`, statistics are pooled over time, batch and both spatial
//! axes of a `(T, B, C, H, W)` tensor:
//!
//! ```text
//! x̂ = alpha * V_th * (x - E[x_k]) / sqrt(Var[x_k] + eps)
//! y  = lambda_k * x̂ + beta_k
//! ```

use ndarray::{Array5, ArrayView5, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const CHANNEL_AXIS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdBNParams<S> {
    pub alpha: S,
    pub v_th: S,
    pub lambda_k: Vec<S>,
    pub beta_k: Vec<S>,
    pub epsilon: S,
}

impl<S: Real> TdBNParams<S> {
    /// `lambda = 1`, `beta = 0` for every channel.
    pub fn identity(channels: usize, alpha: S, v_th: S) -> Self {
        Self {
            alpha,
            v_th,
            lambda_k: vec![S::one(); channels],
            beta_k: vec![S::zero(); channels],
            epsilon: S::of(1e-5),
        }
    }

    pub fn channels(&self) -> usize {
        self.lambda_k.len()
    }

    pub fn validate(&self, channels: usize) -> Result<()> {
        if !(self.epsilon > S::zero()) {
            return Err(Error::InvalidParam("epsilon must be positive".into()));
        }
        if self.lambda_k.len() != channels || self.beta_k.len() != channels {
            return Err(Error::ShapeMismatch(format!(
                "tdBN has {}/{} affine parameters for {channels} channels",
                self.lambda_k.len(),
                self.beta_k.len()
            )));
        }
        Ok(())
    }
}

/// Per-channel mean and population variance by Welford's recurrence.
pub fn channel_stats<S: Real>(x: ArrayView5<'_, S>) -> Result<Vec<(S, S)>> {
    let per_channel = x.len() / x.shape()[CHANNEL_AXIS].max(1);
    if x.is_empty() || per_channel == 0 {
        return Err(Error::EmptyInput("tdBN statistics population"));
    }
    Ok(x.axis_iter(Axis(CHANNEL_AXIS))
        .map(|chan| {
            let (mut n, mut mean, mut m2) = (S::zero(), S::zero(), S::zero());
            for &v in chan.iter() {
                n += S::one();
                let d = v - mean;
                mean += d / n;
                m2 += d * (v - mean);
            }
            (mean, m2 / n)
        })
        .collect())
}

/// Pre-affine normalization `x̂`.
pub fn tdbn_normalize<S: Real>(x: ArrayView5<'_, S>, alpha: S, v_th: S, epsilon: S) -> Result<Array5<S>> {
    if !(epsilon > S::zero()) {
        return Err(Error::InvalidParam("epsilon must be positive".into()));
    }
    let stats = channel_stats(x)?;
    let mut out = x.to_owned();
    for (mut chan, (mean, var)) in out.axis_iter_mut(Axis(CHANNEL_AXIS)).zip(stats) {
        let scale = alpha * v_th / (var + epsilon).sqrt();
        chan.mapv_inplace(|v| scale * (v - mean));
    }
    Ok(out)
}

pub fn tdbn<S: Real>(x: ArrayView5<'_, S>, params: &TdBNParams<S>) -> Result<Array5<S>> {
    params.validate(x.shape()[CHANNEL_AXIS])?;
    let mut out = tdbn_normalize(x, params.alpha, params.v_th, params.epsilon)?;
    for (k, mut chan) in out.axis_iter_mut(Axis(CHANNEL_AXIS)).enumerate() {
        let (l, b) = (params.lambda_k[k], params.beta_k[k]);
        chan.mapv_inplace(|v| l * v + b);
    }
    Ok(out)
}
