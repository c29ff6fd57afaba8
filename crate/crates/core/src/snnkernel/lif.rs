//! Leaky integrate-and-fire dynamics.
//!
//! ```text
//! H = U_prev + (X - (U_prev - V_reset)) / tau
//! S = Θ(H - V_thr)            Θ(z) = 1 iff z >= 0
//! U = (beta * H) ⊙ (1 - S) + V_reset * S
//! ```

use ndarray::{ArrayD, ArrayViewD, IxDyn, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LIFConfig<S> {
    pub tau: S,
    pub v_thr: S,
    pub v_reset: S,
    /// Multiplicative decay applied to non-spiking potentials.
    pub beta: S,
}

impl<S: Real> Default for LIFConfig<S> {
    fn default() -> Self {
        Self {
            tau: S::of(2.0),
            v_thr: S::one(),
            v_reset: S::zero(),
            beta: S::one(),
        }
    }
}

impl<S: Real> LIFConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > S::zero()) || !self.tau.is_finite() {
            return Err(Error::InvalidParam("tau must be positive".into()));
        }
        if !(self.beta >= S::zero() && self.beta <= S::one()) {
            return Err(Error::InvalidParam("beta out of [0,1]".into()));
        }
        if !(self.v_thr.is_finite() && self.v_reset.is_finite()) {
            return Err(Error::InvalidParam("thresholds must be finite".into()));
        }
        Ok(())
    }
}

/// Binary tensor of spikes stored as `0`/`1` bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeTensor(ArrayD<u8>);

impl SpikeTensor {
    pub fn new(values: ArrayD<u8>) -> Result<Self> {
        if values.iter().any(|&v| v > 1) {
            return Err(Error::InvalidParam("spike tensor must be binary".into()));
        }
        Ok(Self(values))
    }

    pub fn zeros(shape: &[usize]) -> Self {
        Self(ArrayD::zeros(IxDyn(shape)))
    }

    pub fn view(&self) -> ArrayViewD<'_, u8> {
        self.0.view()
    }

    pub fn shape(&self) -> &[usize] {
        self.0.shape()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> u64 {
        self.0.iter().map(|&v| v as u64).sum()
    }

    pub fn to_real<S: Real>(&self) -> ArrayD<S> {
        self.0.mapv(|v| if v == 1 { S::one() } else { S::zero() })
    }

    pub fn into_inner(self) -> ArrayD<u8> {
        self.0
    }
}

/// Elementwise `Θ(x)`: `1` where `x >= 0`, including `x == 0`.
pub fn heaviside<S: Real>(x: &ArrayD<S>) -> SpikeTensor {
    SpikeTensor(x.mapv(|v| (v >= S::zero()) as u8))
}

/// Membrane potentials carried between timesteps.
#[derive(Debug, Clone, PartialEq)]
pub struct LIFState<S> {
    pub u: ArrayD<S>,
}

impl<S: Real> LIFState<S> {
    /// Resting state: every potential at `v_reset`.
    pub fn resting(shape: &[usize], cfg: &LIFConfig<S>) -> Self {
        Self {
            u: ArrayD::from_elem(IxDyn(shape), cfg.v_reset),
        }
    }

    pub fn from_potentials(u: ArrayD<S>) -> Result<Self> {
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam("membrane potentials must be finite".into()));
        }
        Ok(Self { u })
    }
}

/// Scalar update of one neuron: returns `(spike, new_potential)`.
#[inline]
pub fn lif_scalar<S: Real>(u_prev: S, x: S, cfg: &LIFConfig<S>) -> (bool, S) {
    let h = u_prev + (x - (u_prev - cfg.v_reset)) / cfg.tau;
    let fired = h - cfg.v_thr >= S::zero();
    let s = if fired { S::one() } else { S::zero() };
    (fired, cfg.beta * h * (S::one() - s) + cfg.v_reset * s)
}

/// Advances `state` by one timestep in place and returns the emitted spikes.
pub fn lif_step_inplace<S: Real>(
    state: &mut LIFState<S>,
    x: ArrayViewD<'_, S>,
    cfg: &LIFConfig<S>,
) -> Result<SpikeTensor> {
    if state.u.shape() != x.shape() {
        return Err(Error::ShapeMismatch(format!(
            "state {:?} vs input {:?}",
            state.u.shape(),
            x.shape()
        )));
    }
    let mut spikes = ArrayD::<u8>::zeros(x.raw_dim());
    Zip::from(&mut state.u).and(&x).and(&mut spikes).for_each(|u, &xi, s| {
        let (fired, next) = lif_scalar(*u, xi, cfg);
        *u = next;
        *s = fired as u8;
    });
    Ok(SpikeTensor(spikes))
}

pub fn lif_step<S: Real>(state: &LIFState<S>, x: &ArrayD<S>, cfg: &LIFConfig<S>) -> Result<(SpikeTensor, LIFState<S>)> {
    let mut next = state.clone();
    let spikes = lif_step_inplace(&mut next, x.view(), cfg)?;
    Ok((spikes, next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr1;

    fn cfg(tau: f64, v_thr: f64, v_reset: f64, beta: f64) -> LIFConfig<f64> {
        LIFConfig {
            tau,
            v_thr,
            v_reset,
            beta,
        }
    }

    #[test]
    fn resting_neuron() {
        let c = cfg(3.0, 1.0, -0.2, 0.7);
        let st = LIFState::resting(&[4], &c);
        let (s, next) = lif_step(&st, &ArrayD::zeros(IxDyn(&[4])), &c).unwrap();
        assert_eq!(s.count_ones(), 0);
        assert!(next.u.iter().all(|&u| u == 0.7 * -0.2));
    }

    #[test]
    fn immediate_fire_and_reset() {
        let c = cfg(1.0, 1.0, 0.0, 1.0);
        let st = LIFState::from_potentials(arr1(&[0.0]).into_dyn()).unwrap();
        let (s, next) = lif_step(&st, &arr1(&[1.5]).into_dyn(), &c).unwrap();
        assert_eq!(s.count_ones(), 1);
        assert_eq!(next.u[[0]], 0.0);
    }

    /// Independent scalar recurrence for constant drive.
    fn recurrence(x: f64, steps: usize) -> (Vec<usize>, f64) {
        let (mut u, mut out) = (0.0f64, vec![]);
        for t in 0..steps {
            let h = u + (x - (u - 0.0)) / 2.0;
            if h >= 1.0 {
                out.push(t);
                u = 0.0;
            } else {
                u = 0.9 * h;
            }
        }
        (out, u)
    }

    #[test]
    fn twenty_steps_against_recurrence() {
        let c = cfg(2.0, 1.0, 0.0, 0.9);
        // 0.8 settles below threshold; 1.8 fires periodically.
        for drive in [0.8, 1.8] {
            let (want, u_end) = recurrence(drive, 20);
            let mut st = LIFState::resting(&[1], &c);
            let x = arr1(&[drive]).into_dyn();
            let mut got = vec![];
            for t in 0..20 {
                if lif_step_inplace(&mut st, x.view(), &c).unwrap().count_ones() == 1 {
                    got.push(t);
                }
            }
            assert_eq!(got, want);
            assert_eq!(st.u[[0]], u_end);
        }
        assert!(recurrence(0.8, 20).0.is_empty());
        assert!(!recurrence(1.8, 20).0.is_empty());
    }

    #[test]
    fn heaviside_boundary() {
        let x = arr1(&[0.0, -1e-9, 2.0, -3.0]).into_dyn();
        assert_eq!(heaviside(&x).into_inner().into_raw_vec_and_offset().0, vec![1, 0, 1, 0]);
    }

    #[test]
    fn shape_mismatch() {
        let c = LIFConfig::<f64>::default();
        let st = LIFState::resting(&[2], &c);
        assert!(lif_step(&st, &ArrayD::zeros(IxDyn(&[3])), &c).is_err());
    }

    #[test]
    fn spike_tensor_must_be_binary() {
        assert!(SpikeTensor::new(arr1(&[0u8, 2]).into_dyn()).is_err());
    }
}
