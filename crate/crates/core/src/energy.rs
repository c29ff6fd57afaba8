//! Theoretical SNN energy accounting.
//!
//! `N_SOP = s * T * A` synaptic operations, and
//! `E_SNN = N_SOP * E_SOP + N_sign * E_sign`, compared against an ANN that
//! spends `E_FLOP` per floating-point operation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snnkernel::SpikeTensor;

/// Energy of one ANN floating-point operation, in picojoules.
pub const E_FLOP_PJ: f64 = 12.5;

pub const PJ_PER_UJ: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyConfig {
    /// pJ per synaptic addition.
    pub e_sop: f64,
    /// pJ per emitted spike.
    pub e_sign: f64,
    /// pJ per ANN FLOP.
    #[serde(default = "default_e_flop")]
    pub e_flop: f64,
}

fn default_e_flop() -> f64 {
    E_FLOP_PJ
}

impl EnergyConfig {
    pub fn new(e_sop: f64, e_sign: f64) -> Result<Self> {
        let cfg = Self {
            e_sop,
            e_sign,
            e_flop: E_FLOP_PJ,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("e_sop", self.e_sop), ("e_sign", self.e_sign), ("e_flop", self.e_flop)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParam(format!("{name} must be nonnegative")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpCensus {
    /// Additions in the equivalent ANN (`A`).
    pub ann_adds: u64,
    pub timesteps: u32,
    /// Average fraction of firing neurons (`s`).
    pub sparsity: f64,
    /// Total spikes emitted (`N_sign`).
    pub n_sign: u64,
    /// FLOPs of the equivalent ANN, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ann_flops: Option<u64>,
}

impl OpCensus {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.sparsity) {
            return Err(Error::InvalidParam("sparsity out of [0,1]".into()));
        }
        Ok(())
    }
}

pub fn count_sops(census: &OpCensus) -> u64 {
    (census.sparsity * census.timesteps as f64 * census.ann_adds as f64).round() as u64
}

/// SNN energy in pJ.
pub fn snn_energy(census: &OpCensus, cfg: &EnergyConfig) -> f64 {
    count_sops(census) as f64 * cfg.e_sop + census.n_sign as f64 * cfg.e_sign
}

/// ANN energy in pJ.
pub fn ann_energy(flops: u64, cfg: &EnergyConfig) -> f64 {
    flops as f64 * cfg.e_flop
}

/// Measures sparsity and spike count over recorded spike tensors.
pub fn census_from_run(spike_tensors: &[SpikeTensor], ann_adds: u64, timesteps: u32) -> Result<OpCensus> {
    let elements: u64 = spike_tensors.iter().map(|t| t.len() as u64).sum();
    if spike_tensors.is_empty() || elements == 0 {
        return Err(Error::EmptyInput("spike tensors"));
    }
    let ones: u64 = spike_tensors.iter().map(SpikeTensor::count_ones).sum();
    Ok(OpCensus {
        ann_adds,
        timesteps,
        sparsity: ones as f64 / elements as f64,
        n_sign: ones,
        ann_flops: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub n_sop: u64,
    pub n_sign: u64,
    pub snn_pj: f64,
    pub snn_uj: f64,
    /// FLOPs used for the ANN baseline: `ann_flops`, else `ann_adds`.
    pub ann_flops: u64,
    pub ann_pj: f64,
    pub ann_uj: f64,
    /// `ann_pj / snn_pj`; infinite for a silent network.
    pub ann_to_snn_ratio: f64,
}

pub fn energy_report(census: &OpCensus, cfg: &EnergyConfig) -> Result<EnergyReport> {
    census.validate()?;
    cfg.validate()?;
    let snn = snn_energy(census, cfg);
    let flops = census.ann_flops.unwrap_or(census.ann_adds);
    let ann = ann_energy(flops, cfg);
    Ok(EnergyReport {
        n_sop: count_sops(census),
        n_sign: census.n_sign,
        snn_pj: snn,
        snn_uj: snn / PJ_PER_UJ,
        ann_flops: flops,
        ann_pj: ann,
        ann_uj: ann / PJ_PER_UJ,
        ann_to_snn_ratio: if snn > 0.0 { ann / snn } else { f64::INFINITY },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::EmptyInput("at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParam("x values are all equal".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(LinearFit {
        slope,
        intercept,
        max_abs_residual,
    })
}
