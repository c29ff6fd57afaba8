//! Naive reference implementations shared by the integration tests. Each is
//! written directly from the defining formula, without the fast paths.
#![allow(dead_code)]

use ndarray::{Array5, Axis};

/// Scalar integrate-and-fire accumulator with subtract-threshold reset.
pub fn accumulator_spikes(intensity: f64, theta: f64, steps: usize) -> Vec<usize> {
    let mut acc = 0.0f64;
    let mut out = Vec::new();
    for t in 0..steps {
        acc += intensity;
        if acc >= theta {
            out.push(t);
            acc -= theta;
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct Lif {
    pub tau: f64,
    pub v_thr: f64,
    pub v_reset: f64,
    pub beta: f64,
}

/// One neuron over an input sequence; returns the spike train and final U.
pub fn lif_sequence(cfg: Lif, inputs: &[f64]) -> (Vec<u8>, f64) {
    let mut u = cfg.v_reset;
    let mut train = Vec::with_capacity(inputs.len());
    for &x in inputs {
        let h = u + (x - (u - cfg.v_reset)) / cfg.tau;
        if h >= cfg.v_thr {
            train.push(1);
            u = cfg.v_reset;
        } else {
            train.push(0);
            u = cfg.beta * h;
        }
    }
    (train, u)
}

/// Zero-padded stride-1 cross-correlation, `w` as `(co, ci, k, k)`.
pub fn conv2d(x: &Array5<f64>, w: &ndarray::Array4<f64>, bias: &[f64]) -> Array5<f64> {
    let (t, b, ci, h, wd) = x.dim();
    let (co, ci2, k, _) = w.dim();
    assert_eq!(ci, ci2);
    let r = (k / 2) as isize;
    let mut out = Array5::zeros((t, b, co, h, wd));
    for tt in 0..t {
        for bb in 0..b {
            for o in 0..co {
                for y in 0..h {
                    for xx in 0..wd {
                        let mut acc = bias[o];
                        for c in 0..ci {
                            for dy in 0..k {
                                for dx in 0..k {
                                    let sy = y as isize + dy as isize - r;
                                    let sx = xx as isize + dx as isize - r;
                                    if sy >= 0 && sx >= 0 && (sy as usize) < h && (sx as usize) < wd {
                                        acc += w[[o, c, dy, dx]] * x[[tt, bb, c, sy as usize, sx as usize]];
                                    }
                                }
                            }
                        }
                        out[[tt, bb, o, y, xx]] = acc;
                    }
                }
            }
        }
    }
    out
}

/// LIF over the leading time axis, every other index an independent neuron.
pub fn lif_over_time(current: &Array5<f64>, cfg: Lif) -> Array5<f64> {
    let (t, b, c, h, w) = current.dim();
    let mut out = Array5::zeros((t, b, c, h, w));
    for bb in 0..b {
        for cc in 0..c {
            for y in 0..h {
                for x in 0..w {
                    let seq: Vec<f64> = (0..t).map(|tt| current[[tt, bb, cc, y, x]]).collect();
                    let (train, _) = lif_sequence(cfg, &seq);
                    for (tt, s) in train.into_iter().enumerate() {
                        out[[tt, bb, cc, y, x]] = s as f64;
                    }
                }
            }
        }
    }
    out
}

/// Two-pass per-channel statistics over `(T, B, H, W)`.
pub fn two_pass_stats(x: &Array5<f64>, channel: usize) -> (f64, f64) {
    let view = x.index_axis(Axis(2), channel);
    let n = view.len() as f64;
    let mean = view.iter().sum::<f64>() / n;
    let var = view.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

pub fn tdbn(x: &Array5<f64>, alpha: f64, v_th: f64, eps: f64, lambda: &[f64], beta: &[f64]) -> Array5<f64> {
    let mut out = x.clone();
    for c in 0..x.dim().2 {
        let (mean, var) = two_pass_stats(x, c);
        out.index_axis_mut(Axis(2), c)
            .mapv_inplace(|v| lambda[c] * (alpha * v_th * (v - mean) / (var + eps).sqrt()) + beta[c]);
    }
    out
}

/// Residual block with an identity attention stage.
pub fn srb(x: &Array5<f64>, w: &spikerain::snnkernel::SRBWeights<f64>, cfg: Lif) -> Array5<f64> {
    let scu = |input: &Array5<f64>, conv: &spikerain::snnkernel::ConvWeights<f64>| {
        lif_over_time(&conv2d(input, &conv.weight, conv.bias.as_slice().unwrap()), cfg)
    };
    let branch1 = scu(&scu(x, &w.scu1), &w.scu2);
    let short = conv2d(x, &w.shortcut.weight, w.shortcut.bias.as_slice().unwrap());
    let p = &w.tdbn;
    let branch2 = tdbn(&short, p.alpha, p.v_th, p.epsilon, &p.lambda_k, &p.beta_k);
    branch1 + branch2 + x
}

/// Per-window SSIM with a 2-D Gaussian built directly and two-pass moments.
pub fn ssim(a: &[f64], b: &[f64], h: usize, w: usize) -> f64 {
    let k = 11usize;
    let sigma = 1.5f64;
    let mut g = vec![0.0f64; k * k];
    for i in 0..k {
        for j in 0..k {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            g[i * k + j] = (-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp();
        }
    }
    let total: f64 = g.iter().sum();
    g.iter_mut().for_each(|v| *v /= total);
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let mut acc = 0.0;
    let mut n = 0usize;
    for y in 0..=h - k {
        for x in 0..=w - k {
            let at = |img: &[f64], i: usize, j: usize| img[(y + i) * w + x + j];
            let (mut ma, mut mb) = (0.0, 0.0);
            for i in 0..k {
                for j in 0..k {
                    ma += g[i * k + j] * at(a, i, j);
                    mb += g[i * k + j] * at(b, i, j);
                }
            }
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for i in 0..k {
                for j in 0..k {
                    let (da, db) = (at(a, i, j) - ma, at(b, i, j) - mb);
                    va += g[i * k + j] * da * da;
                    vb += g[i * k + j] * db * db;
                    cov += g[i * k + j] * da * db;
                }
            }
            acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            n += 1;
        }
    }
    acc / n as f64
}

/// Principal-axis tilt from vertical, in degrees, from second moments.
pub fn principal_angle_deg(weights: &[f64], side: usize) -> f64 {
    let total: f64 = weights.iter().sum();
    let (mut my, mut mx) = (0.0, 0.0);
    for (i, &v) in weights.iter().enumerate() {
        my += v * (i / side) as f64;
        mx += v * (i % side) as f64;
    }
    let (my, mx) = (my / total, mx / total);
    let (mut syy, mut sxx, mut sxy) = (0.0, 0.0, 0.0);
    for (i, &v) in weights.iter().enumerate() {
        let dy = (i / side) as f64 - my;
        let dx = (i % side) as f64 - mx;
        syy += v * dy * dy;
        sxx += v * dx * dx;
        sxy += v * dx * dy;
    }
    0.5 * (2.0 * sxy).atan2(syy - sxx).to_degrees()
}

/// Difference of two axis angles modulo 180 degrees.
pub fn axis_diff_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}
