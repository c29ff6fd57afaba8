//! Acceptance gate: runs every criterion, prints one line per criterion and
//! exits nonzero if any fails or overruns its time budget.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ndarray::{Array5, ArrayD, IxDyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spikerain::energy::{ann_energy, linear_fit, EnergyConfig, PJ_PER_UJ};
use spikerain::imageio::solid;
use spikerain::metrics::{psnr_y, rgb_to_y, ssim_plane, ssim_y};
use spikerain::rainsynth::{
    build_motion_kernel, convolve_zero_pad, generate_sequence, translate_toroidal, ParamRanges,
};
use spikerain::snnkernel::{
    channel_stats, lif_step_inplace, srb_forward, tdbn_normalize, IdentityMau, LIFConfig, LIFState, SRBWeights,
};
use spikerain::spikecam::{
    integrate_and_fire, make_bayer_mask, read_stream, simulate_color_spikes, write_stream, BayerPattern, CameraConfig,
    Channel, ResetMode, SpikeStream, StreamMeta,
};
use spikerain::spikerecon::{cfa_reconstruct, tfp_scaled, Demosaic, Method, ReconConfig};
use spikerain::{IntensityFrame, Plane};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Time-step ablation table: (T, GFLOPs, energy in 1e5 uJ).
const TIME_STEP_TABLE: [(f64, f64, f64); 5] = [
    (3.0, 8.479, 1.0565),
    (4.0, 8.578, 1.0690),
    (5.0, 8.678, 1.0814),
    (6.0, 8.777, 1.0939),
    (7.0, 8.877, 1.1064),
];

fn energy_table() -> Outcome {
    let cfg = EnergyConfig::new(0.0, 0.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for &(t, gflops, energy) in &TIME_STEP_TABLE {
        let uj = ann_energy((gflops * 1e9).round() as u64, &cfg) / PJ_PER_UJ;
        let rel = (uj - energy * 1e5).abs() / (energy * 1e5);
        ensure(rel <= 0.005, || {
            format!("T={t}: {uj:.1} uJ vs {:.1} uJ ({:.3}%)", energy * 1e5, rel * 100.0)
        })?;
        worst = worst.max(rel);
    }
    Ok(format!("max deviation {:.3}%", worst * 100.0))
}

fn flops_linearity() -> Outcome {
    let pts: Vec<(f64, f64)> = TIME_STEP_TABLE.iter().map(|&(t, g, _)| (t, g)).collect();
    let fit = linear_fit(&pts).map_err(|e| e.to_string())?;
    ensure((fit.slope - 0.0995).abs() <= 0.0005, || {
        format!("slope {:.5}", fit.slope)
    })?;
    ensure(fit.max_abs_residual < 0.001, || {
        format!("residual {:.5}", fit.max_abs_residual)
    })?;
    Ok(format!(
        "slope {:.5} G/step, max residual {:.5} G",
        fit.slope, fit.max_abs_residual
    ))
}

fn firing_rate_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let (h, w, steps) = (8, 8, 1000);
    let intensities: Vec<f64> = (0..h * w).map(|_| rng.random_range(0.0..=1.0)).collect();
    let frame = IntensityFrame::new(Plane::from_vec(h, w, intensities.clone()).unwrap()).unwrap();
    let frames = vec![frame; steps];
    let cfg = CameraConfig::noise_free(1.0, 1);
    let stream = integrate_and_fire(&frames, &cfg).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for y in 0..h {
        for x in 0..w {
            let i = intensities[y * w + x];
            let times = stream.spike_times(y, x);
            let dev = (times.len() as f64 - i * steps as f64).abs();
            ensure(dev <= 1.0, || format!("pixel ({y},{x}) I={i}: {} spikes", times.len()))?;
            ensure(times == common::accumulator_spikes(i, 1.0, steps), || {
                format!("pixel ({y},{x}) differs from accumulator oracle")
            })?;
            worst = worst.max(dev);
        }
    }
    Ok(format!("64 pixels, max |count - I*T| = {worst:.3}"))
}

fn tfp_error_bound() -> Outcome {
    let intensities = [0.0, 0.07, 0.25, 1.0 / 3.0, 0.5, 0.618, 0.9, 1.0];
    let steps = 200;
    let mut worst = 0.0f64;
    for window in [10usize, 39, 100] {
        for &i in &intensities {
            let frames = vec![IntensityFrame::constant(4, 4, i).unwrap(); steps];
            let stream = integrate_and_fire(&frames, &CameraConfig::noise_free(1.0, 1)).map_err(|e| e.to_string())?;
            for center in [window / 2, steps / 2, steps - 1 - window / 2] {
                let est = tfp_scaled::<f64>(&stream, center, window, 1.0, 1).map_err(|e| e.to_string())?;
                for &v in est.plane().as_slice() {
                    let err = (v - i).abs();
                    ensure(err <= 1.0 / window as f64 + 1e-12, || {
                        format!("window {window}, I={i}, t={center}: error {err}")
                    })?;
                    worst = worst.max(err * window as f64);
                }
            }
        }
    }
    Ok(format!("windows 10/39/100, max error {worst:.3} x theta/window"))
}

fn kernel_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_sum = 0.0f64;
    let mut worst_const = 0.0f64;
    let mut worst_angle = 0.0f64;
    for case in 0..1000 {
        let length: u32 = rng.random_range(1..=31);
        let width: u32 = rng.random_range(1..=5);
        let angle: f64 = rng.random_range(-89.9..89.9);
        let k = build_motion_kernel::<f64>(length, width, angle).map_err(|e| format!("case {case}: {e}"))?;
        let sum_err = (k.sum() - 1.0).abs();
        ensure(sum_err <= 1e-6, || {
            format!("case {case} L={length} w={width} θ={angle}: sum err {sum_err}")
        })?;
        worst_sum = worst_sum.max(sum_err);

        let side = k.side();
        let (h, w) = (side + 4, side + 4);
        let out = convolve_zero_pad(&Plane::filled(h, w, 0.4), &k);
        let r = k.radius();
        for y in r..h - r {
            for x in r..w - r {
                let e = (out.get(y, x) - 0.4).abs();
                ensure(e <= 1e-6, || format!("case {case}: interior ({y},{x}) off by {e}"))?;
                worst_const = worst_const.max(e);
            }
        }

        if length >= 7 {
            let got = common::principal_angle_deg(k.weights().as_slice(), side);
            let d = common::axis_diff_deg(got, angle);
            ensure(d <= 1.0, || {
                format!("case {case} L={length} w={width} θ={angle:.3}: axis {got:.3}")
            })?;
            worst_angle = worst_angle.max(d);
        }
    }
    Ok(format!(
        "1000 kernels, sum err {worst_sum:.1e}, constant err {worst_const:.1e}, axis err {worst_angle:.3} deg"
    ))
}

fn temporal_coherence() -> Outcome {
    let ranges = ParamRanges {
        length_px: (1, 15),
        ..ParamRanges::default()
    };
    let bg = solid(40, 48, [60, 80, 100]);
    for i in 0..100u64 {
        let params = ranges.sample(2024, i);
        let (images, seq) = generate_sequence::<f64>(&bg, &params, 6).map_err(|e| format!("seq {i}: {e}"))?;
        let (dy, dx) = params.drift_per_frame;
        let first = seq.frames[0].plane();
        for (t, layer) in seq.frames.iter().enumerate() {
            let back = translate_toroidal(layer.plane(), -(t as f64) * dy, -(t as f64) * dx);
            ensure(back.as_slice() == first.as_slice(), || {
                format!("seq {i} frame {t} not a pure shift")
            })?;
            let (h, w) = (bg.height() as i64, bg.width() as i64);
            for y in 0..h {
                for x in 0..w {
                    let sy = (y - t as i64 * dy as i64).rem_euclid(h) as u32;
                    let sx = (x - t as i64 * dx as i64).rem_euclid(w) as u32;
                    ensure(
                        images[t].get_pixel(x as u32, y as u32) == images[0].get_pixel(sx, sy),
                        || format!("seq {i} frame {t} rendered pixel ({y},{x}) differs"),
                    )?;
                }
            }
        }
    }
    Ok("100 sequences, every frame an exact roll of frame 0".into())
}

fn bayer_partition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let patterns = [
        BayerPattern::Rggb,
        BayerPattern::Bggr,
        BayerPattern::Grbg,
        BayerPattern::Gbrg,
    ];
    for _ in 0..20 {
        let dims = (rng.random_range(1..=64), rng.random_range(1..=64));
        for p in patterns {
            let m = make_bayer_mask(dims, p).map_err(|e| e.to_string())?;
            let (r, g, b) = (m.mask(Channel::Red), m.mask(Channel::Green), m.mask(Channel::Blue));
            for i in 0..dims.0 * dims.1 {
                ensure(r[i] + g[i] + b[i] == 1, || {
                    format!("{p:?} {dims:?}: pixel {i} covered {} times", r[i] + g[i] + b[i])
                })?;
                ensure(r[i] * g[i] + r[i] * b[i] + g[i] * b[i] == 0, || {
                    format!("{p:?}: overlap at {i}")
                })?;
            }
        }
    }
    Ok("4 patterns x 20 dims, sum all-ones and disjoint".into())
}

fn lif_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut fired = 0usize;
    for case in 0..10_000 {
        let v_reset = rng.random_range(-0.5..0.5);
        let cfg = LIFConfig {
            tau: rng.random_range(1.0..8.0),
            v_thr: v_reset + rng.random_range(0.05..2.0),
            v_reset,
            beta: rng.random_range(0.0..=1.0),
        };
        let len = rng.random_range(1..=40);
        let inputs: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..3.0)).collect();
        let mut state = LIFState::resting(&[1], &cfg);
        let mut train = Vec::with_capacity(len);
        for &x in &inputs {
            let s = lif_step_inplace(&mut state, ArrayD::from_elem(IxDyn(&[1]), x).view(), &cfg)
                .map_err(|e| e.to_string())?;
            train.push(s.view()[[0]]);
        }
        let oracle = common::Lif {
            tau: cfg.tau,
            v_thr: cfg.v_thr,
            v_reset: cfg.v_reset,
            beta: cfg.beta,
        };
        let (want, u) = common::lif_sequence(oracle, &inputs);
        ensure(train == want, || format!("case {case}: spike train differs"))?;
        let got_u = state.u[[0]];
        ensure(got_u.to_bits() == u.to_bits(), || {
            format!("case {case}: final U {got_u} vs {u}")
        })?;
        fired += want.iter().filter(|&&s| s == 1).count();
    }
    Ok(format!("10000 cases exact, {fired} spikes total"))
}

fn tdbn_statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (alpha, v_th, eps) = (0.7f64, 1.3f64, 1e-5f64);
    let mut worst_mean = 0.0f64;
    let mut worst_std = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for case in 0..5 {
        let shape = (5, 2, 4, 12, 10);
        let scale: f64 = rng.random_range(0.5..20.0);
        let offset: f64 = rng.random_range(-10.0..10.0);
        let x = Array5::from_shape_fn(shape, |_| offset + scale * rng.random_range(-1.0..1.0f64));
        let y = tdbn_normalize(x.view(), alpha, v_th, eps).map_err(|e| e.to_string())?;
        let stats = channel_stats(y.view()).map_err(|e| e.to_string())?;
        for (c, (mean, var)) in stats.into_iter().enumerate() {
            ensure(mean.abs() <= 1e-6, || format!("case {case} channel {c}: mean {mean}"))?;
            let std_err = (var.sqrt() - alpha * v_th).abs();
            ensure(std_err <= 1e-3, || {
                format!("case {case} channel {c}: std {}", var.sqrt())
            })?;
            worst_mean = worst_mean.max(mean.abs());
            worst_std = worst_std.max(std_err);
        }
        let ones = vec![1.0; 4];
        let zeros = vec![0.0; 4];
        let want = common::tdbn(&x, alpha, v_th, eps, &ones, &zeros);
        let diff = (&y - &want).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        ensure(diff <= 1e-9, || format!("case {case}: oracle diff {diff}"))?;
        worst_oracle = worst_oracle.max(diff);
    }
    Ok(format!(
        "mean {worst_mean:.1e}, std err {worst_std:.1e}, oracle diff {worst_oracle:.1e}"
    ))
}

fn srb_identity_and_equivalence() -> Outcome {
    let t = 5;
    let cfg = LIFConfig::<f64>::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let shape = (t, 2, 3, 10, 9);
    // Zero block, sub-threshold input: exact identity.
    let x = Array5::from_shape_fn(shape, |_| rng.random_range(-0.5..0.9));
    let zero = SRBWeights::<f64>::zeros(3, 4);
    let out = srb_forward(x.view(), &zero, &cfg, &IdentityMau).map_err(|e| e.to_string())?;
    ensure(out == x, || "zero-weight block is not the identity".into())?;

    let oracle_cfg = common::Lif {
        tau: cfg.tau,
        v_thr: cfg.v_thr,
        v_reset: cfg.v_reset,
        beta: cfg.beta,
    };
    let mut worst = 0.0f64;
    for seed in 0..4 {
        let w = SRBWeights::<f64>::seeded(3, 4, 3.0, seed);
        let x = Array5::from_shape_fn(shape, |_| rng.random_range(0.0..1.0));
        let fast = srb_forward(x.view(), &w, &cfg, &IdentityMau).map_err(|e| e.to_string())?;
        let slow = common::srb(&x, &w, oracle_cfg);
        for (a, b) in fast.iter().zip(slow.iter()) {
            let rel = (a - b).abs() / b.abs().max(1.0);
            ensure(rel <= 1e-6, || format!("seed {seed}: {a} vs {b}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("T=5 identity exact, 4 seeded blocks max rel diff {worst:.1e}"))
}

fn metric_oracles() -> Outcome {
    let a = solid(32, 32, [100, 100, 100]);
    let p1 = psnr_y(&a, &solid(32, 32, [101, 101, 101])).map_err(|e| e.to_string())?;
    ensure((p1 - 48.13).abs() < 0.005, || format!("uniform error 1 gives {p1}"))?;
    let p16 = psnr_y(&a, &solid(32, 32, [116, 116, 116])).map_err(|e| e.to_string())?;
    ensure((p16 - 10.0 * (65025.0f64 / 256.0).log10()).abs() < 1e-9, || {
        format!("uniform error 16 gives {p16}")
    })?;
    ensure(psnr_y(&a, &a).unwrap() == 100.0, || {
        "identical inputs not capped".into()
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for pair in 0..20 {
        let img = |rng: &mut ChaCha8Rng| {
            image::RgbImage::from_fn(64, 64, |_, _| image::Rgb([rng.random(), rng.random(), rng.random()]))
        };
        let x = img(&mut rng);
        let mut y = x.clone();
        for p in y.pixels_mut() {
            for c in p.0.iter_mut() {
                *c = (*c as i32 + rng.random_range(-40..=40)).clamp(0, 255) as u8;
            }
        }
        let s_aa = ssim_y(&x, &x).map_err(|e| e.to_string())?;
        ensure(s_aa == 1.0, || format!("pair {pair}: SSIM(a,a) = {s_aa}"))?;
        let (ya, yb) = (rgb_to_y::<f64>(&x), rgb_to_y::<f64>(&y));
        let fast = ssim_plane(&ya, &yb).map_err(|e| e.to_string())?;
        let naive = common::ssim(ya.as_slice(), yb.as_slice(), 64, 64);
        let d = (fast - naive).abs();
        ensure(d <= 1e-9, || format!("pair {pair}: fast {fast} vs naive {naive}"))?;
        worst = worst.max(d);
    }
    Ok(format!("PSNR 48.13/24.05 dB, SSIM(a,a)=1, fast vs naive {worst:.1e}"))
}

fn color_fidelity() -> Outcome {
    let colors = [
        [0u8, 0, 0],
        [255, 255, 255],
        [200, 30, 90],
        [17, 128, 240],
        [90, 91, 92],
    ];
    let patterns = [
        BayerPattern::Rggb,
        BayerPattern::Bggr,
        BayerPattern::Grbg,
        BayerPattern::Gbrg,
    ];
    let steps = 400;
    let mut worst = 0i32;
    for p in patterns {
        let mask = make_bayer_mask((12, 14), p).map_err(|e| e.to_string())?;
        for rgb in colors {
            let video = vec![solid(12, 14, rgb); steps];
            let cs = simulate_color_spikes::<f64>(&video, &mask, &CameraConfig::noise_free(1.0, 1))
                .map_err(|e| e.to_string())?;
            let recon = ReconConfig {
                method: Method::Tfp,
                window: 0,
                threshold: None,
                demosaic: Demosaic::Bilinear,
                upsample_factor: 1,
            };
            let out = cfa_reconstruct::<f64>(&cs.stream, &recon, steps / 2).map_err(|e| e.to_string())?;
            for px in out.pixels() {
                for c in 0..3 {
                    let d = (px.0[c] as i32 - rgb[c] as i32).abs();
                    ensure(d <= 2, || format!("{p:?} {rgb:?}: channel {c} got {}", px.0[c]))?;
                    worst = worst.max(d);
                }
            }
        }
    }
    Ok(format!("4 patterns x 5 colors, max channel error {worst}/255"))
}

fn format_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let patterns = [
        None,
        Some(BayerPattern::Rggb),
        Some(BayerPattern::Bggr),
        Some(BayerPattern::Grbg),
        Some(BayerPattern::Gbrg),
    ];
    for i in 0..50 {
        let dims = (
            rng.random_range(1..=20),
            rng.random_range(1..=20),
            rng.random_range(1..=50),
        );
        let density: f64 = rng.random_range(0.0..=1.0);
        let values: Vec<u8> = (0..dims.0 * dims.1 * dims.2)
            .map(|_| rng.random_bool(density) as u8)
            .collect();
        let meta = StreamMeta {
            pattern: patterns[i % patterns.len()],
            reset_mode: if rng.random() {
                ResetMode::ResetToZero
            } else {
                ResetMode::SubtractThreshold
            },
            threshold: rng.random_range(0.01..4.0),
            sigma_g: rng.random_range(0.0..0.1),
            sigma_p: rng.random_range(0.0..0.1),
        };
        let stream = SpikeStream::pack(dims, &values, meta).map_err(|e| e.to_string())?;
        let mut bytes = Vec::new();
        write_stream(&stream, &mut bytes).map_err(|e| e.to_string())?;
        let back = read_stream(bytes.as_slice()).map_err(|e| e.to_string())?;
        ensure(back == stream, || format!("stream {i}: round trip differs"))?;
        ensure(back.meta.threshold.to_bits() == meta.threshold.to_bits(), || {
            format!("stream {i}: threshold bits")
        })?;
        ensure(back.unpack() == values, || format!("stream {i}: values differ"))?;
        let mut again = Vec::new();
        write_stream(&back, &mut again).map_err(|e| e.to_string())?;
        ensure(again == bytes, || format!("stream {i}: rewrite differs"))?;
    }
    Ok("50 random streams bit-identical".into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "energy table consistency",
            budget: s(1),
            run: energy_table,
        },
        Criterion {
            id: 2,
            name: "FLOPs linearity",
            budget: s(1),
            run: flops_linearity,
        },
        Criterion {
            id: 3,
            name: "firing-rate law",
            budget: s(5),
            run: firing_rate_law,
        },
        Criterion {
            id: 4,
            name: "TFP error bound",
            budget: s(5),
            run: tfp_error_bound,
        },
        Criterion {
            id: 5,
            name: "kernel suite",
            budget: s(30),
            run: kernel_suite,
        },
        Criterion {
            id: 6,
            name: "temporal coherence",
            budget: s(10),
            run: temporal_coherence,
        },
        Criterion {
            id: 7,
            name: "Bayer partition",
            budget: s(1),
            run: bayer_partition,
        },
        Criterion {
            id: 8,
            name: "LIF oracle",
            budget: s(10),
            run: lif_oracle,
        },
        Criterion {
            id: 9,
            name: "tdBN statistics",
            budget: s(5),
            run: tdbn_statistics,
        },
        Criterion {
            id: 10,
            name: "SRB identity and equivalence",
            budget: s(10),
            run: srb_identity_and_equivalence,
        },
        Criterion {
            id: 11,
            name: "metric oracles",
            budget: s(10),
            run: metric_oracles,
        },
        Criterion {
            id: 12,
            name: "end-to-end color fidelity",
            budget: s(10),
            run: color_fidelity,
        },
        Criterion {
            id: 13,
            name: "format round trip",
            budget: s(5),
            run: format_round_trip,
        },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| c.name.contains(f.as_str()) || c.id.to_string() == *f)
        {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > c.budget => Err(format!("took {elapsed:.2?}, budget {:?}", c.budget)),
            r => r,
        };
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {} ({elapsed:.2?}): {detail}", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {} ({elapsed:.2?}): {why}", c.id, c.name);
            }
        }
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
