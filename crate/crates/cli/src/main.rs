use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ndarray::Array5;

use spikerain::energy::{energy_report, EnergyConfig, OpCensus};
use spikerain::imageio::{load_rgb, save_png};
use spikerain::metrics::evaluate;
use spikerain::pipeline::{
    load_backgrounds, rain100c, rerun_from_manifest, run_pipeline_with, sha256_hex, PipelineConfig, RunOptions,
    RunOutcome,
};
use spikerain::rainsynth::{generate_sequence, ParamRanges};
use spikerain::rng::{derive_seed, splitmix64};
use spikerain::snnkernel::{srb_forward_traced, srb_op_count, IdentityMau, LIFConfig, SRBWeights, TensorContainer};
use spikerain::spikecam::{
    integrate_and_fire, load_stream, make_bayer_mask, save_stream, simulate_color_spikes, stream_stats, BayerPattern,
};
use spikerain::spikerecon::{cfa_reconstruct, tfi_scaled, tfp_scaled, Method, ReconConfig};
use spikerain::{IntensityFrameF64, PlaneF64};

/// Bad arguments or configuration; exits with status 1.
#[derive(Debug)]
struct Invalid(String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

#[derive(Parser)]
#[command(
    name = "spikerain",
    version,
    about = "Rain synthesis, spike-camera simulation and reconstruction toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Pipeline TOML config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for the command's stage; the master seed for `pipeline`.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Render a continuous rain sequence over a background.
    Rainsynth(RainArgs),
    /// Simulate a color spike camera watching a directory of frames.
    Spikecam(CamArgs),
    /// Reconstruct one frame from a spike stream.
    Spikerecon(ReconArgs),
    /// Spiking residual block utilities.
    Snnkernel {
        #[command(subcommand)]
        command: SnnCommand,
    },
    /// Energy accounting.
    Energy {
        #[command(subcommand)]
        command: EnergyCommand,
    },
    /// PSNR and SSIM on the luma channel.
    Metrics(MetricArgs),
    /// Run rain synthesis through reconstruction and metrics.
    Pipeline(PipelineArgs),
    /// Generate a continuous-rain dataset: 14 frames per background.
    Rain100c(Rain100cArgs),
}

#[derive(Args)]
struct RainArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    background: PathBuf,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    length: Option<u32>,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    angle: Option<f64>,
    #[arg(long)]
    noise: Option<u8>,
    #[arg(long)]
    opacity: Option<f64>,
    /// Per-frame drift as `rows,cols`.
    #[arg(long)]
    drift: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CamArgs {
    #[command(flatten)]
    common: Common,
    /// Directory of PNG/PPM frames, read in file-name order.
    #[arg(long)]
    frames: PathBuf,
    /// rggb, bggr, grbg, gbrg, or mono for a luma stream.
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    sigma_g: Option<f64>,
    #[arg(long)]
    sigma_p: Option<f64>,
    #[arg(long)]
    upsample: Option<u32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReconArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    stream: PathBuf,
    #[arg(long)]
    method: Option<Method>,
    /// TFP window; 0 uses the whole stream.
    #[arg(long)]
    window: Option<usize>,
    /// Center timestep.
    #[arg(long)]
    t: usize,
    /// Substeps per frame used when the stream was simulated.
    #[arg(long)]
    upsample: Option<u32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum SnnCommand {
    /// Seeded forward pass; prints output checksums.
    Demo(DemoArgs),
}

#[derive(Args)]
struct DemoArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 5)]
    timesteps: usize,
    #[arg(long, default_value_t = 2)]
    channels: usize,
    #[arg(long, default_value_t = 4)]
    hidden: usize,
    #[arg(long, default_value_t = 16)]
    size: usize,
    /// Load block weights from a tensor container instead of seeding them.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Write the weights used to a tensor container.
    #[arg(long)]
    save_weights: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EnergyCommand {
    /// SNN and ANN energy from an operation census (JSON).
    Report(EnergyArgs),
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    census: PathBuf,
    #[arg(long)]
    e_sop: Option<f64>,
    #[arg(long)]
    e_sign: Option<f64>,
    #[arg(long)]
    e_flop: Option<f64>,
}

#[derive(Args)]
struct MetricArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    test: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    common: Common,
    /// Re-run the config recorded in a manifest.
    #[arg(long, conflicts_with = "config")]
    manifest: Option<PathBuf>,
    /// Output root; overrides `paths.output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recompute even if a finished run exists.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct Rain100cArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, num_args = 1.., required = true)]
    backgrounds: Vec<PathBuf>,
    /// TOML file of parameter ranges.
    #[arg(long)]
    ranges: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

/// Reads the config without range checks; each command validates what it
/// uses and applies `--seed` to its own stage.
fn load_config(common: &Common) -> Result<PipelineConfig> {
    let cfg: PipelineConfig = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).map_err(|e| invalid(format!("{}: {}", path.display(), e.message())))?
        }
        None => PipelineConfig::default(),
    };
    Ok(cfg.resolved())
}

fn check(section: &str, violations: Vec<(String, String)>) -> Result<()> {
    if violations.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = violations
        .into_iter()
        .map(|(field, msg)| format!("{section}.{field}: {msg}"))
        .collect();
    Err(invalid(lines.join("\n")))
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((
            a.parse().map_err(|_| invalid(format!("bad drift component {a:?}")))?,
            b.parse().map_err(|_| invalid(format!("bad drift component {b:?}")))?,
        )),
        _ => Err(invalid(format!("drift must be `rows,cols`, got {s:?}"))),
    }
}

fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|x| x.to_str())
                .is_some_and(|x| matches!(x.to_ascii_lowercase().as_str(), "png" | "ppm"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(invalid(format!("no PNG or PPM frames in {}", dir.display())));
    }
    Ok(paths)
}

fn rainsynth(args: RainArgs) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let mut rain = cfg.rain;
    if let Some(v) = args.length {
        rain.length_px = v;
    }
    if let Some(v) = args.width {
        rain.width_px = v;
    }
    if let Some(v) = args.angle {
        rain.angle_deg = v;
    }
    if let Some(v) = args.noise {
        rain.noise_level = v;
    }
    if let Some(v) = args.opacity {
        rain.opacity = v;
    }
    if let Some(d) = &args.drift {
        rain.drift_per_frame = parse_pair(d)?;
    }
    if let Some(seed) = args.common.seed {
        rain.seed = seed;
    }
    check("rain", rain.violations())?;
    let n = args.frames.unwrap_or(cfg.n_frames);
    if n < 1 {
        return Err(invalid("frames must be at least 1"));
    }
    let bg = load_rgb(&args.background).with_context(|| format!("loading {}", args.background.display()))?;
    let (frames, _) = generate_sequence::<f64>(&bg, &rain, n)?;
    fs::create_dir_all(&args.out)?;
    for (i, f) in frames.iter().enumerate() {
        save_png(f, args.out.join(format!("rain_{i:03}.png")))?;
    }
    fs::write(args.out.join("params.toml"), toml::to_string(&rain)?)?;
    println!("frames = {}", frames.len());
    println!("out = {:?}", args.out.display().to_string());
    Ok(())
}

fn spikecam(args: CamArgs) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let mut cam = cfg.camera;
    if let Some(v) = args.theta {
        cam.threshold = v;
    }
    if let Some(v) = args.sigma_g {
        cam.sigma_g = v;
    }
    if let Some(v) = args.sigma_p {
        cam.sigma_p = v;
    }
    if let Some(v) = args.upsample {
        cam.upsample_factor = v;
    }
    if let Some(seed) = args.common.seed {
        cam.seed = seed;
    }
    check("camera", cam.violations())?;
    let pattern = match args.pattern.as_deref() {
        None => Some(cfg.pattern),
        Some("mono") | Some("none") => None,
        Some(p) => Some(p.parse::<BayerPattern>().map_err(|e| invalid(e.to_string()))?),
    };
    let frames = frame_paths(&args.frames)?
        .iter()
        .map(|p| load_rgb(p).with_context(|| format!("loading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let (w, h) = frames[0].dimensions();
    let stream = match pattern {
        Some(p) => {
            let mask = make_bayer_mask((h as usize, w as usize), p)?;
            simulate_color_spikes::<f64>(&frames, &mask, &cam)?.stream
        }
        None => {
            let luma = frames
                .iter()
                .map(|f| IntensityFrameF64::clamped(spikerain::metrics::rgb_to_y::<f64>(f).map(|v| v / 255.0)))
                .collect::<Vec<_>>();
            integrate_and_fire(&luma, &cam)?
        }
    };
    save_stream(&stream, &args.out)?;
    let stats = stream_stats(&stream);
    println!("height = {h}");
    println!("width = {w}");
    println!("timesteps = {}", stream.timesteps());
    println!("total_spikes = {}", stats.total_spikes);
    println!("firing_rate = {:.6}", stats.firing_rate);
    Ok(())
}

fn gray_to_rgb(plane: &PlaneF64) -> image::RgbImage {
    image::RgbImage::from_fn(plane.width() as u32, plane.height() as u32, |x, y| {
        let v = (plane.get(y as usize, x as usize) * 255.0).round().clamp(0.0, 255.0) as u8;
        image::Rgb([v, v, v])
    })
}

fn spikerecon(args: ReconArgs) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let mut recon = match args.common.config {
        Some(_) => cfg.recon,
        None => ReconConfig::default(),
    };
    if let Some(m) = args.method {
        recon.method = m;
    }
    if let Some(w) = args.window {
        recon.window = w;
    }
    if let Some(u) = args.upsample {
        recon.upsample_factor = u;
    }
    check("recon", recon.violations())?;
    let stream = load_stream(&args.stream).with_context(|| format!("loading {}", args.stream.display()))?;
    if args.t >= stream.timesteps() {
        return Err(invalid(format!(
            "t {} outside stream of {} steps",
            args.t,
            stream.timesteps()
        )));
    }
    let image = if stream.meta.pattern.is_some() {
        cfa_reconstruct::<f64>(&stream, &recon, args.t)?
    } else {
        let theta = recon.threshold.unwrap_or(stream.meta.threshold as f64);
        let frame = match recon.method {
            Method::Tfp => {
                let window = recon.resolved_window(stream.timesteps())?;
                tfp_scaled::<f64>(&stream, args.t, window, theta, recon.upsample_factor)?
            }
            Method::Tfi => tfi_scaled::<f64>(&stream, args.t, theta, recon.upsample_factor)?,
        };
        gray_to_rgb(frame.plane())
    };
    save_png(&image, &args.out)?;
    println!("out = {:?}", args.out.display().to_string());
    Ok(())
}

fn snn_demo(args: DemoArgs) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let seed = args.common.seed.unwrap_or(cfg.snn.seed);
    if args.timesteps < 1 || args.channels < 1 || args.hidden < 1 || args.size < 1 {
        return Err(invalid("timesteps, channels, hidden and size must be at least 1"));
    }
    let weights = match &args.weights {
        Some(path) => {
            let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            SRBWeights::<f64>::from_container(&TensorContainer::read(std::io::BufReader::new(file))?)?
        }
        None => SRBWeights::<f64>::seeded(args.channels, args.hidden, cfg.snn.gain, seed),
    };
    if let Some(path) = &args.save_weights {
        weights.to_container()?.write(fs::File::create(path)?)?;
    }
    let c = weights.channels();
    let dims = (args.timesteps, 1, c, args.size, args.size);
    let input_seed = derive_seed(seed, &[1]);
    let input = Array5::from_shape_fn(dims, |(t, _, ch, y, x)| {
        let i = [t, ch, y, x]
            .iter()
            .fold(0u64, |acc, &v| acc.wrapping_mul(1 << 16) + v as u64);
        (splitmix64(input_seed ^ i) >> 11) as f64 / (1u64 << 53) as f64
    });
    let trace = srb_forward_traced(input.view(), &weights, &LIFConfig::default(), &IdentityMau)?;
    let ops = srb_op_count(dims, &weights, &IdentityMau);
    let bytes: Vec<u8> = trace.output.iter().flat_map(|v| v.to_le_bytes()).collect();
    let spikes: u64 = trace.spikes.iter().map(|s| s.count_ones()).sum();
    let elements: u64 = trace.spikes.iter().map(|s| s.len() as u64).sum();
    println!("timesteps = {}", args.timesteps);
    println!("shape = {:?}", trace.output.shape());
    println!("output_sum = {:.12e}", trace.output.sum());
    println!(
        "output_sq_sum = {:.12e}",
        trace.output.iter().map(|v| v * v).sum::<f64>()
    );
    println!("output_sha256 = {:?}", sha256_hex(&bytes));
    println!("spikes = {spikes}");
    println!("sparsity = {:.6}", spikes as f64 / elements as f64);
    println!("conv_macs = {}", ops.conv_macs);
    println!("ann_adds = {}", ops.ann_adds);
    println!("flops = {}", ops.flops);
    Ok(())
}

fn energy(args: EnergyArgs) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let text = fs::read_to_string(&args.census).with_context(|| format!("reading {}", args.census.display()))?;
    let census: OpCensus =
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", args.census.display())))?;
    let base = cfg.energy;
    let e_sop = args.e_sop.or(base.map(|e| e.e_sop));
    let e_sign = args.e_sign.or(base.map(|e| e.e_sign));
    let (Some(e_sop), Some(e_sign)) = (e_sop, e_sign) else {
        bail!(Invalid("e_sop and e_sign are required".into()));
    };
    let mut ecfg = EnergyConfig::new(e_sop, e_sign).map_err(|e| invalid(e.to_string()))?;
    if let Some(f) = args.e_flop.or(base.map(|e| e.e_flop)) {
        ecfg.e_flop = f;
    }
    let report = energy_report(&census, &ecfg).map_err(|e| invalid(e.to_string()))?;
    println!("n_sop = {}", report.n_sop);
    println!("n_sign = {}", report.n_sign);
    println!("snn_pj = {:.6e}", report.snn_pj);
    println!("snn_uj = {:.6e}", report.snn_uj);
    println!("ann_flops = {}", report.ann_flops);
    println!("ann_pj = {:.6e}", report.ann_pj);
    println!("ann_uj = {:.6e}", report.ann_uj);
    println!("ann_to_snn_ratio = {:.6}", report.ann_to_snn_ratio);
    Ok(())
}

fn metrics(args: MetricArgs) -> Result<()> {
    let a = load_rgb(&args.reference).with_context(|| format!("loading {}", args.reference.display()))?;
    let b = load_rgb(&args.test).with_context(|| format!("loading {}", args.test.display()))?;
    let m = evaluate(&a, &b)?;
    println!("psnr_db = {:.4}", m.psnr_db);
    println!("ssim = {:.6}", m.ssim);
    Ok(())
}

fn print_outcome(out: &RunOutcome) {
    println!("run = {:?}", out.dir.display().to_string());
    println!("reused = {}", out.reused);
    println!("psnr_db = {:.4}", out.report.mean.psnr_db);
    println!("ssim = {:.6}", out.report.mean.ssim);
    println!("total_spikes = {}", out.report.total_spikes);
    if let Some(e) = &out.report.energy {
        println!("snn_uj = {:.6e}", e.snn_uj);
        println!("ann_uj = {:.6e}", e.ann_uj);
    }
}

fn pipeline(args: PipelineArgs) -> Result<()> {
    if let Some(manifest) = &args.manifest {
        let out = rerun_from_manifest(manifest, args.out.as_deref())?;
        print_outcome(&out);
        return Ok(());
    }
    let mut cfg = match &args.common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            spikerain::pipeline::validate_config(&text)
                .map_err(|v| invalid(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(seed) = args.common.seed {
        cfg.seed = Some(seed);
    }
    if let Some(out) = args.out {
        cfg.paths.output = out;
    }
    let out = run_pipeline_with(&cfg, RunOptions { force: args.force })?;
    print_outcome(&out);
    Ok(())
}

fn rain100c_cmd(args: Rain100cArgs) -> Result<()> {
    let ranges: ParamRanges = match &args.ranges {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).map_err(|e| invalid(format!("{}: {}", path.display(), e.message())))?
        }
        None => ParamRanges::default(),
    };
    let cfg = load_config(&args.common)?;
    let seed = args.common.seed.unwrap_or(cfg.rain.seed);
    let bgs = load_backgrounds(&args.backgrounds)?;
    let manifests = rain100c(&bgs, &ranges, seed, &args.out)?;
    println!("backgrounds = {}", manifests.len());
    println!("frames = {}", manifests.iter().map(|m| m.n_frames).sum::<usize>());
    println!("out = {:?}", args.out.display().to_string());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Rainsynth(a) => rainsynth(a),
        Command::Spikecam(a) => spikecam(a),
        Command::Spikerecon(a) => spikerecon(a),
        Command::Snnkernel {
            command: SnnCommand::Demo(a),
        } => snn_demo(a),
        Command::Energy {
            command: EnergyCommand::Report(a),
        } => energy(a),
        Command::Metrics(a) => metrics(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Rain100c(a) => rain100c_cmd(a),
    }
}

fn is_validation(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.is::<Invalid>()
            || e.downcast_ref::<spikerain::Error>()
                .is_some_and(spikerain::Error::is_validation)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_validation(&e) { 1 } else { 2 })
        }
    }
}
