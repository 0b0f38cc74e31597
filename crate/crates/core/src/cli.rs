//! Command-line driver.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use log::info;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::deconv::{
    apriori_bound, error_bound, sharpen, sharpen_with_truth, synth_spectrum, Grid, Peak, PeakModel, SharpenConfig,
    SharpenMethod, SharpenReport, SigmaConvention, SynthData,
};
use crate::hardy::{diff_experiment, DiffReport, HardyFunction};
use crate::index_fn::IndexFunction;
use crate::io::{read_signal, write_signal};
use crate::report::{real, real_vec, write_report};
use crate::verify::run_all;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Synth,
    Sharpen,
    Bounds,
    Verify,
    DiffDemo,
}

#[derive(Debug, Parser)]
#[command(name = "dhs", version, about = "Dilational Hilbert scales: sharpening, bounds and inequality checks")]
pub struct Args {
    #[arg(long, value_enum)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input signal (CSV `x,y`) for `sharpen`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trials per inequality suite for `verify`.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(short, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[arg(short, long)]
    pub quiet: bool,
}

/// Validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub input_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: Option<u64>,
    pub trials: usize,
    pub verbosity: i8,
}

impl CliConfig {
    pub fn from_args(args: Args) -> Result<Self> {
        for p in args.config.iter().chain(args.input.iter()) {
            if !p.is_file() {
                return Err(Error::Config(format!("{}: no such file", p.display())));
            }
        }
        if args.command == Command::Synth && args.config.is_none() {
            return Err(Error::Config("synth requires --config".into()));
        }
        if args.command == Command::Sharpen && args.config.is_none() {
            return Err(Error::Config("sharpen requires --config".into()));
        }
        if args.trials == 0 {
            return Err(Error::Config("--trials must be positive".into()));
        }
        Ok(CliConfig {
            command: args.command,
            config_path: args.config,
            input_path: args.input,
            output_dir: args.out,
            seed: args.seed,
            trials: args.trials,
            verbosity: if args.quiet { -1 } else { args.verbose as i8 },
        })
    }
}

/// Contents of a configuration file with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sharpen: SharpenConfig,
    pub grid: Grid,
    pub peaks: Vec<Peak>,
    pub seed: u64,
}

fn default_peaks() -> Vec<Peak> {
    vec![
        Peak { center: -1.0, amplitude: 1.0, width: 1.0 },
        Peak { center: 1.5, amplitude: 0.7, width: 1.0 },
    ]
}

const KEYS: [&str; 11] =
    ["model", "gamma", "beta", "epsilon", "method", "sigma_convention", "theta_power", "grid", "seed", "peaks", "$schema"];

fn key_err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn number(obj: &Map<String, Value>, key: &str) -> Result<Option<f64>> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| key_err(key, format!("expected a number, got {v}"))),
    }
}

fn required(obj: &Map<String, Value>, key: &str) -> Result<f64> {
    number(obj, key)?.ok_or_else(|| key_err(key, "missing"))
}

fn string<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<Option<&'a str>> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(v) => Err(key_err(key, format!("expected a string, got {v}"))),
    }
}

/// Parses a configuration document.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| Error::Config("top level must be an object".into()))?;
    if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(key_err(k, "unknown key"));
    }

    let model_name = string(obj, "model")?.ok_or_else(|| key_err("model", "missing"))?;
    let model = PeakModel::parse(model_name).ok_or_else(|| {
        key_err("model", format!("unknown peak model {model_name:?}; expected one of gaussian, exponential, rational"))
    })?;
    let gamma = required(obj, "gamma")?;
    if gamma <= 0.0 {
        return Err(key_err("gamma", format!("must be positive, got {gamma}")));
    }
    let beta = required(obj, "beta")?;
    if !(beta > 0.0 && beta < gamma) {
        return Err(key_err("beta", format!("must satisfy 0 < beta < gamma = {gamma}, got {beta}")));
    }
    let epsilon = required(obj, "epsilon")?;
    if epsilon <= 0.0 {
        return Err(key_err("epsilon", format!("must be positive, got {epsilon}")));
    }
    let theta_power = number(obj, "theta_power")?.unwrap_or(1.0);
    if theta_power < 0.0 {
        return Err(key_err("theta_power", format!("must be nonnegative, got {theta_power}")));
    }
    let method = match string(obj, "method")?.unwrap_or("tikhonov") {
        "tikhonov" => SharpenMethod::TikhonovDiscrepancy,
        "cutoff" => SharpenMethod::SpectralCutoff,
        "morozov" => SharpenMethod::GeneralizedMorozov {
            theta: if theta_power == 0.0 { IndexFunction::One } else { IndexFunction::PowerPlusOne { gamma: theta_power } },
        },
        other => return Err(key_err("method", format!("unknown method {other:?}; expected tikhonov, cutoff or morozov"))),
    };
    let sigma_convention = match string(obj, "sigma_convention")?.unwrap_or("lambda_domain") {
        "lambda_domain" => SigmaConvention::LambdaDomain,
        "paper" => SigmaConvention::PaperPrinted,
        other => return Err(key_err("sigma_convention", format!("unknown convention {other:?}; expected lambda_domain or paper"))),
    };

    let mut grid = Grid::default();
    if let Some(g) = obj.get("grid") {
        let g = g.as_object().ok_or_else(|| key_err("grid", "expected an object"))?;
        if let Some(k) = g.keys().find(|k| !["n", "dx", "x0"].contains(&k.as_str())) {
            return Err(key_err(&format!("grid.{k}"), "unknown key"));
        }
        if let Some(n) = g.get("n") {
            let n = n.as_u64().filter(|n| *n >= 2 && n % 2 == 0);
            grid.n = n.ok_or_else(|| key_err("grid.n", "expected an even integer ≥ 2"))? as usize;
        }
        if let Some(dx) = number(g, "dx")? {
            if dx <= 0.0 {
                return Err(key_err("grid.dx", format!("must be positive, got {dx}")));
            }
            grid.dx = dx;
        }
        if let Some(x0) = number(g, "x0")? {
            grid.x0 = x0;
        }
    }

    let seed = match obj.get("seed") {
        None => 0,
        Some(v) => v.as_u64().ok_or_else(|| key_err("seed", format!("expected a nonnegative integer, got {v}")))?,
    };

    let peaks = match obj.get("peaks") {
        None => default_peaks(),
        Some(Value::Array(items)) => {
            let mut peaks = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let p = item.as_object().ok_or_else(|| key_err(&format!("peaks[{i}]"), "expected an object"))?;
                let field = |k: &str| required(p, k).map_err(|_| key_err(&format!("peaks[{i}].{k}"), "expected a number"));
                let peak = Peak { center: field("center")?, amplitude: field("amplitude")?, width: field("width")? };
                if peak.width <= 0.0 {
                    return Err(key_err(&format!("peaks[{i}].width"), "must be positive"));
                }
                peaks.push(peak);
            }
            peaks
        }
        Some(v) => return Err(key_err("peaks", format!("expected an array, got {v}"))),
    };

    let sharpen = SharpenConfig { model, gamma, beta, epsilon, method, sigma_convention };
    sharpen.validate()?;
    Ok(RunConfig { sharpen, grid, peaks, seed })
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Outcome of a command: whether every check it ran passed, and the files
/// it wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug, Serialize)]
struct FailureRecord<'a> {
    command: &'a str,
    error: String,
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Synth => "synth",
        Command::Sharpen => "sharpen",
        Command::Bounds => "bounds",
        Command::Verify => "verify",
        Command::DiffDemo => "diff-demo",
    }
}

/// Writes `error.json` describing a failed command into the output directory.
pub fn write_failure(cfg: &CliConfig, err: &Error) -> Result<PathBuf> {
    let path = cfg.output_dir.join("error.json");
    write_report(&FailureRecord { command: command_name(cfg.command), error: err.to_string() }, &path)?;
    Ok(path)
}

fn load(cfg: &CliConfig) -> Result<RunConfig> {
    let path = cfg.config_path.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut run = parse_config(path)?;
    if let Some(seed) = cfg.seed {
        run.seed = seed;
    }
    Ok(run)
}

fn synthesize(run: &RunConfig) -> Result<SynthData> {
    let s = &run.sharpen;
    synth_spectrum(&run.peaks, s.model, s.gamma, s.epsilon, run.seed, run.grid)
}

pub fn run_command(cfg: &CliConfig) -> Result<Outcome> {
    fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
    match cfg.command {
        Command::Synth => run_synth(cfg),
        Command::Sharpen => run_sharpen(cfg),
        Command::Bounds => run_bounds(cfg),
        Command::Verify => run_verify(cfg),
        Command::DiffDemo => run_diff_demo(cfg),
    }
}

fn run_synth(cfg: &CliConfig) -> Result<Outcome> {
    let data = synthesize(&load(cfg)?)?;
    let mut artifacts = Vec::new();
    for (name, sig) in [("f.csv", &data.f), ("g.csv", &data.g), ("g_eps.csv", &data.g_eps)] {
        let path = cfg.output_dir.join(name);
        write_signal(sig, &path)?;
        artifacts.push(path);
    }
    Ok(Outcome { passed: true, artifacts })
}

fn run_sharpen(cfg: &CliConfig) -> Result<Outcome> {
    let run = load(cfg)?;
    let data = synthesize(&run)?;
    let report: SharpenReport = match &cfg.input_path {
        None => sharpen_with_truth(&data.g_eps, &run.sharpen, &data.f_hat)?,
        Some(path) => {
            let g_eps = read_signal(path)?;
            // the synthetic truth applies only if the input is that very data
            let matches = g_eps.same_grid(&data.g_eps)
                && g_eps.samples().iter().zip(data.g_eps.samples()).all(|(a, b)| (a - b).abs() <= 1e-12);
            if matches {
                info!("input matches the configured synthetic data; measuring against its truth");
                sharpen_with_truth(&g_eps, &run.sharpen, &data.f_hat)?
            } else {
                info!("no truth for the input; residual norms are bounds");
                sharpen(&g_eps, &run.sharpen)?
            }
        }
    };
    let z_path = cfg.output_dir.join("z_eps.csv");
    write_signal(&report.z_eps, &z_path)?;
    let r_path = cfg.output_dir.join("report.json");
    write_report(&report, &r_path)?;
    let passed = match report.empirical_error {
        Some(e) if report.dominance_ok => e <= report.bound,
        _ => true,
    };
    Ok(Outcome { passed, artifacts: vec![z_path, r_path] })
}

#[derive(Debug, Serialize)]
struct ErrorBoundSweep {
    model: PeakModel,
    #[serde(with = "real")]
    r_norm: f64,
    #[serde(with = "real")]
    r_s_norm: f64,
    #[serde(with = "real_vec")]
    sigma: Vec<f64>,
    #[serde(with = "real_vec")]
    bound: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct AprioriSweep {
    phi: &'static str,
    psi: &'static str,
    #[serde(rename = "C", with = "real")]
    c: f64,
    #[serde(with = "real_vec")]
    epsilon: Vec<f64>,
    #[serde(with = "real_vec")]
    bound: Vec<f64>,
    #[serde(with = "real_vec")]
    closed_form: Vec<f64>,
    matches: bool,
}

#[derive(Debug, Serialize)]
struct BoundsReport {
    error_bound: Vec<ErrorBoundSweep>,
    apriori_bound: Vec<AprioriSweep>,
}

fn run_bounds(cfg: &CliConfig) -> Result<Outcome> {
    let sigmas: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let (r_norm, r_s_norm) = (1e-3, 1.0);
    let mut error_sweeps = Vec::new();
    for model in PeakModel::ALL {
        let bound = sigmas.iter().map(|&s| error_bound(model, s, r_norm, r_s_norm)).collect::<Result<_>>()?;
        error_sweeps.push(ErrorBoundSweep { model, r_norm, r_s_norm, sigma: sigmas.clone(), bound });
    }

    let epsilons: Vec<f64> = (1..=8).map(|k| 10f64.powi(-k)).collect();
    let t = IndexFunction::PowerLaw { p: 1.0 };
    let cases: [(&str, IndexFunction, Box<dyn Fn(f64, f64) -> f64>); 3] = [
        ("exp(t)", IndexFunction::Exp, Box::new(|c: f64, e: f64| 2.0 * e * (2.0 * (c / e).ln()).sqrt())),
        ("t^2", IndexFunction::PowerLaw { p: 2.0 }, Box::new(|c: f64, e: f64| 2.0 * c.sqrt() * e.sqrt())),
        ("t^3", IndexFunction::PowerLaw { p: 3.0 }, Box::new(|c: f64, e: f64| 2.0 * c.powf(1.0 / 3.0) * e.powf(2.0 / 3.0))),
    ];
    let mut apriori = Vec::new();
    let mut passed = true;
    for c in [1.0, 10.0] {
        for (name, psi, closed) in &cases {
            let bound: Vec<f64> = epsilons.iter().map(|&e| apriori_bound(&t, psi, c, e)).collect::<Result<_>>()?;
            let closed_form: Vec<f64> = epsilons.iter().map(|&e| closed(c, e)).collect();
            let matches = bound.iter().zip(&closed_form).all(|(b, f)| (b - f).abs() <= 1e-12 * f);
            passed &= matches;
            apriori.push(AprioriSweep { phi: "t", psi: name, c, epsilon: epsilons.clone(), bound, closed_form, matches });
        }
    }
    let path = cfg.output_dir.join("bounds.json");
    write_report(&BoundsReport { error_bound: error_sweeps, apriori_bound: apriori }, &path)?;
    Ok(Outcome { passed, artifacts: vec![path] })
}

fn run_verify(cfg: &CliConfig) -> Result<Outcome> {
    let seed = match (&cfg.config_path, cfg.seed) {
        (_, Some(s)) => s,
        (Some(_), None) => load(cfg)?.seed,
        (None, None) => 1,
    };
    let report = run_all(seed, cfg.trials)?;
    let path = cfg.output_dir.join("verify.json");
    write_report(&report, &path)?;
    Ok(Outcome { passed: report.passed, artifacts: vec![path] })
}

#[derive(Debug, Serialize)]
struct DiffDemoReport {
    trials: Vec<DiffReport>,
    passed: bool,
}

/// Hardy-space demo: `R = 2`, `K = 256`, truth with `C = 0.9`, `ε ∈ {1e-2, 1e-3, 1e-4}`.
pub fn diff_demo(seed: u64) -> Result<(Vec<DiffReport>, bool)> {
    let r = 2.0;
    let truth = HardyFunction::analytic(256, 1.5 * r, r, 0.9, seed)?;
    let mut trials = Vec::new();
    for (i, eps) in [1e-2, 1e-3, 1e-4].into_iter().enumerate() {
        trials.push(diff_experiment(&truth, r, eps, seed.wrapping_add(1 + i as u64))?);
    }
    let passed = trials
        .iter()
        .all(|t| t.empirical_error <= t.vhs_bound && (t.epsilon > 1e-3 || t.vhs_bound < t.ohs_bound));
    Ok((trials, passed))
}

fn run_diff_demo(cfg: &CliConfig) -> Result<Outcome> {
    let seed = cfg.seed.unwrap_or(1);
    let (trials, passed) = diff_demo(seed)?;
    let path = cfg.output_dir.join("diff_demo.json");
    write_report(&DiffDemoReport { trials, passed }, &path)?;
    Ok(Outcome { passed, artifacts: vec![path] })
}
