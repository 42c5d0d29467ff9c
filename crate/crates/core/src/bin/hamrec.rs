//! `hamrec`: command-line front end for the reconstruction experiments.
//!
//! Errors go to stderr as one JSON line, `{"error":KIND,"message":TEXT}`.
//! Usage errors exit 2, everything else exits 1.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hamiltonian_cs::hamiltonian::{random_hamiltonian, SparseHamiltonian, SupportPolicy};
use hamiltonian_cs::harness::{
    self, heatmap_csv, heatmap_svg, pair_reports, read_sweep_csv, run_heatmap, run_sweep, speedup_reports, sweep_csv, sweep_svg,
    write_outputs, ExperimentConfig, MeasurementSpec, RunMeta, SparsitySpec, TrialKey, DEFAULT_GRID,
};
use hamiltonian_cs::pauli::signal_len;
use hamiltonian_cs::pipeline::{run_trial, NoCsOrder, Protocol, TrialOptions, TrialSeeds};
use hamiltonian_cs::Error;

#[derive(Parser)]
#[command(name = "hamrec", version, about = "Sparse Hamiltonian reconstruction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random sparse Hamiltonian as JSON.
    Gen(GenArgs),
    /// Run one trial and print its result as JSON lines.
    Trial(TrialArgs),
    /// CS and no-CS median-error curves over M.
    Sweep(ExperimentArgs),
    /// CS success rate over an (s/N, M/N) grid.
    Heatmap(ExperimentArgs),
    /// Threshold crossings and speedups from a sweep CSV.
    Report(ReportArgs),
    /// Quick invariant checks.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Random,
    TwoLocal,
}

impl From<Policy> for SupportPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Random => SupportPolicy::UniformRandom,
            Policy::TwoLocal => SupportPolicy::TwoLocal,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Cs,
    Nocs,
    Both,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long, value_enum, default_value = "random")]
    policy: Policy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrialArgs {
    /// Load the Hamiltonian instead of drawing one.
    #[arg(long, conflicts_with_all = ["n", "s", "policy"])]
    hamiltonian: Option<PathBuf>,
    #[arg(long, required_unless_present = "hamiltonian")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "hamiltonian")]
    s: Option<usize>,
    #[arg(long, value_enum)]
    policy: Option<Policy>,
    #[arg(long = "beta-eta")]
    beta_eta: f64,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value = "both")]
    protocol: Which,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = harness_threshold())]
    threshold: f64,
    #[arg(long = "circuit-length")]
    circuit_length: Option<usize>,
    #[arg(long = "noise-sigma", default_value_t = 0.0)]
    noise_sigma: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn harness_threshold() -> f64 {
    hamiltonian_cs::pipeline::DEFAULT_THRESHOLD
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment configuration; other flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// One or more sparsities, comma separated.
    #[arg(long, value_delimiter = ',')]
    s: Vec<usize>,
    #[arg(long, value_enum)]
    policy: Option<Policy>,
    #[arg(long = "beta-eta")]
    beta_eta: Option<f64>,
    /// Explicit measurement counts, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["m_min", "m_max", "m_step", "grid"])]
    m: Vec<usize>,
    #[arg(long = "m-min", conflicts_with = "grid")]
    m_min: Option<usize>,
    #[arg(long = "m-max", conflicts_with = "grid")]
    m_max: Option<usize>,
    #[arg(long = "m-step", conflicts_with = "grid")]
    m_step: Option<usize>,
    /// Grid resolution; `round(i·N/g)` for both s and M.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long = "circuit-length")]
    circuit_length: Option<usize>,
    #[arg(long = "noise-sigma")]
    noise_sigma: Option<f64>,
    /// Reuse one Hamiltonian per sparsity across trials.
    #[arg(long = "fixed-hamiltonian")]
    fixed_hamiltonian: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = harness_threshold())]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn gen(args: GenArgs) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let h = random_hamiltonian(args.n, args.s, args.policy.into(), &mut rng)?;
    emit(args.out.as_deref(), &(h.to_json()? + "\n"))
}

fn trial(args: TrialArgs) -> Outcome {
    if args.format == Format::Csv {
        return Err(Failure::Usage("trial output is JSON only".into()));
    }
    let policy: SupportPolicy = args.policy.unwrap_or(Policy::Random).into();
    let key = |s: usize, protocol: Protocol| TrialKey {
        s,
        protocol,
        m: args.m,
        trial: 0,
    };
    let h = match &args.hamiltonian {
        Some(path) => SparseHamiltonian::load(path)?,
        None => {
            let (n, s) = (args.n.unwrap_or(0), args.s.unwrap_or(0));
            let mut rng = ChaCha8Rng::seed_from_u64(key(s, Protocol::Cs).hamiltonian_seed(args.seed, false));
            random_hamiltonian(n, s, policy, &mut rng)?
        }
    };
    let opts = TrialOptions {
        circuit_length: args.circuit_length,
        threshold: args.threshold,
        noise_sigma: args.noise_sigma,
        nocs_order: NoCsOrder::for_policy(policy),
        ..Default::default()
    };
    let protocols: &[Protocol] = match args.protocol {
        Which::Cs => &[Protocol::Cs],
        Which::Nocs => &[Protocol::NoCs],
        Which::Both => &[Protocol::Cs, Protocol::NoCs],
    };
    let mut text = String::new();
    for &p in protocols {
        // the same trial a sweep runs at (s, M, trial 0)
        let seeds = TrialSeeds {
            master: args.seed,
            trial: key(h.sparsity(), p).trial_seed(args.seed),
            circuit: None,
        };
        let mut result = run_trial(p, &h, args.beta_eta, args.m, seeds, &opts)?;
        result.policy = args.policy.map(Into::into);
        text.push_str(&result.to_json_line()?);
        text.push('\n');
    }
    emit(args.out.as_deref(), &text)
}

fn config_from(args: &ExperimentArgs, heatmap: bool) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let missing = |flag: &str| Failure::Usage(format!("--{flag} is required without --config"));
            let n = args.n.ok_or_else(|| missing("n"))?;
            let eta_beta = args.beta_eta.ok_or_else(|| missing("beta-eta"))?;
            let g = args.grid.unwrap_or(DEFAULT_GRID);
            let sparsity = if heatmap {
                SparsitySpec::Grid(g)
            } else {
                SparsitySpec::Single(0)
            };
            let measurements = if heatmap {
                MeasurementSpec::Grid(g)
            } else {
                MeasurementSpec::Range {
                    min: 1,
                    max: signal_len(n),
                    step: 1,
                }
            };
            if !heatmap && args.s.is_empty() {
                return Err(missing("s"));
            }
            ExperimentConfig::new(n, eta_beta, sparsity, measurements)
        }
    };
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(v) = args.beta_eta {
        cfg.eta_beta = v;
    }
    if let Some(p) = args.policy {
        cfg.policy = p.into();
    }
    match args.s.as_slice() {
        [] => {}
        [s] => cfg.sparsity = SparsitySpec::Single(*s),
        list => cfg.sparsity = SparsitySpec::List(list.to_vec()),
    }
    if !args.m.is_empty() {
        cfg.measurements = MeasurementSpec::List(args.m.clone());
    } else if args.m_min.is_some() || args.m_max.is_some() || args.m_step.is_some() {
        let (min, max, step) = match cfg.measurements {
            MeasurementSpec::Range { min, max, step } => (min, max, step),
            _ => (1, signal_len(cfg.n), 1),
        };
        cfg.measurements = MeasurementSpec::Range {
            min: args.m_min.unwrap_or(min),
            max: args.m_max.unwrap_or(max),
            step: args.m_step.unwrap_or(step),
        };
    } else if let Some(g) = args.grid {
        cfg.measurements = MeasurementSpec::Grid(g);
        if heatmap {
            cfg.sparsity = SparsitySpec::Grid(g);
        }
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.threshold {
        cfg.threshold = v;
    }
    if let Some(v) = args.circuit_length {
        cfg.circuit_length = Some(v);
    }
    if let Some(v) = args.noise_sigma {
        cfg.noise_sigma = v;
    }
    if args.fixed_hamiltonian {
        cfg.fixed_hamiltonian = true;
    }
    if let Some(p) = &args.out {
        cfg.output.csv = Some(p.clone());
    }
    if let Some(p) = &args.svg {
        cfg.output.svg = Some(p.clone());
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn finish(cfg: &ExperimentConfig, kind: &'static str, text: &str, svg: Option<String>) -> Outcome {
    let svg_target = cfg.output.svg.as_deref().zip(svg.as_deref());
    match &cfg.output.csv {
        Some(path) => write_outputs(path, text, &RunMeta::new(kind, cfg), svg_target)?,
        None => {
            emit(None, text)?;
            if let Some((path, body)) = svg_target {
                std::fs::write(path, body)?;
            }
        }
    }
    Ok(())
}

fn sweep(args: ExperimentArgs) -> Outcome {
    let cfg = config_from(&args, false)?;
    let pairs = run_sweep(&cfg, args.jobs)?;
    let text = match args.format {
        Format::Csv => sweep_csv(&cfg, &pairs)?,
        Format::Json => {
            let reports = pair_reports(cfg.n, cfg.policy.as_str(), cfg.eta_beta, &pairs, cfg.threshold);
            let doc = serde_json::json!({ "sweeps": pairs, "speedups": reports });
            serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n"
        }
    };
    let svg = cfg.output.svg.as_ref().map(|_| sweep_svg(&pairs, cfg.threshold));
    finish(&cfg, "sweep", &text, svg)
}

fn heatmap(args: ExperimentArgs) -> Outcome {
    let cfg = config_from(&args, true)?;
    let grid = run_heatmap(&cfg, args.jobs)?;
    let text = match args.format {
        Format::Csv => heatmap_csv(&cfg, &grid)?,
        Format::Json => serde_json::to_string_pretty(&grid).map_err(Error::from)? + "\n",
    };
    let svg = cfg.output.svg.as_ref().map(|_| heatmap_svg(&grid));
    finish(&cfg, "heatmap", &text, svg)
}

fn report(args: ReportArgs) -> Outcome {
    let rows = read_sweep_csv(&std::fs::read_to_string(&args.input)?)?;
    let mut text = String::new();
    for r in speedup_reports(&rows, args.threshold)? {
        text.push_str(&serde_json::to_string(&r).map_err(Error::from)?);
        text.push('\n');
    }
    emit(args.out.as_deref(), &text)
}

fn selftest() -> Outcome {
    let checks = harness::selftest::run_selftest();
    let mut out = std::io::stdout().lock();
    for c in &checks {
        writeln!(out, "{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    match checks.iter().filter(|c| !c.passed).count() {
        0 => Ok(()),
        k => Err(Failure::Run(Error::Numerical(format!("{k} selftest check(s) failed")))),
    }
}

fn fail(kind: &str, message: &str) {
    let line = serde_json::json!({ "error": kind, "message": message.lines().next().unwrap_or("") });
    eprintln!("{line}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let message = text.trim_start_matches("error: ");
            fail("usage", message);
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Trial(a) => trial(a),
        Command::Sweep(a) => sweep(a),
        Command::Heatmap(a) => heatmap(a),
        Command::Report(a) => report(a),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            fail("usage", &msg);
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            let kind = match &e {
                Error::Domain(_) => "domain",
                Error::Resource(_) => "resource",
                Error::Numerical(_) => "numerical",
                Error::Config(_) => "config",
                Error::Io(_) => "io",
                Error::Json(_) => "json",
                Error::Csv(_) => "csv",
            };
            fail(kind, &e.to_string());
            ExitCode::from(1)
        }
    }
}
