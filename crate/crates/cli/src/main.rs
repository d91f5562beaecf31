//! Command-line driver for dwell-time plan optimization studies.
//!
//! Subcommands cover the full pipeline: generate a synthetic case, dump the
//! built-in protocol for editing, run a single optimization (embrace-only or
//! full adaptive), and run the seeded embrace-versus-adaptive comparison.
//!
//! Exit codes: 0 success, 2 usage or configuration, 3 optimization
//! infeasibility, 4 output I/O.

mod formats;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dwellopt_core::adaptive::{AdaptiveError, AdaptiveRunConfig};
use dwellopt_core::eval::{
    compare_approaches, n_adjustable_aims, run_mode, summarize_mode, summarize_run, CompareConfig,
    CompareOutcome, RunMode, RunOutcome, RunReport,
};
use dwellopt_core::evaluator::measurement_layout;
use dwellopt_core::moea::{OptimizerConfig, OptimizerError};
use dwellopt_core::patient::PatientCase;
use dwellopt_core::phantom::{generate_phantom, PhantomPreset, PhantomSpec};
use dwellopt_core::protocol::{AimStates, ProtocolConfig};
use dwellopt_core::seed;
use rayon::prelude::*;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable inputs, or invalid configuration.
    Usage(String),
    /// The optimizer could not construct a feasible starting population.
    Infeasible(String),
    /// An output could not be written.
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Infeasible(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

fn run_error(e: AdaptiveError) -> CliError {
    match &e {
        AdaptiveError::Optimizer(OptimizerError::InfeasibleInit) => {
            CliError::Infeasible(e.to_string())
        }
        _ => CliError::Usage(e.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "dwellopt",
    version,
    about = "Bi-objective dwell-time plan optimization on synthetic phantoms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic patient case file.
    Phantom(PhantomArgs),
    /// Write the built-in planning protocol as JSON for editing.
    DumpProtocol(DumpProtocolArgs),
    /// Optimize one case and export front, report, traces and checkpoint.
    Optimize(OptimizeArgs),
    /// Run the embrace-only versus full-adaptive study over seeded runs.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Easy,
    Medium,
    Hard,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Mandatory aims only, single run at the final fidelity.
    Embrace,
    /// Adaptive aspiration configuration, then the final run.
    Full,
}

impl From<ModeArg> for RunMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Embrace => RunMode::EmbraceOnly,
            ModeArg::Full => RunMode::FullAdaptive,
        }
    }
}

#[derive(Args)]
struct PhantomArgs {
    /// Phantom difficulty preset.
    #[arg(long, value_enum)]
    preset: PresetArg,
    /// Master seed for geometry jitter and volume accounting.
    #[arg(long)]
    seed: u64,
    /// Output case file.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct DumpProtocolArgs {
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Optimization knobs shared by `optimize` and `compare`. Defaults mirror
/// the library defaults.
#[derive(Args, Clone, Copy)]
struct RunKnobs {
    /// Population size.
    #[arg(long, default_value_t = 96)]
    pop: usize,
    /// Calculation points per ROI during adjustment rounds.
    #[arg(long, default_value_t = 2500)]
    ndc_min: usize,
    /// Calculation points per ROI for the final run.
    #[arg(long, default_value_t = 20_000)]
    ndc_max: usize,
    /// Calculation points per ROI for the archive reevaluation.
    #[arg(long, default_value_t = 50_000)]
    ndc_reeval: usize,
    /// Generations per adjustment round.
    #[arg(long, default_value_t = 350)]
    gmin: usize,
    /// Generations for the final run.
    #[arg(long, default_value_t = 490)]
    gmax: usize,
    /// Steps across an aspiration interval at the lowest priority.
    #[arg(long, default_value_t = 4)]
    min_steps: u32,
}

impl RunKnobs {
    fn configs(&self) -> (OptimizerConfig, AdaptiveRunConfig) {
        let opt = OptimizerConfig {
            population_size: self.pop,
            ..OptimizerConfig::default()
        };
        let adaptive = AdaptiveRunConfig {
            min_steps: self.min_steps,
            n_dc_min: self.ndc_min,
            n_dc_max: self.ndc_max,
            n_dc_reeval: self.ndc_reeval,
            g_min: self.gmin,
            g_max: self.gmax,
            ..AdaptiveRunConfig::default()
        };
        (opt, adaptive)
    }
}

#[derive(Args)]
struct OptimizeArgs {
    /// Patient case file.
    #[arg(long)]
    case: PathBuf,
    /// Protocol file; the built-in protocol when omitted.
    #[arg(long)]
    protocol: Option<PathBuf>,
    /// Objective mode.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Master seed for the run.
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    knobs: RunKnobs,
}

#[derive(Args)]
struct CompareArgs {
    /// Patient case file.
    #[arg(long)]
    case: PathBuf,
    /// Protocol file; the built-in protocol when omitted.
    #[arg(long)]
    protocol: Option<PathBuf>,
    /// Number of runs per mode.
    #[arg(long)]
    runs: usize,
    /// Master seed for each run; repeat the flag once per run.
    #[arg(long = "seed", required = true)]
    seeds: Vec<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    knobs: RunKnobs,
}

/// Companion metadata for a front export: everything needed to regenerate
/// or reevaluate the rows.
#[derive(serde::Serialize)]
struct FrontMeta {
    mode: RunMode,
    master_seed: u64,
    optimizer: OptimizerConfig,
    adaptive: AdaptiveRunConfig,
    /// Calculation-point seeds derived from the master seed per fidelity.
    dc_seed_low: u64,
    dc_seed_high: u64,
    dc_seed_reeval: u64,
    /// DVI column labels, in front.csv order.
    dvi_columns: Vec<String>,
    /// Aspiration states after the adaptive rounds.
    final_aspirations: AimStates,
    rounds: usize,
}

#[derive(serde::Serialize)]
struct ReportFile {
    report: RunReport,
    rounds: usize,
    n_adjustments: usize,
    n_eliminated: usize,
}

#[derive(serde::Serialize)]
struct CompareMeta {
    seeds: Vec<u64>,
    jobs: usize,
    optimizer: OptimizerConfig,
    adaptive: AdaptiveRunConfig,
}

fn main() {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("DWELLOPT_LOG", "warn"),
    )
    .format_timestamp(None)
    .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Phantom(args) => cmd_phantom(&args),
        Command::DumpProtocol(args) => cmd_dump_protocol(&args),
        Command::Optimize(args) => cmd_optimize(&args),
        Command::Compare(args) => cmd_compare(&args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}

fn cmd_phantom(args: &PhantomArgs) -> Result<(), CliError> {
    let preset = match args.preset {
        PresetArg::Easy => PhantomPreset::Easy,
        PresetArg::Medium => PhantomPreset::Medium,
        PresetArg::Hard => PhantomPreset::Hard,
    };
    let spec = PhantomSpec::preset(preset);
    let case = generate_phantom(&spec, args.seed)
        .map_err(|e| CliError::Usage(format!("phantom generation failed: {e}")))?;
    formats::write_json(&args.out, &case)?;
    println!("case written to {}", args.out.display());
    println!(
        "dwells {} in {} channels",
        case.dwell_positions.len(),
        case.channels.len()
    );
    for roi in &case.rois {
        println!("roi {} volume {} cm3", roi.name.slug(), roi.volume_cm3);
    }
    Ok(())
}

fn cmd_dump_protocol(args: &DumpProtocolArgs) -> Result<(), CliError> {
    let protocol = ProtocolConfig::default_protocol();
    match &args.out {
        Some(path) => formats::write_json(path, &protocol),
        None => {
            let text = serde_json::to_string_pretty(&protocol)
                .expect("protocol serializes");
            println!("{text}");
            Ok(())
        }
    }
}

fn load_inputs(
    case_path: &Path,
    protocol_path: Option<&PathBuf>,
) -> Result<(PatientCase, ProtocolConfig), CliError> {
    let case: PatientCase = formats::read_json(case_path)?;
    case.validate()
        .map_err(|e| CliError::Usage(format!("invalid case {}: {e}", case_path.display())))?;
    let protocol = match protocol_path {
        Some(p) => {
            let protocol: ProtocolConfig = formats::read_json(p)?;
            protocol
                .validate()
                .map_err(|e| CliError::Usage(format!("invalid protocol {}: {e}", p.display())))?;
            protocol
        }
        None => ProtocolConfig::default_protocol(),
    };
    Ok((case, protocol))
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<(), CliError> {
    let (case, protocol) = load_inputs(&args.case, args.protocol.as_ref())?;
    let (opt_config, adaptive) = args.knobs.configs();
    let mode = RunMode::from(args.mode);
    ensure_out_dir(&args.out)?;

    log::info!("optimizing {} with seed {}", args.case.display(), args.seed);
    let outcome = run_mode(mode, &case, &protocol, &opt_config, &adaptive, args.seed)
        .map_err(run_error)?;
    let report = summarize_run(&outcome, &case, &protocol)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    write_run_artifacts(&args.out, &case, &protocol, &opt_config, &adaptive, &outcome)?;
    let report_file = ReportFile {
        rounds: outcome.rounds,
        n_adjustments: outcome.audit.len(),
        n_eliminated: count_eliminated(&outcome.aim_states),
        report,
    };
    formats::write_json(&args.out.join("report.json"), &report_file)?;

    println!(
        "archive {} plans, {} satisfy all mandatory aims",
        report_file.report.archive_len, report_file.report.n_plans_satisfying_embrace
    );
    println!(
        "rounds {}, adjustments {}, eliminated {}",
        report_file.rounds, report_file.n_adjustments, report_file.n_eliminated
    );
    println!("artifacts in {}", args.out.display());
    Ok(())
}

fn count_eliminated(states: &AimStates) -> usize {
    states
        .0
        .iter()
        .flatten()
        .filter(|s| s.eliminated)
        .count()
}

fn write_run_artifacts(
    out: &Path,
    case: &PatientCase,
    protocol: &ProtocolConfig,
    opt_config: &OptimizerConfig,
    adaptive: &AdaptiveRunConfig,
    outcome: &RunOutcome,
) -> Result<(), CliError> {
    // Layout resolution is fidelity-independent; 1 point suffices for slugs.
    let (measurements, _) = measurement_layout(case, protocol, 1)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let dvi_columns: Vec<String> = measurements.iter().map(|m| m.slug.clone()).collect();

    formats::atomic_write(
        &out.join("front.csv"),
        formats::front_csv(case, &dvi_columns, &outcome.archive).as_bytes(),
    )?;
    let meta = FrontMeta {
        mode: outcome.mode,
        master_seed: outcome.master_seed,
        optimizer: *opt_config,
        adaptive: *adaptive,
        dc_seed_low: dc_seed(outcome.master_seed, "low"),
        dc_seed_high: dc_seed(outcome.master_seed, "high"),
        dc_seed_reeval: dc_seed(outcome.master_seed, "reeval"),
        dvi_columns,
        final_aspirations: outcome.aim_states.clone(),
        rounds: outcome.rounds,
    };
    formats::write_json(&out.join("front_meta.json"), &meta)?;
    formats::atomic_write(
        &out.join("trace.csv"),
        formats::trace_csv(&[
            ("adjust", &outcome.low_traces),
            ("final", &outcome.final_traces),
        ])
        .as_bytes(),
    )?;
    if outcome.mode == RunMode::FullAdaptive {
        let mut log_text = String::new();
        for record in &outcome.audit {
            log_text.push_str(&record.to_line());
            log_text.push('\n');
        }
        formats::atomic_write(&out.join("audit.log"), log_text.as_bytes())?;
    }
    formats::write_json(&out.join("checkpoint.json"), &outcome.snapshot)?;
    Ok(())
}

fn dc_seed(master: u64, label: &str) -> u64 {
    seed::derive(master, &[seed::tag("dc"), seed::tag(label)])
}

fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let (case, protocol) = load_inputs(&args.case, args.protocol.as_ref())?;
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    if args.seeds.len() != args.runs {
        return Err(CliError::Usage(format!(
            "--runs is {} but {} --seed flags were given",
            args.runs,
            args.seeds.len()
        )));
    }
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let (opt, adaptive) = args.knobs.configs();
    let config = CompareConfig { opt, adaptive };
    ensure_out_dir(&args.out)?;

    let outcome = if args.jobs == 1 {
        compare_approaches(&case, &protocol, args.runs, &args.seeds, &config)
            .map_err(run_error)?
    } else {
        compare_parallel(&case, &protocol, &args.seeds, &config, args.jobs)?
    };

    let csv = formats::compare_csv(&outcome);
    formats::atomic_write(&args.out.join("compare.csv"), csv.as_bytes())?;
    formats::write_json(&args.out.join("compare_full.json"), &outcome)?;
    let meta = CompareMeta {
        seeds: args.seeds.clone(),
        jobs: args.jobs,
        optimizer: opt,
        adaptive,
    };
    formats::write_json(&args.out.join("compare_meta.json"), &meta)?;
    print!("{csv}");
    Ok(())
}

/// Same reduction as the library comparison, with the independent runs
/// spread over a bounded worker pool. Report order follows the seed list,
/// so results are identical to the sequential path.
fn compare_parallel(
    case: &PatientCase,
    protocol: &ProtocolConfig,
    seeds: &[u64],
    config: &CompareConfig,
    jobs: usize,
) -> Result<CompareOutcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("building worker pool: {e}")))?;
    let pairs: Vec<(RunReport, RunReport)> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&master_seed| {
                let one = |mode| -> Result<RunReport, CliError> {
                    let out =
                        run_mode(mode, case, protocol, &config.opt, &config.adaptive, master_seed)
                            .map_err(run_error)?;
                    summarize_run(&out, case, protocol)
                        .map_err(|e| CliError::Usage(e.to_string()))
                };
                Ok((one(RunMode::EmbraceOnly)?, one(RunMode::FullAdaptive)?))
            })
            .collect::<Result<_, CliError>>()
    })?;
    let (embrace, adaptive): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let n_adjustable = n_adjustable_aims(protocol);
    Ok(CompareOutcome {
        adjustable_slugs: protocol
            .aims
            .iter()
            .filter(|a| a.adjustable)
            .map(|a| a.dvi.slug())
            .collect(),
        embrace_only: summarize_mode(RunMode::EmbraceOnly, embrace, n_adjustable),
        full_adaptive: summarize_mode(RunMode::FullAdaptive, adaptive, n_adjustable),
    })
}
