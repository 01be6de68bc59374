//! `shadowalloc` command-line tool.
//!
//! Exit codes: 0 success, 2 malformed input, 3 invalid parameter,
//! 4 resource cap exceeded, 1 anything else (I/O, solver failure).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shadowalloc::estimation::{self, BenchmarkConfig, BenchmarkScheme};
use shadowalloc::guarantees::{self, Indicator};
use shadowalloc::hamiltonian::{parse_hamiltonian, WeightedHamiltonian};
use shadowalloc::rng::RNG_ALGORITHM;
use shadowalloc::schemes::{self, SchemeConfig, SchemeKind, WeightKind};
use shadowalloc::simulator::QuantumState;
use shadowalloc::Error;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const THREADS_ENV: &str = "SHADOWALLOC_THREADS";

#[derive(Parser)]
#[command(name = "shadowalloc", version, about = "Pauli measurement settings with accuracy guarantees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate measurement settings and their guarantee report.
    Generate(GenerateArgs),
    /// Guaranteed accuracy of the truncated pipeline at several budgets.
    Curve(CurveArgs),
    /// Simulated energy-estimation benchmark (RMSE over independent runs).
    Benchmark(BenchmarkArgs),
    /// Worst-case shot budgets for a target accuracy.
    Budget(BudgetArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Shadowgrouping,
    Random,
    Bruteforce,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchSchemeArg {
    Shadowgrouping,
    Truncated,
    Random,
    Bruteforce,
    Singleshot,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Bernstein,
    Derandomization,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndicatorArg {
    Qwc,
    General,
}

#[derive(Args)]
struct Common {
    /// Hamiltonian file (`<coefficient> <pauli-word>` per line).
    #[arg(long)]
    hamiltonian: PathBuf,
    /// Confidence parameter δ of the guarantees.
    #[arg(long, default_value_t = 0.02)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SchemeFlags {
    #[arg(long, value_enum, default_value = "bernstein")]
    weight: WeightArg,
    #[arg(long, value_enum, default_value = "qwc")]
    indicator: IndicatorArg,
    /// Priority factor for unmeasured terms (default max(2, h_max²/h_min²)).
    #[arg(long)]
    alpha: Option<f64>,
    /// Accuracy used by the derandomization weights, in Hamiltonian units.
    #[arg(long, default_value_t = 0.0016)]
    epsilon: f64,
}

impl SchemeFlags {
    fn config(&self, seed: u64) -> SchemeConfig {
        SchemeConfig {
            weight: match self.weight {
                WeightArg::Bernstein => WeightKind::Bernstein,
                WeightArg::Derandomization => WeightKind::Derandomization {
                    epsilon: self.epsilon,
                },
            },
            indicator: match self.indicator {
                IndicatorArg::Qwc => Indicator::Qwc,
                IndicatorArg::General => Indicator::General,
            },
            alpha: self.alpha,
            seed,
            ..SchemeConfig::default()
        }
    }

    fn weight_name(&self) -> &'static str {
        match self.weight {
            WeightArg::Bernstein => "bernstein",
            WeightArg::Derandomization => "derandomization",
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    scheme_flags: SchemeFlags,
    #[arg(long, value_enum, default_value = "shadowgrouping")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    /// Settings file to write.
    #[arg(long)]
    out: PathBuf,
    /// Guarantee report (JSON); defaults to `<out>.guarantee.json`.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    scheme_flags: SchemeFlags,
    /// Comma-separated budget checkpoints.
    #[arg(long, value_delimiter = ',', required = true)]
    checkpoints: Vec<usize>,
    /// CSV table to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    scheme_flags: SchemeFlags,
    #[arg(long, value_enum, default_value = "shadowgrouping")]
    scheme: BenchSchemeArg,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Benchmark against this state file instead of the ground state.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Report (JSON) to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long)]
    hamiltonian: PathBuf,
    #[arg(long, default_value_t = 0.02)]
    delta: f64,
    /// Target accuracy (default: chemical accuracy, 1.6 mHa).
    #[arg(long, default_value_t = 0.0016)]
    epsilon: f64,
    /// Also write the summary here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Format { .. }
        | Error::PauliParse { .. }
        | Error::EmptyHamiltonian { .. }
        | Error::LengthMismatch { .. } => 2,
        Error::Domain { .. }
        | Error::Contract(_)
        | Error::BoundUndefined { .. }
        | Error::UnsupportedEstimation(_) => 3,
        Error::ResourceCap { .. } => 4,
        Error::NonConvergence { .. } | Error::Io(_) => 1,
    }
}

/// Provenance fields embedded in every output.
#[derive(Serialize)]
struct Provenance {
    tool: &'static str,
    version: &'static str,
    command: String,
    seed: u64,
    rng: &'static str,
    hamiltonian_sha256: String,
}

impl Provenance {
    fn new(seed: u64, h: &WeightedHamiltonian) -> Self {
        Provenance {
            tool: "shadowalloc",
            version: VERSION,
            command: command_line(),
            seed,
            rng: RNG_ALGORITHM,
            hamiltonian_sha256: h.content_hash(),
        }
    }

    fn comment_header(&self) -> String {
        format!(
            "# {} {}\n# command: {}\n# seed: {}\n# rng: {}\n# hamiltonian_sha256: {}\n",
            self.tool, self.version, self.command, self.seed, self.rng, self.hamiltonian_sha256
        )
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    #[serde(flatten)]
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: T,
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn load_hamiltonian(path: &Path) -> Result<WeightedHamiltonian, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_hamiltonian(&text)
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn generate(args: &GenerateArgs) -> Result<(), Error> {
    let h = load_hamiltonian(&args.common.hamiltonian)?;
    guarantees::alpha_delta(args.common.delta)?;
    let config = args.scheme_flags.config(args.common.seed);
    let kind = match args.scheme {
        SchemeArg::Shadowgrouping => SchemeKind::ShadowGrouping,
        SchemeArg::Random => SchemeKind::RandomPaulis,
        SchemeArg::Bruteforce => SchemeKind::BruteForce,
    };
    let settings = schemes::generate_settings(kind, &h, args.budget, &config)?;
    let counts = guarantees::count_compatible(&h, &settings, config.indicator)?;
    let report = guarantees::epsilon_guarantee(&h, counts.counts(), args.common.delta)?;
    let alpha = config.alpha.unwrap_or_else(|| guarantees::default_alpha(&h));

    let provenance = Provenance::new(args.common.seed, &h);
    let mut text = provenance.comment_header();
    writeln!(text, "# scheme: {}", kind.name()).unwrap();
    writeln!(text, "# delta: {}", args.common.delta).unwrap();
    writeln!(text, "# alpha: {alpha}").unwrap();
    writeln!(text, "# weight: {}", args.scheme_flags.weight_name()).unwrap();
    writeln!(text, "# indicator: {}", config.indicator.name()).unwrap();
    for s in &settings {
        writeln!(text, "{s}").unwrap();
    }
    write_atomic(&args.out, &text)?;

    let report_path = args.report.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".guarantee.json");
        PathBuf::from(p)
    });
    write_atomic(
        &report_path,
        &to_json(&Envelope {
            provenance: &provenance,
            body: &report,
        }),
    )?;
    eprintln!(
        "wrote {} settings to {}; epsilon_total = {} at delta = {}",
        settings.len(),
        args.out.display(),
        report.epsilon_total,
        args.common.delta
    );
    Ok(())
}

fn curve(args: &CurveArgs) -> Result<(), Error> {
    let h = load_hamiltonian(&args.common.hamiltonian)?;
    guarantees::alpha_delta(args.common.delta)?;
    let config = args.scheme_flags.config(args.common.seed);
    let points = schemes::guarantee_curve(&h, &args.checkpoints, args.common.delta, &config)?;
    let provenance = Provenance::new(args.common.seed, &h);
    let mut text = provenance.comment_header();
    writeln!(text, "# delta: {}", args.common.delta).unwrap();
    writeln!(text, "# l1_norm: {}", h.norms().l1).unwrap();
    writeln!(text, "budget,epsilon_stat,epsilon_sys,epsilon_total,n_truncated").unwrap();
    for p in &points {
        writeln!(
            text,
            "{},{},{},{},{}",
            p.budget, p.epsilon_stat, p.epsilon_sys, p.epsilon_total, p.n_truncated
        )
        .unwrap();
    }
    write_atomic(&args.out, &text)
}

fn benchmark(args: &BenchmarkArgs) -> Result<(), Error> {
    let h = load_hamiltonian(&args.common.hamiltonian)?;
    let state = match &args.state {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Some(QuantumState::from_text(&text)?)
        }
        None => None,
    };
    let config = BenchmarkConfig {
        scheme: match args.scheme {
            BenchSchemeArg::Shadowgrouping => BenchmarkScheme::ShadowGrouping,
            BenchSchemeArg::Truncated => BenchmarkScheme::Truncated,
            BenchSchemeArg::Random => BenchmarkScheme::Random,
            BenchSchemeArg::Bruteforce => BenchmarkScheme::BruteForce,
            BenchSchemeArg::Singleshot => BenchmarkScheme::SingleShot,
        },
        scheme_config: args.scheme_flags.config(args.common.seed),
        budget: args.budget,
        n_runs: args.runs,
        seed: args.common.seed,
        delta: args.common.delta,
        state,
    };
    let report = estimation::run_benchmark(&h, &config)?;
    let provenance = Provenance::new(args.common.seed, &h);
    #[derive(Serialize)]
    struct Body<'r> {
        weight: &'static str,
        #[serde(flatten)]
        report: &'r estimation::BenchmarkReport,
    }
    write_atomic(
        &args.out,
        &to_json(&Envelope {
            provenance: &provenance,
            body: Body {
                weight: args.scheme_flags.weight_name(),
                report: &report,
            },
        }),
    )?;
    eprintln!(
        "{}: RMSE = {:.6} ± {:.6} over {} runs (E = {})",
        report.scheme, report.rmse, report.rmse_err, report.n_runs, report.true_energy
    );
    Ok(())
}

fn budget(args: &BudgetArgs) -> Result<(), Error> {
    let h = load_hamiltonian(&args.hamiltonian)?;
    let range = guarantees::worst_case_budget(&h, args.epsilon, args.delta)?;
    let single = guarantees::single_shot_budget(&h, args.epsilon, args.delta)?;
    let norms = h.norms();
    let mut text = String::new();
    writeln!(text, "# shadowalloc {VERSION}").unwrap();
    writeln!(text, "# command: {}", command_line()).unwrap();
    writeln!(text, "# hamiltonian_sha256: {}", h.content_hash()).unwrap();
    writeln!(text, "delta {}", args.delta).unwrap();
    writeln!(text, "epsilon {}", args.epsilon).unwrap();
    writeln!(text, "l1_norm {}", norms.l1).unwrap();
    writeln!(text, "terms {}", h.len()).unwrap();
    writeln!(text, "alpha_delta {}", guarantees::alpha_delta(args.delta)?).unwrap();
    writeln!(text, "n_low {}", range.low).unwrap();
    writeln!(text, "n_high {}", range.high).unwrap();
    writeln!(text, "single_shot {single}").unwrap();
    print!("{text}");
    if let Some(out) = &args.out {
        write_atomic(out, &text)?;
    }
    Ok(())
}

fn configure_threads() {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("ignoring {THREADS_ENV}={v:?}: expected a positive integer"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Curve(a) => curve(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Budget(a) => budget(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
