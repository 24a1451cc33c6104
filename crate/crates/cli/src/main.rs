use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use slicemap_core::amplification::{block_amplify_element, slice_amplify_element};
use slicemap_core::linalg::max_abs_diff;
use slicemap_core::superop::{cb_norm_lower, CbOptions};
use slicemap_core::verify::{self, Fault, Suite, SuiteConfig};

mod io;

use io::{ElementFile, EstimateFile, ReportFile, SuperOpFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("{0}: {1}")]
    Json(String, #[source] serde_json::Error),
    #[error(transparent)]
    Core(#[from] slicemap_core::Error),
}

#[derive(Parser)]
#[command(name = "slicemap", version, about = "Slice-map amplification of maps on matrix algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run property suites over an (m, n) grid and write a JSON report.
    Verify(VerifyArgs),
    /// Rerun one trial and print its intermediate values.
    Replay(ReplayArgs),
    /// Apply χ(Φ) to an element of M_m ⊗ M_n.
    Amplify(AmplifyArgs),
    /// Lower-bound the cb norm of a map by alternating ascent.
    Cbnorm(CbnormArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    CorruptBlock,
    MislabelCp,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Self {
        match f {
            FaultArg::CorruptBlock => Fault::CorruptBlockAmplify,
            FaultArg::MislabelCp => Fault::MislabelNonCp,
        }
    }
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Suite name, comma-separated list, or "all".
    #[arg(long, default_value = "all")]
    suite: String,
    /// Inclusive range `a..b` of first-factor sizes.
    #[arg(long, default_value = "1..4", value_parser = parse_range)]
    m_range: RangeInclusive<usize>,
    #[arg(long, default_value = "1..4", value_parser = parse_range)]
    n_range: RangeInclusive<usize>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Tolerance for the ascent-based isometry check.
    #[arg(long, default_value_t = 1e-6)]
    tol_general: f64,
    /// Inject a known defect to exercise the harness.
    #[arg(long, value_enum)]
    fault: Option<FaultArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ReplayArgs {
    #[arg(long)]
    suite: String,
    /// Trial seed, as reported in `worst_case_seed`.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    fault: Option<FaultArg>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Slice,
    Block,
    /// Slice output, plus the defect against the block construction.
    Check,
}

#[derive(clap::Args)]
struct AmplifyArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    element: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "slice")]
    method: Method,
}

#[derive(clap::Args)]
struct CbnormArgs {
    #[arg(long)]
    map: PathBuf,
    /// Ancilla size k in Φ ⊗ id_k; defaults to the map dimension.
    #[arg(long)]
    level: Option<usize>,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if a == 0 || a > b {
        return Err(format!("invalid range {s:?}"));
    }
    Ok(a..=b)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let suites = Suite::parse_list(&args.suite)?;
    let config = SuiteConfig {
        suites,
        m_range: args.m_range,
        n_range: args.n_range,
        trials: args.trials,
        seed: args.seed,
        tol: args.tol,
        tol_general: args.tol_general,
        fault: args.fault.map(Fault::from),
    };
    config.validate()?;
    let reports = verify::run_suite(&config)?;
    for r in &reports {
        eprintln!(
            "{:<5} {:<18} trials={:<5} max_defect={:.3e} tol={:.0e} elapsed={:.2}s",
            if r.pass { "pass" } else { "FAIL" },
            r.name,
            r.trials_run,
            r.max_defect,
            r.tol,
            r.elapsed.as_secs_f64()
        );
        if !r.pass {
            eprintln!(
                "      replay: slicemap replay --suite {} --seed {} --m {} --n {}",
                r.suite, r.worst_case_seed, r.worst_case_m, r.worst_case_n
            );
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    let file = ReportFile {
        pass,
        seed: config.seed,
        trials: config.trials,
        reports: &reports,
    };
    io::write_json(args.out.as_deref(), &file)?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_replay(args: ReplayArgs) -> Result<ExitCode, CliError> {
    let suite: Suite = args.suite.parse()?;
    let replay = verify::replay(suite, args.seed, args.m, args.n, args.fault.map(Fault::from))?;
    print!("{replay}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_amplify(args: AmplifyArgs) -> Result<ExitCode, CliError> {
    let phi = io::read_json::<SuperOpFile>(&args.map)?.to_superop()?;
    let u = io::read_json::<ElementFile>(&args.element)?.to_element()?;
    if phi.dim() != u.dims().m {
        return Err(CliError::Usage(format!(
            "map acts on M_{} but the element lies in M_{} ⊗ M_{}",
            phi.dim(),
            u.dims().m,
            u.dims().n
        )));
    }
    let v = match args.method {
        Method::Block => block_amplify_element(&phi, &u, None)?,
        Method::Slice => slice_amplify_element(&phi, &u)?,
        Method::Check => {
            let v = slice_amplify_element(&phi, &u)?;
            let w = block_amplify_element(&phi, &u, None)?;
            println!("cross-method defect: {:e}", max_abs_diff(v.mat(), w.mat()));
            v
        }
    };
    io::write_json(args.out.as_deref(), &ElementFile::from_element(&v))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_cbnorm(args: CbnormArgs) -> Result<ExitCode, CliError> {
    let phi = io::read_json::<SuperOpFile>(&args.map)?.to_superop()?;
    let level = args.level.unwrap_or(phi.dim());
    if level == 0 || args.restarts == 0 {
        return Err(CliError::Usage("level and restarts must be at least 1".into()));
    }
    let opts = CbOptions {
        restarts: args.restarts,
        seed: args.seed,
        ..CbOptions::default()
    };
    let est = cb_norm_lower(&phi, level, &opts);
    if !est.converged {
        eprintln!("warning: best restart did not reach stationarity");
    }
    println!("{}", est.value);
    if let Some(out) = args.out.as_deref() {
        io::write_json(Some(out), &EstimateFile::from_estimate(&est))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Replay(a) => cmd_replay(a),
        Command::Amplify(a) => cmd_amplify(a),
        Command::Cbnorm(a) => cmd_cbnorm(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
