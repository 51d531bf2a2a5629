use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use macrosup::cli::{self, AnalyticOptions, KSelection, RunConfig, ScanOptions, SolutionSource, StateSource};
use macrosup::pindex::FitConfig;
use macrosup::Result;

#[derive(Parser)]
#[command(name = "macrosup", version, about = "Macroscopic superposition diagnostics for Grover's search")]
struct Cli {
    /// Root seed; fixes every random instance.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long = "out-dir", global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long = "pe-upper-band", global = true, default_value_t = 1.8)]
    pe_upper_band: f64,
    #[arg(long = "pe-lower-band", global = true, default_value_t = 1.2)]
    pe_lower_band: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    Grover(GroverCommand),
    #[command(subcommand)]
    State(StateCommand),
    #[command(subcommand)]
    Analytic(AnalyticCommand),
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Subcommand)]
enum GroverCommand {
    /// Gate-by-gate run with e_max after every step.
    Trace(TraceArgs),
    /// e_max at k* = ceil(R/s) over a range of sizes, with p_e fits.
    Scan(ScanArgs),
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long = "L")]
    l: usize,
    /// Comma-separated solution indices.
    #[arg(long, value_delimiter = ',', conflicts_with = "random", required_unless_present = "random")]
    solutions: Option<Vec<usize>>,
    /// Draw this many distinct solutions from the seed.
    #[arg(long)]
    random: Option<usize>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long = "Lmin", default_value_t = 8)]
    l_min: usize,
    #[arg(long = "Lmax", default_value_t = 16)]
    l_max: usize,
    /// Divisors s of k* = ceil(R/s).
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 3.0, 4.0])]
    fractions: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    #[arg(long = "M", default_value_t = 1)]
    m: usize,
    /// Scan a catalog family instead of Grover states.
    #[arg(long)]
    catalog: Option<String>,
}

#[derive(Subcommand)]
enum StateCommand {
    /// VCM summary, top operator and optional brute-force check.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, conflicts_with = "from_file", requires = "l", required_unless_present = "from_file")]
    catalog: Option<String>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long = "from-file")]
    from_file: Option<PathBuf>,
    #[arg(long = "brute-force")]
    brute_force: bool,
}

#[derive(Subcommand)]
enum AnalyticCommand {
    /// Magnetization moments against closed forms, or the tail root K.
    Check(CheckArgs),
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long = "L", required_unless_present = "solve_k")]
    l: Option<usize>,
    #[arg(long = "M", default_value_t = 1)]
    m: usize,
    #[arg(long)]
    s: Option<f64>,
    /// `all` or a single iteration count.
    #[arg(long)]
    k: Option<String>,
    #[arg(long = "solve-K", conflicts_with_all = ["l", "s", "k"])]
    solve_k: Option<f64>,
}

#[derive(Subcommand)]
enum CatalogCommand {
    List,
}

fn emit<T: Serialize>(config: &RunConfig, name: &str, report: &T, passed: bool) -> Result<bool> {
    print!("{}", cli::save_report(config, name, report)?);
    Ok(passed)
}

fn run(args: Cli) -> Result<bool> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| macrosup::Error::InvalidArgument(e.to_string()))?;
    }
    let mut config = RunConfig::new(args.seed, args.out_dir);
    config.fit = FitConfig { upper_band: args.pe_upper_band, lower_band: args.pe_lower_band, ..FitConfig::default() };

    match args.command {
        Command::Grover(GroverCommand::Trace(a)) => {
            let source = match (a.solutions, a.random) {
                (Some(s), None) => SolutionSource::Explicit(s),
                (None, Some(m)) => SolutionSource::Random(m),
                _ => unreachable!("clap enforces exactly one source"),
            };
            let r = cli::grover_trace(&config, a.l, &source)?;
            emit(&config, &format!("trace_L{}.json", r.num_qubits), &r, r.passed)
        }
        Command::Grover(GroverCommand::Scan(a)) => match a.catalog {
            Some(name) => {
                let r = cli::catalog_scan(&config, &name, a.l_min, a.l_max)?;
                emit(&config, &format!("scan_{name}_report.json"), &r, r.passed)
            }
            None => {
                let opts = ScanOptions {
                    l_min: a.l_min,
                    l_max: a.l_max,
                    fractions: a.fractions,
                    instances: a.instances,
                    num_solutions: a.m,
                };
                let r = cli::grover_scan(&config, &opts)?;
                emit(&config, "scan_report.json", &r, r.passed)
            }
        },
        Command::State(StateCommand::Analyze(a)) => {
            let source = match (a.catalog, a.from_file) {
                (Some(name), None) => StateSource::Catalog { name, num_qubits: a.l.expect("clap requires --L") },
                (None, Some(path)) => StateSource::File(path),
                _ => unreachable!("clap enforces exactly one source"),
            };
            let r = cli::state_analyze(&config, &source, a.brute_force)?;
            emit(&config, &format!("analyze_{}.json", r.source), &r, r.passed)
        }
        Command::Analytic(AnalyticCommand::Check(a)) => {
            if let Some(m) = a.solve_k {
                let r = cli::analytic_tail_root(m)?;
                return emit(&config, "solve_k.json", &r, r.passed);
            }
            let k = match a.k.as_deref() {
                None => None,
                Some("all") => Some(KSelection::All),
                Some(v) => Some(KSelection::One(v.parse().map_err(|_| {
                    macrosup::Error::InvalidArgument(format!("--k expects `all` or an integer, got `{v}`"))
                })?)),
            };
            let opts = AnalyticOptions {
                num_qubits: a.l.expect("clap requires --L"),
                num_solutions: a.m,
                divisor: a.s,
                k,
            };
            let r = cli::analytic_moments(&config, &opts)?;
            emit(&config, &format!("analytic_L{}.json", r.num_qubits), &r, r.passed)
        }
        Command::Catalog(CatalogCommand::List) => {
            let list = cli::catalog_list();
            println!("{}", serde_json::to_string_pretty(&list).expect("listing serializes"));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: an internal check failed; see the report");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
