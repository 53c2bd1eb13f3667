use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use ccr_lab::{
    interval_sweep_csv, run_suite, weyl_sweep_csv, GridConfig, IntervalConfig, OutputFormat, RunConfig, Suite,
    UsageError,
};
use clap::{Args, Parser, Subcommand};

/// Verification suites for truncated and grid realizations of [p,q] = -i I.
#[derive(Parser)]
#[command(name = "ccr-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ladder, position and momentum matrices on truncated Fock space
    Fock(RunArgs),
    /// Analytic-vector series and growth bounds
    Analytic(RunArgs),
    /// Weyl relation and exponential identities
    Weyl(RunArgs),
    /// Grid realization on [-L, L)
    Schrodinger(RunArgs),
    /// Periodic finite interval, where the Weyl relation fails
    Irregular(RunArgs),
    /// Exact normal-ordering identities
    Symbolic(RunArgs),
    /// Every suite
    All(RunArgs),
    /// Cartesian parameter sweeps written as CSV
    Sweep(SweepArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// json, csv or text
    #[arg(long, default_value = "text", value_parser = OutputFormat::from_str)]
    format: OutputFormat,
}

#[derive(Args)]
struct RunArgs {
    /// Fock truncation dimension
    #[arg(long, default_value_t = 64)]
    dim: usize,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    s: f64,
    /// Highest series order
    #[arg(long = "kmax", default_value_t = 40)]
    k_max: usize,
    /// Weyl guard band (default dim/4)
    #[arg(long)]
    guard: Option<usize>,
    /// L,M,scheme with scheme spectral or central
    #[arg(long, default_value = "10,256,spectral", value_parser = GridConfig::from_str)]
    grid: GridConfig,
    /// a,b for the finite interval
    #[arg(long, default_value = "0,1", allow_hyphen_values = true, value_parser = IntervalConfig::from_str)]
    interval: IntervalConfig,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated truncation dimensions
    #[arg(long, default_value = "16,32,64")]
    dims: String,
    /// Comma-separated translation parameters
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    t: String,
    /// Comma-separated boost parameters
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    s: String,
    /// Comma-separated interval lengths; switches to the interval contrast table
    #[arg(long)]
    lengths: Option<String>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_list<T: FromStr>(flag: &str, text: &str) -> Result<Vec<T>, UsageError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| UsageError::Invalid(format!("bad value `{s}` in {flag}")))
        })
        .collect()
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(suite: Suite, args: RunArgs) -> Result<ExitCode, (u8, String)> {
    let config = RunConfig {
        suite,
        dim: args.dim,
        t: args.t,
        s: args.s,
        k_max: args.k_max,
        guard: args.guard,
        grid: args.grid,
        interval: args.interval,
        seed: args.seed,
    };
    let report = run_suite(&config).map_err(|e| (2, e.to_string()))?;
    emit(args.output.out.as_ref(), &report.render(args.output.format)).map_err(|e| (1, e))?;
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn sweep(args: SweepArgs) -> Result<ExitCode, (u8, String)> {
    let usage = |e: UsageError| (2, e.to_string());
    let ts: Vec<f64> = parse_list("--t", &args.t).map_err(usage)?;
    let ss: Vec<f64> = parse_list("--s", &args.s).map_err(usage)?;
    let csv = match &args.lengths {
        Some(lengths) => {
            let lengths: Vec<f64> = parse_list("--lengths", lengths).map_err(usage)?;
            let (Some(&t), Some(&s)) = (ts.first(), ss.first()) else {
                return Err((2, "interval sweep needs --t and --s".into()));
            };
            interval_sweep_csv(&lengths, t, s).map_err(|e| (1, e.to_string()))?
        }
        None => weyl_sweep_csv(&ts, &ss, &parse_list("--dims", &args.dims).map_err(usage)?),
    };
    emit(args.out.as_ref(), &csv).map_err(|e| (1, e))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fock(a) => run(Suite::Fock, a),
        Command::Analytic(a) => run(Suite::Analytic, a),
        Command::Weyl(a) => run(Suite::Weyl, a),
        Command::Schrodinger(a) => run(Suite::Schrodinger, a),
        Command::Irregular(a) => run(Suite::Irregular, a),
        Command::Symbolic(a) => run(Suite::Symbolic, a),
        Command::All(a) => run(Suite::All, a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("ccr-lab: {msg}");
            ExitCode::from(code)
        }
    }
}
