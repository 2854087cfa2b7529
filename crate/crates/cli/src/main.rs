mod cache;
mod commands;
mod pretty;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use slodowy_core::liealg::FormKind;

use commands::{Failure, RunConfig};

#[derive(Parser)]
#[command(name = "slodowy", version, about = "Exact transverse Poisson structures on Slodowy slices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// sl2-triple, grading, weights and classification of an orbit
    Orbit,
    /// Slice basis, coordinate degrees and restricted invariants
    Slice,
    /// Symbolic transverse and frozen bracket tables with certificates
    Bracket,
    /// Argument-shift family with involution and independence certificates
    Shift,
    /// Run a named verification suite
    Verify,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormArg {
    Killing,
    Trace,
}

#[derive(ValueEnum, Clone, Copy)]
enum WCoords {
    /// Printed slice basis and coordinates of the sl5 [3,2] example
    Paper,
}

#[derive(clap::Args)]
struct Opts {
    /// Algebra descriptor such as sl:5 or so:8
    #[arg(long, global = true)]
    algebra: Option<String>,
    /// Jordan type such as 5,3
    #[arg(long, global = true)]
    partition: Option<String>,
    #[arg(long, global = true, value_enum, default_value = "killing")]
    form: FormArg,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random points per certificate
    #[arg(long, global = true, default_value_t = 20)]
    npoints: usize,
    /// Highest power of λ reported by `shift`
    #[arg(long, global = true)]
    lambda_max_degree: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for cached bracket tables
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Fraction of cache hits recomputed and compared
    #[arg(long, global = true, default_value_t = 0.1)]
    cache_audit_rate: f64,
    /// Suite for `verify`: paper-sl5, d4a1, b4a2, mf-sl3, mf-sl4, subregular-sl3
    #[arg(long, global = true)]
    suite: Option<String>,
    #[arg(long, global = true, value_enum)]
    w_coords: Option<WCoords>,
    /// Human-readable output instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
    /// Include wall-clock time in the report
    #[arg(long, global = true)]
    timings: bool,
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let o = &cli.opts;
    if !(0.0..=1.0).contains(&o.cache_audit_rate) {
        return Err(Failure::Usage("--cache-audit-rate must lie in [0, 1]".into()));
    }
    if o.npoints == 0 {
        return Err(Failure::Usage("--npoints must be positive".into()));
    }
    let cfg = RunConfig {
        algebra: o.algebra.clone(),
        partition: o.partition.clone(),
        form: match o.form {
            FormArg::Killing => FormKind::Killing,
            FormArg::Trace => FormKind::Trace,
        },
        seed: o.seed,
        npoints: o.npoints,
        lambda_max_degree: o.lambda_max_degree,
        cache: commands::cache_for(o.cache_dir.as_deref(), o.cache_audit_rate, o.seed)?,
        suite: o.suite.clone(),
        paper_coords: o.w_coords.is_some(),
    };
    let f = match cli.command {
        Command::Orbit => commands::orbit,
        Command::Slice => commands::slice,
        Command::Bracket => commands::bracket,
        Command::Shift => commands::shift,
        Command::Verify => commands::verify,
    };
    let (report, ok) = commands::timed(|| f(&cfg), o.timings)?;
    let text = if o.pretty {
        pretty::render(&report)
    } else {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    };
    match &o.out {
        Some(path) => cache::write_atomic(path, text.as_bytes())
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
