//! `treeshift`: entropies of hard-square and matrix shifts on k-trees.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{CliError, RunConfig};
use output::{Format, Renderer};

#[derive(Parser, Debug)]
#[command(name = "treeshift", version, about = "Strip entropies, certificates and counts for tree shifts")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the result to FILE (atomically) instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Working precision in bits.
    #[arg(
        long,
        global = true,
        env = "TREESHIFT_PRECISION",
        default_value_t = treeshift::numerics::DEFAULT_PRECISION,
        value_parser = clap::value_parser!(u32).range(i64::from(treeshift::numerics::MIN_PRECISION)..)
    )]
    precision: u32,

    /// Last level computed with exact integers before switching to log space.
    #[arg(long, global = true, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..))]
    exact_depth_cap: u32,

    /// Show logarithms in base 2 (presentation only).
    #[arg(long, global = true)]
    log2: bool,

    /// Seed for randomized probes.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Labeling counts B_n, ratios r_n and the upper bounds log B_n / |Δ_n|.
    Counts {
        #[arg(long)]
        k: u32,
        /// Last level to report.
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, value_name = "FILE")]
        matrix: Option<PathBuf>,
    },
    /// Strip approximations h_1 .. h_n.
    StripEntropy {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, value_name = "FILE")]
        matrix: Option<PathBuf>,
    },
    /// Partial sums of the entropy series with tail enclosures, N = 0 .. terms.
    Series {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 20)]
        terms: u32,
        #[arg(long, value_name = "FILE")]
        matrix: Option<PathBuf>,
    },
    /// Closed-form lower and upper entropy bounds.
    Bounds {
        #[arg(long)]
        k: u32,
    },
    /// Orbit of the interval map x -> 1/(1 + x^k), or of the simplex map of a matrix.
    MapOrbit {
        /// Arity; any positive real such as 4.125 or 33/8 for the interval map.
        #[arg(long)]
        k: String,
        #[arg(long, value_name = "FILE")]
        matrix: Option<PathBuf>,
        /// Starting point: a number in [0, 1], or comma-separated simplex coordinates.
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Fixed point of the interval map and its stability.
    FixedPoint {
        #[arg(long)]
        k: String,
        /// Also locate the limiting 2-cycle of the orbit of 0.
        #[arg(long)]
        period2: bool,
    },
    /// The arity where the fixed point loses stability.
    CriticalK0 {
        /// Width of the returned enclosure.
        #[arg(long, default_value = "1e-20")]
        tol: String,
    },
    /// Exact certificates that the strip values increase in n.
    VerifyMonotonicity {
        /// Arity; repeat to certify several.
        #[arg(long, required = true)]
        k: Vec<u32>,
        /// Write the JSON certificate to FILE.
        #[arg(long, value_name = "FILE")]
        emit_cert: Option<PathBuf>,
        /// Compare the coefficient lists with the embedded reference listings (k <= 8).
        #[arg(long)]
        paper_golden: bool,
    },
    /// Brute-force pattern counts on balls, checked against the recursion.
    Enumerate {
        #[arg(long, value_name = "FILE")]
        matrix: Option<PathBuf>,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        depth: u32,
        /// Largest pattern size enumerated.
        #[arg(long, default_value_t = treeshift::enumeration::DEFAULT_NODE_CAP)]
        cap: usize,
    },
    /// Prefix counts q(n) and the estimates log q(n) / n.
    Intermediate {
        #[arg(long, value_name = "FILE")]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long)]
        nmax: usize,
    },
    /// Recompute the published table, the dimension chain and sanity rows.
    ReproducePaper,
}

fn config_for(global: &GlobalArgs, matrix: Option<PathBuf>) -> RunConfig {
    RunConfig {
        precision_bits: global.precision,
        exact_depth_cap: global.exact_depth_cap,
        output_format: global.format,
        matrix_path: matrix,
        seed: global.seed,
        log2: global.log2,
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    treeshift::numerics::set_working_precision(cli.global.precision)?;
    let g = &cli.global;
    let report = match cli.command {
        Command::Counts { k, n, matrix } => commands::counts(&config_for(g, matrix), k, n)?,
        Command::StripEntropy { k, n, matrix } => commands::strip_entropy(&config_for(g, matrix), k, n)?,
        Command::Series { k, terms, matrix } => commands::series(&config_for(g, matrix), k, terms)?,
        Command::Bounds { k } => commands::bounds(&config_for(g, None), k)?,
        Command::MapOrbit { k, matrix, start, steps } => {
            commands::map_orbit(&config_for(g, matrix), &k, start.as_deref(), steps)?
        }
        Command::FixedPoint { k, period2 } => commands::fixed_point(&config_for(g, None), &k, period2)?,
        Command::CriticalK0 { tol } => commands::critical_k0(&config_for(g, None), &tol)?,
        Command::VerifyMonotonicity {
            k,
            emit_cert,
            paper_golden,
        } => commands::verify_monotonicity(&k, emit_cert.as_deref(), paper_golden)?,
        Command::Enumerate { matrix, k, depth, cap } => commands::enumerate(&config_for(g, matrix), k, depth, cap)?,
        Command::Intermediate { matrix, k, nmax } => commands::intermediate(&config_for(g, matrix), k, nmax)?,
        Command::ReproducePaper => commands::reproduce(&config_for(g, None))?,
    };
    let base = config_for(g, None);
    let bytes = Renderer { log2: base.log2 }
        .render(&report, base.output_format)
        .map_err(CliError::Io)?;
    match &g.out {
        Some(path) => output::write_atomic(path, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes).map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    for line in &report.diagnostics {
        eprintln!("{line}");
    }
    Ok(if report.ok { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("treeshift: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
