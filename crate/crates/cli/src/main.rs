use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use epmod::NumericalContext;
use epmod_cli::report::{Format, RunReport};
use epmod_cli::suite::{run_suite, standard_properties, SuiteConfig};
use epmod_cli::{commands, exit_code, InputError, EXIT_INPUT};

/// EP operators and Moore-Penrose inverses on finite-dimensional spaces.
#[derive(Parser)]
#[command(name = "epmod", version)]
struct Cli {
    /// Relative threshold below which singular values count as zero.
    #[arg(long, global = true, default_value_t = NumericalContext::default().rank_rel_tol)]
    rank_tol: f64,
    /// Absolute tolerance for operator and subspace equality.
    #[arg(long, global = true, default_value_t = NumericalContext::default().eq_tol)]
    eq_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// EP and Moore-Penrose report for one operator file.
    Analyze { path: PathBuf },
    /// Product conditions for a pair of operator files.
    Product { t: PathBuf, s: PathBuf },
    /// Exact index-level check of the shift pair whose product is not EP.
    Example34 {
        #[arg(long, default_value_t = 50)]
        cutoff: u64,
    },
    /// Seeded randomized property suite.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        dim: usize,
        /// Where operators from failing trials are written.
        #[arg(long, default_value = "epmod-failures")]
        dump_dir: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<RunReport, InputError> {
    let ctx = NumericalContext::default()
        .with_rank_rel_tol(cli.rank_tol)
        .with_eq_tol(cli.eq_tol);
    ctx.validate().map_err(|e| InputError::Usage(e.to_string()))?;
    match &cli.command {
        Command::Analyze { path } => commands::analyze(path, &ctx),
        Command::Product { t, s } => commands::product(t, s, &ctx),
        Command::Example34 { cutoff } => commands::example34(*cutoff, &ctx),
        Command::Suite { seed, trials, dim, dump_dir } => {
            let config = SuiteConfig { seed: *seed, trials: *trials, dim: *dim, dump_dir: dump_dir.clone() };
            run_suite(&config, &ctx, &standard_properties())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let start = Instant::now();
    let outcome = run(&cli);
    let elapsed = start.elapsed();
    match outcome {
        Ok(report) => {
            let format = match cli.format {
                OutputFormat::Text => Format::Text,
                OutputFormat::Json => Format::Json,
            };
            print!("{}", report.render(format));
            // Kept off stdout so that reports stay byte-identical across runs.
            eprintln!("wall time: {:.3} s", elapsed.as_secs_f64());
            ExitCode::from(exit_code(&report))
        }
        Err(e) => {
            eprintln!("epmod: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
