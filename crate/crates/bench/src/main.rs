use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rotaq_bench::report::{depth_table_csv, fit_report, to_report_json};
use rotaq_bench::{emit_reports, run_experiment, workers_from_env, Clocks, Dataset, Plan};
use rotaq_core::circuit::depth_table;

#[derive(Parser)]
#[command(name = "bench", version, about = "Run rotamer-packing benchmarks and build reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct ClockArgs {
    /// Classical clock rate in GHz (one energy evaluation per tick).
    #[arg(long, default_value_t = 1.0)]
    cpu_ghz: f64,
    /// Quantum clock rate in kHz (one circuit per tick).
    #[arg(long, default_value_t = 1.0)]
    qpu_khz: f64,
}

impl ClockArgs {
    fn clocks(self) -> Result<Clocks> {
        if !(self.cpu_ghz > 0.0 && self.qpu_khz > 0.0) {
            bail!("clock rates must be positive");
        }
        Ok(Clocks {
            cpu_hz: self.cpu_ghz * 1e9,
            qpu_hz: self.qpu_khz * 1e3,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a plan, skipping cells already complete in the output directory.
    Run {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit ln(cost) against qubit count for every method in a results directory.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        /// Overrides each method's own fit start.
        #[arg(long)]
        fit_start_m: Option<usize>,
    },
    /// Crossover estimates between classical and quantum fits.
    Crossover {
        #[arg(long = "in", default_value = ".")]
        input: PathBuf,
        #[command(flatten)]
        clocks: ClockArgs,
        #[arg(long)]
        fit_start_m: Option<usize>,
    },
    /// Logical CNOT depth of one-layer ansätze for N = n = 2..=max-size.
    DepthTable {
        #[arg(long, default_value_t = 7)]
        max_size: usize,
        /// Print the layer-by-layer schedule of every row.
        #[arg(long)]
        trace: bool,
    },
    /// Write every report for a results directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to `<in>/reports`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        clocks: ClockArgs,
        #[arg(long, default_value_t = 7)]
        max_size: usize,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { plan, out } => {
            let p = Plan::load(&plan).with_context(|| format!("loading {}", plan.display()))?;
            let outcome = run_experiment(&p, &out, workers_from_env()?)?;
            eprintln!(
                "{} cells computed, {} already complete",
                outcome.computed.len(),
                outcome.skipped.len()
            );
        }
        Command::Fit { input, fit_start_m } => {
            let data = Dataset::load(&input)?;
            let r = fit_report(&data, fit_start_m, Clocks::default());
            print!("{}", to_report_json(&r.fits)?);
        }
        Command::Crossover {
            input,
            clocks,
            fit_start_m,
        } => {
            let data = Dataset::load(&input)?;
            let r = fit_report(&data, fit_start_m, clocks.clocks()?);
            print!("{}", to_report_json(&r.crossovers)?);
        }
        Command::DepthTable { max_size, trace } => {
            if max_size < 2 {
                bail!("max-size must be at least 2");
            }
            if trace {
                for (r, analysis) in depth_table(max_size)? {
                    println!("# {} N={} n={}", r.regime.method_label(), r.num_residues, r.rotamers);
                    print!("{}", analysis.trace());
                }
            } else {
                print!("{}", depth_table_csv(max_size)?);
            }
        }
        Command::Report {
            input,
            out,
            clocks,
            max_size,
        } => {
            let data = Dataset::load(&input)?;
            let dir = out.unwrap_or_else(|| input.join("reports"));
            for path in emit_reports(&data, &dir, clocks.clocks()?, max_size)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}
