use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::error;

use mopls::bench::aggregate::{aggregate, to_csv};
use mopls::bench::plot::{render_svg, Series};
use mopls::bench::runner::{load_records, run_experiment, AGGREGATE_FILE, PLOT_FILE};
use mopls::bench::speedup::{self, speedup_row, Statistic};
use mopls::bench::PartialConfig;
use mopls::engine::Algorithm;

#[derive(Parser)]
#[command(name = "mopls", version, about = "Parallel surrogate-assisted multi-objective local search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the trials of one experiment.
    Run(RunArgs),
    /// Summarize trial records per iteration into a CSV table.
    Aggregate {
        /// Directory holding trial-*.jsonl records.
        dir: PathBuf,
        /// Output path (default: <dir>/aggregate.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot coverage of one or more experiments as SVG.
    Plot {
        /// Experiment directories; each becomes one curve.
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        /// Output path (default: <first dir>/progress.svg).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        title: Option<String>,
    },
    /// Speed-up of parallel experiments over a serial baseline.
    Speedup {
        /// Target hypervolume coverage (default: the baseline's final value).
        #[arg(long = "target-hc")]
        target_hc: Option<f64>,
        /// Baseline experiment directory.
        #[arg(long)]
        baseline: PathBuf,
        /// Experiment directories to compare.
        #[arg(long = "target", required = true)]
        targets: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = StatArg::Mean)]
        statistic: StatArg,
        /// Write the CSV table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    Mean,
    Median,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Mopls,
    RandomSearch,
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with the same keys as these flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem family, e.g. zdt1 or lzf3.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,
    /// Points evaluated per iteration.
    #[arg(long)]
    pop: Option<usize>,
    /// Total evaluations including the initial design.
    #[arg(long, conflicts_with = "wall_budget")]
    budget: Option<usize>,
    /// Iterations after the initial design.
    #[arg(long)]
    wall_budget: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed_base: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluation threads (default: pop).
    #[arg(long)]
    workers: Option<usize>,
    /// Seconds per evaluation.
    #[arg(long)]
    delay: Option<f64>,
    /// Sleep for the delay and measure real time instead of simulating it.
    #[arg(long)]
    real_clock: bool,
}

impl RunArgs {
    fn into_partial(self) -> PartialConfig {
        PartialConfig {
            problem: self.problem,
            dim: self.dim,
            algo: self.algo.map(|a| match a {
                AlgoArg::Mopls => Algorithm::Mopls,
                AlgoArg::RandomSearch => Algorithm::RandomSearch,
            }),
            pop: self.pop,
            budget: self.budget,
            wall_budget: self.wall_budget,
            trials: self.trials,
            seed_base: self.seed_base,
            seeds: None,
            out: self.out,
            workers: self.workers,
            delay: self.delay,
            real_clock: self.real_clock.then_some(true),
            params: Default::default(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> mopls::Result<()> {
    match command {
        Command::Run(args) => {
            let file = match &args.config {
                Some(path) => PartialConfig::from_file(path)?,
                None => PartialConfig::default(),
            };
            let config = file.overlay(args.into_partial()).resolve()?;
            let summary = run_experiment(&config)?;
            for rec in &summary.records {
                match rec.final_hc() {
                    Some(hc) => println!("seed {:>4}  final H_c {hc:.4}", rec.header.seed),
                    None => println!("seed {:>4}  no coverage", rec.header.seed),
                }
            }
            for (seed, why) in &summary.failures {
                println!("seed {seed:>4}  FAILED: {why}");
            }
            println!("records, {} and {} in {}", AGGREGATE_FILE, PLOT_FILE, config.out.display());
        }
        Command::Aggregate { dir, out } => {
            let records = load_records(&dir)?;
            let path = out.unwrap_or_else(|| dir.join(AGGREGATE_FILE));
            fs::write(&path, to_csv(&aggregate(&records)))?;
            println!("{}", path.display());
        }
        Command::Plot { dirs, out, title } => {
            let mut series = Vec::with_capacity(dirs.len());
            let mut problem = String::new();
            for dir in &dirs {
                let records = load_records(dir)?;
                problem = records[0].header.problem.clone();
                series.push(Series {
                    label: records[0].label(),
                    rows: aggregate(&records),
                });
            }
            let path = out.unwrap_or_else(|| dirs[0].join(PLOT_FILE));
            fs::write(&path, render_svg(&title.unwrap_or(problem), &series))?;
            println!("{}", path.display());
        }
        Command::Speedup {
            target_hc,
            baseline,
            targets,
            statistic,
            out,
        } => {
            let stat = match statistic {
                StatArg::Mean => Statistic::Mean,
                StatArg::Median => Statistic::Median,
            };
            let base = load_records(&baseline)?;
            let rows = targets
                .iter()
                .map(|dir| speedup_row(&base, &load_records(dir)?, target_hc, stat))
                .collect::<mopls::Result<Vec<_>>>()?;
            let table = speedup::to_csv(&rows);
            match out {
                Some(path) => fs::write(path, table)?,
                None => print!("{table}"),
            }
        }
    }
    Ok(())
}
