//! A small benchmark study driven by a TOML config: serial and parallel
//! experiments, per-iteration aggregates, an SVG plot and the speed-up table.

use std::fs;

use mopls::bench::aggregate::aggregate;
use mopls::bench::plot::{render_svg, Series};
use mopls::bench::speedup::{self, speedup_row};
use mopls::bench::{run_experiment, PartialConfig, Statistic};

const CONFIG: &str = r#"
problem = "zdt2"
dim = 4
budget = 60
trials = 3
seed-base = 100

[params]
n-cand-factor = 50
"#;

fn main() -> mopls::Result<()> {
    let root = std::env::temp_dir().join("mopls-experiment-example");
    let file = PartialConfig::from_toml(CONFIG)?;

    let mut summaries = Vec::new();
    for pop in [1, 4] {
        // Values set here override the file, as command-line flags would.
        let flags = PartialConfig {
            pop: Some(pop),
            out: Some(root.join(format!("pop{pop}"))),
            ..Default::default()
        };
        let config = file.clone().overlay(flags).resolve()?;
        let summary = run_experiment(&config)?;
        println!(
            "N={pop}: {} trials, aggregate in {}",
            summary.records.len(),
            summary.aggregate_path.display()
        );
        summaries.push(summary);
    }

    let series: Vec<Series> = summaries
        .iter()
        .map(|s| Series {
            label: s.records[0].label(),
            rows: aggregate(&s.records),
        })
        .collect();
    let plot = root.join("comparison.svg");
    fs::write(&plot, render_svg("zdt2 d=4", &series))?;
    println!("plot in {}", plot.display());

    let row = speedup_row(&summaries[0].records, &summaries[1].records, None, Statistic::Mean)?;
    print!("{}", speedup::to_csv(&[row]));
    Ok(())
}
