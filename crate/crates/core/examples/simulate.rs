//! A small simulator sweep with LP bounds and a per-configuration summary.

use switchsched::error::Result;
use switchsched::online::Policy;
use switchsched::sim::{aggregate, run_experiment, write_csv, ExperimentConfig};

pub fn run_example() -> Result<()> {
    let exp = ExperimentConfig {
        m: 4,
        rates: vec![2.0, 4.0],
        horizons: vec![6],
        seeds: (0..3).collect(),
        policies: Policy::ALL.to_vec(),
        lp_bounds: true,
        timing: false,
    };
    let results = run_experiment(&exp)?;
    println!("{} trials", results.len());
    write_csv(std::io::stdout().lock(), &aggregate(&results))?;
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
