//! Greedy online policies on a Poisson workload, with the per-round
//! decision log.

use switchsched::error::Result;
use switchsched::model::response_from_rounds;
use switchsched::online::{run_policy, write_decision_log, Policy};
use switchsched::sim::{poisson_workload, WorkloadConfig};

pub fn run_example() -> Result<()> {
    let inst = poisson_workload(&WorkloadConfig { m: 4, rate: 3.0, rounds: 6, seed: 2 })?;
    println!("{} flows", inst.len());
    for p in Policy::ALL {
        let mut log = Vec::new();
        let rounds = run_policy(&inst, p, Some(&mut log))?;
        let r = response_from_rounds(&inst, &rounds)?;
        println!("{p:>10}: average {:.2}, max {}", r.average, r.maximum);
        if p == Policy::MinRTime {
            write_decision_log(std::io::stdout().lock(), &log[..log.len().min(3)])?;
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
