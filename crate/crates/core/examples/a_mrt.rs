//! Online max response time by batching with a guessed bound.

use switchsched::error::Result;
use switchsched::gen::random_instance;
use switchsched::model::{response_from_rounds, validate_rounds};
use switchsched::online::{a_mrt_run, AmrtConfig, AmrtRun};

pub fn run_example() -> Result<()> {
    let inst = random_instance(3, 3, 20, 2, 8, 5)?;
    for doubling in [false, true] {
        let run = a_mrt_run(&inst, AmrtConfig { doubling })?;
        let max = response_from_rounds(&inst, &run.rounds)?.maximum;
        let ok = validate_rounds(&inst, &run.rounds, AmrtRun::capacity_limit(&inst)).is_valid();
        println!("doubling={doubling}: final rho {}, max response {max}, {} batches, overlap {}, valid {ok}", run.final_rho, run.batches.len(), run.max_overlap);
        for b in &run.batches {
            println!("  boundary {:>2} rho {} flows {:?} rounds {}..={}", b.boundary, b.rho, b.flows, b.first_round, b.last_round);
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
