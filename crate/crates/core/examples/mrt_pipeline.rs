//! Max response time: window LP search and rounding with an additive
//! capacity overload.

use switchsched::error::Result;
use switchsched::gen::random_instance;
use switchsched::model::{response_from_rounds, validate_rounds, CapacityLimit};
use switchsched::mrt::{load_bound, serial_max_response, solve_mrt};

pub fn run_example() -> Result<()> {
    let inst = random_instance(4, 4, 24, 3, 6, 11)?;
    println!("load bound {}, first-fit {}", load_bound(&inst), serial_max_response(&inst));

    let res = solve_mrt(&inst, true)?;
    println!("rho* = {} (probes {:?})", res.rho_star, res.probes);
    let a = &res.assignment;
    println!("max overload {} with d_max {}", a.max_overload, a.d_max);
    for o in &a.overloads {
        println!("  {} round {} +{}", o.port, o.round, o.excess);
    }

    let budget = (2 * inst.max_demand() as u64).saturating_sub(1);
    let ok = validate_rounds(&inst, &a.rounds, CapacityLimit::bonus(budget)).is_valid();
    println!("valid at c_p + {budget}: {ok}, max response {}", response_from_rounds(&inst, &a.rounds)?.maximum);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
