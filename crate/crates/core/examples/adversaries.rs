//! Adaptive adversaries against the greedy policies.

use switchsched::error::Result;
use switchsched::gen::{gadget_avg_lower, gadget_max_lower, run_adversary};
use switchsched::model::response_from_rounds;
use switchsched::mrt::solve_mrt;
use switchsched::online::Policy;

pub fn run_example() -> Result<()> {
    for p in Policy::ALL {
        let mut adv = gadget_max_lower();
        let run = run_adversary(&mut adv, p)?;
        let online = response_from_rounds(&run.instance, &run.rounds)?.maximum;
        let offline = solve_mrt(&run.instance, false)?.rho_star;
        println!("max gadget, {p}: online {online}, offline {offline}, targets {:?}", adv.targets());
    }
    for p in Policy::ALL {
        let mut adv = gadget_avg_lower(4, 32)?;
        let run = run_adversary(&mut adv, p)?;
        let total = response_from_rounds(&run.instance, &run.rounds)?.total;
        println!("avg gadget, {p}: total {total} over {} flows, target output {:?}", run.instance.len(), adv.target());
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
