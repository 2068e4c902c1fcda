//! Average response time: LP bound, iterative rounding and extraction of a
//! capacity-augmented schedule.

use switchsched::art::{default_horizon, iterative_round, pseudo_to_schedule, solve_art_lp};
use switchsched::error::Result;
use switchsched::gen::random_unit_instance;
use switchsched::model::{response_from_rounds, validate_rounds, CapacityLimit};

pub fn run_example() -> Result<()> {
    let inst = random_unit_instance(4, 4, 16, 4, 3)?;
    let bound = solve_art_lp(&inst, None)?;
    println!("{} flows, LP bound {:.2} at horizon {}", inst.len(), bound.objective, bound.horizon);

    let pseudo = iterative_round(&inst, default_horizon(&inst))?;
    println!("pseudo-schedule: {} LP solves, backlog {}, cost {:.2} <= {:.2}", pseudo.iterations(), pseudo.backlog, pseudo.cost, pseudo.lp0_objective);

    for c in [1, 2] {
        let art = pseudo_to_schedule(&inst, &pseudo, c)?;
        let ok = validate_rounds(&inst, &art.rounds, CapacityLimit::scaled(c as u64)).is_valid();
        let report = response_from_rounds(&inst, &art.rounds)?;
        println!("c={c}: window {} colors {} total {} valid {ok}", art.window, art.colors, report.total);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
