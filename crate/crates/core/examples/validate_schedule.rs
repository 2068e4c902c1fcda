//! Build an instance by hand, check a schedule against it and report
//! response times.

use switchsched::error::Result;
use switchsched::model::{response_metrics, validate_schedule, FlowRequest, Instance, IntegralSchedule, SwitchSpec};

pub fn run_example() -> Result<()> {
    let switch = SwitchSpec::new(vec![2, 1], vec![1, 2])?;
    let flows = vec![
        FlowRequest::new("a", 0, 0, 1, 0),
        FlowRequest::new("b", 0, 1, 1, 0),
        FlowRequest::new("c", 1, 1, 1, 1),
    ];
    let inst = Instance::new(switch, flows)?;

    let mut sched = IntegralSchedule::new();
    sched.assign("a", 0);
    sched.assign("b", 0);
    sched.assign("c", 1);
    let verdict = validate_schedule(&inst, &sched, 0)?;
    println!("valid: {}", verdict.is_valid());
    let report = response_metrics(&inst, &sched)?;
    println!("total {} average {:.2} max {}", report.total, report.average, report.maximum);

    // Moving `c` before its release is rejected.
    sched.assign("c", 0);
    for v in &validate_schedule(&inst, &sched, 0)?.violations {
        println!("violation: {v}");
    }
    println!("{}", IntegralSchedule::from_rounds(&inst, &[0, 0, 1]).to_json());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
