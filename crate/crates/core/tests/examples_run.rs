//! Every example must run to completion.

#[allow(dead_code)]
#[path = "../examples/a_mrt.rs"]
mod a_mrt;
#[allow(dead_code)]
#[path = "../examples/adversaries.rs"]
mod adversaries;
#[allow(dead_code)]
#[path = "../examples/art_pipeline.rs"]
mod art_pipeline;
#[allow(dead_code)]
#[path = "../examples/lp_vertex.rs"]
mod lp_vertex;
#[allow(dead_code)]
#[path = "../examples/matching_and_coloring.rs"]
mod matching_and_coloring;
#[allow(dead_code)]
#[path = "../examples/mrt_pipeline.rs"]
mod mrt_pipeline;
#[allow(dead_code)]
#[path = "../examples/online_policies.rs"]
mod online_policies;
#[allow(dead_code)]
#[path = "../examples/rtt_gadget.rs"]
mod rtt_gadget;
#[allow(dead_code)]
#[path = "../examples/simulate.rs"]
mod simulate;
#[allow(dead_code)]
#[path = "../examples/validate_schedule.rs"]
mod validate_schedule;

#[test]
fn examples_run() {
    validate_schedule::run_example().unwrap();
    lp_vertex::run_example().unwrap();
    matching_and_coloring::run_example();
    art_pipeline::run_example().unwrap();
    mrt_pipeline::run_example().unwrap();
    online_policies::run_example().unwrap();
    a_mrt::run_example().unwrap();
    adversaries::run_example().unwrap();
    rtt_gadget::run_example().unwrap();
    simulate::run_example().unwrap();
}
