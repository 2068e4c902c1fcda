//! Encode a small timetable as a max-response instance with target 3.

use switchsched::error::Result;
use switchsched::gen::{rtt_reduce, RttInstance};
use switchsched::mrt::mrt_lower_bound;

pub fn run_example() -> Result<()> {
    let rtt = RttInstance::from_json(r#"{"T": [[1, 2], [2, 3], [1, 3]], "g": [[0, 1], [0, 1], [0, 1]]}"#)?;
    let (inst, target) = rtt_reduce(&rtt)?;
    let sw = inst.switch();
    println!("{} flows on a {}x{} switch, target {target}", inst.len(), sw.m(), sw.m_prime());
    for f in inst.flows() {
        println!("  {:<6} in{} -> out{} released {}", f.id, f.src, f.dst, f.release);
    }
    // The LP relaxation can only bound the target from below.
    println!("window LP bound {}", mrt_lower_bound(&inst, None)?);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
