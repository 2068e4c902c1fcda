//! Solve a small LP and inspect the basic solution and its duals.

use switchsched::error::Result;
use switchsched::lp::{solve_min, LpModel, Relation};

pub fn run_example() -> Result<()> {
    // min x + 2y  s.t.  x + y >= 2,  x - y <= 1,  x <= 1.5
    let mut model = LpModel::new();
    let x = model.add_var(1.0, Some(1.5));
    let y = model.add_var(2.0, None);
    model.add_row(vec![(x, 1.0), (y, 1.0)], Relation::Ge, 2.0);
    model.add_row(vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);

    let sol = solve_min(&model)?;
    println!("status {:?} after {} pivots", sol.status, sol.pivots);
    println!("x = {:.3}, y = {:.3}, objective {:.3}", sol.values[x], sol.values[y], sol.objective);
    println!("duals {:?}", sol.duals);
    println!("basis {:?}", sol.basis);

    let mut text = Vec::new();
    model.write_lp(&mut text)?;
    print!("{}", String::from_utf8_lossy(&text));
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
