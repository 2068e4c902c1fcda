use switchsched::art::{build_lp0, default_horizon, iterative_round};
use switchsched::gen::{random_instance, random_unit_instance};
use switchsched::lp::{is_integral, solve_min};
use switchsched::model::Instance;

fn fixed_cost(inst: &Instance, e: usize, t: u32) -> f64 {
    let f = inst.flow(e);
    (t - f.release) as f64 + 0.5 * f.demand as f64
}

// With unit demands every column has one entry in a flow row, one in an
// input-block row and one in an output-block row. Signing the rows (+ in,
// - out, flows opposite to whichever block side is present) makes every
// column sum 0 or +-1, so the matrix is totally unimodular.
#[test]
fn unit_window_lp_has_integral_vertices() {
    for seed in 0..30 {
        let inst = random_unit_instance(3, 3, 24, 4, seed).unwrap();
        let lp = build_lp0(&inst, default_horizon(&inst)).unwrap();
        let sol = solve_min(&lp.model).unwrap();
        assert!(sol.values.iter().all(|&v| is_integral(v)), "seed {seed}");
        assert_eq!(iterative_round(&inst, default_horizon(&inst)).unwrap().iterations(), 1);
    }
}

#[test]
fn later_passes_never_cost_more() {
    let mut multi = 0;
    for seed in 0..50 {
        let inst = random_instance(3, 3, 20, 3, 4, seed).unwrap();
        let horizon = default_horizon(&inst);
        let p = iterative_round(&inst, horizon).unwrap();
        for (e, &t) in p.rounds.iter().enumerate() {
            assert!(t >= inst.flow(e).release && t < horizon);
        }
        assert!(p.cost <= p.lp0_objective + 1e-6);
        if p.iterations() > 1 {
            multi += 1;
        }
        for w in p.levels.windows(2) {
            let fixed: f64 = w[0].fixed.iter().map(|id| inst.index_of(id).unwrap()).map(|e| fixed_cost(&inst, e, p.rounds[e])).sum();
            assert!(w[1].objective <= w[0].objective - fixed + 1e-6, "seed {seed}");
            let sw = inst.switch();
            for g in &w[1].groups {
                assert!(g.last || g.size >= 4.0 * sw.capacity(g.port) as f64 - 1e-6, "seed {seed}: short group {g:?}");
            }
        }
    }
    assert!(multi > 0);
}
