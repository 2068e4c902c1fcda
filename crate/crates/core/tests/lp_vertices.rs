use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use switchsched::lp::{solve_min, BasicVar, LpModel, LpStatus, Relation};

/// Solves a small dense system by Gaussian elimination; `None` if singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() < 1e-9 {
            return None;
        }
        a.swap(p, c);
        b.swap(p, c);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum over all vertices of the polyhedron, found by enumerating every
/// choice of `n` tight constraints.
fn vertex_oracle(lp: &LpModel) -> Option<f64> {
    let n = lp.num_vars();
    let mut hyper: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in lp.rows() {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coeffs {
            a[j] += v;
        }
        hyper.push((a, row.rhs));
    }
    for j in 0..n {
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        hyper.push((a.clone(), 0.0));
        if let Some(u) = lp.upper_bounds()[j] {
            hyper.push((a, u));
        }
    }
    let k = hyper.len();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let chosen: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let a = chosen.iter().map(|&i| hyper[i].0.clone()).collect();
        let b = chosen.iter().map(|&i| hyper[i].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if lp.max_violation(&x) <= 1e-7 {
                let v = lp.objective_value(&x);
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
    }
    best
}

#[test]
fn random_bounded_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..400 {
        let n = rng.random_range(1..=3);
        let rows = rng.random_range(1..=3);
        let mut lp = LpModel::new();
        for _ in 0..n {
            // Upper bounds keep every instance bounded.
            let c = rng.random_range(-3..=3) as f64;
            lp.add_var(c, Some(rng.random_range(1..=4) as f64));
        }
        for _ in 0..rows {
            let coeffs = (0..n).map(|j| (j, rng.random_range(-2..=2) as f64)).collect();
            let rel = match rng.random_range(0..3) {
                0 => Relation::Le,
                1 => Relation::Ge,
                _ => Relation::Eq,
            };
            lp.add_row(coeffs, rel, rng.random_range(-3..=4) as f64);
        }
        let sol = solve_min(&lp).unwrap();
        match vertex_oracle(&lp) {
            None => assert_eq!(sol.status, LpStatus::Infeasible, "{lp:?}"),
            Some(best) => {
                assert_eq!(sol.status, LpStatus::Optimal, "{lp:?}");
                assert!((sol.objective - best).abs() < 1e-7, "{} vs {best}: {lp:?}", sol.objective);
                assert!(lp.max_violation(&sol.values) <= 1e-9);
                // Nonzero structurals must all be basic.
                for (j, &v) in sol.values.iter().enumerate() {
                    if v.abs() > 1e-9 {
                        assert!(sol.basis.contains(&BasicVar::Structural(j)) || lp.upper_bounds()[j] == Some(v));
                    }
                }
            }
        }
    }
}

#[test]
fn duals_certify_optimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.random_range(2..=5);
        let mut lp = LpModel::new();
        for _ in 0..n {
            lp.add_var(rng.random_range(0..=5) as f64, None);
        }
        for _ in 0..rng.random_range(1..=4) {
            let coeffs = (0..n).map(|j| (j, rng.random_range(0..=2) as f64)).collect();
            lp.add_row(coeffs, Relation::Ge, rng.random_range(1..=5) as f64);
        }
        let sol = solve_min(&lp).unwrap();
        if sol.status != LpStatus::Optimal {
            continue;
        }
        // Weak duality with equality: b.y equals the primal objective.
        let by: f64 = lp.rows().iter().zip(&sol.duals).map(|(r, y)| r.rhs * y).sum();
        assert!((by - sol.objective).abs() < 1e-7);
        for j in 0..n {
            let col: f64 = lp.rows().iter().zip(&sol.duals).map(|(r, y)| y * r.coeffs.iter().filter(|c| c.0 == j).map(|c| c.1).sum::<f64>()).sum();
            assert!(lp.costs()[j] - col >= -1e-7);
        }
        assert!(sol.duals.iter().all(|&y| y >= -1e-9));
    }
}

/// Checks primal feasibility, dual sign conditions, dual feasibility and a
/// zero duality gap for a model without upper bounds.
fn assert_certified(lp: &LpModel) {
    let sol = solve_min(lp).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!(lp.max_violation(&sol.values) < 1e-7);
    for (r, &y) in lp.rows().iter().zip(&sol.duals) {
        match r.relation {
            Relation::Ge => assert!(y >= -1e-7),
            Relation::Le => assert!(y <= 1e-7),
            Relation::Eq => {}
        }
    }
    let mut col = vec![0.0; lp.num_vars()];
    for (r, &y) in lp.rows().iter().zip(&sol.duals) {
        for &(j, a) in &r.coeffs {
            col[j] += y * a;
        }
    }
    for (c, a) in lp.costs().iter().zip(&col) {
        assert!(c - a >= -1e-7);
    }
    let by: f64 = lp.rows().iter().zip(&sol.duals).map(|(r, y)| r.rhs * y).sum();
    assert!((by - sol.objective).abs() <= 1e-6 * (1.0 + sol.objective.abs()));
}

#[test]
fn scheduling_lps_with_many_refactors_are_certified() {
    for seed in 0..4 {
        let inst = switchsched::sim::poisson_workload(&switchsched::sim::WorkloadConfig { m: 6, rate: 6.0, rounds: 10, seed }).unwrap();
        let horizon = switchsched::art::default_horizon(&inst);
        let lp = switchsched::art::build_art_lp(&inst, horizon).unwrap();
        assert!(solve_min(&lp.model).unwrap().pivots > 200);
        assert_certified(&lp.model);
        let rho = switchsched::mrt::serial_max_response(&inst);
        let tcfs = switchsched::mrt::build_tcfs_lp(&switchsched::mrt::with_windows(&inst, rho)).unwrap();
        let mut model = tcfs.model.clone();
        // A nonzero objective makes the certificate meaningful.
        for j in 0..model.num_vars() {
            model.set_cost(j, ((j * 7919) % 13) as f64);
        }
        assert_certified(&model);
    }
}
