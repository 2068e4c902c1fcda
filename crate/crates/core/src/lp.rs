//! A small revised-simplex solver returning vertex (basic) optima.
//!
//! Variables are nonnegative with an optional finite upper bound. The basis is
//! held as a sparse LU factorization with product-form updates, refactored
//! every few dozen pivots.
//!
//! Pricing is Devex. A run of degenerate pivots first triggers a small
//! perturbation of the basic values at zero, removed again at the end of the
//! phase with a few dual simplex pivots; a second run switches to Bland's
//! smallest-index rule until the objective moves. The perturbation is seeded,
//! so identical models give identical solutions.

use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::LpError;

mod lu;

use lu::Factor;

/// Values within this distance of an integer are treated as integral by the
/// rounding pipelines.
pub const INTEGRALITY_TOL: f64 = 1e-7;

/// Relative tolerance for the feasibility re-check of returned solutions.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 40;
const REFRESH_EVERY: usize = 200;
const DEVEX_RESET: f64 = 1e6;
const REFACTOR_EVERY: usize = 64;
/// Perturbations are drawn from `[1, 2) * PERTURBATION`.
const PERTURBATION: f64 = 1e-7;
const PRIMAL_TOL: f64 = 1e-9;

pub fn is_integral(v: f64) -> bool {
    (v - v.round()).abs() <= INTEGRALITY_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min c.x` subject to linear rows, `0 <= x <= u`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpModel {
    cost: Vec<f64>,
    upper: Vec<Option<f64>>,
    rows: Vec<Constraint>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, cost: f64, upper: Option<f64>) -> usize {
        self.cost.push(cost);
        self.upper.push(upper);
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.rows.push(Constraint { coeffs, relation, rhs });
        self.rows.len() - 1
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.cost[var] = cost;
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.cost
    }

    pub fn upper_bounds(&self) -> &[Option<f64>] {
        &self.upper
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if let Some(j) = self.cost.iter().position(|c| !c.is_finite()) {
            return Err(LpError::Malformed(format!("objective coefficient of x{j} is not finite")));
        }
        for (j, u) in self.upper.iter().enumerate() {
            if let Some(u) = u {
                if !u.is_finite() || *u < 0.0 {
                    return Err(LpError::Malformed(format!("upper bound of x{j} is {u}")));
                }
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::Malformed(format!("row {i} has non-finite right-hand side")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(LpError::Malformed(format!("row {i} references undeclared variable x{j}")));
                }
                if !a.is_finite() {
                    return Err(LpError::Malformed(format!("row {i} has a non-finite coefficient on x{j}")));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn row_activity(&self, row: usize, x: &[f64]) -> f64 {
        self.rows[row].coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Largest constraint or bound violation of `x`, each scaled by `1 + |rhs|`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(-v);
            if let Some(u) = self.upper[j] {
                worst = worst.max((v - u) / (1.0 + u.abs()));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            let lhs = self.row_activity(i, x);
            let gap = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(gap / (1.0 + row.rhs.abs()));
        }
        worst
    }

    /// Writes the model in CPLEX LP text format.
    pub fn write_lp<W: Write>(&self, mut w: W) -> io::Result<()> {
        fn term(w: &mut impl Write, first: bool, a: f64, j: usize) -> io::Result<()> {
            let sign = if a < 0.0 { " -" } else if first { "" } else { " +" };
            let mag = a.abs();
            if mag == 1.0 {
                write!(w, "{sign} x{j}")
            } else {
                write!(w, "{sign} {mag} x{j}")
            }
        }
        writeln!(w, "Minimize")?;
        write!(w, " obj:")?;
        let mut first = true;
        for (j, &c) in self.cost.iter().enumerate() {
            if c != 0.0 {
                term(&mut w, first, c, j)?;
                first = false;
            }
        }
        if first {
            write!(w, " 0 x0")?;
        }
        writeln!(w)?;
        writeln!(w, "Subject To")?;
        for (i, row) in self.rows.iter().enumerate() {
            write!(w, " r{i}:")?;
            let mut first = true;
            for &(j, a) in &row.coeffs {
                term(&mut w, first, a, j)?;
                first = false;
            }
            if first {
                write!(w, " 0 x0")?;
            }
            writeln!(w, " {} {}", row.relation, row.rhs)?;
        }
        writeln!(w, "Bounds")?;
        for (j, u) in self.upper.iter().enumerate() {
            match u {
                Some(u) => writeln!(w, " 0 <= x{j} <= {u}")?,
                None => writeln!(w, " x{j} >= 0")?,
            }
        }
        writeln!(w, "End")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Identity of a basic column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BasicVar {
    Structural(usize),
    /// Slack or surplus of a model row.
    Slack(usize),
    /// Slack of the upper-bound row of a variable.
    UpperSlack(usize),
    /// Artificial of a redundant equality, pinned at zero.
    Artificial(usize),
}

#[derive(Debug, Clone)]
pub struct BasicSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub basis: Vec<BasicVar>,
    /// Row prices `y` with reduced costs `c_j - sum_i y_i a_ij >= 0` at the optimum.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

impl BasicSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn without_point(status: LpStatus, n: usize, m: usize, pivots: usize) -> Self {
        BasicSolution { status, values: vec![0.0; n], objective: f64::NAN, basis: Vec::new(), duals: vec![0.0; m], pivots }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural(usize),
    Slack(usize),
    UpperSlack(usize),
    Artificial(usize),
}

struct Tableau {
    m: usize,
    /// CSC storage of all columns.
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    kind: Vec<ColKind>,
    b: Vec<f64>,
    /// Right-hand side perturbation, zero outside a perturbed stretch.
    shift: Vec<f64>,
    rng: ChaCha8Rng,
    factor: Factor,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    x_b: Vec<f64>,
    pivots: usize,
    max_pivots: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.col_start[j], self.col_start[j + 1]);
        self.col_row[s..e].iter().copied().zip(self.col_val[s..e].iter().copied())
    }

    fn ncols(&self) -> usize {
        self.kind.len()
    }

    /// Row `r` of the basis inverse.
    fn binv_row(&self, r: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.m];
        e[r] = 1.0;
        self.factor.btran(&mut e);
        e
    }

    fn prices(&self, cost: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
        self.factor.btran(&mut y);
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[f64], y: &[f64]) -> f64 {
        cost[j] - self.column(j).map(|(i, a)| y[i] * a).sum::<f64>()
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut alpha = vec![0.0; self.m];
        for (k, a) in self.column(j) {
            alpha[k] = a;
        }
        self.factor.ftran(&mut alpha);
        alpha
    }

    fn recompute_xb(&mut self) {
        let mut x: Vec<f64> = self.b.iter().zip(&self.shift).map(|(b, s)| b + s).collect();
        self.factor.ftran(&mut x);
        self.x_b = x;
    }

    /// Lifts every non-artificial basic value near zero by a random amount,
    /// recorded as a right-hand side shift.
    fn perturb(&mut self) {
        for i in 0..self.m {
            let j = self.basis[i];
            if matches!(self.kind[j], ColKind::Artificial(_)) || self.x_b[i] > PERTURBATION {
                continue;
            }
            let delta = PERTURBATION * (1.0 + self.rng.random::<f64>());
            let (s, e) = (self.col_start[j], self.col_start[j + 1]);
            for k in s..e {
                self.shift[self.col_row[k]] += delta * self.col_val[k];
            }
            self.x_b[i] += delta;
        }
    }

    fn is_perturbed(&self) -> bool {
        self.shift.iter().any(|&s| s != 0.0)
    }

    /// Drops the perturbation and restores primal feasibility with dual
    /// simplex pivots, keeping `d` (reduced costs) current.
    fn unperturb(&mut self, d: &mut [f64], allowed: &[bool]) -> Result<(), LpError> {
        self.shift.iter_mut().for_each(|s| *s = 0.0);
        self.recompute_xb();
        loop {
            if self.pivots >= self.max_pivots {
                return Err(LpError::Stalled { pivots: self.pivots });
            }
            let mut leave: Option<usize> = None;
            for i in 0..self.m {
                if self.x_b[i] < -PRIMAL_TOL && leave.is_none_or(|l| self.x_b[i] < self.x_b[l]) {
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                return Ok(());
            };
            let row_r = self.binv_row(r);
            let row: Vec<(usize, f64)> = (0..self.ncols())
                .filter(|&j| !self.in_basis[j] && allowed[j])
                .map(|j| (j, self.column(j).map(|(i, v)| row_r[i] * v).sum::<f64>()))
                .filter(|&(_, a)| a != 0.0)
                .collect();
            // Harris two-pass on the dual ratios d_j / -a_rj.
            let cand = || row.iter().filter(|&&(_, a)| a < -PIVOT_TOL);
            let bound = cand().map(|&(j, a)| (d[j].max(0.0) + OPT_TOL) / -a).fold(f64::INFINITY, f64::min);
            let Some(&(q, aq)) = cand().filter(|&&(j, a)| d[j].max(0.0) / -a <= bound).min_by(|x, y| x.1.total_cmp(&y.1)) else {
                return Err(LpError::Numerical(format!("row {r} stays infeasible after removing the perturbation")));
            };
            let step = d[q] / aq;
            for &(j, a) in &row {
                d[j] -= step * a;
            }
            let leaving = self.basis[r];
            d[leaving] = -step;
            d[q] = 0.0;
            let alpha = self.ftran(q);
            let theta = self.x_b[r] / alpha[r];
            self.pivot(r, q, &alpha, theta)?;
        }
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64], theta: f64) -> Result<(), LpError> {
        let m = self.m;
        for i in 0..m {
            if i != r && alpha[i] != 0.0 {
                self.x_b[i] -= theta * alpha[i];
            }
        }
        self.x_b[r] = theta;
        self.factor.update(r, alpha);

        let leaving = self.basis[r];
        self.in_basis[leaving] = false;
        self.in_basis[q] = true;
        self.basis[r] = q;
        self.pivots += 1;
        if self.factor.num_etas() >= REFACTOR_EVERY {
            self.reinvert()?;
        }
        Ok(())
    }

    /// Refactors the basis from scratch and recomputes basic values.
    fn reinvert(&mut self) -> Result<(), LpError> {
        let columns: Vec<Vec<(usize, f64)>> = self.basis.iter().map(|&j| self.column(j).collect()).collect();
        self.factor = Factor::new(self.m, &columns)?;
        self.recompute_xb();
        Ok(())
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let y = self.prices(cost);
        (0..self.ncols()).map(|j| if self.in_basis[j] { 0.0 } else { self.reduced_cost(j, cost, &y) }).collect()
    }

    fn run_phase(&mut self, cost: &[f64], allowed: &dyn Fn(ColKind) -> bool) -> Result<PhaseOutcome, LpError> {
        let m = self.m;
        let allowed: Vec<bool> = self.kind.iter().map(|&k| allowed(k)).collect();
        let mut d = self.reduced_costs(cost);
        let mut degenerate_run = 0usize;
        let mut since_refresh = 0usize;
        let mut weight = vec![1.0; self.ncols()];
        let mut perturbed_once = false;
        loop {
            if self.pivots >= self.max_pivots {
                return Err(LpError::Stalled { pivots: self.pivots });
            }
            if since_refresh >= REFRESH_EVERY {
                d = self.reduced_costs(cost);
                self.recompute_xb();
                since_refresh = 0;
            }
            if degenerate_run >= DEGENERATE_RUN && !perturbed_once {
                self.perturb();
                perturbed_once = true;
                degenerate_run = 0;
            }
            let bland = degenerate_run >= DEGENERATE_RUN;

            let mut entering: Option<usize> = None;
            let mut best_score = 0.0;
            for j in 0..self.ncols() {
                if self.in_basis[j] || !allowed[j] || d[j] >= -OPT_TOL {
                    continue;
                }
                if bland {
                    entering = Some(j);
                    break;
                }
                let score = d[j] * d[j] / weight[j];
                if entering.is_none() || score > best_score {
                    entering = Some(j);
                    best_score = score;
                }
            }
            let Some(q) = entering else {
                if self.is_perturbed() {
                    self.unperturb(&mut d, &allowed)?;
                    d = self.reduced_costs(cost);
                    since_refresh = 0;
                    continue;
                }
                // Confirm against fresh prices before declaring optimality.
                if since_refresh > 0 {
                    d = self.reduced_costs(cost);
                    self.recompute_xb();
                    since_refresh = 0;
                    continue;
                }
                return Ok(PhaseOutcome::Optimal);
            };

            let alpha = self.ftran(q);
            let Some(r) = self.ratio_test(&alpha, bland) else {
                return Ok(PhaseOutcome::Unbounded);
            };
            // A slightly negative leaving value would step backwards.
            let theta = self.x_b[r].max(0.0) / alpha[r];
            if theta <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            // One pass over the pivot row updates reduced costs and Devex
            // reference weights.
            let row_r = self.binv_row(r);
            let aq = alpha[r];
            let step = d[q] / aq;
            let wq = weight[q];
            let mut max_w = 0.0f64;
            for j in 0..self.ncols() {
                if self.in_basis[j] || j == q {
                    continue;
                }
                let arj: f64 = self.column(j).map(|(i, a)| row_r[i] * a).sum();
                if arj != 0.0 {
                    d[j] -= step * arj;
                    if allowed[j] {
                        let ratio = arj / aq;
                        weight[j] = weight[j].max(ratio * ratio * wq);
                        max_w = max_w.max(weight[j]);
                    }
                }
            }
            let leaving = self.basis[r];
            d[leaving] = -step;
            d[q] = 0.0;
            weight[leaving] = (wq / (aq * aq)).max(1.0);
            if max_w > DEVEX_RESET {
                weight.iter_mut().for_each(|w| *w = 1.0);
            }
            self.pivot(r, q, &alpha, theta)?;
            since_refresh += 1;
            debug_assert_eq!(self.basis.len(), m);
        }
    }

    fn ratio_test(&self, alpha: &[f64], bland: bool) -> Option<usize> {
        // Artificials of redundant rows sit at zero and must leave first.
        for (i, &a) in alpha.iter().enumerate() {
            if matches!(self.kind[self.basis[i]], ColKind::Artificial(_)) && a.abs() > PIVOT_TOL && self.x_b[i].abs() <= 1e-9 {
                return Some(i);
            }
        }
        if bland {
            let mut best: Option<(usize, f64)> = None;
            for (i, &a) in alpha.iter().enumerate() {
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.x_b[i].max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - 1e-12 || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            return best.map(|(i, _)| i);
        }
        // Harris two-pass: bound the step with a small feasibility slack, then
        // take the largest pivot among rows within that bound.
        let mut bound = f64::INFINITY;
        for (i, &a) in alpha.iter().enumerate() {
            if a > PIVOT_TOL {
                bound = bound.min((self.x_b[i].max(0.0) + 1e-9) / a);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut best: Option<usize> = None;
        for (i, &a) in alpha.iter().enumerate() {
            if a > PIVOT_TOL && self.x_b[i].max(0.0) / a <= bound {
                best = match best {
                    Some(bi) if alpha[bi] >= a => Some(bi),
                    _ => Some(i),
                };
            }
        }
        best
    }
}

/// Solves `model` to a basic optimal solution.
pub fn solve_min(model: &LpModel) -> Result<BasicSolution, LpError> {
    model.validate()?;
    let n = model.num_vars();
    let user_rows = model.num_rows();

    // Row list: model rows, then one row per finite upper bound.
    let mut rows: Vec<(Vec<(usize, f64)>, Relation, f64)> = model
        .rows
        .iter()
        .map(|r| {
            let mut coeffs: Vec<(usize, f64)> = r.coeffs.iter().copied().filter(|&(_, a)| a != 0.0).collect();
            coeffs.sort_by_key(|&(j, _)| j);
            // Merge duplicate entries.
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
            for (j, a) in coeffs {
                match merged.last_mut() {
                    Some((lj, la)) if *lj == j => *la += a,
                    _ => merged.push((j, a)),
                }
            }
            (merged, r.relation, r.rhs)
        })
        .collect();
    let mut ub_of_row = vec![None; user_rows];
    for (j, u) in model.upper.iter().enumerate() {
        if let Some(u) = u {
            rows.push((vec![(j, 1.0)], Relation::Le, *u));
            ub_of_row.push(Some(j));
        }
    }
    let m = rows.len();

    // Normalize to nonnegative right-hand sides.
    let mut flipped = vec![false; m];
    for (i, (coeffs, rel, rhs)) in rows.iter_mut().enumerate() {
        if *rhs < 0.0 {
            flipped[i] = true;
            *rhs = -*rhs;
            for c in coeffs.iter_mut() {
                c.1 = -c.1;
            }
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    // Columns: structural, slack/surplus per inequality, artificial per >=/= row.
    let mut per_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, (coeffs, _, _)) in rows.iter().enumerate() {
        for &(j, a) in coeffs {
            per_col[j].push((i, a));
        }
    }
    let mut kind: Vec<ColKind> = (0..n).map(ColKind::Structural).collect();
    let mut basis = vec![usize::MAX; m];
    for (i, (_, rel, _)) in rows.iter().enumerate() {
        let slack_kind = match ub_of_row[i] {
            Some(j) => ColKind::UpperSlack(j),
            None => ColKind::Slack(i),
        };
        match rel {
            Relation::Le => {
                per_col.push(vec![(i, 1.0)]);
                kind.push(slack_kind);
                basis[i] = kind.len() - 1;
            }
            Relation::Ge => {
                per_col.push(vec![(i, -1.0)]);
                kind.push(slack_kind);
            }
            Relation::Eq => {}
        }
    }
    for (i, (_, rel, _)) in rows.iter().enumerate() {
        if *rel != Relation::Le {
            per_col.push(vec![(i, 1.0)]);
            kind.push(ColKind::Artificial(i));
            basis[i] = kind.len() - 1;
        }
    }
    let ncols = kind.len();
    let mut col_start = Vec::with_capacity(ncols + 1);
    let mut col_row = Vec::new();
    let mut col_val = Vec::new();
    col_start.push(0);
    for col in &per_col {
        for &(i, a) in col {
            col_row.push(i);
            col_val.push(a);
        }
        col_start.push(col_row.len());
    }
    let mut in_basis = vec![false; ncols];
    for &j in &basis {
        in_basis[j] = true;
    }
    let b: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let mut tab = Tableau {
        m,
        col_start,
        col_row,
        col_val,
        kind,
        x_b: b.clone(),
        shift: vec![0.0; m],
        rng: ChaCha8Rng::seed_from_u64(0),
        b,
        factor: Factor::identity(m),
        basis,
        in_basis,
        pivots: 0,
        max_pivots: 50_000 + 50 * (m + ncols),
    };

    // Phase 1.
    let has_artificials = tab.kind.iter().any(|k| matches!(k, ColKind::Artificial(_)));
    if has_artificials {
        let cost1: Vec<f64> = tab.kind.iter().map(|k| if matches!(k, ColKind::Artificial(_)) { 1.0 } else { 0.0 }).collect();
        tab.run_phase(&cost1, &|_| true)?;
        tab.recompute_xb();
        let infeas: f64 = tab.basis.iter().zip(&tab.x_b).filter(|(&j, _)| matches!(tab.kind[j], ColKind::Artificial(_))).map(|(_, &v)| v.max(0.0)).sum();
        let scale = 1.0 + tab.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeas > 1e-7 * scale {
            return Ok(BasicSolution::without_point(LpStatus::Infeasible, n, user_rows, tab.pivots));
        }
        // Drive remaining artificials out of the basis where possible.
        for r in 0..m {
            if !matches!(tab.kind[tab.basis[r]], ColKind::Artificial(_)) {
                continue;
            }
            let row = tab.binv_row(r);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..tab.ncols() {
                if tab.in_basis[j] || matches!(tab.kind[j], ColKind::Artificial(_)) {
                    continue;
                }
                let a: f64 = tab.column(j).map(|(i, v)| row[i] * v).sum();
                if a.abs() > 1e-7 && best.is_none_or(|(_, ba)| a.abs() > ba.abs() + 1e-12) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                let alpha = tab.ftran(j);
                let theta = tab.x_b[r] / alpha[r];
                tab.pivot(r, j, &alpha, theta)?;
            }
        }
        tab.recompute_xb();
    }

    // Phase 2.
    let mut cost2 = vec![0.0; tab.ncols()];
    cost2[..n].copy_from_slice(&model.cost);
    let outcome = tab.run_phase(&cost2, &|k| !matches!(k, ColKind::Artificial(_)))?;
    if let PhaseOutcome::Unbounded = outcome {
        return Ok(BasicSolution::without_point(LpStatus::Unbounded, n, user_rows, tab.pivots));
    }

    let mut sol = extract(&tab, model, &cost2, &flipped, user_rows);
    if model.max_violation(&sol.values) > FEASIBILITY_TOL {
        tab.reinvert()?;
        sol = extract(&tab, model, &cost2, &flipped, user_rows);
        if model.max_violation(&sol.values) > FEASIBILITY_TOL {
            return Err(LpError::Numerical(format!("returned point violates constraints by {:.3e}", model.max_violation(&sol.values))));
        }
    }
    Ok(sol)
}

fn extract(tab: &Tableau, model: &LpModel, cost: &[f64], flipped: &[bool], user_rows: usize) -> BasicSolution {
    let n = model.num_vars();
    let mut values = vec![0.0; n];
    let mut basis = Vec::with_capacity(tab.m);
    for (i, &j) in tab.basis.iter().enumerate() {
        let v = tab.x_b[i];
        match tab.kind[j] {
            ColKind::Structural(s) => {
                values[s] = if v.abs() < 1e-11 { 0.0 } else { v };
                basis.push(BasicVar::Structural(s));
            }
            ColKind::Slack(r) => basis.push(BasicVar::Slack(r)),
            ColKind::UpperSlack(s) => basis.push(BasicVar::UpperSlack(s)),
            ColKind::Artificial(r) => basis.push(BasicVar::Artificial(r)),
        }
    }
    basis.sort();
    let y = tab.prices(cost);
    let duals = (0..user_rows).map(|i| if flipped[i] { -y[i] } else { y[i] }).collect();
    BasicSolution { status: LpStatus::Optimal, objective: model.objective_value(&values), values, basis, duals, pivots: tab.pivots }
}
