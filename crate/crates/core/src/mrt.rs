//! Maximum response time: the time-constrained feasibility LP, additive
//! rounding of its fractional solutions, and binary search over `rho`.

use serde::Serialize;

use crate::error::{Error, LpError, Result};
use crate::lp::{solve_min, LpModel, LpStatus, Relation, INTEGRALITY_TOL};
use crate::model::{first_fit_rounds, port_round_loads, FlowRequest, Instance, PortId};

/// Gives every flow the active window `[r_e, r_e + rho)`.
pub fn with_windows(inst: &Instance, rho: u32) -> Instance {
    let flows: Vec<FlowRequest> = inst.flows().iter().map(|f| f.clone().with_active((f.release..f.release + rho).collect())).collect();
    inst.with_flows(flows).expect("windows start at release")
}

fn active_rounds(f: &FlowRequest) -> Result<Vec<u32>> {
    let mut rounds = f.active.clone().ok_or_else(|| Error::Config(format!("flow {:?} has no active set", f.id)))?;
    rounds.sort_unstable();
    rounds.dedup();
    Ok(rounds)
}

/// Feasibility LP over `x_{e,t}`, `t` in the active set of `e`. Flow rows
/// `sum_t x_et = 1` come first, then one `sum d_e x_et <= c_p` row per used
/// (port, round).
#[derive(Debug, Clone)]
pub struct TcfsLp {
    pub model: LpModel,
    pub vars: Vec<(usize, u32)>,
}

pub fn build_tcfs_lp(inst: &Instance) -> Result<TcfsLp> {
    let mut vars = Vec::new();
    for (e, f) in inst.flows().iter().enumerate() {
        vars.extend(active_rounds(f)?.into_iter().map(|t| (e, t)));
    }
    let mut model = LpModel::new();
    let mut flow_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); inst.len()];
    let mut cap_rows: std::collections::BTreeMap<(usize, u32), Vec<(usize, f64)>> = Default::default();
    let sw = inst.switch();
    for (j, &(e, t)) in vars.iter().enumerate() {
        model.add_var(0.0, None);
        flow_rows[e].push((j, 1.0));
        let f = inst.flow(e);
        for p in f.ports() {
            cap_rows.entry((sw.port_slot(p), t)).or_default().push((j, f.demand as f64));
        }
    }
    for row in flow_rows {
        model.add_row(row, Relation::Eq, 1.0);
    }
    for ((slot, _), row) in cap_rows {
        model.add_row(row, Relation::Le, sw.capacity(sw.port_at_slot(slot)) as f64);
    }
    Ok(TcfsLp { model, vars })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Overload {
    pub port: PortId,
    pub round: u32,
    pub excess: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundedAssignment {
    /// Round of each flow, in instance order.
    pub rounds: Vec<u32>,
    /// Every (port, round) whose load exceeds `c_p`.
    pub overloads: Vec<Overload>,
    pub max_overload: u64,
    pub d_max: u32,
}

impl RoundedAssignment {
    fn from_rounds(inst: &Instance, rounds: Vec<u32>) -> Self {
        let sw = inst.switch();
        let mut overloads = Vec::new();
        for (slot, loads) in port_round_loads(inst, &rounds).into_iter().enumerate() {
            let port = sw.port_at_slot(slot);
            let cap = sw.capacity(port) as u64;
            for (round, load) in loads {
                if load > cap {
                    overloads.push(Overload { port, round, excess: load - cap });
                }
            }
        }
        let max_overload = overloads.iter().map(|o| o.excess).max().unwrap_or(0);
        RoundedAssignment { rounds, overloads, max_overload, d_max: inst.max_demand() }
    }
}

/// Rounds a feasible point of [`build_tcfs_lp`] so that every flow runs in
/// exactly one active round and each (port, round) load is at most
/// `c_p + 2 d_max - 1`.
///
/// Works by iterative relaxation: variables already integral are fixed, and
/// a capacity row is dropped once `U = sum d_j (1 - x_j)` over its free
/// variables falls below `2 d_max`, since its final load can then exceed
/// `c_p` by at most `U`. The remaining system is re-solved for a vertex,
/// whose integral coordinates are fixed in turn. Flow rows are never dropped.
pub fn karp_round(inst: &Instance, frac: &[f64]) -> Result<RoundedAssignment> {
    let lp = build_tcfs_lp(inst)?;
    if frac.len() != lp.vars.len() {
        return Err(Error::InfeasibleInput(format!("expected {} values, got {}", lp.vars.len(), frac.len())));
    }
    let violation = lp.model.max_violation(frac);
    if violation > 1e-7 {
        return Err(Error::InfeasibleInput(format!("constraints violated by {violation:.3e}")));
    }
    let n_flows = inst.len();
    let d_max = inst.max_demand() as f64;
    let cap_rows: Vec<(&[(usize, f64)], f64)> = lp.model.rows()[n_flows..].iter().map(|r| (r.coeffs.as_slice(), r.rhs)).collect();

    let mut x: Vec<f64> = frac.to_vec();
    let mut fixed: Vec<Option<bool>> = x.iter().map(|&v| if v.abs() <= INTEGRALITY_TOL { Some(false) } else if (v - 1.0).abs() <= INTEGRALITY_TOL { Some(true) } else { None }).collect();
    let mut dropped = vec![false; cap_rows.len()];

    loop {
        let free: Vec<usize> = (0..x.len()).filter(|&j| fixed[j].is_none()).collect();
        if free.is_empty() {
            break;
        }
        let mut dropped_now = 0;
        for (i, (coeffs, _)) in cap_rows.iter().enumerate() {
            if dropped[i] {
                continue;
            }
            let slack_need: f64 = coeffs.iter().filter(|(j, _)| fixed[*j].is_none()).map(|&(j, a)| a * (1.0 - x[j])).sum();
            if slack_need < 2.0 * d_max - INTEGRALITY_TOL {
                dropped[i] = true;
                dropped_now += 1;
            }
        }

        let mut col = vec![usize::MAX; x.len()];
        let mut model = LpModel::new();
        for (k, &j) in free.iter().enumerate() {
            col[j] = k;
            model.add_var(0.0, None);
        }
        let mut flow_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_flows];
        for &j in &free {
            flow_rows[lp.vars[j].0].push((col[j], 1.0));
        }
        for row in flow_rows.into_iter().filter(|r| !r.is_empty()) {
            model.add_row(row, Relation::Eq, 1.0);
        }
        for (i, (coeffs, rhs)) in cap_rows.iter().enumerate() {
            if dropped[i] {
                continue;
            }
            let used: f64 = coeffs.iter().filter(|(j, _)| fixed[*j] == Some(true)).map(|&(_, a)| a).sum();
            let row: Vec<(usize, f64)> = coeffs.iter().filter(|(j, _)| fixed[*j].is_none()).map(|&(j, a)| (col[j], a)).collect();
            if !row.is_empty() {
                model.add_row(row, Relation::Le, rhs - used);
            }
        }
        let sol = solve_min(&model)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::RoundingStalled("relaxed system became infeasible".into()));
        }
        let mut fixed_now = 0;
        for (k, &j) in free.iter().enumerate() {
            let v = sol.values[k];
            x[j] = v;
            if v.abs() <= INTEGRALITY_TOL {
                fixed[j] = Some(false);
                fixed_now += 1;
            } else if (v - 1.0).abs() <= INTEGRALITY_TOL {
                fixed[j] = Some(true);
                fixed_now += 1;
            }
        }
        if fixed_now == 0 && dropped_now == 0 {
            return Err(Error::RoundingStalled(format!("{} fractional variables left at a vertex", free.len())));
        }
    }

    let mut rounds = vec![u32::MAX; n_flows];
    for (j, &(e, t)) in lp.vars.iter().enumerate() {
        if fixed[j] == Some(true) {
            if rounds[e] != u32::MAX {
                return Err(Error::RoundingStalled(format!("flow {:?} assigned twice", inst.flow(e).id)));
            }
            rounds[e] = t;
        }
    }
    if let Some(e) = rounds.iter().position(|&t| t == u32::MAX) {
        return Err(Error::RoundingStalled(format!("flow {:?} left unassigned", inst.flow(e).id)));
    }
    Ok(RoundedAssignment::from_rounds(inst, rounds))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TcfsOutcome {
    pub feasible: bool,
    pub assignment: Option<RoundedAssignment>,
}

fn tcfs_point(inst: &Instance) -> Result<Option<Vec<f64>>> {
    let lp = build_tcfs_lp(inst)?;
    let sol = solve_min(&lp.model)?;
    Ok((sol.status == LpStatus::Optimal).then_some(sol.values))
}

/// Infeasibility of the LP certifies that no exact schedule exists; otherwise
/// the rounded LP point is returned.
pub fn solve_tcfs(inst: &Instance) -> Result<TcfsOutcome> {
    match tcfs_point(inst)? {
        None => Ok(TcfsOutcome { feasible: false, assignment: None }),
        Some(x) => Ok(TcfsOutcome { feasible: true, assignment: Some(karp_round(inst, &x)?) }),
    }
}

/// Largest response of the first-fit schedule, which is always attainable.
pub fn serial_max_response(inst: &Instance) -> u32 {
    first_fit_rounds(inst).iter().zip(inst.flows()).map(|(&t, f)| t + 1 - f.release).max().unwrap_or(1)
}

fn window_feasible(inst: &Instance, rho: u32) -> Result<bool> {
    Ok(tcfs_point(&with_windows(inst, rho))?.is_some())
}

/// Least `rho` allowed by port volume alone: flows at `p` released in
/// `[a, b]` must fit into the `b - a + rho` rounds from `a`.
pub fn load_bound(inst: &Instance) -> u32 {
    let sw = inst.switch();
    let mut best = 0i64;
    for slot in 0..sw.num_ports() {
        let cap = sw.capacity(sw.port_at_slot(slot)) as i64;
        let mut by_release: Vec<(u32, i64)> = inst.flows_at_slot(slot).iter().map(|&e| (inst.flow(e).release, inst.flow(e).demand as i64)).collect();
        by_release.sort_unstable();
        for i in 0..by_release.len() {
            let a = by_release[i].0 as i64;
            let mut volume = 0i64;
            for &(r, d) in &by_release[i..] {
                volume += d;
                best = best.max((volume + cap - 1) / cap - (r as i64 - a));
            }
        }
    }
    best.max(0) as u32
}

/// Binary search for the least `rho >= 1` whose window LP is feasible,
/// between [`load_bound`] and `min(serial bound, hint)`. `hint` must be the
/// max response of some valid schedule. Returns `rho` and the probes made.
fn search_rho(inst: &Instance, hint: Option<u32>) -> Result<(u32, Vec<(u32, bool)>)> {
    let mut hi = serial_max_response(inst);
    if let Some(h) = hint {
        hi = hi.min(h.max(1));
    }
    let mut lo = load_bound(inst).clamp(1, hi);
    let mut probes = Vec::new();
    // The load bound is usually tight, so try it before bisecting.
    let mut first = true;
    while lo < hi {
        let mid = if first { lo } else { lo + (hi - lo) / 2 };
        first = false;
        let ok = window_feasible(inst, mid)?;
        probes.push((mid, ok));
        if ok {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    probes.sort_unstable();
    if probes.windows(2).any(|w| w[0].1 && !w[1].1) {
        return Err(LpError::Numerical("window feasibility is not monotone in rho".into()).into());
    }
    Ok((lo, probes))
}

/// Least `rho` with a feasible window LP: a lower bound on the optimal max
/// response time.
pub fn mrt_lower_bound(inst: &Instance, hint: Option<u32>) -> Result<u32> {
    Ok(search_rho(inst, hint)?.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct MrtResult {
    pub rho_star: u32,
    pub assignment: RoundedAssignment,
    /// `(rho, feasible)` for every probe of the search, sorted by `rho`.
    pub probes: Vec<(u32, bool)>,
}

/// Searches `rho` and rounds the LP point at the optimum. With
/// `augment_check` the result is also checked against the `2 d_max - 1`
/// overload budget.
pub fn solve_mrt(inst: &Instance, augment_check: bool) -> Result<MrtResult> {
    let (rho_star, probes) = search_rho(inst, None)?;
    let windows = with_windows(inst, rho_star);
    let x = tcfs_point(&windows)?.ok_or_else(|| Error::Validation(format!("window LP infeasible at rho {rho_star}")))?;
    let assignment = karp_round(&windows, &x)?;
    if augment_check {
        let budget = (2 * inst.max_demand() as u64).saturating_sub(1);
        if assignment.max_overload > budget {
            return Err(Error::Validation(format!("overload {} exceeds {budget}", assignment.max_overload)));
        }
    }
    Ok(MrtResult { rho_star, assignment, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SwitchSpec;

    fn unit_switch(m: usize) -> SwitchSpec {
        SwitchSpec::uniform(m, m, 1).unwrap()
    }

    #[test]
    fn single_flow() {
        let inst = Instance::new(unit_switch(1), vec![FlowRequest::unit("a", 0, 0, 0).with_active(vec![0])]).unwrap();
        let out = solve_tcfs(&inst).unwrap();
        assert!(out.feasible);
        assert_eq!(out.assignment.unwrap().rounds, vec![0]);
        let plain = Instance::new(unit_switch(1), vec![FlowRequest::unit("a", 0, 0, 5)]).unwrap();
        assert_eq!(solve_mrt(&plain, true).unwrap().rho_star, 1);
    }

    #[test]
    fn three_flows_into_one_output_over_two_rounds() {
        let sw = SwitchSpec::uniform(3, 1, 1).unwrap();
        let flows = (0..3).map(|k| FlowRequest::unit(format!("f{k}"), k, 0, 0).with_active(vec![0, 1])).collect();
        let inst = Instance::new(sw, flows).unwrap();
        assert_eq!(solve_tcfs(&inst).unwrap(), TcfsOutcome { feasible: false, assignment: None });
    }

    #[test]
    fn half_half_point_rounds_within_one() {
        let flows = vec![FlowRequest::unit("a", 0, 0, 0).with_active(vec![0, 1]), FlowRequest::unit("b", 0, 0, 0).with_active(vec![0, 1])];
        let inst = Instance::new(unit_switch(1), flows).unwrap();
        let r = karp_round(&inst, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(r.max_overload <= 1);
        assert!(r.rounds.iter().all(|&t| t <= 1));
    }

    #[test]
    fn integral_input_is_unchanged() {
        let flows = vec![FlowRequest::unit("a", 0, 0, 0).with_active(vec![0, 1]), FlowRequest::unit("b", 0, 0, 0).with_active(vec![0, 1])];
        let inst = Instance::new(unit_switch(1), flows).unwrap();
        assert_eq!(karp_round(&inst, &[0.0, 1.0, 1.0, 0.0]).unwrap().rounds, vec![1, 0]);
    }

    #[test]
    fn infeasible_input_is_rejected() {
        let inst = Instance::new(unit_switch(1), vec![FlowRequest::unit("a", 0, 0, 0).with_active(vec![0, 1])]).unwrap();
        assert!(matches!(karp_round(&inst, &[0.3, 0.3]), Err(Error::InfeasibleInput(_))));
    }

    #[test]
    fn missing_active_set_is_a_config_error() {
        let inst = Instance::new(unit_switch(1), vec![FlowRequest::unit("a", 0, 0, 0)]).unwrap();
        assert!(matches!(build_tcfs_lp(&inst), Err(Error::Config(_))));
    }
}
