//! Average response time: time-indexed LP lower bound, iterative rounding to
//! a pseudo-schedule, and extraction of a capacity-augmented schedule.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve_min, LpModel, LpStatus, Relation, INTEGRALITY_TOL};
use crate::matching::{edge_color_bipartite, expand_to_unit_graph, BipartiteMultigraph};
use crate::model::{first_fit_rounds, Instance, IntegralSchedule, PortId};

/// Serial completion bound: `max r_e + sum ceil(d_e / kappa_e)`.
pub fn default_horizon(inst: &Instance) -> u32 {
    let serial: u32 = (0..inst.len()).map(|i| inst.flow(i).demand.div_ceil(inst.kappa(i))).sum();
    inst.max_release().unwrap_or(0) + serial.max(1)
}

fn check_horizon(inst: &Instance, horizon: u32) -> Result<()> {
    match inst.max_release() {
        Some(r) if horizon <= r => Err(Error::HorizonTooSmall { horizon, max_release: r }),
        _ => Ok(()),
    }
}

/// Per-(flow, round) fractional amounts; `entries` holds `(flow index, round, value)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FractionalAssignment {
    pub horizon: u32,
    pub entries: Vec<(usize, u32, f64)>,
}

impl FractionalAssignment {
    pub fn flow_total(&self, flow: usize) -> f64 {
        self.entries.iter().filter(|e| e.0 == flow).map(|e| e.2).sum()
    }

    fn from_values(horizon: u32, vars: &[(usize, u32)], values: &[f64]) -> Self {
        let entries = vars.iter().zip(values).filter(|(_, &v)| v > 0.0).map(|(&(e, t), &v)| (e, t, v)).collect();
        FractionalAssignment { horizon, entries }
    }
}

/// A time-indexed LP together with the `(flow, round)` of each column.
/// Flow rows come first, one per flow in instance order.
#[derive(Debug, Clone)]
pub struct TimeIndexedLp {
    pub model: LpModel,
    pub vars: Vec<(usize, u32)>,
    pub horizon: u32,
}

fn flow_vars(inst: &Instance, horizon: u32) -> Vec<(usize, u32)> {
    let mut vars = Vec::new();
    for (e, f) in inst.flows().iter().enumerate() {
        vars.extend((f.release..horizon).map(|t| (e, t)));
    }
    vars
}

fn art_cost(inst: &Instance, e: usize, t: u32) -> f64 {
    let f = inst.flow(e);
    (t - f.release) as f64 / f.demand as f64 + 1.0 / (2.0 * inst.kappa(e) as f64)
}

fn lp0_cost(inst: &Instance, e: usize, t: u32) -> f64 {
    let f = inst.flow(e);
    (t - f.release) as f64 / f.demand as f64 + 0.5
}

fn add_flow_rows(model: &mut LpModel, inst: &Instance, vars: &[(usize, u32)], flows: &[usize]) {
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); inst.len()];
    for (j, &(e, _)) in vars.iter().enumerate() {
        cols[e].push((j, 1.0));
    }
    for &e in flows {
        model.add_row(std::mem::take(&mut cols[e]), Relation::Ge, inst.flow(e).demand as f64);
    }
}

/// Per-round port capacity LP: `sum_t b_et >= d_e`, `sum_{e at p} b_et <= c_p`.
pub fn build_art_lp(inst: &Instance, horizon: u32) -> Result<TimeIndexedLp> {
    check_horizon(inst, horizon)?;
    let vars = flow_vars(inst, horizon);
    let mut model = LpModel::new();
    for &(e, t) in &vars {
        model.add_var(art_cost(inst, e, t), None);
    }
    let all: Vec<usize> = (0..inst.len()).collect();
    add_flow_rows(&mut model, inst, &vars, &all);
    let sw = inst.switch();
    let h = horizon as usize;
    let mut cap_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); sw.num_ports() * h];
    for (j, &(e, t)) in vars.iter().enumerate() {
        for p in inst.flow(e).ports() {
            cap_rows[sw.port_slot(p) * h + t as usize].push((j, 1.0));
        }
    }
    for (k, row) in cap_rows.into_iter().enumerate() {
        if !row.is_empty() {
            let cap = sw.capacity(sw.port_at_slot(k / h));
            model.add_row(row, Relation::Le, cap as f64);
        }
    }
    Ok(TimeIndexedLp { model, vars, horizon })
}

/// The window relaxation: capacity aggregated over blocks `[4a, 4a + 4)`
/// with right side `4 c_p`, and the flat `1/2` term in the objective.
pub fn build_lp0(inst: &Instance, horizon: u32) -> Result<TimeIndexedLp> {
    check_horizon(inst, horizon)?;
    let vars = flow_vars(inst, horizon);
    let mut model = LpModel::new();
    for &(e, t) in &vars {
        model.add_var(lp0_cost(inst, e, t), None);
    }
    let all: Vec<usize> = (0..inst.len()).collect();
    add_flow_rows(&mut model, inst, &vars, &all);
    let sw = inst.switch();
    let blocks = horizon.div_ceil(4) as usize;
    let mut cap_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); sw.num_ports() * blocks];
    for (j, &(e, t)) in vars.iter().enumerate() {
        for p in inst.flow(e).ports() {
            cap_rows[sw.port_slot(p) * blocks + t as usize / 4].push((j, 1.0));
        }
    }
    for (k, row) in cap_rows.into_iter().enumerate() {
        if !row.is_empty() {
            let cap = sw.capacity(sw.port_at_slot(k / blocks));
            model.add_row(row, Relation::Le, 4.0 * cap as f64);
        }
    }
    Ok(TimeIndexedLp { model, vars, horizon })
}

#[derive(Debug, Clone)]
pub struct ArtBound {
    pub objective: f64,
    /// Horizon of the LP that was actually solved.
    pub horizon: u32,
    pub assignment: FractionalAssignment,
}

/// Solves the per-round LP at `horizon`, or, when `None`, at the default
/// horizon.
///
/// Without an explicit horizon the LP is first solved on a short horizon
/// taken from a first-fit schedule. That optimum extends to the default
/// horizon whenever no later column has negative reduced cost, which only
/// needs `y_e <= (H - r_e)/d_e + 1/(2 kappa_e)` for each flow price `y_e`;
/// otherwise the horizon is doubled and the LP re-solved.
pub fn solve_art_lp(inst: &Instance, horizon: Option<u32>) -> Result<ArtBound> {
    if let Some(h) = horizon {
        let lp = build_art_lp(inst, h)?;
        let sol = solve_min(&lp.model)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::HorizonInfeasible { horizon: h });
        }
        let assignment = FractionalAssignment::from_values(h, &lp.vars, &sol.values);
        return Ok(ArtBound { objective: sol.objective, horizon: h, assignment });
    }
    if inst.is_empty() {
        return Ok(ArtBound { objective: 0.0, horizon: 1, assignment: FractionalAssignment { horizon: 1, entries: Vec::new() } });
    }
    let full = default_horizon(inst);
    let makespan = first_fit_rounds(inst).into_iter().max().unwrap_or(0) + 1;
    let mut h = makespan.max(inst.max_release().unwrap_or(0) + 1).min(full);
    loop {
        let lp = build_art_lp(inst, h)?;
        let sol = solve_min(&lp.model)?;
        if sol.status == LpStatus::Optimal {
            let certified = h == full
                || (0..inst.len()).all(|e| {
                    let f = inst.flow(e);
                    let next = (h - f.release) as f64 / f.demand as f64 + 1.0 / (2.0 * inst.kappa(e) as f64);
                    sol.duals[e] <= next + 1e-9
                });
            if certified {
                let assignment = FractionalAssignment::from_values(h, &lp.vars, &sol.values);
                return Ok(ArtBound { objective: sol.objective, horizon: h, assignment });
            }
        } else if h == full {
            return Err(Error::HorizonInfeasible { horizon: h });
        }
        h = (2 * h).min(full);
    }
}

/// Optimum of the per-round LP: a lower bound on the total response time of
/// every valid schedule.
pub fn art_lower_bound(inst: &Instance) -> Result<f64> {
    Ok(solve_art_lp(inst, None)?.objective)
}

/// One capacity group of a rounding iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupInfo {
    pub port: PortId,
    pub size: f64,
    pub variables: usize,
    /// Last group of its port; the only one allowed below `4 c_p`.
    pub last: bool,
}

/// Record of one LP solve in the rounding loop.
#[derive(Debug, Clone, Serialize)]
pub struct RoundingLevel {
    pub iteration: usize,
    /// Flows still fractional when this LP was built.
    pub active_flows: usize,
    /// Flows this LP's optimum assigned integrally.
    pub fixed: Vec<String>,
    pub tight_rows: usize,
    pub objective: f64,
    #[serde(skip)]
    pub groups: Vec<GroupInfo>,
    /// Full optimum of this LP as `(flow index, round, value)`.
    #[serde(skip)]
    pub values: Vec<(usize, u32, f64)>,
}

#[derive(Debug, Clone)]
pub struct PseudoSchedule {
    /// Round of each flow, in instance order.
    pub rounds: Vec<u32>,
    /// Largest interval overload over all ports: `max sum_{t1..=t2} (load_t - c_p)`, at least 0.
    pub backlog: u64,
    /// Window-LP objective evaluated at the integral assignment.
    pub cost: f64,
    pub lp0_objective: f64,
    pub horizon: u32,
    pub levels: Vec<RoundingLevel>,
}

impl PseudoSchedule {
    pub fn iterations(&self) -> usize {
        self.levels.len()
    }

    pub fn to_schedule(&self, inst: &Instance) -> IntegralSchedule {
        IntegralSchedule::from_rounds(inst, &self.rounds)
    }
}

/// Maximum over ports and round intervals of assigned volume minus
/// `c_p` times the interval length, clamped at zero.
pub fn measure_backlog(inst: &Instance, rounds: &[u32]) -> u64 {
    let sw = inst.switch();
    let Some(&last) = rounds.iter().max() else {
        return 0;
    };
    let mut load = vec![0i64; (last as usize + 1) * sw.num_ports()];
    let width = last as usize + 1;
    for (f, &t) in inst.flows().iter().zip(rounds) {
        for p in f.ports() {
            load[sw.port_slot(p) * width + t as usize] += f.demand as i64;
        }
    }
    let mut best = 0i64;
    for slot in 0..sw.num_ports() {
        let cap = sw.capacity(sw.port_at_slot(slot)) as i64;
        let mut run = 0i64;
        for t in 0..width {
            run = (run.max(0)) + load[slot * width + t] - cap;
            best = best.max(run);
        }
    }
    best as u64
}

fn close_to(a: f64, b: f64) -> bool {
    (a - b).abs() <= INTEGRALITY_TOL
}

/// Iterative rounding of the window LP into a pseudo-schedule.
///
/// Each pass solves the current LP, assigns every flow whose variables are
/// all `0` or `d_e`, keeps only the support of the rest and regroups each
/// port's surviving variables, in `(round, flow id)` order, into groups
/// closed once their previous-solution mass reaches `4 c_p`. The next LP
/// bounds each group by its previous mass.
pub fn iterative_round(inst: &Instance, horizon: u32) -> Result<PseudoSchedule> {
    let lp0 = build_lp0(inst, horizon)?;
    let sw = inst.switch();
    let mut rounds: Vec<Option<u32>> = vec![None; inst.len()];
    let mut active: Vec<usize> = (0..inst.len()).collect();
    let mut model = lp0.model;
    let mut vars = lp0.vars;
    let mut groups: Vec<GroupInfo> = Vec::new();
    let mut levels = Vec::new();
    let mut lp0_objective = 0.0;

    while !active.is_empty() {
        let sol = solve_min(&model)?;
        match sol.status {
            LpStatus::Optimal => {}
            _ if levels.is_empty() => return Err(Error::HorizonInfeasible { horizon }),
            _ => return Err(Error::RoundingStalled(format!("iteration {} LP is not solvable", levels.len()))),
        }
        let support = sol.values.iter().filter(|v| v.abs() > INTEGRALITY_TOL).count();
        if support > model.num_rows() {
            return Err(Error::NonVertex(format!("{support} nonzero variables but {} rows", model.num_rows())));
        }
        if levels.is_empty() {
            lp0_objective = sol.objective;
        }
        let tight_rows = (active.len()..model.num_rows())
            .filter(|&i| model.rows()[i].rhs - model.row_activity(i, &sol.values) <= 1e-7 * (1.0 + model.rows()[i].rhs))
            .count();

        let mut per_flow: Vec<Vec<(u32, f64, usize)>> = vec![Vec::new(); inst.len()];
        for (j, (&(e, t), &v)) in vars.iter().zip(&sol.values).enumerate() {
            per_flow[e].push((t, v, j));
        }
        let mut fixed = Vec::new();
        let mut still = Vec::new();
        for &e in &active {
            let d = inst.flow(e).demand as f64;
            let integral = per_flow[e].iter().all(|&(_, v, _)| close_to(v, 0.0) || close_to(v, d));
            let hit = per_flow[e].iter().find(|&&(_, v, _)| close_to(v, d));
            match (integral, hit) {
                (true, Some(&(t, _, _))) => {
                    rounds[e] = Some(t);
                    fixed.push(e);
                }
                _ => still.push(e),
            }
        }
        levels.push(RoundingLevel {
            iteration: levels.len(),
            active_flows: active.len(),
            fixed: fixed.iter().map(|&e| inst.flow(e).id.clone()).collect(),
            tight_rows,
            objective: sol.objective,
            groups: std::mem::take(&mut groups),
            values: vars.iter().zip(&sol.values).filter(|(_, &v)| v > 0.0).map(|(&(e, t), &v)| (e, t, v)).collect(),
        });
        if still.is_empty() {
            break;
        }
        if fixed.is_empty() {
            return Err(Error::RoundingStalled(format!("iteration {} fixed no flow among {}", levels.len() - 1, still.len())));
        }

        // Next LP over the fractional support of the surviving flows.
        let mut next_vars = Vec::new();
        let mut prev = Vec::new();
        for &e in &still {
            for &(t, v, _) in &per_flow[e] {
                if v > INTEGRALITY_TOL {
                    next_vars.push((e, t));
                    prev.push(v);
                }
            }
        }
        let mut next = LpModel::new();
        for &(e, t) in &next_vars {
            next.add_var(lp0_cost(inst, e, t), None);
        }
        add_flow_rows(&mut next, inst, &next_vars, &still);
        let mut at_port: Vec<Vec<usize>> = vec![Vec::new(); sw.num_ports()];
        for (j, &(e, _)) in next_vars.iter().enumerate() {
            for p in inst.flow(e).ports() {
                at_port[sw.port_slot(p)].push(j);
            }
        }
        for (slot, mut cols) in at_port.into_iter().enumerate() {
            if cols.is_empty() {
                continue;
            }
            let port = sw.port_at_slot(slot);
            let cap = sw.capacity(port) as f64;
            cols.sort_by(|&a, &b| {
                let (ea, ta) = next_vars[a];
                let (eb, tb) = next_vars[b];
                ta.cmp(&tb).then_with(|| inst.flow(ea).id.cmp(&inst.flow(eb).id))
            });
            let mut start = 0;
            let mut mass = 0.0;
            let mut port_groups = Vec::new();
            for (k, &j) in cols.iter().enumerate() {
                mass += prev[j];
                if mass >= 4.0 * cap - INTEGRALITY_TOL || k + 1 == cols.len() {
                    port_groups.push((cols[start..=k].to_vec(), mass));
                    start = k + 1;
                    mass = 0.0;
                }
            }
            let count = port_groups.len();
            for (g, (members, size)) in port_groups.into_iter().enumerate() {
                groups.push(GroupInfo { port, size, variables: members.len(), last: g + 1 == count });
                next.add_row(members.into_iter().map(|j| (j, 1.0)).collect(), Relation::Le, size);
            }
        }
        model = next;
        vars = next_vars;
        active = still;
    }

    let rounds: Vec<u32> = rounds.into_iter().map(|r| r.expect("every flow assigned")).collect();
    let cost = inst.flows().iter().zip(&rounds).map(|(f, &t)| (t - f.release) as f64 + 0.5 * f.demand as f64).sum();
    Ok(PseudoSchedule { backlog: measure_backlog(inst, &rounds), rounds, cost, lp0_objective, horizon, levels })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArtResult {
    pub lp_lower_bound: f64,
    #[serde(skip)]
    pub pseudo: PseudoSchedule,
    #[serde(skip)]
    pub schedule: IntegralSchedule,
    pub rounds: Vec<u32>,
    pub augment: u32,
    pub window: u32,
    /// Largest number of matchings any window needed.
    pub colors: usize,
    pub backlog: u64,
}

/// Turns a pseudo-schedule of unit flows into a schedule valid at capacity
/// `(1 + c) c_p`.
///
/// Rounds are cut into windows of `h = max(1, ceil(B / c))`. The flows of
/// each window form a bipartite multigraph; after splitting every port into
/// `c_p` copies its edges are colored into matchings, which run during the
/// following window, `1 + c` matchings per round.
pub fn pseudo_to_schedule(inst: &Instance, pseudo: &PseudoSchedule, c: u32) -> Result<ArtResult> {
    if c == 0 {
        return Err(Error::Config("augmentation c must be at least 1".into()));
    }
    if let Some(f) = inst.flows().iter().find(|f| f.demand != 1) {
        return Err(Error::NonUnitDemand(f.id.clone()));
    }
    let lp_lower_bound = art_lower_bound(inst)?;
    let sw = inst.switch();
    let backlog = pseudo.backlog;
    let h = backlog.div_ceil(c as u64).max(1) as u32;
    let per_round = c as usize + 1;

    let mut by_window: std::collections::BTreeMap<u32, Vec<usize>> = std::collections::BTreeMap::new();
    for (e, &t) in pseudo.rounds.iter().enumerate() {
        by_window.entry(t / h).or_default().push(e);
    }
    let mut rounds = vec![0u32; inst.len()];
    let mut colors = 0;
    for (j, flows) in by_window {
        let mut g = BipartiteMultigraph::new(sw.m(), sw.m_prime());
        for &e in &flows {
            let f = inst.flow(e);
            g.add_edge(f.src, f.dst, e);
        }
        let unit = expand_to_unit_graph(&g, sw.input_capacities(), sw.output_capacities());
        let classes = edge_color_bipartite(&unit.graph);
        if classes.len() > per_round * h as usize {
            return Err(Error::PackingOverflow { backlog, window: h, colors: classes.len(), augment: c });
        }
        colors = colors.max(classes.len());
        let start = (j + 1) * h;
        for (k, class) in classes.iter().enumerate() {
            for &edge in class {
                rounds[unit.graph.edge(edge).id] = start + (k / per_round) as u32;
            }
        }
    }
    Ok(ArtResult {
        lp_lower_bound,
        pseudo: pseudo.clone(),
        schedule: IntegralSchedule::from_rounds(inst, &rounds),
        rounds,
        augment: c,
        window: h,
        colors,
        backlog,
    })
}

/// Full pipeline at the default horizon.
pub fn solve_art(inst: &Instance, c: u32) -> Result<ArtResult> {
    let pseudo = iterative_round(inst, default_horizon(inst))?;
    pseudo_to_schedule(inst, &pseudo, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_rounds, CapacityLimit, FlowRequest, SwitchSpec};

    fn inst(m: usize, flows: Vec<FlowRequest>) -> Instance {
        Instance::new(SwitchSpec::uniform(m, m, 1).unwrap(), flows).unwrap()
    }

    #[test]
    fn single_flow_bounds() {
        let i = inst(1, vec![FlowRequest::unit("a", 0, 0, 0)]);
        assert!((art_lower_bound(&i).unwrap() - 0.5).abs() < 1e-9);
        let lp0 = build_lp0(&i, 1).unwrap();
        assert!((solve_min(&lp0.model).unwrap().objective - 0.5).abs() < 1e-9);
        let p = iterative_round(&i, 1).unwrap();
        assert_eq!((p.rounds.clone(), p.iterations()), (vec![0], 1));
    }

    #[test]
    fn empty_instance_costs_nothing() {
        let i = inst(1, vec![]);
        assert_eq!(art_lower_bound(&i).unwrap(), 0.0);
        let r = solve_art(&i, 1).unwrap();
        assert!(r.rounds.is_empty());
        assert_eq!(r.lp_lower_bound, 0.0);
    }

    #[test]
    fn two_flows_on_one_pair() {
        let i = inst(1, vec![FlowRequest::unit("a", 0, 0, 0), FlowRequest::unit("b", 0, 0, 0)]);
        assert!((art_lower_bound(&i).unwrap() - 2.0).abs() < 1e-9);
        let lp0 = solve_min(&build_lp0(&i, 2).unwrap().model).unwrap();
        assert!(lp0.objective <= 2.0 + 1e-9);
    }

    #[test]
    fn disjoint_flows_bound_is_half_each() {
        let flows = (0..4).map(|k| FlowRequest::unit(format!("f{k}"), k, k, 0)).collect();
        assert!((art_lower_bound(&inst(4, flows)).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn horizon_must_exceed_releases() {
        let i = inst(1, vec![FlowRequest::unit("a", 0, 0, 3)]);
        assert!(matches!(build_art_lp(&i, 3), Err(Error::HorizonTooSmall { .. })));
        assert!(solve_art_lp(&i, Some(4)).is_ok());
    }

    #[test]
    fn certified_bound_equals_full_horizon_bound() {
        let flows = (0..6).map(|k| FlowRequest::unit(format!("f{k}"), k % 2, (k / 2) % 2, (k % 3) as u32)).collect();
        let i = inst(2, flows);
        let short = solve_art_lp(&i, None).unwrap();
        let full = solve_art_lp(&i, Some(default_horizon(&i))).unwrap();
        assert!((short.objective - full.objective).abs() < 1e-7);
    }

    #[test]
    fn backlog_scan() {
        let i = inst(1, (0..4).map(|k| FlowRequest::unit(format!("f{k}"), 0, 0, 0)).collect());
        assert_eq!(measure_backlog(&i, &[0, 0, 0, 0]), 3);
        assert_eq!(measure_backlog(&i, &[0, 1, 2, 3]), 0);
        assert_eq!(measure_backlog(&i, &[0, 0, 2, 2]), 1);
        assert_eq!(measure_backlog(&i, &[0, 0, 1, 1]), 2);
    }

    #[test]
    fn overloaded_pseudo_schedule_is_packed() {
        // Four unit flows on one unit pair, all in round 0: B = 3.
        let i = inst(1, (0..4).map(|k| FlowRequest::unit(format!("f{k}"), 0, 0, 0)).collect());
        let pseudo = PseudoSchedule { rounds: vec![0; 4], backlog: 3, cost: 2.0, lp0_objective: 0.0, horizon: 4, levels: vec![] };
        let r = pseudo_to_schedule(&i, &pseudo, 1).unwrap();
        assert_eq!((r.window, r.colors), (3, 4));
        assert!(validate_rounds(&i, &r.rounds, CapacityLimit::scaled(1)).is_valid());
        assert!(r.rounds.iter().all(|&t| (3..6).contains(&t)));
    }
}
