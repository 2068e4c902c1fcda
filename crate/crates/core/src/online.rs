//! Online scheduling: per-round matching policies over the backlog graph and
//! the batching algorithm with a guessed response bound.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::{expand_to_unit_graph, max_cardinality_matching, max_weight_matching, BipartiteMultigraph};
use crate::model::{CapacityLimit, FlowRequest, Instance};
use crate::mrt::{solve_tcfs, with_windows};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Policy {
    MaxCard,
    MinRTime,
    MaxWeight,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::MaxCard, Policy::MinRTime, Policy::MaxWeight];

    pub fn name(self) -> &'static str {
        match self {
            Policy::MaxCard => "MaxCard",
            Policy::MinRTime => "MinRTime",
            Policy::MaxWeight => "MaxWeight",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown policy {s:?} (expected MaxCard, MinRTime or MaxWeight)")))
    }
}

/// Released, unscheduled flows at a round. Queues are open: any pending
/// flow may be picked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BacklogGraph {
    pub round: u32,
    /// Flow indices into the instance, ascending.
    pub pending: Vec<usize>,
}

/// Picks the flows to run this round. Port capacities above one are handled
/// by matching over port copies.
///
/// MinRTime weighs a flow by its wait `t - r_e`; MaxWeight by the number of
/// pending flows at its two ports. Both weights are scaled so that ties in
/// total weight go to the larger matching.
pub fn policy_step(inst: &Instance, backlog: &BacklogGraph, policy: Policy) -> Vec<usize> {
    let sw = inst.switch();
    let mut g = BipartiteMultigraph::new(sw.m(), sw.m_prime());
    for &e in &backlog.pending {
        let f = inst.flow(e);
        g.add_edge(f.src, f.dst, e);
    }
    let unit = expand_to_unit_graph(&g, sw.input_capacities(), sw.output_capacities());
    let chosen = match policy {
        Policy::MaxCard => max_cardinality_matching(&unit.graph),
        Policy::MinRTime | Policy::MaxWeight => {
            let raw = policy_weights(inst, backlog, policy);
            let scale = (raw.len() + 1) as f64;
            let w: Vec<f64> = raw.iter().map(|w| w * scale + 1.0).collect();
            max_weight_matching(&unit.graph, &w)
        }
    };
    let mut flows: Vec<usize> = chosen.into_iter().map(|k| unit.graph.edge(k).id).collect();
    flows.sort_unstable();
    flows
}

/// Unscaled weight of each pending flow, in `backlog.pending` order. All
/// zero for MaxCard.
pub fn policy_weights(inst: &Instance, backlog: &BacklogGraph, policy: Policy) -> Vec<f64> {
    match policy {
        Policy::MaxCard => vec![0.0; backlog.pending.len()],
        Policy::MinRTime => backlog.pending.iter().map(|&e| (backlog.round - inst.flow(e).release) as f64).collect(),
        Policy::MaxWeight => {
            let sw = inst.switch();
            let mut ql = vec![0usize; sw.m()];
            let mut qr = vec![0usize; sw.m_prime()];
            for &e in &backlog.pending {
                ql[inst.flow(e).src] += 1;
                qr[inst.flow(e).dst] += 1;
            }
            backlog.pending.iter().map(|&e| (ql[inst.flow(e).src] + qr[inst.flow(e).dst]) as f64).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub round: u32,
    pub policy: Policy,
    pub flows: Vec<String>,
}

/// Writes decisions as CSV with columns `round,policy,flows`; flow ids are
/// joined by `;`.
pub fn write_decision_log<W: Write>(w: W, log: &[Decision]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["round", "policy", "flows"])?;
    for d in log {
        out.write_record([d.round.to_string(), d.policy.to_string(), d.flows.join(";")])?;
    }
    out.flush()?;
    Ok(())
}

fn require_unit(inst: &Instance) -> Result<()> {
    match inst.flows().iter().find(|f| f.demand != 1) {
        Some(f) => Err(Error::NonUnitDemand(f.id.clone())),
        None => Ok(()),
    }
}

/// Runs `policy` round by round until every flow is scheduled and returns
/// each flow's round.
pub fn run_policy(inst: &Instance, policy: Policy, mut log: Option<&mut Vec<Decision>>) -> Result<Vec<u32>> {
    require_unit(inst)?;
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by_key(|&e| (inst.flow(e).release, e));
    let mut rounds = vec![0u32; inst.len()];
    let mut next = 0;
    let mut pending: Vec<usize> = Vec::new();
    let mut t = order.first().map_or(0, |&e| inst.flow(e).release);
    while next < order.len() || !pending.is_empty() {
        if pending.is_empty() {
            t = t.max(inst.flow(order[next]).release);
        }
        while next < order.len() && inst.flow(order[next]).release <= t {
            pending.push(order[next]);
            next += 1;
        }
        pending.sort_unstable();
        let chosen = policy_step(inst, &BacklogGraph { round: t, pending: pending.clone() }, policy);
        for &e in &chosen {
            rounds[e] = t;
        }
        if let Some(log) = log.as_deref_mut() {
            log.push(Decision { round: t, policy, flows: chosen.iter().map(|&e| inst.flow(e).id.clone()).collect() });
        }
        pending.retain(|e| chosen.binary_search(e).is_err());
        t += 1;
    }
    Ok(rounds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AmrtConfig {
    /// Double the guess instead of incrementing it.
    pub doubling: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmrtBatch {
    /// Round at which the batch was solved and committed.
    pub boundary: u32,
    pub rho: u32,
    /// Offset added to the batch's offline rounds.
    pub shift: u32,
    pub flows: Vec<usize>,
    pub first_round: u32,
    pub last_round: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmrtRun {
    pub rounds: Vec<u32>,
    pub final_rho: u32,
    pub batches: Vec<AmrtBatch>,
    /// Most batches executing in any single round.
    pub max_overlap: usize,
}

impl AmrtRun {
    /// Port budget the run is guaranteed to respect: `2 (c_p + 2 d_max - 1)`.
    pub fn capacity_limit(inst: &Instance) -> CapacityLimit {
        let extra = (2 * inst.max_demand() as u64).saturating_sub(1);
        CapacityLimit { factor: 2, additive: 2 * extra }
    }
}

/// Batching with a guessed bound `rho`, starting at 1.
///
/// Boundaries fall at the previous boundary plus the current guess. At a
/// boundary `t` the flows released since the previous boundary `b` are
/// solved offline with windows `[r_e, r_e + rho)`; a feasible batch is
/// rounded and run shifted by `t - b`, so no flow runs before `t`. An
/// infeasible batch raises the guess and is retried at the same boundary.
pub fn a_mrt_run(inst: &Instance, cfg: AmrtConfig) -> Result<AmrtRun> {
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by_key(|&e| (inst.flow(e).release, e));
    let mut rounds = vec![0u32; inst.len()];
    let mut batches = Vec::new();
    let mut rho = 1u32;
    let mut last_boundary = 0u32;
    let mut t = 0u32;
    let mut next = 0;
    while next < order.len() {
        t += rho;
        let start = next;
        while next < order.len() && inst.flow(order[next]).release < t {
            next += 1;
        }
        let mut batch: Vec<usize> = order[start..next].to_vec();
        batch.sort_unstable();
        if batch.is_empty() {
            last_boundary = t;
            continue;
        }
        let flows: Vec<FlowRequest> = batch.iter().map(|&e| inst.flow(e).clone()).collect();
        let sub = inst.with_flows(flows)?;
        let shift = t - last_boundary;
        let assignment = loop {
            let out = solve_tcfs(&with_windows(&sub, rho))?;
            if let Some(a) = out.assignment {
                break a;
            }
            rho = if cfg.doubling { rho * 2 } else { rho + 1 };
        };
        let mut first = u32::MAX;
        let mut last = 0;
        for (k, &e) in batch.iter().enumerate() {
            let r = assignment.rounds[k] + shift;
            rounds[e] = r;
            first = first.min(r);
            last = last.max(r);
        }
        batches.push(AmrtBatch { boundary: t, rho, shift, flows: batch, first_round: first, last_round: last });
        last_boundary = t;
    }
    let max_overlap = max_batch_overlap(&batches);
    Ok(AmrtRun { rounds, final_rho: rho, batches, max_overlap })
}

/// Largest number of batches that are committed and not yet finished at a
/// common round.
pub fn max_batch_overlap(batches: &[AmrtBatch]) -> usize {
    let mut events: Vec<(u32, i32)> = Vec::new();
    for b in batches {
        events.push((b.boundary, 1));
        events.push((b.last_round + 1, -1));
    }
    events.sort_unstable();
    let mut live = 0i32;
    let mut best = 0i32;
    for (_, d) in events {
        live += d;
        best = best.max(live);
    }
    best as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{response_from_rounds, validate_rounds, SwitchSpec};

    fn unit(m: usize, flows: Vec<FlowRequest>) -> Instance {
        Instance::new(SwitchSpec::uniform(m, m, 1).unwrap(), flows).unwrap()
    }

    #[test]
    fn lone_flow_runs_at_once_under_every_policy() {
        let inst = unit(2, vec![FlowRequest::unit("a", 1, 0, 3)]);
        for p in Policy::ALL {
            assert_eq!(run_policy(&inst, p, None).unwrap(), vec![3]);
        }
    }

    #[test]
    fn min_rtime_prefers_longer_wait() {
        // Waits 3 and 1 at round 4, both through input 0.
        let inst = unit(2, vec![FlowRequest::unit("old", 0, 0, 1), FlowRequest::unit("new", 0, 1, 3)]);
        let pick = policy_step(&inst, &BacklogGraph { round: 4, pending: vec![0, 1] }, Policy::MinRTime);
        assert_eq!(pick, vec![0]);
    }

    #[test]
    fn max_weight_uses_queue_sums() {
        // x joins input 0 (queue 4) and output 0 (queue 2); z joins two
        // queues of size 1.
        let flows = vec![
            FlowRequest::unit("x", 0, 0, 0),
            FlowRequest::unit("a1", 0, 1, 0),
            FlowRequest::unit("a2", 0, 2, 0),
            FlowRequest::unit("a3", 0, 1, 0),
            FlowRequest::unit("b", 1, 0, 0),
            FlowRequest::unit("z", 3, 3, 0),
        ];
        let inst = unit(4, flows);
        let g = BacklogGraph { round: 0, pending: (0..6).collect() };
        let w = policy_weights(&inst, &g, Policy::MaxWeight);
        assert_eq!((w[0], w[5]), (6.0, 2.0));
    }

    #[test]
    fn max_weight_picks_heaviest_total() {
        // Weights x=4, y=3, a=3; {y, a} beats {x}.
        let inst = unit(2, vec![FlowRequest::unit("x", 0, 0, 0), FlowRequest::unit("y", 1, 0, 0), FlowRequest::unit("a", 0, 1, 0)]);
        let pick = policy_step(&inst, &BacklogGraph { round: 0, pending: vec![0, 1, 2] }, Policy::MaxWeight);
        assert_eq!(pick, vec![1, 2]);
    }

    #[test]
    fn policies_parse_case_insensitively() {
        assert_eq!("maxcard".parse::<Policy>().unwrap(), Policy::MaxCard);
        assert!("fifo".parse::<Policy>().is_err());
    }

    #[test]
    fn amrt_single_flow() {
        let inst = unit(1, vec![FlowRequest::unit("a", 0, 0, 0)]);
        let run = a_mrt_run(&inst, AmrtConfig::default()).unwrap();
        assert_eq!((run.rounds.clone(), run.final_rho), (vec![1], 1));
        assert_eq!(response_from_rounds(&inst, &run.rounds).unwrap().maximum, 2);
    }

    #[test]
    fn amrt_burst_stays_within_budget() {
        let flows = (0..6).map(|k| FlowRequest::unit(format!("f{k}"), 0, k % 2, 0)).collect();
        let inst = unit(2, flows);
        let run = a_mrt_run(&inst, AmrtConfig::default()).unwrap();
        let max = response_from_rounds(&inst, &run.rounds).unwrap().maximum;
        assert!(max <= 2 * run.final_rho as u64);
        assert!(run.max_overlap <= 2);
        assert!(validate_rounds(&inst, &run.rounds, AmrtRun::capacity_limit(&inst)).is_valid());
    }
}
