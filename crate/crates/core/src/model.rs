//! Switches, flow requests, schedules and response-time metrics.
//!
//! Rounds are 0-indexed. A flow released at round `r` and executed in round
//! `t` completes at `t + 1` and has response time `t + 1 - r`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Input,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PortId {
    pub side: Side,
    pub index: usize,
}

impl PortId {
    pub fn input(index: usize) -> Self {
        PortId { side: Side::Input, index }
    }

    pub fn output(index: usize) -> Self {
        PortId { side: Side::Output, index }
    }
}

impl fmt::Display for PortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Input => write!(f, "in{}", self.index),
            Side::Output => write!(f, "out{}", self.index),
        }
    }
}

/// Port geometry and capacities of an `m x m'` switch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchSpec {
    cap_in: Vec<u32>,
    cap_out: Vec<u32>,
}

impl SwitchSpec {
    pub fn new(cap_in: Vec<u32>, cap_out: Vec<u32>) -> Result<Self, ModelError> {
        for (side, caps) in [(Side::Input, &cap_in), (Side::Output, &cap_out)] {
            if let Some(index) = caps.iter().position(|&c| c == 0) {
                return Err(ModelError::ZeroCapacity(PortId { side, index }));
            }
        }
        Ok(SwitchSpec { cap_in, cap_out })
    }

    /// Square switch with every port at capacity `cap`.
    pub fn uniform(m: usize, m_prime: usize, cap: u32) -> Result<Self, ModelError> {
        Self::new(vec![cap; m], vec![cap; m_prime])
    }

    pub fn m(&self) -> usize {
        self.cap_in.len()
    }

    pub fn m_prime(&self) -> usize {
        self.cap_out.len()
    }

    pub fn num_ports(&self) -> usize {
        self.cap_in.len() + self.cap_out.len()
    }

    pub fn capacity(&self, port: PortId) -> u32 {
        match port.side {
            Side::Input => self.cap_in[port.index],
            Side::Output => self.cap_out[port.index],
        }
    }

    pub fn input_capacities(&self) -> &[u32] {
        &self.cap_in
    }

    pub fn output_capacities(&self) -> &[u32] {
        &self.cap_out
    }

    pub fn contains(&self, port: PortId) -> bool {
        match port.side {
            Side::Input => port.index < self.cap_in.len(),
            Side::Output => port.index < self.cap_out.len(),
        }
    }

    /// Dense index over all ports: inputs first, then outputs.
    pub fn port_slot(&self, port: PortId) -> usize {
        match port.side {
            Side::Input => port.index,
            Side::Output => self.cap_in.len() + port.index,
        }
    }

    pub fn port_at_slot(&self, slot: usize) -> PortId {
        if slot < self.cap_in.len() {
            PortId::input(slot)
        } else {
            PortId::output(slot - self.cap_in.len())
        }
    }

    pub fn ports(&self) -> impl Iterator<Item = PortId> + '_ {
        (0..self.num_ports()).map(|s| self.port_at_slot(s))
    }
}

/// A request to move `demand` units from input `src` to output `dst`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowRequest {
    pub id: String,
    pub src: usize,
    pub dst: usize,
    pub demand: u32,
    pub release: u32,
    /// Admissible rounds, used by time-constrained scheduling only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<Vec<u32>>,
}

impl FlowRequest {
    pub fn new(id: impl Into<String>, src: usize, dst: usize, demand: u32, release: u32) -> Self {
        FlowRequest { id: id.into(), src, dst, demand, release, active: None }
    }

    /// Unit-demand flow.
    pub fn unit(id: impl Into<String>, src: usize, dst: usize, release: u32) -> Self {
        Self::new(id, src, dst, 1, release)
    }

    pub fn with_active(mut self, rounds: Vec<u32>) -> Self {
        self.active = Some(rounds);
        self
    }

    pub fn src_port(&self) -> PortId {
        PortId::input(self.src)
    }

    pub fn dst_port(&self) -> PortId {
        PortId::output(self.dst)
    }

    pub fn ports(&self) -> [PortId; 2] {
        [self.src_port(), self.dst_port()]
    }
}

/// A validated switch plus flow set, with a per-port flow index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson", into = "InstanceJson")]
pub struct Instance {
    switch: SwitchSpec,
    flows: Vec<FlowRequest>,
    by_port: Vec<Vec<usize>>,
    by_id: HashMap<String, usize>,
}

impl Instance {
    pub fn new(switch: SwitchSpec, flows: Vec<FlowRequest>) -> Result<Self, ModelError> {
        let mut by_id = HashMap::with_capacity(flows.len());
        let mut by_port = vec![Vec::new(); switch.num_ports()];
        for (i, f) in flows.iter().enumerate() {
            if by_id.insert(f.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateFlowId(f.id.clone()));
            }
            for port in f.ports() {
                if !switch.contains(port) {
                    return Err(ModelError::UnknownPort { flow: f.id.clone(), port });
                }
            }
            if f.demand == 0 {
                return Err(ModelError::ZeroDemand(f.id.clone()));
            }
            let kappa = switch.capacity(f.src_port()).min(switch.capacity(f.dst_port()));
            if f.demand > kappa {
                return Err(ModelError::DemandExceedsCapacity { flow: f.id.clone(), demand: f.demand, kappa });
            }
            if let Some(active) = &f.active {
                if active.is_empty() {
                    return Err(ModelError::EmptyActiveSet(f.id.clone()));
                }
                if let Some(&t) = active.iter().find(|&&t| t < f.release) {
                    return Err(ModelError::ActiveBeforeRelease { flow: f.id.clone(), round: t, release: f.release });
                }
            }
            for port in f.ports() {
                by_port[switch.port_slot(port)].push(i);
            }
        }
        Ok(Instance { switch, flows, by_port, by_id })
    }

    pub fn switch(&self) -> &SwitchSpec {
        &self.switch
    }

    pub fn flows(&self) -> &[FlowRequest] {
        &self.flows
    }

    pub fn flow(&self, index: usize) -> &FlowRequest {
        &self.flows[index]
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    /// Indices of flows incident to `port`.
    pub fn flows_at(&self, port: PortId) -> &[usize] {
        &self.by_port[self.switch.port_slot(port)]
    }

    /// Indices of flows incident to the port in dense slot `slot`.
    pub fn flows_at_slot(&self, slot: usize) -> &[usize] {
        &self.by_port[slot]
    }

    /// Bottleneck capacity `min(c_src, c_dst)` of a flow.
    pub fn kappa(&self, index: usize) -> u32 {
        let f = &self.flows[index];
        self.switch.capacity(f.src_port()).min(self.switch.capacity(f.dst_port()))
    }

    pub fn max_release(&self) -> Option<u32> {
        self.flows.iter().map(|f| f.release).max()
    }

    pub fn max_demand(&self) -> u32 {
        self.flows.iter().map(|f| f.demand).max().unwrap_or(0)
    }

    pub fn is_unit_demand(&self) -> bool {
        self.flows.iter().all(|f| f.demand == 1)
    }

    /// Same switch, flows replaced.
    pub fn with_flows(&self, flows: Vec<FlowRequest>) -> Result<Self, ModelError> {
        Instance::new(self.switch.clone(), flows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }
}

/// Wire format of an instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub m: usize,
    pub m_prime: usize,
    pub capacities_in: Vec<u32>,
    pub capacities_out: Vec<u32>,
    pub flows: Vec<FlowRequest>,
}

impl TryFrom<InstanceJson> for Instance {
    type Error = ModelError;

    fn try_from(raw: InstanceJson) -> Result<Self, Self::Error> {
        if raw.capacities_in.len() != raw.m || raw.capacities_out.len() != raw.m_prime {
            return Err(ModelError::Parse(format!(
                "capacity lists have lengths {}/{} but m={} m_prime={}",
                raw.capacities_in.len(),
                raw.capacities_out.len(),
                raw.m,
                raw.m_prime
            )));
        }
        let switch = SwitchSpec::new(raw.capacities_in, raw.capacities_out)?;
        Instance::new(switch, raw.flows)
    }
}

impl From<Instance> for InstanceJson {
    fn from(inst: Instance) -> Self {
        InstanceJson {
            m: inst.switch.m(),
            m_prime: inst.switch.m_prime(),
            capacities_in: inst.switch.cap_in,
            capacities_out: inst.switch.cap_out,
            flows: inst.flows,
        }
    }
}

/// One execution round per flow id.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(into = "ScheduleJson", try_from = "ScheduleJson")]
pub struct IntegralSchedule {
    rounds: BTreeMap<String, u32>,
}

impl IntegralSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a schedule from per-flow rounds in instance order.
    pub fn from_rounds(inst: &Instance, rounds: &[u32]) -> Self {
        assert_eq!(inst.len(), rounds.len(), "one round per flow");
        IntegralSchedule {
            rounds: inst.flows().iter().zip(rounds).map(|(f, &t)| (f.id.clone(), t)).collect(),
        }
    }

    pub fn assign(&mut self, id: impl Into<String>, round: u32) {
        self.rounds.insert(id.into(), round);
    }

    pub fn round_of(&self, id: &str) -> Option<u32> {
        self.rounds.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.rounds.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Per-flow rounds in instance order; fails unless the schedule covers
    /// exactly the instance's flows.
    pub fn rounds_for(&self, inst: &Instance) -> Result<Vec<u32>, ModelError> {
        if let Some(unknown) = self.rounds.keys().find(|id| inst.index_of(id).is_none()) {
            return Err(ModelError::UnknownFlow(unknown.clone()));
        }
        inst.flows()
            .iter()
            .map(|f| self.round_of(&f.id).ok_or_else(|| ModelError::MissingFlow(f.id.clone())))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let wire: ScheduleJson = serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
        wire.try_into()
    }
}

impl From<IntegralSchedule> for ScheduleJson {
    fn from(s: IntegralSchedule) -> Self {
        ScheduleJson { assignments: s.rounds.into_iter().map(|(id, round)| AssignmentJson { id, round: round as i64 }).collect() }
    }
}

impl TryFrom<ScheduleJson> for IntegralSchedule {
    type Error = ModelError;

    fn try_from(wire: ScheduleJson) -> Result<Self, ModelError> {
        let mut sched = IntegralSchedule::new();
        for a in wire.assignments {
            if a.round < 0 || a.round > u32::MAX as i64 {
                return Err(ModelError::NegativeRound { flow: a.id, round: a.round });
            }
            if sched.rounds.insert(a.id.clone(), a.round as u32).is_some() {
                return Err(ModelError::DuplicateFlowId(a.id));
            }
        }
        Ok(sched)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ScheduleJson {
    assignments: Vec<AssignmentJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AssignmentJson {
    id: String,
    round: i64,
}

/// Per-port load limit `factor * c_p + additive` used when validating
/// capacity-augmented schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacityLimit {
    pub factor: u64,
    pub additive: u64,
}

impl CapacityLimit {
    pub const EXACT: CapacityLimit = CapacityLimit { factor: 1, additive: 0 };

    /// `c_p + bonus` at every port.
    pub fn bonus(bonus: u64) -> Self {
        CapacityLimit { factor: 1, additive: bonus }
    }

    /// `(1 + c) * c_p` at every port.
    pub fn scaled(c: u64) -> Self {
        CapacityLimit { factor: 1 + c, additive: 0 }
    }

    pub fn limit(&self, capacity: u32) -> u64 {
        self.factor * capacity as u64 + self.additive
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BeforeRelease { flow: String, round: u32, release: u32 },
    InactiveRound { flow: String, round: u32 },
    Overload { port: PortId, round: u32, load: u64, limit: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BeforeRelease { flow, round, release } => {
                write!(f, "flow {flow} runs in round {round} before its release {release}")
            }
            Violation::InactiveRound { flow, round } => write!(f, "flow {flow} runs in inactive round {round}"),
            Violation::Overload { port, round, load, limit } => {
                write!(f, "port {port} carries {load} > {limit} in round {round}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationVerdict {
    pub violations: Vec<Violation>,
}

impl ValidationVerdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks release/active-set respect and per-port loads against `c_p + capacity_bonus`.
pub fn validate_schedule(inst: &Instance, sched: &IntegralSchedule, capacity_bonus: u64) -> Result<ValidationVerdict, ModelError> {
    validate_with_limit(inst, sched, CapacityLimit::bonus(capacity_bonus))
}

pub fn validate_with_limit(inst: &Instance, sched: &IntegralSchedule, limit: CapacityLimit) -> Result<ValidationVerdict, ModelError> {
    let rounds = sched.rounds_for(inst)?;
    Ok(validate_rounds(inst, &rounds, limit))
}

/// Validation over per-flow rounds in instance order.
pub fn validate_rounds(inst: &Instance, rounds: &[u32], limit: CapacityLimit) -> ValidationVerdict {
    let mut violations = Vec::new();
    for (f, &t) in inst.flows().iter().zip(rounds) {
        if t < f.release {
            violations.push(Violation::BeforeRelease { flow: f.id.clone(), round: t, release: f.release });
        }
        if let Some(active) = &f.active {
            if !active.contains(&t) {
                violations.push(Violation::InactiveRound { flow: f.id.clone(), round: t });
            }
        }
    }
    for (slot, load) in port_round_loads(inst, rounds).into_iter().enumerate() {
        let port = inst.switch().port_at_slot(slot);
        let cap = limit.limit(inst.switch().capacity(port));
        for (round, load) in load {
            if load > cap {
                violations.push(Violation::Overload { port, round, load, limit: cap });
            }
        }
    }
    ValidationVerdict { violations }
}

/// Load per port slot per round (only rounds with nonzero load appear).
pub fn port_round_loads(inst: &Instance, rounds: &[u32]) -> Vec<BTreeMap<u32, u64>> {
    let mut loads = vec![BTreeMap::new(); inst.switch().num_ports()];
    for (f, &t) in inst.flows().iter().zip(rounds) {
        for port in f.ports() {
            *loads[inst.switch().port_slot(port)].entry(t).or_insert(0) += f.demand as u64;
        }
    }
    loads
}

/// Capacity-feasible schedule placing flows in (release, index) order at the
/// earliest round from their release where both ports still have room.
/// Active sets are ignored.
pub fn first_fit_rounds(inst: &Instance) -> Vec<u32> {
    let sw = inst.switch();
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by_key(|&i| (inst.flow(i).release, i));
    let mut used: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); sw.num_ports()];
    let mut rounds = vec![0; inst.len()];
    for i in order {
        let f = inst.flow(i);
        let slots = f.ports().map(|p| (sw.port_slot(p), sw.capacity(p)));
        let mut t = f.release;
        while slots.iter().any(|&(s, c)| used[s].get(&t).copied().unwrap_or(0) + f.demand > c) {
            t += 1;
        }
        for (s, _) in slots {
            *used[s].entry(t).or_insert(0) += f.demand;
        }
        rounds[i] = t;
    }
    rounds
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseReport {
    pub completion: Vec<u64>,
    pub response: Vec<u64>,
    pub total: u64,
    pub average: f64,
    pub maximum: u64,
}

pub fn response_metrics(inst: &Instance, sched: &IntegralSchedule) -> Result<ResponseReport, ModelError> {
    let rounds = sched.rounds_for(inst)?;
    response_from_rounds(inst, &rounds)
}

pub fn response_from_rounds(inst: &Instance, rounds: &[u32]) -> Result<ResponseReport, ModelError> {
    let mut completion = Vec::with_capacity(rounds.len());
    let mut response = Vec::with_capacity(rounds.len());
    for (f, &t) in inst.flows().iter().zip(rounds) {
        if t < f.release {
            return Err(ModelError::NegativeResponse { flow: f.id.clone(), round: t, release: f.release });
        }
        let c = t as u64 + 1;
        completion.push(c);
        response.push(c - f.release as u64);
    }
    let total: u64 = response.iter().sum();
    let maximum = response.iter().copied().max().unwrap_or(0);
    let average = if response.is_empty() { 0.0 } else { total as f64 / response.len() as f64 };
    Ok(ResponseReport { completion, response, total, average, maximum })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_by_one(flows: Vec<FlowRequest>) -> Instance {
        Instance::new(SwitchSpec::uniform(1, 1, 1).unwrap(), flows).unwrap()
    }

    #[test]
    fn single_flow_at_release_is_valid() {
        let inst = one_by_one(vec![FlowRequest::unit("a", 0, 0, 0)]);
        let sched = IntegralSchedule::from_rounds(&inst, &[0]);
        assert!(validate_schedule(&inst, &sched, 0).unwrap().is_valid());
    }

    #[test]
    fn shared_input_overload_is_reported_and_absorbed_by_bonus() {
        let sw = SwitchSpec::uniform(1, 2, 1).unwrap();
        let inst = Instance::new(sw, vec![FlowRequest::unit("a", 0, 0, 0), FlowRequest::unit("b", 0, 1, 0)]).unwrap();
        let sched = IntegralSchedule::from_rounds(&inst, &[0, 0]);
        let verdict = validate_schedule(&inst, &sched, 0).unwrap();
        assert_eq!(
            verdict.violations,
            vec![Violation::Overload { port: PortId::input(0), round: 0, load: 2, limit: 1 }]
        );
        assert!(validate_schedule(&inst, &sched, 1).unwrap().is_valid());
    }

    #[test]
    fn release_and_active_violations() {
        let inst = one_by_one(vec![FlowRequest::unit("a", 0, 0, 2), FlowRequest::unit("b", 0, 0, 0).with_active(vec![1, 3])]);
        let sched = IntegralSchedule::from_rounds(&inst, &[1, 2]);
        let v = validate_schedule(&inst, &sched, 5).unwrap();
        assert_eq!(v.violations.len(), 2);
        assert!(matches!(v.violations[0], Violation::BeforeRelease { round: 1, release: 2, .. }));
        assert!(matches!(v.violations[1], Violation::InactiveRound { round: 2, .. }));
    }

    #[test]
    fn unknown_and_missing_ids_are_errors() {
        let inst = one_by_one(vec![FlowRequest::unit("a", 0, 0, 0)]);
        let mut sched = IntegralSchedule::new();
        sched.assign("zzz", 0);
        assert!(matches!(validate_schedule(&inst, &sched, 0), Err(ModelError::UnknownFlow(_))));
        assert!(matches!(validate_schedule(&inst, &IntegralSchedule::new(), 0), Err(ModelError::MissingFlow(_))));
    }

    #[test]
    fn negative_round_in_json_is_rejected() {
        let err = IntegralSchedule::from_json(r#"{"assignments":[{"id":"a","round":-1}]}"#).unwrap_err();
        assert!(matches!(err, ModelError::NegativeRound { round: -1, .. }));
    }

    #[test]
    fn response_examples() {
        let inst = one_by_one(vec![FlowRequest::unit("a", 0, 0, 0)]);
        let r = response_metrics(&inst, &IntegralSchedule::from_rounds(&inst, &[0])).unwrap();
        assert_eq!(r.response, vec![1]);

        let inst = one_by_one(vec![FlowRequest::unit("a", 0, 0, 2)]);
        let r = response_metrics(&inst, &IntegralSchedule::from_rounds(&inst, &[4])).unwrap();
        assert_eq!((r.completion[0], r.response[0]), (5, 3));

        let inst = one_by_one(vec![FlowRequest::unit("a", 0, 0, 0), FlowRequest::unit("b", 0, 0, 0)]);
        let r = response_metrics(&inst, &IntegralSchedule::from_rounds(&inst, &[0, 1])).unwrap();
        assert_eq!((r.total, r.average, r.maximum), (3, 1.5, 2));
    }

    #[test]
    fn response_before_release_is_an_error() {
        let inst = one_by_one(vec![FlowRequest::unit("a", 0, 0, 3)]);
        let err = response_metrics(&inst, &IntegralSchedule::from_rounds(&inst, &[1])).unwrap_err();
        assert!(matches!(err, ModelError::NegativeResponse { .. }));
    }

    #[test]
    fn instance_invariants() {
        let sw = SwitchSpec::new(vec![2], vec![1]).unwrap();
        let err = Instance::new(sw.clone(), vec![FlowRequest::new("a", 0, 0, 2, 0)]).unwrap_err();
        assert!(matches!(err, ModelError::DemandExceedsCapacity { kappa: 1, .. }));
        let err = Instance::new(sw.clone(), vec![FlowRequest::unit("a", 0, 0, 0), FlowRequest::unit("a", 0, 0, 1)]).unwrap_err();
        assert!(matches!(err, ModelError::DuplicateFlowId(_)));
        let err = Instance::new(sw.clone(), vec![FlowRequest::unit("a", 1, 0, 0)]).unwrap_err();
        assert!(matches!(err, ModelError::UnknownPort { .. }));
        let err = Instance::new(sw, vec![FlowRequest::unit("a", 0, 0, 2).with_active(vec![1])]).unwrap_err();
        assert!(matches!(err, ModelError::ActiveBeforeRelease { .. }));
        assert!(SwitchSpec::new(vec![1, 0], vec![1]).is_err());
    }

    #[test]
    fn instance_json_field_names() {
        let sw = SwitchSpec::new(vec![1, 2], vec![3]).unwrap();
        let inst = Instance::new(sw, vec![FlowRequest::unit("x", 1, 0, 4).with_active(vec![4, 6])]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&inst.to_json()).unwrap();
        assert_eq!(v["m"], 2);
        assert_eq!(v["m_prime"], 1);
        assert_eq!(v["capacities_in"], serde_json::json!([1, 2]));
        assert_eq!(v["capacities_out"], serde_json::json!([3]));
        assert_eq!(v["flows"][0]["active"], serde_json::json!([4, 6]));
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }
}
