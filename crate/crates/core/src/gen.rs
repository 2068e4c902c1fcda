//! Instance factories: random instances, adaptive lower-bound adversaries and
//! the timetable hardness gadget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FlowRequest, Instance, SwitchSpec};
use crate::online::{policy_step, BacklogGraph, Policy};

/// `n` flows with uniform endpoints and releases in `[0, horizon)`. Port
/// capacities are uniform in `[1, d_max]` and demands uniform in
/// `[1, min(d_max, kappa_e)]`.
pub fn random_instance(m: usize, m_prime: usize, n: usize, d_max: u32, horizon: u32, seed: u64) -> Result<Instance> {
    if m == 0 || m_prime == 0 || d_max == 0 || horizon == 0 {
        return Err(Error::Config("m, m', d_max and horizon must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap_in: Vec<u32> = (0..m).map(|_| rng.random_range(1..=d_max)).collect();
    let cap_out: Vec<u32> = (0..m_prime).map(|_| rng.random_range(1..=d_max)).collect();
    let flows = (0..n)
        .map(|i| {
            let src = rng.random_range(0..m);
            let dst = rng.random_range(0..m_prime);
            let top = d_max.min(cap_in[src]).min(cap_out[dst]);
            let demand = rng.random_range(1..=top);
            FlowRequest::new(format!("f{i}"), src, dst, demand, rng.random_range(0..horizon))
        })
        .collect();
    Ok(Instance::new(SwitchSpec::new(cap_in, cap_out)?, flows)?)
}

/// Like [`random_instance`] with unit capacities and demands.
pub fn random_unit_instance(m: usize, m_prime: usize, n: usize, horizon: u32, seed: u64) -> Result<Instance> {
    random_instance(m, m_prime, n, 1, horizon, seed)
}

/// An adversary that picks each round's releases after seeing what the
/// online algorithm has run so far.
pub trait AdaptiveAdversary {
    fn switch(&self) -> SwitchSpec;

    /// Flows released at `round`. `scheduled[i]` is the round in which
    /// `released[i]` ran, if it has.
    fn release(&mut self, round: u32, released: &[FlowRequest], scheduled: &[Option<u32>]) -> Vec<FlowRequest>;

    /// No flows are released after this round.
    fn last_release(&self) -> u32;
}

#[derive(Debug, Clone)]
pub struct AdversaryRun {
    /// The completed trace.
    pub instance: Instance,
    pub rounds: Vec<u32>,
}

/// Plays `policy` against `adv` until every released flow has run.
pub fn run_adversary<A: AdaptiveAdversary + ?Sized>(adv: &mut A, policy: Policy) -> Result<AdversaryRun> {
    let sw = adv.switch();
    let mut flows: Vec<FlowRequest> = Vec::new();
    let mut scheduled: Vec<Option<u32>> = Vec::new();
    let mut t = 0u32;
    loop {
        let fresh = adv.release(t, &flows, &scheduled);
        scheduled.extend(fresh.iter().map(|_| None));
        flows.extend(fresh);
        let pending: Vec<usize> = (0..flows.len()).filter(|&i| scheduled[i].is_none() && flows[i].release <= t).collect();
        if pending.is_empty() && t >= adv.last_release() {
            break;
        }
        let inst = Instance::new(sw.clone(), flows.clone())?;
        for e in policy_step(&inst, &BacklogGraph { round: t, pending }, policy) {
            scheduled[e] = Some(t);
        }
        t += 1;
    }
    let instance = Instance::new(sw, flows)?;
    let rounds = scheduled.into_iter().map(|r| r.expect("all flows ran")).collect();
    Ok(AdversaryRun { instance, rounds })
}

/// Average-response adversary on a 2x2 unit switch.
///
/// Rounds `0..T` each release `in0 -> out0` and `in0 -> out1`. From round
/// `T` to `M - 1` one flow per round goes from `in1` to whichever output
/// has more pending flows at round `T` (ties go to `out1`).
#[derive(Debug, Clone)]
pub struct AvgAdversary {
    t: u32,
    m: u32,
    target: Option<usize>,
}

pub fn gadget_avg_lower(t: u32, m: u32) -> Result<AvgAdversary> {
    if t == 0 || m < 4 * t {
        return Err(Error::Config(format!("need T >= 1 and M >= 4T, got T={t}, M={m}")));
    }
    Ok(AvgAdversary { t, m, target: None })
}

impl AvgAdversary {
    /// Output chosen for the dashed flows, once decided.
    pub fn target(&self) -> Option<usize> {
        self.target
    }
}

impl AdaptiveAdversary for AvgAdversary {
    fn switch(&self) -> SwitchSpec {
        SwitchSpec::uniform(2, 2, 1).expect("unit switch")
    }

    fn release(&mut self, round: u32, released: &[FlowRequest], scheduled: &[Option<u32>]) -> Vec<FlowRequest> {
        if round < self.t {
            return vec![FlowRequest::unit(format!("s{round}a"), 0, 0, round), FlowRequest::unit(format!("s{round}b"), 0, 1, round)];
        }
        if round >= self.m {
            return Vec::new();
        }
        let target = *self.target.get_or_insert_with(|| {
            let mut pending = [0usize; 2];
            for (f, s) in released.iter().zip(scheduled) {
                if s.is_none() {
                    pending[f.dst] += 1;
                }
            }
            if pending[0] > pending[1] {
                0
            } else {
                1
            }
        });
        vec![FlowRequest::unit(format!("d{round}"), 1, target, round)]
    }

    fn last_release(&self) -> u32 {
        self.m - 1
    }
}

/// Max-response adversary on 3 inputs and 4 outputs.
///
/// Round 0 releases `in0 -> out0`, `in0 -> out1`, `in1 -> out2`,
/// `in1 -> out3`. Round 1 releases two flows from `in2`, one to the output
/// of each input's leftover round-0 flow (`out1` and `out2` when both of an
/// input's flows are left).
#[derive(Debug, Clone, Default)]
pub struct MaxAdversary {
    targets: Option<(usize, usize)>,
}

pub fn gadget_max_lower() -> MaxAdversary {
    MaxAdversary::default()
}

impl MaxAdversary {
    pub fn targets(&self) -> Option<(usize, usize)> {
        self.targets
    }
}

impl AdaptiveAdversary for MaxAdversary {
    fn switch(&self) -> SwitchSpec {
        SwitchSpec::uniform(3, 4, 1).expect("unit switch")
    }

    fn release(&mut self, round: u32, released: &[FlowRequest], scheduled: &[Option<u32>]) -> Vec<FlowRequest> {
        match round {
            0 => vec![
                FlowRequest::unit("s12", 0, 0, 0),
                FlowRequest::unit("s13", 0, 1, 0),
                FlowRequest::unit("s45", 1, 2, 0),
                FlowRequest::unit("s46", 1, 3, 0),
            ],
            1 => {
                let leftover = |src: usize, default: usize| {
                    let left: Vec<usize> = released.iter().zip(scheduled).filter(|(f, s)| f.src == src && s.is_none()).map(|(f, _)| f.dst).collect();
                    if left.len() == 1 {
                        left[0]
                    } else {
                        default
                    }
                };
                let (a, b) = (leftover(0, 1), leftover(1, 2));
                self.targets = Some((a, b));
                vec![FlowRequest::unit("d7a", 2, a, 1), FlowRequest::unit("d7b", 2, b, 1)]
            }
            _ => Vec::new(),
        }
    }

    fn last_release(&self) -> u32 {
        1
    }
}

/// Restricted timetable instance: teacher `i` may teach in hours `T[i]`
/// (from `{1, 2, 3}`) and must meet each class in `g[i]` once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RttInstance {
    #[serde(rename = "T")]
    pub t: Vec<Vec<u32>>,
    pub g: Vec<Vec<usize>>,
}

impl RttInstance {
    pub fn classes(&self) -> usize {
        self.g.iter().flatten().map(|&j| j + 1).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t.len() != self.g.len() {
            return Err(Error::Config(format!("{} hour sets but {} class sets", self.t.len(), self.g.len())));
        }
        for (i, (hours, classes)) in self.t.iter().zip(&self.g).enumerate() {
            let mut h = hours.clone();
            h.sort_unstable();
            h.dedup();
            if h.len() != hours.len() || h.len() < 2 || h.iter().any(|x| !(1..=3).contains(x)) {
                return Err(Error::Config(format!("teacher {i}: hours {hours:?} must be 2 or 3 distinct values from 1..=3")));
            }
            let mut c = classes.clone();
            c.sort_unstable();
            c.dedup();
            if c.len() != classes.len() || c.len() != h.len() {
                return Err(Error::Config(format!("teacher {i}: needs {} distinct classes, got {classes:?}", h.len())));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rtt: RttInstance = serde_json::from_str(text)?;
        rtt.validate()?;
        Ok(rtt)
    }
}

/// Builds the unit switch instance that has a schedule with max response 3
/// exactly when `rtt` is satisfiable. Returns the instance and the target 3.
///
/// Hours are 1-based in `rtt` and shifted to 0-based rounds. Input ports are
/// laid out as teachers, then three blockers per class, then three blockers
/// per gadget; outputs as classes, then one per gadget.
pub fn rtt_reduce(rtt: &RttInstance) -> Result<(Instance, u32)> {
    rtt.validate()?;
    let m = rtt.t.len();
    let classes = rtt.classes();
    let gadgets: Vec<usize> = (0..m).filter(|&i| rtt.t[i].len() == 2 && rtt.t[i].contains(&1)).collect();
    let n_in = m + 3 * classes + 3 * gadgets.len();
    let n_out = classes + gadgets.len();
    let mut flows = Vec::new();
    for (i, classes_i) in rtt.g.iter().enumerate() {
        let release = rtt.t[i].iter().min().copied().expect("nonempty hours") - 1;
        for &j in classes_i {
            flows.push(FlowRequest::unit(format!("s{i}_{j}"), i, j, release));
        }
    }
    for j in 0..classes {
        for k in 0..3 {
            flows.push(FlowRequest::unit(format!("c{j}_{k}"), m + 3 * j + k, j, 3));
        }
    }
    for (g, &i) in gadgets.iter().enumerate() {
        let out = classes + g;
        // {1,3} blocks hour 2, {1,2} blocks hour 3.
        let dashed = if rtt.t[i].contains(&3) { 1 } else { 2 };
        flows.push(FlowRequest::unit(format!("d{i}"), i, out, dashed));
        for k in 0..3 {
            flows.push(FlowRequest::unit(format!("o{i}_{k}"), m + 3 * classes + 3 * g + k, out, dashed + 1));
        }
    }
    Ok((Instance::new(SwitchSpec::uniform(n_in, n_out, 1)?, flows)?, 3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_instances_are_seeded_and_valid() {
        let a = random_instance(4, 3, 20, 3, 6, 9).unwrap();
        assert_eq!(a, random_instance(4, 3, 20, 3, 6, 9).unwrap());
        assert_ne!(a, random_instance(4, 3, 20, 3, 6, 10).unwrap());
        for (i, f) in a.flows().iter().enumerate() {
            assert!(f.demand <= a.kappa(i) && f.release < 6);
        }
        assert!(random_instance(2, 2, 0, 1, 1, 0).unwrap().is_empty());
    }

    #[test]
    fn avg_adversary_requires_long_tail() {
        assert!(gadget_avg_lower(4, 15).is_err());
        assert!(gadget_avg_lower(4, 16).is_ok());
    }

    #[test]
    fn max_adversary_trace_shape() {
        let mut adv = gadget_max_lower();
        let run = run_adversary(&mut adv, Policy::MaxCard).unwrap();
        assert_eq!(run.instance.len(), 6);
        assert_eq!(run.instance.switch().num_ports(), 7);
    }

    #[test]
    fn rtt_counts() {
        let rtt = RttInstance { t: vec![vec![1, 3], vec![1, 2], vec![2, 3]], g: vec![vec![0, 1], vec![1, 2], vec![0, 2]] };
        let (inst, rho) = rtt_reduce(&rtt).unwrap();
        assert_eq!(rho, 3);
        assert_eq!(inst.switch().m(), 3 + 3 * 3 + 3 * 2);
        assert_eq!(inst.switch().m_prime(), 3 + 2);
        assert_eq!(inst.len(), 6 + 9 + 2 * 4);
    }

    #[test]
    fn rtt_json_and_validation() {
        let rtt = RttInstance::from_json(r#"{"T":[[1,2]],"g":[[0,1]]}"#).unwrap();
        assert_eq!(rtt.classes(), 2);
        assert!(RttInstance::from_json(r#"{"T":[[1]],"g":[[0]]}"#).is_err());
        assert!(RttInstance::from_json(r#"{"T":[[1,4]],"g":[[0,1]]}"#).is_err());
        assert!(RttInstance::from_json(r#"{"T":[[1,2]],"g":[[0]]}"#).is_err());
    }
}
