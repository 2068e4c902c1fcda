//! Discrete-round simulator: Poisson workloads, policy runs and LP-bound
//! comparison.

use std::io::{Read, Write};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::art::art_lower_bound;
use crate::error::{Error, Result};
use crate::model::{response_from_rounds, FlowRequest, Instance, SwitchSpec};
use crate::mrt::mrt_lower_bound;
use crate::online::{run_policy, Policy};

/// Environment variable holding the worker pool size.
pub const WORKERS_ENV: &str = "SWITCHSCHED_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadConfig {
    /// Ports per side.
    pub m: usize,
    /// Mean arrivals per round.
    pub rate: f64,
    /// Rounds with arrivals.
    pub rounds: u32,
    pub seed: u64,
}

impl WorkloadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.rounds == 0 || self.rate < 0.0 || !self.rate.is_finite() {
            return Err(Error::Config(format!("need m >= 1, T >= 1 and finite M >= 0, got m={}, M={}, T={}", self.m, self.rate, self.rounds)));
        }
        Ok(())
    }
}

/// Unit flows on an `m x m` unit switch. Each round draws a Poisson count
/// with mean `rate`, then endpoints uniformly.
pub fn poisson_workload(cfg: &WorkloadConfig) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let arrivals = (cfg.rate > 0.0).then(|| Poisson::new(cfg.rate).expect("positive finite rate"));
    let mut flows = Vec::new();
    for t in 0..cfg.rounds {
        let k = arrivals.as_ref().map_or(0, |p| p.sample(&mut rng) as u64);
        for _ in 0..k {
            let src = rng.random_range(0..cfg.m);
            let dst = rng.random_range(0..cfg.m);
            flows.push(FlowRequest::unit(format!("f{}", flows.len()), src, dst, t));
        }
    }
    Ok(Instance::new(SwitchSpec::uniform(cfg.m, cfg.m, 1)?, flows)?)
}

/// LP lower bounds for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpBounds {
    /// Lower bound on total response time.
    pub total: f64,
    /// `total / n`.
    pub average: f64,
    /// Lower bound on max response time.
    pub rho_star: u32,
}

/// `hint` is any achievable max response; it caps the search for `rho`.
pub fn lp_bounds(inst: &Instance, hint: Option<u32>) -> Result<LpBounds> {
    if inst.is_empty() {
        return Ok(LpBounds { total: 0.0, average: 0.0, rho_star: 0 });
    }
    let total = art_lower_bound(inst)?;
    let rho_star = mrt_lower_bound(inst, hint)?;
    Ok(LpBounds { total, average: total / inst.len() as f64, rho_star })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub policy: String,
    pub m: usize,
    #[serde(rename = "M")]
    pub rate: f64,
    #[serde(rename = "T")]
    pub rounds: u32,
    pub seed: u64,
    pub avg_response: f64,
    pub max_response: u64,
    pub lp_avg_bound: Option<f64>,
    pub lp_max_bound: Option<u32>,
    pub avg_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub runtime_ms: u64,
}

/// Runs `policy` until the backlog drains and compares against `bounds`.
/// Ratios are left empty when the bound is zero.
pub fn run_trial(cfg: &WorkloadConfig, inst: &Instance, policy: Policy, bounds: Option<&LpBounds>, timing: bool) -> Result<TrialResult> {
    let start = Instant::now();
    let rounds = run_policy(inst, policy, None)?;
    let elapsed = start.elapsed().as_millis() as u64;
    let report = response_from_rounds(inst, &rounds)?;
    let ratio = |value: f64, bound: f64| (bound > 0.0).then(|| value / bound);
    Ok(TrialResult {
        policy: policy.name().to_string(),
        m: cfg.m,
        rate: cfg.rate,
        rounds: cfg.rounds,
        seed: cfg.seed,
        avg_response: report.average,
        max_response: report.maximum,
        lp_avg_bound: bounds.map(|b| b.average),
        lp_max_bound: bounds.map(|b| b.rho_star),
        avg_ratio: bounds.and_then(|b| ratio(report.average, b.average)),
        max_ratio: bounds.and_then(|b| ratio(report.maximum as f64, b.rho_star as f64)),
        runtime_ms: if timing { elapsed } else { 0 },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub rates: Vec<f64>,
    pub horizons: Vec<u32>,
    pub seeds: Vec<u64>,
    pub policies: Vec<Policy>,
    pub lp_bounds: bool,
    /// Record wall-clock runtimes. Off by default so outputs are reproducible.
    pub timing: bool,
}

/// One instance per `(M, T, seed)`, every policy on each. Instances run in
/// parallel; the output is sorted by `(policy, M, T, seed)`.
pub fn run_experiment(exp: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    let mut cfgs = Vec::new();
    for &rate in &exp.rates {
        for &rounds in &exp.horizons {
            for &seed in &exp.seeds {
                cfgs.push(WorkloadConfig { m: exp.m, rate, rounds, seed });
            }
        }
    }
    let run_one = |cfg: &WorkloadConfig| -> Result<Vec<TrialResult>> {
        let inst = poisson_workload(cfg)?;
        let mut trials = exp.policies.iter().map(|&p| run_trial(cfg, &inst, p, None, exp.timing)).collect::<Result<Vec<_>>>()?;
        if exp.lp_bounds {
            let hint = trials.iter().map(|r| r.max_response as u32).min();
            let bounds = lp_bounds(&inst, hint)?;
            trials = exp.policies.iter().map(|&p| run_trial(cfg, &inst, p, Some(&bounds), exp.timing)).collect::<Result<Vec<_>>>()?;
        }
        Ok(trials)
    };
    let batches: Vec<Result<Vec<TrialResult>>> = worker_pool()?.install(|| cfgs.par_iter().map(run_one).collect());
    let mut out = Vec::new();
    for b in batches {
        out.extend(b?);
    }
    sort_results(&mut out);
    Ok(out)
}

fn policy_rank(name: &str) -> usize {
    Policy::ALL.iter().position(|p| p.name() == name).unwrap_or(usize::MAX)
}

pub fn sort_results(results: &mut [TrialResult]) {
    results.sort_by(|a, b| {
        (policy_rank(&a.policy), &a.policy)
            .cmp(&(policy_rank(&b.policy), &b.policy))
            .then(a.rate.total_cmp(&b.rate))
            .then(a.rounds.cmp(&b.rounds))
            .then(a.seed.cmp(&b.seed))
    });
}

/// Pool sized by [`WORKERS_ENV`], or rayon's default when unset.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Error::Config(format!("{WORKERS_ENV} must be positive")));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

/// Means over seeds for one `(policy, M, T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub policy: String,
    pub m: usize,
    #[serde(rename = "M")]
    pub rate: f64,
    #[serde(rename = "T")]
    pub rounds: u32,
    pub trials: usize,
    pub avg_response: f64,
    pub max_response: f64,
    pub lp_avg_bound: Option<f64>,
    pub lp_max_bound: Option<f64>,
    pub avg_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
}

fn mean_opt(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.collect::<Option<Vec<_>>>()?;
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Groups by `(policy, m, M, T)` in first-seen order after sorting. Optional
/// columns are averaged only when every trial in the group has them.
pub fn aggregate(results: &[TrialResult]) -> Vec<SummaryRow> {
    let mut sorted = results.to_vec();
    sort_results(&mut sorted);
    let mut rows = Vec::new();
    for group in sorted.chunk_by(|a, b| a.policy == b.policy && a.m == b.m && a.rate == b.rate && a.rounds == b.rounds) {
        let n = group.len() as f64;
        let first = &group[0];
        rows.push(SummaryRow {
            policy: first.policy.clone(),
            m: first.m,
            rate: first.rate,
            rounds: first.rounds,
            trials: group.len(),
            avg_response: group.iter().map(|r| r.avg_response).sum::<f64>() / n,
            max_response: group.iter().map(|r| r.max_response as f64).sum::<f64>() / n,
            lp_avg_bound: mean_opt(group.iter().map(|r| r.lp_avg_bound)),
            lp_max_bound: mean_opt(group.iter().map(|r| r.lp_max_bound.map(f64::from))),
            avg_ratio: mean_opt(group.iter().map(|r| r.avg_ratio)),
            max_ratio: mean_opt(group.iter().map(|r| r.max_ratio)),
        });
    }
    rows
}

pub fn write_csv<T: Serialize, W: Write>(w: W, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_results_csv<R: Read>(r: R) -> Result<Vec<TrialResult>> {
    csv::Reader::from_reader(r).deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rate: f64, seed: u64) -> WorkloadConfig {
        WorkloadConfig { m: 4, rate, rounds: 5, seed }
    }

    #[test]
    fn zero_rate_is_empty() {
        assert!(poisson_workload(&cfg(0.0, 1)).unwrap().is_empty());
        assert!(poisson_workload(&WorkloadConfig { rounds: 0, ..cfg(1.0, 1) }).is_err());
    }

    #[test]
    fn workload_is_seeded() {
        let a = poisson_workload(&cfg(3.0, 7)).unwrap();
        assert_eq!(a.to_json(), poisson_workload(&cfg(3.0, 7)).unwrap().to_json());
        assert_ne!(a.to_json(), poisson_workload(&cfg(3.0, 8)).unwrap().to_json());
    }

    #[test]
    fn single_flow_trial() {
        let inst = Instance::new(SwitchSpec::uniform(1, 1, 1).unwrap(), vec![FlowRequest::unit("a", 0, 0, 2)]).unwrap();
        let b = lp_bounds(&inst, None).unwrap();
        for p in Policy::ALL {
            let r = run_trial(&cfg(1.0, 0), &inst, p, Some(&b), false).unwrap();
            assert_eq!((r.avg_response, r.max_response), (1.0, 1));
            assert_eq!((r.avg_ratio, r.max_ratio), (Some(2.0), Some(1.0)));
        }
    }

    #[test]
    fn csv_header_and_round_trip() {
        let inst = poisson_workload(&cfg(2.0, 3)).unwrap();
        let rows: Vec<TrialResult> = Policy::ALL.iter().map(|&p| run_trial(&cfg(2.0, 3), &inst, p, None, false).unwrap()).collect();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "policy,m,M,T,seed,avg_response,max_response,lp_avg_bound,lp_max_bound,avg_ratio,max_ratio,runtime_ms"
        );
        assert_eq!(read_results_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn aggregate_identical_and_single() {
        let inst = poisson_workload(&cfg(2.0, 3)).unwrap();
        let r = run_trial(&cfg(2.0, 3), &inst, Policy::MaxCard, None, false).unwrap();
        let one = aggregate(std::slice::from_ref(&r));
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].avg_response, r.avg_response);
        let ten = aggregate(&vec![r.clone(); 10]);
        assert_eq!(ten.len(), 1);
        assert_eq!(ten[0].trials, 10);
        assert!((ten[0].avg_response - r.avg_response).abs() < 1e-12);
        assert_eq!(ten[0].max_response, r.max_response as f64);
    }
}
