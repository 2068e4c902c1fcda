//! Exhaustive oracles for tiny instances.
#![allow(dead_code)]

use std::collections::HashMap;

use switchsched::gen::RttInstance;
use switchsched::model::Instance;

/// Per-slot capacities and per-flow `(src_slot, dst_slot)`.
fn layout(inst: &Instance) -> (Vec<u64>, Vec<(usize, usize)>) {
    let sw = inst.switch();
    let caps = (0..sw.num_ports()).map(|s| sw.capacity(sw.port_at_slot(s)) as u64).collect();
    let ends = inst.flows().iter().map(|f| (sw.port_slot(f.src_port()), sw.port_slot(f.dst_port()))).collect();
    (caps, ends)
}

/// Minimum total response over all valid schedules, by dynamic programming
/// over (round, set of scheduled flows). Needs at most 16 flows.
pub fn opt_total_response(inst: &Instance) -> u64 {
    let n = inst.len();
    assert!(n <= 16);
    if n == 0 {
        return 0;
    }
    let (caps, ends) = layout(inst);
    let max_r = inst.max_release().unwrap();
    let full = (1u32 << n) - 1;
    let mut memo: HashMap<(u32, u32), u64> = HashMap::new();

    fn go(
        t: u32,
        done: u32,
        inst: &Instance,
        caps: &[u64],
        ends: &[(usize, usize)],
        max_r: u32,
        full: u32,
        memo: &mut HashMap<(u32, u32), u64>,
    ) -> u64 {
        if done == full {
            return 0;
        }
        // After the last release the cost grows by one per waiting flow per round.
        let remaining = (full & !done).count_ones() as u64;
        if t > max_r + 1 {
            return go(max_r + 1, done, inst, caps, ends, max_r, full, memo) + (t - max_r - 1) as u64 * remaining;
        }
        if let Some(&v) = memo.get(&(t, done)) {
            return v;
        }
        let avail: Vec<usize> = (0..inst.len()).filter(|&e| done & (1 << e) == 0 && inst.flow(e).release <= t).collect();
        let mut best = u64::MAX;
        // Idling once every flow is released never helps.
        let first = if t > max_r { 1 } else { 0 };
        for sub in first..(1u32 << avail.len()) {
            let mut load = vec![0u64; caps.len()];
            let mut mask = 0u32;
            let mut cost = 0u64;
            let mut ok = true;
            for (k, &e) in avail.iter().enumerate() {
                if sub & (1 << k) != 0 {
                    let d = inst.flow(e).demand as u64;
                    load[ends[e].0] += d;
                    load[ends[e].1] += d;
                    if load[ends[e].0] > caps[ends[e].0] || load[ends[e].1] > caps[ends[e].1] {
                        ok = false;
                        break;
                    }
                    mask |= 1 << e;
                    cost += (t + 1 - inst.flow(e).release) as u64;
                }
            }
            if ok {
                let rest = go(t + 1, done | mask, inst, caps, ends, max_r, full, memo);
                best = best.min(cost + rest);
            }
        }
        memo.insert((t, done), best);
        best
    }
    go(0, 0, inst, &caps, &ends, max_r, full, &mut memo)
}

/// Whether every flow fits into a round in `[r_e, r_e + rho)` without
/// exceeding any capacity. Depth-first search, most constrained flow first.
pub fn feasible_within(inst: &Instance, rho: u32) -> bool {
    let (caps, ends) = layout(inst);
    let mut load: HashMap<(usize, u32), u64> = HashMap::new();
    let mut placed = vec![false; inst.len()];

    fn fits(load: &HashMap<(usize, u32), u64>, caps: &[u64], slot: usize, t: u32, d: u64) -> bool {
        load.get(&(slot, t)).copied().unwrap_or(0) + d <= caps[slot]
    }

    fn dfs(inst: &Instance, rho: u32, caps: &[u64], ends: &[(usize, usize)], load: &mut HashMap<(usize, u32), u64>, placed: &mut [bool]) -> bool {
        let mut pick: Option<(usize, Vec<u32>)> = None;
        for e in 0..inst.len() {
            if placed[e] {
                continue;
            }
            let f = inst.flow(e);
            let d = f.demand as u64;
            let options: Vec<u32> = (f.release..f.release + rho).filter(|&t| fits(load, caps, ends[e].0, t, d) && fits(load, caps, ends[e].1, t, d)).collect();
            if options.is_empty() {
                return false;
            }
            if pick.as_ref().is_none_or(|p| options.len() < p.1.len()) {
                pick = Some((e, options));
            }
        }
        let Some((e, options)) = pick else {
            return true;
        };
        let d = inst.flow(e).demand as u64;
        placed[e] = true;
        for t in options {
            *load.entry((ends[e].0, t)).or_default() += d;
            *load.entry((ends[e].1, t)).or_default() += d;
            if dfs(inst, rho, caps, ends, load, placed) {
                return true;
            }
            *load.get_mut(&(ends[e].0, t)).unwrap() -= d;
            *load.get_mut(&(ends[e].1, t)).unwrap() -= d;
        }
        placed[e] = false;
        false
    }
    dfs(inst, rho, &caps, &ends, &mut load, &mut placed)
}

/// Optimal max response time.
pub fn opt_max_response(inst: &Instance) -> u32 {
    (1..).find(|&rho| feasible_within(inst, rho)).unwrap()
}

/// Tries every assignment of hours to (teacher, class) lessons.
pub fn rtt_satisfiable(rtt: &RttInstance) -> bool {
    let lessons: Vec<(usize, usize)> = rtt.g.iter().enumerate().flat_map(|(i, cs)| cs.iter().map(move |&j| (i, j))).collect();
    let mut teacher_busy = vec![[false; 4]; rtt.t.len()];
    let mut class_busy = vec![[false; 4]; rtt.classes()];

    fn go(k: usize, lessons: &[(usize, usize)], rtt: &RttInstance, tb: &mut [[bool; 4]], cb: &mut [[bool; 4]]) -> bool {
        let Some(&(i, j)) = lessons.get(k) else {
            return true;
        };
        for &h in &rtt.t[i] {
            let h = h as usize;
            if !tb[i][h] && !cb[j][h] {
                tb[i][h] = true;
                cb[j][h] = true;
                if go(k + 1, lessons, rtt, tb, cb) {
                    return true;
                }
                tb[i][h] = false;
                cb[j][h] = false;
            }
        }
        false
    }
    go(0, &lessons, rtt, &mut teacher_busy, &mut class_busy)
}
