//! LocalSearch++: D²-sample a point and swap it for the center whose removal
//! hurts least, keeping the swap only on strict improvement.
//!
//! The swap engine evaluates all k removal candidates in a single pass over
//! the points using the two-closest cache. For a sampled point `p`, every
//! point `x` contributes `min(d(x,p), first(x))` to every candidate except
//! the one owning `first(x)`, which instead pays `min(d(x,p), second(x))`.
//! Candidates within a rounding window of the minimum are then re-summed in
//! point order, the same order the stored total uses, so the winning cost
//! is bit-identical to a from-scratch `cost()` of the swapped center set.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sq_dist, PointSet};
use crate::sampling::{d2_sample, RandomSource};
use crate::state::CenterState;

/// Relative width of the window in which one-pass candidate costs are
/// re-evaluated exactly before picking the argmin.
const TIE_WINDOW: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapCandidate {
    pub slot: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapOutcome {
    /// `None` when the D² mass was zero and nothing could be drawn.
    pub sampled_point: Option<usize>,
    /// Slot whose center was replaced; set only when the swap was accepted.
    pub removed_center: Option<usize>,
    pub new_cost: f64,
    pub cost_before: f64,
    pub accepted: bool,
    /// The current cost is zero, which is globally optimal.
    pub converged: bool,
}

/// Best center to remove when adding point `p`, with the resulting cost.
/// Ties go to the lowest slot.
pub fn best_swap(points: &PointSet, state: &CenterState, p: usize) -> Result<SwapCandidate> {
    if p >= points.len() {
        return Err(Error::usage(format!(
            "point index {p} out of range for {} points",
            points.len()
        )));
    }
    let k = state.k();
    let pc = points.point(p);
    let first = state.first();
    let second = state.second();

    let mut to_p = Vec::with_capacity(points.len());
    let mut base = 0.0;
    let mut correction = vec![0.0; k];
    for (i, x) in points.rows().enumerate() {
        let d = sq_dist(x, pc);
        let keep = d.min(first[i].dist);
        base += keep;
        correction[first[i].slot] += d.min(second[i].dist) - keep;
        to_p.push(d);
    }

    let approx: Vec<f64> = correction.iter().map(|c| base + c).collect();
    let lowest = approx.iter().copied().fold(f64::INFINITY, f64::min);
    let window = TIE_WINDOW * lowest.max(state.total_cost());

    let mut best: Option<SwapCandidate> = None;
    for (slot, &a) in approx.iter().enumerate() {
        if a > lowest + window {
            continue;
        }
        let cost = exact_swap_cost(state, &to_p, slot);
        if best.is_none_or(|b| cost < b.cost) {
            best = Some(SwapCandidate { slot, cost });
        }
    }
    Ok(best.expect("k >= 1 leaves at least one candidate"))
}

/// `cost(P, C ∖ {slot} ∪ {p})` summed in point order from cached distances.
fn exact_swap_cost(state: &CenterState, to_p: &[f64], slot: usize) -> f64 {
    let first = state.first();
    let second = state.second();
    let mut total = 0.0;
    for (i, &d) in to_p.iter().enumerate() {
        let remaining = if first[i].slot == slot {
            second[i].dist
        } else {
            first[i].dist
        };
        total += d.min(remaining);
    }
    total
}

/// One LocalSearch++ step. Leaves `state` untouched unless the best swap
/// strictly lowers the cost.
pub fn local_search_step(
    points: &PointSet,
    state: &mut CenterState,
    rng: &mut RandomSource,
) -> Result<SwapOutcome> {
    let before = state.total_cost();
    let p = match d2_sample(state, rng) {
        Ok(p) => p,
        Err(Error::ZeroMass) => {
            return Ok(SwapOutcome {
                sampled_point: None,
                removed_center: None,
                new_cost: before,
                cost_before: before,
                accepted: false,
                converged: true,
            })
        }
        Err(e) => return Err(e),
    };
    let best = best_swap(points, state, p)?;
    let accepted = best.cost < before;
    if accepted {
        state.replace_center(points, best.slot, p)?;
        debug_assert_eq!(state.total_cost().to_bits(), best.cost.to_bits());
    }
    Ok(SwapOutcome {
        sampled_point: Some(p),
        removed_center: accepted.then_some(best.slot),
        new_cost: state.total_cost(),
        cost_before: before,
        accepted,
        converged: false,
    })
}

/// Number of local-search steps for a given ε: `ceil(ε·k)`, at least 1.
pub fn steps_for_epsilon(epsilon: f64, k: usize) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::usage(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    // Absorb representation error such as 0.07 * 100 = 7.000000000000001.
    let raw = epsilon * k as f64;
    let steps = (raw - raw * 1e-12).ceil() as usize;
    Ok(steps.max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub i: usize,
    pub cost: f64,
    pub accepted: bool,
    pub sampled: Option<usize>,
    pub removed: Option<usize>,
    /// Wall time of the step in nanoseconds; excluded from determinism checks.
    pub elapsed_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    /// Record 0 is the starting state; record `i` follows step `i`.
    pub records: Vec<StepRecord>,
    pub converged: bool,
}

impl Trajectory {
    pub fn steps_taken(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_cost(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.cost)
    }

    pub fn accepted_count(&self) -> usize {
        self.records.iter().skip(1).filter(|r| r.accepted).count()
    }

    pub fn costs(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.cost)
    }
}

pub fn run_local_search(
    points: &PointSet,
    state: &mut CenterState,
    steps: usize,
    rng: &mut RandomSource,
) -> Result<Trajectory> {
    run_local_search_with(points, state, steps, rng, |_, _| {})
}

/// Runs up to `steps` steps, stopping early once the cost reaches zero.
/// `observe` sees the state after every recorded step, including step 0.
pub fn run_local_search_with<F>(
    points: &PointSet,
    state: &mut CenterState,
    steps: usize,
    rng: &mut RandomSource,
    mut observe: F,
) -> Result<Trajectory>
where
    F: FnMut(usize, &CenterState),
{
    let mut traj = Trajectory {
        records: Vec::with_capacity(steps + 1),
        converged: false,
    };
    traj.records.push(StepRecord {
        i: 0,
        cost: state.total_cost(),
        accepted: false,
        sampled: None,
        removed: None,
        elapsed_ns: 0,
    });
    observe(0, state);
    for i in 1..=steps {
        let start = Instant::now();
        let out = local_search_step(points, state, rng)?;
        if out.converged {
            traj.converged = true;
            break;
        }
        traj.records.push(StepRecord {
            i,
            cost: out.new_cost,
            accepted: out.accepted,
            sampled: out.sampled_point,
            removed: out.removed_center,
            elapsed_ns: start.elapsed().as_nanos() as u64,
        });
        observe(i, state);
    }
    Ok(traj)
}
