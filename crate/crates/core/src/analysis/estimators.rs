//! Monte Carlo frequency estimators for the sampling behaviour of D² draws
//! and single local-search steps.

use crate::analysis::oracle::OptClustering;
use crate::analysis::structure::cluster_costs;
use crate::error::{Error, Result};
use crate::geometry::{sq_dist, PointSet};
use crate::localsearch::local_search_step;
use crate::sampling::{d2_sample, d2_sample_within, RandomSource};
use crate::state::CenterState;

/// Fraction of within-cluster D² draws landing within the `(β − 1)`
/// settling radius `‖p − μ_Q‖² <= ((β − 1)/|Q|)·cost(Q, μ_Q)`.
pub fn settling_frequency(
    points: &PointSet,
    state: &CenterState,
    reference: &OptClustering,
    cluster: usize,
    beta: f64,
    draws: usize,
    rng: &mut RandomSource,
) -> Result<f64> {
    if cluster >= reference.k() {
        return Err(Error::usage(format!("no cluster {cluster}")));
    }
    let members: Vec<usize> = (0..points.len())
        .filter(|&i| reference.assignment[i] == cluster)
        .collect();
    let mu = &reference.centroids[cluster];
    let radius = (beta - 1.0) / members.len() as f64 * reference.per_cluster_cost[cluster];
    let mut hits = 0usize;
    for _ in 0..draws {
        let p = d2_sample_within(state, &members, rng)?;
        if sq_dist(points.point(p), mu) <= radius {
            hits += 1;
        }
    }
    Ok(hits as f64 / draws as f64)
}

/// Fraction of D² draws landing in a cluster with `cost(Q, C) >= β·cost(Q, μ_Q)`.
pub fn costly_cluster_frequency(
    state: &CenterState,
    reference: &OptClustering,
    beta: f64,
    draws: usize,
    rng: &mut RandomSource,
) -> Result<f64> {
    let current = cluster_costs(state, reference);
    let costly: Vec<bool> = current
        .iter()
        .zip(&reference.per_cluster_cost)
        .map(|(c, opt)| *c >= beta * opt)
        .collect();
    let mut hits = 0usize;
    for _ in 0..draws {
        let p = d2_sample(state, rng)?;
        if costly[reference.assignment[p]] {
            hits += 1;
        }
    }
    Ok(hits as f64 / draws as f64)
}

/// Fraction of independent single steps from `state` that reach
/// `new_cost <= shrink · cost_before`.
pub fn step_success_frequency(
    points: &PointSet,
    state: &CenterState,
    shrink: f64,
    trials: usize,
    rng: &mut RandomSource,
) -> Result<f64> {
    let mut hits = 0usize;
    for _ in 0..trials {
        let mut trial = state.clone();
        let out = local_search_step(points, &mut trial, rng)?;
        if out.new_cost <= shrink * out.cost_before {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}
