//! k-means++ initialization.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{row_key, PointSet};
use crate::sampling::{d2_sample, uniform_sample, RandomSource};
use crate::state::CenterState;

/// Picks `k` centers: one uniformly, then `k − 1` by D²-sampling against the
/// incrementally maintained cache.
///
/// If the D² mass vanishes before `k` centers are placed (distinct points
/// whose squared distances underflow), the next center is drawn uniformly
/// from the points that do not coincide with an existing center.
pub fn kmeanspp_seed(points: &PointSet, k: usize, rng: &mut RandomSource) -> Result<CenterState> {
    if k == 0 {
        return Err(Error::usage("k must be >= 1"));
    }
    let distinct = points.distinct_count();
    if k > distinct {
        return Err(Error::InfeasibleK { k, distinct });
    }
    let first = uniform_sample(points.len(), rng)?;
    let mut state = CenterState::with_first_center(points, first)?;
    while state.k() < k {
        let next = match d2_sample(&state, rng) {
            Ok(i) => i,
            Err(Error::ZeroMass) => uniform_non_center(points, &state, rng)?,
            Err(e) => return Err(e),
        };
        state.push_center(points, next)?;
    }
    Ok(state)
}

fn uniform_non_center(
    points: &PointSet,
    state: &CenterState,
    rng: &mut RandomSource,
) -> Result<usize> {
    let taken: HashSet<Vec<u64>> = state
        .centers()
        .iter()
        .map(|&c| row_key(points.point(c)))
        .collect();
    let pool: Vec<usize> = (0..points.len())
        .filter(|&i| !taken.contains(&row_key(points.point(i))))
        .collect();
    let pick = uniform_sample(pool.len(), rng).map_err(|_| Error::InfeasibleK {
        k: state.k() + 1,
        distinct: state.k(),
    })?;
    Ok(pool[pick])
}
