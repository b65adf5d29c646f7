//! Lloyd refinement of a seeded or locally-searched solution.
//!
//! Lloyd moves centers to centroids, which are generally not input points,
//! so the refined solution is held as explicit coordinates.

use serde::{Deserialize, Serialize};

use crate::geometry::{cost, sq_dist, PointSet};
use crate::state::CenterState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateCenters {
    pub centers: Vec<Vec<f64>>,
    pub cost: f64,
    /// Cost before refinement followed by the cost after each iteration run.
    pub history: Vec<f64>,
}

/// Runs up to `iters` assign/update rounds starting from `state`'s centers.
/// Empty clusters keep their previous coordinates. A round whose cost would
/// rise through rounding is discarded and refinement stops.
pub fn lloyd_refine(points: &PointSet, state: &CenterState, iters: usize) -> CoordinateCenters {
    let mut centers = state.center_coords(points);
    let mut current = state.total_cost();
    let mut history = vec![current];
    let d = points.dim();
    for _ in 0..iters {
        let k = centers.len();
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for x in points.rows() {
            let j = nearest(x, &centers);
            counts[j] += 1;
            for (s, v) in sums[j].iter_mut().zip(x) {
                *s += v;
            }
        }
        let next: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&counts)
            .zip(&centers)
            .map(|((s, &c), prev)| {
                if c == 0 {
                    prev.clone()
                } else {
                    s.into_iter().map(|v| v / c as f64).collect()
                }
            })
            .collect();
        let next_cost = cost(points, &next).expect("k >= 1 and matching dimensions");
        if next_cost > current {
            break;
        }
        let stalled = next == centers;
        centers = next;
        current = next_cost;
        history.push(current);
        if stalled {
            break;
        }
    }
    CoordinateCenters {
        centers,
        cost: current,
        history,
    }
}

fn nearest(x: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (j, c) in centers.iter().enumerate() {
        let dist = sq_dist(x, c);
        if dist < best.0 {
            best = (dist, j);
        }
    }
    best.1
}
