//! Structural diagnostics of a candidate solution against a reference
//! clustering: settledness, matched/lonely candidates, reassignment costs,
//! γ-good clusters and approximation factors.

use serde::{Deserialize, Serialize};

use crate::analysis::oracle::OptClustering;
use crate::error::{Error, Result};
use crate::geometry::{nearest_sq_dist, sq_dist, PointSet};
use crate::state::CenterState;

/// Discretized β values `{2^i : 3 <= i <= floor(0.3·log2 k)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegalBetaSet {
    values: Vec<f64>,
}

impl LegalBetaSet {
    /// Legal β values for `k` candidates. Empty for k < 1024.
    pub fn for_k(k: usize) -> Self {
        let top = if k == 0 {
            0
        } else {
            (0.3 * (k as f64).log2()).floor() as i32
        };
        Self {
            values: (3..=top).map(|i| 2f64.powi(i)).collect(),
        }
    }

    /// `{2^lo, …, 2^hi}` regardless of k.
    pub fn powers_of_two(lo: i32, hi: i32) -> Self {
        Self {
            values: (lo..=hi).map(|i| 2f64.powi(i)).collect(),
        }
    }

    pub fn custom(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return Err(Error::usage("beta values must be positive and finite"));
        }
        Ok(Self { values })
    }

    /// Union with another set, sorted ascending without duplicates.
    pub fn union(mut self, other: &LegalBetaSet) -> Self {
        self.values.extend_from_slice(&other.values);
        self.values.sort_by(f64::total_cmp);
        self.values.dedup();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// β for the one-step analysis: the largest power of two strictly below
/// `min{k^0.3, α^{2/3}}`, so that `m/2 <= β < m`. Clamped to at least 1.
pub fn choose_beta(k: usize, alpha: f64) -> f64 {
    let cap = (k as f64).powf(0.3).min(alpha.powf(2.0 / 3.0));
    if !cap.is_finite() || cap <= 1.0 {
        return if cap.is_infinite() {
            (k as f64).powf(0.3).max(1.0)
        } else {
            1.0
        };
    }
    let mut e = cap.log2().floor();
    if 2f64.powf(e) >= cap {
        e -= 1.0;
    }
    2f64.powf(e).max(1.0)
}

/// `cost(Q, C)` for every reference cluster, summed in point order.
pub fn cluster_costs(state: &CenterState, reference: &OptClustering) -> Vec<f64> {
    let mut out = vec![0.0; reference.k()];
    for (f, &a) in state.first().iter().zip(&reference.assignment) {
        out[a] += f.dist;
    }
    out
}

/// For each cluster, the smallest `‖c − μ_Q‖²` over candidate centers that
/// are members of Q (infinity if no candidate lies in Q).
fn closest_member_center(
    points: &PointSet,
    state: &CenterState,
    reference: &OptClustering,
) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; reference.k()];
    for &c in state.centers() {
        let q = reference.assignment[c];
        let d = sq_dist(points.point(c), &reference.centroids[q]);
        if d < best[q] {
            best[q] = d;
        }
    }
    best
}

/// Per-cluster β-settledness. A candidate only settles the cluster it
/// belongs to, however close it is to another cluster's centroid.
pub fn settled_flags(
    points: &PointSet,
    state: &CenterState,
    reference: &OptClustering,
    beta: f64,
) -> Vec<bool> {
    let sizes = cluster_sizes(reference);
    closest_member_center(points, state, reference)
        .into_iter()
        .enumerate()
        .map(|(q, d)| d <= (beta / sizes[q] as f64) * reference.per_cluster_cost[q])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaCount {
    pub beta: f64,
    pub unsettled: usize,
    /// Whether the count stayed within `30k/√β` (recorded, never asserted).
    pub within_bound: bool,
}

/// Number of β-unsettled reference clusters for every β in `betas`.
pub fn settledness_report(
    points: &PointSet,
    state: &CenterState,
    reference: &OptClustering,
    betas: &LegalBetaSet,
) -> Vec<BetaCount> {
    let sizes = cluster_sizes(reference);
    let closest = closest_member_center(points, state, reference);
    let k = state.k() as f64;
    betas
        .values()
        .iter()
        .map(|&beta| {
            let unsettled = closest
                .iter()
                .enumerate()
                .filter(|&(q, &d)| d > (beta / sizes[q] as f64) * reference.per_cluster_cost[q])
                .count();
            BetaCount {
                beta,
                unsettled,
                within_bound: unsettled as f64 <= 30.0 * k / beta.sqrt(),
            }
        })
        .collect()
}

fn cluster_sizes(reference: &OptClustering) -> Vec<usize> {
    let mut sizes = vec![0; reference.k()];
    for &a in &reference.assignment {
        sizes[a] += 1;
    }
    sizes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterRole {
    /// Nearest candidate of exactly one reference centroid, its mate.
    Matched { mate: usize },
    /// Nearest candidate of no reference centroid.
    Lonely,
    /// Nearest candidate of two or more reference centroids.
    Shared,
}

/// Assignment of reference centroids to their nearest candidate centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// Candidate slot each reference cluster is assigned to.
    pub assigned: Vec<usize>,
    /// Role of each candidate slot.
    pub roles: Vec<CenterRole>,
}

impl Matching {
    /// `(slot, mate cluster)` pairs, by slot.
    pub fn matched(&self) -> Vec<(usize, usize)> {
        self.roles
            .iter()
            .enumerate()
            .filter_map(|(s, r)| match r {
                CenterRole::Matched { mate } => Some((s, *mate)),
                _ => None,
            })
            .collect()
    }

    pub fn lonely(&self) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == CenterRole::Lonely)
            .map(|(s, _)| s)
            .collect()
    }

    /// Slot whose mate is `cluster`, if the cluster is matched.
    pub fn mate_slot(&self, cluster: usize) -> Option<usize> {
        let slot = self.assigned[cluster];
        match self.roles[slot] {
            CenterRole::Matched { mate } if mate == cluster => Some(slot),
            _ => None,
        }
    }
}

/// Assigns every reference centroid to its nearest candidate (ties to the
/// lowest slot) and classifies candidates as matched, lonely or shared.
pub fn match_and_lonely(
    points: &PointSet,
    state: &CenterState,
    reference: &OptClustering,
) -> Matching {
    let coords = state.center_coords(points);
    let assigned: Vec<usize> = reference
        .centroids
        .iter()
        .map(|mu| {
            let mut best = (f64::INFINITY, 0);
            for (slot, c) in coords.iter().enumerate() {
                let d = sq_dist(mu, c);
                if d < best.0 {
                    best = (d, slot);
                }
            }
            best.1
        })
        .collect();
    let mut hits: Vec<Vec<usize>> = vec![Vec::new(); state.k()];
    for (q, &slot) in assigned.iter().enumerate() {
        hits[slot].push(q);
    }
    let roles = hits
        .iter()
        .map(|h| match h.as_slice() {
            [] => CenterRole::Lonely,
            [mate] => CenterRole::Matched { mate: *mate },
            _ => CenterRole::Shared,
        })
        .collect();
    Matching { assigned, roles }
}

/// Cost increase from removing the candidate in `slot`. For a matched
/// candidate the mate's cluster is excluded from both terms.
///
/// Both terms are summed over the same points in index order; the removal
/// term reads the second-closest cache for points owned by `slot`.
pub fn reassignment_cost(
    state: &CenterState,
    reference: &OptClustering,
    matching: &Matching,
    slot: usize,
) -> Result<f64> {
    let excluded = match matching.roles.get(slot) {
        Some(CenterRole::Matched { mate }) => Some(*mate),
        Some(CenterRole::Lonely) => None,
        _ => {
            return Err(Error::usage(format!(
                "slot {slot} is neither matched nor lonely"
            )))
        }
    };
    let first = state.first();
    let second = state.second();
    let mut without = 0.0;
    let mut with = 0.0;
    for (i, &a) in reference.assignment.iter().enumerate() {
        if excluded == Some(a) {
            continue;
        }
        with += first[i].dist;
        without += if first[i].slot == slot {
            second[i].dist
        } else {
            first[i].dist
        };
    }
    Ok(without - with)
}

/// `cost(P_c, C)` and `cost(P_c, C*)` for the points `P_c` whose nearest
/// candidate is `slot`.
pub fn owned_costs(
    points: &PointSet,
    state: &CenterState,
    reference: &OptClustering,
    slot: usize,
) -> (f64, f64) {
    let mut current = 0.0;
    let mut optimal = 0.0;
    for (i, f) in state.first().iter().enumerate() {
        if f.slot == slot {
            current += f.dist;
            optimal += nearest_sq_dist(points.point(i), &reference.centroids);
        }
    }
    (current, optimal)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterGoodness {
    /// Mate slot when the cluster is matched.
    pub mate: Option<usize>,
    pub m_good: bool,
    pub l_good: bool,
    /// Unmatched cluster with no lonely candidate: L-goodness is undefined
    /// and reported as not good.
    pub l_undefined: bool,
}

/// M-γ-good / L-γ-good classification of every reference cluster.
///
/// A cluster is good when `cost(Q, C) − reassign − 100·cost(Q, μ_Q)`
/// exceeds `γ/(10⁴k)·cost(P, C)`; matched clusters use their mate's
/// reassignment cost, unmatched ones the cheapest lonely candidate.
pub fn gamma_good_flags(
    state: &CenterState,
    reference: &OptClustering,
    matching: &Matching,
    gamma: f64,
) -> Result<Vec<ClusterGoodness>> {
    let current = cluster_costs(state, reference);
    let threshold = gamma / (1e4 * state.k() as f64) * state.total_cost();
    let lonely = matching.lonely();
    let cheapest_lonely = lonely
        .iter()
        .map(|&s| reassignment_cost(state, reference, matching, s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.min(r)))
        });

    (0..reference.k())
        .map(|q| {
            let slack = |reassign: f64| {
                current[q] - reassign - 100.0 * reference.per_cluster_cost[q] > threshold
            };
            Ok(match matching.mate_slot(q) {
                Some(slot) => ClusterGoodness {
                    mate: Some(slot),
                    m_good: slack(reassignment_cost(state, reference, matching, slot)?),
                    l_good: false,
                    l_undefined: false,
                },
                None => ClusterGoodness {
                    mate: None,
                    m_good: false,
                    l_good: cheapest_lonely.is_some_and(slack),
                    l_undefined: cheapest_lonely.is_none(),
                },
            })
        })
        .collect()
}

/// Share of `cost(P, C)` held by M-good and by L-good clusters.
pub fn good_mass_fractions(
    state: &CenterState,
    reference: &OptClustering,
    flags: &[ClusterGoodness],
) -> (f64, f64) {
    let total = state.total_cost();
    if total.is_nan() || total <= 0.0 {
        return (0.0, 0.0);
    }
    let current = cluster_costs(state, reference);
    let mut m = 0.0;
    let mut l = 0.0;
    for (c, f) in current.iter().zip(flags) {
        if f.m_good {
            m += c;
        }
        if f.l_good {
            l += c;
        }
    }
    (m / total, l / total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxFactor {
    pub value: f64,
    /// Set when the reference is planted rather than optimal, making the
    /// value an upper bound on the true factor.
    pub upper_bound: bool,
}

/// `cost / reference cost`; infinite when only the reference is zero, 1
/// when both are.
pub fn approximation_factor(cost: f64, reference: &OptClustering) -> ApproxFactor {
    let value = if reference.total_cost > 0.0 {
        cost / reference.total_cost
    } else if cost > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    ApproxFactor {
        value,
        upper_bound: !reference.is_exact(),
    }
}

/// Snapshot of every structural quantity for one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub alpha: ApproxFactor,
    pub unsettled_counts: Vec<BetaCount>,
    pub matched: Vec<(usize, usize)>,
    pub lonely: Vec<usize>,
    pub reassign_costs: Vec<(usize, f64)>,
    pub beta: f64,
    pub gamma: f64,
    pub m_good: Vec<bool>,
    pub l_good: Vec<bool>,
    pub l_undefined: bool,
    pub m_good_mass: f64,
    pub l_good_mass: f64,
    /// Whether either good-mass fraction reached 1/500 (observational).
    pub mass_bound_held: bool,
}

impl StructureReport {
    /// `gamma` defaults to `√β` with β from [`choose_beta`].
    pub fn compute(
        points: &PointSet,
        state: &CenterState,
        reference: &OptClustering,
        betas: &LegalBetaSet,
        gamma: Option<f64>,
    ) -> Result<Self> {
        let alpha = approximation_factor(state.total_cost(), reference);
        let beta = choose_beta(state.k(), alpha.value);
        let gamma = gamma.unwrap_or_else(|| beta.sqrt());
        let matching = match_and_lonely(points, state, reference);
        let reassign_costs = matching
            .roles
            .iter()
            .enumerate()
            .filter(|(_, r)| **r != CenterRole::Shared)
            .map(|(s, _)| Ok((s, reassignment_cost(state, reference, &matching, s)?)))
            .collect::<Result<Vec<_>>>()?;
        let flags = gamma_good_flags(state, reference, &matching, gamma)?;
        let (m_good_mass, l_good_mass) = good_mass_fractions(state, reference, &flags);
        Ok(Self {
            alpha,
            unsettled_counts: settledness_report(points, state, reference, betas),
            matched: matching.matched(),
            lonely: matching.lonely(),
            reassign_costs,
            beta,
            gamma,
            m_good: flags.iter().map(|f| f.m_good).collect(),
            l_good: flags.iter().map(|f| f.l_good).collect(),
            l_undefined: flags.iter().any(|f| f.l_undefined),
            m_good_mass,
            l_good_mass,
            mass_bound_held: m_good_mass >= 1.0 / 500.0 || l_good_mass >= 1.0 / 500.0,
        })
    }
}
