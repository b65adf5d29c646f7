//! Reference solutions: the exact brute-force optimum for tiny instances and
//! the planted partition of generated instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sq_dist, PointSet};

pub const ORACLE_MAX_N: usize = 12;
pub const ORACLE_MAX_K: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    /// Provably optimal (exhaustive enumeration).
    Exact,
    /// Generating partition; its cost upper-bounds the optimum.
    Planted,
}

/// A reference clustering `C*` with centroids, partition and per-cluster costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptClustering {
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub per_cluster_cost: Vec<f64>,
    pub total_cost: f64,
    pub kind: ReferenceKind,
}

impl OptClustering {
    /// Builds the clustering induced by `labels`. Labels are compacted to
    /// `0..k'` in increasing label order, dropping unused values.
    pub fn from_assignment(
        points: &PointSet,
        labels: &[usize],
        kind: ReferenceKind,
    ) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::usage(format!(
                "{} labels for {} points",
                labels.len(),
                points.len()
            )));
        }
        let max = labels.iter().copied().max().unwrap_or(0);
        let mut remap = vec![usize::MAX; max + 1];
        for &l in labels {
            remap[l] = 0;
        }
        let mut next = 0;
        for slot in remap.iter_mut().filter(|s| **s == 0) {
            *slot = next;
            next += 1;
        }
        let assignment: Vec<usize> = labels.iter().map(|&l| remap[l]).collect();

        let d = points.dim();
        let mut sums = vec![vec![0.0; d]; next];
        let mut counts = vec![0usize; next];
        for (x, &a) in points.rows().zip(&assignment) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(x) {
                *s += v;
            }
        }
        let centroids: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&counts)
            .map(|(s, &c)| s.into_iter().map(|v| v / c as f64).collect())
            .collect();
        let mut per_cluster_cost = vec![0.0; next];
        for (x, &a) in points.rows().zip(&assignment) {
            per_cluster_cost[a] += sq_dist(x, &centroids[a]);
        }
        let mut total_cost = 0.0;
        for c in &per_cluster_cost {
            total_cost += c;
        }
        Ok(Self {
            centroids,
            assignment,
            per_cluster_cost,
            total_cost,
            kind,
        })
    }

    /// Number of nonempty clusters.
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    /// Point indices of each cluster, in increasing index order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (i, &a) in self.assignment.iter().enumerate() {
            out[a].push(i);
        }
        out
    }

    pub fn is_exact(&self) -> bool {
        self.kind == ReferenceKind::Exact
    }
}

pub fn planted_reference(points: &PointSet, labels: &[usize]) -> Result<OptClustering> {
    OptClustering::from_assignment(points, labels, ReferenceKind::Planted)
}

/// Optimal k-means clustering by enumerating every partition of the points
/// into at most `k` nonempty parts (restricted growth strings, visited in
/// lexicographic order; the first strict minimum wins).
pub fn exact_opt(points: &PointSet, k: usize) -> Result<OptClustering> {
    let n = points.len();
    if n > ORACLE_MAX_N || k > ORACLE_MAX_K {
        return Err(Error::OracleTooLarge {
            n,
            k,
            max_n: ORACLE_MAX_N,
            max_k: ORACLE_MAX_K,
        });
    }
    if k == 0 {
        return Err(Error::usage("k must be >= 1"));
    }
    let mut search = Enumeration {
        points,
        k,
        labels: vec![0; n],
        best: Vec::new(),
        best_cost: f64::INFINITY,
        sums: vec![0.0; k * points.dim()],
        counts: vec![0; k],
        part_cost: vec![0.0; k],
    };
    search.descend(1, 0);
    OptClustering::from_assignment(points, &search.best, ReferenceKind::Exact)
}

struct Enumeration<'a> {
    points: &'a PointSet,
    k: usize,
    labels: Vec<usize>,
    best: Vec<usize>,
    best_cost: f64,
    sums: Vec<f64>,
    counts: Vec<usize>,
    part_cost: Vec<f64>,
}

impl Enumeration<'_> {
    /// Assigns position `i` given that labels `0..=max_label` are in use.
    fn descend(&mut self, i: usize, max_label: usize) {
        if i == self.labels.len() {
            let cost = self.score(max_label + 1);
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best.clone_from(&self.labels);
            }
            return;
        }
        let limit = (max_label + 1).min(self.k - 1);
        for label in 0..=limit {
            self.labels[i] = label;
            self.descend(i + 1, max_label.max(label));
        }
    }

    /// Same arithmetic as `OptClustering::from_assignment`.
    fn score(&mut self, parts: usize) -> f64 {
        let d = self.points.dim();
        self.sums[..parts * d].fill(0.0);
        self.counts[..parts].fill(0);
        self.part_cost[..parts].fill(0.0);
        for (x, &a) in self.points.rows().zip(&self.labels) {
            self.counts[a] += 1;
            for (s, v) in self.sums[a * d..(a + 1) * d].iter_mut().zip(x) {
                *s += v;
            }
        }
        for a in 0..parts {
            let c = self.counts[a] as f64;
            for s in &mut self.sums[a * d..(a + 1) * d] {
                *s /= c;
            }
        }
        for (x, &a) in self.points.rows().zip(&self.labels) {
            self.part_cost[a] += sq_dist(x, &self.sums[a * d..(a + 1) * d]);
        }
        let mut total = 0.0;
        for c in &self.part_cost[..parts] {
            total += c;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::RandomSource;
    use rand::Rng;

    #[test]
    fn n_equal_k_gives_singletons() {
        let p = PointSet::new(vec![0.0, 4.0, 9.0], 1).unwrap();
        let opt = exact_opt(&p, 3).unwrap();
        assert_eq!(opt.total_cost, 0.0);
        assert_eq!(opt.assignment, vec![0, 1, 2]);
    }

    #[test]
    fn three_points_on_a_line() {
        let p = PointSet::new(vec![0.0, 1.0, 10.0], 1).unwrap();
        let opt = exact_opt(&p, 2).unwrap();
        assert_eq!(opt.assignment, vec![0, 0, 1]);
        assert_eq!(opt.total_cost, 0.5);
        assert_eq!(opt.centroids, vec![vec![0.5], vec![10.0]]);
    }

    #[test]
    fn too_large_is_rejected() {
        let p = PointSet::new((0..13).map(|i| i as f64).collect(), 1).unwrap();
        assert!(matches!(
            exact_opt(&p, 2),
            Err(Error::OracleTooLarge { .. })
        ));
        let p = PointSet::new((0..6).map(|i| i as f64).collect(), 1).unwrap();
        assert!(matches!(
            exact_opt(&p, 5),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn beats_random_clusterings() {
        let mut rng = RandomSource::new(31, 0);
        let data: Vec<f64> = (0..18).map(|_| rng.random_range(-5.0..5.0)).collect();
        let p = PointSet::new(data, 2).unwrap();
        let opt = exact_opt(&p, 3).unwrap();
        for _ in 0..500 {
            let labels: Vec<usize> = (0..9).map(|_| rng.random_range(0..3)).collect();
            let other =
                OptClustering::from_assignment(&p, &labels, ReferenceKind::Planted).unwrap();
            assert!(opt.total_cost <= other.total_cost);
        }
    }

    #[test]
    fn centroids_are_means() {
        let p = PointSet::from_rows(&[[0.0, 0.0], [2.0, 2.0], [10.0, 0.0], [11.0, 1.0]]).unwrap();
        let r = planted_reference(&p, &[5, 5, 2, 2]).unwrap();
        assert_eq!(r.assignment, vec![1, 1, 0, 0]);
        assert_eq!(r.centroids[1], vec![1.0, 1.0]);
        assert_eq!(r.per_cluster_cost[1], 4.0);
        assert_eq!(r.per_cluster_cost[0], 1.0);
        assert_eq!(r.kind, ReferenceKind::Planted);
    }

    #[test]
    fn single_cluster_plant_matches_oracle() {
        let p = PointSet::new(vec![0.0, 1.0, 3.0, 7.0], 1).unwrap();
        let planted = planted_reference(&p, &[0, 0, 0, 0]).unwrap();
        let opt = exact_opt(&p, 1).unwrap();
        assert_eq!(planted.centroids, opt.centroids);
        assert_eq!(planted.total_cost, opt.total_cost);
        assert_eq!(planted.assignment, opt.assignment);
    }
}
