//! Point storage and the k-means cost primitives.
//!
//! Every sum in this module runs sequentially in point-index order (and
//! coordinate order within a point), so results are bit-reproducible.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Dense row-major matrix of `n` points in `d` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl PointSet {
    /// Builds a point set from row-major coordinates.
    pub fn new(data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidPoints("dimension must be >= 1".into()));
        }
        if data.is_empty() {
            return Err(Error::InvalidPoints("no points provided".into()));
        }
        if !data.len().is_multiple_of(d) {
            return Err(Error::InvalidPoints(format!(
                "{} coordinates do not divide into rows of {d}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidPoints(format!(
                "non-finite coordinate in point {}",
                pos / d
            )));
        }
        let n = data.len() / d;
        Ok(Self { data, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidPoints("no points provided".into()))?;
        let d = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(data, d)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Number of geometrically distinct points.
    pub fn distinct_count(&self) -> usize {
        let mut seen = HashSet::with_capacity(self.n);
        for row in self.rows() {
            seen.insert(row_key(row));
        }
        seen.len()
    }
}

/// Bit pattern of a row with `-0.0` folded onto `0.0`.
pub(crate) fn row_key(row: &[f64]) -> Vec<u64> {
    row.iter().map(|v| (v + 0.0).to_bits()).collect()
}

/// Squared Euclidean distance without a length check.
#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x - y;
        acc += diff * diff;
    }
    acc
}

/// `‖a − b‖²`, accumulated in coordinate order.
pub fn squared_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(sq_dist(a, b))
}

/// Squared distance from `x` to its nearest center in `centers`.
#[inline]
pub(crate) fn nearest_sq_dist<C: AsRef<[f64]>>(x: &[f64], centers: &[C]) -> f64 {
    centers
        .iter()
        .map(|c| sq_dist(x, c.as_ref()))
        .fold(f64::INFINITY, f64::min)
}

fn check_centers<C: AsRef<[f64]>>(d: usize, centers: &[C]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    for c in centers {
        if c.as_ref().len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: c.as_ref().len(),
            });
        }
    }
    Ok(())
}

/// `Σ_p min_c ‖p − c‖²` over all points.
pub fn cost<C: AsRef<[f64]>>(points: &PointSet, centers: &[C]) -> Result<f64> {
    check_centers(points.dim(), centers)?;
    let mut total = 0.0;
    for x in points.rows() {
        total += nearest_sq_dist(x, centers);
    }
    Ok(total)
}

/// Cost restricted to the points listed in `subset`, summed in the listed order.
pub fn subset_cost<C: AsRef<[f64]>>(
    points: &PointSet,
    subset: &[usize],
    centers: &[C],
) -> Result<f64> {
    check_centers(points.dim(), centers)?;
    let mut total = 0.0;
    for &i in subset {
        total += nearest_sq_dist(points.point(i), centers);
    }
    Ok(total)
}

/// Coordinate-wise mean of the points listed in `subset`.
pub fn centroid(points: &PointSet, subset: &[usize]) -> Result<Vec<f64>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut mean = vec![0.0; points.dim()];
    for &i in subset {
        for (m, v) in mean.iter_mut().zip(points.point(i)) {
            *m += v;
        }
    }
    let inv = subset.len() as f64;
    for m in &mut mean {
        *m /= inv;
    }
    Ok(mean)
}

/// `cost(Q, c) − |Q|·‖c − μ_Q‖² − cost(Q, μ_Q)`, which is zero up to rounding.
pub fn decomposition_residual(points: &PointSet, subset: &[usize], c: &[f64]) -> Result<f64> {
    let mu = centroid(points, subset)?;
    if c.len() != mu.len() {
        return Err(Error::DimensionMismatch {
            expected: mu.len(),
            got: c.len(),
        });
    }
    let at_c = subset_cost(points, subset, &[c])?;
    let at_mu = subset_cost(points, subset, &[&mu[..]])?;
    let shift = subset.len() as f64 * sq_dist(c, &mu);
    Ok(at_c - shift - at_mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
        let data = (0..n * d).map(|_| rng.random_range(-10.0..10.0)).collect();
        PointSet::new(data, d).unwrap()
    }

    #[test]
    fn rejects_bad_point_sets() {
        assert!(PointSet::new(vec![], 2).is_err());
        assert!(PointSet::new(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(PointSet::new(vec![1.0, f64::NAN], 2).is_err());
        assert!(PointSet::new(vec![1.0, f64::INFINITY], 1).is_err());
        assert!(PointSet::new(vec![1.0], 0).is_err());
        assert!(matches!(
            PointSet::from_rows(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn distinct_count_treats_signed_zero_as_equal() {
        let p = PointSet::from_rows(&[[0.0, 1.0], [-0.0, 1.0], [2.0, 1.0]]).unwrap();
        assert_eq!(p.distinct_count(), 2);
    }

    #[test]
    fn squared_distance_basics() {
        assert_eq!(squared_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 25.0);
        let x = [1.5, -2.25, 7.0];
        assert_eq!(squared_distance(&x, &x).unwrap(), 0.0);
        assert!(matches!(
            squared_distance(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn squared_distance_matches_naive_loop_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a: Vec<f64> = (0..5).map(|_| rng.random_range(-1e3..1e3)).collect();
            let b: Vec<f64> = (0..5).map(|_| rng.random_range(-1e3..1e3)).collect();
            let mut naive = 0.0f64;
            for j in 0..5 {
                naive += (a[j] - b[j]) * (a[j] - b[j]);
            }
            let got = squared_distance(&a, &b).unwrap();
            assert_eq!(got.to_bits(), naive.to_bits());
            assert_eq!(got, squared_distance(&b, &a).unwrap());
        }
    }

    #[test]
    fn cost_zero_when_points_are_centers() {
        let p = PointSet::from_rows(&[[0.0, 0.0], [1.0, 1.0], [0.0, 0.0]]).unwrap();
        assert_eq!(cost(&p, &[[0.0, 0.0], [1.0, 1.0]]).unwrap(), 0.0);
    }

    #[test]
    fn cost_rejects_empty_centers() {
        let p = PointSet::from_rows(&[[0.0]]).unwrap();
        let none: [[f64; 1]; 0] = [];
        assert!(matches!(cost(&p, &none), Err(Error::EmptyCenters)));
    }

    #[test]
    fn cost_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_points(&mut rng, 50, 3);
        let centers: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..3).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();
        let mut naive = 0.0;
        for i in 0..50 {
            let mut best = f64::INFINITY;
            for c in &centers {
                let mut s = 0.0;
                for (a, b) in p.point(i).iter().zip(c) {
                    s += (a - b).powi(2);
                }
                if s < best {
                    best = s;
                }
            }
            naive += best;
        }
        let got = cost(&p, &centers).unwrap();
        assert!((got - naive).abs() <= 1e-12 * naive);
    }

    #[test]
    fn single_center_cost_decomposes() {
        let p = PointSet::from_rows(&[[0.0, 0.0], [2.0, 0.0]]).unwrap();
        let all = [0, 1];
        assert_eq!(subset_cost(&p, &all, &[[0.0, 0.0]]).unwrap(), 4.0);
        assert_eq!(decomposition_residual(&p, &all, &[0.0, 0.0]).unwrap(), 0.0);
        let mu = centroid(&p, &all).unwrap();
        assert_eq!(mu, vec![1.0, 0.0]);
        assert_eq!(decomposition_residual(&p, &all, &mu).unwrap(), 0.0);
    }

    #[test]
    fn centroid_edge_cases() {
        let p = PointSet::from_rows(&[[3.0, -1.0]]).unwrap();
        assert_eq!(centroid(&p, &[0]).unwrap(), vec![3.0, -1.0]);
        assert!(matches!(centroid(&p, &[]), Err(Error::EmptySubset)));
    }

    #[test]
    fn centroid_beats_random_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_points(&mut rng, 20, 4);
        let all: Vec<usize> = (0..20).collect();
        let mu = centroid(&p, &all).unwrap();
        let best = subset_cost(&p, &all, &[&mu[..]]).unwrap();
        for _ in 0..100 {
            let probe: Vec<f64> = (0..4).map(|_| rng.random_range(-10.0..10.0)).collect();
            assert!(best <= subset_cost(&p, &all, &[&probe[..]]).unwrap());
        }
    }

    #[test]
    fn decomposition_holds_on_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let n = rng.random_range(1..30);
            let d = rng.random_range(1..6);
            let p = random_points(&mut rng, n, d);
            let subset: Vec<usize> = (0..n).collect();
            let c: Vec<f64> = (0..d).map(|_| rng.random_range(-20.0..20.0)).collect();
            let r = decomposition_residual(&p, &subset, &c).unwrap();
            let total = subset_cost(&p, &subset, &[&c[..]]).unwrap();
            assert!(r.abs() <= 1e-9 * total.max(1.0), "residual {r} vs {total}");
        }
    }

    #[test]
    fn cost_invariant_under_permutation_and_translation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_points(&mut rng, 40, 2);
        let centers = vec![vec![1.0, 2.0], vec![-3.0, 0.5], vec![4.0, -4.0]];
        let base = cost(&p, &centers).unwrap();
        let mut rev = centers.clone();
        rev.reverse();
        assert!((cost(&p, &rev).unwrap() - base).abs() <= 1e-9 * base);

        let shift = [123.25, -77.5];
        let moved: Vec<f64> = p
            .rows()
            .flat_map(|r| [r[0] + shift[0], r[1] + shift[1]])
            .collect();
        let moved = PointSet::new(moved, 2).unwrap();
        let moved_centers: Vec<Vec<f64>> = centers
            .iter()
            .map(|c| vec![c[0] + shift[0], c[1] + shift[1]])
            .collect();
        assert!((cost(&moved, &moved_centers).unwrap() - base).abs() <= 1e-9 * base);
    }
}
