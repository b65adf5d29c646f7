//! Candidate centers with a per-point cache of the two closest centers.
//!
//! Centers are indices into the [`PointSet`]. Each point stores its closest
//! and second-closest center as `(slot, squared distance)`, ordered by
//! `(distance, slot)` so ties resolve toward the lower slot.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{sq_dist, PointSet};

/// Marker slot for an absent second-closest center (k = 1).
pub const NO_SLOT: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Nearest {
    pub slot: usize,
    pub dist: f64,
}

impl Nearest {
    pub const NONE: Nearest = Nearest {
        slot: NO_SLOT,
        dist: f64::INFINITY,
    };

    #[inline]
    fn precedes(&self, other: &Nearest) -> bool {
        match self.dist.partial_cmp(&other.dist) {
            Some(Ordering::Less) => true,
            Some(Ordering::Equal) => self.slot < other.slot,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterState {
    centers: Vec<usize>,
    first: Vec<Nearest>,
    second: Vec<Nearest>,
    total_cost: f64,
}

impl CenterState {
    /// State with a single center at point `index`.
    pub fn with_first_center(points: &PointSet, index: usize) -> Result<Self> {
        check_index(points, index)?;
        let c = points.point(index);
        let first: Vec<Nearest> = points
            .rows()
            .map(|x| Nearest {
                slot: 0,
                dist: sq_dist(x, c),
            })
            .collect();
        let mut state = Self {
            centers: vec![index],
            second: vec![Nearest::NONE; first.len()],
            first,
            total_cost: 0.0,
        };
        state.resum();
        Ok(state)
    }

    /// Builds a coherent state from scratch for the given center indices.
    pub fn from_indices(points: &PointSet, centers: &[usize]) -> Result<Self> {
        let (&head, rest) = centers.split_first().ok_or(Error::EmptyCenters)?;
        let mut state = Self::with_first_center(points, head)?;
        for &c in rest {
            state.push_center(points, c)?;
        }
        Ok(state)
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    #[inline]
    pub fn center(&self, slot: usize) -> usize {
        self.centers[slot]
    }

    pub fn first(&self) -> &[Nearest] {
        &self.first
    }

    pub fn second(&self) -> &[Nearest] {
        &self.second
    }

    #[inline]
    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    pub fn contains(&self, index: usize) -> bool {
        self.centers.contains(&index)
    }

    pub fn center_coords(&self, points: &PointSet) -> Vec<Vec<f64>> {
        self.centers
            .iter()
            .map(|&c| points.point(c).to_vec())
            .collect()
    }

    /// Appends point `index` as a new center in one O(nd) pass.
    pub fn push_center(&mut self, points: &PointSet, index: usize) -> Result<()> {
        check_index(points, index)?;
        if self.contains(index) {
            return Err(Error::usage(format!("point {index} is already a center")));
        }
        let slot = self.centers.len();
        self.centers.push(index);
        let c = points.point(index);
        for (i, x) in points.rows().enumerate() {
            let cand = Nearest {
                slot,
                dist: sq_dist(x, c),
            };
            self.offer(i, cand);
        }
        self.resum();
        Ok(())
    }

    /// Replaces the center in `slot` by point `index`.
    ///
    /// Points whose first or second entry referenced `slot` rescan all k
    /// centers; every other point only compares against the newcomer.
    pub fn replace_center(&mut self, points: &PointSet, slot: usize, index: usize) -> Result<()> {
        check_index(points, index)?;
        if slot >= self.centers.len() {
            return Err(Error::usage(format!("slot {slot} out of range")));
        }
        if self.centers[slot] != index && self.contains(index) {
            return Err(Error::usage(format!("point {index} is already a center")));
        }
        self.centers[slot] = index;
        let c = points.point(index);
        for (i, x) in points.rows().enumerate() {
            if self.first[i].slot == slot || self.second[i].slot == slot {
                let (f, s) = two_closest(points, &self.centers, x);
                self.first[i] = f;
                self.second[i] = s;
            } else {
                let cand = Nearest {
                    slot,
                    dist: sq_dist(x, c),
                };
                self.offer(i, cand);
            }
        }
        self.resum();
        Ok(())
    }

    #[inline]
    fn offer(&mut self, i: usize, cand: Nearest) {
        if cand.precedes(&self.first[i]) {
            self.second[i] = self.first[i];
            self.first[i] = cand;
        } else if cand.precedes(&self.second[i]) {
            self.second[i] = cand;
        }
    }

    fn resum(&mut self) {
        let mut total = 0.0;
        for f in &self.first {
            total += f.dist;
        }
        self.total_cost = total;
    }

    /// Compares the cache against a from-scratch recomputation.
    ///
    /// Returns the first incoherent point index, if any.
    pub fn find_incoherence(&self, points: &PointSet) -> Option<usize> {
        for (i, x) in points.rows().enumerate() {
            let (f, s) = two_closest(points, &self.centers, x);
            if f != self.first[i] || s != self.second[i] {
                return Some(i);
            }
        }
        let mut total = 0.0;
        for f in &self.first {
            total += f.dist;
        }
        if total.to_bits() != self.total_cost.to_bits() {
            return Some(points.len());
        }
        None
    }

    pub fn is_coherent(&self, points: &PointSet) -> bool {
        self.find_incoherence(points).is_none()
    }
}

/// Closest and second-closest centers of `x`, ordered by `(distance, slot)`.
pub(crate) fn two_closest(points: &PointSet, centers: &[usize], x: &[f64]) -> (Nearest, Nearest) {
    let mut first = Nearest::NONE;
    let mut second = Nearest::NONE;
    for (slot, &c) in centers.iter().enumerate() {
        let cand = Nearest {
            slot,
            dist: sq_dist(x, points.point(c)),
        };
        if cand.precedes(&first) {
            second = first;
            first = cand;
        } else if cand.precedes(&second) {
            second = cand;
        }
    }
    (first, second)
}

fn check_index(points: &PointSet, index: usize) -> Result<()> {
    if index >= points.len() {
        return Err(Error::usage(format!(
            "point index {index} out of range for {} points",
            points.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cost;
    use proptest::prelude::*;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::new(xs.to_vec(), 1).unwrap()
    }

    #[test]
    fn single_center_has_no_second() {
        let p = line(&[0.0, 1.0, 3.0]);
        let s = CenterState::with_first_center(&p, 1).unwrap();
        assert_eq!(s.total_cost(), 1.0 + 0.0 + 4.0);
        assert!(s.second().iter().all(|n| n.slot == NO_SLOT));
        assert!(s.is_coherent(&p));
    }

    #[test]
    fn ties_prefer_lower_slot() {
        let p = line(&[-1.0, 0.0, 1.0]);
        let s = CenterState::from_indices(&p, &[0, 2]).unwrap();
        assert_eq!(s.first()[1], Nearest { slot: 0, dist: 1.0 });
        assert_eq!(s.second()[1], Nearest { slot: 1, dist: 1.0 });
        let s = CenterState::from_indices(&p, &[2, 0]).unwrap();
        assert_eq!(s.first()[1].slot, 0);
        assert_eq!(s.first()[1].dist, 1.0);
    }

    #[test]
    fn rejects_duplicate_and_out_of_range_centers() {
        let p = line(&[0.0, 1.0]);
        assert!(CenterState::from_indices(&p, &[0, 0]).is_err());
        assert!(CenterState::from_indices(&p, &[5]).is_err());
        assert!(CenterState::from_indices(&p, &[]).is_err());
        let mut s = CenterState::from_indices(&p, &[0]).unwrap();
        assert!(s.replace_center(&p, 3, 1).is_err());
    }

    #[test]
    fn total_matches_cost() {
        let p = line(&[0.0, 2.0, 5.0, 9.0, 10.0]);
        let s = CenterState::from_indices(&p, &[1, 4]).unwrap();
        let c = cost(&p, &s.center_coords(&p)).unwrap();
        assert_eq!(s.total_cost().to_bits(), c.to_bits());
    }

    proptest! {
        #[test]
        fn cache_stays_coherent_under_swaps(
            coords in prop::collection::vec(-50i32..50, 6..40),
            ops in prop::collection::vec((0usize..8, 0usize..64), 1..30),
        ) {
            // Integer grid coordinates force frequent exact ties.
            let data: Vec<f64> = coords.iter().map(|&v| v as f64).collect();
            let d = 2;
            let n = data.len() / d;
            let p = PointSet::new(data[..n * d].to_vec(), d).unwrap();
            let k = (n / 2).clamp(1, 4);
            let mut s = CenterState::from_indices(&p, &(0..k).collect::<Vec<_>>()).unwrap();
            prop_assert!(s.is_coherent(&p));
            for (slot, idx) in ops {
                let slot = slot % k;
                let idx = idx % n;
                if s.contains(idx) && s.center(slot) != idx {
                    continue;
                }
                s.replace_center(&p, slot, idx).unwrap();
                prop_assert_eq!(s.find_incoherence(&p), None);
            }
        }
    }
}
