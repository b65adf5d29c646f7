//! Synthetic instances with planted clusterings.
//!
//! Spec strings look like `gaussian_mixture:k=16,n=1600,d=8,sep=10,scatter=1`,
//! `simplex_corners:k=4,n=400,scatter=0` or `uniform_cube:n=100,d=3`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sq_dist, PointSet};
use crate::sampling::RandomSource;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    /// `clusters` isotropic Gaussians with standard deviation `scatter` per
    /// coordinate, means pairwise at least `separation · scatter` apart.
    GaussianMixture {
        clusters: usize,
        n: usize,
        d: usize,
        separation: f64,
        scatter: f64,
    },
    /// Points stacked on the corners of a `(clusters − 1)`-simplex (the unit
    /// basis vectors of ℝ^clusters), with optional Gaussian jitter.
    SimplexCorners {
        clusters: usize,
        n: usize,
        scatter: f64,
    },
    /// Uniform in `[0, 1)^d`; no planted labels.
    UniformCube { n: usize, d: usize },
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub points: PointSet,
    pub labels: Option<Vec<usize>>,
    pub means: Option<Vec<Vec<f64>>>,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::usage(format!("{self}: {msg}")));
        match *self {
            InstanceSpec::GaussianMixture {
                clusters,
                n,
                d,
                separation,
                scatter,
            } => {
                if clusters == 0 || d == 0 || n < clusters {
                    return bad("need k >= 1, d >= 1 and n >= k");
                }
                if !(scatter > 0.0 && scatter.is_finite()) {
                    return bad("scatter must be positive");
                }
                if !(separation >= 0.0 && separation.is_finite()) {
                    return bad("separation must be nonnegative");
                }
            }
            InstanceSpec::SimplexCorners {
                clusters,
                n,
                scatter,
            } => {
                if clusters == 0 || n < clusters {
                    return bad("need k >= 1 and n >= k");
                }
                if !(scatter >= 0.0 && scatter.is_finite()) {
                    return bad("scatter must be nonnegative");
                }
            }
            InstanceSpec::UniformCube { n, d } => {
                if n == 0 || d == 0 {
                    return bad("need n >= 1 and d >= 1");
                }
            }
        }
        Ok(())
    }

    /// Whether the instance carries a planted assignment.
    pub fn is_planted(&self) -> bool {
        !matches!(self, InstanceSpec::UniformCube { .. })
    }
}

/// Splits `n` into `k` near-equal cluster sizes, larger ones first.
fn cluster_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|j| n / k + usize::from(j < n % k)).collect()
}

pub fn generate_instance(spec: &InstanceSpec, rng: &mut RandomSource) -> Result<Instance> {
    spec.validate()?;
    match *spec {
        InstanceSpec::GaussianMixture {
            clusters,
            n,
            d,
            separation,
            scatter,
        } => {
            let means = place_means(clusters, d, separation * scatter, rng);
            let (points, labels) = scatter_around(&means, n, scatter, rng)?;
            Ok(Instance {
                points,
                labels: Some(labels),
                means: Some(means),
            })
        }
        InstanceSpec::SimplexCorners {
            clusters,
            n,
            scatter,
        } => {
            let means: Vec<Vec<f64>> = (0..clusters)
                .map(|j| {
                    (0..clusters)
                        .map(|t| if t == j { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect();
            let (points, labels) = scatter_around(&means, n, scatter, rng)?;
            Ok(Instance {
                points,
                labels: Some(labels),
                means: Some(means),
            })
        }
        InstanceSpec::UniformCube { n, d } => {
            let data = (0..n * d).map(|_| rng.next_unit()).collect();
            Ok(Instance {
                points: PointSet::new(data, d)?,
                labels: None,
                means: None,
            })
        }
    }
}

/// Rejection-samples means in a cube until all pairwise distances reach
/// `min_dist`, growing the cube when placement stalls.
fn place_means(k: usize, d: usize, min_dist: f64, rng: &mut RandomSource) -> Vec<Vec<f64>> {
    let min_sq = min_dist * min_dist;
    let mut side = (min_dist * 2.0 * (k as f64).powf(1.0 / d as f64)).max(1.0);
    'restart: loop {
        let mut means: Vec<Vec<f64>> = Vec::with_capacity(k);
        while means.len() < k {
            let mut placed = false;
            for _ in 0..1000 {
                let cand: Vec<f64> = (0..d).map(|_| rng.next_unit() * side).collect();
                if means.iter().all(|m| sq_dist(m, &cand) >= min_sq) {
                    means.push(cand);
                    placed = true;
                    break;
                }
            }
            if !placed {
                side *= 1.5;
                continue 'restart;
            }
        }
        return means;
    }
}

fn scatter_around(
    means: &[Vec<f64>],
    n: usize,
    scatter: f64,
    rng: &mut RandomSource,
) -> Result<(PointSet, Vec<usize>)> {
    let d = means[0].len();
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (j, size) in cluster_sizes(n, means.len()).into_iter().enumerate() {
        for _ in 0..size {
            for &m in &means[j] {
                let z: f64 = rng.sample(StandardNormal);
                data.push(m + scatter * z);
            }
            labels.push(j);
        }
    }
    Ok((PointSet::new(data, d)?, labels))
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSpec::GaussianMixture {
                clusters,
                n,
                d,
                separation,
                scatter,
            } => write!(
                f,
                "gaussian_mixture:k={clusters},n={n},d={d},sep={separation},scatter={scatter}"
            ),
            InstanceSpec::SimplexCorners {
                clusters,
                n,
                scatter,
            } => write!(f, "simplex_corners:k={clusters},n={n},scatter={scatter}"),
            InstanceSpec::UniformCube { n, d } => write!(f, "uniform_cube:n={n},d={d}"),
        }
    }
}

impl FromStr for InstanceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = BTreeMap::new();
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("expected key=value, got '{part}'")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str, default: Option<&str>| -> Result<String> {
            kv.remove(key)
                .or_else(|| default.map(str::to_string))
                .ok_or_else(|| Error::usage(format!("{kind}: missing '{key}'")))
        };
        let int = |v: String, key: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::usage(format!("{key}: not an integer: '{v}'")))
        };
        let real = |v: String, key: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::usage(format!("{key}: not a number: '{v}'")))
        };
        let spec = match kind.trim() {
            "gaussian_mixture" | "gaussian" => InstanceSpec::GaussianMixture {
                clusters: int(take("k", None)?, "k")?,
                n: int(take("n", None)?, "n")?,
                d: int(take("d", None)?, "d")?,
                separation: real(take("sep", Some("10"))?, "sep")?,
                scatter: real(take("scatter", Some("1"))?, "scatter")?,
            },
            "simplex_corners" | "simplex" => InstanceSpec::SimplexCorners {
                clusters: int(take("k", None)?, "k")?,
                n: int(take("n", None)?, "n")?,
                scatter: real(take("scatter", Some("0"))?, "scatter")?,
            },
            "uniform_cube" | "uniform" => InstanceSpec::UniformCube {
                n: int(take("n", None)?, "n")?,
                d: int(take("d", None)?, "d")?,
            },
            other => return Err(Error::usage(format!("unknown generator '{other}'"))),
        };
        if let Some(extra) = kv.keys().next() {
            return Err(Error::usage(format!("{kind}: unknown parameter '{extra}'")));
        }
        spec.validate()?;
        Ok(spec)
    }
}
