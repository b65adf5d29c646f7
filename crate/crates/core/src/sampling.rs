//! Seedable randomness and D²-weighted point selection.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::state::CenterState;

/// Deterministic random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8, whose output is specified independently of platform
/// word size and endianness.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform float in `[0, 1)` built from the top 53 bits of one 64-bit draw.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::usage("cannot sample from an empty range"));
        }
        Ok(self.rng.random_range(0..n as u64) as usize)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

pub fn uniform_sample(n: usize, rng: &mut RandomSource) -> Result<usize> {
    rng.index(n)
}

/// Draws index `i` with probability `w_i / Σ w` by one uniform draw against
/// the running prefix sum. Zero-weight entries are never returned.
pub fn weighted_index<I>(weights: I, total: f64, rng: &mut RandomSource) -> Result<usize>
where
    I: IntoIterator<Item = f64>,
{
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let target = rng.next_unit() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, w) in weights.into_iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = Some(i);
            if target < acc {
                return Ok(i);
            }
        }
    }
    // `target` can round up to `acc` when the unit draw is within 2^-53 of 1.
    last_positive.ok_or(Error::ZeroMass)
}

/// D²-sampling against the cached nearest-center distances.
pub fn d2_sample(state: &CenterState, rng: &mut RandomSource) -> Result<usize> {
    weighted_index(
        state.first().iter().map(|f| f.dist),
        state.total_cost(),
        rng,
    )
}

/// D²-sampling restricted to the listed points.
pub fn d2_sample_within(
    state: &CenterState,
    members: &[usize],
    rng: &mut RandomSource,
) -> Result<usize> {
    let first = state.first();
    let mut mass = 0.0;
    for &i in members {
        mass += first[i].dist;
    }
    let pos = weighted_index(members.iter().map(|&i| first[i].dist), mass, rng)?;
    Ok(members[pos])
}
