//! Deterministic random streams and the scalar samplers built on them.
//!
//! A [`RngStream`] is keyed by `(seed, stream_id)`. The underlying generator is
//! ChaCha8 in its counter mode: the seed expands to the 256-bit key and the
//! stream id selects the 64-bit nonce, so streams under one seed never overlap
//! and need no coordination. Unit uniforms take the top 53 bits of each
//! 64-bit output, which makes the whole sequence bit-identical on every
//! platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// Tolerance on `|sum(probs) - 1|` accepted by [`sample_categorical`].
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// Means at or below this value are sampled by direct inversion; larger means
/// are split into chunks of at most this size.
pub const POISSON_INVERSION_LIMIT: f64 = 10.0;

const UNIT_SCALE: f64 = 1.0 / (1u64 << 53) as f64;

/// A seedable random stream whose output is a pure function of
/// `(seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream under the same seed with a different id.
    pub fn sibling(&self, stream_id: u64) -> Self {
        Self::new(self.seed, stream_id)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53-bit resolution.
    pub fn next_unit_uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * UNIT_SCALE
    }

    /// Uniform on `[lo, hi)`, or exactly `lo` when the interval is degenerate.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.next_unit_uniform();
        let x = lo + u * (hi - lo);
        // rounding in the affine map can land on hi
        if x >= hi {
            lo
        } else {
            x
        }
    }
}

/// Exact Poisson(`mean`) draw.
///
/// Means up to [`POISSON_INVERSION_LIMIT`] use sequential inversion on one
/// uniform. Larger means are split into `ceil(mean / 10)` equal chunks whose
/// independent counts are summed, which is exact because a sum of independent
/// Poisson counts is Poisson with the summed mean.
pub fn sample_poisson_count(mean: f64, rng: &mut RngStream) -> Result<u64> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(Error::InvalidMean(mean));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    if mean <= POISSON_INVERSION_LIMIT {
        return Ok(poisson_inversion(mean, rng));
    }
    let chunks = (mean / POISSON_INVERSION_LIMIT).ceil();
    let chunk_mean = mean / chunks;
    let mut total = 0u64;
    for _ in 0..chunks as u64 {
        total += poisson_inversion(chunk_mean, rng);
    }
    Ok(total)
}

fn poisson_inversion(mean: f64, rng: &mut RngStream) -> u64 {
    let u = rng.next_unit_uniform();
    let mut k = 0u64;
    let mut mass = (-mean).exp();
    let mut cdf = mass;
    while u >= cdf {
        k += 1;
        mass *= mean / k as f64;
        let next = cdf + mass;
        // the cdf has saturated in floating point; u sits in the last ulp of mass
        if next == cdf {
            break;
        }
        cdf = next;
    }
    k
}

/// Validates a probability vector: non-empty, entries finite and
/// non-negative, sum within [`PROBABILITY_SUM_TOLERANCE`] of one.
pub fn validate_probabilities(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidProbabilities("empty".into()));
    }
    if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidProbabilities(format!("entry {bad}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(Error::InvalidProbabilities(format!("sum {sum}")));
    }
    Ok(())
}

/// Draws index `i` with probability `probs[i]` by inversion on one uniform.
pub fn sample_categorical(probs: &[f64], rng: &mut RngStream) -> Result<usize> {
    validate_probabilities(probs)?;
    Ok(categorical_unchecked(probs, rng))
}

pub(crate) fn categorical_unchecked(probs: &[f64], rng: &mut RngStream) -> usize {
    let u = rng.next_unit_uniform();
    let mut cdf = 0.0;
    for (i, p) in probs.iter().enumerate() {
        cdf += p;
        if u < cdf {
            return i;
        }
    }
    // u fell in the rounding gap above the accumulated sum
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}
