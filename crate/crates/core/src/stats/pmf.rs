//! Exact Poisson and binomial probability mass functions.

use serde::Serialize;

use super::special::{ln_factorial, ln_gamma};
use crate::error::{Error, Result};

/// Mass the truncated Poisson support is allowed to leave in its upper tail.
pub const POISSON_TAIL_BOUND: f64 = 1e-15;

/// `mean^k e^{-mean} / k!`, evaluated in log space.
pub fn poisson_pmf(mean: f64, k: u64) -> Result<f64> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(Error::InvalidMean(mean));
    }
    Ok(poisson_mass(mean, k))
}

fn poisson_mass(mean: f64, k: u64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mean.ln() - mean - ln_factorial(k)).exp()
}

/// `C(n, k) p^k (1-p)^(n-k)`; zero outside `0..=n`.
pub fn binomial_pmf(n: u64, p: f64, k: i64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(binomial_mass(n, p, k))
}

fn binomial_mass(n: u64, p: f64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return 0.0;
    }
    let k = k as u64;
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln_choose = ln_gamma(n as f64 + 1.0) - ln_factorial(k) - ln_factorial(n - k);
    (ln_choose + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
}

/// Law of the number of `n` uniform points on `B` that land in `A ⊆ B`,
/// where `a = |A|` and `b = |B|`: `Binomial(n, a/b)`.
///
/// The same law describes the count in `A` of a Poisson process on `B`
/// conditioned to have `n` points there.
pub fn conditional_count_pmf(n: u64, a: f64, b: f64, k: i64) -> Result<f64> {
    let p = conditional_success_probability(a, b)?;
    Ok(binomial_mass(n, p, k))
}

fn conditional_success_probability(a: f64, b: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite() && a >= 0.0 && a <= b) {
        return Err(Error::InvalidMeasures { a, b });
    }
    Ok((a / b).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PmfFamily {
    Poisson { mean: f64 },
    Binomial { n: u64, p: f64 },
}

/// A pmf on the non-negative integers with a finite working support
/// `0..=upper`. `tail_mass` bounds the probability above `upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pmf {
    family: PmfFamily,
    upper: u64,
    tail_mass: f64,
}

impl Pmf {
    pub fn poisson(mean: f64) -> Result<Self> {
        if !mean.is_finite() || mean < 0.0 {
            return Err(Error::InvalidMean(mean));
        }
        // past the mode the tail beyond k is at most mass(k+1) / (1 - mean/(k+2))
        let mut k = mean.floor() as u64;
        let tail = loop {
            let next = poisson_mass(mean, k + 1);
            let ratio = mean / (k + 2) as f64;
            let bound = next / (1.0 - ratio);
            if ratio < 1.0 && bound < POISSON_TAIL_BOUND {
                break bound;
            }
            k += 1;
        };
        Ok(Self {
            family: PmfFamily::Poisson { mean },
            upper: k,
            tail_mass: tail,
        })
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Self {
            family: PmfFamily::Binomial { n, p },
            upper: n,
            tail_mass: 0.0,
        })
    }

    /// `Binomial(n, a/b)`.
    pub fn conditional_count(n: u64, a: f64, b: f64) -> Result<Self> {
        Self::binomial(n, conditional_success_probability(a, b)?)
    }

    pub fn family(&self) -> PmfFamily {
        self.family
    }

    pub fn upper(&self) -> u64 {
        self.upper
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn mass(&self, k: u64) -> f64 {
        match self.family {
            PmfFamily::Poisson { mean } => poisson_mass(mean, k),
            PmfFamily::Binomial { n, p } => binomial_mass(n, p, k as i64),
        }
    }

    /// `P(X >= k)`.
    pub fn upper_tail(&self, k: u64) -> f64 {
        match self.family {
            PmfFamily::Binomial { n, .. } => (k..=n).map(|j| self.mass(j)).sum(),
            PmfFamily::Poisson { mean } if k as f64 > mean => {
                let mut sum = 0.0;
                let mut j = k;
                loop {
                    let m = self.mass(j);
                    sum += m;
                    if m <= sum * 1e-18 || m == 0.0 {
                        break sum;
                    }
                    j += 1;
                }
            }
            PmfFamily::Poisson { .. } => {
                let below: f64 = (0..k).map(|j| self.mass(j)).sum();
                (1.0 - below).max(0.0)
            }
        }
    }

    /// Sum of the masses on `0..=upper`.
    pub fn truncated_total(&self) -> f64 {
        (0..=self.upper).map(|k| self.mass(k)).sum()
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            PmfFamily::Poisson { mean } => mean,
            PmfFamily::Binomial { n, p } => n as f64 * p,
        }
    }
}
