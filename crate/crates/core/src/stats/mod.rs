//! Exact pmfs and the tests used to check simulated output against them.

mod gof;
mod pmf;
mod special;

pub use gof::{
    chi_square_gof, histogram, independence_test, two_sample_test, Bin, Binning, ContingencyTable,
    GofReport, ValueRange, DEFAULT_ALPHA, MIN_EXPECTED,
};
pub use pmf::{
    binomial_pmf, conditional_count_pmf, poisson_pmf, Pmf, PmfFamily, POISSON_TAIL_BOUND,
};
pub use special::{chi_square_sf, gamma_p, gamma_q, ln_factorial, ln_gamma, GAMMA_TOLERANCE};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Sample mean and its standard error `sqrt(s^2 / n)`, where `s^2` is the
/// plug-in variance `sum (x - mean)^2 / n`.
pub fn empirical_mean_stderr(samples: &[f64]) -> Result<MeanEstimate> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / nf;
    Ok(MeanEstimate {
        mean,
        stderr: (var / nf).sqrt(),
    })
}

/// Pearson correlation coefficient. Zero when either sample is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!(
            "paired samples of different lengths {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn mean_stderr_direct() {
        let e = empirical_mean_stderr(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
        let e = empirical_mean_stderr(&[0.0, 1.0]).unwrap();
        assert_eq!(e.mean, 0.5);
        assert!((e.stderr - 0.125f64.sqrt()).abs() < 1e-15);
        assert!(empirical_mean_stderr(&[1.0]).is_err());
    }

    #[test]
    fn exponential_gap_mean() {
        // inverse-cdf exponentials with rate 2
        let mut rng = RngStream::new(31, 0);
        let gaps: Vec<f64> = (0..20_000)
            .map(|_| -(1.0 - rng.next_unit_uniform()).ln() / 2.0)
            .collect();
        let e = empirical_mean_stderr(&gaps).unwrap();
        assert!((e.mean - 0.5).abs() < 3.0 * e.stderr, "{e:?}");
    }

    #[test]
    fn correlation_basics() {
        assert!((correlation(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((correlation(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(correlation(&[1.0, 1.0], &[0.0, 5.0]).unwrap(), 0.0);
        assert!(correlation(&[1.0], &[1.0]).is_err());
        assert!(correlation(&[1.0, 2.0], &[1.0]).is_err());
    }
}
