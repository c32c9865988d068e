//! Binomial confidence intervals and chi-square tests.

use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Confidence level used for every reported interval.
pub const CONFIDENCE: f64 = 0.99;

/// Exact (Clopper–Pearson) two-sided interval for a binomial proportion.
pub fn clopper_pearson(successes: u64, n: u64, confidence: f64) -> Result<(f64, f64)> {
    if n == 0 || successes > n || !(0.0..1.0).contains(&confidence) {
        return Err(Error::Precondition(format!(
            "no interval for {successes} of {n} at level {confidence}"
        )));
    }
    let alpha = 1.0 - confidence;
    let (k, n) = (successes as f64, n as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        beta_quantile(k, n - k + 1.0, alpha / 2.0)?
    };
    let hi = if k == n {
        1.0
    } else {
        beta_quantile(k + 1.0, n - k, 1.0 - alpha / 2.0)?
    };
    Ok((lo, hi))
}

fn beta_quantile(a: f64, b: f64, p: f64) -> Result<f64> {
    let beta = Beta::new(a, b).map_err(|e| Error::Precondition(e.to_string()))?;
    Ok(beta.inverse_cdf(p))
}

/// Largest distance from the point estimate to either interval end.
pub fn halfwidth(successes: u64, n: u64, confidence: f64) -> Result<f64> {
    let (lo, hi) = clopper_pearson(successes, n, confidence)?;
    let p = successes as f64 / n as f64;
    Ok((hi - p).max(p - lo))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

/// Goodness of fit of `observed` counts to category probabilities.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(Error::Precondition(
            "need matching observed and expected vectors with at least two cells".into(),
        ));
    }
    let total: u64 = observed.iter().sum();
    let statistic = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    finish(statistic, observed.len() as u64 - 1)
}

/// Two-sample chi-square test that two count vectors share a distribution.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> Result<ChiSquare> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Precondition("count vectors must align".into()));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let n = na + nb;
    let mut statistic = 0.0;
    let mut cells = 0;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        cells += 1;
        let (ea, eb) = (na * col / n, nb * col / n);
        statistic += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    finish(statistic, cells.max(2) - 1)
}

fn finish(statistic: f64, dof: u64) -> Result<ChiSquare> {
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Precondition(e.to_string()))?;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}
