//! Small statistical helpers for experiment verdicts.

use anyhow::{ensure, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Chi-square goodness-of-fit p-value against the uniform distribution over
/// the observed cells. `counts` must cover every possible cell, including
/// empty ones, so the degrees of freedom come out right.
pub fn chisq_uniform_p(counts: &[u64]) -> Result<f64> {
    ensure!(counts.len() >= 2, "need at least two cells");
    let total: u64 = counts.iter().sum();
    ensure!(total > 0, "need at least one observation");
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64)?;
    Ok(1.0 - dist.cdf(stat))
}
