//! Zero-temperature extrapolation of the minimized functional.
//!
//! The minimized value at inverse temperature beta approaches the
//! ground-state constant as beta grows; fitting values against 1/beta and
//! reading the intercept removes the leading finite-temperature correction.

use super::{minimize_parisi, MinimizeOpts, ParisiError, RsbProfile};
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitKind {
    Affine,
    Quadratic,
}

#[derive(Clone, Debug)]
pub struct PstarOpts {
    pub fit: FitKind,
    pub restarts: usize,
    pub quad_nodes: usize,
    pub seed: u64,
}

impl PstarOpts {
    pub fn new(seed: u64) -> Self {
        PstarOpts { fit: FitKind::Affine, restarts: 8, quad_nodes: 120, seed }
    }
}

#[derive(Clone, Debug)]
pub struct PstarEstimate {
    pub betas: Vec<f64>,
    pub values: Vec<f64>,
    pub profiles: Vec<RsbProfile>,
    pub pstar: f64,
    pub fit: FitKind,
    /// RMS of fit residuals; honest summary of how affine the ladder is.
    pub residual_rms: f64,
    pub evals: u64,
}

pub fn estimate_pstar(betas: &[f64], k: usize, opts: &PstarOpts) -> Result<PstarEstimate, ParisiError> {
    if betas.len() < 3
        || betas.windows(2).any(|w| !(w[0] < w[1]))
        || betas.iter().any(|&b| !(b > 0.0) || !b.is_finite())
    {
        return Err(ParisiError::BadLadder);
    }
    let mut values = Vec::with_capacity(betas.len());
    let mut profiles = Vec::with_capacity(betas.len());
    let mut evals = 0u64;
    for (i, &beta) in betas.iter().enumerate() {
        let mopts = MinimizeOpts {
            restarts: opts.restarts,
            eval: super::RecursionOpts { quad_nodes: opts.quad_nodes, ..super::RecursionOpts::default_for(beta) },
            ..MinimizeOpts::default_for(beta, opts.seed.wrapping_add(i as u64))
        };
        let res = minimize_parisi(beta, k, &mopts)?;
        values.push(res.value);
        profiles.push(res.profile);
        evals += res.evals;
    }
    let (pstar, residual_rms) = fit_intercept(betas, &values, opts.fit)?;
    Ok(PstarEstimate { betas: betas.to_vec(), values, profiles, pstar, fit: opts.fit, residual_rms, evals })
}

/// Least-squares fit of values against u = 1/beta; returns (intercept, rms).
pub fn fit_intercept(betas: &[f64], values: &[f64], fit: FitKind) -> Result<(f64, f64), ParisiError> {
    assert_eq!(betas.len(), values.len());
    let p = match fit {
        FitKind::Affine => 2,
        FitKind::Quadratic => 3,
    };
    if betas.len() < p {
        return Err(ParisiError::BadLadder);
    }
    // Normal equations for the Vandermonde in u.
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (&b, &v) in betas.iter().zip(values) {
        let u = 1.0 / b;
        let row = [1.0, u, u * u];
        for i in 0..p {
            for j in 0..p {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * v;
        }
    }
    let coef = solve_small(&mut ata, &mut atb, p)?;
    let mut ss = 0.0;
    for (&b, &v) in betas.iter().zip(values) {
        let u = 1.0 / b;
        let pred = coef[0] + coef[1] * u + if p == 3 { coef[2] * u * u } else { 0.0 };
        ss += (pred - v) * (pred - v);
    }
    Ok((coef[0], libm::sqrt(ss / betas.len() as f64)))
}

fn solve_small(a: &mut [[f64; 3]; 3], b: &mut [f64; 3], p: usize) -> Result<[f64; 3], ParisiError> {
    for col in 0..p {
        let mut piv = col;
        for r in col + 1..p {
            if libm::fabs(a[r][col]) > libm::fabs(a[piv][col]) {
                piv = r;
            }
        }
        if libm::fabs(a[piv][col]) < 1e-12 {
            return Err(ParisiError::SingularFit);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..p {
            let f = a[r][col] / a[col][col];
            for c in col..p {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for r in (0..p).rev() {
        let mut acc = b[r];
        for c in r + 1..p {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_fit_recovers_exact_line() {
        let betas = [2.0, 4.0, 8.0, 16.0];
        let values: Vec<f64> = betas.iter().map(|b| 0.76 + 0.3 / b).collect();
        let (c, rms) = fit_intercept(&betas, &values, FitKind::Affine).unwrap();
        assert!((c - 0.76).abs() < 1e-12);
        assert!(rms < 1e-12);
    }

    #[test]
    fn quadratic_fit_recovers_exact_parabola() {
        let betas = [1.0, 2.0, 4.0, 8.0, 16.0];
        let values: Vec<f64> = betas.iter().map(|b| 0.76 + 0.3 / b - 0.2 / (b * b)).collect();
        let (c, rms) = fit_intercept(&betas, &values, FitKind::Quadratic).unwrap();
        assert!((c - 0.76).abs() < 1e-10);
        assert!(rms < 1e-10);
    }

    #[test]
    fn ladder_must_be_increasing_and_long_enough() {
        let opts = PstarOpts::new(1);
        assert_eq!(estimate_pstar(&[2.0, 2.0, 4.0], 1, &opts).unwrap_err(), ParisiError::BadLadder);
        assert_eq!(estimate_pstar(&[2.0, 4.0], 1, &opts).unwrap_err(), ParisiError::BadLadder);
        assert_eq!(
            estimate_pstar(&[-1.0, 2.0, 4.0], 1, &opts).unwrap_err(),
            ParisiError::BadLadder
        );
    }
}
