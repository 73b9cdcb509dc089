//! Exact backward recursion for step profiles.
//!
//! On an interval where x == m the PDE linearizes through the Cole-Hopf
//! substitution u = exp(m f), giving
//!
//!   f_{l-1}(y) = (1/m_l) log E_Z[ exp(m_l f_l(y + Z sqrt(q_l - q_{l-1}))) ]
//!
//! (plain Gaussian smoothing when m_l = 0). The boundary f_k is evaluated in
//! closed form wherever the quadrature needs it; intermediate levels live on
//! uniform y-grids sized so every quadrature point stays in range, with cubic
//! interpolation in between.

use super::{ParisiError, RsbProfile};
use crate::math::log_2cosh;
use crate::quad::GaussHermite;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct RecursionOpts {
    /// Gauss-Hermite size for each convolution step.
    pub quad_nodes: usize,
    /// Spacing of the intermediate y-grids.
    pub dy: f64,
}

impl RecursionOpts {
    pub fn default_for(beta: f64) -> Self {
        // log(2 cosh) has poles at i pi/(2 beta), so Gauss-Hermite accuracy
        // degrades as beta grows; 200 nodes keeps the boundary average below
        // 1e-5 error through beta = 4. The boundary curvature scale is 1/beta;
        // keep a few grid points per feature but never waste resolution at
        // small beta.
        RecursionOpts { quad_nodes: 200, dy: 0.01 * if beta < 1.0 { 1.0 / beta } else { 1.0 } }
    }

    fn validate(&self) -> Result<(), ParisiError> {
        if !(8..=512).contains(&self.quad_nodes) {
            return Err(ParisiError::BadQuadSize(self.quad_nodes));
        }
        if !(self.dy > 1e-4 && self.dy <= 0.1) {
            return Err(ParisiError::BadSpacing(self.dy));
        }
        Ok(())
    }
}

/// f(0,0) for the given profile.
pub fn recursion_value(profile: &RsbProfile, opts: &RecursionOpts) -> Result<f64, ParisiError> {
    opts.validate()?;
    let beta = profile.beta();
    let k = profile.k();
    let breaks = profile.breaks();
    let ms = profile.values();

    let gh = GaussHermite::new(opts.quad_nodes);
    let (z, w) = gh.normal_rule();
    let zmax = z[z.len() - 1];

    // Grid half-widths, in points, for each stored level. Queries into f_l
    // come from grid points of f_{l-1} shifted by at most zmax * sqrt(dq_l),
    // so sizing forward from the previous *stored* width (not the ideal
    // reach) keeps every query at least one cell inside the grid.
    let dq: Vec<f64> = (0..k).map(|l| breaks[l + 1] - breaks[l]).collect();
    let mut halfs = vec![0usize; k];
    for l in 1..k {
        let need = halfs[l - 1] as f64 * opts.dy + zmax * libm::sqrt(dq[l - 1]);
        halfs[l] = libm::ceil(need / opts.dy) as usize + 1;
    }

    let boundary = |y: f64| log_2cosh(beta * y) / beta;

    // Work backward: fl holds f_l sampled on a symmetric grid with spacing dy.
    let mut fl: Vec<f64> = Vec::new();
    let mut half_points = 0usize; // grid is -half..=half times dy
    for l in (1..=k).rev() {
        let s = libm::sqrt(dq[l - 1]);
        let m = ms[l - 1];
        let new_half = halfs[l - 1];
        let mut fnew = Vec::with_capacity(2 * new_half + 1);
        let mut fvals = vec![0.0; z.len()];
        for gi in 0..=2 * new_half {
            let y = (gi as f64 - new_half as f64) * opts.dy;
            for (j, &zj) in z.iter().enumerate() {
                let arg = y + s * zj;
                fvals[j] = if l == k {
                    boundary(arg)
                } else {
                    interp_uniform(&fl, half_points, opts.dy, arg)
                };
            }
            fnew.push(tilted_average(&fvals, &w, m));
        }
        fl = fnew;
        half_points = new_half;
    }
    Ok(fl[half_points])
}

/// log-sum-exp average with tilt m, or the plain mean when m == 0.
fn tilted_average(f: &[f64], w: &[f64], m: f64) -> f64 {
    if m <= 1e-12 {
        let mut acc = 0.0;
        for (fi, wi) in f.iter().zip(w) {
            acc += wi * fi;
        }
        return acc;
    }
    let mut top = f64::NEG_INFINITY;
    for &fi in f {
        if fi > top {
            top = fi;
        }
    }
    let mut acc = 0.0;
    for (fi, wi) in f.iter().zip(w) {
        acc += wi * libm::exp(m * (fi - top));
    }
    top + libm::log(acc) / m
}

/// Cubic Lagrange interpolation on the symmetric uniform grid (index i <->
/// y = (i-half)*dy). Grid sizing guarantees queries stay in range and every
/// stored grid has at least 5 points.
#[inline]
fn interp_uniform(f: &[f64], half: usize, dy: f64, y: f64) -> f64 {
    let pos = y / dy + half as f64;
    debug_assert!(pos >= 0.0 && pos <= (f.len() - 1) as f64, "quadrature point left the grid");
    debug_assert!(f.len() >= 4);
    let base = (pos as isize - 1).clamp(0, f.len() as isize - 4) as usize;
    let u = pos - base as f64;
    let l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    f[base] * l0 + f[base + 1] * l1 + f[base + 2] * l2 + f[base + 3] * l3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parisi::{parisi_functional, Method};

    fn opts() -> RecursionOpts {
        RecursionOpts::default_for(1.0)
    }

    #[test]
    fn rejects_out_of_range_options() {
        let p = RsbProfile::constant(1.0, 0.5).unwrap();
        let bad = RecursionOpts { quad_nodes: 4, dy: 0.01 };
        assert_eq!(recursion_value(&p, &bad).unwrap_err(), ParisiError::BadQuadSize(4));
        let bad = RecursionOpts { quad_nodes: 64, dy: 0.5 };
        assert_eq!(recursion_value(&p, &bad).unwrap_err(), ParisiError::BadSpacing(0.5));
    }

    #[test]
    fn constant_profile_at_beta_is_analytic() {
        // x == beta: f(0,0) = beta/2 + log(2)/beta exactly.
        for &beta in &[1.0, 2.0, 4.0] {
            let p = RsbProfile::constant(beta, beta).unwrap();
            let v = recursion_value(&p, &RecursionOpts::default_for(beta)).unwrap();
            let exact = beta / 2.0 + (2.0f64).ln() / beta;
            assert!((v - exact).abs() < 1e-9, "beta={beta}: {v} vs {exact}");
        }
    }

    #[test]
    fn zero_profile_matches_simpson_oracle() {
        // x == 0: f(0,0) = E[log(2 cosh(beta Z))]/beta. Oracle: composite
        // Simpson on the damped integrand, nothing shared with the
        // implementation's quadrature.
        for &beta in &[1.0f64, 2.0] {
            let h = 5e-4;
            let lim = 10.0;
            let steps = (2.0 * lim / h) as usize / 2 * 2;
            let mut acc = 0.0;
            for i in 0..=steps {
                let z = -lim + i as f64 * h;
                let coef = if i == 0 || i == steps {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let phi = (-0.5 * z * z).exp() / (2.0 * core::f64::consts::PI).sqrt();
                acc += coef * phi * (2.0 * (beta * z).cosh()).ln() / beta;
            }
            let oracle = acc * h / 3.0;
            let p = RsbProfile::constant(beta, 0.0).unwrap();
            let v = recursion_value(&p, &RecursionOpts::default_for(beta)).unwrap();
            assert!((v - oracle).abs() < 1e-9, "beta={beta}: {v} vs {oracle}");
        }
    }

    #[test]
    fn frozen_value_x_zero_beta_one() {
        // E[log(2 cosh Z)] to 1e-10 (independent high-precision evaluation).
        let p = RsbProfile::constant(1.0, 0.0).unwrap();
        let v = recursion_value(&p, &opts()).unwrap();
        assert!((v - 1.067_714_388_051_383_3).abs() < 1e-10, "v={v}");
    }

    #[test]
    fn one_step_functional_values() {
        // P[x == beta] = beta/4 + log(2)/beta.
        for &beta in &[1.0, 2.0, 4.0] {
            let p = RsbProfile::constant(beta, beta).unwrap();
            let v = parisi_functional(&p, &Method::Recursion(RecursionOpts::default_for(beta)))
                .unwrap();
            let exact = beta / 4.0 + (2.0f64).ln() / beta;
            assert!((v - exact).abs() < 1e-9, "beta={beta}");
        }
    }

    #[test]
    fn splitting_an_interval_without_changing_x_is_a_no_op() {
        // Refining the partition with equal values must not move f(0,0)
        // beyond grid error.
        let one = RsbProfile::new(2.0, vec![0.0, 1.0], vec![1.1]).unwrap();
        let two = RsbProfile::new(2.0, vec![0.0, 0.37, 1.0], vec![1.1, 1.1]).unwrap();
        let a = recursion_value(&one, &opts()).unwrap();
        let b = recursion_value(&two, &opts()).unwrap();
        assert!((a - b).abs() < 2e-6, "{a} vs {b}");
    }

    #[test]
    fn value_is_monotone_in_m_for_one_step() {
        // E[exp(m f)]^(1/m) is nondecreasing in m (power-mean inequality), so
        // one-step f(0,0) grows with m.
        let mut last = f64::NEG_INFINITY;
        for &m in &[0.0, 0.5, 1.0, 1.5, 2.0] {
            let p = RsbProfile::constant(2.0, m).unwrap();
            let v = recursion_value(&p, &opts()).unwrap();
            assert!(v >= last - 1e-12, "m={m}");
            last = v;
        }
    }
}
