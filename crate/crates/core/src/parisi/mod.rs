//! The Parisi variational problem at inverse temperature beta.
//!
//! A step order parameter x: [0,1] -> [0,beta] is encoded by its breakpoints
//! 0 = q_0 < ... < q_k = 1 and values m_1 <= ... <= m_k. The boundary value
//! f(0,0) of the associated PDE
//!
//!   df/dq + (1/2) d2f/dy2 + (x(q)/2) (df/dy)^2 = 0,  f(1,y) = log(2 cosh(beta y))/beta
//!
//! is computed two independent ways (finite differences, and the exact
//! Gaussian-convolution recursion for step functions), and the functional is
//! P[x] = f(0,0) - (1/2) int_0^1 q x(q) dq. Minimizing over profiles and
//! extrapolating beta -> infinity estimates the ground-state constant.

mod minimize;
mod pde;
mod pstar;
mod recursion;

pub use minimize::{minimize_parisi, MinimizeOpts, MinimizeResult};
pub use pde::{solve_pde, PdeField, PdeGrid};
pub use pstar::{estimate_pstar, FitKind, PstarEstimate, PstarOpts};
pub use recursion::{recursion_value, RecursionOpts};

use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum ParisiError {
    BadBeta(f64),
    EmptyProfile,
    BreaksNotIncreasing,
    BreaksNotAnchored,
    ValuesNotMonotone,
    ValueOutOfRange { m: f64, beta: f64 },
    BadQuadSize(usize),
    BadSpacing(f64),
    DomainTooSmall { have: f64, need: f64 },
    UnstableStep { dq: f64, bound: f64 },
    MisalignedInterval { index: usize },
    BadLadder,
    SingularFit,
}

impl fmt::Display for ParisiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParisiError::BadBeta(b) => write!(f, "beta must be positive and finite, got {b}"),
            ParisiError::EmptyProfile => write!(f, "profile needs at least one step"),
            ParisiError::BreaksNotIncreasing => write!(f, "breakpoints must increase strictly"),
            ParisiError::BreaksNotAnchored => write!(f, "breakpoints must run from 0 to 1"),
            ParisiError::ValuesNotMonotone => write!(f, "step values must be nondecreasing"),
            ParisiError::ValueOutOfRange { m, beta } => {
                write!(f, "step value {m} outside [0, beta = {beta}]")
            }
            ParisiError::BadQuadSize(n) => {
                write!(f, "quadrature size {n} outside supported range 8..=512")
            }
            ParisiError::BadSpacing(h) => write!(f, "grid spacing {h} outside (1e-4, 0.1]"),
            ParisiError::DomainTooSmall { have, need } => {
                write!(f, "grid half-width {have} below required {need}")
            }
            ParisiError::UnstableStep { dq, bound } => {
                write!(f, "q-step {dq} violates the explicit-term stability bound {bound}")
            }
            ParisiError::MisalignedInterval { index } => {
                write!(f, "q-step does not divide interval {index}")
            }
            ParisiError::BadLadder => write!(f, "need >= 3 strictly increasing positive betas"),
            ParisiError::SingularFit => write!(f, "extrapolation fit is singular"),
        }
    }
}

/// Step order parameter; immutable once validated.
#[derive(Clone, Debug, PartialEq)]
pub struct RsbProfile {
    beta: f64,
    breaks: Vec<f64>, // 0 = q_0 < q_1 < ... < q_k = 1
    values: Vec<f64>, // m_1 <= ... <= m_k in [0, beta]
}

impl RsbProfile {
    /// `breaks` includes both endpoints (length k+1), `values` has length k.
    pub fn new(beta: f64, breaks: Vec<f64>, values: Vec<f64>) -> Result<Self, ParisiError> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(ParisiError::BadBeta(beta));
        }
        if values.is_empty() || breaks.len() != values.len() + 1 {
            return Err(ParisiError::EmptyProfile);
        }
        if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(ParisiError::BreaksNotAnchored);
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ParisiError::BreaksNotIncreasing);
        }
        if values.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(ParisiError::ValuesNotMonotone);
        }
        for &m in &values {
            if !(0.0..=beta).contains(&m) {
                return Err(ParisiError::ValueOutOfRange { m, beta });
            }
        }
        Ok(RsbProfile { beta, breaks, values })
    }

    /// The constant profile x == m.
    pub fn constant(beta: f64, m: f64) -> Result<Self, ParisiError> {
        RsbProfile::new(beta, alloc::vec![0.0, 1.0], alloc::vec![m])
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Right-continuous evaluation of x(q) on [0, 1].
    pub fn x_at(&self, q: f64) -> f64 {
        assert!((0.0..=1.0).contains(&q));
        for l in 0..self.k() {
            if q < self.breaks[l + 1] {
                return self.values[l];
            }
        }
        *self.values.last().unwrap()
    }

    /// (1/2) int_0^1 q x(q) dq, exactly.
    pub fn half_q_moment(&self) -> f64 {
        let mut acc = 0.0;
        for l in 0..self.k() {
            let (a, b) = (self.breaks[l], self.breaks[l + 1]);
            acc += self.values[l] * (b * b - a * a) / 2.0;
        }
        acc / 2.0
    }
}

/// How to evaluate the boundary value f(0,0).
#[derive(Clone, Debug)]
pub enum Method {
    Recursion(RecursionOpts),
    Pde(PdeGrid),
}

/// P[x] = f(0,0) - (1/2) int q x(q) dq, with f(0,0) from the chosen method.
pub fn parisi_functional(profile: &RsbProfile, method: &Method) -> Result<f64, ParisiError> {
    let f00 = match method {
        Method::Recursion(opts) => recursion_value(profile, opts)?,
        Method::Pde(grid) => solve_pde(profile, grid)?.corner_value(),
    };
    Ok(f00 - profile.half_q_moment())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_validation_rejects_bad_shapes() {
        assert!(RsbProfile::new(1.0, vec![0.0, 1.0], vec![0.5]).is_ok());
        assert_eq!(
            RsbProfile::new(0.0, vec![0.0, 1.0], vec![0.0]).unwrap_err(),
            ParisiError::BadBeta(0.0)
        );
        assert_eq!(
            RsbProfile::new(1.0, vec![0.0, 1.0], vec![]).unwrap_err(),
            ParisiError::EmptyProfile
        );
        assert_eq!(
            RsbProfile::new(1.0, vec![0.1, 1.0], vec![0.5]).unwrap_err(),
            ParisiError::BreaksNotAnchored
        );
        assert_eq!(
            RsbProfile::new(1.0, vec![0.0, 0.5, 0.5, 1.0], vec![0.1, 0.2, 0.3]).unwrap_err(),
            ParisiError::BreaksNotIncreasing
        );
        assert_eq!(
            RsbProfile::new(1.0, vec![0.0, 0.5, 1.0], vec![0.5, 0.2]).unwrap_err(),
            ParisiError::ValuesNotMonotone
        );
        assert!(matches!(
            RsbProfile::new(1.0, vec![0.0, 1.0], vec![1.5]).unwrap_err(),
            ParisiError::ValueOutOfRange { .. }
        ));
    }

    #[test]
    fn x_at_is_right_continuous_step() {
        let p = RsbProfile::new(2.0, vec![0.0, 0.25, 0.75, 1.0], vec![0.2, 0.9, 1.7]).unwrap();
        assert_eq!(p.x_at(0.0), 0.2);
        assert_eq!(p.x_at(0.25), 0.9);
        assert_eq!(p.x_at(0.74), 0.9);
        assert_eq!(p.x_at(0.75), 1.7);
        assert_eq!(p.x_at(1.0), 1.7);
    }

    #[test]
    fn half_q_moment_constant_profile() {
        // x == m: (1/2) int q m dq = m/4
        let p = RsbProfile::constant(2.0, 1.3).unwrap();
        assert!((p.half_q_moment() - 1.3 / 4.0).abs() < 1e-15);
        // two steps against direct integration
        let p = RsbProfile::new(2.0, vec![0.0, 0.4, 1.0], vec![0.5, 1.5]).unwrap();
        let exact = 0.5 * (0.5 * 0.4 * 0.4 / 2.0 + 1.5 * (1.0 - 0.4 * 0.4) / 2.0);
        assert!((p.half_q_moment() - exact).abs() < 1e-15);
    }
}
