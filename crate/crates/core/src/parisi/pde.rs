//! Finite-difference solver for the Parisi PDE.
//!
//! Marching runs backward from q = 1 to q = 0 (forward in tau = 1 - q):
//!
//!   df/dtau = (1/2) d2f/dy2 + (x/2) (df/dy)^2
//!
//! The diffusion is Crank-Nicolson (tridiagonal solve per step, zero-Neumann
//! walls); the square-gradient term is explicit with centered differences,
//! second order via Adams-Bashforth weights inside each x-interval. The
//! explicit term limits the step: frozen-coefficient analysis gives
//! dq <= 1/max(x)^2 (|df/dy| <= 1 from the boundary data on), which is
//! checked up front. Walls sit at |y| = L with L >= 6 + 3 beta, far enough
//! that the Neumann flux error cannot reach (0,0) at working precision.

use super::{ParisiError, RsbProfile};
use crate::math::log_2cosh;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct PdeGrid {
    pub half_width: f64,
    pub dy: f64,
    pub dq: f64,
}

impl PdeGrid {
    /// Defaults tuned for |P_pde - P_recursion| below 1e-4 up to beta = 16.
    pub fn default_for(beta: f64) -> Self {
        PdeGrid {
            half_width: 6.0 + 3.0 * beta,
            dy: 0.01 * if beta < 1.0 { 1.0 / beta } else { 1.0 },
            dq: 1.0 / 512.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PdeField {
    /// q levels, ascending, q[0] = 0 and q[last] = 1.
    pub q: Vec<f64>,
    /// Symmetric y grid, ascending, odd length, y = 0 at the center.
    pub y: Vec<f64>,
    /// One row per q level: f[i][j] = f(q[i], y[j]).
    pub f: Vec<Vec<f64>>,
}

impl PdeField {
    /// f(0, 0).
    pub fn corner_value(&self) -> f64 {
        self.f[0][self.y.len() / 2]
    }
}

pub fn solve_pde(profile: &RsbProfile, grid: &PdeGrid) -> Result<PdeField, ParisiError> {
    let beta = profile.beta();
    let need = 6.0 + 3.0 * beta;
    if grid.half_width < need {
        return Err(ParisiError::DomainTooSmall { have: grid.half_width, need });
    }
    if !(grid.dy > 1e-4 && grid.dy <= 0.1) {
        return Err(ParisiError::BadSpacing(grid.dy));
    }
    let xmax = *profile.values().last().unwrap();
    let bound = if xmax > 0.0 { 1.0 / (xmax * xmax) } else { f64::INFINITY };
    if !(grid.dq > 0.0) || grid.dq > bound {
        return Err(ParisiError::UnstableStep { dq: grid.dq, bound });
    }
    // dq must divide every x-interval so steps never straddle a jump of x.
    let breaks = profile.breaks();
    let mut steps_per = Vec::with_capacity(profile.k());
    for l in 0..profile.k() {
        let len = breaks[l + 1] - breaks[l];
        let steps = libm::round(len / grid.dq);
        if steps < 1.0 || libm::fabs(steps * grid.dq - len) > 1e-9 {
            return Err(ParisiError::MisalignedInterval { index: l });
        }
        steps_per.push(steps as usize);
    }

    let half = libm::ceil(grid.half_width / grid.dy) as usize;
    let npts = 2 * half + 1;
    let y: Vec<f64> = (0..npts).map(|j| (j as f64 - half as f64) * grid.dy).collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut qs: Vec<f64> = Vec::new();
    let boundary: Vec<f64> = y.iter().map(|&yy| log_2cosh(beta * yy) / beta).collect();
    rows.push(boundary);
    qs.push(1.0);

    let r = grid.dq / (4.0 * grid.dy * grid.dy);
    let mut solver = CrankNicolson::new(npts, r);
    let mut g_prev: Vec<f64> = vec![0.0; npts];
    let mut g_cur: Vec<f64> = vec![0.0; npts];

    // March intervals from the top (l = k-1 down to 0).
    for l in (0..profile.k()).rev() {
        let m = profile.values()[l];
        for step in 0..steps_per[l] {
            let f_old = rows.last().unwrap();
            square_gradient(f_old, grid.dy, m, &mut g_cur);
            // AB2 weights once a history exists inside this interval;
            // plain Euler on the first step after each jump of x.
            let fresh = step == 0;
            let mut f_new = vec![0.0; npts];
            for j in 0..npts {
                let g = if fresh { g_cur[j] } else { 1.5 * g_cur[j] - 0.5 * g_prev[j] };
                f_new[j] = f_old[j] + grid.dq * g;
            }
            solver.step(f_old, &mut f_new);
            rows.push(f_new);
            qs.push(qs.last().unwrap() - grid.dq);
            core::mem::swap(&mut g_prev, &mut g_cur);
        }
    }
    // Snap the final level to exactly 0 (it is 0 up to rounding).
    *qs.last_mut().unwrap() = 0.0;

    rows.reverse();
    qs.reverse();
    Ok(PdeField { q: qs, y, f: rows })
}

/// g = (m/2) (df/dy)^2 with centered differences; the Neumann walls make the
/// one-sided gradient zero there.
fn square_gradient(f: &[f64], dy: f64, m: f64, out: &mut [f64]) {
    let n = f.len();
    out[0] = 0.0;
    out[n - 1] = 0.0;
    let c = m / (8.0 * dy * dy);
    for j in 1..n - 1 {
        let d = f[j + 1] - f[j - 1];
        out[j] = c * d * d;
    }
}

/// (I - r D) f_new = (I + r D) f_old + explicit part already in f_new,
/// where D is the Neumann second-difference stencil. The tridiagonal factors
/// depend only on r, so they are computed once.
struct CrankNicolson {
    r: f64,
    // Thomas forward-elimination coefficients for the constant matrix.
    cprime: Vec<f64>,
    scratch: Vec<f64>,
}

impl CrankNicolson {
    fn new(n: usize, r: f64) -> Self {
        let mut cprime = vec![0.0; n];
        // Matrix: diag 1+2r, off-diag -r, first/last rows use -2r (ghost point).
        let mut denom = 1.0 + 2.0 * r;
        cprime[0] = -2.0 * r / denom;
        for j in 1..n {
            let upper = if j == n - 1 { 0.0 } else { -r };
            let lower = if j == n - 1 { -2.0 * r } else { -r };
            denom = (1.0 + 2.0 * r) - lower * cprime[j - 1];
            cprime[j] = upper / denom;
        }
        CrankNicolson { r, cprime, scratch: vec![0.0; n] }
    }

    /// On entry f_new holds f_old + dq * g; on exit the CN update is applied.
    fn step(&mut self, f_old: &[f64], f_new: &mut [f64]) {
        let n = f_old.len();
        let r = self.r;
        // rhs = (I + r D) f_old + explicit increment already present.
        self.scratch[0] = f_new[0] + r * (2.0 * f_old[1] - 2.0 * f_old[0]);
        for j in 1..n - 1 {
            self.scratch[j] =
                f_new[j] + r * (f_old[j + 1] - 2.0 * f_old[j] + f_old[j - 1]);
        }
        self.scratch[n - 1] = f_new[n - 1] + r * (2.0 * f_old[n - 2] - 2.0 * f_old[n - 1]);

        // Thomas solve with precomputed c'.
        let mut denom = 1.0 + 2.0 * r;
        self.scratch[0] /= denom;
        for j in 1..n {
            let lower = if j == n - 1 { -2.0 * r } else { -r };
            denom = (1.0 + 2.0 * r) - lower * self.cprime[j - 1];
            self.scratch[j] = (self.scratch[j] - lower * self.scratch[j - 1]) / denom;
        }
        f_new[n - 1] = self.scratch[n - 1];
        for j in (0..n - 1).rev() {
            f_new[j] = self.scratch[j] - self.cprime[j] * f_new[j + 1];
        }
    }
}
