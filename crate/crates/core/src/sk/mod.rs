//! The Sherrington-Kirkpatrick model: couplings, energies, ground states,
//! and the rebalancing map that turns a free minimizer into a balanced one.
//!
//! The Hamiltonian is H(sigma) = -(2n)^{-1/2} sum_{i,j} J_ij sigma_i sigma_j
//! over the full coupling matrix, diagonal included. Off-diagonal terms act
//! through the symmetric combination W_ij = J_ij + J_ji = sqrt(2) Jsym_ij,
//! where Jsym is the symmetrized view with zero diagonal.

mod gibbs;

pub use gibbs::{free_energy, interp_derivative, GibbsSummary, InterpDerivative, ModelKind, ModelSpec};

use crate::cuts::{revolving_door, Constraint, SpinConfig};
use crate::rng::Stream;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SkError {
    SizeMismatch { spins: usize, n: usize },
    TooLarge { n: usize, max: usize },
    OddVertexCount,
    BadLength { len: usize, n: usize },
    BadInterpParams,
}

impl fmt::Display for SkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkError::SizeMismatch { spins, n } => write!(f, "{spins} spins for n = {n}"),
            SkError::TooLarge { n, max } => {
                write!(f, "exact enumeration limited to {max} spins, got {n}")
            }
            SkError::OddVertexCount => write!(f, "balanced configurations need even n"),
            SkError::BadLength { len, n } => {
                write!(f, "coupling matrix has {len} entries, expected {n}^2")
            }
            SkError::BadInterpParams => {
                write!(f, "interpolation needs 0 < t < 1, gamma > 0, l_max >= 8")
            }
        }
    }
}

/// n x n matrix of couplings, row-major; entries are meant to be drawn as
/// independent standard normals but any matrix is accepted.
#[derive(Clone, Debug)]
pub struct Couplings {
    n: usize,
    j: Vec<f64>,
}

impl Couplings {
    pub fn gaussian(n: usize, rng: &mut Stream) -> Self {
        let j = (0..n * n).map(|_| rng.normal()).collect();
        Couplings { n, j }
    }

    pub fn from_matrix(n: usize, j: Vec<f64>) -> Result<Self, SkError> {
        if j.len() != n * n {
            return Err(SkError::BadLength { len: j.len(), n });
        }
        Ok(Couplings { n, j })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn raw(&self, i: usize, k: usize) -> f64 {
        self.j[i * self.n + k]
    }

    /// Symmetrized view (J_ik + J_ki)/sqrt(2), zero on the diagonal.
    pub fn sym(&self, i: usize, k: usize) -> f64 {
        if i == k {
            0.0
        } else {
            (self.raw(i, k) + self.raw(k, i)) / core::f64::consts::SQRT_2
        }
    }

    /// Dense W_ik = J_ik + J_ki with zero diagonal; the energy differences
    /// below only ever see this combination.
    pub(crate) fn pair_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    w[i * n + k] = self.raw(i, k) + self.raw(k, i);
                }
            }
        }
        w
    }

    pub(crate) fn diag_sum(&self) -> f64 {
        (0..self.n).map(|i| self.raw(i, i)).sum()
    }
}

/// -(2n)^{-1/2} sum_{i,j} J_ij sigma_i sigma_j, diagonal included.
pub fn sk_energy(c: &Couplings, sc: &SpinConfig) -> Result<f64, SkError> {
    let n = c.n();
    if sc.n() != n {
        return Err(SkError::SizeMismatch { spins: sc.n(), n });
    }
    let s = sc.spins();
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for k in 0..n {
            row += c.raw(i, k) * s[k] as f64;
        }
        acc += row * s[i] as f64;
    }
    Ok(-acc / libm::sqrt(2.0 * n as f64))
}

/// Local fields f_i = (2 sqrt n)^{-1} sum_j Jsym_ij sigma_j. The energy
/// splits as H = -sum_i sigma_i f_i - (2n)^{-1/2} sum_i J_ii, and flipping
/// spin i changes H by 4 sigma_i f_i.
pub fn local_fields(c: &Couplings, sc: &SpinConfig) -> Result<Vec<f64>, SkError> {
    let n = c.n();
    if sc.n() != n {
        return Err(SkError::SizeMismatch { spins: sc.n(), n });
    }
    let s = sc.spins();
    let scale = 1.0 / (2.0 * libm::sqrt(n as f64));
    Ok((0..n)
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..n {
                acc += c.sym(i, j) * s[j] as f64;
            }
            scale * acc
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroundMethod {
    Exact,
    Local,
}

/// Largest size accepted for exact ground-state enumeration.
pub const GROUND_MAX_N: usize = 24;

/// Minimum energy and a minimizer, free or balanced. Exact enumerates the
/// half-cube (H is even under a global flip) with Gray-code updates; Local
/// runs the annealer in `anneal_ground`.
pub fn sk_ground(
    c: &Couplings,
    constraint: Constraint,
    method: GroundMethod,
    rng: &mut Stream,
) -> Result<(f64, SpinConfig), SkError> {
    match method {
        GroundMethod::Exact => sk_ground_exact(c, constraint),
        GroundMethod::Local => anneal_ground(c, constraint, &SkAnnealOpts::default(), rng),
    }
}

fn sk_ground_exact(c: &Couplings, constraint: Constraint) -> Result<(f64, SpinConfig), SkError> {
    let n = c.n();
    if n == 0 || (constraint == Constraint::Bisection && n % 2 != 0) {
        return Err(SkError::OddVertexCount);
    }
    if n > GROUND_MAX_N {
        return Err(SkError::TooLarge { n, max: GROUND_MAX_N });
    }
    let w = c.pair_matrix();
    let mut spins = match constraint {
        Constraint::Free => vec![1i8; n],
        Constraint::Bisection => {
            (0..n).map(|v| if v < n / 2 { 1i8 } else { -1 }).collect::<Vec<_>>()
        }
    };
    // S = sum_{u<v} W_uv sigma_u sigma_v; H = -(S + trace)/sqrt(2n), so the
    // minimum energy is the maximum of S.
    let mut s_pairs = pair_sum(&w, n, &spins);
    let mut best = s_pairs;
    let mut best_spins = spins.clone();
    let flip = |v: usize, spins: &mut Vec<i8>, s_pairs: &mut f64| {
        let mut h = 0.0;
        for u in 0..n {
            h += w[v * n + u] * spins[u] as f64;
        }
        *s_pairs -= 2.0 * spins[v] as f64 * h;
        spins[v] = -spins[v];
    };
    match constraint {
        Constraint::Free => {
            for code in 1u64..(1u64 << (n - 1)) {
                let v = code.trailing_zeros() as usize + 1;
                flip(v, &mut spins, &mut s_pairs);
                if s_pairs > best {
                    best = s_pairs;
                    best_spins.copy_from_slice(&spins);
                }
            }
        }
        Constraint::Bisection => {
            revolving_door(n - 1, n / 2 - 1, true, &mut |out, inn| {
                flip(out + 1, &mut spins, &mut s_pairs);
                flip(inn + 1, &mut spins, &mut s_pairs);
                if s_pairs > best {
                    best = s_pairs;
                    best_spins.copy_from_slice(&spins);
                }
            });
        }
    }
    // Recompute the winner's pair sum directly: the incremental updates
    // accumulate rounding over 2^n steps.
    let exact = pair_sum(&w, n, &best_spins);
    let energy = -(exact + c.diag_sum()) / libm::sqrt(2.0 * n as f64);
    Ok((energy, SpinConfig::new(best_spins).expect("enumeration keeps spins valid")))
}

fn pair_sum(w: &[f64], n: usize, spins: &[i8]) -> f64 {
    let mut acc = 0.0;
    for u in 0..n {
        for v in (u + 1)..n {
            acc += w[u * n + v] * (spins[u] * spins[v]) as f64;
        }
    }
    acc
}

/// Annealing schedule for the heuristic ground-state search. Temperatures
/// are in energy units; typical single-flip moves are O(1).
#[derive(Clone, Copy, Debug)]
pub struct SkAnnealOpts {
    pub restarts: usize,
    pub moves_per_vertex: usize,
    pub cooling: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl Default for SkAnnealOpts {
    fn default() -> Self {
        SkAnnealOpts { restarts: 8, moves_per_vertex: 100, cooling: 0.95, t_start: 2.0, t_end: 0.01 }
    }
}

pub fn anneal_ground(
    c: &Couplings,
    constraint: Constraint,
    opts: &SkAnnealOpts,
    rng: &mut Stream,
) -> Result<(f64, SpinConfig), SkError> {
    let n = c.n();
    if n == 0 || (constraint == Constraint::Bisection && n % 2 != 0) {
        return Err(SkError::OddVertexCount);
    }
    let w = c.pair_matrix();
    let field = |spins: &[i8], v: usize| -> f64 {
        let mut h = 0.0;
        for u in 0..n {
            h += w[v * n + u] * spins[u] as f64;
        }
        h
    };
    // A change ds in the pair sum S changes the energy by -ds / sqrt(2n).
    let energy_unit = 1.0 / libm::sqrt(2.0 * n as f64);
    let mut best: Option<(f64, Vec<i8>)> = None;
    for r in 0..opts.restarts.max(1) {
        let mut rs = rng.derive(r as u64);
        let mut spins: Vec<i8> = match constraint {
            Constraint::Free => (0..n).map(|_| if rs.bernoulli(0.5) { 1 } else { -1 }).collect(),
            Constraint::Bisection => {
                let mut s: Vec<i8> = (0..n).map(|v| if v < n / 2 { 1 } else { -1 }).collect();
                rs.shuffle(&mut s);
                s
            }
        };
        let mut s_pairs = pair_sum(&w, n, &spins);
        consider(&mut best, s_pairs, &spins);
        let mut t = opts.t_start;
        while t > opts.t_end {
            for _ in 0..opts.moves_per_vertex * n {
                // Maximize S: a move raising S by ds lowers H.
                let ds = match constraint {
                    Constraint::Free => {
                        let v = rs.below(n as u64) as usize;
                        let ds = -2.0 * spins[v] as f64 * field(&spins, v);
                        if metropolis(-ds * energy_unit, t, &mut rs) {
                            spins[v] = -spins[v];
                            ds
                        } else {
                            continue;
                        }
                    }
                    Constraint::Bisection => {
                        let u = pick_side(&spins, 1, &mut rs);
                        let v = pick_side(&spins, -1, &mut rs);
                        let ds = -2.0 * spins[u] as f64 * field(&spins, u)
                            - 2.0 * spins[v] as f64 * field(&spins, v)
                            + 4.0 * w[u * n + v] * (spins[u] * spins[v]) as f64;
                        if metropolis(-ds * energy_unit, t, &mut rs) {
                            spins[u] = -spins[u];
                            spins[v] = -spins[v];
                            ds
                        } else {
                            continue;
                        }
                    }
                };
                s_pairs += ds;
                consider(&mut best, s_pairs, &spins);
            }
            t *= opts.cooling;
        }
    }
    let (_, spins) = best.expect("at least one restart ran");
    // Report the exact energy of the chosen configuration.
    let exact = pair_sum(&w, n, &spins);
    let energy = -(exact + c.diag_sum()) / libm::sqrt(2.0 * n as f64);
    Ok((energy, SpinConfig::new(spins).expect("moves keep spins valid")))
}

fn consider(best: &mut Option<(f64, Vec<i8>)>, s_pairs: f64, spins: &[i8]) {
    let better = match best {
        None => true,
        Some((b, _)) => s_pairs > *b,
    };
    if better {
        *best = Some((s_pairs, spins.to_vec()));
    }
}

fn metropolis(dh: f64, t: f64, rs: &mut Stream) -> bool {
    dh <= 0.0 || rs.next_f64() < libm::exp(-dh / t)
}

fn pick_side(spins: &[i8], side: i8, rs: &mut Stream) -> usize {
    loop {
        let v = rs.below(spins.len() as u64) as usize;
        if spins[v] == side {
            return v;
        }
    }
}

/// Balances a configuration by flipping majority spins, preferring those
/// with |f_i| <= 6 and breaking ties by smaller |f_i|, then smaller index.
/// The energy cost of each flip is 4 sigma_i f_i, so small fields keep the
/// balanced state close to the free minimizer.
pub fn rebalance(c: &Couplings, star: &SpinConfig) -> Result<SpinConfig, SkError> {
    let n = c.n();
    if star.n() != n {
        return Err(SkError::SizeMismatch { spins: star.n(), n });
    }
    if n % 2 != 0 {
        return Err(SkError::OddVertexCount);
    }
    // m = half the spin sum: the number of majority flips needed.
    let m = star.magnetization() / 2;
    if m == 0 {
        return Ok(star.clone());
    }
    let majority: i8 = if m > 0 { 1 } else { -1 };
    let need = m.unsigned_abs() as usize;
    let fields = local_fields(c, star)?;
    let mut candidates: Vec<usize> =
        (0..n).filter(|&i| star.spins()[i] == majority).collect();
    candidates.sort_by(|&a, &b| {
        let key = |i: usize| (libm::fabs(fields[i]) > 6.0, libm::fabs(fields[i]));
        key(a).partial_cmp(&key(b)).unwrap().then(a.cmp(&b))
    });
    let mut spins = star.spins().to_vec();
    for &i in candidates.iter().take(need) {
        spins[i] = -spins[i];
    }
    SpinConfig::new(spins).map_err(|_| SkError::OddVertexCount)
}
