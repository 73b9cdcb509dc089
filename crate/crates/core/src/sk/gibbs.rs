//! Exact Gibbs summaries by enumeration: log-partition functions, free
//! energy densities, and multi-replica overlap moments for one disorder
//! sample. Disorder averaging belongs to the caller.
//!
//! Every Hamiltonian here is even under a global spin flip, so only the
//! sigma_0 = +1 half of the state space is walked (Gray code on the cube,
//! revolving-door order on the balanced slice) and the partition function
//! is doubled. The log-sum-exp runs online with a running maximum, and the
//! moment identity <Q_l^2> = n^{-2} sum_{ij} <sigma_i sigma_j>^l reduces
//! every overlap moment to pair correlations of a single replica.

use super::{Couplings, SkError};
use crate::cuts::revolving_door;
use crate::graphs::MultiGraph;
use alloc::vec;
use alloc::vec::Vec;

/// Largest size accepted for enumeration of the partition function.
pub const GIBBS_MAX_N: usize = 22;
/// Largest size accepted for the interpolation derivative (moment matrix
/// accumulation on every visited configuration).
pub const INTERP_MAX_N: usize = 16;

#[derive(Clone, Debug)]
pub enum ModelSpec<'a> {
    /// H = -(2n)^{-1/2} sum_{ij} J_ij sigma_i sigma_j.
    Sk { c: &'a Couplings },
    /// H = -scale * sum_edges mult * sigma_u sigma_v (loops contribute the
    /// constant -scale * mult each).
    Dilute { g: &'a MultiGraph, scale: f64 },
    /// H = (2 gamma)^{-1/2} H_dilute + sqrt(t) H_sk; the graph is expected
    /// to be sampled at rate gamma * (1 - t) by the caller.
    Interp { c: &'a Couplings, g: &'a MultiGraph, gamma: f64, t: f64 },
}

impl ModelSpec<'_> {
    fn n(&self) -> Result<usize, SkError> {
        match self {
            ModelSpec::Sk { c } => Ok(c.n()),
            ModelSpec::Dilute { g, .. } => Ok(g.n()),
            ModelSpec::Interp { c, g, .. } => {
                if c.n() != g.n() {
                    return Err(SkError::SizeMismatch { spins: g.n(), n: c.n() });
                }
                Ok(c.n())
            }
        }
    }

    fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Sk { .. } => ModelKind::Sk,
            ModelSpec::Dilute { scale, .. } => ModelKind::Dilute { scale: *scale },
            ModelSpec::Interp { gamma, t, .. } => ModelKind::Interp { gamma: *gamma, t: *t },
        }
    }
}

/// Value-only tag recording which model a summary came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelKind {
    Sk,
    Dilute { scale: f64 },
    Interp { gamma: f64, t: f64 },
}

#[derive(Clone, Debug)]
pub struct GibbsSummary {
    pub beta: f64,
    pub model: ModelKind,
    /// log Z for this disorder sample.
    pub log_partition: f64,
    /// log Z / n.
    pub free_energy_density: f64,
    /// <Q_l^2> for l = 1..=l_max; empty when l_max = 0.
    pub overlap_moments: Vec<f64>,
}

pub fn free_energy(
    model: &ModelSpec,
    beta: f64,
    constrained: bool,
    l_max: usize,
) -> Result<GibbsSummary, SkError> {
    let n = model.n()?;
    if n == 0 || (constrained && n % 2 != 0) {
        return Err(SkError::OddVertexCount);
    }
    if n > GIBBS_MAX_N {
        return Err(SkError::TooLarge { n, max: GIBBS_MAX_N });
    }

    // H(sigma) = sk_coef * (S + trace) + graph_coef * T, where S is the
    // coupling pair sum, T the edge spin sum, both tracked incrementally.
    let (w, diag, sk_coef) = match model {
        ModelSpec::Sk { c } => (Some(c.pair_matrix()), c.diag_sum(), -1.0 / libm::sqrt(2.0 * n as f64)),
        ModelSpec::Dilute { .. } => (None, 0.0, 0.0),
        ModelSpec::Interp { c, t, .. } => {
            if !(0.0..=1.0).contains(t) {
                return Err(SkError::BadInterpParams);
            }
            (Some(c.pair_matrix()), c.diag_sum(), -libm::sqrt(*t) / libm::sqrt(2.0 * n as f64))
        }
    };
    let (adj, loops, graph_coef) = match model {
        ModelSpec::Sk { .. } => (None, 0i64, 0.0),
        ModelSpec::Dilute { g, scale } => (Some(g.adjacency()), g.loop_total() as i64, -scale),
        ModelSpec::Interp { g, gamma, .. } => {
            if !(*gamma > 0.0) {
                return Err(SkError::BadInterpParams);
            }
            (Some(g.adjacency()), g.loop_total() as i64, -1.0 / libm::sqrt(2.0 * gamma))
        }
    };

    let mut acc = Walk {
        n,
        beta,
        spins: match constrained {
            false => vec![1i8; n],
            true => (0..n).map(|v| if v < n / 2 { 1 } else { -1 }).collect(),
        },
        w,
        adj,
        s_pairs: 0.0,
        t_sum: 0,
        diag,
        sk_coef,
        graph_coef,
        max_x: f64::NEG_INFINITY,
        wsum: 0.0,
        corr: if l_max > 0 { vec![0.0; n * n] } else { Vec::new() },
    };
    acc.s_pairs = acc.initial_pair_sum();
    acc.t_sum = acc.initial_edge_sum() + loops;
    acc.visit();
    if constrained {
        revolving_door(n - 1, n / 2 - 1, true, &mut |out, inn| {
            acc.flip(out + 1);
            acc.flip(inn + 1);
            acc.visit();
        });
    } else if n > 1 {
        for code in 1u64..(1u64 << (n - 1)) {
            acc.flip(code.trailing_zeros() as usize + 1);
            acc.visit();
        }
    }

    let log_partition = acc.max_x + libm::log(acc.wsum) + core::f64::consts::LN_2;
    let mut overlap_moments = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let mut sum = n as f64; // diagonal pairs: <sigma_i sigma_i> = 1
        for i in 0..n {
            for j in (i + 1)..n {
                let c = acc.corr[i * n + j] / acc.wsum;
                sum += 2.0 * powi(c, l);
            }
        }
        let m = sum / (n * n) as f64;
        debug_assert!((-1e-9..=1.0 + 1e-9).contains(&m), "moment {l} = {m}");
        overlap_moments.push(m.clamp(0.0, 1.0));
    }
    Ok(GibbsSummary {
        beta,
        model: model.kind(),
        log_partition,
        free_energy_density: log_partition / n as f64,
        overlap_moments,
    })
}

struct Walk {
    n: usize,
    beta: f64,
    spins: Vec<i8>,
    w: Option<Vec<f64>>,
    adj: Option<Vec<Vec<(u32, u32)>>>,
    s_pairs: f64,
    t_sum: i64,
    diag: f64,
    sk_coef: f64,
    graph_coef: f64,
    max_x: f64,
    wsum: f64,
    corr: Vec<f64>,
}

impl Walk {
    fn initial_pair_sum(&self) -> f64 {
        let Some(w) = &self.w else { return 0.0 };
        let mut acc = 0.0;
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                acc += w[u * self.n + v] * (self.spins[u] * self.spins[v]) as f64;
            }
        }
        acc
    }

    fn initial_edge_sum(&self) -> i64 {
        let Some(adj) = &self.adj else { return 0 };
        let mut acc = 0i64;
        for u in 0..self.n {
            for &(v, m) in &adj[u] {
                if (v as usize) > u {
                    acc += m as i64 * (self.spins[u] * self.spins[v as usize]) as i64;
                }
            }
        }
        acc
    }

    fn flip(&mut self, v: usize) {
        if let Some(w) = &self.w {
            let mut h = 0.0;
            for u in 0..self.n {
                h += w[v * self.n + u] * self.spins[u] as f64;
            }
            self.s_pairs -= 2.0 * self.spins[v] as f64 * h;
        }
        if let Some(adj) = &self.adj {
            let mut h = 0i64;
            for &(u, m) in &adj[v] {
                h += m as i64 * self.spins[u as usize] as i64;
            }
            self.t_sum -= 2 * self.spins[v] as i64 * h;
        }
        self.spins[v] = -self.spins[v];
    }

    fn visit(&mut self) {
        let energy =
            self.sk_coef * (self.s_pairs + self.diag) + self.graph_coef * self.t_sum as f64;
        let x = -self.beta * energy;
        if x > self.max_x {
            // Rescale the running sums to the new reference point.
            let factor = libm::exp(self.max_x - x);
            self.wsum *= factor;
            for c in self.corr.iter_mut() {
                *c *= factor;
            }
            self.max_x = x;
        }
        let p = libm::exp(x - self.max_x);
        self.wsum += p;
        if !self.corr.is_empty() {
            for i in 0..self.n {
                let row = i * self.n;
                let pi = p * self.spins[i] as f64;
                for j in (i + 1)..self.n {
                    self.corr[row + j] += pi * self.spins[j] as f64;
                }
            }
        }
    }
}

fn powi(x: f64, l: usize) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = l;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[derive(Clone, Debug)]
pub struct InterpDerivative {
    /// (beta^2/4) (1 - <Q_2^2>).
    pub d_sk: f64,
    /// -gamma log cosh(b) + gamma sum_l ((-1)^l / l) tanh(b)^l <Q_l^2>,
    /// b = beta / sqrt(2 gamma), truncated at l_max.
    pub d_dilute: f64,
    /// Bound on the dropped series tail: gamma |tanh b|^{l_max+1} / (1 - |tanh b|).
    pub tail_bound: f64,
    pub summary: GibbsSummary,
}

/// Both halves of d(log Z / n)/dt for the interpolating model at one
/// disorder sample (c, g); g should be Poissonized at rate gamma (1 - t).
pub fn interp_derivative(
    c: &Couplings,
    g: &MultiGraph,
    beta: f64,
    gamma: f64,
    t: f64,
    l_max: usize,
) -> Result<InterpDerivative, SkError> {
    let n = c.n();
    if n > INTERP_MAX_N {
        return Err(SkError::TooLarge { n, max: INTERP_MAX_N });
    }
    if !(t > 0.0 && t < 1.0) || !(gamma > 0.0) || l_max < 8 {
        return Err(SkError::BadInterpParams);
    }
    let model = ModelSpec::Interp { c, g, gamma, t };
    let summary = free_energy(&model, beta, true, l_max)?;
    let b = beta / libm::sqrt(2.0 * gamma);
    let th = libm::tanh(b);
    let d_sk = beta * beta / 4.0 * (1.0 - summary.overlap_moments[1]);
    let mut series = 0.0;
    let mut th_pow = 1.0;
    for l in 1..=l_max {
        th_pow *= th;
        let sign = if l % 2 == 1 { -1.0 } else { 1.0 };
        series += sign / l as f64 * th_pow * summary.overlap_moments[l - 1];
    }
    let d_dilute = -gamma * log_cosh(b) + gamma * series;
    let at = libm::fabs(th);
    let tail_bound = gamma * at * libm::fabs(th_pow) / (1.0 - at);
    Ok(InterpDerivative { d_sk, d_dilute, tail_bound, summary })
}

fn log_cosh(x: f64) -> f64 {
    crate::math::log_2cosh(x) - core::f64::consts::LN_2
}
