//! Laplacian eigenvalue bounds for bisection cuts.
//!
//! Every balanced configuration sigma is orthogonal to the all-ones vector
//! and satisfies 4 cut(sigma) = sigma' L sigma, so Rayleigh bounds give
//!
//!   (n/4) lambda_2(L) <= min bisection <= max bisection <= (n/4) lambda_max(L).
//!
//! Both extreme eigenvalues come from power iteration with the all-ones
//! direction projected out each step; lambda_2 via the spectral shift
//! c I - L with c above the Gershgorin bound 2 max_deg. Estimates are padded
//! by the final residual norm, the distance from the Rayleigh quotient to
//! the nearest true eigenvalue, so the reported interval stays a valid
//! sandwich once the iteration has locked onto the extreme eigenpair.

use super::{Constraint, CutError, CutResult, Objective, SolverKind};
use crate::graphs::MultiGraph;
use crate::rng::Stream;
use alloc::vec;
use alloc::vec::Vec;

const RESIDUAL_TOL: f64 = 1e-11;
const MAX_ITERS: usize = 200_000;

pub fn spectral_bounds(
    g: &MultiGraph,
    objective: Objective,
    constraint: Constraint,
    rng: &mut Stream,
) -> Result<CutResult, CutError> {
    if constraint != Constraint::Bisection {
        return Err(CutError::NeedsBisection);
    }
    let n = g.n();
    if n == 0 {
        return Err(CutError::EmptyGraph);
    }
    if n % 2 != 0 {
        return Err(CutError::OddVertexCount);
    }

    let adj = g.adjacency();
    let degs: Vec<f64> = adj
        .iter()
        .map(|row| row.iter().map(|&(_, m)| m as f64).sum())
        .collect();
    let max_deg = degs.iter().cloned().fold(0.0f64, f64::max);
    let shift = 2.0 * max_deg + 1.0;

    // lambda_max(L): top of L restricted to the ones-complement (0 sits at
    // the bottom, so the restriction changes nothing).
    let (rho_top, res_top) = power_top(n, rng, |v, out| lap_mul(&adj, &degs, v, out));
    // lambda_2(L) = shift - top of (shift I - L) on the ones-complement.
    let (rho_shifted, res_low) = power_top(n, rng, |v, out| {
        lap_mul(&adj, &degs, v, out);
        for i in 0..v.len() {
            out[i] = shift * v[i] - out[i];
        }
    });
    let lambda_max = rho_top + res_top;
    let lambda_2 = (shift - rho_shifted - res_low).max(0.0);

    let quarter = n as f64 / 4.0;
    let loopless = (g.m_total() - g.loop_total()) as f64;
    let lower = quarter * lambda_2;
    let upper = (quarter * lambda_max).min(loopless);
    let value = match objective {
        Objective::Min => lower,
        Objective::Max => upper,
    };
    Ok(CutResult {
        value,
        config: None,
        objective,
        constraint,
        solver: SolverKind::Spectral,
        certificate: Some((lower, upper)),
    })
}

/// y = L v for the loop-free Laplacian.
fn lap_mul(adj: &[Vec<(u32, u32)>], degs: &[f64], v: &[f64], out: &mut [f64]) {
    for i in 0..v.len() {
        let mut acc = degs[i] * v[i];
        for &(j, m) in &adj[i] {
            acc -= m as f64 * v[j as usize];
        }
        out[i] = acc;
    }
}

/// Rayleigh quotient and final residual norm of power iteration on a
/// symmetric operator restricted to the complement of the all-ones vector.
fn power_top(n: usize, rng: &mut Stream, mut mul: impl FnMut(&[f64], &mut [f64])) -> (f64, f64) {
    let mut v: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    deflate_and_normalize(&mut v);
    let mut w = vec![0.0; n];
    let mut rho = 0.0;
    let mut res = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        mul(&v, &mut w);
        project_out_ones(&mut w);
        rho = dot(&v, &w);
        res = residual_norm(&w, &v, rho);
        if res <= RESIDUAL_TOL * rho.abs().max(1.0) {
            break;
        }
        let norm = libm::sqrt(dot(&w, &w));
        if norm == 0.0 {
            // v is in the kernel of the restricted operator: rho = 0 exactly.
            return (0.0, 0.0);
        }
        for i in 0..n {
            v[i] = w[i] / norm;
        }
    }
    (rho, res)
}

fn deflate_and_normalize(v: &mut [f64]) {
    project_out_ones(v);
    let norm = libm::sqrt(dot(v, v));
    if norm == 0.0 {
        // Pathological start; any ones-orthogonal direction works.
        if v.len() >= 2 {
            v[0] = core::f64::consts::FRAC_1_SQRT_2;
            v[1] = -core::f64::consts::FRAC_1_SQRT_2;
        }
        return;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
}

fn project_out_ones(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for x in v.iter_mut() {
        *x -= mean;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn residual_norm(w: &[f64], v: &[f64], rho: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..v.len() {
        let d = w[i] - rho * v[i];
        acc += d * d;
    }
    libm::sqrt(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::exact_extremal;
    use crate::graphs::{gen_er_gnm, MultiGraph};

    fn bounds(g: &MultiGraph, seed: u64) -> (f64, f64) {
        let mut s = Stream::from_seed(seed);
        let r = spectral_bounds(g, Objective::Min, Constraint::Bisection, &mut s).unwrap();
        r.certificate.unwrap()
    }

    #[test]
    fn four_cycle_bounds_are_tight() {
        // L(C4) has eigenvalues 0, 2, 2, 4: both bounds are exact.
        let mut c4 = MultiGraph::new(4);
        for i in 0..4u32 {
            c4.add_edge(i, (i + 1) % 4);
        }
        let (lo, hi) = bounds(&c4, 1);
        assert!((lo - 2.0).abs() < 1e-8, "lo={lo}");
        assert!((hi - 4.0).abs() < 1e-8, "hi={hi}");
    }

    #[test]
    fn complete_graph_bounds_are_tight() {
        // L(K4) = 4I - J: lambda_2 = lambda_max = 4, every bisection cuts 4.
        let mut k4 = MultiGraph::new(4);
        for u in 0..4u32 {
            for v in (u + 1)..4 {
                k4.add_edge(u, v);
            }
        }
        let (lo, hi) = bounds(&k4, 2);
        assert!((lo - 4.0).abs() < 1e-8);
        assert!((hi - 4.0).abs() < 1e-8);
    }

    #[test]
    fn disconnected_graph_has_zero_lower_bound() {
        // Two disjoint triangles: lambda_2 = 0 and the free split is balanced.
        let mut g = MultiGraph::new(6);
        for (u, v) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            g.add_edge(u, v);
        }
        let (lo, hi) = bounds(&g, 3);
        assert!(lo.abs() < 1e-8);
        assert!(hi >= 4.0 - 1e-8); // exact max bisection is 4
    }

    #[test]
    fn sandwich_holds_against_exact_on_random_graphs() {
        for seed in 0..50 {
            let mut s = Stream::from_seed(seed);
            let g = gen_er_gnm(10, 20 + (seed % 11), &mut s);
            let (lo, hi) = bounds(&g, 900 + seed);
            let mcut = exact_extremal(&g, Objective::Min, Constraint::Bisection).unwrap().value;
            let maxcut = exact_extremal(&g, Objective::Max, Constraint::Bisection).unwrap().value;
            assert!(lo <= mcut + 1e-9, "seed={seed}: lo={lo} mcut={mcut}");
            assert!(hi >= maxcut - 1e-9, "seed={seed}: hi={hi} MCUT={maxcut}");
            assert!(lo >= -1e-12 && hi <= g.m_total() as f64 + 1e-9);
        }
    }

    #[test]
    fn loops_do_not_disturb_the_bounds() {
        let mut c4 = MultiGraph::new(4);
        for i in 0..4u32 {
            c4.add_edge(i, (i + 1) % 4);
        }
        c4.add_edge_mult(0, 0, 7);
        let (lo, hi) = bounds(&c4, 4);
        assert!((lo - 2.0).abs() < 1e-8);
        assert!((hi - 4.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_free_constraint_and_odd_n() {
        let g = MultiGraph::new(4);
        let mut s = Stream::from_seed(0);
        assert!(matches!(
            spectral_bounds(&g, Objective::Min, Constraint::Free, &mut s),
            Err(CutError::NeedsBisection)
        ));
        let g = MultiGraph::new(5);
        assert!(matches!(
            spectral_bounds(&g, Objective::Min, Constraint::Bisection, &mut s),
            Err(CutError::OddVertexCount)
        ));
    }
}
