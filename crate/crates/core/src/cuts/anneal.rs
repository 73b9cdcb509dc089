//! Simulated annealing for extremal cuts at sizes enumeration cannot reach.
//!
//! Free cuts move by single spin flips, bisections by (+,-) pair swaps so
//! the balance constraint is preserved exactly. Temperatures are scaled by
//! the edge density, cool geometrically, and the best configuration ever
//! visited (including the random starts) is returned.

use super::{cut_size, flip_delta, Constraint, CutError, CutResult, Objective, SolverKind, SpinConfig};
use crate::graphs::MultiGraph;
use crate::rng::Stream;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug)]
pub struct AnnealOpts {
    /// Independent restarts from fresh random configurations.
    pub restarts: usize,
    /// Proposed moves per temperature level, per vertex.
    pub moves_per_vertex: usize,
    /// Geometric cooling factor in (0, 1).
    pub cooling: f64,
    /// Start and end temperatures in units of the edge density.
    pub t_start: f64,
    pub t_end: f64,
}

impl Default for AnnealOpts {
    fn default() -> Self {
        AnnealOpts { restarts: 8, moves_per_vertex: 100, cooling: 0.95, t_start: 2.0, t_end: 0.01 }
    }
}

pub fn local_search(
    g: &MultiGraph,
    objective: Objective,
    constraint: Constraint,
    opts: &AnnealOpts,
    rng: &mut Stream,
) -> Result<CutResult, CutError> {
    let n = g.n();
    if n == 0 {
        return Err(CutError::EmptyGraph);
    }
    if constraint == Constraint::Bisection && n % 2 != 0 {
        return Err(CutError::OddVertexCount);
    }
    assert!(opts.cooling > 0.0 && opts.cooling < 1.0, "cooling must lie in (0, 1)");
    assert!(opts.t_start > opts.t_end && opts.t_end > 0.0);

    let adj = g.adjacency();
    // Temperature unit: edges per vertex, floored so empty graphs still run.
    let scale = if g.gamma_hat() > 0.5 { g.gamma_hat() } else { 0.5 };
    // Minimization sign: Max flips the objective.
    let sgn = match objective {
        Objective::Min => 1i64,
        Objective::Max => -1,
    };

    let mut best: Option<(i64, Vec<i8>)> = None;
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
        let mut cut = cut_size(g, &SpinConfig::new(spins.clone()).unwrap()) as i64;
        update_best(&mut best, cut, &spins, sgn);

        let mut t = opts.t_start * scale;
        let t_floor = opts.t_end * scale;
        while t > t_floor {
            for _ in 0..opts.moves_per_vertex * n {
                let delta = match constraint {
                    Constraint::Free => {
                        let v = rs.below(n as u64) as usize;
                        let d = flip_delta(&adj, &spins, v);
                        if accept(sgn * d, t, &mut rs) {
                            spins[v] = -spins[v];
                            d
                        } else {
                            continue;
                        }
                    }
                    Constraint::Bisection => {
                        let u = pick_side(&spins, 1, &mut rs);
                        let v = pick_side(&spins, -1, &mut rs);
                        // Swap u and v across the partition: two flips, with
                        // the shared edge counted once at its new sign.
                        let w_uv = g.multiplicity(u as u32, v as u32) as i64;
                        let d = flip_delta(&adj, &spins, u) + flip_delta(&adj, &spins, v)
                            - 2 * w_uv * (spins[u] * spins[v]) as i64;
                        if accept(sgn * d, t, &mut rs) {
                            spins[u] = -spins[u];
                            spins[v] = -spins[v];
                            d
                        } else {
                            continue;
                        }
                    }
                };
                cut += delta;
                update_best(&mut best, cut, &spins, sgn);
            }
            t *= opts.cooling;
        }
    }

    let (value, spins) = best.expect("at least one restart ran");
    Ok(CutResult {
        value: value as f64,
        config: Some(SpinConfig::new(spins).expect("moves keep spins valid")),
        objective,
        constraint,
        solver: SolverKind::Local,
        certificate: None,
    })
}

fn accept(delta: i64, t: f64, rs: &mut Stream) -> bool {
    delta <= 0 || rs.next_f64() < libm::exp(-(delta as f64) / t)
}

fn update_best(best: &mut Option<(i64, Vec<i8>)>, cut: i64, spins: &[i8], sgn: i64) {
    let better = match best {
        None => true,
        Some((b, _)) => sgn * cut < sgn * *b,
    };
    if better {
        *best = Some((cut, spins.to_vec()));
    }
}

/// Uniform vertex with the given spin; rejection sampling, which on a
/// balanced configuration succeeds in two tries on average.
fn pick_side(spins: &[i8], side: i8, rs: &mut Stream) -> usize {
    loop {
        let v = rs.below(spins.len() as u64) as usize;
        if spins[v] == side {
            return v;
        }
    }
}
