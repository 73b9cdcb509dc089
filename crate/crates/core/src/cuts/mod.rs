//! Cut counting and extremal-cut solvers on multigraphs.
//!
//! A cut is counted with multiplicity over edges whose endpoints carry
//! opposite spins; self-loops never cross. Three solver families cover the
//! needs of the experiments: exhaustive enumeration with Gray-code updates
//! (small n, exact), simulated annealing (large n, heuristic), and spectral
//! eigenvalue bounds (bisection only, certified sandwich).

mod anneal;
mod exact;
mod spectral;

pub use anneal::{local_search, AnnealOpts};
pub use exact::exact_extremal;
pub use spectral::spectral_bounds;

pub(crate) use exact::revolving_door;

use crate::graphs::MultiGraph;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutError {
    BadSpinValue,
    EmptyConfig,
    LengthMismatch { spins: usize, vertices: usize },
    OddVertexCount,
    TooLarge { n: usize, max: usize },
    NeedsBisection,
    EmptyGraph,
}

impl fmt::Display for CutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutError::BadSpinValue => write!(f, "spins must be +1 or -1"),
            CutError::EmptyConfig => write!(f, "spin configuration is empty"),
            CutError::LengthMismatch { spins, vertices } => {
                write!(f, "{spins} spins for {vertices} vertices")
            }
            CutError::OddVertexCount => write!(f, "bisection needs an even vertex count"),
            CutError::TooLarge { n, max } => {
                write!(f, "exact enumeration limited to {max} vertices, got {n}")
            }
            CutError::NeedsBisection => {
                write!(f, "spectral bounds are only defined under the bisection constraint")
            }
            CutError::EmptyGraph => write!(f, "graph has no vertices"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    Free,
    Bisection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Exact,
    Local,
    Spectral,
}

/// Spin assignment, one of +1/-1 per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinConfig {
    spins: Vec<i8>,
}

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self, CutError> {
        if spins.is_empty() {
            return Err(CutError::EmptyConfig);
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(CutError::BadSpinValue);
        }
        Ok(SpinConfig { spins })
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    /// Sum of spins.
    pub fn magnetization(&self) -> i64 {
        self.spins.iter().map(|&s| s as i64).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.magnetization() == 0
    }
}

/// Sum of mult * sigma_u * sigma_v over all edges; loops contribute +mult.
pub fn edge_spin_sum(g: &MultiGraph, sc: &SpinConfig) -> i64 {
    assert_eq!(sc.n(), g.n(), "spin count must match vertex count");
    let s = sc.spins();
    let mut acc = 0i64;
    for (u, v, mult) in g.distinct_edges() {
        acc += mult as i64 * (s[u as usize] * s[v as usize]) as i64;
    }
    acc
}

/// Edges crossing the spin partition, counted with multiplicity.
pub fn cut_size(g: &MultiGraph, sc: &SpinConfig) -> u64 {
    let diff = g.m_total() as i64 - edge_spin_sum(g, sc);
    debug_assert!(diff >= 0 && diff % 2 == 0);
    (diff / 2) as u64
}

/// Nearest balanced configuration: flips the lowest-indexed majority spins
/// until the magnetization vanishes. Requires even length.
pub fn balance_map(sc: &SpinConfig) -> Result<SpinConfig, CutError> {
    if sc.n() % 2 != 0 {
        return Err(CutError::OddVertexCount);
    }
    let m = sc.magnetization();
    let mut spins = sc.spins().to_vec();
    let (target, mut left) = if m > 0 { (1i8, m / 2) } else { (-1i8, -m / 2) };
    for s in spins.iter_mut() {
        if left == 0 {
            break;
        }
        if *s == target {
            *s = -target;
            left -= 1;
        }
    }
    SpinConfig::new(spins)
}

/// Output of any cut solver. `value` is the cut size (exact solvers return
/// an integer-valued float); spectral bounds carry no configuration and set
/// `certificate = (lower, upper)` for the (min, max) bisection pair.
#[derive(Clone, Debug)]
pub struct CutResult {
    pub value: f64,
    pub config: Option<SpinConfig>,
    pub objective: Objective,
    pub constraint: Constraint,
    pub solver: SolverKind,
    pub certificate: Option<(f64, f64)>,
}

/// Change in cut size when vertex v is flipped: sigma_v * sum_u W_uv sigma_u,
/// with adjacency in the loop-free (neighbor, mult) form of
/// `MultiGraph::adjacency`.
pub(crate) fn flip_delta(adj: &[Vec<(u32, u32)>], spins: &[i8], v: usize) -> i64 {
    let h: i64 = adj[v]
        .iter()
        .map(|&(u, mult)| mult as i64 * spins[u as usize] as i64)
        .sum();
    spins[v] as i64 * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::MultiGraph;
    use crate::rng::Stream;

    fn cycle(n: u32) -> MultiGraph {
        let mut g = MultiGraph::new(n as usize);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    #[test]
    fn spin_config_validation() {
        assert_eq!(SpinConfig::new(alloc::vec![]), Err(CutError::EmptyConfig));
        assert_eq!(SpinConfig::new(alloc::vec![1, 0]), Err(CutError::BadSpinValue));
        let sc = SpinConfig::new(alloc::vec![1, -1, 1]).unwrap();
        assert_eq!(sc.magnetization(), 1);
        assert!(!sc.is_balanced());
    }

    #[test]
    fn cut_counts_crossings_with_multiplicity() {
        let mut g = MultiGraph::new(3);
        g.add_edge_mult(0, 1, 3);
        g.add_edge(1, 2);
        g.add_edge_mult(2, 2, 5); // loop never crosses
        let sc = SpinConfig::new(alloc::vec![1, -1, -1]).unwrap();
        assert_eq!(cut_size(&g, &sc), 3);
        let sc = SpinConfig::new(alloc::vec![1, -1, 1]).unwrap();
        assert_eq!(cut_size(&g, &sc), 4);
        let sc = SpinConfig::new(alloc::vec![1, 1, 1]).unwrap();
        assert_eq!(cut_size(&g, &sc), 0);
    }

    #[test]
    fn edge_spin_sum_identity() {
        // m_total - 2 cut = edge spin sum, on random multigraphs and spins.
        for seed in 0..50 {
            let mut s = Stream::from_seed(seed);
            let g = crate::graphs::gen_er_gnm(10, 25, &mut s);
            let spins: Vec<i8> = (0..10).map(|_| if s.bernoulli(0.5) { 1 } else { -1 }).collect();
            let sc = SpinConfig::new(spins).unwrap();
            assert_eq!(
                g.m_total() as i64 - 2 * cut_size(&g, &sc) as i64,
                edge_spin_sum(&g, &sc)
            );
        }
    }

    #[test]
    fn balance_map_balances_and_fixes_minority() {
        let sc = SpinConfig::new(alloc::vec![1, 1, 1, 1, -1, -1]).unwrap();
        let b = balance_map(&sc).unwrap();
        assert!(b.is_balanced());
        assert_eq!(b.spins(), &[-1, 1, 1, 1, -1, -1]);
        // Already balanced: identity.
        let sc = SpinConfig::new(alloc::vec![1, -1, -1, 1]).unwrap();
        assert_eq!(balance_map(&sc).unwrap(), sc);
        // Negative majority flips -1 spins instead.
        let sc = SpinConfig::new(alloc::vec![-1, -1, -1, 1]).unwrap();
        let b = balance_map(&sc).unwrap();
        assert!(b.is_balanced());
        assert_eq!(b.spins(), &[1, -1, -1, 1]);
        let odd = SpinConfig::new(alloc::vec![1, 1, -1]).unwrap();
        assert_eq!(balance_map(&odd), Err(CutError::OddVertexCount));
    }

    #[test]
    fn flip_delta_matches_recount() {
        for seed in 0..30 {
            let mut s = Stream::from_seed(100 + seed);
            let g = crate::graphs::gen_er_gnm(8, 20, &mut s);
            let adj = g.adjacency();
            let mut spins: Vec<i8> =
                (0..8).map(|_| if s.bernoulli(0.5) { 1 } else { -1 }).collect();
            for v in 0..8 {
                let before = cut_size(&g, &SpinConfig::new(spins.clone()).unwrap()) as i64;
                let d = flip_delta(&adj, &spins, v);
                spins[v] = -spins[v];
                let after = cut_size(&g, &SpinConfig::new(spins.clone()).unwrap()) as i64;
                assert_eq!(after - before, d);
            }
        }
    }

    #[test]
    fn cycle_cut_values() {
        let g = cycle(4);
        let sc = SpinConfig::new(alloc::vec![1, -1, 1, -1]).unwrap();
        assert_eq!(cut_size(&g, &sc), 4);
        let sc = SpinConfig::new(alloc::vec![1, 1, -1, -1]).unwrap();
        assert_eq!(cut_size(&g, &sc), 2);
    }
}
