//! Sparse random multigraph ensembles.
//!
//! Graphs are undirected multisets of edges on vertices 0..n-1; self-loops
//! are allowed and multiplicities are explicit. Degrees follow the
//! half-edge convention (a loop adds 2). All generators take a `Stream` and
//! are deterministic given it.

mod surgery;

pub use surgery::{
    color_and_decompose, cond_mean_cut_blue, cond_mean_cut_rewired, poisson_mean_excess,
    rewire, surgery_expectations, two_stage_pairing, ColoredGraph, SurgeryExpectations,
    SurgeryResult,
};

use crate::rng::Stream;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    OddDegreeSum,
    BadProbability { p: f64 },
    OddVertexCount,
    GammaTooSmall { gamma: u32 },
    TooFewVertices,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::OddDegreeSum => write!(f, "degree sum must be even"),
            GraphError::BadProbability { p } => write!(f, "edge probability {p} outside [0, 1]"),
            GraphError::OddVertexCount => write!(f, "vertex count must be even"),
            GraphError::GammaTooSmall { gamma } => {
                write!(f, "gamma = {gamma} too small: gamma - sqrt(gamma) log gamma must be positive")
            }
            GraphError::TooFewVertices => write!(f, "need at least 2 vertices"),
        }
    }
}

/// Undirected multigraph stored as a sorted edge multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: BTreeMap<(u32, u32), u32>, // key normalized u <= v, value >= 1
    m_total: u64,
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph { n, edges: BTreeMap::new(), m_total: 0 }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut g = MultiGraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: u32, v: u32) {
        self.add_edge_mult(u, v, 1);
    }

    pub fn add_edge_mult(&mut self, u: u32, v: u32, mult: u32) {
        assert!((u as usize) < self.n && (v as usize) < self.n, "vertex out of range");
        if mult == 0 {
            return;
        }
        let key = if u <= v { (u, v) } else { (v, u) };
        *self.edges.entry(key).or_insert(0) += mult;
        self.m_total += mult as u64;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total edge count with multiplicity, loops included.
    pub fn m_total(&self) -> u64 {
        self.m_total
    }

    pub fn multiplicity(&self, u: u32, v: u32) -> u32 {
        let key = if u <= v { (u, v) } else { (v, u) };
        *self.edges.get(&key).unwrap_or(&0)
    }

    /// Distinct edges as (u, v, multiplicity), u <= v, sorted.
    pub fn distinct_edges(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        self.edges.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    pub fn distinct_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loop_total(&self) -> u64 {
        self.edges.iter().filter(|(&(u, v), _)| u == v).map(|(_, &m)| m as u64).sum()
    }

    /// Half-edge degrees: a loop contributes 2 to its endpoint.
    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n];
        for (&(u, v), &m) in &self.edges {
            if u == v {
                deg[u as usize] += 2 * m as u64;
            } else {
                deg[u as usize] += m as u64;
                deg[v as usize] += m as u64;
            }
        }
        deg
    }

    /// Edge union (multiplicities add). Panics if vertex counts differ.
    pub fn union(&self, other: &MultiGraph) -> MultiGraph {
        assert_eq!(self.n, other.n);
        let mut g = self.clone();
        for (u, v, m) in other.distinct_edges() {
            g.add_edge_mult(u, v, m);
        }
        g
    }

    /// Adjacency lists (neighbor, multiplicity), loops excluded; the form the
    /// cut and energy updates want.
    pub fn adjacency(&self) -> Vec<Vec<(u32, u32)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (&(u, v), &m) in &self.edges {
            if u != v {
                adj[u as usize].push((v, m));
                adj[v as usize].push((u, m));
            }
        }
        adj
    }

    /// Average edge density |E|/n.
    pub fn gamma_hat(&self) -> f64 {
        self.m_total as f64 / self.n as f64
    }
}

/// G(n, m): m edges, each an independent uniform ordered pair of endpoints.
pub fn gen_er_gnm(n: usize, m: u64, rng: &mut Stream) -> MultiGraph {
    let mut g = MultiGraph::new(n);
    for _ in 0..m {
        let u = rng.below(n as u64) as u32;
        let v = rng.below(n as u64) as u32;
        g.add_edge(u, v);
    }
    g
}

/// Poissonized density gamma: edge count N ~ Poisson(gamma n), then as G(n, N).
/// Equivalent to independent Poisson multiplicities per vertex pair.
pub fn gen_poissonized(n: usize, gamma: f64, rng: &mut Stream) -> MultiGraph {
    let m = rng.poisson(gamma * n as f64);
    gen_er_gnm(n, m, rng)
}

/// Configuration model: uniform perfect matching of labelled half-edges.
pub fn gen_config(degrees: &[u64], rng: &mut Stream) -> Result<MultiGraph, GraphError> {
    let total: u64 = degrees.iter().sum();
    if total % 2 != 0 {
        return Err(GraphError::OddDegreeSum);
    }
    let mut stubs: Vec<u32> = Vec::with_capacity(total as usize);
    for (v, &d) in degrees.iter().enumerate() {
        for _ in 0..d {
            stubs.push(v as u32);
        }
    }
    rng.shuffle(&mut stubs);
    let mut g = MultiGraph::new(degrees.len());
    for pair in stubs.chunks_exact(2) {
        g.add_edge(pair[0], pair[1]);
    }
    Ok(g)
}

/// Random gamma-regular multigraph on n vertices (n * gamma must be even).
pub fn gen_regular(n: usize, gamma: u32, rng: &mut Stream) -> Result<MultiGraph, GraphError> {
    let degrees = vec![gamma as u64; n];
    gen_config(&degrees, rng)
}

/// Poisson cloning: degrees zeta_i iid Poisson((n-1) lambda / n), one uniform
/// half-edge discarded if the total is odd, then a uniform matching.
pub fn gen_poisson_cloning(n: usize, lambda: f64, rng: &mut Stream) -> Result<MultiGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewVertices);
    }
    let mean = (n as f64 - 1.0) * lambda / n as f64;
    let mut degrees: Vec<u64> = (0..n).map(|_| rng.poisson(mean)).collect();
    let total: u64 = degrees.iter().sum();
    if total % 2 == 1 {
        // Discard one half-edge chosen uniformly among all of them.
        let mut pick = rng.below(total);
        for d in degrees.iter_mut() {
            if pick < *d {
                *d -= 1;
                break;
            }
            pick -= *d;
        }
    }
    gen_config(&degrees, rng)
}

/// Planted-partition instance: the balanced assignment plus the simple graph
/// with within-class probability a/n and across-class probability b/n.
#[derive(Clone, Debug)]
pub struct SbmInstance {
    pub graph: MultiGraph,
    pub planted: Vec<i8>,
    pub a: f64,
    pub b: f64,
}

pub fn gen_sbm(n: usize, a: f64, b: f64, rng: &mut Stream) -> Result<SbmInstance, GraphError> {
    if n % 2 != 0 {
        return Err(GraphError::OddVertexCount);
    }
    for &p in &[a / n as f64, b / n as f64] {
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::BadProbability { p });
        }
    }
    let mut planted = vec![1i8; n];
    for s in planted.iter_mut().skip(n / 2) {
        *s = -1;
    }
    rng.shuffle(&mut planted);
    let mut g = MultiGraph::new(n);
    let (pa, pb) = (a / n as f64, b / n as f64);
    for u in 0..n {
        for v in u + 1..n {
            let p = if planted[u] == planted[v] { pa } else { pb };
            if rng.bernoulli(p) {
                g.add_edge(u as u32, v as u32);
            }
        }
    }
    Ok(SbmInstance { graph: g, planted, a, b })
}

/// Graph Laplacian L = D - A as a dense row-major matrix; self-loops cancel
/// between D and A and are skipped.
pub fn laplacian(g: &MultiGraph) -> Vec<f64> {
    let n = g.n();
    let mut l = vec![0.0; n * n];
    for (u, v, m) in g.distinct_edges() {
        if u == v {
            continue;
        }
        let (u, v, w) = (u as usize, v as usize, m as f64);
        l[u * n + u] += w;
        l[v * n + v] += w;
        l[u * n + v] -= w;
        l[v * n + u] -= w;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn edge_bookkeeping_normalizes_and_counts() {
        let mut g = MultiGraph::new(4);
        g.add_edge(2, 1);
        g.add_edge(1, 2);
        g.add_edge(3, 3);
        assert_eq!(g.multiplicity(1, 2), 2);
        assert_eq!(g.multiplicity(2, 1), 2);
        assert_eq!(g.m_total(), 3);
        assert_eq!(g.loop_total(), 1);
        assert_eq!(g.degrees(), vec![0, 2, 2, 2]);
        assert_eq!(g.distinct_edge_count(), 2);
    }

    #[test]
    fn er_gnm_has_exact_edge_count_and_half_loop_rate_on_two_vertices() {
        // n = 2: each edge is a loop with probability 1/2.
        let mut loops = 0u64;
        let draws = 10_000;
        for seed in 0..draws {
            let mut s = Stream::from_seed(seed);
            let g = gen_er_gnm(2, 1, &mut s);
            assert_eq!(g.m_total(), 1);
            loops += g.loop_total();
        }
        let expect = draws as f64 / 2.0;
        let chi2 = (loops as f64 - expect).powi(2) / expect
            + ((draws - loops) as f64 - expect).powi(2) / expect;
        let p = 1.0 - ChiSquared::new(1.0).unwrap().cdf(chi2);
        assert!(p > 0.001, "chi2={chi2}");
    }

    #[test]
    fn poissonized_loop_multiplicity_is_poisson_gamma_over_n() {
        // Multiplicity of the loop at vertex 0 in P_n(gamma) is Poisson(gamma/n).
        let (n, gamma) = (8usize, 4.0);
        let draws = 20_000;
        let mut mean = 0.0;
        let mut var = 0.0;
        let lam = gamma / n as f64;
        for seed in 0..draws {
            let mut s = Stream::from_seed(100_000 + seed);
            let g = gen_poissonized(n, gamma, &mut s);
            let m = g.multiplicity(0, 0) as f64;
            mean += m;
            var += (m - lam) * (m - lam);
        }
        mean /= draws as f64;
        var /= draws as f64;
        let se = (lam / draws as f64).sqrt();
        assert!((mean - lam).abs() < 4.0 * se, "mean {mean} vs {lam}");
        let se_var = ((lam + 2.0 * lam * lam) / draws as f64).sqrt();
        assert!((var - lam).abs() < 4.5 * se_var, "var {var} vs {lam}");
    }

    #[test]
    fn config_model_respects_degrees_and_rejects_odd_total() {
        let mut s = Stream::from_seed(5);
        let degs = [3u64, 1, 2, 4, 0, 2];
        let g = gen_config(&degs, &mut s).unwrap();
        assert_eq!(g.degrees(), degs.to_vec());
        assert_eq!(gen_config(&[1, 2], &mut s).unwrap_err(), GraphError::OddDegreeSum);
    }

    #[test]
    fn config_model_matching_is_uniform() {
        // n = 4, all degrees 2: compare sampled multigraph frequencies with the
        // exact law induced by enumerating all 7!! = 105 matchings of the
        // 8 half-edges (oracle is independent exhaustive enumeration).
        let stubs: Vec<u32> = vec![0, 0, 1, 1, 2, 2, 3, 3];
        let mut law: std::collections::HashMap<Vec<(u32, u32)>, f64> =
            std::collections::HashMap::new();
        enumerate_matchings(&stubs, &mut Vec::new(), &mut law);
        let total: f64 = law.values().sum();
        assert_eq!(total as u64, 105);

        let draws = 100_000usize;
        let mut counts: std::collections::HashMap<Vec<(u32, u32)>, u64> =
            std::collections::HashMap::new();
        for seed in 0..draws {
            let mut s = Stream::from_seed(7_000_000 + seed as u64);
            let g = gen_regular(4, 2, &mut s).unwrap();
            let mut key = Vec::new();
            for (u, v, m) in g.distinct_edges() {
                for _ in 0..m {
                    key.push((u, v));
                }
            }
            *counts.entry(key).or_insert(0) += 1;
        }
        let mut chi2 = 0.0;
        let mut cells = 0usize;
        for (key, &w) in &law {
            let expect = w / total * draws as f64;
            let got = *counts.get(key).unwrap_or(&0) as f64;
            chi2 += (got - expect) * (got - expect) / expect;
            cells += 1;
        }
        let dof = (cells - 1) as f64;
        let p = 1.0 - ChiSquared::new(dof).unwrap().cdf(chi2);
        assert!(p > 0.001, "chi2={chi2} dof={dof}");
    }

    fn enumerate_matchings(
        stubs: &[u32],
        acc: &mut Vec<(u32, u32)>,
        law: &mut std::collections::HashMap<Vec<(u32, u32)>, f64>,
    ) {
        if stubs.is_empty() {
            let mut key = acc.clone();
            key.sort_unstable();
            *law.entry(key).or_insert(0.0) += 1.0;
            return;
        }
        let first = stubs[0];
        for j in 1..stubs.len() {
            let mut rest: Vec<u32> = Vec::with_capacity(stubs.len() - 2);
            rest.extend_from_slice(&stubs[1..j]);
            rest.extend_from_slice(&stubs[j + 1..]);
            let (a, b) = if first <= stubs[j] { (first, stubs[j]) } else { (stubs[j], first) };
            acc.push((a, b));
            enumerate_matchings(&rest, acc, law);
            acc.pop();
        }
    }

    #[test]
    fn cloning_degrees_have_target_mean_and_even_total() {
        let (n, lambda) = (50usize, 3.0);
        let draws = 2_000;
        let mut acc = 0.0;
        for seed in 0..draws {
            let mut s = Stream::from_seed(31_000 + seed);
            let g = gen_poisson_cloning(n, lambda, &mut s).unwrap();
            let degs = g.degrees();
            assert_eq!(degs.iter().sum::<u64>() % 2, 0);
            acc += degs.iter().sum::<u64>() as f64 / n as f64;
        }
        let mean = acc / draws as f64;
        let target = (n as f64 - 1.0) * lambda / n as f64;
        // Parity discards remove at most 1/n per vertex on average.
        let se = (target / (n * draws as usize) as f64).sqrt();
        assert!((mean - target).abs() < 4.0 * se + 1.0 / n as f64, "{mean} vs {target}");
    }

    #[test]
    fn sbm_is_balanced_simple_and_matches_flat_er_when_a_equals_b() {
        let mut s = Stream::from_seed(77);
        let inst = gen_sbm(40, 12.0, 4.0, &mut s).unwrap();
        assert_eq!(inst.planted.iter().map(|&x| x as i64).sum::<i64>(), 0);
        assert_eq!(inst.graph.loop_total(), 0);
        for (_, _, m) in inst.graph.distinct_edges() {
            assert_eq!(m, 1);
        }
        assert_eq!(gen_sbm(5, 1.0, 1.0, &mut s).unwrap_err(), GraphError::OddVertexCount);
        assert!(matches!(
            gen_sbm(4, 9.0, 1.0, &mut s).unwrap_err(),
            GraphError::BadProbability { .. }
        ));

        // a == b: edge count distribution must match Binomial(C(n,2), a/n).
        // Two-sample z-test on means against direct Bernoulli sampling.
        let n = 30usize;
        let a = 6.0;
        let draws = 4_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        let (mut q1, mut q2) = (0.0, 0.0);
        for seed in 0..draws {
            let mut sa = Stream::from_seed(500_000 + seed);
            let e1 = gen_sbm(n, a, a, &mut sa).unwrap().graph.m_total() as f64;
            let mut sb = Stream::from_seed(900_000 + seed);
            let mut e2 = 0.0;
            for _ in 0..n * (n - 1) / 2 {
                if sb.bernoulli(a / n as f64) {
                    e2 += 1.0;
                }
            }
            s1 += e1;
            s2 += e2;
            q1 += e1 * e1;
            q2 += e2 * e2;
        }
        let d = draws as f64;
        let (m1, m2) = (s1 / d, s2 / d);
        let v1 = q1 / d - m1 * m1;
        let v2 = q2 / d - m2 * m2;
        let z = (m1 - m2) / ((v1 + v2) / d).sqrt();
        assert!(z.abs() < 4.0, "z={z}");
    }

    #[test]
    fn laplacian_of_c4_and_loop_cancellation() {
        let mut g = MultiGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        g.add_edge(2, 2); // must not change L
        let l = laplacian(&g);
        let expect = [
            2.0, -1.0, 0.0, -1.0, //
            -1.0, 2.0, -1.0, 0.0, //
            0.0, -1.0, 2.0, -1.0, //
            -1.0, 0.0, -1.0, 2.0,
        ];
        assert_eq!(l, expect.to_vec());
        // Row sums vanish.
        for i in 0..4 {
            let s: f64 = (0..4).map(|j| l[i * 4 + j]).sum();
            assert_eq!(s, 0.0);
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let mk = |seed| {
            let mut s = Stream::from_seed(seed);
            gen_poissonized(12, 3.0, &mut s)
        };
        assert_eq!(mk(9), mk(9));
        assert_ne!(mk(9), mk(10));
    }
}
