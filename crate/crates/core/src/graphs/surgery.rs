//! Half-edge coloring and rewiring on random regular multigraphs.
//!
//! Each vertex of a gamma-regular graph gets Z_i = (gamma - X_i)+ BLUE
//! half-edges, X_i iid Poisson(lambda) with lambda = gamma - sqrt(gamma) log(gamma);
//! the rest stay RED. A uniform matching of all half-edges builds the base
//! graph, split into RR / RB / BB parts by endpoint colors. Rewiring deletes
//! the blue-touching edges and re-matches the freed red half-edges uniformly,
//! leaving a graph whose red part is intact. Cut counts obey, configuration
//! by configuration,
//!
//!   cut_G1 = cut_G2 - cut_rewired + cut_(RB u BB)
//!
//! and the expected sizes of the pieces have exact finite-n formulas.

use super::{GraphError, MultiGraph};
use crate::rng::Stream;
use alloc::vec::Vec;

/// gamma - sqrt(gamma) log gamma; positive for every integer gamma >= 2.
pub fn gamma_minus(gamma: u32) -> f64 {
    let g = gamma as f64;
    g - libm::sqrt(g) * libm::log(g)
}

#[derive(Clone, Debug)]
pub struct ColoredGraph {
    pub gamma: u32,
    pub gamma_minus: f64,
    /// Z_i: blue half-edges at each vertex.
    pub blue_counts: Vec<u32>,
    /// The full gamma-regular multigraph G1.
    pub graph: MultiGraph,
    pub rr: MultiGraph,
    pub rb: MultiGraph,
    pub bb: MultiGraph,
    /// For each RB edge, the vertex holding its red half-edge.
    pub rb_red_ends: Vec<u32>,
}

pub fn color_and_decompose(n: usize, gamma: u32, rng: &mut Stream) -> Result<ColoredGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewVertices);
    }
    let lambda = gamma_minus(gamma);
    if !(lambda > 0.0) {
        return Err(GraphError::GammaTooSmall { gamma });
    }
    if (n as u64 * gamma as u64) % 2 != 0 {
        return Err(GraphError::OddDegreeSum);
    }
    let blue_counts: Vec<u32> = (0..n)
        .map(|_| {
            let x = rng.poisson(lambda);
            if x >= gamma as u64 {
                0
            } else {
                gamma - x as u32
            }
        })
        .collect();

    // Half-edge (v, slot): the first Z_v slots are blue. Which slots are
    // colored is immaterial because the matching is uniform.
    let total = n * gamma as usize;
    let mut stubs: Vec<u32> = Vec::with_capacity(total);
    for v in 0..n as u32 {
        for slot in 0..gamma {
            stubs.push(v * gamma + slot);
        }
    }
    rng.shuffle(&mut stubs);

    let mut graph = MultiGraph::new(n);
    let mut rr = MultiGraph::new(n);
    let mut rb = MultiGraph::new(n);
    let mut bb = MultiGraph::new(n);
    let mut rb_red_ends = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, su) = (pair[0] / gamma, pair[0] % gamma);
        let (v, sv) = (pair[1] / gamma, pair[1] % gamma);
        let u_blue = su < blue_counts[u as usize];
        let v_blue = sv < blue_counts[v as usize];
        graph.add_edge(u, v);
        match (u_blue, v_blue) {
            (false, false) => rr.add_edge(u, v),
            (true, true) => bb.add_edge(u, v),
            (false, true) => {
                rb.add_edge(u, v);
                rb_red_ends.push(u);
            }
            (true, false) => {
                rb.add_edge(u, v);
                rb_red_ends.push(v);
            }
        }
    }
    Ok(ColoredGraph { gamma, gamma_minus: lambda, blue_counts, graph, rr, rb, bb, rb_red_ends })
}

#[derive(Clone, Debug)]
pub struct SurgeryResult {
    /// RR edges plus the re-matched red half-edges (plus the leftover loop).
    pub g2: MultiGraph,
    /// Just the re-matched part: floor(freed_red / 2) proper edges.
    pub rewired: MultiGraph,
    /// Count of freed red half-edges (= number of RB edges).
    pub freed_red: usize,
    /// When freed_red is odd one half-edge stays unmatched and closes a
    /// self-loop at this vertex in g2. Loops never cross a cut, so the
    /// rewired-part cut statistics ignore it.
    pub leftover: Option<u32>,
}

pub fn rewire(colored: &ColoredGraph, rng: &mut Stream) -> SurgeryResult {
    let mut freed = colored.rb_red_ends.clone();
    rng.shuffle(&mut freed);
    let mut rewired = MultiGraph::new(colored.graph.n());
    for pair in freed.chunks_exact(2) {
        rewired.add_edge(pair[0], pair[1]);
    }
    let leftover = if freed.len() % 2 == 1 { Some(freed[freed.len() - 1]) } else { None };
    let mut g2 = colored.rr.union(&rewired);
    if let Some(v) = leftover {
        g2.add_edge(v, v);
    }
    SurgeryResult { g2, rewired, freed_red: freed.len(), leftover }
}

/// Two-stage matching on 2l red and 2m blue balls: match everything
/// uniformly, drop pairs touching blue, re-match the freed reds uniformly.
/// Returns the l red pairs, each (min, max), sorted.
pub fn two_stage_pairing(l: usize, m: usize, rng: &mut Stream) -> Vec<(u32, u32)> {
    let reds = 2 * l as u32;
    let total = 2 * (l + m);
    let mut balls: Vec<u32> = (0..total as u32).collect();
    rng.shuffle(&mut balls);
    let mut pairs = Vec::with_capacity(l);
    let mut freed = Vec::new();
    for p in balls.chunks_exact(2) {
        match (p[0] < reds, p[1] < reds) {
            (true, true) => pairs.push((p[0].min(p[1]), p[0].max(p[1]))),
            (true, false) => freed.push(p[0]),
            (false, true) => freed.push(p[1]),
            (false, false) => {}
        }
    }
    rng.shuffle(&mut freed);
    for p in freed.chunks_exact(2) {
        pairs.push((p[0].min(p[1]), p[0].max(p[1])));
    }
    pairs.sort_unstable();
    pairs
}

/// Exact finite-n expectations for the surgery pieces at a fixed balanced
/// configuration.
#[derive(Clone, Debug)]
pub struct SurgeryExpectations {
    pub gamma_minus: f64,
    /// E[Z_1], by exact summation of the truncated Poisson.
    pub e_z1: f64,
    pub e_rb_edges: f64,
    pub e_cut_rb: f64,
    pub e_bb_edges: f64,
    pub e_cut_bb: f64,
}

pub fn surgery_expectations(n: usize, gamma: u32) -> SurgeryExpectations {
    assert!(n >= 2 && gamma >= 2);
    let lambda = gamma_minus(gamma);
    // E[Z1] = sum_{x < gamma} (gamma - x) pmf(x; lambda): a finite sum.
    let mut pmf = libm::exp(-lambda);
    let mut e_z1 = 0.0;
    for x in 0..gamma {
        e_z1 += (gamma - x) as f64 * pmf;
        pmf *= lambda / (x + 1) as f64;
    }
    let nf = n as f64;
    let g = gamma as f64;
    let ng1 = nf * g - 1.0;
    let frac = e_z1 / g;
    let e_rb_edges = nf * (nf - 1.0) * g * g / ng1 * frac * (1.0 - frac);
    let balanced = 2.0 * (1.0 - 1.0 / nf); // 1/P(random balanced pair crosses)
    let e_cut_rb = e_rb_edges / balanced;
    let e_bb_edges = nf * (nf - 1.0) * g * g / (2.0 * ng1) * frac * frac;
    let e_cut_bb = e_bb_edges / balanced;
    SurgeryExpectations { gamma_minus: lambda, e_z1, e_rb_edges, e_cut_rb, e_bb_edges, e_cut_bb }
}

/// E[(X - gamma)+] for X ~ Poisson(lambda), summed until the neglected tail
/// is below 1e-12.
pub fn poisson_mean_excess(gamma: u32, lambda: f64) -> f64 {
    let mut pmf = libm::exp(-lambda);
    let mut acc = 0.0;
    let mut k = 0u32;
    loop {
        if k > gamma {
            acc += (k - gamma) as f64 * pmf;
        }
        // Past 2*lambda the term ratio is below 1/2, so the neglected tail
        // is at most ~10x the current term; this leaves well under 1e-12.
        if k as f64 > 2.0 * lambda && k > gamma && pmf * (k - gamma) as f64 * 10.0 < 1e-14 {
            return acc;
        }
        k += 1;
        pmf *= lambda / k as f64;
    }
}

/// E[cut of the blue-touching part | Z] at a balanced configuration:
/// s_total = sum Z_i, s_plus = sum over the +1 class.
pub fn cond_mean_cut_blue(n: usize, gamma: u32, s_total: f64, s_plus: f64) -> f64 {
    let ng1 = n as f64 * gamma as f64 - 1.0;
    s_total * (n as f64 * gamma as f64 / 2.0) / ng1 - s_plus * (s_total - s_plus) / ng1
}

/// E[cut of a uniform matching of s_total half-edges | degrees], s_plus of
/// them on the +1 side. Odd totals leave one half-edge unmatched (it closes
/// a loop, which never crosses), making each specific pair probability 1/S
/// instead of 1/(S-1).
pub fn cond_mean_cut_rewired(s_total: f64, s_plus: f64) -> f64 {
    if s_total < 2.0 {
        return 0.0;
    }
    let pairs = s_plus * (s_total - s_plus);
    if (s_total as u64) % 2 == 0 {
        pairs / (s_total - 1.0)
    } else {
        pairs / s_total
    }
}
