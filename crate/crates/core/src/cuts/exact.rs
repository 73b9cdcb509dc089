//! Exhaustive extremal cuts by Gray-code enumeration.
//!
//! Free cuts: vertex 0 is pinned to +1 (cuts are symmetric under global
//! flip) and the remaining n-1 spins walk a binary reflected Gray code, one
//! flip per step. Bisections: vertex 0 stays on the +1 side and the other
//! n/2 - 1 members of that side walk a revolving-door order over the n-1
//! candidates, one swap per step. Both keep the cut size updated
//! incrementally, so a step costs one or two vertex degrees.

use super::{flip_delta, Constraint, CutError, CutResult, Objective, SolverKind, SpinConfig};
use crate::graphs::MultiGraph;
use alloc::vec;
use alloc::vec::Vec;

/// Largest vertex count accepted for exhaustive enumeration.
pub const EXACT_MAX_N: usize = 30;

pub fn exact_extremal(
    g: &MultiGraph,
    objective: Objective,
    constraint: Constraint,
) -> Result<CutResult, CutError> {
    let n = g.n();
    if n == 0 {
        return Err(CutError::EmptyGraph);
    }
    if n > EXACT_MAX_N {
        return Err(CutError::TooLarge { n, max: EXACT_MAX_N });
    }
    if constraint == Constraint::Bisection && n % 2 != 0 {
        return Err(CutError::OddVertexCount);
    }
    let adj = g.adjacency();
    let mut spins = match constraint {
        Constraint::Free => vec![1i8; n],
        Constraint::Bisection => {
            (0..n).map(|v| if v < n / 2 { 1i8 } else { -1 }).collect::<Vec<_>>()
        }
    };
    let mut cut = initial_cut(g, &spins);
    let mut best = cut;
    let mut best_spins = spins.clone();
    let consider = |cut: i64, spins: &[i8], best: &mut i64, best_spins: &mut Vec<i8>| {
        let better = match objective {
            Objective::Min => cut < *best,
            Objective::Max => cut > *best,
        };
        if better {
            *best = cut;
            best_spins.copy_from_slice(spins);
        }
    };

    match constraint {
        Constraint::Free => {
            // All-plus start has cut 0; walk the 2^(n-1) configurations.
            for c in 1u64..(1u64 << (n - 1)) {
                let v = c.trailing_zeros() as usize + 1;
                cut += flip_delta(&adj, &spins, v);
                spins[v] = -spins[v];
                consider(cut, &spins, &mut best, &mut best_spins);
            }
        }
        Constraint::Bisection => {
            revolving_door(n - 1, n / 2 - 1, true, &mut |out, inn| {
                // Subset element j stands for vertex j + 1.
                cut += flip_delta(&adj, &spins, out + 1);
                spins[out + 1] = -spins[out + 1];
                cut += flip_delta(&adj, &spins, inn + 1);
                spins[inn + 1] = -spins[inn + 1];
                consider(cut, &spins, &mut best, &mut best_spins);
            });
        }
    }

    Ok(CutResult {
        value: best as f64,
        config: Some(SpinConfig::new(best_spins).expect("enumeration keeps spins valid")),
        objective,
        constraint,
        solver: SolverKind::Exact,
        certificate: None,
    })
}

fn initial_cut(g: &MultiGraph, spins: &[i8]) -> i64 {
    let sc = SpinConfig::new(spins.to_vec()).expect("nonempty +1/-1 start");
    super::cut_size(g, &sc) as i64
}

/// Transitions of the revolving-door order on k-subsets of {0..n-1}: the
/// sequence R(n,k) = R(n-1,k) then reverse(R(n-1,k-1)) with n-1 adjoined
/// starts at {0..k-1} and moves by one (out, in) exchange per step. `fwd`
/// false walks the same list backwards with exchanges inverted.
pub(crate) fn revolving_door<F: FnMut(usize, usize)>(n: usize, k: usize, fwd: bool, f: &mut F) {
    if k == 0 || k == n {
        return;
    }
    // Junction between the two blocks: {0..k-2, n-2} -> {0..k-3, n-2, n-1},
    // so the element k-2 leaves (n-2 when k == 1) and n-1 enters.
    let out = if k == 1 { n - 2 } else { k - 2 };
    if fwd {
        revolving_door(n - 1, k, true, f);
        f(out, n - 1);
        revolving_door(n - 1, k - 1, false, f);
    } else {
        revolving_door(n - 1, k - 1, true, f);
        f(n - 1, out);
        revolving_door(n - 1, k, false, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::cut_size;
    use crate::graphs::{gen_er_gnm, MultiGraph};
    use crate::rng::Stream;
    use alloc::collections::BTreeSet;

    fn complete(n: u32) -> MultiGraph {
        let mut g = MultiGraph::new(n as usize);
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    #[test]
    fn revolving_door_visits_every_subset_once() {
        for n in 1..=8usize {
            for k in 0..=n {
                let mut cur: BTreeSet<usize> = (0..k).collect();
                let mut seen = BTreeSet::new();
                seen.insert(cur.clone());
                revolving_door(n, k, true, &mut |out, inn| {
                    assert!(cur.remove(&out), "removing absent {out} from {cur:?}");
                    assert!(cur.insert(inn), "adding present {inn}");
                    assert!(seen.insert(cur.clone()), "revisited {cur:?}");
                });
                let binom: usize = (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1));
                assert_eq!(seen.len(), binom, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn known_graphs() {
        // K4: max cut 4 (2+2 split), min bisection 4, max free also 4.
        let g = complete(4);
        let max = exact_extremal(&g, Objective::Max, Constraint::Free).unwrap();
        assert_eq!(max.value, 4.0);
        let mins = exact_extremal(&g, Objective::Min, Constraint::Bisection).unwrap();
        assert_eq!(mins.value, 4.0);
        // C4 is bipartite: max cut 4; min bisection 2.
        let mut c4 = MultiGraph::new(4);
        for i in 0..4u32 {
            c4.add_edge(i, (i + 1) % 4);
        }
        assert_eq!(exact_extremal(&c4, Objective::Max, Constraint::Free).unwrap().value, 4.0);
        assert_eq!(
            exact_extremal(&c4, Objective::Min, Constraint::Bisection).unwrap().value,
            2.0
        );
        assert_eq!(
            exact_extremal(&c4, Objective::Max, Constraint::Bisection).unwrap().value,
            4.0
        );
        // C5: odd cycle, max cut 4; min free cut 0 (everything on one side).
        let mut c5 = MultiGraph::new(5);
        for i in 0..5u32 {
            c5.add_edge(i, (i + 1) % 5);
        }
        assert_eq!(exact_extremal(&c5, Objective::Max, Constraint::Free).unwrap().value, 4.0);
        assert_eq!(exact_extremal(&c5, Objective::Min, Constraint::Free).unwrap().value, 0.0);
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        for seed in 0..20 {
            let mut s = Stream::from_seed(seed);
            let n = 6 + (seed % 3) as usize * 2; // 6, 8, 10
            let g = gen_er_gnm(n, (2 * n) as u64, &mut s);
            let mut free = [i64::MAX, i64::MIN];
            let mut bis = [i64::MAX, i64::MIN];
            for mask in 0u32..(1 << n) {
                let spins: Vec<i8> =
                    (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
                let balanced = spins.iter().map(|&x| x as i64).sum::<i64>() == 0;
                let c = cut_size(&g, &SpinConfig::new(spins).unwrap()) as i64;
                free[0] = free[0].min(c);
                free[1] = free[1].max(c);
                if balanced {
                    bis[0] = bis[0].min(c);
                    bis[1] = bis[1].max(c);
                }
            }
            for (obj, want_free, want_bis) in
                [(Objective::Min, free[0], bis[0]), (Objective::Max, free[1], bis[1])]
            {
                let r = exact_extremal(&g, obj, Constraint::Free).unwrap();
                assert_eq!(r.value, want_free as f64);
                let c = r.config.unwrap();
                assert_eq!(cut_size(&g, &c) as f64, r.value);
                let r = exact_extremal(&g, obj, Constraint::Bisection).unwrap();
                assert_eq!(r.value, want_bis as f64);
                let c = r.config.unwrap();
                assert!(c.is_balanced());
                assert_eq!(cut_size(&g, &c) as f64, r.value);
            }
        }
    }

    #[test]
    fn input_validation() {
        let g = MultiGraph::new(31);
        assert_eq!(
            exact_extremal(&g, Objective::Min, Constraint::Free).unwrap_err(),
            CutError::TooLarge { n: 31, max: 30 }
        );
        let g = MultiGraph::new(5);
        assert_eq!(
            exact_extremal(&g, Objective::Min, Constraint::Bisection).unwrap_err(),
            CutError::OddVertexCount
        );
        let g = MultiGraph::new(0);
        assert_eq!(
            exact_extremal(&g, Objective::Min, Constraint::Free).unwrap_err(),
            CutError::EmptyGraph
        );
    }
}
