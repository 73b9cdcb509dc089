//! Plain-text multigraph files: a header `n m_total`, then one line per
//! distinct edge `u v mult` with 1-indexed endpoints and u <= v, sorted.

use anyhow::{bail, Context, Result};
use glasscut_core::graphs::MultiGraph;
use std::io::{BufRead, Write};

pub fn write_graph(w: &mut impl Write, g: &MultiGraph) -> Result<()> {
    writeln!(w, "{} {}", g.n(), g.m_total())?;
    for (u, v, mult) in g.distinct_edges() {
        writeln!(w, "{} {} {}", u + 1, v + 1, mult)?;
    }
    Ok(())
}

pub fn read_graph(r: &mut impl BufRead) -> Result<MultiGraph> {
    let mut lines = r.lines();
    let header = lines.next().context("empty graph file")??;
    let mut it = header.split_whitespace();
    let n: usize = it.next().context("missing n")?.parse().context("bad n")?;
    let m_total: u64 = it.next().context("missing m_total")?.parse().context("bad m_total")?;
    if it.next().is_some() {
        bail!("trailing tokens in header");
    }
    let mut g = MultiGraph::new(n);
    for (ln, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            bail!("line {}: expected `u v mult`", ln + 2);
        }
        let u: u64 = fields[0].parse().with_context(|| format!("line {}: bad u", ln + 2))?;
        let v: u64 = fields[1].parse().with_context(|| format!("line {}: bad v", ln + 2))?;
        let mult: u32 = fields[2].parse().with_context(|| format!("line {}: bad mult", ln + 2))?;
        if u < 1 || v < 1 || u > n as u64 || v > n as u64 {
            bail!("line {}: endpoint out of range 1..={}", ln + 2, n);
        }
        if u > v {
            bail!("line {}: endpoints must satisfy u <= v", ln + 2);
        }
        if mult == 0 {
            bail!("line {}: zero multiplicity", ln + 2);
        }
        g.add_edge_mult((u - 1) as u32, (v - 1) as u32, mult);
    }
    if g.m_total() != m_total {
        bail!("header says m_total = {}, edges sum to {}", m_total, g.m_total());
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use glasscut_core::rng::Stream;

    #[test]
    fn round_trips_random_multigraphs() {
        for seed in 0..30 {
            let mut s = Stream::from_seed(seed);
            let n = 2 + s.below(20) as usize;
            let g = glasscut_core::graphs::gen_er_gnm(n, 3 * n as u64, &mut s);
            let mut buf = Vec::new();
            write_graph(&mut buf, &g).unwrap();
            let back = read_graph(&mut buf.as_slice()).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn format_is_one_indexed_and_sorted() {
        let g = MultiGraph::from_edges(3, [(2, 1), (0, 0), (1, 2)]);
        let mut buf = Vec::new();
        write_graph(&mut buf, &g).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "3 3\n1 1 1\n2 3 2\n");
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "2",
            "2 1\n1 2",
            "2 1\n2 1 1",
            "2 1\n1 3 1",
            "2 1\n1 2 0",
            "2 5\n1 2 1",
            "x 1\n",
        ] {
            assert!(read_graph(&mut bad.as_bytes()).is_err(), "accepted {bad:?}");
        }
    }
}
