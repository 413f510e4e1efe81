//! Small extremal families and random generators.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::instance::{GraphSpec, UnionInstance};
use crate::lab::chromatic::{chromatic_number, member_chromatic_number};
use crate::rng::stream_rng;

/// Three nearly disjoint graphs of chromatic number at most `n` whose union
/// needs `n + 1` colors: `G_1 = K_{n+1} − uv` on `{v, a_1..a_n}` with
/// `u = a_1`, `G_2 = K_{n+1} − wv` on `{v, b_1..b_n}` with `w = b_1`, and
/// `G_3` the single edge `uw`.
pub fn construct_thm15ii(n: usize) -> Result<UnionInstance> {
    if n < 2 {
        return Err(Error::Domain(format!("n = {n} must be at least 2")));
    }
    let side = |prefix: &str, id: &str| {
        let mut names = vec!["v".to_string()];
        names.extend((1..=n).map(|i| format!("{prefix}{i}")));
        let mut g = GraphSpec::new(id);
        g.vertices = names.clone();
        for (i, x) in names.iter().enumerate() {
            for y in &names[i + 1..] {
                if !(x == "v" && *y == format!("{prefix}1")) {
                    g.edges.push((x.clone(), y.clone()));
                }
            }
        }
        g
    };
    let g3 = GraphSpec::new("G3").vertex("a1").vertex("b1").edge("a1", "b1");
    UnionInstance::new(2, vec![side("a", "G1"), side("b", "G2"), g3])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub m: usize,
    /// `max_i χ(G_i)`
    pub n: usize,
    pub chi_union: usize,
    /// `m + n − 2`
    pub bound: usize,
    pub holds: bool,
    pub note: Option<String>,
}

/// Compares `χ(G_1 ∪ … ∪ G_m)` with `m + n − 2` on each family. Families over
/// 12 vertices are skipped with a note.
pub fn check_bound_15i(families: &[UnionInstance]) -> Vec<BoundRow> {
    families
        .iter()
        .map(|inst| {
            let m = inst.num_graphs();
            let skip = |note: String| BoundRow { m, n: 0, chi_union: 0, bound: 0, holds: true, note: Some(note) };
            if inst.num_vertices() > 12 {
                return skip(format!("skipped: {} vertices exceed 12", inst.num_vertices()));
            }
            let mut n = 0;
            for gi in 0..m {
                match member_chromatic_number(inst, gi) {
                    Ok(w) => n = n.max(w.chi),
                    Err(e) => return skip(format!("skipped: {e}")),
                }
            }
            let chi_union = match chromatic_number(inst) {
                Ok(w) => w.chi,
                Err(e) => return skip(format!("skipped: {e}")),
            };
            let bound = (m + n).saturating_sub(2);
            let holds = chi_union <= bound;
            let note = (!holds).then(|| format!("violated at m + n = {}", m + n));
            BoundRow { m, n, chi_union, bound, holds, note }
        })
        .collect()
}

/// Random nearly disjoint family: graph `i` has `private` own vertices, and
/// each pair of graphs shares a dedicated hub vertex with probability 1/2.
/// Edges appear independently with probability `edge_p`.
pub fn random_family(m: usize, private: usize, edge_p: f64, seed: u64) -> Result<UnionInstance> {
    let mut rng = stream_rng(seed, 0);
    let mut members: Vec<Vec<String>> =
        (0..m).map(|i| (0..private).map(|j| format!("g{i}v{j}")).collect()).collect();
    for i in 0..m {
        for j in i + 1..m {
            if rng.gen_bool(0.5) {
                let hub = format!("h{i}_{j}");
                members[i].push(hub.clone());
                members[j].push(hub);
            }
        }
    }
    let specs = members
        .into_iter()
        .enumerate()
        .map(|(i, vs)| {
            let mut g = GraphSpec::new(format!("G{i}"));
            for (a, x) in vs.iter().enumerate() {
                for y in &vs[a + 1..] {
                    if rng.gen_bool(edge_p) {
                        g.edges.push((x.clone(), y.clone()));
                    }
                }
            }
            g.vertices = vs;
            g
        })
        .collect();
    UnionInstance::new(m.clamp(1, 2), specs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratedHypergraph {
    pub hypergraph: Hypergraph,
    /// `n · D / k`, the edge count at which every vertex would have degree `D`.
    pub target_edges: usize,
    pub attempts: usize,
}

/// Greedy random linear hypergraph with `k`-vertex edges and maximum degree
/// at most `target_d`. Random `k`-sets are rejected when they share two
/// vertices with an existing edge or push a degree past `target_d`; the
/// search stops at the density target or after `50 · target` consecutive
/// rejections.
pub fn random_linear_hypergraph(n_vertices: usize, k: usize, target_d: usize, seed: u64) -> Result<GeneratedHypergraph> {
    if k < 2 {
        return Err(Error::Domain(format!("edge size k = {k} must be at least 2")));
    }
    if k > n_vertices {
        return Err(Error::Domain(format!("edge size k = {k} exceeds {n_vertices} vertices")));
    }
    let mut rng = stream_rng(seed, 0);
    let target = n_vertices * target_d / k;
    let mut covered = std::collections::HashSet::new();
    let mut degree = vec![0usize; n_vertices];
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let pool: Vec<usize> = (0..n_vertices).collect();
    let (mut attempts, mut streak) = (0, 0);
    let max_streak = 50 * target.max(1);
    while edges.len() < target && streak < max_streak {
        attempts += 1;
        let mut e: Vec<usize> = pool.choose_multiple(&mut rng, k).copied().collect();
        e.sort_unstable();
        let ok = e.iter().all(|&v| degree[v] < target_d)
            && e.iter().enumerate().all(|(a, &x)| e[a + 1..].iter().all(|&y| !covered.contains(&(x, y))));
        if !ok {
            streak += 1;
            continue;
        }
        streak = 0;
        for (a, &x) in e.iter().enumerate() {
            degree[x] += 1;
            for &y in &e[a + 1..] {
                covered.insert((x, y));
            }
        }
        edges.push(e);
    }
    let hypergraph = Hypergraph::from_indices(n_vertices, edges)?;
    debug_assert!(hypergraph.check_linear().is_ok());
    Ok(GeneratedHypergraph { hypergraph, target_edges: target, attempts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm15ii_shape() {
        for n in 2..6 {
            let inst = construct_thm15ii(n).unwrap();
            assert!(inst.validate().is_pass());
            assert_eq!(inst.num_vertices(), 2 * n + 1);
        }
        assert!(construct_thm15ii(1).is_err());
    }

    #[test]
    fn thm15ii_n2_chromatic_numbers() {
        let inst = construct_thm15ii(2).unwrap();
        for gi in 0..3 {
            assert_eq!(member_chromatic_number(&inst, gi).unwrap().chi, 2);
        }
        assert_eq!(chromatic_number(&inst).unwrap().chi, 3);
    }

    #[test]
    fn single_graph_misses_bound() {
        let inst = UnionInstance::new(1, vec![GraphSpec::complete("k", &["a", "b", "c"])]).unwrap();
        let rows = check_bound_15i(&[inst]);
        assert_eq!((rows[0].m, rows[0].n, rows[0].chi_union, rows[0].holds), (1, 3, 3, false));
    }

    #[test]
    fn random_families_are_nearly_disjoint() {
        for seed in 0..20 {
            let inst = random_family(3, 3, 0.6, seed).unwrap();
            assert!(inst.validate().is_pass());
        }
    }

    #[test]
    fn generated_hypergraphs() {
        let g = random_linear_hypergraph(30, 2, 4, 1).unwrap();
        assert!(g.hypergraph.max_degree() <= 4);
        let g = random_linear_hypergraph(60, 3, 5, 2).unwrap();
        assert!(g.hypergraph.check_linear().is_ok());
        assert!(g.hypergraph.max_degree() <= 5);
        assert!(g.hypergraph.edges().iter().all(|e| e.len() == 3));
        assert_eq!(random_linear_hypergraph(60, 3, 5, 2).unwrap(), g);
    }
}
