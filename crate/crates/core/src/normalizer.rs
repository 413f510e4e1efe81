//! Embedding an instance into one with exact membership, list size and color
//! degree.
//!
//! The construction handles one original member graph per iteration, in
//! sorted-id order. An iteration takes every vertex to `[2D]^k` copies, one
//! coordinate per *active* color (a color some target vertex is short of), and
//! tops the target graph up with regular bipartite "regularizers" along each
//! coordinate. Every other member graph is copied once per coordinate vector,
//! each copy becoming its own member graph. Colors on copies are retagged so
//! that only copies differing in coordinate `j` can share the `j`-th color.
//!
//! Ids: in iteration `t` a vertex at coordinates `x` becomes `"{v}@{t}:{x}"`
//! (`x` joined by `.`), and the all-zero copy keeps the plain id `v`. Graph copies work the same way, so
//! every original graph and vertex survives under its own id.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{color_degree_unchecked, Assignment, Color, GraphSpec, Mode, UnionInstance};

pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

/// Appends globally fresh colors until every list has `lambda` colors.
pub fn pad_lists(inst: &UnionInstance, asg: &Assignment, lambda: usize) -> Result<Assignment> {
    let mut next = asg.max_color().map_or(0, |c| c + 1);
    let mut lists = Vec::with_capacity(inst.num_vertices());
    for v in 0..inst.num_vertices() {
        let mut l = asg.list(v).to_vec();
        if l.len() > lambda {
            return Err(Error::ListTooLong { vertex: inst.vertex_id(v).to_string(), len: l.len(), target: lambda });
        }
        while l.len() < lambda {
            l.push(next);
            next += 1;
        }
        lists.push(l);
    }
    Assignment::with_matchings(inst, lists, asg.matchings().clone())
}

/// Edges of a `degree`-regular bipartite graph between `{0..d-1}` and
/// `{d..2d-1}`: `a` is joined to `d + (a + s) mod d` for `s < degree`.
pub fn circulant_bipartite(degree: usize, d: usize) -> Result<Vec<(usize, usize)>> {
    if degree > d {
        return Err(Error::Domain(format!("regular degree {degree} exceeds part size {d}")));
    }
    let mut out = Vec::with_capacity(degree * d);
    for a in 0..d {
        for s in 0..degree {
            out.push((a, d + (a + s) % d));
        }
    }
    Ok(out)
}

/// A `degree`-regular graph on `[2d]^j` in which every neighbour of `x`
/// agrees with `x` on the first `j - 1` coordinates: `(2d)^{j-1}` disjoint
/// copies of [`circulant_bipartite`]. Coordinates are 0-based, `j ≥ 1`.
pub fn build_regularizer(j: usize, degree: usize, d: usize) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if j == 0 {
        return Err(Error::Domain("regularizer dimension must be at least 1".into()));
    }
    let fiber = circulant_bipartite(degree, d)?;
    let mut out = Vec::new();
    for prefix in product(2 * d, j - 1) {
        for &(a, b) in &fiber {
            let mut x = prefix.clone();
            x.push(a);
            let mut y = prefix.clone();
            y.push(b);
            out.push((x, y));
        }
    }
    Ok(out)
}

/// All vectors of `[base]^k` in lexicographic order.
fn product(base: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|x| {
                (0..base).map(move |a| {
                    let mut y = x.clone();
                    y.push(a);
                    y
                })
            })
            .collect();
    }
    out
}

fn coords_suffix(x: &[usize]) -> String {
    x.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(".")
}

/// Id of copy `x` made in iteration `t`; the all-zero copy keeps `base`.
fn copy_id(base: &str, t: usize, x: &[usize]) -> String {
    if x.iter().all(|&a| a == 0) {
        base.to_string()
    } else {
        format!("{base}@{t}:{}", coords_suffix(x))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Relabeling {
    /// New vertex id → (original vertex id, coordinates over all iterations).
    pub vertex_origin: BTreeMap<String, (String, Vec<usize>)>,
    /// Original vertex id → its embedded copy.
    pub embedded_vertex: BTreeMap<String, String>,
    /// New graph id → the original (or padding) graph it copies.
    pub graph_origin: BTreeMap<String, String>,
    /// New color → original color.
    pub color_origin: BTreeMap<Color, Color>,
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub instance: UnionInstance,
    pub assignment: Assignment,
    pub relabeling: Relabeling,
    /// Active colors per iteration that blew the instance up.
    pub iterations: Vec<(String, Vec<Color>)>,
}

#[derive(Clone, Debug)]
pub struct NormalizeOptions {
    pub mode: Mode,
    pub vertex_cap: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { mode: Mode::List, vertex_cap: DEFAULT_VERTEX_CAP }
    }
}

struct State {
    inst: UnionInstance,
    asg: Assignment,
    /// Per current vertex index: original id and coordinates.
    origin: Vec<(String, Vec<usize>)>,
    /// Per current graph index: the graph it descends from.
    graph_base: Vec<String>,
    color_origin: HashMap<Color, Color>,
}

/// Embeds `(inst, asg)` into an instance where every vertex lies in exactly
/// `C` graphs, every list has `lambda` colors and every color degree in every
/// member graph is exactly `d`.
pub fn normalize(
    inst: &UnionInstance,
    asg: &Assignment,
    d: usize,
    lambda: usize,
    opts: &NormalizeOptions,
) -> Result<Normalized> {
    if d == 0 {
        return Err(Error::Domain("target color degree must be positive".into()));
    }
    for id in inst.vertex_ids().iter().chain(inst.graphs().iter().map(|g| &g.id)) {
        if id.contains('@') {
            return Err(Error::Invalid(format!("id `{id}` contains the reserved character `@`")));
        }
    }
    for v in 0..inst.num_vertices() {
        let len = asg.list(v).len();
        if len > lambda {
            return Err(Error::ListTooLong { vertex: inst.vertex_id(v).to_string(), len, target: lambda });
        }
        if len < lambda {
            return Err(Error::Precondition(format!(
                "list of `{}` has {len} colors, fewer than {lambda}; pad the lists first",
                inst.vertex_id(v)
            )));
        }
    }
    let padded = inst.pad_membership();
    let order: Vec<String> = padded.graphs().iter().map(|g| g.id.clone()).collect();
    let colors: BTreeSet<Color> = asg.lists().iter().flatten().copied().collect();
    let mut st = State {
        origin: padded.vertex_ids().iter().map(|v| (v.clone(), Vec::new())).collect(),
        graph_base: order.clone(),
        asg: asg.clone(),
        inst: padded,
        color_origin: colors.iter().map(|&c| (c, c)).collect(),
    };
    let mut iterations = Vec::new();
    for target in &order {
        if let Some(active) = iterate(&mut st, target, iterations.len(), d, opts)? {
            iterations.push((target.clone(), active));
        }
    }

    let mut rel = Relabeling::default();
    for (v, (orig, x)) in st.origin.iter().enumerate() {
        let id = st.inst.vertex_id(v).to_string();
        if x.iter().all(|&a| a == 0) {
            rel.embedded_vertex.insert(orig.clone(), id.clone());
        }
        rel.vertex_origin.insert(id, (orig.clone(), x.clone()));
    }
    for (g, base) in st.inst.graphs().iter().zip(&st.graph_base) {
        rel.graph_origin.insert(g.id.clone(), base.clone());
    }
    rel.color_origin = st.color_origin.into_iter().collect();
    Ok(Normalized { instance: st.inst, assignment: st.asg, relabeling: rel, iterations })
}

/// One iteration; `None` when the target is already regular.
fn iterate(st: &mut State, target: &str, t: usize, d: usize, opts: &NormalizeOptions) -> Result<Option<Vec<Color>>> {
    let (inst, asg, mode) = (&st.inst, &st.asg, opts.mode);
    let targets: Vec<usize> = (0..inst.num_graphs()).filter(|&g| st.graph_base[g] == target).collect();
    let mut is_target = vec![false; inst.num_graphs()];
    // deficiency per (vertex, color) of a target vertex
    let mut deficit: HashMap<(usize, Color), usize> = HashMap::new();
    let mut active = BTreeSet::new();
    for &t in &targets {
        is_target[t] = true;
        for &v in &inst.graph(t).vertices {
            for &c in asg.list(v) {
                let deg = color_degree_unchecked(inst, asg, mode, t, v, c);
                if deg > d {
                    let j = asg.list(v).iter().position(|&x| x == c).unwrap_or(0) + 1;
                    return Err(Error::RegularizerInfeasible {
                        j,
                        vertex: inst.vertex_id(v).to_string(),
                        degree: d as i64 - deg as i64,
                        max: d,
                    });
                }
                if deg < d {
                    deficit.insert((v, c), d - deg);
                    active.insert(c);
                }
            }
        }
    }
    if active.is_empty() {
        return Ok(None);
    }
    let active: Vec<Color> = active.into_iter().collect();
    let k = active.len();
    let base = 2 * d;
    let projected = inst.num_vertices() as f64 * (base as f64).powi(k as i32);
    if projected > opts.vertex_cap as f64 {
        return Err(Error::SizeCap { projected, cap: opts.vertex_cap });
    }
    let xs = product(base, k);
    let slot = |c: Color| active.binary_search(&c).ok();
    let name = |v: usize, x: &[usize]| copy_id(inst.vertex_id(v), t, x);

    let mut specs = Vec::new();
    let mut graph_base = Vec::new();
    let mut reg_edges: Vec<((usize, usize), (usize, usize), Color)> = Vec::new();
    for (g, mg) in inst.graphs().iter().enumerate() {
        if is_target[g] {
            let mut spec = GraphSpec::new(mg.id.clone());
            for (xi, x) in xs.iter().enumerate() {
                for &v in &mg.vertices {
                    spec.vertices.push(name(v, x));
                    for &c in asg.list(v) {
                        let (Some(j), Some(&def)) = (slot(c), deficit.get(&(v, c))) else { continue };
                        if x[j] >= d {
                            continue;
                        }
                        for s in 0..def {
                            let mut y = x.clone();
                            y[j] = d + (x[j] + s) % d;
                            let yi = xs.binary_search(&y).expect("coordinate vectors are sorted");
                            spec.edges.push((name(v, x), name(v, &y)));
                            reg_edges.push(((v, xi), (v, yi), c));
                        }
                    }
                }
                for &(u, w) in &mg.edges {
                    spec.edges.push((name(u, x), name(w, x)));
                }
            }
            specs.push(spec);
            graph_base.push(st.graph_base[g].clone());
        } else {
            for x in &xs {
                let mut spec = GraphSpec::new(copy_id(&mg.id, t, x));
                spec.vertices = mg.vertices.iter().map(|&v| name(v, x)).collect();
                spec.edges = mg.edges.iter().map(|&(u, w)| (name(u, x), name(w, x))).collect();
                specs.push(spec);
                graph_base.push(st.graph_base[g].clone());
            }
        }
    }
    let mut by_id: Vec<(String, usize)> = specs.iter().map(|s| s.id.clone()).zip(0..).collect();
    by_id.sort();
    let graph_base = by_id.iter().map(|(_, i)| graph_base[*i].clone()).collect();
    let new_inst = UnionInstance::new(inst.c_bound(), specs)?;
    let at = |v: usize, xi: usize| -> usize {
        new_inst.vertex_index(&name(v, &xs[xi])).expect("every copy is a vertex")
    };

    let n_new = new_inst.num_vertices();
    let mut lists = vec![Vec::new(); n_new];
    let mut origin = vec![(String::new(), Vec::new()); n_new];
    let mut color_origin = HashMap::new();
    let mut interned: HashMap<(Color, Vec<usize>), Color> = HashMap::new();
    let mut next = asg.max_color().map_or(0, |c| c + 1);
    const SENTINEL: usize = usize::MAX;
    for v in 0..inst.num_vertices() {
        for (xi, x) in xs.iter().enumerate() {
            let nv = at(v, xi);
            let (orig, coords) = &st.origin[v];
            let mut full = coords.clone();
            full.extend_from_slice(x);
            origin[nv] = (orig.clone(), full);
            lists[nv] = match mode {
                Mode::Dp => asg.list(v).to_vec(),
                Mode::List => asg
                    .list(v)
                    .iter()
                    .map(|&c| {
                        let mut tag = x.clone();
                        if let Some(j) = slot(c) {
                            tag[j] = SENTINEL;
                        }
                        let id = if tag.iter().all(|&a| a == 0 || a == SENTINEL) {
                            c
                        } else {
                            *interned.entry((c, tag)).or_insert_with(|| {
                                next += 1;
                                next - 1
                            })
                        };
                        color_origin.insert(id, st.color_origin[&c]);
                        id
                    })
                    .collect(),
            };
        }
    }
    let new_asg = match mode {
        Mode::List => Assignment::new(&new_inst, lists)?,
        Mode::Dp => {
            let mut m: BTreeMap<(usize, usize), Vec<(Color, Color)>> = BTreeMap::new();
            for (&(u, w), ps) in asg.matchings() {
                for xi in 0..xs.len() {
                    m.insert((at(u, xi), at(w, xi)), ps.clone());
                }
            }
            for ((v, xi), (w, yi), c) in reg_edges {
                m.insert((at(v, xi), at(w, yi)), vec![(c, c)]);
            }
            for &c in st.color_origin.keys() {
                color_origin.insert(c, st.color_origin[&c]);
            }
            Assignment::with_matchings(&new_inst, lists, m)?
        }
    };
    st.inst = new_inst;
    st.asg = new_asg;
    st.origin = origin;
    st.graph_base = graph_base;
    st.color_origin = color_origin;
    Ok(Some(active))
}

/// Pulls a coloring of the normalized instance back to the original one.
pub fn restrict_coloring(
    original: &UnionInstance,
    norm: &Normalized,
    coloring: &crate::instance::PartialColoring,
) -> Result<crate::instance::PartialColoring> {
    let mut out = crate::instance::PartialColoring::empty(original.num_vertices());
    for v in 0..original.num_vertices() {
        let id = original.vertex_id(v);
        let copy = norm.relabeling.embedded_vertex.get(id).ok_or_else(|| Error::UnknownVertex(id.to_string()))?;
        if let Some(c) = coloring.get(norm.instance.vertex_index(copy)?) {
            out.set(v, norm.relabeling.color_origin.get(&c).copied().unwrap_or(c));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{color_degree, verify_coloring};

    fn path() -> (UnionInstance, Assignment) {
        let inst = UnionInstance::new(
            1,
            vec![GraphSpec::new("p").vertex("u").vertex("v").vertex("w").edge("u", "v").edge("v", "w")],
        )
        .unwrap();
        let asg = Assignment::new(&inst, vec![vec![1]; 3]).unwrap();
        (inst, asg)
    }

    fn assert_exact(n: &Normalized, mode: Mode, c: usize, lambda: usize, d: usize) {
        let (inst, asg) = (&n.instance, &n.assignment);
        assert!(inst.validate().is_pass());
        for v in 0..inst.num_vertices() {
            assert_eq!(inst.membership(v).len(), c);
            assert_eq!(asg.list(v).len(), lambda);
            for &gi in inst.membership(v) {
                for &col in asg.list(v) {
                    assert_eq!(color_degree(inst, asg, mode, gi, v, col).unwrap(), d);
                }
            }
        }
    }

    #[test]
    fn regularizer_shapes() {
        assert!(build_regularizer(1, 0, 3).unwrap().is_empty());
        let full = circulant_bipartite(3, 3).unwrap();
        assert_eq!(full.len(), 9);
        let set: BTreeSet<_> = full.into_iter().collect();
        for a in 0..3 {
            for b in 3..6 {
                assert!(set.contains(&(a, b)));
            }
        }
        let m = build_regularizer(1, 1, 2).unwrap();
        let mut deg = [0; 4];
        for (x, y) in &m {
            deg[x[0]] += 1;
            deg[y[0]] += 1;
        }
        assert_eq!(deg, [1; 4]);
        for (x, y) in build_regularizer(3, 2, 2).unwrap() {
            assert_eq!(x[..2], y[..2]);
        }
        assert!(circulant_bipartite(3, 2).is_err());
    }

    #[test]
    fn pad_lists_examples() {
        let (inst, asg) = path();
        assert_eq!(pad_lists(&inst, &asg, 1).unwrap(), asg);
        let padded = pad_lists(&inst, &asg, 3).unwrap();
        assert_eq!(padded.list(0), &[1, 2, 3]);
        assert_eq!(padded.list(1), &[1, 4, 5]);
        assert!(matches!(pad_lists(&inst, &padded, 2), Err(Error::ListTooLong { .. })));
    }

    #[test]
    fn single_edge_is_already_normalized() {
        let inst = UnionInstance::new(1, vec![GraphSpec::new("e").vertex("u").vertex("v").edge("u", "v")]).unwrap();
        let asg = Assignment::new(&inst, vec![vec![1], vec![1]]).unwrap();
        let n = normalize(&inst, &asg, 1, 1, &NormalizeOptions::default()).unwrap();
        assert_eq!(n.instance.to_specs(), inst.to_specs());
        assert_eq!(n.assignment, asg);
        assert!(n.iterations.is_empty());
    }

    #[test]
    fn path_to_degree_two() {
        let (inst, asg) = path();
        for mode in [Mode::List, Mode::Dp] {
            let asg = if mode == Mode::Dp { Assignment::identity_matchings(&inst, asg.lists().to_vec()).unwrap() } else { asg.clone() };
            let n = normalize(&inst, &asg, 2, 1, &NormalizeOptions { mode, ..Default::default() }).unwrap();
            assert_eq!(n.instance.num_vertices(), 12);
            assert_exact(&n, mode, 1, 1, 2);
            for g in inst.graphs() {
                let ng = n.instance.graph(n.instance.graph_index(&g.id).unwrap());
                for &(a, b) in &g.edges {
                    let (a, b) = (inst.vertex_id(a), inst.vertex_id(b));
                    assert!(n.instance.is_edge(n.instance.vertex_index(a).unwrap(), n.instance.vertex_index(b).unwrap()));
                    assert!(ng.vertices.contains(&n.instance.vertex_index(a).unwrap()));
                }
            }
            for v in inst.vertex_ids() {
                assert_eq!(n.assignment.list(n.instance.vertex_index(v).unwrap()), &[1]);
            }
        }
    }

    #[test]
    fn size_cap_refuses() {
        let (inst, asg) = path();
        let opts = NormalizeOptions { vertex_cap: 10, ..Default::default() };
        assert!(matches!(normalize(&inst, &asg, 2, 1, &opts), Err(Error::SizeCap { cap: 10, .. })));
    }

    #[test]
    fn degree_above_target_is_infeasible() {
        let (inst, asg) = path();
        assert!(matches!(
            normalize(&inst, &asg, 1, 1, &NormalizeOptions::default()),
            Err(Error::RegularizerInfeasible { .. })
        ));
    }

    #[test]
    fn restricted_colorings_stay_proper() {
        let inst = UnionInstance::new(1, vec![GraphSpec::complete("t", &["a", "b", "c"])]).unwrap();
        let asg = Assignment::new(&inst, vec![vec![1, 2, 3], vec![1, 2, 3], vec![1, 2, 4]]).unwrap();
        let n = normalize(&inst, &asg, 2, 3, &NormalizeOptions::default()).unwrap();
        assert_exact(&n, Mode::List, 1, 3, 2);
        let cfg = crate::finisher::FinisherConfig { force: true, max_resample_passes: 0, ..Default::default() };
        let rep = crate::finisher::finish(&n.instance, &n.assignment, Mode::List, &cfg, 1).unwrap();
        let col = rep.coloring.expect("normalized triangle is colorable");
        let back = restrict_coloring(&inst, &n, &col).unwrap();
        assert!(back.is_total());
        assert!(verify_coloring(&inst, &asg, &back, Mode::List).is_pass());
    }
}
