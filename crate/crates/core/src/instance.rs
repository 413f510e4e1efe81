//! Nearly disjoint graph unions, list/correspondence assignments and color degrees.
//!
//! Vertex and graph ids are strings at the boundary and dense indices inside.
//! Indices follow the sorted-id order, so every iteration in the crate is
//! reproducible regardless of how the input enumerated its graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Color = u32;

/// Which conflict rule an assignment is read under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Adjacent vertices conflict when they share a color.
    List,
    /// Adjacent vertices conflict when their colors are matched on the edge.
    Dp,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::List => f.write_str("list"),
            Mode::Dp => f.write_str("dp"),
        }
    }
}

/// Input description of one member graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub id: String,
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl GraphSpec {
    pub fn new(id: impl Into<String>) -> Self {
        GraphSpec { id: id.into(), ..Default::default() }
    }

    pub fn vertex(mut self, v: impl Into<String>) -> Self {
        self.vertices.push(v.into());
        self
    }

    pub fn edge(mut self, u: impl Into<String>, v: impl Into<String>) -> Self {
        self.edges.push((u.into(), v.into()));
        self
    }

    /// Complete graph on the given vertices.
    pub fn complete<S: AsRef<str>>(id: impl Into<String>, vertices: &[S]) -> Self {
        let mut g = GraphSpec::new(id);
        for (i, u) in vertices.iter().enumerate() {
            g.vertices.push(u.as_ref().to_string());
            for v in &vertices[i + 1..] {
                g.edges.push((u.as_ref().to_string(), v.as_ref().to_string()));
            }
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberGraph {
    pub id: String,
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    /// Sorted edges with `u < v`.
    pub edges: Vec<(usize, usize)>,
}

/// A family of member graphs `G_1..G_m` together with their union.
#[derive(Clone, Debug)]
pub struct UnionInstance {
    c_bound: usize,
    vertex_ids: Vec<String>,
    graphs: Vec<MemberGraph>,
    membership: Vec<Vec<usize>>,
    member_nbrs: Vec<Vec<(usize, Vec<usize>)>>,
    union_nbrs: Vec<Vec<usize>>,
    edge_graph: HashMap<(usize, usize), usize>,
}

fn edge_key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl UnionInstance {
    /// Builds an instance, rejecting self-loops, repeated edges and edges
    /// leaving their member graph. Near-disjointness and the membership bound
    /// are checked by [`UnionInstance::validate`].
    pub fn new(c_bound: usize, specs: Vec<GraphSpec>) -> Result<Self> {
        let mut specs = specs;
        specs.sort_by(|a, b| a.id.cmp(&b.id));
        for w in specs.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::DuplicateGraph(w[0].id.clone()));
            }
        }
        let ids: BTreeSet<&str> =
            specs.iter().flat_map(|g| g.vertices.iter().map(String::as_str)).collect();
        let vertex_ids: Vec<String> = ids.into_iter().map(str::to_string).collect();
        let index: HashMap<&str, usize> =
            vertex_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

        let mut graphs = Vec::with_capacity(specs.len());
        for spec in &specs {
            let mut vertices: Vec<usize> = spec.vertices.iter().map(|v| index[v.as_str()]).collect();
            vertices.sort_unstable();
            for w in vertices.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::DuplicateVertex {
                        graph: spec.id.clone(),
                        vertex: vertex_ids[w[0]].clone(),
                    });
                }
            }
            let mut edges = Vec::with_capacity(spec.edges.len());
            for (u, v) in &spec.edges {
                let foreign = || Error::ForeignEndpoint {
                    graph: spec.id.clone(),
                    u: u.clone(),
                    v: v.clone(),
                };
                let ui = *index.get(u.as_str()).ok_or_else(foreign)?;
                let vi = *index.get(v.as_str()).ok_or_else(foreign)?;
                if vertices.binary_search(&ui).is_err() || vertices.binary_search(&vi).is_err() {
                    return Err(foreign());
                }
                if ui == vi {
                    return Err(Error::SelfLoop { graph: spec.id.clone(), vertex: u.clone() });
                }
                edges.push(edge_key(ui, vi));
            }
            edges.sort_unstable();
            for w in edges.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::MultiEdge {
                        graph: spec.id.clone(),
                        u: vertex_ids[w[0].0].clone(),
                        v: vertex_ids[w[0].1].clone(),
                    });
                }
            }
            graphs.push(MemberGraph { id: spec.id.clone(), vertices, edges });
        }
        Ok(Self::assemble(c_bound, vertex_ids, graphs))
    }

    /// Assembles derived tables from already-indexed parts. `vertex_ids` must
    /// be sorted and every graph must reference valid, sorted indices.
    pub(crate) fn assemble(c_bound: usize, vertex_ids: Vec<String>, graphs: Vec<MemberGraph>) -> Self {
        let n = vertex_ids.len();
        let mut membership = vec![Vec::new(); n];
        let mut member_nbrs: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); n];
        let mut union_nbrs = vec![Vec::new(); n];
        let mut edge_graph = HashMap::new();
        for (gi, g) in graphs.iter().enumerate() {
            for &v in &g.vertices {
                membership[v].push(gi);
                member_nbrs[v].push((gi, Vec::new()));
            }
            for &(u, v) in &g.edges {
                edge_graph.entry((u, v)).or_insert(gi);
                union_nbrs[u].push(v);
                union_nbrs[v].push(u);
                for (a, b) in [(u, v), (v, u)] {
                    let slot = member_nbrs[a].iter_mut().find(|(g2, _)| *g2 == gi).unwrap();
                    slot.1.push(b);
                }
            }
        }
        for v in 0..n {
            union_nbrs[v].sort_unstable();
            union_nbrs[v].dedup();
            for (_, nb) in member_nbrs[v].iter_mut() {
                nb.sort_unstable();
            }
        }
        UnionInstance { c_bound, vertex_ids, graphs, membership, member_nbrs, union_nbrs, edge_graph }
    }

    pub fn c_bound(&self) -> usize {
        self.c_bound
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn num_graphs(&self) -> usize {
        self.graphs.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertex_ids
            .binary_search_by(|s| s.as_str().cmp(id))
            .map_err(|_| Error::UnknownVertex(id.to_string()))
    }

    pub fn graph_index(&self, id: &str) -> Result<usize> {
        self.graphs
            .binary_search_by(|g| g.id.as_str().cmp(id))
            .map_err(|_| Error::UnknownGraph(id.to_string()))
    }

    pub fn graphs(&self) -> &[MemberGraph] {
        &self.graphs
    }

    pub fn graph(&self, gi: usize) -> &MemberGraph {
        &self.graphs[gi]
    }

    /// Graphs containing `v`, in index order.
    pub fn membership(&self, v: usize) -> &[usize] {
        &self.membership[v]
    }

    /// Neighbours of `v` inside member graph `gi` (empty if `v ∉ G_gi`).
    pub fn member_neighbors(&self, v: usize, gi: usize) -> &[usize] {
        self.member_nbrs[v]
            .iter()
            .find(|(g, _)| *g == gi)
            .map(|(_, nb)| nb.as_slice())
            .unwrap_or(&[])
    }

    /// `(graph, neighbours)` for every member graph containing `v`.
    pub fn member_neighborhoods(&self, v: usize) -> &[(usize, Vec<usize>)] {
        &self.member_nbrs[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.union_nbrs[v]
    }

    pub fn contains(&self, gi: usize, v: usize) -> bool {
        self.membership[v].binary_search(&gi).is_ok()
    }

    /// Member graph holding the union edge `uv`.
    pub fn edge_graph(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_graph.get(&edge_key(u, v)).copied()
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.edge_graph.contains_key(&edge_key(u, v))
    }

    /// Union edges in canonical order.
    pub fn union_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.edge_graph.keys().copied().collect();
        e.sort_unstable();
        e
    }

    pub fn num_union_edges(&self) -> usize {
        self.edge_graph.len()
    }

    pub fn to_specs(&self) -> Vec<GraphSpec> {
        self.graphs
            .iter()
            .map(|g| GraphSpec {
                id: g.id.clone(),
                vertices: g.vertices.iter().map(|&v| self.vertex_ids[v].clone()).collect(),
                edges: g
                    .edges
                    .iter()
                    .map(|&(u, v)| (self.vertex_ids[u].clone(), self.vertex_ids[v].clone()))
                    .collect(),
            })
            .collect()
    }

    /// Checks near-disjointness, then the membership bound.
    pub fn validate(&self) -> ValidationReport {
        let mut shared: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (v, gs) in self.membership.iter().enumerate() {
            for (a, &gi) in gs.iter().enumerate() {
                for &gj in &gs[a + 1..] {
                    shared.entry((gi, gj)).or_default().push(v);
                }
            }
        }
        if let Some(((gi, gj), vs)) = shared.iter().find(|(_, vs)| vs.len() >= 2) {
            return ValidationReport::SharedVertices {
                graphs: (self.graphs[*gi].id.clone(), self.graphs[*gj].id.clone()),
                vertices: (self.vertex_ids[vs[0]].clone(), self.vertex_ids[vs[1]].clone()),
            };
        }
        for (v, gs) in self.membership.iter().enumerate() {
            if gs.is_empty() || gs.len() > self.c_bound {
                return ValidationReport::MembershipBound {
                    vertex: self.vertex_ids[v].clone(),
                    count: gs.len(),
                    bound: self.c_bound,
                };
            }
        }
        ValidationReport::Pass
    }

    /// Union of all member graphs as plain adjacency.
    pub fn build_union_graph(&self) -> UnionGraph {
        UnionGraph { vertex_ids: self.vertex_ids.clone(), adjacency: self.union_nbrs.clone() }
    }

    /// Adds singleton member graphs until every vertex lies in exactly
    /// `c_bound` graphs. Singleton ids are `"{vertex}#pad{k}"`.
    pub fn pad_membership(&self) -> UnionInstance {
        let mut graphs = self.graphs.clone();
        let taken: BTreeSet<&str> = self.graphs.iter().map(|g| g.id.as_str()).collect();
        for (v, gs) in self.membership.iter().enumerate() {
            let mut k = 0;
            for _ in gs.len()..self.c_bound {
                let id = loop {
                    let cand = format!("{}#pad{}", self.vertex_ids[v], k);
                    k += 1;
                    if !taken.contains(cand.as_str()) {
                        break cand;
                    }
                };
                graphs.push(MemberGraph { id, vertices: vec![v], edges: Vec::new() });
            }
        }
        graphs.sort_by(|a, b| a.id.cmp(&b.id));
        Self::assemble(self.c_bound, self.vertex_ids.clone(), graphs)
    }

    /// Drops edges on which no pair of colors can conflict.
    pub fn prune_edges(&self, asg: &Assignment, mode: Mode) -> UnionInstance {
        let graphs = self
            .graphs
            .iter()
            .map(|g| MemberGraph {
                id: g.id.clone(),
                vertices: g.vertices.clone(),
                edges: g
                    .edges
                    .iter()
                    .copied()
                    .filter(|&(u, v)| asg.lists[u].iter().any(|&c| asg.partner(mode, u, v, c).is_some()))
                    .collect(),
            })
            .collect();
        Self::assemble(self.c_bound, self.vertex_ids.clone(), graphs)
    }

    /// The instance `G - X` over the vertices with `keep[v]`, plus the map
    /// from new indices to old ones. Member graphs keep their ids, even when
    /// they become empty.
    pub fn induced(&self, keep: &[bool]) -> (UnionInstance, Vec<usize>) {
        let old_of: Vec<usize> = (0..self.num_vertices()).filter(|&v| keep[v]).collect();
        let mut new_of = vec![usize::MAX; self.num_vertices()];
        for (i, &v) in old_of.iter().enumerate() {
            new_of[v] = i;
        }
        let graphs = self
            .graphs
            .iter()
            .map(|g| MemberGraph {
                id: g.id.clone(),
                vertices: g.vertices.iter().filter(|&&v| keep[v]).map(|&v| new_of[v]).collect(),
                edges: g
                    .edges
                    .iter()
                    .filter(|&&(u, v)| keep[u] && keep[v])
                    .map(|&(u, v)| (new_of[u], new_of[v]))
                    .collect(),
            })
            .collect();
        let ids = old_of.iter().map(|&v| self.vertex_ids[v].clone()).collect();
        (Self::assemble(self.c_bound, ids, graphs), old_of)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ValidationReport {
    Pass,
    /// Two member graphs share at least two vertices.
    SharedVertices { graphs: (String, String), vertices: (String, String) },
    /// A vertex lies in no graph or in more than `bound` graphs.
    MembershipBound { vertex: String, count: usize, bound: usize },
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, ValidationReport::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionGraph {
    pub vertex_ids: Vec<String>,
    pub adjacency: Vec<Vec<usize>>,
}

impl UnionGraph {
    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }
}

/// Per-vertex lists, plus per-edge matchings read in DP mode.
///
/// Lists are kept sorted and duplicate-free. Matching pairs whose colors have
/// left the lists are dropped, so every stored pair is live.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    lists: Vec<Vec<Color>>,
    /// Keyed by `(u, v)` with `u < v`; pairs are `(color at u, color at v)`.
    matchings: BTreeMap<(usize, usize), Vec<(Color, Color)>>,
    partner_index: HashMap<(usize, usize, Color), Color>,
}

impl Assignment {
    /// A list assignment with no matchings (every matching empty in DP mode).
    pub fn new(inst: &UnionInstance, lists: Vec<Vec<Color>>) -> Result<Self> {
        Self::with_matchings(inst, lists, BTreeMap::new())
    }

    pub fn with_matchings(
        inst: &UnionInstance,
        lists: Vec<Vec<Color>>,
        matchings: BTreeMap<(usize, usize), Vec<(Color, Color)>>,
    ) -> Result<Self> {
        if lists.len() != inst.num_vertices() {
            let missing = inst.vertex_ids().get(lists.len()).cloned().unwrap_or_default();
            return Err(Error::MissingList(missing));
        }
        let mut sorted = Vec::with_capacity(lists.len());
        for (v, mut l) in lists.into_iter().enumerate() {
            l.sort_unstable();
            if let Some(w) = l.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateColor { vertex: inst.vertex_id(v).to_string(), color: w[0] });
            }
            sorted.push(l);
        }
        let mut canon = BTreeMap::new();
        for ((u, v), pairs) in matchings {
            let (a, b, flip) = if u < v { (u, v, false) } else { (v, u, true) };
            if !inst.is_edge(a, b) {
                return Err(Error::NotAnEdge {
                    u: inst.vertex_id(a).to_string(),
                    v: inst.vertex_id(b).to_string(),
                });
            }
            let mut ps: Vec<(Color, Color)> =
                pairs.into_iter().map(|(x, y)| if flip { (y, x) } else { (x, y) }).collect();
            ps.sort_unstable();
            let bad = |detail: String| Error::NotAMatching {
                u: inst.vertex_id(a).to_string(),
                v: inst.vertex_id(b).to_string(),
                detail,
            };
            let mut left = BTreeSet::new();
            let mut right = BTreeSet::new();
            for &(x, y) in &ps {
                if sorted[a].binary_search(&x).is_err() {
                    return Err(bad(format!("color {x} not in the list of `{}`", inst.vertex_id(a))));
                }
                if sorted[b].binary_search(&y).is_err() {
                    return Err(bad(format!("color {y} not in the list of `{}`", inst.vertex_id(b))));
                }
                if !left.insert(x) || !right.insert(y) {
                    return Err(bad(format!("pair ({x}, {y}) reuses a color")));
                }
            }
            if canon.insert((a, b), ps).is_some() {
                return Err(bad("edge given twice".into()));
            }
        }
        Ok(Self::from_parts(sorted, canon))
    }

    fn from_parts(lists: Vec<Vec<Color>>, matchings: BTreeMap<(usize, usize), Vec<(Color, Color)>>) -> Self {
        let mut partner_index = HashMap::new();
        for (&(u, v), ps) in &matchings {
            for &(x, y) in ps {
                partner_index.insert((u, v, x), y);
                partner_index.insert((v, u, y), x);
            }
        }
        Assignment { lists, matchings, partner_index }
    }

    /// Correspondence assignment with `M(uv) = {(c, c) : c ∈ L(u) ∩ L(v)}`
    /// on every union edge; under it DP mode coincides with list mode.
    pub fn identity_matchings(inst: &UnionInstance, lists: Vec<Vec<Color>>) -> Result<Self> {
        let plain = Self::new(inst, lists)?;
        let mut m = BTreeMap::new();
        for (u, v) in inst.union_edges() {
            let common: Vec<(Color, Color)> =
                plain.lists[u].iter().filter(|c| plain.has_color(v, **c)).map(|&c| (c, c)).collect();
            m.insert((u, v), common);
        }
        Ok(Self::from_parts(plain.lists, m))
    }

    /// Uniform lists `{first, .., first + size - 1}` everywhere.
    pub fn uniform(inst: &UnionInstance, first: Color, size: usize) -> Self {
        let list: Vec<Color> = (0..size as Color).map(|c| first + c).collect();
        Self::from_parts(vec![list; inst.num_vertices()], BTreeMap::new())
    }

    pub fn list(&self, v: usize) -> &[Color] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn matchings(&self) -> &BTreeMap<(usize, usize), Vec<(Color, Color)>> {
        &self.matchings
    }

    pub fn has_color(&self, v: usize, c: Color) -> bool {
        self.lists[v].binary_search(&c).is_ok()
    }

    /// The color at `to` that conflicts with `from` holding `c`, if any.
    /// Under `List` that is `c` itself when `c ∈ L(to)`; under `Dp` it is the
    /// partner of `c` in `M(from to)`.
    #[inline]
    pub fn partner(&self, mode: Mode, from: usize, to: usize, c: Color) -> Option<Color> {
        match mode {
            Mode::List => self.has_color(to, c).then_some(c),
            Mode::Dp => self.partner_index.get(&(from, to, c)).copied(),
        }
    }

    /// Replaces the lists (each new list must be a subset of the old one) and
    /// drops matching pairs that lost a color.
    pub fn with_lists(&self, lists: Vec<Vec<Color>>) -> Assignment {
        let lists: Vec<Vec<Color>> = lists
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        let matchings = self
            .matchings
            .iter()
            .map(|(&(u, v), ps)| {
                let kept = ps
                    .iter()
                    .copied()
                    .filter(|&(x, y)| lists[u].binary_search(&x).is_ok() && lists[v].binary_search(&y).is_ok())
                    .collect();
                ((u, v), kept)
            })
            .collect();
        Self::from_parts(lists, matchings)
    }

    /// Assignment for a sub-instance produced by [`UnionInstance::induced`].
    pub fn restrict(&self, old_of: &[usize]) -> Assignment {
        let mut new_of = HashMap::with_capacity(old_of.len());
        for (i, &v) in old_of.iter().enumerate() {
            new_of.insert(v, i);
        }
        let lists = old_of.iter().map(|&v| self.lists[v].clone()).collect();
        let matchings = self
            .matchings
            .iter()
            .filter_map(|(&(u, v), ps)| {
                let (a, b) = (*new_of.get(&u)?, *new_of.get(&v)?);
                Some(((a, b), ps.clone()))
            })
            .collect();
        Self::from_parts(lists, matchings)
    }

    /// Largest color id in use, if any.
    pub fn max_color(&self) -> Option<Color> {
        self.lists.iter().filter_map(|l| l.last().copied()).max()
    }
}

/// Color degree of `(v, c)` inside member graph `gi`.
pub fn color_degree(
    inst: &UnionInstance,
    asg: &Assignment,
    mode: Mode,
    gi: usize,
    v: usize,
    c: Color,
) -> Result<usize> {
    if gi >= inst.num_graphs() {
        return Err(Error::UnknownGraph(gi.to_string()));
    }
    if v >= inst.num_vertices() {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    if !inst.contains(gi, v) {
        return Err(Error::NotInGraph {
            vertex: inst.vertex_id(v).to_string(),
            graph: inst.graph(gi).id.clone(),
        });
    }
    if !asg.has_color(v, c) {
        return Err(Error::ColorNotInList { vertex: inst.vertex_id(v).to_string(), color: c });
    }
    Ok(color_degree_unchecked(inst, asg, mode, gi, v, c))
}

#[inline]
pub(crate) fn color_degree_unchecked(
    inst: &UnionInstance,
    asg: &Assignment,
    mode: Mode,
    gi: usize,
    v: usize,
    c: Color,
) -> usize {
    inst.member_neighbors(v, gi).iter().filter(|&&u| asg.partner(mode, v, u, c).is_some()).count()
}

/// `Δ(G_gi, L|_{V(G_gi)})`; zero for an edgeless graph.
pub fn max_color_degree(inst: &UnionInstance, asg: &Assignment, mode: Mode, gi: usize) -> usize {
    inst.graph(gi)
        .vertices
        .iter()
        .flat_map(|&v| asg.list(v).iter().map(move |&c| color_degree_unchecked(inst, asg, mode, gi, v, c)))
        .max()
        .unwrap_or(0)
}

/// `max_i Δ(G_i, L|_{V(G_i)})` over all member graphs.
pub fn max_member_color_degree(inst: &UnionInstance, asg: &Assignment, mode: Mode) -> usize {
    (0..inst.num_graphs()).map(|gi| max_color_degree(inst, asg, mode, gi)).max().unwrap_or(0)
}

/// `Δ(G, L)` of the union graph.
pub fn union_max_color_degree(inst: &UnionInstance, asg: &Assignment, mode: Mode) -> usize {
    (0..inst.num_vertices())
        .flat_map(|v| {
            asg.list(v)
                .iter()
                .map(move |&c| inst.neighbors(v).iter().filter(|&&u| asg.partner(mode, v, u, c).is_some()).count())
        })
        .max()
        .unwrap_or(0)
}

/// A partial coloring indexed by vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialColoring {
    colors: Vec<Option<Color>>,
}

impl PartialColoring {
    pub fn empty(n: usize) -> Self {
        PartialColoring { colors: vec![None; n] }
    }

    pub fn from_vec(colors: Vec<Option<Color>>) -> Self {
        PartialColoring { colors }
    }

    pub fn get(&self, v: usize) -> Option<Color> {
        self.colors.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: usize, c: Color) {
        self.colors[v] = Some(c);
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colored(&self) -> impl Iterator<Item = (usize, Color)> + '_ {
        self.colors.iter().enumerate().filter_map(|(v, c)| c.map(|c| (v, c)))
    }

    pub fn num_colored(&self) -> usize {
        self.colors.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    pub fn as_slice(&self) -> &[Option<Color>] {
        &self.colors
    }

    /// `vertex id -> color` for the colored vertices.
    pub fn to_map(&self, inst: &UnionInstance) -> BTreeMap<String, Color> {
        self.colored().map(|(v, c)| (inst.vertex_id(v).to_string(), c)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum VerifyReport {
    Pass,
    ColorNotInList { vertex: String, color: Color },
    Conflict { u: String, v: String, color_u: Color, color_v: Color },
}

impl VerifyReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, VerifyReport::Pass)
    }
}

/// Checks that `coloring` respects the lists and has no conflicting edge.
pub fn verify_coloring(inst: &UnionInstance, asg: &Assignment, coloring: &PartialColoring, mode: Mode) -> VerifyReport {
    for (v, c) in coloring.colored() {
        if !asg.has_color(v, c) {
            return VerifyReport::ColorNotInList { vertex: inst.vertex_id(v).to_string(), color: c };
        }
    }
    for (u, v) in inst.union_edges() {
        if let (Some(cu), Some(cv)) = (coloring.get(u), coloring.get(v)) {
            if asg.partner(mode, u, v, cu) == Some(cv) {
                return VerifyReport::Conflict {
                    u: inst.vertex_id(u).to_string(),
                    v: inst.vertex_id(v).to_string(),
                    color_u: cu,
                    color_v: cv,
                };
            }
        }
    }
    VerifyReport::Pass
}
