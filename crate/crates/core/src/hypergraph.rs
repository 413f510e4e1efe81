//! Hypergraphs with string vertex ids, linearity checks and edge-coloring
//! verification.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::HypergraphDoc;
use crate::instance::Color;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypergraph {
    vertices: Vec<String>,
    /// Each edge is a sorted list of vertex indices.
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Edges may list vertices in any order; they must be nonempty and
    /// repetition-free.
    pub fn new(vertices: Vec<String>, edges: Vec<Vec<String>>) -> Result<Self> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::Format(format!("vertex `{v}` listed twice")));
            }
        }
        let mut out = Vec::with_capacity(edges.len());
        for (ei, e) in edges.into_iter().enumerate() {
            if e.is_empty() {
                return Err(Error::Format(format!("edge {ei} is empty")));
            }
            let mut idx = e
                .iter()
                .map(|v| index.get(v).copied().ok_or_else(|| Error::UnknownVertex(v.clone())))
                .collect::<Result<Vec<_>>>()?;
            idx.sort_unstable();
            if idx.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Format(format!("edge {ei} repeats a vertex")));
            }
            out.push(idx);
        }
        Ok(Hypergraph { vertices, edges: out })
    }

    pub fn from_indices(num_vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let vertices = (0..num_vertices).map(|i| format!("x{i}")).collect();
        let edges = edges.into_iter().map(|e| e.into_iter().map(|i| format!("x{i}")).collect()).collect();
        Self::new(vertices, edges)
    }

    pub fn from_doc(doc: &HypergraphDoc) -> Result<Self> {
        Self::new(doc.vertices.clone(), doc.edges.clone())
    }

    pub fn to_doc(&self) -> HypergraphDoc {
        HypergraphDoc {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|e| e.iter().map(|&v| self.vertices[v].clone()).collect()).collect(),
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Largest edge size.
    pub fn rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Edge indices through each vertex, ascending.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (ei, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v].push(ei);
            }
        }
        inc
    }

    /// Fails with the first pair of edges sharing two or more vertices.
    pub fn check_linear(&self) -> Result<()> {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (ei, e) in self.edges.iter().enumerate() {
            for (a, &x) in e.iter().enumerate() {
                for &y in &e[a + 1..] {
                    if let Some(&prev) = seen.get(&(x, y)) {
                        return Err(Error::NotLinear(prev, ei));
                    }
                    seen.insert((x, y), ei);
                }
            }
        }
        Ok(())
    }

    /// First pair of intersecting edges with the same color, if any.
    pub fn edge_coloring_conflict(&self, colors: &[Color]) -> Option<(usize, usize)> {
        let mut first: BTreeMap<(usize, Color), usize> = BTreeMap::new();
        for (ei, e) in self.edges.iter().enumerate() {
            for &v in e {
                if let Some(&prev) = first.get(&(v, colors[ei])) {
                    return Some((prev, ei));
                }
                first.insert((v, colors[ei]), ei);
            }
        }
        None
    }
}
