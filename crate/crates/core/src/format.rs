//! JSON interchange documents for instances, hypergraphs and colorings.
//!
//! Instance document:
//!
//! ```json
//! {"C": 2,
//!  "graphs": [{"id": "g1", "vertices": ["a", "b"], "edges": [["a", "b"]]}],
//!  "lists": {"a": [1, 2], "b": [1, 2]},
//!  "matchings": {"a|b": [[1, 2]]}}
//! ```
//!
//! `matchings` is optional; a key `"u|v"` carries pairs `(color of u, color of v)`.
//! Canonical output sorts every key and array.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Assignment, Color, GraphSpec, PartialColoring, UnionInstance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub id: String,
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    #[serde(rename = "C")]
    pub c_bound: usize,
    pub graphs: Vec<GraphDoc>,
    pub lists: BTreeMap<String, Vec<Color>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matchings: Option<BTreeMap<String, Vec<[Color; 2]>>>,
}

impl InstanceDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance documents always serialize")
    }

    /// Builds the instance and its assignment. Every graph vertex needs a
    /// list and every list must belong to a graph vertex.
    pub fn build(&self) -> Result<(UnionInstance, Assignment)> {
        let specs = self
            .graphs
            .iter()
            .map(|g| GraphSpec {
                id: g.id.clone(),
                vertices: g.vertices.clone(),
                edges: g.edges.iter().map(|[u, v]| (u.clone(), v.clone())).collect(),
            })
            .collect();
        let inst = UnionInstance::new(self.c_bound, specs)?;
        for id in self.lists.keys() {
            inst.vertex_index(id)?;
        }
        let lists = inst
            .vertex_ids()
            .iter()
            .map(|id| self.lists.get(id).cloned().ok_or_else(|| Error::MissingList(id.clone())))
            .collect::<Result<Vec<_>>>()?;
        let asg = match &self.matchings {
            None => Assignment::new(&inst, lists)?,
            Some(ms) => {
                let mut m = BTreeMap::new();
                for (key, pairs) in ms {
                    let (u, v) = key
                        .split_once('|')
                        .ok_or_else(|| Error::Format(format!("matching key `{key}` is not of the form u|v")))?;
                    let (u, v) = (inst.vertex_index(u)?, inst.vertex_index(v)?);
                    m.insert((u, v), pairs.iter().map(|[a, b]| (*a, *b)).collect());
                }
                Assignment::with_matchings(&inst, lists, m)?
            }
        };
        Ok((inst, asg))
    }

    /// Canonical document for an instance; `with_matchings` emits the
    /// correspondence part.
    pub fn from_instance(inst: &UnionInstance, asg: &Assignment, with_matchings: bool) -> Self {
        let graphs = inst
            .graphs()
            .iter()
            .map(|g| GraphDoc {
                id: g.id.clone(),
                vertices: g.vertices.iter().map(|&v| inst.vertex_id(v).to_string()).collect(),
                edges: g
                    .edges
                    .iter()
                    .map(|&(u, v)| [inst.vertex_id(u).to_string(), inst.vertex_id(v).to_string()])
                    .collect(),
            })
            .collect();
        let lists =
            (0..inst.num_vertices()).map(|v| (inst.vertex_id(v).to_string(), asg.list(v).to_vec())).collect();
        let matchings = with_matchings.then(|| {
            asg.matchings()
                .iter()
                .map(|(&(u, v), ps)| {
                    (format!("{}|{}", inst.vertex_id(u), inst.vertex_id(v)), ps.iter().map(|&(a, b)| [a, b]).collect())
                })
                .collect()
        });
        InstanceDoc { c_bound: inst.c_bound(), graphs, lists, matchings }
    }
}

/// Hypergraph document: `{"vertices": [str], "edges": [[str, ...]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringDoc {
    pub coloring: BTreeMap<String, Color>,
}

impl ColoringDoc {
    pub fn new(inst: &UnionInstance, coloring: &PartialColoring) -> Self {
        ColoringDoc { coloring: coloring.to_map(inst) }
    }

    pub fn to_coloring(&self, inst: &UnionInstance) -> Result<PartialColoring> {
        let mut col = PartialColoring::empty(inst.num_vertices());
        for (id, &c) in &self.coloring {
            col.set(inst.vertex_index(id)?, c);
        }
        Ok(col)
    }
}
