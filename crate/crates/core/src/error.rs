use thiserror::Error;

use crate::instance::Color;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate graph id `{0}`")]
    DuplicateGraph(String),
    #[error("graph `{graph}` lists vertex `{vertex}` twice")]
    DuplicateVertex { graph: String, vertex: String },
    #[error("graph `{graph}` has an edge `{u}`-`{v}` with an endpoint outside the graph")]
    ForeignEndpoint { graph: String, u: String, v: String },
    #[error("graph `{graph}` has a self-loop at `{vertex}`")]
    SelfLoop { graph: String, vertex: String },
    #[error("graph `{graph}` has a repeated edge `{u}`-`{v}`")]
    MultiEdge { graph: String, u: String, v: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown graph `{0}`")]
    UnknownGraph(String),
    #[error("vertex `{vertex}` is not in graph `{graph}`")]
    NotInGraph { vertex: String, graph: String },
    #[error("color {color} is not in the list of `{vertex}`")]
    ColorNotInList { vertex: String, color: Color },
    #[error("vertex `{0}` has no list")]
    MissingList(String),
    #[error("list of `{vertex}` repeats color {color}")]
    DuplicateColor { vertex: String, color: Color },
    #[error("vertex `{0}` has an empty list")]
    EmptyList(String),
    #[error("`{u}`-`{v}` is not an edge of the union graph")]
    NotAnEdge { u: String, v: String },
    #[error("matching on `{u}`-`{v}` is not a matching: {detail}")]
    NotAMatching { u: String, v: String, detail: String },
    #[error("instance is invalid: {0}")]
    Invalid(String),
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("instance is not normalized ({0}); run the normalizer first")]
    NotNormalized(String),
    #[error("round failed after {attempts} attempts: {reason}")]
    RoundFailed { attempts: usize, reason: String },
    #[error("list of `{vertex}` has {len} colors, more than the target {target}")]
    ListTooLong { vertex: String, len: usize, target: usize },
    #[error("projected size {projected} exceeds the cap {cap}")]
    SizeCap { projected: f64, cap: usize },
    #[error("regularizer for color index {j} at `{vertex}` needs degree {degree} > {max}")]
    RegularizerInfeasible { j: usize, vertex: String, degree: i64, max: usize },
    #[error("enumeration budget exceeded: {size} > {budget}")]
    Budget { size: f64, budget: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("hypergraph is not linear: edges {0} and {1} share at least two vertices")]
    NotLinear(usize, usize),
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
