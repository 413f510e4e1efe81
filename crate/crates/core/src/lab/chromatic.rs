//! Exhaustive list-colorability and chromatic numbers for small instances.
//!
//! Plain backtracking in canonical vertex order with forward checking; it
//! shares no code with the finisher's fallback.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Color, Mode, PartialColoring, UnionInstance};

pub const VERTEX_LIMIT: usize = 16;
pub const PRODUCT_LIMIT: f64 = 1e7;
pub const NODE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Colorability {
    Colorable { coloring: PartialColoring, nodes: u64 },
    NotColorable { nodes: u64 },
}

impl Colorability {
    pub fn is_colorable(&self) -> bool {
        matches!(self, Colorability::Colorable { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChromaticWitness {
    pub chi: usize,
    pub coloring: PartialColoring,
    pub nodes: u64,
}

fn check_size(inst: &UnionInstance, asg: &Assignment) -> Result<()> {
    let product = (0..inst.num_vertices()).fold(1.0, |acc, v| acc * asg.list(v).len() as f64);
    if inst.num_vertices() > VERTEX_LIMIT && product > PRODUCT_LIMIT {
        return Err(Error::Budget { size: product, budget: PRODUCT_LIMIT });
    }
    Ok(())
}

struct Solver<'a> {
    inst: &'a UnionInstance,
    asg: &'a Assignment,
    mode: Mode,
    color: Vec<Option<Color>>,
    nodes: u64,
    budget: u64,
    /// Uniform lists `{1..t}` with color-permutation symmetry broken.
    uniform: bool,
}

impl Solver<'_> {
    fn ok(&self, v: usize, c: Color) -> bool {
        self.inst.neighbors(v).iter().all(|&u| match self.color[u] {
            Some(cu) => self.asg.partner(self.mode, v, u, c) != Some(cu),
            None => true,
        })
    }

    /// Forward check: every uncolored neighbour still has a color left.
    fn neighbours_alive(&self, v: usize) -> bool {
        self.inst.neighbors(v).iter().all(|&u| {
            self.color[u].is_some() || self.asg.list(u).iter().any(|&c| self.ok(u, c))
        })
    }

    fn go(&mut self, v: usize, used: Color) -> Result<bool> {
        if v == self.color.len() {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget { size: self.nodes as f64, budget: self.budget as f64 });
        }
        for idx in 0..self.asg.list(v).len() {
            let c = self.asg.list(v)[idx];
            if self.uniform && c > used + 1 {
                break;
            }
            if !self.ok(v, c) {
                continue;
            }
            self.color[v] = Some(c);
            if self.neighbours_alive(v) && self.go(v + 1, used.max(c))? {
                return Ok(true);
            }
            self.color[v] = None;
        }
        Ok(false)
    }
}

fn solve(inst: &UnionInstance, asg: &Assignment, mode: Mode, uniform: bool, budget: u64) -> Result<Colorability> {
    let mut s = Solver { inst, asg, mode, color: vec![None; inst.num_vertices()], nodes: 0, budget, uniform };
    if s.go(0, 0)? {
        Ok(Colorability::Colorable { coloring: PartialColoring::from_vec(s.color), nodes: s.nodes })
    } else {
        Ok(Colorability::NotColorable { nodes: s.nodes })
    }
}

/// Decides whether `inst` has an `(L[, M])`-coloring.
pub fn exhaustive_list_colorable(inst: &UnionInstance, asg: &Assignment, mode: Mode) -> Result<Colorability> {
    check_size(inst, asg)?;
    solve(inst, asg, mode, false, NODE_BUDGET)
}

/// Chromatic number of the union graph via uniform lists `{1..t}`, binary
/// searched over `1..=Δ+1`; the witness is a `χ`-coloring and `χ - 1` colors
/// are refuted exhaustively.
pub fn chromatic_number(inst: &UnionInstance) -> Result<ChromaticWitness> {
    let n = inst.num_vertices();
    if n == 0 {
        return Ok(ChromaticWitness { chi: 0, coloring: PartialColoring::empty(0), nodes: 0 });
    }
    if n > VERTEX_LIMIT {
        return Err(Error::Budget { size: n as f64, budget: VERTEX_LIMIT as f64 });
    }
    let delta = (0..n).map(|v| inst.neighbors(v).len()).max().unwrap_or(0);
    let mut nodes = 0;
    let mut attempt = |t: usize| -> Result<Option<PartialColoring>> {
        let asg = Assignment::uniform(inst, 1, t);
        match solve(inst, &asg, Mode::List, true, NODE_BUDGET)? {
            Colorability::Colorable { coloring, nodes: k } => {
                nodes += k;
                Ok(Some(coloring))
            }
            Colorability::NotColorable { nodes: k } => {
                nodes += k;
                Ok(None)
            }
        }
    };
    let (mut lo, mut hi) = (1, delta + 1);
    let mut best = attempt(hi)?.expect("Δ + 1 colors always suffice");
    let mut refuted = Vec::new();
    while lo < hi {
        let mid = (lo + hi) / 2;
        match attempt(mid)? {
            Some(c) => {
                hi = mid;
                best = c;
            }
            None => {
                refuted.push(mid);
                lo = mid + 1;
            }
        }
    }
    if hi > 1 && !refuted.contains(&(hi - 1)) && attempt(hi - 1)?.is_some() {
        return Err(Error::Invalid(format!("{} colors suffice below the searched minimum {hi}", hi - 1)));
    }
    Ok(ChromaticWitness { chi: hi, coloring: best, nodes })
}

/// `χ(G_gi)`.
pub fn member_chromatic_number(inst: &UnionInstance, gi: usize) -> Result<ChromaticWitness> {
    let mut keep = vec![false; inst.num_vertices()];
    for &v in &inst.graph(gi).vertices {
        keep[v] = true;
    }
    chromatic_number(&inst.induced(&keep).0)
}
