//! Completing a coloring once every list dominates the color degree.
//!
//! The main path draws a uniform color per vertex and repeatedly recolors the
//! endpoints of conflicting edges. If that does not converge within the pass
//! budget, an exact fail-first backtracking search takes over.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{union_max_color_degree, Assignment, Color, Mode, PartialColoring, UnionInstance};
use crate::rng::stream_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fallback {
    None,
    Backtracking,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FinisherConfig {
    /// Required ratio `min |L(v)| / Δ(G, L)`.
    pub factor_required: f64,
    pub max_resample_passes: usize,
    /// Stop resampling after this many passes without a new minimum conflict count.
    pub stall_passes: usize,
    pub fallback: Fallback,
    /// Skip the ratio precondition.
    pub force: bool,
    /// Search-node budget of the backtracking fallback.
    pub node_budget: u64,
}

impl Default for FinisherConfig {
    fn default() -> Self {
        FinisherConfig {
            factor_required: 8.0,
            max_resample_passes: 1000,
            stall_passes: 200,
            fallback: Fallback::Backtracking,
            force: false,
            node_budget: 10_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FinishStatus {
    /// Resampling reached a conflict-free coloring.
    Resampled,
    /// The backtracking fallback found a coloring.
    Backtracked,
    /// Backtracking proved that no coloring exists.
    Uncolorable,
    /// Resampling and the fallback ran out of budget.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FinishReport {
    pub status: FinishStatus,
    /// Total on success.
    pub coloring: Option<PartialColoring>,
    /// Conflicting edges before each pass; the last entry is the final count.
    pub conflicts_per_pass: Vec<usize>,
    /// How many passes recolored each vertex (only vertices recolored at least once).
    pub conflict_histogram: BTreeMap<String, usize>,
    pub backtrack_nodes: u64,
    /// `min |L(v)| / Δ(G, L)`; infinite when `Δ = 0`.
    pub ratio: f64,
}

impl FinishReport {
    pub fn succeeded(&self) -> bool {
        matches!(self.status, FinishStatus::Resampled | FinishStatus::Backtracked)
    }
}

/// Edges `(u, v)` whose colors in `psi` conflict, in canonical order.
pub fn conflicts(inst: &UnionInstance, asg: &Assignment, mode: Mode, psi: &[Color]) -> Vec<(usize, usize)> {
    inst.union_edges()
        .into_iter()
        .filter(|&(u, v)| asg.partner(mode, u, v, psi[u]) == Some(psi[v]))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResamplePass {
    pub psi: Vec<Color>,
    /// Conflicting edges of the input coloring.
    pub conflicts: usize,
    /// Vertices that received a fresh color, ascending.
    pub resampled: Vec<usize>,
}

/// Gives every endpoint of a conflicting edge a fresh uniform color; the rest
/// of `psi` is unchanged.
pub fn resample_pass(inst: &UnionInstance, asg: &Assignment, mode: Mode, psi: &[Color], seed: u64) -> ResamplePass {
    resample_with(inst, asg, mode, psi, &mut stream_rng(seed, 0))
}

fn resample_with<R: Rng>(inst: &UnionInstance, asg: &Assignment, mode: Mode, psi: &[Color], rng: &mut R) -> ResamplePass {
    let bad = conflicts(inst, asg, mode, psi);
    let mut hit = vec![false; psi.len()];
    for &(u, v) in &bad {
        hit[u] = true;
        hit[v] = true;
    }
    let mut out = psi.to_vec();
    let mut resampled = Vec::new();
    for v in 0..psi.len() {
        if hit[v] {
            let l = asg.list(v);
            out[v] = l[rng.gen_range(0..l.len())];
            resampled.push(v);
        }
    }
    ResamplePass { psi: out, conflicts: bad.len(), resampled }
}

/// `min |L(v)| / Δ(G, L)`.
pub fn list_ratio(inst: &UnionInstance, asg: &Assignment, mode: Mode) -> f64 {
    let delta = union_max_color_degree(inst, asg, mode);
    let min_list = (0..inst.num_vertices()).map(|v| asg.list(v).len()).min().unwrap_or(0);
    if delta == 0 {
        f64::INFINITY
    } else {
        min_list as f64 / delta as f64
    }
}

/// Colors every vertex of `inst` from its list.
pub fn finish(
    inst: &UnionInstance,
    asg: &Assignment,
    mode: Mode,
    config: &FinisherConfig,
    seed: u64,
) -> Result<FinishReport> {
    if config.factor_required <= 1.0 {
        return Err(Error::Domain(format!("factor_required {} must exceed 1", config.factor_required)));
    }
    for v in 0..inst.num_vertices() {
        if asg.list(v).is_empty() {
            return Err(Error::EmptyList(inst.vertex_id(v).to_string()));
        }
    }
    let ratio = list_ratio(inst, asg, mode);
    if !config.force && ratio < config.factor_required {
        return Err(Error::Precondition(format!(
            "min |L(v)| / Δ(G, L) = {ratio:.3} is below the required factor {}",
            config.factor_required
        )));
    }

    let mut rng = stream_rng(seed, 0);
    let mut psi: Vec<Color> = (0..inst.num_vertices())
        .map(|v| {
            let l = asg.list(v);
            l[rng.gen_range(0..l.len())]
        })
        .collect();
    let mut counts = Vec::new();
    let mut hist: BTreeMap<String, usize> = BTreeMap::new();
    let (mut best, mut since_best) = (usize::MAX, 0);
    for pass in 0..=config.max_resample_passes {
        if pass == config.max_resample_passes || since_best > config.stall_passes {
            counts.push(conflicts(inst, asg, mode, &psi).len());
            break;
        }
        let step = resample_with(inst, asg, mode, &psi, &mut rng);
        counts.push(step.conflicts);
        if step.conflicts < best {
            (best, since_best) = (step.conflicts, 0);
        } else {
            since_best += 1;
        }
        if step.conflicts == 0 {
            let coloring = PartialColoring::from_vec(psi.into_iter().map(Some).collect());
            return Ok(FinishReport {
                status: FinishStatus::Resampled,
                coloring: Some(coloring),
                conflicts_per_pass: counts,
                conflict_histogram: hist,
                backtrack_nodes: 0,
                ratio,
            });
        }
        for v in step.resampled {
            *hist.entry(inst.vertex_id(v).to_string()).or_default() += 1;
        }
        psi = step.psi;
    }

    let (status, coloring, nodes) = match config.fallback {
        Fallback::None => (FinishStatus::Exhausted, None, 0),
        Fallback::Backtracking => match backtrack(inst, asg, mode, config.node_budget) {
            Search::Found(c, n) => (FinishStatus::Backtracked, Some(c), n),
            Search::Refuted(n) => (FinishStatus::Uncolorable, None, n),
            Search::OutOfBudget(n) => (FinishStatus::Exhausted, None, n),
        },
    };
    Ok(FinishReport { status, coloring, conflicts_per_pass: counts, conflict_histogram: hist, backtrack_nodes: nodes, ratio })
}

enum Search {
    Found(PartialColoring, u64),
    Refuted(u64),
    OutOfBudget(u64),
}

struct Backtracker<'a> {
    inst: &'a UnionInstance,
    asg: &'a Assignment,
    mode: Mode,
    /// `blocked[v][k]`: colored neighbours forbidding the `k`-th color of `v`.
    blocked: Vec<Vec<u32>>,
    color: Vec<Option<Color>>,
    nodes: u64,
    budget: u64,
}

impl Backtracker<'_> {
    fn available(&self, v: usize) -> usize {
        self.blocked[v].iter().filter(|b| **b == 0).count()
    }

    fn update(&mut self, v: usize, c: Color, delta: i32) {
        for &u in self.inst.neighbors(v) {
            if self.color[u].is_some() {
                continue;
            }
            if let Some(cu) = self.asg.partner(self.mode, v, u, c) {
                if let Ok(k) = self.asg.list(u).binary_search(&cu) {
                    self.blocked[u][k] = self.blocked[u][k].wrapping_add_signed(delta);
                }
            }
        }
    }

    /// `Some(true)` found, `Some(false)` refuted, `None` out of budget.
    fn search(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let pick = (0..self.color.len())
            .filter(|&v| self.color[v].is_none())
            .min_by_key(|&v| (self.available(v), v));
        let Some(v) = pick else { return Some(true) };
        for k in 0..self.asg.list(v).len() {
            if self.blocked[v][k] != 0 {
                continue;
            }
            let c = self.asg.list(v)[k];
            self.update(v, c, 1);
            self.color[v] = Some(c);
            match self.search() {
                Some(false) => {}
                other => return other,
            }
            self.color[v] = None;
            self.update(v, c, -1);
        }
        Some(false)
    }
}

fn backtrack(inst: &UnionInstance, asg: &Assignment, mode: Mode, budget: u64) -> Search {
    let mut bt = Backtracker {
        inst,
        asg,
        mode,
        blocked: (0..inst.num_vertices()).map(|v| vec![0; asg.list(v).len()]).collect(),
        color: vec![None; inst.num_vertices()],
        nodes: 0,
        budget,
    };
    match bt.search() {
        Some(true) => Search::Found(PartialColoring::from_vec(bt.color), bt.nodes),
        Some(false) => Search::Refuted(bt.nodes),
        None => Search::OutOfBudget(bt.nodes),
    }
}
