//! End-to-end driver: nibble rounds until lists dominate color degrees, then
//! the finisher, with verification at every stage boundary. Also the
//! hypergraph edge-coloring front end.

use std::time::Instant;

use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finisher::{finish, FinishReport, FinisherConfig};
use crate::hypergraph::Hypergraph;
use crate::instance::{
    max_member_color_degree, verify_coloring, Assignment, Color, GraphSpec, Mode, PartialColoring, UnionInstance,
    VerifyReport,
};
use crate::nibble::{nibble_round, NibbleOutcome, RoundMode};
use crate::rng::stream_rng;
use crate::schedule::{build_schedule, NibbleParams, Schedule, StopReason};

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub eps: f64,
    pub round_mode: RoundMode,
    pub mode: Mode,
    pub seed: u64,
    /// Activation probability of practical rounds.
    pub p: f64,
    /// Overrides `1 / ln D` in strict mode.
    pub strict_p: Option<f64>,
    pub round_cap: usize,
    pub max_resamples: usize,
    /// Fresh samples tried before a practical round that breaks the list
    /// hypothesis hands over to the finisher.
    pub round_retries: usize,
    pub finisher: FinisherConfig,
    /// Keep every round's full outcome in the run.
    pub keep_outcomes: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            eps: 0.5,
            round_mode: RoundMode::Practical,
            mode: Mode::List,
            seed: 0,
            p: 0.1,
            strict_p: None,
            round_cap: 200,
            max_resamples: 100,
            round_retries: 10,
            finisher: FinisherConfig::default(),
            keep_outcomes: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundSummary {
    pub index: usize,
    pub round_mode: RoundMode,
    pub p: f64,
    pub uncolored_before: usize,
    pub colored: usize,
    pub min_list_after: usize,
    pub max_member_degree_after: usize,
    pub resamples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Success,
    Failed { stage: String, reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub rounds_ms: f64,
    pub finisher_ms: f64,
    pub verify_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineRun {
    pub status: RunStatus,
    pub mode: Mode,
    pub round_mode: RoundMode,
    pub eps: f64,
    /// `max_i Δ(G_i, L)` of the input.
    pub d: usize,
    pub schedule: Option<Schedule>,
    pub rounds: Vec<RoundSummary>,
    #[serde(skip)]
    pub outcomes: Vec<NibbleOutcome>,
    /// Why strict mode handed over to practical rounds, if it did.
    pub downgrade: Option<String>,
    /// Whether the round cap fired before the handover condition.
    pub capped: bool,
    /// Whether every resample of a practical round broke the list hypothesis.
    pub stalled: bool,
    pub finisher: Option<FinishReport>,
    pub coloring: PartialColoring,
    pub verification: VerifyReport,
    pub timings: Timings,
}

impl PipelineRun {
    pub fn succeeded(&self) -> bool {
        self.status == RunStatus::Success
    }

    /// The run without wall-clock data, for reproducibility comparisons.
    pub fn without_timings(&self) -> PipelineRun {
        PipelineRun { timings: Timings::default(), ..self.clone() }
    }
}

/// Current remainder: the uncolored vertices with their surviving lists.
struct Remainder {
    inst: UnionInstance,
    asg: Assignment,
    /// Remainder index → input index.
    old_of: Vec<usize>,
}

impl Remainder {
    fn min_list(&self) -> usize {
        self.asg.lists().iter().map(Vec::len).min().unwrap_or(0)
    }

    fn max_degree(&self, mode: Mode) -> usize {
        max_member_color_degree(&self.inst, &self.asg, mode)
    }

    /// Handover test: `min |L(v)| ≥ 8C · max_i Δ(G_i, L)`.
    fn ready(&self, mode: Mode) -> bool {
        self.inst.num_vertices() == 0 || self.min_list() >= 8 * self.inst.c_bound() * self.max_degree(mode)
    }

    fn apply(&self, out: &NibbleOutcome, coloring: &mut PartialColoring) -> Remainder {
        for v in out.colored() {
            coloring.set(self.old_of[v], out.sample.tentative[v]);
        }
        let keep: Vec<bool> = out.in_x.iter().map(|x| !x).collect();
        let asg = self.asg.with_lists(out.new_lists.clone());
        let (inst, sub) = self.inst.induced(&keep);
        let asg = asg.restrict(&sub);
        let old_of = sub.iter().map(|&v| self.old_of[v]).collect();
        Remainder { inst, asg, old_of }
    }
}

/// A practical round is accepted when the uncolored remainder still has
/// `min |L'(v)| ≥ (1 + ε) max_i Δ(G_i, L')` and no empty list.
fn keeps_hypothesis(rem: &Remainder, out: &NibbleOutcome, mode: Mode, eps: f64) -> bool {
    let mut scratch = PartialColoring::empty(rem.old_of.iter().max().map_or(0, |m| m + 1));
    let next = rem.apply(out, &mut scratch);
    let min = next.min_list();
    next.inst.num_vertices() == 0 || (min > 0 && min as f64 >= (1.0 + eps) * next.max_degree(mode) as f64)
}

/// Every surviving list avoids the colors its colored neighbours conflict with.
fn check_contract(inst: &UnionInstance, asg: &Assignment, mode: Mode, rem: &Remainder, coloring: &PartialColoring) -> Result<()> {
    for (i, &v) in rem.old_of.iter().enumerate() {
        for &u in inst.neighbors(v) {
            if let Some(cu) = coloring.get(u) {
                if let Some(cv) = asg.partner(mode, u, v, cu) {
                    if rem.asg.has_color(i, cv) {
                        return Err(Error::Invalid(format!(
                            "list of `{}` still holds {cv}, which conflicts with `{}` colored {cu}",
                            inst.vertex_id(v),
                            inst.vertex_id(u)
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks the hypotheses: a valid instance and `|L(v)| ≥ (1 + ε) D` with
/// `D = max_i Δ(G_i, L)`. Returns `D`.
pub fn check_hypotheses(inst: &UnionInstance, asg: &Assignment, mode: Mode, eps: f64) -> Result<usize> {
    let report = inst.validate();
    if !report.is_pass() {
        return Err(Error::Invalid(format!("{report:?}")));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    let d = max_member_color_degree(inst, asg, mode);
    for v in 0..inst.num_vertices() {
        let len = asg.list(v).len();
        if (len as f64) < (1.0 + eps) * d as f64 {
            return Err(Error::Precondition(format!(
                "list of `{}` has {len} colors, fewer than (1 + {eps}) * {d}",
                inst.vertex_id(v)
            )));
        }
    }
    Ok(d)
}

pub fn run_pipeline(inst: &UnionInstance, asg: &Assignment, config: &PipelineConfig) -> Result<PipelineRun> {
    let mode = config.mode;
    let d = check_hypotheses(inst, asg, mode, config.eps)?;
    let mut master = stream_rng(config.seed, 1 << 32);
    let mut coloring = PartialColoring::empty(inst.num_vertices());
    let mut rem = Remainder { inst: inst.clone(), asg: asg.clone(), old_of: (0..inst.num_vertices()).collect() };
    let mut run = PipelineRun {
        status: RunStatus::Success,
        mode,
        round_mode: config.round_mode,
        eps: config.eps,
        d,
        schedule: None,
        rounds: Vec::new(),
        outcomes: Vec::new(),
        downgrade: None,
        capped: false,
        stalled: false,
        finisher: None,
        coloring: PartialColoring::empty(0),
        verification: VerifyReport::Pass,
        timings: Timings::default(),
    };
    let mut verify_time = 0.0;
    let started = Instant::now();

    let record = |run: &mut PipelineRun, rem: &Remainder, out: NibbleOutcome, round_mode: RoundMode, p: f64, next: &Remainder| {
        run.rounds.push(RoundSummary {
            index: run.rounds.len(),
            round_mode,
            p,
            uncolored_before: rem.inst.num_vertices(),
            colored: out.num_colored(),
            min_list_after: next.min_list(),
            max_member_degree_after: next.max_degree(mode),
            resamples: out.resample_count,
        });
        if config.keep_outcomes {
            run.outcomes.push(out);
        }
    };
    let boundary = |rem: &Remainder, coloring: &PartialColoring, verify_time: &mut f64| -> Result<()> {
        let t = Instant::now();
        let rep = verify_coloring(inst, asg, coloring, mode);
        if !rep.is_pass() {
            return Err(Error::Invalid(format!("partial coloring is not proper: {rep:?}")));
        }
        check_contract(inst, asg, mode, rem, coloring)?;
        *verify_time += t.elapsed().as_secs_f64() * 1e3;
        Ok(())
    };

    if config.round_mode == RoundMode::Strict && d > 0 && !rem.ready(mode) {
        let schedule = build_schedule(d as f64, config.eps, inst.c_bound(), config.strict_p)?;
        let target = schedule.rows[0].lambda.ceil() as usize;
        let lists = rem.asg.lists().iter().map(|l| l[..target.min(l.len())].to_vec()).collect();
        rem.asg = rem.asg.with_lists(lists);
        let usable = match schedule.stop {
            StopReason::Threshold => schedule.i_star.unwrap_or(0),
            _ => schedule.rows.len().saturating_sub(2),
        };
        for i in 0..usable {
            let params = schedule.row_params(i)?;
            let seed = master.next_u64();
            match nibble_round(&rem.inst, &rem.asg, mode, &params, RoundMode::Strict, seed, config.max_resamples) {
                Ok(out) => {
                    let next = rem.apply(&out, &mut coloring);
                    record(&mut run, &rem, out, RoundMode::Strict, params.p, &next);
                    rem = next;
                    boundary(&rem, &coloring, &mut verify_time)?;
                }
                Err(e) => {
                    run.downgrade = Some(format!("strict round {i} failed: {e}"));
                    break;
                }
            }
        }
        if run.downgrade.is_none() && schedule.stop != StopReason::Threshold {
            run.downgrade = Some(format!(
                "schedule stopped by {} after {} rows without reaching the 8C threshold",
                schedule.stop.as_str(),
                schedule.rows.len()
            ));
        }
        run.schedule = Some(schedule);
    }

    let strict_done = config.round_mode == RoundMode::Strict && run.downgrade.is_none();
    if !strict_done {
        while !rem.ready(mode) {
            if run.rounds.len() >= config.round_cap {
                run.capped = true;
                break;
            }
            let params = NibbleParams::new(
                rem.min_list().max(1) as f64,
                rem.max_degree(mode).max(1) as f64,
                rem.inst.c_bound(),
                config.p,
                config.eps,
            )?;
            let mut accepted = None;
            for _ in 0..=config.round_retries {
                let seed = master.next_u64();
                match nibble_round(&rem.inst, &rem.asg, mode, &params, RoundMode::Practical, seed, 0) {
                    Ok(out) if keeps_hypothesis(&rem, &out, mode, config.eps) => {
                        accepted = Some(Ok(out));
                        break;
                    }
                    Ok(_) => {}
                    Err(e) => {
                        accepted = Some(Err(e));
                        break;
                    }
                }
            }
            match accepted {
                Some(Ok(out)) => {
                    let next = rem.apply(&out, &mut coloring);
                    record(&mut run, &rem, out, RoundMode::Practical, config.p, &next);
                    rem = next;
                    boundary(&rem, &coloring, &mut verify_time)?;
                }
                Some(Err(e)) => {
                    run.status = RunStatus::Failed { stage: format!("round {}", run.rounds.len()), reason: e.to_string() };
                    break;
                }
                None => {
                    run.stalled = true;
                    break;
                }
            }
        }
    }
    run.timings.rounds_ms = started.elapsed().as_secs_f64() * 1e3 - verify_time;

    if run.status == RunStatus::Success && rem.inst.num_vertices() > 0 {
        let t = Instant::now();
        let cfg = FinisherConfig { force: config.finisher.force || run.capped || run.stalled, ..config.finisher.clone() };
        let seed = master.next_u64();
        match finish(&rem.inst, &rem.asg, mode, &cfg, seed) {
            Ok(rep) => {
                match &rep.coloring {
                    Some(col) => {
                        for (i, c) in col.colored() {
                            coloring.set(rem.old_of[i], c);
                        }
                    }
                    None => {
                        run.status = RunStatus::Failed {
                            stage: "finisher".into(),
                            reason: format!("{:?} after {} passes", rep.status, rep.conflicts_per_pass.len()),
                        }
                    }
                }
                run.finisher = Some(rep);
            }
            Err(e) => run.status = RunStatus::Failed { stage: "finisher".into(), reason: e.to_string() },
        }
        run.timings.finisher_ms = t.elapsed().as_secs_f64() * 1e3;
    }

    let t = Instant::now();
    run.verification = verify_coloring(inst, asg, &coloring, mode);
    if run.status == RunStatus::Success {
        if !run.verification.is_pass() {
            run.status = RunStatus::Failed { stage: "verification".into(), reason: format!("{:?}", run.verification) };
        } else if !coloring.is_total() {
            run.status = RunStatus::Failed { stage: "verification".into(), reason: "coloring is not total".into() };
        }
    }
    run.timings.verify_ms = verify_time + t.elapsed().as_secs_f64() * 1e3;
    run.coloring = coloring;
    Ok(run)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineGraph {
    pub instance_vertex_of_edge: Vec<usize>,
}

/// Line graph of a linear hypergraph as a union of cliques, one per
/// hypergraph vertex over its incident edges. Edge `j` becomes vertex
/// `e{j:06}`, and `C` is the rank.
pub fn line_graph_union(h: &Hypergraph) -> Result<(UnionInstance, LineGraph)> {
    h.check_linear()?;
    let name = |j: usize| format!("e{j:06}");
    let specs: Vec<GraphSpec> = h
        .incidence()
        .into_iter()
        .enumerate()
        .filter(|(_, inc)| !inc.is_empty())
        .map(|(x, inc)| {
            let names: Vec<String> = inc.into_iter().map(name).collect();
            GraphSpec::complete(h.vertices()[x].clone(), &names)
        })
        .collect();
    let inst = UnionInstance::new(h.rank().max(1), specs)?;
    let instance_vertex_of_edge =
        (0..h.num_edges()).map(|j| inst.vertex_index(&name(j))).collect::<Result<Vec<_>>>()?;
    Ok((inst, LineGraph { instance_vertex_of_edge }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeColoringRun {
    /// Color per hyperedge, in input order; empty on failure.
    pub colors: Vec<Color>,
    pub palette: usize,
    pub colors_used: usize,
    pub max_degree: usize,
    pub run: PipelineRun,
}

/// Colors the edges of a linear hypergraph from `{1..⌈(1 + ε) D⌉}`.
pub fn edge_color_hypergraph(h: &Hypergraph, config: &PipelineConfig) -> Result<EdgeColoringRun> {
    let (inst, lg) = line_graph_union(h)?;
    let max_degree = h.max_degree();
    let palette = ((1.0 + config.eps) * max_degree as f64).ceil().max(1.0) as usize;
    let asg = match config.mode {
        Mode::List => Assignment::uniform(&inst, 1, palette),
        Mode::Dp => {
            let lists = vec![(1..=palette as Color).collect(); inst.num_vertices()];
            Assignment::identity_matchings(&inst, lists)?
        }
    };
    let mut run = run_pipeline(&inst, &asg, config)?;
    let mut colors = Vec::new();
    if run.succeeded() {
        colors = lg.instance_vertex_of_edge.iter().map(|&v| run.coloring.get(v).expect("coloring is total")).collect();
        if let Some((e, f)) = h.edge_coloring_conflict(&colors) {
            run.status = RunStatus::Failed {
                stage: "edge verification".into(),
                reason: format!("edges {e} and {f} intersect and share color {}", colors[e]),
            };
        }
    }
    let colors_used = colors.iter().collect::<std::collections::BTreeSet<_>>().len();
    Ok(EdgeColoringRun { colors, palette, colors_used, max_degree, run })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_instance_needs_no_rounds() {
        let inst = UnionInstance::new(1, vec![GraphSpec::new("g").vertex("a").vertex("b")]).unwrap();
        let asg = Assignment::uniform(&inst, 1, 1);
        let run = run_pipeline(&inst, &asg, &PipelineConfig::default()).unwrap();
        assert!(run.succeeded());
        assert!(run.rounds.is_empty());
        assert!(run.coloring.is_total());
    }

    #[test]
    fn two_triangles_sharing_a_vertex() {
        let inst = UnionInstance::new(
            2,
            vec![GraphSpec::complete("t1", &["a", "b", "x"]), GraphSpec::complete("t2", &["x", "c", "d"])],
        )
        .unwrap();
        let asg = Assignment::uniform(&inst, 1, 3);
        for seed in 0..10 {
            let cfg = PipelineConfig { seed, ..PipelineConfig::default() };
            let run = run_pipeline(&inst, &asg, &cfg).unwrap();
            assert!(run.succeeded(), "{:?}", run.status);
        }
    }

    #[test]
    fn hypothesis_violation_is_refused() {
        let inst = UnionInstance::new(1, vec![GraphSpec::complete("t", &["a", "b", "c"])]).unwrap();
        let asg = Assignment::uniform(&inst, 1, 2);
        assert!(matches!(run_pipeline(&inst, &asg, &PipelineConfig::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn line_graph_examples() {
        let tri = Hypergraph::from_indices(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let (inst, _) = line_graph_union(&tri).unwrap();
        assert_eq!((inst.num_vertices(), inst.num_graphs(), inst.num_union_edges()), (3, 3, 3));
        assert!(inst.validate().is_pass());

        let star = Hypergraph::from_indices(4, vec![vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        let (inst, _) = line_graph_union(&star).unwrap();
        let big: Vec<_> = inst.graphs().iter().filter(|g| g.vertices.len() == 3).collect();
        assert_eq!(big.len(), 1);
        assert_eq!(big[0].edges.len(), 3);
        assert_eq!(inst.graphs().iter().filter(|g| g.vertices.len() == 1).count(), 3);
    }

    #[test]
    fn single_hyperedge_gets_one_color() {
        let h = Hypergraph::from_indices(3, vec![vec![0, 1, 2]]).unwrap();
        let out = edge_color_hypergraph(&h, &PipelineConfig::default()).unwrap();
        assert!(out.run.succeeded());
        assert_eq!(out.colors_used, 1);
    }

    #[test]
    fn non_linear_input_is_refused() {
        let h = Hypergraph::from_indices(3, vec![vec![0, 1, 2], vec![0, 1]]).unwrap();
        assert_eq!(line_graph_union(&h).unwrap_err(), Error::NotLinear(0, 1));
    }
}
