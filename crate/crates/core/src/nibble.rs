//! One round of the semi-random nibble.
//!
//! A round samples an activated set `A` and a tentative coloring `ψ`, removes
//! from every list the colors that activated neighbours could clash with, and
//! keeps `ψ` on the activated vertices whose tentative color survived.
//! Everything is phrased through [`Assignment::partner`], so list and DP mode
//! share one code path and consume randomness identically.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Color, Mode, PartialColoring, UnionInstance};
use crate::rng::stream_rng;
use crate::schedule::{expected_active_uncolored, expected_kept_unactivated, keep_value, NibbleParams};

/// One draw of `(A, ψ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundSample {
    pub activated: Vec<bool>,
    pub tentative: Vec<Color>,
    pub rng_seed: u64,
}

impl RoundSample {
    pub fn activated_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.activated.iter().enumerate().filter(|(_, a)| **a).map(|(v, _)| v)
    }
}

/// Draws `A` and `ψ` in canonical vertex order: for each vertex one
/// activation trial, then one uniform list position.
pub fn sample_round(inst: &UnionInstance, asg: &Assignment, p: f64, seed: u64) -> Result<RoundSample> {
    sample_round_stream(inst, asg, p, seed, 0)
}

/// [`sample_round`] drawing from stream `stream` of `seed`.
pub fn sample_round_stream(
    inst: &UnionInstance,
    asg: &Assignment,
    p: f64,
    seed: u64,
    stream: u64,
) -> Result<RoundSample> {
    let mut rng = stream_rng(seed, stream);
    sample_with(inst, asg, p, seed, &mut rng)
}

fn sample_with<R: Rng>(inst: &UnionInstance, asg: &Assignment, p: f64, seed: u64, rng: &mut R) -> Result<RoundSample> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("activation probability {p} outside [0, 1]")));
    }
    let n = inst.num_vertices();
    let mut activated = Vec::with_capacity(n);
    let mut tentative = Vec::with_capacity(n);
    for v in 0..n {
        let list = asg.list(v);
        if list.is_empty() {
            return Err(Error::EmptyList(inst.vertex_id(v).to_string()));
        }
        activated.push(rng.gen::<f64>() < p);
        tentative.push(list[rng.gen_range(0..list.len())]);
    }
    Ok(RoundSample { activated, tentative, rng_seed: seed })
}

/// `L_{A,ψ}(v)`: each list minus the colors activated neighbours clash with.
pub fn compute_removed_lists(
    inst: &UnionInstance,
    asg: &Assignment,
    mode: Mode,
    sample: &RoundSample,
) -> Vec<Vec<Color>> {
    let mut removed: Vec<Vec<Color>> = vec![Vec::new(); inst.num_vertices()];
    for u in sample.activated_vertices() {
        let cu = sample.tentative[u];
        for &v in inst.neighbors(u) {
            if let Some(cv) = asg.partner(mode, u, v, cu) {
                removed[v].push(cv);
            }
        }
    }
    (0..inst.num_vertices())
        .map(|v| {
            let gone = &mut removed[v];
            gone.sort_unstable();
            asg.list(v).iter().copied().filter(|c| gone.binary_search(c).is_err()).collect()
        })
        .collect()
}

fn x_from_survivors(sample: &RoundSample, survivors: &[Vec<Color>]) -> Vec<bool> {
    (0..survivors.len())
        .map(|v| sample.activated[v] && survivors[v].binary_search(&sample.tentative[v]).is_ok())
        .collect()
}

/// `X_{A,ψ} = {v ∈ A : ψ(v) ∈ L_{A,ψ}(v)}` as a membership mask.
pub fn compute_x(inst: &UnionInstance, asg: &Assignment, mode: Mode, sample: &RoundSample) -> Vec<bool> {
    let survivors = compute_removed_lists(inst, asg, mode, sample);
    x_from_survivors(sample, &survivors)
}

/// Per `(v, c, i)` statistics of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StatEntry {
    pub v: usize,
    pub c: Color,
    pub graph: usize,
    /// Uncolored `G_i`-neighbours whose corresponding color survived.
    pub d: usize,
    /// Activated but uncolored `G_i`-neighbours with a corresponding color.
    pub a: usize,
    /// Unactivated `G_i`-neighbours whose corresponding color is not hit
    /// from outside `G_i`.
    pub k: usize,
    /// `G_i`-neighbours whose tentative color corresponds to `c`.
    pub t: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundStats {
    /// `ℓ_v = |L_{A,ψ}(v)|`
    pub ell: Vec<usize>,
    /// Sorted by `(v, c, graph)`.
    pub entries: Vec<StatEntry>,
}

impl RoundStats {
    /// CSV with header `vertex,color,graph,d,a,k,t,ell`.
    pub fn to_csv(&self, inst: &UnionInstance) -> String {
        let mut out = String::from("vertex,color,graph,d,a,k,t,ell\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                inst.vertex_id(e.v),
                e.c,
                inst.graph(e.graph).id,
                e.d,
                e.a,
                e.k,
                e.t,
                self.ell[e.v]
            ));
        }
        out
    }
}

struct Derived {
    survivors: Vec<Vec<Color>>,
    in_x: Vec<bool>,
    stats: RoundStats,
}

fn derive(inst: &UnionInstance, asg: &Assignment, mode: Mode, sample: &RoundSample) -> Derived {
    let n = inst.num_vertices();
    let survivors = compute_removed_lists(inst, asg, mode, sample);
    let in_x = x_from_survivors(sample, &survivors);
    // (color removed at u, member graph of the edge it came through)
    let mut hits: Vec<Vec<(Color, usize)>> = vec![Vec::new(); n];
    for w in sample.activated_vertices() {
        let cw = sample.tentative[w];
        for &(gi, ref nbrs) in inst.member_neighborhoods(w) {
            for &u in nbrs {
                if let Some(cu) = asg.partner(mode, w, u, cw) {
                    hits[u].push((cu, gi));
                }
            }
        }
    }
    let mut entries = Vec::new();
    for v in 0..n {
        for &c in asg.list(v) {
            for &(gi, ref nbrs) in inst.member_neighborhoods(v) {
                let mut e = StatEntry { v, c, graph: gi, d: 0, a: 0, k: 0, t: 0 };
                for &u in nbrs {
                    let Some(cu) = asg.partner(mode, v, u, c) else { continue };
                    if sample.tentative[u] == cu {
                        e.t += 1;
                    }
                    if !in_x[u] && survivors[u].binary_search(&cu).is_ok() {
                        e.d += 1;
                    }
                    if sample.activated[u] {
                        if !in_x[u] {
                            e.a += 1;
                        }
                    } else if !hits[u].iter().any(|&(col, g)| col == cu && g != gi) {
                        e.k += 1;
                    }
                }
                entries.push(e);
            }
        }
    }
    let ell = survivors.iter().map(Vec::len).collect();
    Derived { survivors, in_x, stats: RoundStats { ell, entries } }
}

/// Measures `ℓ`, `d`, `a`, `k`, `t` for a sample.
pub fn measure_stats(inst: &UnionInstance, asg: &Assignment, mode: Mode, sample: &RoundSample) -> RoundStats {
    derive(inst, asg, mode, sample).stats
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum BadEvent {
    /// `ℓ_v < E[ℓ_v] − Λ^{4/5}`
    ListShort { v: usize, ell: usize, threshold: f64 },
    /// `a_{v,c,i} > E[a] + D^{4/5}/2`
    ActiveHigh { v: usize, c: Color, graph: usize, a: usize, threshold: f64 },
    /// `k_{v,c,i} > E[k] + D^{4/5}/2`
    KeptHigh { v: usize, c: Color, graph: usize, k: usize, threshold: f64 },
}

/// Whether every vertex lies in exactly `C` graphs, every list has
/// `lambda_size` colors and every color degree equals `d`.
pub fn check_normalized(
    inst: &UnionInstance,
    asg: &Assignment,
    mode: Mode,
    lambda_size: usize,
    d: f64,
) -> std::result::Result<(), String> {
    for v in 0..inst.num_vertices() {
        if inst.membership(v).len() != inst.c_bound() {
            return Err(format!("`{}` lies in {} graphs, not {}", inst.vertex_id(v), inst.membership(v).len(), inst.c_bound()));
        }
        if asg.list(v).len() != lambda_size {
            return Err(format!("`{}` has {} colors, not {lambda_size}", inst.vertex_id(v), asg.list(v).len()));
        }
        for &c in asg.list(v) {
            for &(gi, ref nbrs) in inst.member_neighborhoods(v) {
                let deg = nbrs.iter().filter(|&&u| asg.partner(mode, v, u, c).is_some()).count();
                if deg as f64 != d {
                    return Err(format!(
                        "color degree of ({}, {c}) in `{}` is {deg}, not {d}",
                        inst.vertex_id(v),
                        inst.graph(gi).id
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Lists every bad event of `stats` against the closed-form expectations at
/// `params`. With `strict`, refuses instances that are not normalized (the
/// closed forms only hold there).
pub fn check_bad_events(
    inst: &UnionInstance,
    asg: &Assignment,
    mode: Mode,
    stats: &RoundStats,
    params: &NibbleParams,
    strict: bool,
) -> Result<Vec<BadEvent>> {
    let NibbleParams { lambda, d, c, p, .. } = *params;
    if strict {
        check_normalized(inst, asg, mode, lambda.ceil() as usize, d).map_err(Error::NotNormalized)?;
    }
    let ell_threshold = keep_value(lambda, d, c, p)? - lambda.powf(0.8);
    let a_threshold = expected_active_uncolored(lambda, d, c, p)? + d.powf(0.8) / 2.0;
    let k_threshold = expected_kept_unactivated(lambda, d, c, p)? + d.powf(0.8) / 2.0;
    let mut events = Vec::new();
    for (v, &ell) in stats.ell.iter().enumerate() {
        if (ell as f64) < ell_threshold {
            events.push(BadEvent::ListShort { v, ell, threshold: ell_threshold });
        }
    }
    for e in &stats.entries {
        if e.a as f64 > a_threshold {
            events.push(BadEvent::ActiveHigh { v: e.v, c: e.c, graph: e.graph, a: e.a, threshold: a_threshold });
        }
        if e.k as f64 > k_threshold {
            events.push(BadEvent::KeptHigh { v: e.v, c: e.c, graph: e.graph, k: e.k, threshold: k_threshold });
        }
    }
    Ok(events)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundMode {
    /// Resample until the round meets its guarantees, then truncate lists.
    Strict,
    /// Accept the first sample as is.
    Practical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NibbleOutcome {
    /// Membership mask of `X`.
    pub in_x: Vec<bool>,
    /// `φ = ψ|_X`.
    pub phi: PartialColoring,
    /// `L'(v)` for every `v ∉ X`; entries of colored vertices are empty.
    pub new_lists: Vec<Vec<Color>>,
    pub stats: RoundStats,
    pub resample_count: usize,
    pub sample: RoundSample,
    /// Whether the bad events of the closed forms gated this round (strict
    /// mode on a normalized instance) rather than the realized guarantees.
    pub gated_by_events: bool,
}

impl NibbleOutcome {
    pub fn colored(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_x.iter().enumerate().filter(|(_, x)| **x).map(|(v, _)| v)
    }

    pub fn num_colored(&self) -> usize {
        self.in_x.iter().filter(|x| **x).count()
    }
}

/// `max_i Δ(G_i − X, L')`, with conflicts read from the original assignment.
pub fn residual_max_degree(
    inst: &UnionInstance,
    asg: &Assignment,
    mode: Mode,
    in_x: &[bool],
    new_lists: &[Vec<Color>],
) -> usize {
    let mut best = 0;
    for v in 0..inst.num_vertices() {
        if in_x[v] {
            continue;
        }
        for &c in &new_lists[v] {
            for (_, nbrs) in inst.member_neighborhoods(v) {
                let deg = nbrs
                    .iter()
                    .filter(|&&u| {
                        !in_x[u]
                            && asg.partner(mode, v, u, c).is_some_and(|cu| new_lists[u].binary_search(&cu).is_ok())
                    })
                    .count();
                best = best.max(deg);
            }
        }
    }
    best
}

/// Runs one round.
///
/// Practical mode accepts the first sample. Strict mode redraws whole rounds
/// (attempt `j` uses stream `j` of `seed`) until the sample is good, keeps the
/// `⌈keep − Λ^{4/5}⌉` smallest surviving colors of every list and checks
/// `Δ(G_i − X, L') ≤ uncov + D^{4/5}`. On a normalized instance "good" means
/// no bad event fires; otherwise it means the truncation and degree bound
/// themselves hold.
pub fn nibble_round(
    inst: &UnionInstance,
    asg: &Assignment,
    mode: Mode,
    params: &NibbleParams,
    round_mode: RoundMode,
    seed: u64,
    max_resamples: usize,
) -> Result<NibbleOutcome> {
    let finish = |sample: RoundSample, derived: Derived, new_lists: Vec<Vec<Color>>, attempts: usize, gated: bool| {
        let mut phi = PartialColoring::empty(inst.num_vertices());
        for v in 0..inst.num_vertices() {
            if derived.in_x[v] {
                phi.set(v, sample.tentative[v]);
            }
        }
        NibbleOutcome {
            in_x: derived.in_x,
            phi,
            new_lists,
            stats: derived.stats,
            resample_count: attempts,
            sample,
            gated_by_events: gated,
        }
    };
    let strip = |d: &Derived| -> Vec<Vec<Color>> {
        d.survivors
            .iter()
            .enumerate()
            .map(|(v, l)| if d.in_x[v] { Vec::new() } else { l.clone() })
            .collect()
    };

    if round_mode == RoundMode::Practical {
        let sample = sample_round(inst, asg, params.p, seed)?;
        let derived = derive(inst, asg, mode, &sample);
        let lists = strip(&derived);
        return Ok(finish(sample, derived, lists, 0, false));
    }

    let target = params.list_target()?;
    if target < 1.0 {
        return Err(Error::RoundFailed {
            attempts: 0,
            reason: format!("list target ⌈keep − Λ^(4/5)⌉ = {target} is not positive"),
        });
    }
    let target = target as usize;
    let degree_bound = params.degree_bound()?;
    let normalized = check_normalized(inst, asg, mode, params.lambda.ceil() as usize, params.d).is_ok();

    let mut last_reason = String::new();
    for attempt in 0..=max_resamples {
        let sample = sample_round_stream(inst, asg, params.p, seed, attempt as u64)?;
        let derived = derive(inst, asg, mode, &sample);
        if normalized {
            let events = check_bad_events(inst, asg, mode, &derived.stats, params, false)?;
            if !events.is_empty() {
                last_reason = format!("{} bad events, first {:?}", events.len(), events[0]);
                continue;
            }
        }
        let mut lists = strip(&derived);
        if let Some(v) = (0..lists.len()).find(|&v| !derived.in_x[v] && lists[v].len() < target) {
            last_reason = format!(
                "`{}` kept {} colors, fewer than the target {target}",
                inst.vertex_id(v),
                lists[v].len()
            );
            continue;
        }
        for (v, l) in lists.iter_mut().enumerate() {
            if !derived.in_x[v] {
                l.truncate(target);
            }
        }
        let residual = residual_max_degree(inst, asg, mode, &derived.in_x, &lists);
        if residual as f64 > degree_bound {
            last_reason = format!("residual color degree {residual} exceeds {degree_bound:.3}");
            continue;
        }
        return Ok(finish(sample, derived, lists, attempt, normalized));
    }
    Err(Error::RoundFailed { attempts: max_resamples + 1, reason: last_reason })
}
