//! Acceptance checks, one line per criterion.
//!
//! Closed forms are recomputed here from scratch rather than read back from
//! the reports under test. Criteria 2 and 3 include an inequality that does
//! not hold at the prescribed parameters; they are evaluated as stated,
//! reported as FAIL, and only the shape of the failure is asserted.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ndcolor::instance::{color_degree, max_member_color_degree, verify_coloring};
use ndcolor::lab::chromatic::{chromatic_number, exhaustive_list_colorable, member_chromatic_number};
use ndcolor::lab::constructions::{construct_thm15ii, random_family, random_linear_hypergraph};
use ndcolor::lab::exact::{exact_expectations, DEFAULT_BUDGET};
use ndcolor::lab::monte_carlo::{monte_carlo, McOptions};
use ndcolor::normalizer::{normalize, NormalizeOptions};
use ndcolor::pipeline::{edge_color_hypergraph, run_pipeline, PipelineConfig};
use ndcolor::schedule::{build_schedule, check_prop22, keep_value, uncov_value, NibbleParams, StopReason};
use ndcolor::{Assignment, Color, GraphSpec, Mode, UnionInstance};

const FORMULA_REL_TOL: f64 = 1e-12;
const EXACT_ABS_TOL: f64 = 1e-9;
const WEIGHT_TOL: f64 = 1e-12;
const MC_TRIALS: u64 = 100_000;
const MC_POOLED_SE: f64 = 3.0;
const MC_ITEM_SE: f64 = 4.0;
const E2E_RUNS: u64 = 20;

struct Verdict {
    id: u32,
    name: &'static str,
    pass: bool,
    /// The criterion cannot pass as stated; the failure itself was checked.
    known_gap: bool,
    detail: String,
    elapsed: Duration,
    limit: Duration,
}

fn run(id: u32, name: &'static str, limit_s: u64, f: impl FnOnce() -> (bool, bool, String)) -> Verdict {
    let t = Instant::now();
    let (pass, known_gap, detail) = f();
    Verdict { id, name, pass, known_gap, detail, elapsed: t.elapsed(), limit: Duration::from_secs(limit_s) }
}

fn q_pow(lambda: f64, p: f64, e: f64) -> f64 {
    (1.0 - p / lambda).powf(e)
}

/// Closed forms `(ℓ, P[keep], P[free], a, k)` on a normalized instance.
fn closed_forms(lambda: usize, d: usize, c: usize, p: f64) -> [f64; 5] {
    let (l, d, c) = (lambda as f64, d as f64, c as f64);
    let keep = q_pow(l, p, d * c);
    [keep * l, keep, q_pow(l, p, d), p * (1.0 - keep) * d, (1.0 - p) * q_pow(l, p, d * (c - 1.0)) * d]
}

fn edges_instance(c: usize, edges: &[(&str, &str)]) -> UnionInstance {
    let specs = edges
        .iter()
        .map(|&(u, v)| GraphSpec::new(format!("{u}{v}")).vertex(u).vertex(v).edge(u, v))
        .collect();
    UnionInstance::new(c, specs).unwrap()
}

fn criterion1() -> (bool, bool, String) {
    let text = include_str!("data/keep_uncov_reference.csv");
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let lambda: f64 = f[0].parse().unwrap();
        let d: f64 = f[1].parse().unwrap();
        let c: usize = f[2].parse().unwrap();
        let p: f64 = f[3].parse().unwrap();
        let keep_ref: f64 = f[4].parse().unwrap();
        let uncov_ref: f64 = f[5].parse().unwrap();
        let rk = (keep_value(lambda, d, c, p).unwrap() - keep_ref).abs() / keep_ref.abs();
        let ru = (uncov_value(lambda, d, c, p).unwrap() - uncov_ref).abs() / uncov_ref.abs();
        worst = worst.max(rk).max(ru);
        rows += 1;
    }
    (rows >= 200 && worst <= FORMULA_REL_TOL, false, format!("{rows} grid points, max rel err {worst:.2e} (tol {FORMULA_REL_TOL:.0e})"))
}

fn lin(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn criterion2() -> (bool, bool, String) {
    let (mut total, mut ratio_fail, mut degree_fail) = (0, 0, 0);
    let mut worst_ratio = f64::INFINITY;
    for d in [1e4, 1e5, 1e6, 1e8, 1e10] {
        let ln = f64::ln(d);
        for eps in lin(0.1, 0.9, 5) {
            for c in 1..=4usize {
                for p in lin(1.0 / (ln * ln), 1.0 / ln, 4) {
                    for lambda in lin((1.0 + eps) * d, 10.0 * c as f64 * d, 5) {
                        let chk = check_prop22(&NibbleParams::new(lambda, d, c, p, eps).unwrap()).unwrap();
                        total += 1;
                        ratio_fail += usize::from(!chk.ratio_ok);
                        degree_fail += usize::from(!chk.degree_ok);
                        worst_ratio = worst_ratio.min(chk.ratio_lhs / chk.ratio_rhs);
                    }
                }
            }
        }
    }
    let pass = ratio_fail == 0 && degree_fail == 0;
    // documented gap: the ratio inequality fails, the degree inequality never does
    let gap_as_documented = degree_fail == 0 && ratio_fail > 0;
    (
        pass,
        !pass && gap_as_documented,
        format!(
            "{total} points; ratio inequality fails at {ratio_fail} (worst lhs/rhs {worst_ratio:.4}), degree inequality fails at {degree_fail}"
        ),
    )
}

fn criterion3() -> (bool, bool, String) {
    let (d0, eps, c) = (1e6, 0.5, 2usize);
    let s = build_schedule(d0, eps, c, None).unwrap();
    let p = s.p;
    let growth = 1.0 + eps * p / 4.0;
    let mut growth_fail = 0;
    for w in s.rows.windows(2) {
        if w[1].ratio < growth * w[0].ratio {
            growth_fail += 1;
        }
    }
    let floor = (-34.0 * (c * c) as f64 / eps).exp() * d0;
    let floor_ok = s.rows.iter().all(|r| r.d >= floor);
    let bound = (33.0 * c as f64 / (eps * p)).ceil() as usize;
    let i_star_ok = s.stop == StopReason::Threshold && s.i_star.is_some_and(|i| i <= bound);
    let pass = growth_fail == 0 && floor_ok && i_star_ok;
    (
        pass,
        !pass && growth_fail > 0,
        format!(
            "{} rows, stop {}; ratio growth fails on {growth_fail} steps; D_i floor {}; i* = {:?} vs bound {bound} {}",
            s.rows.len(),
            s.stop.as_str(),
            if floor_ok { "holds" } else { "violated" },
            s.i_star,
            if i_star_ok { "holds" } else { "not met" }
        ),
    )
}

struct Tiny {
    name: &'static str,
    inst: UnionInstance,
    asg: Assignment,
    mode: Mode,
    params: (usize, usize, usize),
}

fn tiny_instances() -> Vec<Tiny> {
    let mut out = Vec::new();
    let e = edges_instance(1, &[("u", "v")]);
    let a = Assignment::new(&e, vec![vec![1]; 2]).unwrap();
    out.push(Tiny { name: "edge", inst: e, asg: a, mode: Mode::List, params: (1, 1, 1) });

    let k3 = UnionInstance::new(1, vec![GraphSpec::complete("k3", &["a", "b", "c"])]).unwrap();
    let a = Assignment::uniform(&k3, 1, 2);
    out.push(Tiny { name: "triangle", inst: k3, asg: a, mode: Mode::List, params: (2, 2, 1) });

    let tri = edges_instance(2, &[("a", "b"), ("b", "c"), ("a", "c")]);
    let a = Assignment::uniform(&tri, 1, 3);
    out.push(Tiny { name: "triangle as three edges", inst: tri, asg: a, mode: Mode::List, params: (3, 1, 2) });

    let c4 = edges_instance(2, &[("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]);
    let a = Assignment::uniform(&c4, 1, 2);
    out.push(Tiny { name: "4-cycle as four edges", inst: c4, asg: a, mode: Mode::List, params: (2, 1, 2) });

    let k4 = edges_instance(3, &[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]);
    let a = Assignment::uniform(&k4, 1, 2);
    out.push(Tiny { name: "K4 as six edges", inst: k4, asg: a, mode: Mode::List, params: (2, 1, 3) });

    let k3 = UnionInstance::new(1, vec![GraphSpec::complete("k3", &["a", "b", "c"])]).unwrap();
    let mut m = std::collections::BTreeMap::new();
    for (u, v) in k3.union_edges() {
        m.insert((u, v), vec![(1, 1), (2, 2)]);
    }
    let (u, v) = k3.union_edges()[0];
    m.insert((u, v), vec![(1, 2), (2, 1)]);
    let a = Assignment::with_matchings(&k3, vec![vec![1, 2]; 3], m).unwrap();
    out.push(Tiny { name: "twisted DP triangle", inst: k3, asg: a, mode: Mode::Dp, params: (2, 2, 1) });
    out
}

fn criterion4() -> (bool, bool, String) {
    let ps = [0.1, 0.25, 0.5, 0.9];
    let mut worst: f64 = 0.0;
    let mut worst_w: f64 = 0.0;
    let mut checked = 0;
    let mut problems = Vec::new();
    for t in tiny_instances() {
        assert!(t.inst.num_vertices() <= 6 && t.asg.lists().iter().all(|l| l.len() <= 3));
        for &p in &ps {
            let r = exact_expectations(&t.inst, &t.asg, t.mode, p, DEFAULT_BUDGET).unwrap();
            if r.normalized != Some(t.params) {
                problems.push(format!("{} detected as {:?}", t.name, r.normalized));
                continue;
            }
            worst_w = worst_w.max((r.weight_sum - 1.0).abs());
            let (l, d, c) = t.params;
            let f = closed_forms(l, d, c, p);
            for row in &r.rows {
                let want = match row.quantity {
                    "ell" => f[0],
                    "keep_prob" => f[1],
                    "free_prob" => f[2],
                    "a" => f[3],
                    "k" => f[4],
                    _ => continue,
                };
                worst = worst.max((row.exact - want).abs());
                checked += 1;
            }
        }
    }
    let n = tiny_instances().len();
    let pass = problems.is_empty() && n >= 5 && worst <= EXACT_ABS_TOL && worst_w <= WEIGHT_TOL;
    (
        pass,
        false,
        format!(
            "{n} instances x {} values of p, {checked} values; max |exact - closed form| {worst:.2e} (tol {EXACT_ABS_TOL:.0e}); max |weights - 1| {worst_w:.1e}{}",
            ps.len(),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn criterion5() -> (bool, bool, String) {
    // normalized path u - v - w with lists {1, 2} at D = 2
    let path = UnionInstance::new(
        1,
        vec![GraphSpec::new("g").vertex("u").vertex("v").vertex("w").edge("u", "v").edge("v", "w")],
    )
    .unwrap();
    let asg = Assignment::uniform(&path, 1, 2);
    let norm = normalize(&path, &asg, 2, 2, &NormalizeOptions::default()).unwrap();
    let (inst, asg) = (&norm.instance, &norm.assignment);
    let p = 0.3;
    let opts = McOptions { trials: MC_TRIALS, seed: 2024, d_param: None, record_trials: false };
    let r = monte_carlo(inst, asg, Mode::List, p, &opts).unwrap();
    let f = closed_forms(2, 2, inst.c_bound(), p);
    let z = |mean: f64, se: f64, want: f64| if se > 0.0 { (mean - want) / se } else if mean == want { 0.0 } else { f64::INFINITY };
    let index = |q: &str| ["ell", "keep_prob", "free_prob", "a", "k"].iter().position(|n| q.starts_with(n)).unwrap();
    let pooled_z: f64 = r.pooled.iter().map(|e| z(e.mean, e.se, f[index(&e.quantity)]).abs()).fold(0.0, f64::max);
    let item_z: f64 = r
        .per_item
        .iter()
        .map(|e| z(e.mean, e.se, f[index(e.quantity.split('[').next().unwrap())]).abs())
        .fold(0.0, f64::max);
    let pass = r.normalized.is_some() && pooled_z <= MC_POOLED_SE && item_z <= MC_ITEM_SE && r.d_exceeds_a_plus_k_trials == 0;
    (
        pass,
        false,
        format!(
            "{} trials on {} vertices; max |z| pooled {pooled_z:.2} (tol {MC_POOLED_SE}), per item over {} estimates {item_z:.2} (tol {MC_ITEM_SE}); d > a + k in {} trials; exceptional-ball freq {:.4} vs bound {:.3e}",
            r.trials,
            inst.num_vertices(),
            r.per_item.len(),
            r.d_exceeds_a_plus_k_trials,
            r.omega_star_max_freq.unwrap_or(f64::NAN),
            r.omega_star_bound.unwrap_or(f64::NAN)
        ),
    )
}

/// Checks the five normalization conclusions by a full sweep.
fn normalization_violations(inst: &UnionInstance, asg: &Assignment, mode: Mode, d: usize, lambda: usize) -> Vec<String> {
    let n = normalize(inst, asg, d, lambda, &NormalizeOptions { mode, ..NormalizeOptions::default() }).unwrap();
    let (out, out_asg) = (&n.instance, &n.assignment);
    let mut bad = Vec::new();
    if !out.validate().is_pass() {
        bad.push("output not nearly disjoint".to_string());
    }
    let emb = |v: usize| out.vertex_index(&n.relabeling.embedded_vertex[inst.vertex_id(v)]).unwrap();
    for g in inst.graphs() {
        let Ok(gi) = out.graph_index(&g.id) else {
            bad.push(format!("graph {} missing", g.id));
            continue;
        };
        for &v in &g.vertices {
            if !out.contains(gi, emb(v)) {
                bad.push(format!("vertex {} not in {}", inst.vertex_id(v), g.id));
            }
        }
        for &(u, v) in &g.edges {
            if out.edge_graph(emb(u), emb(v)) != Some(gi) {
                bad.push(format!("edge {}{} not in {}", inst.vertex_id(u), inst.vertex_id(v), g.id));
            }
        }
    }
    for v in 0..inst.num_vertices() {
        if out_asg.list(emb(v)) != asg.list(v) {
            bad.push(format!("list of {} changed", inst.vertex_id(v)));
        }
    }
    if mode == Mode::Dp {
        for (u, v) in inst.union_edges() {
            for &c in asg.list(u) {
                if asg.partner(mode, u, v, c) != out_asg.partner(mode, emb(u), emb(v), c) {
                    bad.push(format!("matching on {}{} changed", inst.vertex_id(u), inst.vertex_id(v)));
                }
            }
        }
    }
    for v in 0..out.num_vertices() {
        if out.membership(v).len() != inst.c_bound() {
            bad.push(format!("{} in {} graphs", out.vertex_id(v), out.membership(v).len()));
        }
        if out_asg.list(v).len() != lambda {
            bad.push(format!("{} has {} colors", out.vertex_id(v), out_asg.list(v).len()));
        }
        for &gi in out.membership(v) {
            for &c in out_asg.list(v) {
                let deg = color_degree(out, out_asg, mode, gi, v, c).unwrap();
                if deg != d {
                    bad.push(format!("d({}, {c}) = {deg} in {}", out.vertex_id(v), out.graph(gi).id));
                }
            }
        }
    }
    bad
}

fn criterion6() -> (bool, bool, String) {
    let path = UnionInstance::new(
        1,
        vec![GraphSpec::new("g").vertex("u").vertex("v").vertex("w").edge("u", "v").edge("v", "w")],
    )
    .unwrap();
    let tri = UnionInstance::new(1, vec![GraphSpec::complete("k3", &["a", "b", "c"])]).unwrap();
    let pair = UnionInstance::new(
        2,
        vec![
            GraphSpec::new("g1").vertex("a").vertex("x").edge("a", "x"),
            GraphSpec::new("g2").vertex("x").vertex("b").edge("x", "b"),
        ],
    )
    .unwrap();
    let tri_lists = Assignment::new(&tri, vec![vec![1, 2], vec![1, 2], vec![1, 3]]).unwrap();
    let cases = [
        ("path", &path, Assignment::uniform(&path, 1, 1), 2, 1),
        ("triangle", &tri, tri_lists, 2, 2),
        ("two edges", &pair, Assignment::uniform(&pair, 1, 1), 1, 1),
    ];
    let mut bad = Vec::new();
    let mut runs = 0;
    for (name, inst, asg, d, lambda) in &cases {
        for mode in [Mode::List, Mode::Dp] {
            let asg = match mode {
                Mode::List => asg.clone(),
                Mode::Dp => Assignment::identity_matchings(inst, asg.lists().to_vec()).unwrap(),
            };
            for v in normalization_violations(inst, &asg, mode, *d, *lambda) {
                bad.push(format!("{name} {mode:?}: {v}"));
            }
            runs += 1;
        }
    }
    (bad.is_empty(), false, format!("{runs} normalizations swept; {} violations{}", bad.len(), bad.first().map(|b| format!(", first: {b}")).unwrap_or_default()))
}

fn criterion7() -> (bool, bool, String) {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 2..=5 {
        let inst = construct_thm15ii(n).unwrap();
        let members: Vec<usize> = (0..3).map(|gi| member_chromatic_number(&inst, gi).unwrap().chi).collect();
        let chi = chromatic_number(&inst).unwrap();
        let asg = Assignment::uniform(&inst, 1, chi.chi);
        let witness_ok = verify_coloring(&inst, &asg, &chi.coloring, Mode::List).is_pass() && chi.coloring.is_total();
        let good = inst.validate().is_pass() && members.iter().all(|&m| m <= n) && chi.chi == n + 1 && witness_ok;
        ok &= good;
        parts.push(format!("n={n}: chi(G_i)={members:?} chi(union)={}", chi.chi));
    }
    (ok, false, parts.join("; "))
}

fn criterion8() -> (bool, bool, String) {
    let mut ok = 0;
    let mut slowest = Duration::ZERO;
    let mut rounds = 0;
    let mut used = Vec::new();
    let mut d_seen = Vec::new();
    for seed in 0..E2E_RUNS {
        let g = random_linear_hypergraph(200, 3, 20, seed).unwrap();
        let t = Instant::now();
        let cfg = PipelineConfig { seed, eps: 0.5, ..PipelineConfig::default() };
        let out = edge_color_hypergraph(&g.hypergraph, &cfg).unwrap();
        slowest = slowest.max(t.elapsed());
        let h = &g.hypergraph;
        // independent check: intersecting hyperedges differ, colors from the palette
        let proper = out.colors.len() == h.num_edges()
            && out.colors.iter().all(|&c| c >= 1 && c as usize <= out.palette)
            && (0..h.num_edges()).all(|i| {
                (i + 1..h.num_edges()).all(|j| {
                    out.colors[i] != out.colors[j] || !h.edges()[i].iter().any(|x| h.edges()[j].contains(x))
                })
            });
        if out.run.succeeded() && proper {
            ok += 1;
        }
        rounds += out.run.rounds.len();
        used.push(out.colors_used);
        d_seen.push(out.max_degree);
    }
    let pass = ok == E2E_RUNS && slowest <= Duration::from_secs(60);
    (
        pass,
        false,
        format!(
            "{ok}/{E2E_RUNS} verified; D in {}..={}; palette 30; colors used {}..={}; {rounds} nibble rounds accepted in total; slowest run {:.1}s",
            d_seen.iter().min().unwrap(),
            d_seen.iter().max().unwrap(),
            used.iter().min().unwrap(),
            used.iter().max().unwrap(),
            slowest.as_secs_f64()
        ),
    )
}

fn uniform_for(inst: &UnionInstance, eps: f64) -> Assignment {
    let d = max_member_color_degree(inst, &Assignment::uniform(inst, 1, inst.num_vertices().max(1)), Mode::List);
    Assignment::uniform(inst, 1, (((1.0 + eps) * d as f64).ceil() as usize).max(1))
}

fn criterion9() -> (bool, bool, String) {
    let mut instances: Vec<UnionInstance> = (0..40).map(|s| random_family(3, 3, 0.6, s).unwrap()).collect();
    instances.extend((0..20).map(|s| random_family(4, 2, 0.7, 100 + s).unwrap()));
    for n in 2..=5 {
        instances.push(construct_thm15ii(n).unwrap());
    }
    instances.push(
        UnionInstance::new(2, vec![GraphSpec::complete("t1", &["a", "b", "x"]), GraphSpec::complete("t2", &["x", "c", "d"])]).unwrap(),
    );
    let (mut successes, mut confirmed, mut discrepancies, mut skipped, mut failures) = (0, 0, 0, 0, 0);
    for (i, inst) in instances.iter().enumerate() {
        let asg = uniform_for(inst, 0.5);
        for mode in [Mode::List, Mode::Dp] {
            let asg = match mode {
                Mode::List => asg.clone(),
                Mode::Dp => Assignment::identity_matchings(inst, asg.lists().to_vec()).unwrap(),
            };
            let cfg = PipelineConfig { seed: i as u64, mode, ..PipelineConfig::default() };
            let r = run_pipeline(inst, &asg, &cfg).unwrap();
            if !r.succeeded() {
                failures += 1;
                continue;
            }
            successes += 1;
            match exhaustive_list_colorable(inst, &asg, mode) {
                Ok(v) if v.is_colorable() => confirmed += 1,
                Ok(_) => discrepancies += 1,
                Err(_) => skipped += 1,
            }
        }
    }
    (
        discrepancies == 0 && successes > 0,
        false,
        format!("{successes} pipeline successes, {confirmed} confirmed by the exhaustive oracle, {discrepancies} discrepancies, {skipped} over budget, {failures} pipeline failures"),
    )
}

fn criterion10() -> (bool, bool, String) {
    let g = random_linear_hypergraph(120, 3, 12, 7).unwrap();
    let (inst, _) = ndcolor::pipeline::line_graph_union(&g.hypergraph).unwrap();
    let lists: Vec<Vec<Color>> = vec![(1..=24).collect(); inst.num_vertices()];
    let list_asg = Assignment::new(&inst, lists.clone()).unwrap();
    let dp_asg = Assignment::identity_matchings(&inst, lists).unwrap();
    let mut same = 0;
    let mut rounds = 0;
    let mut first_diff = None;
    for seed in 0..10 {
        let base = PipelineConfig { seed, eps: 0.1, p: 0.05, keep_outcomes: true, ..PipelineConfig::default() };
        let a = run_pipeline(&inst, &list_asg, &PipelineConfig { mode: Mode::List, ..base.clone() }).unwrap();
        let b = run_pipeline(&inst, &dp_asg, &PipelineConfig { mode: Mode::Dp, ..base }).unwrap();
        rounds += a.rounds.len();
        let equal_samples = a.outcomes.iter().zip(&b.outcomes).all(|(x, y)| x.sample == y.sample);
        let equal_stats = a.outcomes.iter().zip(&b.outcomes).all(|(x, y)| x.stats == y.stats);
        let checks = [
            ("round count", a.outcomes.len() == b.outcomes.len()),
            ("samples", equal_samples),
            ("stats", equal_stats),
            ("outcomes", a.outcomes == b.outcomes),
            ("round summaries", a.rounds == b.rounds),
            ("finisher", a.finisher == b.finisher),
            ("coloring", a.coloring == b.coloring),
            ("status", a.status == b.status && a.succeeded()),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            None => same += 1,
            Some((what, _)) => {
                first_diff.get_or_insert(format!("seed {seed}: {what} differ"));
            }
        }
    }
    (
        same == 10 && rounds > 0,
        false,
        format!("{same}/10 seeds identical across modes ({rounds} nibble rounds compared){}", first_diff.map(|d| format!("; {d}")).unwrap_or_default()),
    )
}

fn main() -> ExitCode {
    let verdicts = [
        run(1, "formula fidelity", 5, criterion1),
        run(2, "ratio and degree inequalities on the grid", 10, criterion2),
        run(3, "schedule reproduction", 1, criterion3),
        run(4, "exact enumeration agreement", 60, criterion4),
        run(5, "Monte Carlo agreement", 120, criterion5),
        run(6, "normalizer conclusions", 30, criterion6),
        run(7, "three-graph union needs n + 1 colors", 60, criterion7),
        run(8, "end-to-end hypergraph edge coloring", 20 * 60, criterion8),
        run(9, "oracle cross-check of pipeline successes", 300, criterion9),
        run(10, "correspondence reduction", 300, criterion10),
    ];
    let mut unexpected = 0;
    for v in &verdicts {
        let in_time = v.elapsed <= v.limit;
        let pass = v.pass && in_time;
        let tag = if pass { "PASS" } else { "FAIL" };
        let note = match (pass, v.known_gap) {
            (false, true) => " [known gap: inequality does not hold at these parameters]",
            _ => "",
        };
        let time = if in_time { String::new() } else { format!(" over time limit {}s", v.limit.as_secs()) };
        println!("{tag} criterion {:>2} {}: {} ({:.2}s{time}){note}", v.id, v.name, v.detail, v.elapsed.as_secs_f64());
        if !pass && !v.known_gap {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed unexpectedly");
        ExitCode::FAILURE
    }
}
