//! Monte Carlo estimates of the round statistics.
//!
//! Trial `j` draws its sample from stream `j` of the seed, so results do not
//! depend on how rayon splits the work. All accumulators are integers.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Mode, UnionInstance};
use crate::lab::exact::detect_normalized;
use crate::nibble::{measure_stats, sample_round_stream};
use crate::schedule::exceptional_bound;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub quantity: String,
    pub mean: f64,
    pub se: f64,
    pub formula: Option<f64>,
    /// `(mean - formula) / se`; zero when both sides agree exactly.
    pub z: Option<f64>,
}

impl Estimate {
    fn new(quantity: String, sum: f64, sum_sq: f64, trials: f64, formula: Option<f64>) -> Self {
        let mean = sum / trials;
        let var = ((sum_sq / trials - mean * mean) * trials / (trials - 1.0)).max(0.0);
        let se = (var / trials).sqrt();
        let z = formula.map(|f| {
            let diff = mean - f;
            if se > 0.0 {
                diff / se
            } else if diff.abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY.copysign(diff)
            }
        });
        Estimate { quantity, mean, se, formula, z }
    }

    /// Whether the estimate lies within `k` standard errors of its formula.
    pub fn within(&self, k: f64) -> bool {
        self.z.is_none_or(|z| z.abs() <= k)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub activated: usize,
    pub colored: usize,
    pub mean_ell: f64,
    pub d_exceeds_a_plus_k: usize,
    pub omega_star: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub trials: u64,
    pub p: f64,
    pub normalized: Option<(usize, usize, usize)>,
    /// Per-trial averages over all vertices / pairs / triples.
    pub pooled: Vec<Estimate>,
    /// One estimate per vertex, pair or triple.
    pub per_item: Vec<Estimate>,
    /// Trials in which some `(v, c, i)` had `d > a + k`.
    pub d_exceeds_a_plus_k_trials: u64,
    /// `ln D` threshold used for the exceptional outcomes.
    pub log_d: Option<f64>,
    /// Largest empirical frequency of an exceptional outcome over `(v, i)`.
    pub omega_star_max_freq: Option<f64>,
    pub omega_star_bound: Option<f64>,
    pub rows: Vec<TrialRow>,
}

#[derive(Clone, Debug)]
pub struct McOptions {
    pub trials: u64,
    pub seed: u64,
    /// `D` for the exceptional outcomes; defaults to the normalized degree.
    pub d_param: Option<f64>,
    pub record_trials: bool,
}

#[derive(Clone)]
struct Acc {
    /// Per item: sum and sum of squares.
    items: Vec<(u64, u64)>,
    /// Pooled per-trial totals: sum and sum of squares.
    pooled: [(u128, u128); 5],
    violations: u64,
    omega: Vec<u64>,
}

impl Acc {
    fn new(items: usize, balls: usize) -> Self {
        Acc { items: vec![(0, 0); items], pooled: [(0, 0); 5], violations: 0, omega: vec![0; balls] }
    }

    fn merge(mut self, other: Acc) -> Acc {
        for (a, b) in self.items.iter_mut().zip(other.items) {
            a.0 += b.0;
            a.1 += b.1;
        }
        for (a, b) in self.pooled.iter_mut().zip(other.pooled) {
            a.0 += b.0;
            a.1 += b.1;
        }
        self.violations += other.violations;
        for (a, b) in self.omega.iter_mut().zip(other.omega) {
            *a += b;
        }
        self
    }
}

/// Radius-2 balls `{v} ∪ N_{G_i}(v) ∪ N²_{G_i}(v)` for every `(v, i)` with `v ∈ G_i`.
fn balls(inst: &UnionInstance) -> Vec<(usize, usize, Vec<usize>)> {
    let mut out = Vec::new();
    for v in 0..inst.num_vertices() {
        for &gi in inst.membership(v) {
            let mut ball = vec![v];
            for &u in inst.member_neighbors(v, gi) {
                ball.push(u);
                ball.extend_from_slice(inst.member_neighbors(u, gi));
            }
            ball.sort_unstable();
            ball.dedup();
            out.push((v, gi, ball));
        }
    }
    out
}

pub fn monte_carlo(inst: &UnionInstance, asg: &Assignment, mode: Mode, p: f64, opts: &McOptions) -> Result<McReport> {
    if opts.trials < 2 {
        return Err(Error::Domain("at least two trials are needed for a standard error".into()));
    }
    let n = inst.num_vertices();
    let normalized = detect_normalized(inst, asg, mode);
    let d_param = opts.d_param.or(normalized.map(|(_, d, _)| d as f64));
    let log_d = d_param.map(f64::ln);

    // item layout: ell per vertex, keep per (v, c), free/a/k per (v, c, i)
    let pairs: Vec<(usize, u32)> = (0..n).flat_map(|v| asg.list(v).iter().map(move |&c| (v, c))).collect();
    let triples: Vec<(usize, u32, usize)> = (0..n)
        .flat_map(|v| asg.list(v).iter().flat_map(move |&c| inst.membership(v).iter().map(move |&g| (v, c, g))))
        .collect();
    let n_items = n + pairs.len() + 3 * triples.len();
    let balls = balls(inst);

    let trial = |j: u64| -> Result<(Vec<u64>, [u64; 5], bool, Vec<bool>, TrialRow)> {
        let sample = sample_round_stream(inst, asg, p, opts.seed, j)?;
        let stats = measure_stats(inst, asg, mode, &sample);
        let mut vals = Vec::with_capacity(n_items);
        vals.extend(stats.ell.iter().map(|&l| l as u64));
        // survivors from ℓ entries: c ∈ L_{A,ψ}(v) iff no activated neighbour hits (v, c)
        for &(v, c) in &pairs {
            let hit = inst
                .neighbors(v)
                .iter()
                .any(|&u| sample.activated[u] && asg.partner(mode, u, v, sample.tentative[u]) == Some(c));
            vals.push(u64::from(!hit));
        }
        let mut violated = false;
        // stats.entries follow the same (v, c, i) order as `triples`
        for e in &stats.entries {
            let free = !inst.member_neighbors(e.v, e.graph).iter().any(|&u| {
                sample.activated[u] && asg.partner(mode, e.v, u, e.c) == Some(sample.tentative[u])
            });
            vals.push(u64::from(free));
            vals.push(e.a as u64);
            vals.push(e.k as u64);
            violated |= e.d > e.a + e.k;
        }
        let mut pooled = [0u64; 5];
        pooled[0] = vals[..n].iter().sum();
        pooled[1] = vals[n..n + pairs.len()].iter().sum();
        for chunk in vals[n + pairs.len()..].chunks(3) {
            pooled[2] += chunk[0];
            pooled[3] += chunk[1];
            pooled[4] += chunk[2];
        }
        let omega: Vec<bool> = match log_d {
            None => Vec::new(),
            Some(ld) => {
                // heavy[u]: graphs G_i in which t_{u,c,i} ≥ ln D for some c ∈ L(u)
                let heavy: Vec<Vec<usize>> = (0..n)
                    .map(|u| {
                        inst.member_neighborhoods(u)
                            .iter()
                            .filter(|(_, nbrs)| {
                                asg.list(u).iter().any(|&c| {
                                    let t = nbrs
                                        .iter()
                                        .filter(|&&w| asg.partner(mode, u, w, c) == Some(sample.tentative[w]))
                                        .count();
                                    t as f64 >= ld
                                })
                            })
                            .map(|(gi, _)| *gi)
                            .collect()
                    })
                    .collect();
                balls.iter().map(|(_, gi, ball)| ball.iter().any(|&u| heavy[u].contains(gi))).collect()
            }
        };
        let row = TrialRow {
            trial: j,
            activated: sample.activated.iter().filter(|a| **a).count(),
            colored: (0..n)
                .filter(|&v| sample.activated[v] && stats_keeps(&sample, v, inst, asg, mode))
                .count(),
            mean_ell: pooled[0] as f64 / n.max(1) as f64,
            d_exceeds_a_plus_k: stats.entries.iter().filter(|e| e.d > e.a + e.k).count(),
            omega_star: omega.iter().filter(|o| **o).count(),
        };
        debug_assert_eq!(triples.len(), stats.entries.len());
        Ok((vals, pooled, violated, omega, row))
    };

    let results: Vec<Result<(Acc, Option<TrialRow>)>> = (0..opts.trials)
        .into_par_iter()
        .map(|j| {
            let (vals, pooled, violated, omega, row) = trial(j)?;
            let mut acc = Acc::new(n_items, balls.len());
            for (a, v) in acc.items.iter_mut().zip(vals) {
                *a = (v, v * v);
            }
            for (a, v) in acc.pooled.iter_mut().zip(pooled) {
                *a = (v as u128, (v as u128) * (v as u128));
            }
            acc.violations = u64::from(violated);
            for (a, o) in acc.omega.iter_mut().zip(omega) {
                *a = u64::from(o);
            }
            Ok((acc, opts.record_trials.then_some(row)))
        })
        .collect();
    let mut acc = Acc::new(n_items, balls.len());
    let mut rows = Vec::new();
    for r in results {
        let (a, row) = r?;
        acc = acc.merge(a);
        rows.extend(row);
    }

    let t = opts.trials as f64;
    let closed = normalized.map(|(lambda, d, c)| {
        let (l, d, cf) = (lambda as f64, d as f64, c as f64);
        let q = 1.0 - p / l;
        let keep_all = q.powf(d * cf);
        [keep_all * l, keep_all, q.powf(d), p * (1.0 - keep_all) * d, (1.0 - p) * q.powf(d * (cf - 1.0)) * d]
    });
    let f = |i: usize| closed.map(|c| c[i]);

    let counts = [n, pairs.len(), triples.len(), triples.len(), triples.len()];
    let names = ["ell", "keep_prob", "free_prob", "a", "k"];
    let pooled = (0..5)
        .map(|i| {
            let m = counts[i].max(1) as f64;
            let (s, sq) = acc.pooled[i];
            Estimate::new(names[i].to_string(), s as f64 / m, sq as f64 / (m * m), t, f(i))
        })
        .collect();

    let mut per_item = Vec::with_capacity(n_items);
    let mut it = acc.items.iter();
    for v in 0..n {
        let (s, sq) = *it.next().expect("item layout");
        per_item.push(Estimate::new(format!("ell[{}]", inst.vertex_id(v)), s as f64, sq as f64, t, f(0)));
    }
    for &(v, c) in &pairs {
        let (s, sq) = *it.next().expect("item layout");
        per_item.push(Estimate::new(format!("keep_prob[{},{c}]", inst.vertex_id(v)), s as f64, sq as f64, t, f(1)));
    }
    for &(v, c, gi) in &triples {
        for (k, name) in ["free_prob", "a", "k"].iter().enumerate() {
            let (s, sq) = *it.next().expect("item layout");
            let label = format!("{name}[{},{c},{}]", inst.vertex_id(v), inst.graph(gi).id);
            per_item.push(Estimate::new(label, s as f64, sq as f64, t, f(2 + k)));
        }
    }

    let omega_star_max_freq = log_d.map(|_| acc.omega.iter().copied().max().unwrap_or(0) as f64 / t);
    let omega_star_bound = d_param.map(|d| exceptional_bound(d, inst.c_bound()));
    Ok(McReport {
        trials: opts.trials,
        p,
        normalized,
        pooled,
        per_item,
        d_exceeds_a_plus_k_trials: acc.violations,
        log_d,
        omega_star_max_freq,
        omega_star_bound,
        rows,
    })
}

fn stats_keeps(sample: &crate::nibble::RoundSample, v: usize, inst: &UnionInstance, asg: &Assignment, mode: Mode) -> bool {
    let c = sample.tentative[v];
    !inst.neighbors(v).iter().any(|&u| sample.activated[u] && asg.partner(mode, u, v, sample.tentative[u]) == Some(c))
}

impl McReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scope,quantity,mean,se,formula,z\n");
        let opt = |x: Option<f64>| x.map(|x| format!("{x:.10e}")).unwrap_or_default();
        for (scope, list) in [("pooled", &self.pooled), ("item", &self.per_item)] {
            for e in list {
                out.push_str(&format!(
                    "{scope},\"{}\",{:.10e},{:.10e},{},{}\n",
                    e.quantity,
                    e.mean,
                    e.se,
                    opt(e.formula),
                    opt(e.z)
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::GraphSpec;

    fn k3() -> (UnionInstance, Assignment) {
        let inst = UnionInstance::new(1, vec![GraphSpec::complete("t", &["a", "b", "c"])]).unwrap();
        let asg = Assignment::uniform(&inst, 0, 2);
        (inst, asg)
    }

    #[test]
    fn zero_p_is_deterministic() {
        let (inst, asg) = k3();
        let opts = McOptions { trials: 1000, seed: 1, d_param: None, record_trials: false };
        let r = monte_carlo(&inst, &asg, Mode::List, 0.0, &opts).unwrap();
        for e in r.pooled.iter().chain(&r.per_item) {
            assert_eq!(e.se, 0.0, "{}", e.quantity);
        }
        assert_eq!(r.pooled[0].mean, 2.0);
        assert_eq!(r.pooled[3].mean, 0.0);
        assert!(r.pooled.iter().all(|e| e.within(0.0)));
    }

    #[test]
    fn reproducible_and_consistent() {
        let (inst, asg) = k3();
        let opts = McOptions { trials: 4000, seed: 9, d_param: None, record_trials: true };
        let a = monte_carlo(&inst, &asg, Mode::List, 0.3, &opts).unwrap();
        let b = monte_carlo(&inst, &asg, Mode::List, 0.3, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 4000);
        assert_eq!(a.d_exceeds_a_plus_k_trials, 0);
        assert!(a.pooled.iter().all(|e| e.within(4.0)), "{:?}", a.pooled);
    }
}
