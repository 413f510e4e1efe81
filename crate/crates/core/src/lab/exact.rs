//! Exact expectations by enumerating every `(A, ψ)`.
//!
//! Deliberately independent of the round engine: every quantity is evaluated
//! straight from its set definition on each outcome.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Color, Mode, UnionInstance};

pub const DEFAULT_BUDGET: f64 = 1e7;

/// `(Λ, D, C)` when every list has `Λ` colors, every vertex lies in `C`
/// graphs and every color degree is `D`.
pub fn detect_normalized(inst: &UnionInstance, asg: &Assignment, mode: Mode) -> Option<(usize, usize, usize)> {
    let n = inst.num_vertices();
    if n == 0 {
        return None;
    }
    let lambda = asg.list(0).len();
    let c = inst.c_bound();
    let mut d = None;
    for v in 0..n {
        if asg.list(v).len() != lambda || inst.membership(v).len() != c {
            return None;
        }
        for &gi in inst.membership(v) {
            for &col in asg.list(v) {
                let deg = inst.member_neighbors(v, gi).iter().filter(|&&u| asg.partner(mode, v, u, col).is_some()).count();
                match d {
                    None => d = Some(deg),
                    Some(x) if x != deg => return None,
                    _ => {}
                }
            }
        }
    }
    d.map(|d| (lambda, d, c))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactRow {
    /// One of `ell`, `keep_prob`, `free_prob`, `a`, `k`, `d`, `t`.
    pub quantity: &'static str,
    pub vertex: String,
    pub color: Option<Color>,
    pub graph: Option<String>,
    pub exact: f64,
    pub formula: Option<f64>,
    pub abs_diff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactExpectationReport {
    pub outcomes: f64,
    pub weight_sum: f64,
    /// `(Λ, D, C)` if the instance is normalized.
    pub normalized: Option<(usize, usize, usize)>,
    pub p: f64,
    pub rows: Vec<ExactRow>,
    /// Largest `|exact - formula|` over the compared rows.
    pub max_abs_diff: Option<f64>,
    /// Weight of outcomes where some `d > a + k`.
    pub d_exceeds_a_plus_k_weight: f64,
}

impl ExactExpectationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,vertex,color,graph,exact,formula,abs_diff\n");
        let opt = |x: Option<f64>| x.map(|x| format!("{x:.15e}")).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.15e},{},{}\n",
                r.quantity,
                r.vertex,
                r.color.map(|c| c.to_string()).unwrap_or_default(),
                r.graph.clone().unwrap_or_default(),
                r.exact,
                opt(r.formula),
                opt(r.abs_diff)
            ));
        }
        out
    }
}

/// Number of `(A, ψ)` outcomes: `2^n · ∏ |L(v)|`.
pub fn outcome_count(inst: &UnionInstance, asg: &Assignment) -> f64 {
    (0..inst.num_vertices()).fold(1.0, |acc, v| acc * 2.0 * asg.list(v).len() as f64)
}

/// Enumerates `(A, ψ)` with `A` as a bitmask and `ψ` in mixed radix.
pub fn exact_expectations(
    inst: &UnionInstance,
    asg: &Assignment,
    mode: Mode,
    p: f64,
    budget: f64,
) -> Result<ExactExpectationReport> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
    }
    let n = inst.num_vertices();
    let outcomes = outcome_count(inst, asg);
    if outcomes > budget || n >= 63 {
        return Err(Error::Budget { size: outcomes, budget });
    }
    for v in 0..n {
        if asg.list(v).is_empty() {
            return Err(Error::EmptyList(inst.vertex_id(v).to_string()));
        }
    }

    // (v, c, i) triples in canonical order
    let mut triples = Vec::new();
    for v in 0..n {
        for &c in asg.list(v) {
            for &gi in inst.membership(v) {
                triples.push((v, c, gi));
            }
        }
    }
    let pairs: Vec<(usize, Color)> = (0..n).flat_map(|v| asg.list(v).iter().map(move |&c| (v, c))).collect();

    let mut e_ell = vec![0.0; n];
    let mut keep_prob = vec![0.0; pairs.len()];
    let mut sums = vec![[0.0f64; 5]; triples.len()]; // a, k, d, t, free
    let mut weight_sum = 0.0;
    let mut violation = 0.0;

    let radix: Vec<usize> = (0..n).map(|v| asg.list(v).len()).collect();
    let list_weight: f64 = radix.iter().map(|&r| 1.0 / r as f64).product();
    let mut digits = vec![0usize; n];
    let mut in_a = vec![false; n];
    let mut psi = vec![0 as Color; n];
    let mut survivors: Vec<Vec<Color>> = vec![Vec::new(); n];
    let mut in_x = vec![false; n];

    for mask in 0u64..(1u64 << n) {
        let size = mask.count_ones() as i32;
        let w_a = p.powi(size) * (1.0 - p).powi(n as i32 - size);
        for (v, a) in in_a.iter_mut().enumerate() {
            *a = mask >> v & 1 == 1;
        }
        digits.iter_mut().for_each(|d| *d = 0);
        loop {
            for v in 0..n {
                psi[v] = asg.list(v)[digits[v]];
            }
            let w = w_a * list_weight;
            weight_sum += w;

            // L_{A,ψ}(v) = {c ∈ L(v) : no u ∈ N_G(v) ∩ A with (v, c) ∈ N(u, ψ(u))}
            for v in 0..n {
                survivors[v] = asg
                    .list(v)
                    .iter()
                    .copied()
                    .filter(|&c| {
                        !inst.neighbors(v).iter().any(|&u| in_a[u] && asg.partner(mode, u, v, psi[u]) == Some(c))
                    })
                    .collect();
            }
            for v in 0..n {
                in_x[v] = in_a[v] && survivors[v].contains(&psi[v]);
            }
            for v in 0..n {
                e_ell[v] += w * survivors[v].len() as f64;
            }
            for (idx, &(v, c)) in pairs.iter().enumerate() {
                if survivors[v].contains(&c) {
                    keep_prob[idx] += w;
                }
            }
            let mut bad = false;
            for (idx, &(v, c, gi)) in triples.iter().enumerate() {
                let (mut a, mut k, mut d, mut t) = (0usize, 0usize, 0usize, 0usize);
                let mut free = true;
                for &u in inst.member_neighbors(v, gi) {
                    let Some(cu) = asg.partner(mode, v, u, c) else { continue };
                    if psi[u] == cu {
                        t += 1;
                        if in_a[u] {
                            free = false;
                        }
                    }
                    if survivors[u].contains(&cu) && !in_x[u] {
                        d += 1;
                    }
                    if in_a[u] && !in_x[u] {
                        a += 1;
                    }
                    if !in_a[u] {
                        // u ∉ ⋃ N_G(w) over w ∈ A \ V(G_i) whose tentative color hits (u, cu)
                        let covered = inst.neighbors(u).iter().any(|&w| {
                            in_a[w] && !inst.contains(gi, w) && asg.partner(mode, w, u, psi[w]) == Some(cu)
                        });
                        if !covered {
                            k += 1;
                        }
                    }
                }
                if d > a + k {
                    bad = true;
                }
                let s = &mut sums[idx];
                s[0] += w * a as f64;
                s[1] += w * k as f64;
                s[2] += w * d as f64;
                s[3] += w * t as f64;
                if free {
                    s[4] += w;
                }
            }
            if bad {
                violation += w;
            }

            // next ψ in mixed radix
            let mut pos = 0;
            while pos < n {
                digits[pos] += 1;
                if digits[pos] < radix[pos] {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }

    let normalized = detect_normalized(inst, asg, mode);
    let closed = normalized.map(|(lambda, d, c)| {
        let (l, d, cf) = (lambda as f64, d as f64, c as f64);
        let q = 1.0 - p / l;
        let keep_all = q.powf(d * cf);
        ClosedForms {
            ell: keep_all * l,
            keep_prob: keep_all,
            free_prob: q.powf(d),
            a: p * (1.0 - keep_all) * d,
            k: (1.0 - p) * q.powf(d * (cf - 1.0)) * d,
        }
    });

    let mut rows = Vec::new();
    let mut max_diff: Option<f64> = None;
    let mut push = |quantity, v: usize, color, graph: Option<usize>, exact: f64, formula: Option<f64>| {
        let abs_diff = formula.map(|f| (exact - f).abs());
        if let Some(dd) = abs_diff {
            max_diff = Some(max_diff.map_or(dd, |m: f64| m.max(dd)));
        }
        rows.push(ExactRow {
            quantity,
            vertex: inst.vertex_id(v).to_string(),
            color,
            graph: graph.map(|g| inst.graph(g).id.clone()),
            exact,
            formula,
            abs_diff,
        });
    };
    for v in 0..n {
        push("ell", v, None, None, e_ell[v], closed.as_ref().map(|f| f.ell));
    }
    for (idx, &(v, c)) in pairs.iter().enumerate() {
        push("keep_prob", v, Some(c), None, keep_prob[idx], closed.as_ref().map(|f| f.keep_prob));
    }
    for (idx, &(v, c, gi)) in triples.iter().enumerate() {
        let s = sums[idx];
        push("free_prob", v, Some(c), Some(gi), s[4], closed.as_ref().map(|f| f.free_prob));
        push("a", v, Some(c), Some(gi), s[0], closed.as_ref().map(|f| f.a));
        push("k", v, Some(c), Some(gi), s[1], closed.as_ref().map(|f| f.k));
        push("d", v, Some(c), Some(gi), s[2], None);
        push("t", v, Some(c), Some(gi), s[3], None);
    }
    Ok(ExactExpectationReport {
        outcomes,
        weight_sum,
        normalized,
        p,
        rows,
        max_abs_diff: max_diff,
        d_exceeds_a_plus_k_weight: violation,
    })
}

struct ClosedForms {
    ell: f64,
    keep_prob: f64,
    free_prob: f64,
    a: f64,
    k: f64,
}
