//! Closed forms for one nibble round and the iteration schedule built from them.
//!
//! Powers of `1 - p/Λ` are evaluated as `exp(n · ln_1p(-p/Λ))`; the naive
//! power underflows long before the interesting range of `D`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters of one round: list target `Λ`, color-degree bound `D`,
/// membership bound `C`, activation probability `p` and slack `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NibbleParams {
    pub lambda: f64,
    pub d: f64,
    pub c: usize,
    pub p: f64,
    pub eps: f64,
}

impl NibbleParams {
    pub fn new(lambda: f64, d: f64, c: usize, p: f64, eps: f64) -> Result<Self> {
        if !(lambda > 0.0 && d > 0.0 && c >= 1 && p > 0.0 && p < 1.0 && eps > 0.0) {
            return Err(Error::Domain(format!(
                "need Λ > 0, D > 0, C ≥ 1, 0 < p < 1, ε > 0 (got Λ={lambda}, D={d}, C={c}, p={p}, ε={eps})"
            )));
        }
        Ok(NibbleParams { lambda, d, c, p, eps })
    }

    /// The asymptotic window `(1+ε)D ≤ Λ ≤ 10CD`, `1/ln D ≥ p ≥ 1/ln² D`.
    pub fn strict_window(&self) -> Result<()> {
        let ln_d = self.d.ln();
        let (lo, hi) = ((1.0 + self.eps) * self.d, 10.0 * self.c as f64 * self.d);
        if !(lo <= self.lambda && self.lambda <= hi) {
            return Err(Error::Domain(format!("Λ={} outside [(1+ε)D, 10CD] = [{lo}, {hi}]", self.lambda)));
        }
        if !(ln_d > 1.0 && 1.0 / ln_d >= self.p && self.p >= 1.0 / (ln_d * ln_d)) {
            return Err(Error::Domain(format!(
                "p={} outside [1/ln²D, 1/lnD] = [{}, {}]",
                self.p,
                1.0 / (ln_d * ln_d),
                1.0 / ln_d
            )));
        }
        Ok(())
    }

    pub fn keep(&self) -> Result<f64> {
        keep_value(self.lambda, self.d, self.c, self.p)
    }

    pub fn uncov(&self) -> Result<f64> {
        uncov_value(self.lambda, self.d, self.c, self.p)
    }

    /// Post-round list size target `⌈keep − Λ^{4/5}⌉`.
    pub fn list_target(&self) -> Result<f64> {
        Ok((self.keep()? - self.lambda.powf(0.8)).ceil())
    }

    /// Post-round color-degree bound `uncov + D^{4/5}`.
    pub fn degree_bound(&self) -> Result<f64> {
        Ok(self.uncov()? + self.d.powf(0.8))
    }
}

fn check_domain(lambda: f64, d: f64, c: usize, p: f64) -> Result<()> {
    if !(lambda > 0.0) || !(d >= 0.0) || !(p >= 0.0) || c == 0 {
        return Err(Error::Domain(format!("need Λ > 0, D ≥ 0, p ≥ 0, C ≥ 1 (got Λ={lambda}, D={d}, C={c}, p={p})")));
    }
    if p >= lambda {
        return Err(Error::Domain(format!("p={p} must be below Λ={lambda}")));
    }
    Ok(())
}

/// `ln(1 - p/Λ)`.
#[inline]
fn log_base(lambda: f64, p: f64) -> f64 {
    (-p / lambda).ln_1p()
}

/// `(1 - p/Λ)^exponent`.
pub fn survival_power(lambda: f64, p: f64, exponent: f64) -> Result<f64> {
    check_domain(lambda, 0.0, 1, p)?;
    Ok((exponent * log_base(lambda, p)).exp())
}

/// `keep(Λ, D, C, p) = (1 − p/Λ)^{DC} Λ`.
pub fn keep_value(lambda: f64, d: f64, c: usize, p: f64) -> Result<f64> {
    check_domain(lambda, d, c, p)?;
    Ok((d * c as f64 * log_base(lambda, p)).exp() * lambda)
}

/// `uncov(Λ, D, C, p) = ((1−p)(1−p/Λ)^{D(C−1)} + p(1 − (1−p/Λ)^{DC})) D`.
pub fn uncov_value(lambda: f64, d: f64, c: usize, p: f64) -> Result<f64> {
    check_domain(lambda, d, c, p)?;
    let lb = log_base(lambda, p);
    let kept_others = (d * (c - 1) as f64 * lb).exp();
    let hit_any = -(d * c as f64 * lb).exp_m1();
    Ok(((1.0 - p) * kept_others + p * hit_any) * d)
}

/// Expected number of activated, uncolored neighbours with a color:
/// `p (1 − (1−p/Λ)^{DC}) D`.
pub fn expected_active_uncolored(lambda: f64, d: f64, c: usize, p: f64) -> Result<f64> {
    check_domain(lambda, d, c, p)?;
    Ok(p * -(d * c as f64 * log_base(lambda, p)).exp_m1() * d)
}

/// Expected number of unactivated neighbours keeping a color against the
/// other member graphs: `(1−p)(1−p/Λ)^{D(C−1)} D`.
pub fn expected_kept_unactivated(lambda: f64, d: f64, c: usize, p: f64) -> Result<f64> {
    check_domain(lambda, d, c, p)?;
    Ok((1.0 - p) * (d * (c - 1) as f64 * log_base(lambda, p)).exp() * d)
}

/// `ln` of the left side of the local-lemma condition `4 e^{−D^{1/4}} (11C²D²)^4 ≤ 1`.
pub fn lll_log_condition(d: f64, c: usize) -> f64 {
    let c = c as f64;
    4f64.ln() - d.powf(0.25) + 4.0 * (11.0 * c * c * d * d).ln()
}

/// Bound on the exceptional outcome probability, `11³ C³ D⁵ (ln D)^{−ln D}`.
pub fn exceptional_bound(d: f64, c: usize) -> f64 {
    let ln_d = d.ln();
    (3.0 * 11f64.ln() + 3.0 * (c as f64).ln() + 5.0 * ln_d - ln_d * ln_d.ln()).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prop22Check {
    pub ratio_ok: bool,
    pub degree_ok: bool,
    /// `(keep − Λ^{4/5}) / (uncov + D^{4/5})`
    pub ratio_lhs: f64,
    /// `(1 + εp/4) Λ/D`
    pub ratio_rhs: f64,
    pub ratio_slack: f64,
    pub degree_lhs: f64,
    /// `(1 − pC) D`
    pub degree_rhs: f64,
    pub degree_slack: f64,
}

/// Evaluates the ratio-improvement and degree-maintenance inequalities.
pub fn check_prop22(params: &NibbleParams) -> Result<Prop22Check> {
    let NibbleParams { lambda, d, c, p, eps } = *params;
    let keep = keep_value(lambda, d, c, p)?;
    let uncov = uncov_value(lambda, d, c, p)?;
    let ratio_lhs = (keep - lambda.powf(0.8)) / (uncov + d.powf(0.8));
    let ratio_rhs = (1.0 + eps * p / 4.0) * lambda / d;
    let degree_rhs = (1.0 - p * c as f64) * d;
    Ok(Prop22Check {
        ratio_ok: ratio_lhs >= ratio_rhs,
        degree_ok: uncov >= degree_rhs,
        ratio_lhs,
        ratio_rhs,
        ratio_slack: ratio_lhs - ratio_rhs,
        degree_lhs: uncov,
        degree_rhs,
        degree_slack: uncov - degree_rhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `⌈Λ_i⌉ / D_i ≥ 8C`: hand over to the finisher.
    Threshold,
    /// Ran into `⌈33C/(εp)⌉ + 1` rounds without reaching the threshold.
    Cap,
    /// `Λ_{i+1} ≤ p` (or non-positive) before the threshold.
    Collapse,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Threshold => "threshold",
            StopReason::Cap => "cap",
            StopReason::Collapse => "collapse",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScheduleRow {
    pub i: usize,
    pub lambda: f64,
    pub d: f64,
    /// `Λ_i / D_i`
    pub ratio: f64,
    /// Whether the strict window held at this row.
    pub strict_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Schedule {
    pub rows: Vec<ScheduleRow>,
    pub p: f64,
    pub eps: f64,
    pub c: usize,
    pub i_star: Option<usize>,
    pub stop: StopReason,
    pub finisher_threshold: f64,
    /// `⌈33C/(εp)⌉`
    pub round_bound: usize,
}

impl Schedule {
    pub fn row_params(&self, i: usize) -> Result<NibbleParams> {
        let r = &self.rows[i];
        NibbleParams::new(r.lambda, r.d, self.c, self.p, self.eps)
    }

    /// CSV with header `i,Lambda_i,D_i,ratio,stop_reason`; the reason is set
    /// on the final row only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,Lambda_i,D_i,ratio,stop_reason\n");
        let last = self.rows.len().saturating_sub(1);
        for r in &self.rows {
            let reason = if r.i == self.rows[last].i { self.stop.as_str() } else { "" };
            out.push_str(&format!("{},{:.12e},{:.12e},{:.12e},{}\n", r.i, r.lambda, r.d, r.ratio, reason));
        }
        out
    }
}

/// Iterates `Λ_{i+1} = keep(Λ_i, D_i) − Λ_i^{4/5}`, `D_{i+1} = uncov(Λ_i, D_i) + D_i^{4/5}`
/// from `Λ_0 = (1+ε)D`, `D_0 = D`, with `p = 1/ln D` unless overridden.
pub fn build_schedule(d: f64, eps: f64, c: usize, p_override: Option<f64>) -> Result<Schedule> {
    if !(d > 1.0 && eps > 0.0 && c >= 1) {
        return Err(Error::Domain(format!("need D > 1, ε > 0, C ≥ 1 (got D={d}, ε={eps}, C={c})")));
    }
    let p = p_override.unwrap_or(1.0 / d.ln());
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p={p} outside (0, 1)")));
    }
    let threshold = 8.0 * c as f64;
    let round_bound = (33.0 * c as f64 / (eps * p)).ceil() as usize;
    let cap = round_bound + 1;
    let row = |i: usize, lambda: f64, d_i: f64| ScheduleRow {
        i,
        lambda,
        d: d_i,
        ratio: lambda / d_i,
        strict_ok: NibbleParams::new(lambda, d_i, c, p, eps).and_then(|np| np.strict_window()).is_ok(),
    };
    let mut rows = vec![row(0, (1.0 + eps) * d, d)];
    let stop = loop {
        let cur = *rows.last().unwrap();
        if cur.lambda.ceil() / cur.d >= threshold {
            break StopReason::Threshold;
        }
        if cur.i >= cap {
            break StopReason::Cap;
        }
        let (Ok(keep), Ok(uncov)) = (keep_value(cur.lambda, cur.d, c, p), uncov_value(cur.lambda, cur.d, c, p)) else {
            break StopReason::Collapse;
        };
        let next_lambda = keep - cur.lambda.powf(0.8);
        let next_d = uncov + cur.d.powf(0.8);
        rows.push(row(cur.i + 1, next_lambda, next_d));
        if next_lambda <= 0.0 {
            break StopReason::Collapse;
        }
    };
    let i_star = (stop == StopReason::Threshold).then(|| rows.last().unwrap().i);
    Ok(Schedule { rows, p, eps, c, i_star, stop, finisher_threshold: threshold, round_bound })
}
