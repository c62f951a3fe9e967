//! Coefficient experiments for the two deformed hypergeometric-type
//! operators: the series `c_n` (differential case) and `C_k` (q-case), their
//! denominators, p-adic ratio stability and the `q → 1` degeneration.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{is_prime, padic_expansion, rat, rat_to_string, smooth_factor, valuation, QFrac, Rat, Ring, TSeries};
use crate::oplang::{elaborate_diff, elaborate_q, parse, Dialect, OpLangError};
use crate::solver::{q_solutions_and_w, solve_monodromy, split_operator, w_via_shift_exp, SolverError};

pub const ARITH_OPERATOR: &str = "theta*(theta+1) + t^(1/2)*(x^(-1)*theta^2 + theta^2*x) + t*theta*(theta+1)";
pub const QDEF_OPERATOR: &str = "(y-1)*(q*y-1) + t^(1/2)*((y-1)^2*x + x^(-1)*(y-1)^2) + t*(y-1)*(q*y-1)";

/// Printed denominator exceptions `(p, n, α_p(n))`.
pub const ALPHA_EXCEPTIONS: [(u64, u32, u32); 3] = [(3, 6, 2), (3, 7, 4), (3, 8, 5)];

/// Printed coefficients of `g(p)` through `p^5`.
pub const G_COEFFS: [(i64, i64); 6] =
    [(1, 1), (-1, 12), (49, 144), (751, 8640), (28777, 518400), (6903793, 217728000)];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("max order too small: need at least {0}")]
    TooSmall(u32),
    #[error("odd power u^{0} has a nonzero coefficient")]
    OddPower(usize),
    #[error("linear coefficient of the characteristic polynomial is not zero")]
    NotEven,
    #[error("constant term of the characteristic polynomial is not 1")]
    ConstantTerm,
    #[error("coefficient list does not cover n = {0}")]
    Missing(u32),
    #[error(transparent)]
    Parse(#[from] OpLangError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Monodromy route for the differential experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Solver,
    ShiftExp,
}

impl FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "solver" => Ok(Route::Solver),
            "shift_exp" | "shift-exp" => Ok(Route::ShiftExp),
            _ => Err(format!("unknown route `{s}` (expected solver or shift_exp)")),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Solver => "solver",
            Route::ShiftExp => "shift_exp",
        })
    }
}

/// `c_n` for `1 <= n <= max_n`, indexed by the literal power of `t`.
#[derive(Clone, Debug, Serialize)]
pub struct ArithReport {
    pub max_n: u32,
    pub route: Route,
    pub coeffs: Vec<(u32, String)>,
    #[serde(skip)]
    pub values: Vec<Rat>,
}

impl ArithReport {
    pub fn c(&self, n: u32) -> Option<&Rat> {
        n.checked_sub(1).and_then(|i| self.values.get(i as usize))
    }
}

/// Even-power coefficients `s[2n]` for `n` in `1..=max`; odd powers must vanish.
fn even_part<K: Ring>(s: &TSeries<K>, max: u32) -> Result<Vec<K>, ExperimentError> {
    for i in (1..=(2 * max as usize + 1)).step_by(2) {
        if i < s.order().unwrap_or(usize::MAX) && !s.coeff(i).is_zero() {
            return Err(ExperimentError::OddPower(i));
        }
    }
    Ok((1..=max).map(|n| s.coeff(2 * n as usize)).collect())
}

/// Computes `w(ε) = ε² - λ(t)²` and reads `c_n` off `-λ²`.
pub fn run_arith(max_n: u32, route: Route) -> Result<ArithReport, ExperimentError> {
    if max_n < 4 {
        return Err(ExperimentError::TooSmall(4));
    }
    let order = 2 * max_n as usize + 2;
    let d = elaborate_diff(&parse(ARITH_OPERATOR, Dialect::Diff, 2)?, 2)?;
    let (op, _) = split_operator(&d, order)?;
    let w = match route {
        Route::Solver => solve_monodromy(&op)?.w,
        Route::ShiftExp => w_via_shift_exp(&op)?,
    };
    if !w.coeff(1).is_zero() {
        return Err(ExperimentError::NotEven);
    }
    let values = even_part(&w.coeff(0), max_n)?;
    let coeffs = values.iter().enumerate().map(|(i, c)| (i as u32 + 1, rat_to_string(c))).collect();
    Ok(ArithReport { max_n, route, coeffs, values })
}

/// `α_2(n) = ord_2(2^{n-1} n!)`, `α_p(n) = max_l l(n+1-p^l)` for odd `p <= n`.
pub fn alpha_generic(p: u64, n: u32) -> u32 {
    if p == 2 {
        let fact: u32 = (1..=n as u64).map(|m| m.trailing_zeros()).sum();
        return n - 1 + fact;
    }
    let mut best = 0i64;
    let mut pl = p as i64;
    let mut l = 1i64;
    while pl <= n as i64 + 1 {
        best = best.max(l * (n as i64 + 1 - pl));
        pl *= p as i64;
        l += 1;
    }
    best as u32
}

/// Predicted exponent including the printed exceptions.
pub fn alpha(p: u64, n: u32) -> (u32, bool) {
    match ALPHA_EXCEPTIONS.iter().find(|&&(q, m, _)| q == p && m == n) {
        Some(&(_, _, a)) => (a, true),
        None => (alpha_generic(p, n), false),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeExponent {
    pub p: u64,
    pub predicted: u32,
    pub observed: u32,
    pub exception: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DenomRow {
    pub n: u32,
    pub denominator: String,
    pub exponents: Vec<PrimeExponent>,
    /// Denominator has a prime factor larger than `n`.
    pub non_smooth: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DenomMismatch {
    pub n: u32,
    pub p: u64,
    pub predicted: u32,
    pub observed: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArithDenoms {
    pub rows: Vec<DenomRow>,
    pub mismatches: Vec<DenomMismatch>,
    pub flagged: Vec<u32>,
    pub warnings: Vec<String>,
}

impl ArithDenoms {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.flagged.is_empty()
    }
}

/// Compares `ord_p(den c_n)` with the predicted exponents for `2 <= n <= max_n`.
pub fn denom_analysis_arith(report: &ArithReport, max_n: u32) -> Result<ArithDenoms, ExperimentError> {
    let mut out = ArithDenoms { rows: Vec::new(), mismatches: Vec::new(), flagged: Vec::new(), warnings: Vec::new() };
    for &(p, n, _) in &ALPHA_EXCEPTIONS {
        if n > max_n {
            out.warnings.push(format!("exception for p = {p}, n = {n} lies outside the analysed range"));
        }
    }
    for n in 2..=max_n {
        let c = report.c(n).ok_or(ExperimentError::Missing(n))?;
        let den: &BigInt = c.denom();
        let f = smooth_factor(den, n as u64);
        let mut exponents = Vec::new();
        for p in (2..=n as u64).filter(|&p| is_prime(p)) {
            let (predicted, exception) = alpha(p, n);
            let observed = f.exponent(p);
            if predicted != observed {
                out.mismatches.push(DenomMismatch { n, p, predicted, observed });
            }
            exponents.push(PrimeExponent { p, predicted, observed, exception });
        }
        let non_smooth = !f.is_smooth();
        if non_smooth {
            out.flagged.push(n);
        }
        out.rows.push(DenomRow { n, denominator: den.to_string(), exponents, non_smooth });
    }
    Ok(out)
}

/// `g(p)` truncated after the printed coefficients.
pub fn g_truncated(p: u64) -> Rat {
    let pr = Rat::from_integer(p.into());
    G_COEFFS.iter().enumerate().fold(Rat::zero(), |acc, (i, &(a, b))| acc + rat(a, b) * Ring::pow(&pr, i as u64))
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub n: u32,
    pub ratio: String,
    pub valuation: Option<i64>,
    pub digits: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub p: u64,
    pub window: (u32, u32),
    pub rows: Vec<RatioRow>,
    /// Longest digit prefix shared by every ratio in the window.
    pub common_prefix: usize,
    /// Digits of `g(p)` that the printed coefficients determine.
    pub g_digits: Vec<u64>,
    /// Longest prefix shared by every ratio and `g(p)`.
    pub g_prefix: usize,
    /// Common prefixes over even and odd `n` separately.
    pub even_prefix: usize,
    pub odd_prefix: usize,
    pub warnings: Vec<String>,
}

fn common_prefix<'a>(rows: impl Iterator<Item = &'a RatioRow>, budget: usize) -> usize {
    let rows: Vec<&RatioRow> = rows.collect();
    let Some(first) = rows.first() else {
        return 0;
    };
    if rows.iter().any(|r| r.valuation != first.valuation || r.valuation.is_none()) {
        return 0;
    }
    (0..budget).take_while(|&i| rows.iter().all(|r| r.digits.get(i) == first.digits.get(i))).count()
}

/// p-adic digits of `-p c_{n+1}/c_n` across a window of `n`.
pub fn ratio_report(
    report: &ArithReport,
    p: u64,
    window: RangeInclusive<u32>,
    digits: usize,
) -> Result<RatioReport, ExperimentError> {
    let (lo, hi) = (*window.start(), *window.end());
    let mut warnings = Vec::new();
    if p < 13 {
        warnings.push(format!("p = {p} is below the range where ratio stability is expected"));
    }
    let upper = 2 * p * p - p;
    if lo as u64 <= p || hi as u64 >= upper {
        warnings.push(format!("window {lo}..={hi} leaves the range {p} < n < {upper}"));
    }
    let pr = Rat::from_integer(p.into());
    let mut rows = Vec::new();
    for n in window {
        let a = report.c(n).ok_or(ExperimentError::Missing(n))?;
        let b = report.c(n + 1).ok_or(ExperimentError::Missing(n + 1))?;
        let ratio = match a.inv() {
            Some(ai) => -(pr.clone() * b * ai),
            None => {
                warnings.push(format!("c_{n} = 0, ratio undefined"));
                Rat::zero()
            }
        };
        let e = padic_expansion(&ratio, p, digits);
        rows.push(RatioRow { n, ratio: rat_to_string(&ratio), valuation: e.valuation, digits: e.digits });
    }
    let g = padic_expansion(&g_truncated(p), p, G_COEFFS.len().min(digits));
    let g_row = RatioRow { n: 0, ratio: String::new(), valuation: g.valuation, digits: g.digits.clone() };
    let g_prefix = common_prefix(rows.iter().chain(std::iter::once(&g_row)), g.digits.len());
    Ok(RatioReport {
        p,
        window: (lo, hi),
        common_prefix: common_prefix(rows.iter(), digits),
        even_prefix: common_prefix(rows.iter().filter(|r| r.n % 2 == 0), digits),
        odd_prefix: common_prefix(rows.iter().filter(|r| r.n % 2 == 1), digits),
        g_digits: g.digits,
        g_prefix,
        rows,
        warnings,
    })
}

/// `C_k` for `1 <= k <= max_k`.
#[derive(Clone, Debug, Serialize)]
pub struct QDefReport {
    pub max_k: u32,
    pub coeffs: Vec<(u32, String)>,
    #[serde(skip)]
    pub values: Vec<QFrac>,
}

impl QDefReport {
    pub fn c(&self, k: u32) -> Option<&QFrac> {
        k.checked_sub(1).and_then(|i| self.values.get(i as usize))
    }
}

/// Computes `w(ξ) = ξ² - 2ξ + 1 + C(t)ξ` and reads off `C_k`.
pub fn run_qdef(max_k: u32) -> Result<QDefReport, ExperimentError> {
    if max_k < 4 {
        return Err(ExperimentError::TooSmall(4));
    }
    let order = 2 * max_k as usize + 2;
    let d = elaborate_q(&parse(QDEF_OPERATOR, Dialect::QDiff, 2)?, 2)?;
    let (op, _) = split_operator(&d, order)?;
    let m = q_solutions_and_w(&op)?;
    if !m.w.coeff(0).is_one() {
        return Err(ExperimentError::ConstantTerm);
    }
    let c = m.w.coeff(1).add(&TSeries::from_i64(2));
    let values = even_part(&c, max_k)?;
    let coeffs = values.iter().enumerate().map(|(i, c)| (i as u32 + 1, c.to_string())).collect();
    Ok(QDefReport { max_k, coeffs, values })
}

#[derive(Clone, Debug, Serialize)]
pub struct QDenomRow {
    pub k: u32,
    /// `l ↦ exponent of Φ_l`.
    pub observed: BTreeMap<u64, u32>,
    pub predicted: BTreeMap<u64, u32>,
    pub pattern_ok: bool,
    /// `C_k/(q-1)²` at `q = 1`, when defined.
    pub at_one: Option<String>,
    pub c_k: Option<String>,
    pub q1_ok: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QDenoms {
    pub rows: Vec<QDenomRow>,
    pub ok: bool,
}

/// `Π_{l=3}^k Φ_l^{k+1-l} · Φ_2^{2k-2}`.
pub fn predicted_q_denominator(k: u32) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    if k >= 2 {
        out.insert(2, 2 * k - 2);
    }
    for l in 3..=k {
        out.insert(l as u64, k + 1 - l);
    }
    out
}

/// Cyclotomic denominators against the pattern, plus the `q → 1` check
/// against `c_k` when an arithmetic report is supplied.
pub fn denom_analysis_q(report: &QDefReport, arith: Option<&ArithReport>) -> QDenoms {
    let inv_sq = QFrac::inv_cyclotomic(1, 2);
    let rows: Vec<QDenomRow> = (1..=report.max_k)
        .filter_map(|k| report.c(k).map(|c| (k, c)))
        .map(|(k, c)| {
            let observed = c.denominator().clone();
            let predicted = if c.is_zero() { BTreeMap::new() } else { predicted_q_denominator(k) };
            let at_one = c.mul(&inv_sq).eval_rat(&<Rat as Ring>::one());
            let c_k = arith.and_then(|a| a.c(k)).cloned();
            let q1_ok = match (&at_one, &c_k) {
                (Some(v), Some(w)) => Some(v == w),
                (None, Some(_)) => Some(false),
                _ => None,
            };
            QDenomRow {
                k,
                pattern_ok: observed == predicted,
                observed,
                predicted,
                at_one: at_one.as_ref().map(rat_to_string),
                c_k: c_k.as_ref().map(rat_to_string),
                q1_ok,
            }
        })
        .collect();
    let ok = rows.iter().all(|r| r.pattern_ok && r.q1_ok != Some(false));
    QDenoms { rows, ok }
}

/// Exponent of `p` in the denominator of `x` (zero for `x = 0`).
pub fn den_valuation(x: &Rat, p: u64) -> u32 {
    if x.denom().is_one() {
        0
    } else {
        valuation(x.denom(), p)
    }
}
