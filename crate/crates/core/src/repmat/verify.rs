use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::prep::{extension_degree, rho_p_point, rho_p_symbolic, PRep};
use super::qrep::{rho_n_point, rho_n_symbolic, QRep};
use super::RepError;
use crate::exact::{
    int, is_prime, series_exp, DiffVar, GfCtx, Matrix, PoleSum, QFrac, QRoot, QVar, Rat, RatFunc, Ring, TSeries, UPoly,
};
use crate::opalg::{left_div_by_p, zero_mode_log1p_poles, NormalOp, OpSeries};
use crate::shiftcalc::{r_eps, r_n_eps, r_n_eps_poles, t_eps, t_eps_poles, EpsLaurent};
use crate::solver::{q_solutions_and_w, solve_monodromy, MonodromyPoly, SplitOperator};

/// How the `ξ, η` dependence is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    /// Exact Laurent polynomials in `ξ, η`.
    Symbolic,
    /// Random points; `F_{p^d}` for primes, rationals for roots of unity.
    Random { trials: usize, seed: u64 },
    /// Symbolic up to `cap`, random above it.
    Auto { cap: u64, trials: usize, seed: u64 },
}

impl Mode {
    fn resolve(&self, dim: u64) -> Mode {
        match *self {
            Mode::Auto { cap, trials, seed } if dim > cap => Mode::Random { trials, seed },
            Mode::Auto { .. } => Mode::Symbolic,
            m => m,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Mode::Symbolic => "symbolic",
            Mode::Random { .. } => "random",
            Mode::Auto { .. } => "auto",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Failure at a prime or level below every passing one.
    BelowThreshold,
    Skipped,
    /// Some denominator of the closed form vanishes modulo `Φ_n`.
    OutOfRange,
}

/// Outcome at one prime `p` or level `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseResult {
    pub level: u64,
    pub mode: String,
    pub status: Status,
    /// Lowest `u`-order with a mismatch.
    pub first_mismatch: Option<usize>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub check: String,
    pub cases: Vec<CaseResult>,
    /// Smallest level from which every tested level passes.
    pub threshold: Option<u64>,
    pub ok: bool,
}

impl VerifyReport {
    pub fn case(&self, level: u64) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.level == level)
    }
}

/// Sorts cases by level and reclassifies failures that precede every pass as
/// below threshold; a failure after a pass keeps every failure genuine.
pub fn classify(check: &str, mut cases: Vec<CaseResult>) -> VerifyReport {
    cases.sort_by_key(|c| c.level);
    let first_pass = cases.iter().position(|c| c.status == Status::Pass);
    let late_fail = first_pass.is_some_and(|i| cases[i..].iter().any(|c| c.status == Status::Fail));
    let mut threshold = None;
    if let (Some(i), false) = (first_pass, late_fail) {
        threshold = Some(cases[i].level);
        for c in cases[..i].iter_mut().filter(|c| c.status == Status::Fail) {
            c.status = Status::BelowThreshold;
        }
    }
    let ok = first_pass.is_some() && !cases.iter().any(|c| c.status == Status::Fail);
    VerifyReport { check: check.to_string(), cases, threshold, ok }
}

fn first_mismatch<R: Ring>(a: &TSeries<R>, b: &TSeries<R>, order: usize) -> Option<usize> {
    (0..order).find(|&i| a.coeff(i) != b.coeff(i))
}

fn merge(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

fn series_const<R: Ring>(r: R, order: usize) -> TSeries<R> {
    TSeries::with_order(vec![r], order)
}

/// A comparison that can run in any coefficient ring of `ρ_p`.
trait PrimeCheck: Sync {
    fn check<R: Ring>(&self, rep: &PRep<R>) -> Result<Option<usize>, RepError>;
    /// Rough total `ξ, η` degree of the identity at `p`, for the field size.
    fn degree(&self, p: u64) -> u64;
}

/// A comparison that can run in any coefficient ring of `ρ_n`.
trait LevelCheck: Sync {
    fn check<R: Ring>(&self, rep: &QRep<R>) -> Result<Option<usize>, RepError>;
}

fn outcome(level: u64, mode: &str, r: Result<Option<usize>, RepError>, note: String) -> CaseResult {
    let (status, first_mismatch, note) = match r {
        Ok(None) => (Status::Pass, None, note),
        Ok(Some(i)) => (Status::Fail, Some(i), note),
        Err(RepError::OutOfRangeLevel(_)) => (Status::OutOfRange, None, "denominator vanishes mod Phi_n".into()),
        Err(e) => (Status::Skipped, None, e.to_string()),
    };
    CaseResult { level, mode: mode.to_string(), status, first_mismatch, note }
}

fn run_prime<C: PrimeCheck>(c: &C, p: u64, mode: &Mode) -> CaseResult {
    if !is_prime(p) {
        return outcome(p, "none", Err(RepError::BadReduction(p)), String::new());
    }
    let mode = mode.resolve(p);
    match mode {
        Mode::Random { trials, seed } => {
            let d = extension_degree(p, c.degree(p));
            let ctx = GfCtx::new(p, d);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut worst = Ok(None);
            let mut singular = 0;
            for _ in 0..trials {
                let xi = ctx.random_nonzero(&mut rng);
                let eta = ctx.random_nonzero(&mut rng);
                let r = rho_p_point(&ctx, xi, eta).and_then(|rep| c.check(&rep));
                worst = match (worst, r) {
                    (Ok(a), Ok(b)) => Ok(merge(a, b)),
                    (_, Err(RepError::Singular(_))) | (Err(RepError::Singular(_)), _) => {
                        singular += 1;
                        Ok(None)
                    }
                    (Err(e), _) | (_, Err(e)) => Err(e),
                };
            }
            let note = format!("F_{p}^{d}, {trials} points, {singular} singular");
            outcome(p, mode.label(), worst, note)
        }
        _ => outcome(p, mode.label(), rho_p_symbolic(p).and_then(|rep| c.check(&rep)), String::new()),
    }
}

fn run_level<C: LevelCheck>(c: &C, n: u64, mode: &Mode) -> CaseResult {
    let mode = mode.resolve(n);
    match mode {
        Mode::Random { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut worst = Ok(None);
            for _ in 0..trials {
                let xi = int(rng.gen_range(2..1_000_000));
                let eta = int(rng.gen_range(2..1_000_000));
                let rep = rho_n_point(n as usize, &xi, &eta);
                worst = match (worst, c.check(&rep)) {
                    (Ok(a), Ok(b)) => Ok(merge(a, b)),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                };
            }
            outcome(n, mode.label(), worst, format!("{trials} rational points"))
        }
        _ => outcome(n, mode.label(), c.check(&rho_n_symbolic(n as usize)), String::new()),
    }
}

/// `Σ_j c_j ε^{shift-j}` at `ε`, with `ε^{-1}` for negative powers.
fn laurent_at<R: Ring>(
    rep: &PRep<R>,
    c: &EpsLaurent<Rat>,
    shift: usize,
    eps: &R,
    eps_inv: &R,
) -> Result<R, RepError> {
    let mut acc = R::zero();
    for (j, cj) in c.coeffs().iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        let e = shift as i64 - j as i64;
        let pw = if e >= 0 { eps.pow(e as u64) } else { eps_inv.pow(e.unsigned_abs()) };
        acc = acc.add(&rep.embed(cj)?.mul(&pw));
    }
    Ok(acc)
}

fn func_size<V: crate::exact::VarKind>(a: &NormalOp<V>) -> u64 {
    let shift = a.max_shift() as u64;
    let f = a
        .terms()
        .map(|(_, f)| f.numerator().degree().unwrap_or(0) as u64 + f.denominator().values().map(|&m| m as u64).sum::<u64>())
        .max()
        .unwrap_or(0);
    shift + f + 1
}

fn pinv<V: crate::exact::VarKind>(roots: &[V::Root]) -> NormalOp<V> {
    NormalOp::from_func(RatFunc::inv_roots(roots))
}

struct TraceCheck {
    a: NormalOp<DiffVar>,
    rhs: EpsLaurent<Rat>,
    size: u64,
}

impl PrimeCheck for TraceCheck {
    fn check<R: Ring>(&self, rep: &PRep<R>) -> Result<Option<usize>, RepError> {
        let (eps, eps_inv) = rep.eps()?;
        let lhs = rep.op(&self.a)?.trace();
        let rhs = laurent_at(rep, &self.rhs, 0, &eps, &eps_inv)?;
        Ok((lhs != rhs).then_some(0))
    }

    fn degree(&self, p: u64) -> u64 {
        2 * p * self.size
    }
}

/// Trace of `ρ_p(P^{-1}D_1P^{-1}…D_NP^{-1})` against `T_ε` of its zero mode
/// at `ε = -ξ^pη^p`.
pub fn verify_trace_thm21(roots: &[Rat], ds: &[NormalOp<DiffVar>], primes: &[u64], mode: &Mode) -> VerifyReport {
    let pi = pinv::<DiffVar>(roots);
    let a = ds.iter().fold(pi.clone(), |acc, d| acc.mul(d).mul(&pi));
    let rhs = t_eps(&a.zero_mode());
    let size = 1 + roots.len() as u64 * (ds.len() as u64 + 1) + ds.iter().map(func_size).sum::<u64>();
    let c = TraceCheck { a, rhs, size };
    let cases = primes.par_iter().map(|&p| run_prime(&c, p, mode)).collect();
    classify("trace", cases)
}

struct DetCheck {
    k: usize,
    order: usize,
    roots: Vec<Rat>,
    q: OpSeries<DiffVar>,
    exp_data: TSeries<EpsLaurent<Rat>>,
    w: Option<MonodromyPoly<Rat>>,
    size: u64,
}

impl PrimeCheck for DetCheck {
    fn check<R: Ring>(&self, rep: &PRep<R>) -> Result<Option<usize>, RepError> {
        let n = rep.p as usize;
        let order = self.order;
        let (eps, eps_inv) = rep.eps()?;
        let mut det_p = R::one();
        for r in &self.roots {
            let m = rep.theta().sub(&Matrix::scalar(n, &rep.embed(r)?));
            det_p = det_p.mul(&m.det_berkowitz());
        }
        let pi = rep.op(&pinv::<DiffVar>(&self.roots))?.map(|v| series_const(v.clone(), order));
        let qm = rep.op_series(&self.q, order)?;
        let lhs = Matrix::identity(n).add(&pi.mul(&qm)).det().mul(&series_const(det_p, order));

        let sign = if self.k % 2 == 1 { R::one().neg() } else { R::one() };
        let closed: Vec<R> = (0..order)
            .map(|m| Ok(laurent_at(rep, &self.exp_data.coeff(m), self.k, &eps, &eps_inv)?.mul(&sign)))
            .collect::<Result<_, RepError>>()?;
        let mut bad = first_mismatch(&lhs, &TSeries::with_order(closed, order), order);
        if let Some(w) = &self.w {
            let mut vals = vec![R::zero(); order];
            for (i, wi) in w.coeffs().iter().enumerate() {
                let pw = eps.pow(i as u64);
                for (m, v) in vals.iter_mut().enumerate() {
                    *v = v.add(&rep.embed(&wi.coeff(m))?.mul(&pw));
                }
            }
            let via_w = TSeries::with_order(vals.into_iter().map(|v| v.mul(&sign)).collect(), order);
            bad = merge(bad, first_mismatch(&lhs, &via_w, order));
        }
        Ok(bad)
    }

    fn degree(&self, p: u64) -> u64 {
        2 * p * self.size
    }
}

/// `det ρ_p(P + Q)` against the closed exponential form and, when the
/// solver succeeds, against `(-1)^k Π w_i(-ξ^pη^p)`.
pub fn verify_det_thm22(op: &SplitOperator<DiffVar>, primes: &[u64], mode: &Mode) -> Result<VerifyReport, RepError> {
    let order = op.q.order().ok_or(crate::solver::SolverError::Untruncated)?;
    let zm = zero_mode_log1p_poles(&left_div_by_p(&op.roots, &op.q))?;
    let exp_data = series_exp(&t_eps_poles(&zm))?;
    let w = solve_monodromy(op).ok().map(|m| m.w);
    let q_size: u64 = op.q.coeffs().iter().map(func_size).sum();
    let k = op.roots.len();
    let c = DetCheck { k, order, roots: op.roots.clone(), q: op.q.clone(), exp_data, w, size: k as u64 + q_size };
    let cases = primes.par_iter().map(|&p| run_prime(&c, p, mode)).collect();
    let check = if c.w.is_some() { "det (three routes)" } else { "det (two routes)" };
    Ok(classify(check, cases))
}

struct QTraceCheck {
    a: NormalOp<QVar>,
}

impl LevelCheck for QTraceCheck {
    fn check<R: Ring>(&self, rep: &QRep<R>) -> Result<Option<usize>, RepError> {
        let lhs = rep.op(&self.a)?.trace();
        let rhs = rep.eval_eta_n(&r_n_eps(&self.a.zero_mode(), rep.n as u64))?;
        Ok((lhs != rhs).then_some(0))
    }
}

/// Trace of `ρ_n(P^{-1}D_1…D_NP^{-1})` against `R_{n,ε}` of its zero mode
/// at `q^ε = η`.
pub fn verify_q_trace(roots: &[QRoot], ds: &[NormalOp<QVar>], levels: &[u64], mode: &Mode) -> VerifyReport {
    let pi = pinv::<QVar>(roots);
    let a = ds.iter().fold(pi.clone(), |acc, d| acc.mul(d).mul(&pi));
    let c = QTraceCheck { a };
    let cases = levels.par_iter().map(|&n| run_level(&c, n, mode)).collect();
    classify("q trace", cases)
}

struct QDetCheck {
    k: usize,
    order: usize,
    p: UPoly<QFrac>,
    roots: Vec<QRoot>,
    q: OpSeries<QVar>,
    zm: Vec<PoleSum<QVar>>,
    w: Option<MonodromyPoly<QFrac>>,
}

impl QDetCheck {
    fn series<R: Ring>(&self, rep: &QRep<R>, s: &TSeries<QFrac>) -> Result<TSeries<R>, RepError> {
        let c = (0..self.order).map(|m| rep.reduce(&s.coeff(m))).collect::<Result<_, _>>()?;
        Ok(TSeries::with_order(c, self.order))
    }
}

impl LevelCheck for QDetCheck {
    fn check<R: Ring>(&self, rep: &QRep<R>) -> Result<Option<usize>, RepError> {
        let n = rep.n;
        let order = self.order;
        let det_p = rep.op(&NormalOp::from_func(RatFunc::from_poly(self.p.clone())))?.det();
        let pi = rep.op(&pinv::<QVar>(&self.roots))?.map(|v| series_const(v.clone(), order));
        let qm = rep.op_series(&self.q, order)?;
        let lhs = Matrix::identity(n).add(&pi.mul(&qm)).det().mul(&series_const(det_p, order));

        let e = series_exp(&r_n_eps_poles(&self.zm, n as u64))?;
        let sign = if self.k * (n - 1) % 2 == 1 { R::one().neg() } else { R::one() };
        let mut closed = Vec::with_capacity(order);
        for m in 0..order {
            let mut acc = R::zero();
            for (j, c) in e.coeff(m).coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let pw = if j <= self.k { rep.delta_pow(self.k - j) } else { rep.delta_inv.pow((j - self.k) as u64) };
                acc = acc.add(&rep.reduce(c)?.mul(&pw));
            }
            closed.push(acc.mul(&sign));
        }
        let mut bad = first_mismatch(&lhs, &TSeries::with_order(closed, order), order);
        if let Some(w) = &self.w {
            let coeffs: Vec<TSeries<R>> = w.coeffs().iter().map(|c| self.series(rep, c)).collect::<Result<_, _>>()?;
            let wr = UPoly::new(coeffs);
            let mut prod = series_const(R::one(), order);
            for j in 0..n {
                prod = prod.mul(&wr.eval(&series_const(rep.q_pow(j as i64).mul(&rep.eta), order)));
            }
            bad = merge(bad, first_mismatch(&lhs, &prod, order));
        }
        Ok(bad)
    }
}

/// Largest `y`-degree among the coefficients of a q-operator series.
fn y_degree(q: &OpSeries<QVar>) -> i64 {
    q.coeffs()
        .iter()
        .flat_map(|o| {
            o.terms()
                .map(|(_, f)| f.numerator().degree().map_or(i64::MIN, |d| d as i64) - f.denominator().values().map(|&m| m as i64).sum::<i64>())
                .collect::<Vec<_>>()
        })
        .max()
        .unwrap_or(i64::MIN)
}

/// `det ρ_n(P + Q)` against the closed exponential form with `R_{n,ε}` and,
/// when `deg_y Q < k`, against `Π_j w(q^j η)`.
pub fn verify_q_det(op: &SplitOperator<QVar>, levels: &[u64], mode: &Mode) -> Result<VerifyReport, RepError> {
    let order = op.q.order().ok_or(crate::solver::SolverError::Untruncated)?;
    let zm = zero_mode_log1p_poles(&left_div_by_p(&op.roots, &op.q))?;
    let k = op.roots.len();
    let w = if y_degree(&op.q) < k as i64 { q_solutions_and_w(op).ok().map(|m| m.w) } else { None };
    let c = QDetCheck { k, order, p: op.p.clone(), roots: op.roots.clone(), q: op.q.clone(), zm, w };
    let cases = levels.par_iter().map(|&n| run_level(&c, n, mode)).collect();
    let check = if c.w.is_some() { "q det (with product form)" } else { "q det" };
    Ok(classify(check, cases))
}

/// `R_{n,ε}(f) = Σ_j R_ε(f)|_{q^ε → q^{ε+j}}` modulo `Φ_n`, checked in the
/// localized symbolic ring.
pub fn check_rnr1(f: &RatFunc<QVar>, n: usize) -> Result<bool, RepError> {
    let rep = rho_n_symbolic(n);
    let lhs = rep.eval_eta_n(&r_n_eps(f, n as u64))?;
    let r1 = r_eps(f);
    let mut rhs = Ring::zero();
    for shift in 0..n {
        let z = rep.lin_inverse(shift, 0);
        for (j, c) in r1.coeffs().iter().enumerate() {
            if !c.is_zero() {
                rhs = rep.reduce(c)?.mul(&z.pow(j as u64)).add(&rhs);
            }
        }
    }
    Ok(lhs == rhs)
}

/// Identity checks on `ρ_p` at one prime.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaReport {
    pub p: u64,
    /// `det ρ_p(θ - λ) = ξ^pη^p + λ - λ^p`.
    pub det_identity: bool,
    /// `tr ρ_p(x^i θ^j) = 0` for `|i| ≤ 2`, `0 ≤ j ≤ p - 2`.
    pub zero_traces: bool,
    /// `tr ρ_p(x^i (θ - r)^{-j})` is `0` for `i ≠ 0` and `(-ξ^pη^p)^{-j}` for `i = 0`.
    pub pole_traces: bool,
}

impl LemmaReport {
    pub fn ok(&self) -> bool {
        self.det_identity && self.zero_traces && self.pole_traces
    }
}

pub fn lemma_suite(p: u64) -> Result<LemmaReport, RepError> {
    let rep = rho_p_symbolic(p)?;
    let n = p as usize;
    let (eps, eps_inv) = rep.eps()?;
    let mut want = vec![super::PSym::zero(); n + 1];
    want[0] = eps;
    want[1] = super::PSym::one().neg();
    want[n] = super::PSym::one();
    let det_identity = rep.theta().charpoly() == want;

    let xs: Vec<Matrix<super::PSym>> = (-2..=2i64).map(|i| rep.x_pow(i)).collect();
    // identity with entries carrying the modulus, so that tr = p reduces to 0
    let one = Matrix::scalar(n, &rep.embed(&int(1))?);
    let mut zero_traces = true;
    let mut pw = one.clone();
    for _ in 0..=n.saturating_sub(2) {
        zero_traces &= xs.iter().all(|x| trace_of_product(x, &pw).is_zero());
        pw = pw.mul(rep.theta());
    }

    let mut pole_traces = true;
    let roots: Vec<Rat> = [int(0), crate::exact::rat(1, 2), crate::exact::rat(-1, 3)]
        .into_iter()
        .filter(|r| reduces(r, p))
        .collect();
    for r in &roots {
        let inv = rep.theta_shift_inv(r)?;
        let mut pw = one.clone();
        for j in 1..=n {
            pw = pw.mul(&inv);
            for (x, i) in xs.iter().zip(-2..=2i64) {
                let want = if i == 0 { eps_inv.pow(j as u64) } else { Ring::zero() };
                pole_traces &= trace_of_product(x, &pw) == want;
            }
        }
    }
    Ok(LemmaReport { p, det_identity, zero_traces, pole_traces })
}

fn trace_of_product<R: Ring>(a: &Matrix<R>, b: &Matrix<R>) -> R {
    let n = a.rows();
    let mut acc = R::zero();
    for i in 0..n {
        for j in 0..n {
            acc = acc.add(&a.get(i, j).mul(b.get(j, i)));
        }
    }
    acc
}

fn reduces(r: &Rat, p: u64) -> bool {
    crate::exact::Fp::from_rat(r, p).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, QAlgebra};
    use crate::oplang::{elaborate_diff, elaborate_q, parse, Dialect};
    use crate::solver::split_operator;

    fn diff(src: &str, l: u32, order: usize) -> SplitOperator<DiffVar> {
        let d = elaborate_diff(&parse(src, Dialect::Diff, l).unwrap(), l).unwrap();
        split_operator(&d, order).unwrap().0
    }

    fn qdiff(src: &str, l: u32, order: usize) -> SplitOperator<QVar> {
        let d = elaborate_q(&parse(src, Dialect::QDiff, l).unwrap(), l).unwrap();
        split_operator(&d, order).unwrap().0
    }

    fn dop(src: &str) -> NormalOp<DiffVar> {
        elaborate_diff(&parse(src, Dialect::Diff, 1).unwrap(), 1).unwrap().coeff(0)
    }

    fn case(level: u64, status: Status) -> CaseResult {
        CaseResult { level, mode: "symbolic".into(), status, first_mismatch: None, note: String::new() }
    }

    #[test]
    fn threshold_rule() {
        let r = classify("t", vec![case(5, Status::Pass), case(3, Status::Fail), case(7, Status::Pass)]);
        assert!(r.ok);
        assert_eq!(r.threshold, Some(5));
        assert_eq!(r.case(3).unwrap().status, Status::BelowThreshold);
        let r = classify("t", vec![case(3, Status::Pass), case(5, Status::Fail)]);
        assert!(!r.ok);
        assert_eq!(r.threshold, None);
        assert!(!classify("t", vec![case(3, Status::Fail)]).ok);
    }

    #[test]
    fn lemma_small_primes() {
        for p in [3, 5, 7] {
            let r = lemma_suite(p).unwrap();
            assert!(r.ok(), "{r:?}");
        }
    }

    #[test]
    fn trace_examples() {
        let sym = Mode::Symbolic;
        let r = verify_trace_thm21(&[int(0)], &[], &[5], &sym);
        assert!(r.ok, "{r:?}");
        let r = verify_trace_thm21(&[int(0)], &[dop("x")], &[5, 7], &sym);
        assert!(r.ok, "{r:?}");
        let r = verify_trace_thm21(&[int(0), int(-1)], &[dop("x + x^(-1) + theta^2")], &[5, 7], &sym);
        assert!(r.ok, "{r:?}");
        let rnd = Mode::Random { trials: 4, seed: 1 };
        let r = verify_trace_thm21(&[int(0), int(-1)], &[dop("x + x^(-1) + theta^2")], &[5, 7], &rnd);
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn det_scalar_deformation() {
        let op = diff("theta + 3*t", 1, 3);
        let r = verify_det_thm22(&op, &[3, 5, 7], &Mode::Symbolic).unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(r.check, "det (three routes)");
    }

    #[test]
    fn det_hopping() {
        let op = diff("theta^2 + t*(x + x^(-1))", 1, 4);
        let r = verify_det_thm22(&op, &[5, 7], &Mode::Auto { cap: 5, trials: 3, seed: 9 }).unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(r.case(7).unwrap().mode, "random");
    }

    #[test]
    fn det_negative_control() {
        // a wrong closed form must be caught
        let op = diff("theta + 3*t", 1, 3);
        let order = 3;
        let zm = zero_mode_log1p_poles(&left_div_by_p(&op.roots, &op.q)).unwrap();
        let mut e = series_exp(&t_eps_poles(&zm)).unwrap().coeffs().to_vec();
        e[1] = e[1].add(&UPoly::constant(int(1)));
        let c = DetCheck {
            k: 1,
            order,
            roots: op.roots.clone(),
            q: op.q.clone(),
            exp_data: TSeries::with_order(e, order),
            w: None,
            size: 2,
        };
        let r = run_prime(&c, 5, &Mode::Symbolic);
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.first_mismatch, Some(1));
    }

    #[test]
    fn q_trace_and_det() {
        let r = verify_q_trace(&[QRoot::Pow(0)], &[], &[2, 3, 4], &Mode::Symbolic);
        assert!(r.ok, "{r:?}");
        let op = qdiff("y - 1 + 3*t", 1, 3);
        let r = verify_q_det(&op, &[2, 3], &Mode::Symbolic).unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(r.check, "q det (with product form)");
        let r = verify_q_det(&op, &[3], &Mode::Random { trials: 2, seed: 4 }).unwrap();
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn rnr1_small() {
        let f = RatFunc::<QVar>::inv_roots(&[QRoot::Pow(0), QRoot::Pow(0), QRoot::Pow(1)])
            .add(&RatFunc::constant(QFrac::from_rat(&rat(3, 2))));
        for n in 2..6 {
            assert!(check_rnr1(&f, n).unwrap(), "n={n}");
        }
        // a double pole three steps from a simple one needs Φ_3 inverted
        let g = RatFunc::<QVar>::inv_roots(&[QRoot::Pow(1), QRoot::Pow(1), QRoot::Pow(-2)]);
        assert!(matches!(check_rnr1(&g, 3), Err(RepError::OutOfRangeLevel(3))));
    }
}
