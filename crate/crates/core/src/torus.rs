//! Exact determinant formulas for deformations `λ + Q` of the identity on the
//! quantum torus.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{int, series_exp, Cyc, CycCtx, ExactError, MPoly, Matrix, QAlgebra, Rat, Ring, TSeries};
use crate::opalg::{TorusCoeff, TorusElem, VAR_A, VAR_B, VAR_LAMBDA, VAR_Q};

#[derive(Debug, Error)]
pub enum TorusError {
    #[error("operator is not lambda plus a lambda-free deformation: {0}")]
    NotDeformation(String),
    #[error("depth {depth} does not reach lambda^0 at level {n}; need at least {required}")]
    DepthTooSmall { depth: usize, n: usize, required: usize },
    #[error("series must have the shape lambda*(1 + O(1/lambda))")]
    NotMonicShape,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `λ^lead · Σ_{m≥0} c_m λ^{-m}`, truncated after `λ^{lead-depth}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LamSeries {
    pub lead: i64,
    pub coeffs: TSeries<TorusCoeff>,
}

impl LamSeries {
    /// Coefficient of `λ^e`.
    pub fn coeff_of(&self, e: i64) -> TorusCoeff {
        let m = self.lead - e;
        if m < 0 {
            return TorusCoeff::zero();
        }
        self.coeffs.coeff(m as usize)
    }

    pub fn depth(&self) -> usize {
        self.coeffs.order().unwrap_or(0).saturating_sub(1)
    }
}

/// `Q = D - λ`, with no `λ` left in the coefficients.
pub fn split_deformation(d: &TorusElem) -> Result<TorusElem, TorusError> {
    let q = d.sub(&TorusElem::scalar(TorusCoeff::var(VAR_LAMBDA)));
    for (_, c) in q.terms() {
        if c.exponent_range(VAR_LAMBDA).is_some_and(|r| r != (0, 0)) {
            return Err(TorusError::NotDeformation(format!("{d:?}")));
        }
    }
    Ok(q)
}

/// `Coeff_{0,0}(log(1 + λ^{-1}Q))` as a series in `s = λ^{-1}` to `s^depth`.
pub fn log_zero_coeff(q: &TorusElem, depth: usize) -> TSeries<TorusCoeff> {
    let mut c = vec![TorusCoeff::zero(); depth + 1];
    let mut pw = TorusElem::one();
    for (m, cm) in c.iter_mut().enumerate().skip(1) {
        pw = pw.mul(q);
        let sign = if m % 2 == 1 { 1 } else { -1 };
        *cm = pw.coeff(0, 0).mul(&TorusCoeff::from_rat(&Rat::new(sign.into(), (m as i64).into())));
    }
    TSeries::with_order(c, depth + 1)
}

/// `G(λ) = λ exp(Coeff_{0,0}(log(λ^{-1}D)))`.
pub fn g_series(d: &TorusElem, depth: usize) -> Result<LamSeries, TorusError> {
    let q = split_deformation(d)?;
    let coeffs = series_exp(&log_zero_coeff(&q, depth))?;
    Ok(LamSeries { lead: 1, coeffs })
}

/// Specialization `q = 1`.
pub fn at_q_one(s: &LamSeries) -> LamSeries {
    let coeffs = s.coeffs.map(|c| {
        c.map_exponents(|e| {
            let mut f = *e;
            f[VAR_Q] = 0;
            f
        })
    });
    LamSeries { lead: s.lead, coeffs }
}

/// `Σ_i f_i w^i` truncated to the order of `w`; `w` must vanish at 0.
fn compose(f: &TSeries<TorusCoeff>, w: &TSeries<TorusCoeff>, order: usize) -> TSeries<TorusCoeff> {
    let mut acc = TSeries::with_order(vec![], order);
    for i in (0..order.min(f.coeffs().len())).rev() {
        acc = acc.mul(w).add(&TSeries::with_order(vec![f.coeff(i)], order));
    }
    acc
}

/// Compositional inverse `F` of `G = λ(1 + O(λ^{-1}))`, as `u·f(u^{-1})`.
pub fn comp_inverse(g: &LamSeries) -> Result<LamSeries, TorusError> {
    if g.lead != 1 || !g.coeffs.coeff(0).is_one() {
        return Err(TorusError::NotMonicShape);
    }
    let order = g.depth() + 1;
    let gs = g.coeffs.truncate(order);
    // s = v·k(v) with k = g(v·k(v)); one coefficient per iteration
    let v = TSeries::with_order(vec![TorusCoeff::zero(), TorusCoeff::one()], order);
    let mut k = TSeries::with_order(vec![TorusCoeff::one()], order);
    for _ in 0..order {
        k = compose(&gs, &v.mul(&k), order);
    }
    let f = k.inv_to(order).ok_or(TorusError::NotMonicShape)?;
    Ok(LamSeries { lead: 1, coeffs: f })
}

/// Replaces `a, b` by `a^n, b^n`.
fn power_params(c: &TorusCoeff, n: i32) -> TorusCoeff {
    c.map_exponents(|e| {
        let mut f = *e;
        f[VAR_A] *= n;
        f[VAR_B] *= n;
        f
    })
}

/// `F(a^n, b^n, G(λ)^n)` as `λ^n Σ_m φ_m λ^{-m}`.
pub fn f_of_g_pow(f: &LamSeries, g: &LamSeries, n: usize) -> LamSeries {
    let order = g.depth().min(f.depth()) + 1;
    let gs = g.coeffs.truncate(order);
    let gn = gs.pow(n as u64);
    let gn_inv = gn.inv_to(order).expect("constant term 1");
    let w = gn_inv.shift_up(n).truncate(order);
    let fs = f.coeffs.map(|c| power_params(c, n as i32));
    let phi = gn.mul(&compose(&fs, &w, order)).truncate(order);
    LamSeries { lead: n as i64, coeffs: phi }
}

/// Laurent polynomials in `ξ, η, λ, a, b` over `Q[q]/Φ_n`.
pub type DetSym = MPoly<Cyc, 5>;
const XI: usize = 0;
const ETA: usize = 1;
const LAM: usize = 2;

fn to_det_sym(c: &TorusCoeff, ctx: &Arc<CycCtx>) -> DetSym {
    DetSym::from_terms(c.terms().map(|(e, v)| {
        let coeff = ctx.q_pow(e[VAR_Q] as i64).mul(&Cyc::Const(v.clone()));
        ([0, 0, e[VAR_LAMBDA], e[VAR_A], e[VAR_B]], coeff)
    }))
}

/// `ρ_n(D)` with `x v_k = ξ v_{k+1}`, `y v_k = q^k η v_k`.
pub fn rho_n_torus(d: &TorusElem, n: usize) -> Matrix<DetSym> {
    let ctx = CycCtx::new(n as u64);
    let mut m = Matrix::<DetSym>::zeros(n, n);
    for (&(i, j), c) in d.terms() {
        let base = to_det_sym(c, &ctx).shift([i as i32, j as i32, 0, 0, 0]);
        for k in 0..n {
            let row = (k as i64 + i).rem_euclid(n as i64) as usize;
            let v = m.get(row, k).add(&base.mul(&DetSym::constant(ctx.q_pow(j * k as i64))));
            m.set(row, k, v);
        }
    }
    m
}

/// Splits a determinant into its `ξ^0 η^0` part and the rest.
fn split_boundary(det: &DetSym) -> (DetSym, DetSym) {
    let mut h = DetSym::zero();
    let mut rest = DetSym::zero();
    for (e, c) in det.terms() {
        if e[XI] == 0 && e[ETA] == 0 {
            h.add_term(*e, c);
        } else {
            rest.add_term(*e, c);
        }
    }
    (h, rest)
}

/// Outcome at one level `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusLevel {
    pub n: usize,
    pub depth: usize,
    /// `det ρ_n(D)` with the `ξ^0η^0` part removed.
    pub boundary: String,
    pub boundary_ok: Option<bool>,
    /// `λ^n .. λ^0` coefficients of `F(G^n)` agree with the determinant.
    pub head_ok: bool,
    /// `λ^{-1} .. λ^{n-depth}` coefficients vanish modulo `Φ_n`.
    pub tail_ok: bool,
    /// Lowest `m` with a mismatch in the coefficient of `λ^{n-m}`.
    pub first_mismatch: Option<usize>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusReport {
    pub operator: String,
    pub levels: Vec<TorusLevel>,
    pub ok: bool,
}

/// Expected boundary part at level `n`, when known.
pub type BoundaryFn = dyn Fn(usize, &Arc<CycCtx>) -> DetSym + Sync;

/// Substitutes rational values for the parameters `a, b`.
pub fn specialize(c: &TorusCoeff, values: &[(usize, Rat)]) -> TorusCoeff {
    TorusCoeff::from_terms(c.terms().map(|(e, v)| {
        let mut e2 = *e;
        let mut v2 = v.clone();
        for (var, val) in values {
            let k = e[*var];
            let pw = Ring::pow(val, k.unsigned_abs() as u64);
            v2 = if k >= 0 { v2 * pw } else { v2 / pw };
            e2[*var] = 0;
        }
        (e2, v2)
    }))
}

/// Checks `det ρ_n(D) = boundary + F(G_q(λ)^n)` modulo `Φ_n` for each level.
///
/// `F` and `G` are built with the parameters symbolic, so that `F(a^n, b^n, ·)`
/// is available; `values` then specializes them on both sides.
pub fn verify_determinant_formula(
    d: &TorusElem,
    values: &[(usize, Rat)],
    levels: &[usize],
    depth: Option<usize>,
    boundary: Option<&BoundaryFn>,
) -> Result<TorusReport, TorusError> {
    let max_n = levels.iter().copied().max().unwrap_or(1);
    let depth = depth.unwrap_or(3 * (max_n + 2));
    if let Some(&n) = levels.iter().find(|&&n| depth < n + 1) {
        return Err(TorusError::DepthTooSmall { depth, n, required: n + 1 });
    }
    let g = g_series(d, depth)?;
    let f = comp_inverse(&at_q_one(&g))?;
    let d_val = d.map_coeffs(|c| specialize(c, values));
    let levels: Vec<TorusLevel> = levels
        .par_iter()
        .map(|&n| {
            let ctx = CycCtx::new(n as u64);
            let det = rho_n_torus(&d_val, n).det_berkowitz();
            let (h, rest) = split_boundary(&det);
            let boundary_ok = boundary.map(|b| rest == b(n, &ctx));
            let phi = f_of_g_pow(&f, &g, n);
            let mut first_mismatch = None;
            for m in 0..=depth {
                let got = to_det_sym(&specialize(&phi.coeffs.coeff(m), values), &ctx);
                let e = n as i32 - m as i32;
                let want = h.terms().filter(|(k, _)| k[LAM] == e).fold(DetSym::zero(), |mut acc, (k, c)| {
                    let mut k2 = *k;
                    k2[LAM] = 0;
                    acc.add_term(k2, c);
                    acc
                });
                if got != want {
                    first_mismatch = Some(m);
                    break;
                }
            }
            let head_ok = first_mismatch.is_none_or(|m| m > n);
            let tail_ok = first_mismatch.is_none();
            let ok = head_ok && tail_ok && boundary_ok.unwrap_or(true);
            TorusLevel { n, depth, boundary: format!("{rest:?}"), boundary_ok, head_ok, tail_ok, first_mismatch, ok }
        })
        .collect();
    let ok = levels.iter().all(|l| l.ok);
    Ok(TorusReport { operator: format!("{d_val:?}"), levels, ok })
}

fn coeff(c: i64) -> TorusCoeff {
    TorusCoeff::from_i64(c)
}

/// `λ - x - y + x^{-1}y^{-1}`.
pub fn theorem61_operator() -> TorusElem {
    TorusElem::scalar(TorusCoeff::var(VAR_LAMBDA))
        .sub(&TorusElem::x_pow(1))
        .sub(&TorusElem::y_pow(1))
        .add(&TorusElem::monomial(-1, -1, coeff(1)))
}

/// `λ - x - y - a x^{-1} - b y^{-1}`; `None` keeps a parameter symbolic.
pub fn example61_operator(a: Option<&Rat>, b: Option<&Rat>) -> TorusElem {
    let param = |v: Option<&Rat>, var: usize| match v {
        Some(r) => TorusCoeff::from_rat(r),
        None => TorusCoeff::var(var),
    };
    TorusElem::scalar(TorusCoeff::var(VAR_LAMBDA))
        .sub(&TorusElem::x_pow(1))
        .sub(&TorusElem::y_pow(1))
        .sub(&TorusElem::monomial(-1, 0, param(a, VAR_A)))
        .sub(&TorusElem::monomial(0, -1, param(b, VAR_B)))
}

fn mono(e: [i32; 5], c: Cyc) -> DetSym {
    DetSym::monomial(e, c)
}

/// `-ξ^n - η^n + ξ^{-n}η^{-n}`.
pub fn theorem61_boundary(n: usize, _ctx: &Arc<CycCtx>) -> DetSym {
    let n = n as i32;
    let one = Cyc::Const(int(1));
    let m1 = Cyc::Const(int(-1));
    mono([n, 0, 0, 0, 0], m1.clone()).add(&mono([0, n, 0, 0, 0], m1)).add(&mono([-n, -n, 0, 0, 0], one))
}

/// `-ξ^n - η^n - a^n ξ^{-n} - b^n η^{-n}` with the given or symbolic `a, b`.
pub fn example61_boundary(a: Option<Rat>, b: Option<Rat>) -> impl Fn(usize, &Arc<CycCtx>) -> DetSym + Sync {
    move |n, _ctx| {
        let ni = n as i32;
        let m1 = Cyc::Const(int(-1));
        let term = |v: &Option<Rat>, xi: i32, eta: i32, slot: usize| {
            let mut e = [xi, eta, 0, 0, 0];
            match v {
                Some(r) => mono(e, Cyc::Const(-Ring::pow(r, n as u64))),
                None => {
                    e[slot] = ni;
                    mono(e, Cyc::Const(int(-1)))
                }
            }
        };
        mono([ni, 0, 0, 0, 0], m1.clone())
            .add(&mono([0, ni, 0, 0, 0], m1))
            .add(&term(&a, -ni, 0, 3))
            .add(&term(&b, 0, -ni, 4))
    }
}

/// Theorem-style check for the operator `λ - x - y + x^{-1}y^{-1}`.
pub fn verify_theorem61(levels: &[usize], depth: Option<usize>) -> Result<TorusReport, TorusError> {
    verify_determinant_formula(&theorem61_operator(), &[], levels, depth, Some(&theorem61_boundary))
}

/// The two-parameter family `λ - x - y - a x^{-1} - b y^{-1}`.
pub fn example61(a: Option<Rat>, b: Option<Rat>, levels: &[usize], depth: Option<usize>) -> Result<TorusReport, TorusError> {
    let d = example61_operator(None, None);
    let values: Vec<(usize, Rat)> =
        [(VAR_A, &a), (VAR_B, &b)].into_iter().filter_map(|(v, r)| r.clone().map(|r| (v, r))).collect();
    let bf = example61_boundary(a, b);
    verify_determinant_formula(&d, &values, levels, depth, Some(&bf))
}
