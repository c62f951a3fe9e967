use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{classify_roots, shift_w, solve_monodromy, SolverError, SplitOperator};
use crate::exact::{int, lift_coprime_factorization, DiffVar, Matrix, Rat, Ring, TSeries, UPoly};
use crate::shiftcalc::interpolate;

/// One middle factor of `det B_N(ε)` compared against `w_i(ε - s_i + n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BnFactor {
    pub class: usize,
    pub n: i64,
    pub stable: bool,
    pub matches: bool,
}

#[derive(Clone, Debug)]
pub struct BnReport {
    pub window: usize,
    pub order: usize,
    pub margin: usize,
    /// `det B_N ≡ Π_n P(ε + n)` modulo `u`.
    pub diagonal_ok: bool,
    pub factors: Vec<BnFactor>,
    pub ok: bool,
}

/// `B_N(ε)` at a rational `ε`: entry `(m, n)` is the coefficient of
/// `x^{ε+m}` in `(P + Q) x^{ε+n}`.
fn bn_at(op: &SplitOperator<DiffVar>, window: i64, eps: &Rat, order: usize) -> Result<Matrix<TSeries<Rat>>, SolverError> {
    let size = (2 * window + 1) as usize;
    let mut cols: Vec<BTreeMap<usize, Vec<Rat>>> = vec![BTreeMap::new(); size];
    for (ci, col) in cols.iter_mut().enumerate() {
        let n = ci as i64 - window;
        let at = eps + int(n);
        col.entry(ci).or_insert_with(|| vec![Rat::zero(); order])[0] = op.p.eval(&at);
        for (i, qi) in op.q.coeffs().iter().enumerate().take(order).skip(1) {
            for (j, f) in qi.terms() {
                let m = n + j;
                if m.abs() > window {
                    continue;
                }
                let v = f.eval(&at).ok_or_else(|| SolverError::NotNormalized("rational coefficient".into()))?;
                let e = col.entry((m + window) as usize).or_insert_with(|| vec![Rat::zero(); order]);
                e[i] = &e[i] + &v;
            }
        }
    }
    Ok(Matrix::from_fn(size, size, |r, c| match cols[c].get(&r) {
        Some(v) => TSeries::with_order(v.clone(), order),
        None => TSeries::with_order(vec![], order),
    }))
}

fn eps_degree(op: &SplitOperator<DiffVar>) -> usize {
    let q = op.q.coeffs().iter().flat_map(|o| o.terms().map(|(_, f)| f.numerator().degree().unwrap_or(0)));
    q.chain(op.p.degree()).max().unwrap_or(0)
}

/// `det B_N(ε)` as a polynomial in `ε` with coefficients in `k[u]/u^M`,
/// by evaluation at rational points and interpolation.
pub fn bn_determinant(op: &SplitOperator<DiffVar>, window: usize) -> Result<UPoly<TSeries<Rat>>, SolverError> {
    let order = op.q.order().ok_or(SolverError::Untruncated)?;
    let w = window as i64;
    let deg = (2 * window + 1) * eps_degree(op);
    let nodes: Vec<Rat> = (0..=deg as i64).map(|i| Rat::new((2 * i + 1).into(), 7.into())).collect();
    let values: Result<Vec<TSeries<Rat>>, SolverError> =
        nodes.par_iter().map(|e| Ok(bn_at(op, w, e, order)?.det())).collect();
    let values = values?;
    let per_order: Vec<UPoly<Rat>> = (0..order)
        .map(|i| {
            let pts: Vec<(Rat, Rat)> = nodes.iter().zip(&values).map(|(x, v)| (x.clone(), v.coeff(i))).collect();
            interpolate(&pts)
        })
        .collect();
    let top = per_order.iter().filter_map(|p| p.degree()).max().map_or(0, |d| d + 1);
    Ok(UPoly::new(
        (0..top)
            .map(|e| TSeries::with_order(per_order.iter().map(|p| p.coeff(e)).collect(), order))
            .collect(),
    ))
}

/// Stabilization margin for the middle factors.
fn margin(op: &SplitOperator<DiffVar>, span: i64, order: usize) -> usize {
    let c = op.q.coeffs().iter().map(|o| o.max_shift()).max().unwrap_or(0);
    (order.saturating_sub(1) as i64 * c + span) as usize
}

/// Factors `det B_N(ε)` by lifting its factorization modulo `u` and compares
/// the middle factors with the solver's `w_i(ε - s_i + n)`.
pub fn bn_factorization_check(op: &SplitOperator<DiffVar>, window: usize) -> Result<BnReport, SolverError> {
    let order = op.q.order().ok_or(SolverError::Untruncated)?;
    let classes = classify_roots::<DiffVar>(&op.roots)?;
    let span = classes.iter().map(|c| c.span()).max().unwrap_or(0);
    let a = margin(op, span, order);
    let required = (2 * a + span as usize).div_ceil(2);
    if window < required.max(1) {
        return Err(SolverError::WindowTooSmall { required: required.max(1) });
    }
    let w = window as i64;
    let det = bn_determinant(op, window)?;

    let mut mults: BTreeMap<Rat, usize> = BTreeMap::new();
    for r in &op.roots {
        for n in -w..=w {
            *mults.entry(r - int(n)).or_default() += 1;
        }
    }
    let diag = (-w..=w).fold(UPoly::<Rat>::one(), |acc, n| acc.mul(&op.p.taylor_shift(&int(n))));
    let det0 = UPoly::new(det.coeffs().iter().map(|c| c.coeff(0)).collect());
    let diagonal_ok = det0 == diag;

    let rhos: Vec<Rat> = mults.keys().cloned().collect();
    let bars: Vec<UPoly<Rat>> = mults
        .iter()
        .map(|(rho, &m)| UPoly::from_roots(&vec![rho.clone(); m]))
        .collect();
    let lifted = lift_coprime_factorization(&det, &bars, order)?;

    let sm = solve_monodromy(op)?;
    let mut factors = Vec::new();
    for (ci, (class, _, wi)) in sm.classes.iter().enumerate() {
        for n in -w..=(w - class.span()) {
            let rho = &class.rep - int(n);
            let idx = rhos.binary_search(&rho).expect("root of the diagonal");
            let want = shift_w(wi, &(int(n) - &class.rep));
            let stable = n >= -w + a as i64 && n <= w - class.span() - a as i64;
            factors.push(BnFactor { class: ci, n, stable, matches: lifted.factors[idx] == want });
        }
    }
    let ok = diagonal_ok && factors.iter().filter(|f| f.stable).all(|f| f.matches);
    Ok(BnReport { window, order, margin: a, diagonal_ok, factors, ok })
}
