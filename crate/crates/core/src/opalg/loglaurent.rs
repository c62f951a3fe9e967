use std::collections::BTreeMap;

use crate::exact::{
    int, unit_inv, DiffVar, ExactError, QAlgebra, QFrac, QRoot, QVar, Rat, RatFunc, Ring, UPoly, VarKind,
};
use num_traits::ToPrimitive;

use super::{rational_roots, NormalOp, OpSeries};

/// How the symbol acts on a block `x^{a} · span(log-basis)`.
///
/// Each block is a vector `v_s` over a log basis on which the symbol acts as
/// `a_value + N` for a nilpotent shift `N`.
pub trait LogAction: VarKind {
    /// Value of the symbol on the pure power `x^a`.
    fn exponent_value(a: &Rat) -> Result<Self::K, ExactError>;
    /// `f(symbol)` on the block at exponent `a`, as a polynomial in `N`.
    fn block_poly(f: &UPoly<Self::K>, a: &Rat) -> Result<UPoly<Self::K>, ExactError>;
    /// Weight `c_s` in `(N v)_{s-1} = c_s v_s`.
    fn nil_weight(s: usize) -> Self::K;
    /// The log-derivation as a polynomial in `N`, exact on vectors of length `len`.
    fn dlog_poly(len: usize) -> UPoly<Self::K>;
    /// Monic roots of the undeformed polynomial, if it splits over the admitted roots.
    fn split_roots(p: &UPoly<Self::K>) -> Option<Vec<Self::Root>>;
    /// Exponent of a root class representative (`r` itself, resp. `l` for `q^l`).
    fn root_exponent(r: &Self::Root) -> Option<Rat>;
    /// Root from an exponent.
    fn root_from_exponent(a: &Rat) -> Self::Root;
}

impl LogAction for DiffVar {
    fn exponent_value(a: &Rat) -> Result<Rat, ExactError> {
        Ok(a.clone())
    }
    fn block_poly(f: &UPoly<Rat>, a: &Rat) -> Result<UPoly<Rat>, ExactError> {
        Ok(f.taylor_shift(a))
    }
    fn nil_weight(s: usize) -> Rat {
        int(s as i64)
    }
    fn dlog_poly(_len: usize) -> UPoly<Rat> {
        // log basis (log x)^s: θ = a + N with (N v)_s = (s+1) v_{s+1}; D_log = N
        UPoly::var()
    }
    fn split_roots(p: &UPoly<Rat>) -> Option<Vec<Rat>> {
        if !p.lead().is_one() {
            return None;
        }
        rational_roots(p)
    }
    fn root_exponent(r: &Rat) -> Option<Rat> {
        Some(r.clone())
    }
    fn root_from_exponent(a: &Rat) -> Rat {
        a.clone()
    }
}

fn integer_exponent(a: &Rat) -> Result<i64, ExactError> {
    if !a.is_integer() {
        return Err(ExactError::Precondition(format!("q-exponent {a} is not an integer")));
    }
    a.to_integer().to_i64().ok_or_else(|| ExactError::Precondition("q-exponent too large".into()))
}

impl LogAction for QVar {
    fn exponent_value(a: &Rat) -> Result<QFrac, ExactError> {
        Ok(QFrac::q_pow(integer_exponent(a)?))
    }
    fn block_poly(f: &UPoly<QFrac>, a: &Rat) -> Result<UPoly<QFrac>, ExactError> {
        // binomial log basis C(log_q x, s): y = q^a (1 + Δ) with (Δ v)_s = v_{s+1}
        let qa = QFrac::q_pow(integer_exponent(a)?);
        Ok(f.scale_var(&qa).taylor_shift(&QFrac::one()))
    }
    fn nil_weight(_s: usize) -> QFrac {
        QFrac::one()
    }
    fn dlog_poly(len: usize) -> UPoly<QFrac> {
        // d/dL = log(1 + Δ) on the binomial basis
        let mut c = vec![QFrac::zero()];
        c.extend((1..len).map(|j| {
            let sign = if j % 2 == 1 { 1 } else { -1 };
            QFrac::from_rat(&crate::exact::rat(sign, j as i64))
        }));
        UPoly::new(c)
    }
    fn split_roots(p: &UPoly<QFrac>) -> Option<Vec<QRoot>> {
        if !p.lead().is_one() {
            return None;
        }
        let mut rest = p.clone();
        let mut roots = Vec::new();
        while rest.degree()? > 0 {
            if rest.coeff(0).is_zero() {
                roots.push(QRoot::Zero);
                rest = rest.exact_div(&UPoly::var());
                continue;
            }
            // the y^{k-1} coefficient is -Σ q^{l_j}; its q-exponents are the candidates
            let d = rest.degree()?;
            let sub = rest.coeff(d - 1);
            let candidates: Vec<i64> = if sub.is_zero() {
                Vec::new()
            } else if sub.is_laurent() {
                let (low, c) = sub.numerator_laurent();
                (0..c.len() as i64).filter(|i| !c[*i as usize].is_zero()).map(|i| low + i).collect()
            } else {
                return None;
            };
            let l = candidates
                .into_iter()
                .find(|&l| rest.eval(&QFrac::q_pow(l)).is_zero())?;
            rest = rest.exact_div(&UPoly::linear(&QFrac::q_pow(l)));
            roots.push(QRoot::Pow(l));
        }
        roots.sort();
        Some(roots)
    }
    fn root_exponent(r: &QRoot) -> Option<Rat> {
        match r {
            QRoot::Zero => None,
            QRoot::Pow(l) => Some(int(*l)),
        }
    }
    fn root_from_exponent(a: &Rat) -> QRoot {
        QRoot::Pow(integer_exponent(a).expect("integer q-exponent"))
    }
}

/// Element of `x^{base} k((x))[log][[u]]`: per u-order, a finite map from
/// x-offset `n` to a vector over the log basis.
#[derive(Clone, PartialEq, Debug)]
pub struct LogLaurent<K> {
    pub base: Rat,
    pub orders: Vec<BTreeMap<i64, Vec<K>>>,
}

fn trim<K: Ring>(v: &mut Vec<K>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Adds `b` into `a` componentwise.
pub(crate) fn vec_add_into<K: Ring>(a: &mut Vec<K>, b: &[K]) {
    if a.len() < b.len() {
        a.resize(b.len(), K::zero());
    }
    for (x, y) in a.iter_mut().zip(b) {
        x.add_assign(y);
    }
    trim(a);
}

/// Applies the nilpotent `N` of the log basis.
pub(crate) fn nil_apply<V: LogAction>(v: &[V::K]) -> Vec<V::K> {
    let mut out: Vec<V::K> = (1..v.len()).map(|s| v[s].mul(&V::nil_weight(s))).collect();
    trim(&mut out);
    out
}

/// Evaluates `p(N) v` for the nilpotent `N` of `V`.
pub(crate) fn poly_in_nil<V: LogAction>(p: &UPoly<V::K>, v: &[V::K]) -> Vec<V::K> {
    let mut out: Vec<V::K> = Vec::new();
    let mut cur = v.to_vec();
    for (k, c) in p.coeffs().iter().enumerate() {
        if k > 0 {
            cur = nil_apply::<V>(&cur);
        }
        if cur.is_empty() {
            break;
        }
        if !c.is_zero() {
            let scaled: Vec<V::K> = cur.iter().map(|x| x.mul(c)).collect();
            vec_add_into(&mut out, &scaled);
        }
    }
    out
}

/// Solves `N w = v` with `w_0 = 0`.
pub(crate) fn nil_preimage<V: LogAction>(v: &[V::K]) -> Vec<V::K> {
    let mut out = vec![V::K::zero(); v.len() + 1];
    for (s, c) in v.iter().enumerate() {
        out[s + 1] = c.mul(&unit_inv(&V::nil_weight(s + 1)));
    }
    trim(&mut out);
    out
}

/// Inverse of a polynomial in `N` with unit constant term, truncated to `len`.
pub(crate) fn nil_series_inverse<V: LogAction>(
    p: &UPoly<V::K>,
    len: usize,
) -> Result<UPoly<V::K>, ExactError> {
    let c0 = p.coeff(0);
    let inv0 = c0.inv().ok_or_else(|| ExactError::NotInvertible(format!("{c0:?}")))?;
    let mut out = vec![inv0.clone()];
    for k in 1..len {
        let mut acc = V::K::zero();
        for i in 1..=k.min(p.len().saturating_sub(1)) {
            acc.add_assign(&p.coeff(i).mul(&out[k - i]));
        }
        out.push(acc.neg().mul(&inv0));
    }
    Ok(UPoly::new(out))
}

/// Action of `f(symbol)` on a block at exponent `a`.
pub fn act_func<V: LogAction>(f: &RatFunc<V>, a: &Rat, v: &[V::K]) -> Result<Vec<V::K>, ExactError> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    let num = V::block_poly(f.numerator(), a)?;
    let w = poly_in_nil::<V>(&num, v);
    if f.is_poly() {
        return Ok(w);
    }
    let den = V::block_poly(&f.den_poly(), a)?;
    let dinv = nil_series_inverse::<V>(&den, v.len())?;
    Ok(poly_in_nil::<V>(&dinv, &w))
}

impl<K: Ring> LogLaurent<K> {
    pub fn zero(base: Rat, order: usize) -> Self {
        LogLaurent { base, orders: vec![BTreeMap::new(); order] }
    }

    /// `x^{base+n}` times the log-basis vector `e_s` at u-order 0.
    pub fn basis(base: Rat, n: i64, s: usize, order: usize) -> Self {
        let mut out = Self::zero(base, order);
        let mut v = vec![K::zero(); s + 1];
        v[s] = K::one();
        out.orders[0].insert(n, v);
        out
    }

    pub fn order(&self) -> usize {
        self.orders.len()
    }

    pub fn is_zero(&self) -> bool {
        self.orders.iter().all(|m| m.values().all(|v| v.iter().all(|c| c.is_zero())))
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.base, o.base);
        let order = self.order().min(o.order());
        let mut out = Self::zero(self.base.clone(), order);
        for (m, slot) in out.orders.iter_mut().enumerate() {
            for src in [&self.orders[m], &o.orders[m]] {
                for (n, v) in src {
                    vec_add_into(slot.entry(*n).or_default(), v);
                }
            }
            slot.retain(|_, v| !v.is_empty());
        }
        out
    }

    pub fn scale(&self, k: &K) -> Self {
        let mut out = self.clone();
        for slot in out.orders.iter_mut() {
            for v in slot.values_mut() {
                for c in v.iter_mut() {
                    *c = c.mul(k);
                }
                trim(v);
            }
            slot.retain(|_, v| !v.is_empty());
        }
        out
    }

    /// Coefficient vector at u-order `m`, offset `n`.
    pub fn get(&self, m: usize, n: i64) -> &[K] {
        self.orders[m].get(&n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Smallest and largest x-offsets in use at any order.
    pub fn x_window(&self) -> Option<(i64, i64)> {
        let lo = self.orders.iter().filter_map(|m| m.keys().next()).min()?;
        let hi = self.orders.iter().filter_map(|m| m.keys().next_back()).max()?;
        Some((*lo, *hi))
    }

    /// Largest log-basis length in use.
    pub fn log_len(&self) -> usize {
        self.orders.iter().flat_map(|m| m.values().map(|v| v.len())).max().unwrap_or(0)
    }
}

/// Applies a single normal-form operator to one u-slice.
pub fn apply_normal<V: LogAction>(
    a: &NormalOp<V>,
    base: &Rat,
    slice: &BTreeMap<i64, Vec<V::K>>,
) -> Result<BTreeMap<i64, Vec<V::K>>, ExactError> {
    let mut out: BTreeMap<i64, Vec<V::K>> = BTreeMap::new();
    for (n, v) in slice {
        let exp = base + int(*n);
        for (j, f) in a.terms() {
            let w = act_func::<V>(f, &exp, v)?;
            if !w.is_empty() {
                vec_add_into(out.entry(n + j).or_default(), &w);
            }
        }
    }
    out.retain(|_, v| !v.is_empty());
    Ok(out)
}

/// Applies an operator series to a log-Laurent series, truncating at the
/// smaller of the two orders.
pub fn apply_op<V: LogAction>(
    a: &OpSeries<V>,
    f: &LogLaurent<V::K>,
) -> Result<LogLaurent<V::K>, ExactError> {
    let order = match a.order() {
        Some(o) => o.min(f.order()),
        None => f.order(),
    };
    let mut out = LogLaurent::zero(f.base.clone(), order);
    for (i, ai) in a.coeffs().iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for o in 0..order.saturating_sub(i) {
            let part = apply_normal(ai, &f.base, &f.orders[o])?;
            for (n, v) in part {
                vec_add_into(out.orders[i + o].entry(n).or_default(), &v);
            }
        }
    }
    for slot in out.orders.iter_mut() {
        slot.retain(|_, v| !v.is_empty());
    }
    Ok(out)
}

/// Converts a q-case binomial-basis vector `Σ v_s C(L, s)` to powers `Σ w_s L^s`.
pub fn binomial_to_power(v: &[QFrac]) -> Vec<QFrac> {
    let mut out: Vec<QFrac> = Vec::new();
    // C(L, s) = L(L-1)...(L-s+1)/s!
    for (s, c) in v.iter().enumerate() {
        let roots: Vec<Rat> = (0..s as i64).map(int).collect();
        let falling = UPoly::from_roots(&roots);
        let fact: Rat = (1..=s as i64).fold(Rat::one(), |acc, i| acc * int(i));
        let scaled: Vec<QFrac> = falling
            .coeffs()
            .iter()
            .map(|r| c.mul(&QFrac::from_rat(&(r / &fact))))
            .collect();
        vec_add_into(&mut out, &scaled);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::TSeries;

    type D = NormalOp<DiffVar>;
    type Q = NormalOp<QVar>;

    #[test]
    fn theta_on_log() {
        let theta = OpSeries::constant(D::symbol());
        let logx = LogLaurent::<Rat>::basis(Rat::zero(), 0, 1, 1);
        let r = apply_op(&theta, &logx).unwrap();
        assert_eq!(r, LogLaurent::basis(Rat::zero(), 0, 0, 1));
        let m2 = OpSeries::constant(D::symbol().sub(&D::from_i64(2)));
        let x2 = LogLaurent::<Rat>::basis(Rat::zero(), 2, 0, 1);
        assert!(apply_op(&m2, &x2).unwrap().is_zero());
    }

    #[test]
    fn y_on_log_q() {
        let n = 3;
        let op = OpSeries::constant(Q::symbol().sub(&Q::one()));
        let f = LogLaurent::<QFrac>::basis(Rat::zero(), n, 1, 1);
        let r = apply_op(&op, &f).unwrap();
        let qn = QFrac::q_pow(n);
        assert_eq!(r.get(0, n), &[qn.clone(), qn.sub(&QFrac::one())][..]);
    }

    #[test]
    fn inverse_block_action() {
        // (θ - 1)^{-1} on x^0 (log x)^1 = -(log x) - 1
        let f = RatFunc::<DiffVar>::inv_roots(&[int(1)]);
        let w = act_func::<DiffVar>(&f, &Rat::zero(), &[int(0), int(1)]).unwrap();
        assert_eq!(w, vec![int(-1), int(-1)]);
    }

    #[test]
    fn series_application_truncates() {
        let a = TSeries::with_order(vec![D::symbol(), D::x_pow(1)], 2);
        let f = LogLaurent::<Rat>::basis(Rat::zero(), 0, 0, 3);
        let r = apply_op(&a, &f).unwrap();
        assert_eq!(r.order(), 2);
        assert_eq!(r.get(1, 1), &[int(1)][..]);
    }

    #[test]
    fn q_root_splitting() {
        let p = UPoly::from_roots(&[QFrac::one(), QFrac::q_pow(-1), QFrac::zero()]);
        assert_eq!(
            QVar::split_roots(&p).unwrap(),
            vec![QRoot::Zero, QRoot::Pow(-1), QRoot::Pow(0)]
        );
    }

    #[test]
    fn binomial_basis_conversion() {
        // C(L,2) = L^2/2 - L/2
        let v = binomial_to_power(&[QFrac::zero(), QFrac::zero(), QFrac::one()]);
        assert_eq!(
            v,
            vec![QFrac::zero(), QFrac::from_rat(&crate::exact::rat(-1, 2)), QFrac::from_rat(&crate::exact::rat(1, 2))]
        );
    }
}
