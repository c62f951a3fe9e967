use std::collections::BTreeMap;
use std::fmt;

use super::{unit_inv, QAlgebra, QFrac, Rat, Ring, UPoly};

/// The formal symbol a [`RatFunc`] is written in, together with the
/// substitution that the commutation rule with `x` induces on it.
///
/// For differential operators the symbol is `θ = x∂x` and `x^j` shifts it by
/// `θ ↦ θ + j`; for q-difference operators it is `y` and `y ↦ q^j y`.
pub trait VarKind: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type K: QAlgebra;
    type Root: Ord + Clone + fmt::Debug + Send + Sync + 'static;

    /// Value of the symbol at which the factor `(v - root)` vanishes.
    fn root_value(r: &Self::Root) -> Self::K;
    /// `p(v)` with `v` replaced by its shift by `j`.
    fn shift_poly(p: &UPoly<Self::K>, j: i64) -> UPoly<Self::K>;
    /// Writes `shift_j(v) - r` as `scale · (v - r')`.
    fn shift_root(r: &Self::Root, j: i64) -> (Self::K, Self::Root);
    fn symbol() -> &'static str;
}

/// Euler-operator symbol `θ`, rational roots.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffVar;

impl VarKind for DiffVar {
    type K = Rat;
    type Root = Rat;

    fn root_value(r: &Rat) -> Rat {
        r.clone()
    }
    fn shift_poly(p: &UPoly<Rat>, j: i64) -> UPoly<Rat> {
        p.taylor_shift(&Rat::from_i64(j))
    }
    fn shift_root(r: &Rat, j: i64) -> (Rat, Rat) {
        (Rat::one(), r - Rat::from_i64(j))
    }
    fn symbol() -> &'static str {
        "theta"
    }
}

/// Root of a q-symbol factor: `y - q^m` or `y` itself.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum QRoot {
    Zero,
    Pow(i64),
}

/// q-shift symbol `y` over `Q(q)`, roots at powers of `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QVar;

impl VarKind for QVar {
    type K = QFrac;
    type Root = QRoot;

    fn root_value(r: &QRoot) -> QFrac {
        match r {
            QRoot::Zero => QFrac::zero(),
            QRoot::Pow(m) => QFrac::q_pow(*m),
        }
    }
    fn shift_poly(p: &UPoly<QFrac>, j: i64) -> UPoly<QFrac> {
        if j == 0 {
            return p.clone();
        }
        p.scale_var(&QFrac::q_pow(j))
    }
    fn shift_root(r: &QRoot, j: i64) -> (QFrac, QRoot) {
        match r {
            QRoot::Zero => (QFrac::q_pow(j), QRoot::Zero),
            QRoot::Pow(m) => (QFrac::q_pow(j), QRoot::Pow(m - j)),
        }
    }
    fn symbol() -> &'static str {
        "y"
    }
}

/// Rational function in one symbol with a factored denominator
/// `Π (v - r)^{m_r}`.
///
/// Numerator and denominator never share a root, so the presentation is
/// unique and equality is structural.
#[derive(Clone)]
pub struct RatFunc<V: VarKind> {
    num: UPoly<V::K>,
    den: BTreeMap<V::Root, u32>,
}

impl<V: VarKind> PartialEq for RatFunc<V> {
    fn eq(&self, o: &Self) -> bool {
        self.num == o.num && self.den == o.den
    }
}

impl<V: VarKind> RatFunc<V> {
    pub fn new(num: UPoly<V::K>, den: BTreeMap<V::Root, u32>) -> Self {
        let mut out = RatFunc { num, den };
        out.reduce();
        out
    }

    pub fn from_poly(num: UPoly<V::K>) -> Self {
        RatFunc { num, den: BTreeMap::new() }
    }

    pub fn constant(k: V::K) -> Self {
        Self::from_poly(UPoly::constant(k))
    }

    /// The symbol itself.
    pub fn var() -> Self {
        Self::from_poly(UPoly::var())
    }

    /// `1 / Π (v - r)` over the given roots (with repetition).
    pub fn inv_roots<'a>(roots: impl IntoIterator<Item = &'a V::Root>) -> Self {
        let mut den = BTreeMap::new();
        for r in roots {
            *den.entry(r.clone()).or_insert(0) += 1;
        }
        RatFunc { num: UPoly::one(), den }
    }

    pub fn numerator(&self) -> &UPoly<V::K> {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<V::Root, u32> {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_empty()
    }

    /// Expanded denominator polynomial.
    pub fn den_poly(&self) -> UPoly<V::K> {
        let mut out = UPoly::one();
        for (r, &m) in &self.den {
            let lin = UPoly::linear(&V::root_value(r));
            for _ in 0..m {
                out = out.mul(&lin);
            }
        }
        out
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (r, m) in self.den.iter_mut() {
            let rv = V::root_value(r);
            while *m > 0 && self.num.eval(&rv).is_zero() {
                self.num = self.num.exact_div(&UPoly::linear(&rv));
                *m -= 1;
            }
        }
        self.den.retain(|_, m| *m > 0);
    }

    /// Substitutes the shifted symbol (`θ+j` or `q^j y`).
    pub fn shift(&self, j: i64) -> Self {
        if j == 0 {
            return self.clone();
        }
        let mut num = V::shift_poly(&self.num, j);
        let mut den = BTreeMap::new();
        let mut scale = V::K::one();
        for (r, &m) in &self.den {
            let (s, r2) = V::shift_root(r, j);
            scale = scale.mul(&s.pow(m as u64));
            *den.entry(r2).or_insert(0) += m;
        }
        if !scale.is_one() {
            num = num.scale(&unit_inv(&scale));
        }
        RatFunc { num, den }
    }

    /// Value at a point where the denominator does not vanish.
    pub fn eval(&self, v: &V::K) -> Option<V::K> {
        let d = self.den_poly().eval(v);
        Some(self.num.eval(v).mul(&d.inv()?))
    }

    pub fn scale(&self, k: &V::K) -> Self {
        Self::new(self.num.scale(k), self.den.clone())
    }

    pub fn map_coeffs(&self, f: impl Fn(&V::K) -> V::K) -> Self {
        Self::new(self.num.map(f), self.den.clone())
    }
}

impl<V: VarKind> Ring for RatFunc<V> {
    fn zero() -> Self {
        Self::from_poly(UPoly::zero())
    }
    fn one() -> Self {
        Self::from_poly(UPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        let mut den = self.den.clone();
        for (r, &m) in &o.den {
            let e = den.entry(r.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        let lift = |x: &Self| {
            let mut p = x.num.clone();
            for (r, &m) in &den {
                let have = x.den.get(r).copied().unwrap_or(0);
                let lin = UPoly::linear(&V::root_value(r));
                for _ in have..m {
                    p = p.mul(&lin);
                }
            }
            p
        };
        Self::new(lift(self).add(&lift(o)), den)
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut den = self.den.clone();
        for (r, &m) in &o.den {
            *den.entry(r.clone()).or_insert(0) += m;
        }
        Self::new(self.num.mul(&o.num), den)
    }
    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    fn from_i64(n: i64) -> Self {
        Self::constant(V::K::from_i64(n))
    }
    fn inv(&self) -> Option<Self> {
        if self.num.degree() == Some(0) {
            let c = self.num.coeff(0).inv()?;
            return Some(RatFunc { num: self.den_poly().scale(&c), den: BTreeMap::new() });
        }
        None
    }
}

impl<V: VarKind> QAlgebra for RatFunc<V> {
    fn from_rat(r: &Rat) -> Self {
        Self::constant(V::K::from_rat(r))
    }
}

impl<V: VarKind> fmt::Debug for RatFunc<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.num)?;
        for (r, m) in &self.den {
            write!(f, " / ({} - {:?})^{}", V::symbol(), r, m)?;
        }
        Ok(())
    }
}

/// `f = poly + Σ coeff / (v - root)^order`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialFractions<V: VarKind> {
    pub poly: UPoly<V::K>,
    /// `(root, order, coefficient)`, sorted by root then order, no zeros.
    pub terms: Vec<(V::Root, u32, V::K)>,
}

impl<V: VarKind> PartialFractions<V> {
    /// Reassembles the rational function.
    pub fn recombine(&self) -> RatFunc<V> {
        let mut acc = RatFunc::from_poly(self.poly.clone());
        for (r, j, c) in &self.terms {
            let mut den = BTreeMap::new();
            den.insert(r.clone(), *j);
            acc = acc.add(&RatFunc::new(UPoly::constant(c.clone()), den));
        }
        acc
    }
}

fn series_inverse<K: Ring>(a: &[K], n: usize) -> Vec<K> {
    let a0i = unit_inv(&a[0]);
    let mut b: Vec<K> = Vec::with_capacity(n);
    for k in 0..n {
        if k == 0 {
            b.push(a0i.clone());
            continue;
        }
        let mut acc = K::zero();
        for i in 1..=k.min(a.len() - 1) {
            acc.add_assign(&a[i].mul(&b[k - i]));
        }
        b.push(acc.neg().mul(&a0i));
    }
    b
}

pub fn partial_fractions<V: VarKind>(f: &RatFunc<V>) -> PartialFractions<V> {
    let poly = f.num.div_rem(&f.den_poly()).expect("monic denominator").0;
    let mut terms = Vec::new();
    for (r, &m) in &f.den {
        let rv = V::root_value(r);
        let m = m as usize;
        let shifted_num = f.num.taylor_shift(&rv).truncate(m);
        let mut other = UPoly::<V::K>::one();
        for (r2, &m2) in &f.den {
            if r2 == r {
                continue;
            }
            let lin = UPoly::new(vec![rv.sub(&V::root_value(r2)), V::K::one()]);
            for _ in 0..m2 {
                other = other.mul(&lin).truncate(m);
            }
        }
        let inv = series_inverse(other.coeffs(), m);
        let local = shifted_num.mul(&UPoly::new(inv)).truncate(m);
        for k in (0..m).rev() {
            let c = local.coeff(k);
            if !c.is_zero() {
                terms.push((r.clone(), (m - k) as u32, c));
            }
        }
    }
    terms.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    PartialFractions { poly, terms }
}

/// Rational function kept as `poly + Σ_r Σ_k c_{r,k} / (v - r)^k`.
///
/// Sums are merges and products with a factor of few poles stay cheap, so
/// long accumulations never expand a large common denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleSum<V: VarKind> {
    pub poly: UPoly<V::K>,
    /// `root ↦ [c_1, c_2, ...]`, coefficient of `(v - root)^{-k}` at index `k - 1`.
    pub poles: BTreeMap<V::Root, Vec<V::K>>,
}

fn add_into<K: Ring>(dst: &mut Vec<K>, src: &[K]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), K::zero());
    }
    for (d, s) in dst.iter_mut().zip(src) {
        d.add_assign(s);
    }
}

/// Taylor coefficients of `Σ_l b_l (w + d)^{-l}` up to `w^{n-1}`.
fn pole_expansion<K: Ring>(b: &[K], d: &K, n: usize) -> Vec<K> {
    let dinv = unit_inv(d);
    let mut g = Vec::with_capacity(n);
    let mut c = dinv.clone();
    let step = dinv.neg();
    for _ in 0..n {
        g.push(c.clone());
        c = c.mul(&step);
    }
    let mut out = vec![K::zero(); n];
    let mut pw = g.clone();
    for (l, bl) in b.iter().enumerate() {
        if l > 0 {
            let mut next = vec![K::zero(); n];
            for (i, x) in pw.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in g.iter().enumerate().take(n - i) {
                    next[i + j].add_assign(&x.mul(y));
                }
            }
            pw = next;
        }
        if bl.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(&pw) {
            o.add_assign(&x.mul(bl));
        }
    }
    out
}

impl<V: VarKind> PoleSum<V> {
    pub fn zero() -> Self {
        PoleSum { poly: UPoly::zero(), poles: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero() && self.poles.is_empty()
    }

    pub fn from_ratfunc(f: &RatFunc<V>) -> Self {
        let pf = partial_fractions(f);
        let mut poles: BTreeMap<V::Root, Vec<V::K>> = BTreeMap::new();
        for (r, k, c) in pf.terms {
            let v = poles.entry(r).or_default();
            if v.len() < k as usize {
                v.resize(k as usize, V::K::zero());
            }
            v[k as usize - 1] = c;
        }
        PoleSum { poly: pf.poly, poles }
    }

    pub fn to_partial_fractions(&self) -> PartialFractions<V> {
        let mut terms = Vec::new();
        for (r, cs) in &self.poles {
            for (k, c) in cs.iter().enumerate() {
                if !c.is_zero() {
                    terms.push((r.clone(), k as u32 + 1, c.clone()));
                }
            }
        }
        PartialFractions { poly: self.poly.clone(), terms }
    }

    pub fn to_ratfunc(&self) -> RatFunc<V> {
        self.to_partial_fractions().recombine()
    }

    fn normalize(&mut self) {
        for cs in self.poles.values_mut() {
            while cs.last().is_some_and(|c| c.is_zero()) {
                cs.pop();
            }
        }
        self.poles.retain(|_, cs| !cs.is_empty());
    }

    pub fn add_assign(&mut self, o: &Self) {
        self.poly = self.poly.add(&o.poly);
        for (r, cs) in &o.poles {
            add_into(self.poles.entry(r.clone()).or_default(), cs);
        }
        self.normalize();
    }

    pub fn scale(&self, k: &V::K) -> Self {
        let mut out = PoleSum {
            poly: self.poly.scale(k),
            poles: self.poles.iter().map(|(r, cs)| (r.clone(), cs.iter().map(|c| c.mul(k)).collect())).collect(),
        };
        out.normalize();
        out
    }

    /// Substitutes the shifted symbol, as [`RatFunc::shift`].
    pub fn shift(&self, j: i64) -> Self {
        if j == 0 {
            return self.clone();
        }
        let mut poles: BTreeMap<V::Root, Vec<V::K>> = BTreeMap::new();
        for (r, cs) in &self.poles {
            let (s, r2) = V::shift_root(r, j);
            let sinv = unit_inv(&s);
            let mut pw = V::K::one();
            let moved: Vec<V::K> = cs
                .iter()
                .map(|c| {
                    pw = pw.mul(&sinv);
                    c.mul(&pw)
                })
                .collect();
            add_into(poles.entry(r2).or_default(), &moved);
        }
        PoleSum { poly: V::shift_poly(&self.poly, j), poles }
    }

    /// Adds `(Σ_k a_k (v - r)^{-k}) · p(v)`.
    fn add_pole_times_poly(&mut self, r: &V::Root, a: &[V::K], p: &UPoly<V::K>) {
        if p.is_zero() {
            return;
        }
        let rv = V::root_value(r);
        let pw = p.taylor_shift(&rv);
        let pc = pw.coeffs();
        let m = a.len();
        // product in w = v - r, exponent e stored at e + m
        let mut prod = vec![V::K::zero(); m + pc.len()];
        for (k, ak) in a.iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            for (i, pi) in pc.iter().enumerate() {
                prod[i + m - (k + 1)].add_assign(&ak.mul(pi));
            }
        }
        let principal: Vec<V::K> = (1..=m).map(|k| prod[m - k].clone()).collect();
        add_into(self.poles.entry(r.clone()).or_default(), &principal);
        let regular = UPoly::new(prod[m..].to_vec());
        if !regular.is_zero() {
            self.poly = self.poly.add(&regular.taylor_shift(&rv.neg()));
        }
    }

    /// Adds the principal part at `r` of `(Σ a_k (v - r)^{-k})(Σ b_l (v - s)^{-l})`.
    fn add_pole_pair(&mut self, r: &V::Root, a: &[V::K], s: &V::Root, b: &[V::K]) {
        let d = V::root_value(r).sub(&V::root_value(s));
        let m = a.len();
        let bexp = pole_expansion(b, &d, m);
        let mut principal = vec![V::K::zero(); m];
        for (k, ak) in a.iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            // a_k w^{-(k+1)} · bexp[i] w^i contributes to order k + 1 - i
            for (i, bi) in bexp.iter().enumerate().take(k + 1) {
                principal[k - i].add_assign(&ak.mul(bi));
            }
        }
        add_into(self.poles.entry(r.clone()).or_default(), &principal);
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = PoleSum { poly: self.poly.mul(&o.poly), poles: BTreeMap::new() };
        for (r, a) in &self.poles {
            out.add_pole_times_poly(r, a, &o.poly);
        }
        for (s, b) in &o.poles {
            out.add_pole_times_poly(s, b, &self.poly);
        }
        for (r, a) in &self.poles {
            for (s, b) in &o.poles {
                if r == s {
                    let mut c = vec![V::K::zero(); a.len() + b.len()];
                    for (k, ak) in a.iter().enumerate() {
                        for (l, bl) in b.iter().enumerate() {
                            c[k + l + 1].add_assign(&ak.mul(bl));
                        }
                    }
                    add_into(out.poles.entry(r.clone()).or_default(), &c);
                } else {
                    out.add_pole_pair(r, a, s, b);
                    out.add_pole_pair(s, b, r, a);
                }
            }
        }
        out.normalize();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    type F = RatFunc<DiffVar>;

    fn poly(v: &[i64]) -> UPoly<Rat> {
        UPoly::new(v.iter().map(|&x| int(x)).collect())
    }

    fn den(roots: &[(i64, u32)]) -> BTreeMap<Rat, u32> {
        roots.iter().map(|&(r, m)| (int(r), m)).collect()
    }

    #[test]
    fn spec_partial_fraction_examples() {
        let f = F::new(poly(&[1]), den(&[(0, 1), (1, 1)]));
        let pf = partial_fractions(&f);
        assert!(pf.poly.is_zero());
        assert_eq!(pf.terms, vec![(int(0), 1, int(-1)), (int(1), 1, int(1))]);

        let g = F::from_poly(poly(&[5, 0, 1]));
        let pg = partial_fractions(&g);
        assert_eq!(pg.poly, poly(&[5, 0, 1]));
        assert!(pg.terms.is_empty());

        let h = F::new(poly(&[3, 2]), den(&[(1, 2)]));
        let ph = partial_fractions(&h);
        assert_eq!(ph.terms, vec![(int(1), 1, int(2)), (int(1), 2, int(5))]);
        assert_eq!(ph.recombine(), h);
    }

    #[test]
    fn reduction_cancels_common_roots() {
        let f = F::new(poly(&[-1, 0, 1]), den(&[(1, 2)]));
        assert_eq!(f, F::new(poly(&[1, 1]), den(&[(1, 1)])));
        let g = F::new(poly(&[0, 1]), den(&[(0, 1)]));
        assert!(g.is_one());
    }

    #[test]
    fn shift_moves_roots() {
        let f = F::new(poly(&[0, 1]), den(&[(2, 1)]));
        let g = f.shift(1);
        assert_eq!(g, F::new(poly(&[1, 1]), den(&[(1, 1)])));
        assert_eq!(g.eval(&int(3)), f.eval(&int(4)));
        assert_eq!(f.eval(&int(0)), Some(int(0)));
        assert_eq!(f.eval(&int(3)), Some(int(3)));
        assert_eq!(f.add(&f.neg()), F::zero());
        assert_eq!(F::constant(rat(1, 2)).add(&F::constant(rat(1, 2))), F::one());
    }

    #[test]
    fn q_shift() {
        type G = RatFunc<QVar>;
        let y = G::var();
        let inv = G::inv_roots(&[QRoot::Pow(0)]);
        let shifted = inv.shift(1);
        // 1/(q y - 1) = q^{-1} / (y - q^{-1})
        let want = G::new(UPoly::constant(QFrac::q_pow(-1)), [(QRoot::Pow(-1), 1)].into_iter().collect());
        assert_eq!(shifted, want);
        assert_eq!(y.shift(2), G::from_poly(UPoly::new(vec![QFrac::zero(), QFrac::q_pow(2)])));
        let pf = partial_fractions(&G::inv_roots(&[QRoot::Pow(0), QRoot::Pow(1)]));
        assert_eq!(pf.recombine(), G::inv_roots(&[QRoot::Pow(0), QRoot::Pow(1)]));
        assert_eq!(pf.terms.len(), 2);
    }

    #[test]
    fn pole_sum_matches_ratfunc() {
        let fs = [
            F::new(poly(&[1, 2, 3]), den(&[(0, 2), (-1, 1)])),
            F::new(poly(&[0, 0, 1]), den(&[(1, 1), (2, 3)])),
            F::new(poly(&[5, -1]), BTreeMap::new()),
            F::new(poly(&[-2]), den(&[(0, 1), (3, 2)])),
        ];
        for f in &fs {
            for g in &fs {
                let (a, b) = (PoleSum::from_ratfunc(f), PoleSum::from_ratfunc(g));
                assert_eq!(a.mul(&b).to_ratfunc(), f.mul(g));
                let mut c = a.clone();
                c.add_assign(&b);
                assert_eq!(c.to_ratfunc(), f.add(g));
                assert_eq!(a.shift(-2).mul(&b.shift(3)).to_ratfunc(), f.shift(-2).mul(&g.shift(3)));
            }
        }
        type G = RatFunc<QVar>;
        let y = G::var();
        let h = G::inv_roots(&[QRoot::Pow(0), QRoot::Pow(0), QRoot::Zero]).mul(&y.add(&G::one()));
        let k = G::inv_roots(&[QRoot::Pow(1), QRoot::Pow(-2)]).mul(&y.mul(&y));
        let (a, b) = (PoleSum::from_ratfunc(&h), PoleSum::from_ratfunc(&k));
        assert_eq!(a.mul(&b).to_ratfunc(), h.mul(&k));
        assert_eq!(a.shift(2).mul(&b).to_ratfunc(), h.shift(2).mul(&k));
    }
}
