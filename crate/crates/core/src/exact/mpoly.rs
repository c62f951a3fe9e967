use std::collections::BTreeMap;
use std::fmt;

use super::{QAlgebra, Rat, Ring};

/// Sparse Laurent polynomial in `N` commuting variables.
///
/// Exponents may be negative; no zero coefficient is ever stored.
#[derive(Clone, PartialEq)]
pub struct MPoly<K, const N: usize> {
    terms: BTreeMap<[i32; N], K>,
}

impl<K: Ring, const N: usize> MPoly<K, N> {
    pub fn from_terms(it: impl IntoIterator<Item = ([i32; N], K)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in it {
            out.add_term(e, &c);
        }
        out
    }

    pub fn constant(c: K) -> Self {
        Self::monomial([0; N], c)
    }

    pub fn monomial(e: [i32; N], c: K) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        MPoly { terms }
    }

    /// The `i`-th variable raised to `k`.
    pub fn var_pow(i: usize, k: i32) -> Self {
        let mut e = [0; N];
        e[i] = k;
        Self::monomial(e, K::one())
    }

    pub fn var(i: usize) -> Self {
        Self::var_pow(i, 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32; N], &K)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &[i32; N]) -> K {
        self.terms.get(e).cloned().unwrap_or_else(K::zero)
    }

    pub fn add_term(&mut self, e: [i32; N], c: &K) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                v.add_assign(c);
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn map_coeffs<L: Ring>(&self, f: impl Fn(&K) -> L) -> MPoly<L, N> {
        MPoly::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))))
    }

    /// Substitutes each variable `i` by `vals[i]`; negative exponents use `inv_vals[i]`.
    pub fn eval<R: Ring>(&self, coeff: impl Fn(&K) -> R, vals: &[R; N], inv_vals: &[R; N]) -> R {
        let mut acc = R::zero();
        for (e, c) in &self.terms {
            let mut t = coeff(c);
            for i in 0..N {
                let k = e[i];
                if k > 0 {
                    t = t.mul(&vals[i].pow(k as u64));
                } else if k < 0 {
                    t = t.mul(&inv_vals[i].pow((-k) as u64));
                }
            }
            acc.add_assign(&t);
        }
        acc
    }

    /// Lowest and highest exponent of variable `i`, if nonzero.
    pub fn exponent_range(&self, i: usize) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|e| e[i]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), k| (lo.min(k), hi.max(k))))
    }

    /// Coefficient extraction with respect to variable `i`: maps `k` to the
    /// part with `var_i^k` removed.
    pub fn collect_var(&self, i: usize) -> BTreeMap<i32, MPoly<K, N>> {
        let mut out: BTreeMap<i32, MPoly<K, N>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut f = *e;
            f[i] = 0;
            out.entry(e[i]).or_insert_with(Self::zero).add_term(f, c);
        }
        out
    }

    /// Multiplication by a monomial.
    pub fn shift(&self, by: [i32; N]) -> Self {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = *e;
                    for i in 0..N {
                        f[i] += by[i];
                    }
                    (f, c.clone())
                })
                .collect(),
        }
    }

    /// Applies an exponent map that must be injective on the support.
    pub fn map_exponents(&self, f: impl Fn(&[i32; N]) -> [i32; N]) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (f(e), c.clone())))
    }
}

impl<K: Ring, const N: usize> Ring for MPoly<K, N> {
    fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }
    fn one() -> Self {
        Self::constant(K::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut out = big.clone();
        for (e, c) in &small.terms {
            out.add_term(*e, c);
        }
        out
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let mut e = *ea;
                for i in 0..N {
                    e[i] += eb[i];
                }
                out.add_term(e, &ca.mul(cb));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        MPoly { terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect() }
    }
    fn from_i64(n: i64) -> Self {
        Self::constant(K::from_i64(n))
    }
    fn inv(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        let mut f = *e;
        for x in f.iter_mut() {
            *x = -*x;
        }
        Some(Self::monomial(f, c.inv()?))
    }
}

impl<K: QAlgebra, const N: usize> QAlgebra for MPoly<K, N> {
    fn from_rat(r: &Rat) -> Self {
        Self::constant(K::from_rat(r))
    }
}

impl<K: Ring, const N: usize> fmt::Debug for MPoly<K, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("({c:?}){e:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
