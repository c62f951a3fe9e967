use std::fmt;

use super::{unit_inv, ExactError, QAlgebra, Rat, Ring};

/// Dense univariate polynomial, coefficients in increasing degree.
///
/// The highest stored coefficient is nonzero; the zero polynomial is empty.
#[derive(Clone, PartialEq)]
pub struct UPoly<K> {
    c: Vec<K>,
}

impl<K: Ring> UPoly<K> {
    pub fn new(mut c: Vec<K>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn constant(k: K) -> Self {
        Self::new(vec![k])
    }

    /// The variable itself.
    pub fn var() -> Self {
        Self::new(vec![K::zero(), K::one()])
    }

    pub fn monomial(k: K, deg: usize) -> Self {
        let mut c = vec![K::zero(); deg];
        c.push(k);
        Self::new(c)
    }

    /// Monic linear factor `var - root`.
    pub fn linear(root: &K) -> Self {
        Self::new(vec![root.neg(), K::one()])
    }

    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a K>) -> Self {
        roots.into_iter().fold(Self::one(), |acc, r| acc.mul(&Self::linear(r)))
    }

    pub fn coeffs(&self) -> &[K] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<K> {
        self.c
    }

    pub fn coeff(&self, i: usize) -> K {
        self.c.get(i).cloned().unwrap_or_else(K::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Number of stored coefficients (degree + 1, or 0 for the zero polynomial).
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn lead(&self) -> K {
        self.c.last().cloned().unwrap_or_else(K::zero)
    }

    pub fn eval(&self, x: &K) -> K {
        self.c.iter().rev().fold(K::zero(), |acc, c| acc.mul(x).add(c))
    }

    pub fn map<L: Ring>(&self, f: impl Fn(&K) -> L) -> UPoly<L> {
        UPoly::new(self.c.iter().map(f).collect())
    }

    pub fn scale(&self, k: &K) -> Self {
        Self::new(self.c.iter().map(|c| c.mul(k)).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c.iter().enumerate().skip(1).map(|(i, c)| c.mul(&K::from_i64(i as i64))).collect(),
        )
    }

    /// `p(var + a)`.
    pub fn taylor_shift(&self, a: &K) -> Self {
        if a.is_zero() || self.c.len() < 2 {
            return self.clone();
        }
        let mut c = self.c.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = c[j + 1].mul(a);
                c[j].add_assign(&t);
            }
        }
        Self::new(c)
    }

    /// `p(a · var)`.
    pub fn scale_var(&self, a: &K) -> Self {
        let mut pw = K::one();
        let mut out = Vec::with_capacity(self.c.len());
        for c in &self.c {
            out.push(c.mul(&pw));
            pw = pw.mul(a);
        }
        Self::new(out)
    }

    /// `p(q(var))`.
    pub fn compose(&self, q: &Self) -> Self {
        self.c.iter().rev().fold(Self::zero(), |acc, c| acc.mul(q).add(&Self::constant(c.clone())))
    }

    /// Drops coefficients of degree `>= n`.
    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.c.iter().take(n).cloned().collect())
    }

    /// Multiplication by `var^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.c.is_empty() {
            return self.clone();
        }
        let mut c = vec![K::zero(); k];
        c.extend(self.c.iter().cloned());
        Self::new(c)
    }

    /// Division with remainder; the divisor's leading coefficient must be a unit.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self), ExactError> {
        let dd = d
            .degree()
            .ok_or_else(|| ExactError::Precondition("division by zero polynomial".into()))?;
        let li = d
            .lead()
            .inv()
            .ok_or_else(|| ExactError::NotInvertible(format!("{:?}", d.lead())))?;
        let mut r = self.c.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![K::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let t = r[i + dd].mul(&li);
            if t.is_zero() {
                continue;
            }
            for (j, dc) in d.c.iter().enumerate() {
                let s = t.mul(dc);
                r[i + j].sub_assign(&s);
            }
            q[i] = t;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn exact_div(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d).expect("exact division");
        assert!(r.is_zero(), "internal invariant: inexact polynomial division");
        q
    }

    /// Monic gcd over a field.
    pub fn gcd(&self, other: &Self) -> Self {
        let (g, _, _) = self.ext_gcd(other);
        g
    }

    /// Returns `(g, s, t)` with `s·self + t·other = g`, `g` monic (or zero).
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("field coefficients");
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let li = unit_inv(&r0.lead());
        (r0.scale(&li), s0.scale(&li), t0.scale(&li))
    }

    /// Inverse of `self` modulo `m` over a field.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let (g, s, _) = self.ext_gcd(m);
        if g.degree() != Some(0) {
            return None;
        }
        Some(s.div_rem(m).ok()?.1)
    }
}

impl<K: Ring> Ring for UPoly<K> {
    fn zero() -> Self {
        UPoly { c: Vec::new() }
    }
    fn one() -> Self {
        Self::constant(K::one())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(
            (0..n)
                .map(|i| match (self.c.get(i), o.c.get(i)) {
                    (Some(a), Some(b)) => a.add(b),
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }
    fn mul(&self, o: &Self) -> Self {
        if self.c.is_empty() || o.c.is_empty() {
            return Self::zero();
        }
        let mut c = vec![K::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                let t = a.mul(b);
                c[i + j].add_assign(&t);
            }
        }
        Self::new(c)
    }
    fn neg(&self) -> Self {
        UPoly { c: self.c.iter().map(|c| c.neg()).collect() }
    }
    fn from_i64(n: i64) -> Self {
        Self::constant(K::from_i64(n))
    }
    fn inv(&self) -> Option<Self> {
        if self.c.len() == 1 {
            Some(Self::constant(self.c[0].inv()?))
        } else {
            None
        }
    }
}

impl<K: QAlgebra> QAlgebra for UPoly<K> {
    fn from_rat(r: &Rat) -> Self {
        Self::constant(K::from_rat(r))
    }
}

impl<K: Ring> fmt::Debug for UPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c:?})")?,
                1 => write!(f, "({c:?})*v")?,
                _ => write!(f, "({c:?})*v^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn p(v: &[i64]) -> UPoly<Rat> {
        UPoly::new(v.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn arithmetic_and_shift() {
        let a = p(&[1, 2, 1]);
        assert_eq!(a.taylor_shift(&int(-1)), p(&[0, 0, 1]));
        assert_eq!(a.mul(&p(&[-1, 1])), p(&[-1, -1, 1, 1]));
        assert_eq!(a.eval(&int(2)), int(9));
        assert_eq!(p(&[0, 0, 0]).degree(), None);
        assert_eq!(p(&[1, 1]).compose(&p(&[0, 0, 1])), p(&[1, 0, 1]));
        assert_eq!(p(&[1, 1, 1]).scale_var(&int(2)), p(&[1, 2, 4]));
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, 0, 1]);
        let (q, r) = a.div_rem(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        let g = p(&[2, 3, 1]).gcd(&p(&[-1, 0, 1]));
        assert_eq!(g, p(&[1, 1]));
        let inv = p(&[0, 1]).inv_mod(&p(&[1, 0, 1])).unwrap();
        assert_eq!(inv.mul(&p(&[0, 1])).div_rem(&p(&[1, 0, 1])).unwrap().1, p(&[1]));
        assert_eq!(p(&[1, 2]).scale(&rat(1, 2)), UPoly::new(vec![rat(1, 2), int(1)]));
    }
}
