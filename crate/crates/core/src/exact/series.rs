use std::fmt;

use super::{int, rat, ExactError, QAlgebra, Rat, Ring};

/// Power series in `u` known modulo `u^order`, or an exact polynomial when
/// `order` is `None`.
///
/// Arithmetic truncates to the smaller order of its operands, so no result
/// ever claims a coefficient it cannot know.
#[derive(Clone)]
pub struct TSeries<K> {
    c: Vec<K>,
    order: Option<usize>,
}

impl<K: Ring> TSeries<K> {
    pub fn new(mut c: Vec<K>, order: Option<usize>) -> Self {
        if let Some(n) = order {
            c.truncate(n);
        }
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        TSeries { c, order }
    }

    pub fn exact(c: Vec<K>) -> Self {
        Self::new(c, None)
    }

    pub fn with_order(c: Vec<K>, order: usize) -> Self {
        Self::new(c, Some(order))
    }

    pub fn constant(k: K) -> Self {
        Self::exact(vec![k])
    }

    pub fn monomial(k: K, deg: usize) -> Self {
        let mut c = vec![K::zero(); deg];
        c.push(k);
        Self::exact(c)
    }

    /// The series variable `u`.
    pub fn var() -> Self {
        Self::monomial(K::one(), 1)
    }

    pub fn order(&self) -> Option<usize> {
        self.order
    }

    /// Coefficient of `u^i`; asking beyond the known order is a logic error.
    pub fn coeff(&self, i: usize) -> K {
        if let Some(n) = self.order {
            assert!(i < n, "coefficient u^{i} requested from a series known mod u^{n}");
        }
        self.c.get(i).cloned().unwrap_or_else(K::zero)
    }

    /// Stored coefficients (trailing zeros trimmed).
    pub fn coeffs(&self) -> &[K] {
        &self.c
    }

    pub fn truncate(&self, n: usize) -> Self {
        let order = Some(self.order.map_or(n, |m| m.min(n)));
        Self::new(self.c.clone(), order)
    }

    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    /// Multiplication by `u^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.c.is_empty() {
            return Self::new(Vec::new(), self.order.map(|n| n + k));
        }
        let mut c = vec![K::zero(); k];
        c.extend(self.c.iter().cloned());
        Self::new(c, self.order.map(|n| n + k))
    }

    /// Division by `u^k`; the low coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Self {
        assert!(self.c.iter().take(k).all(|x| x.is_zero()), "shift_down of a non-divisible series");
        let order = self.order.map(|n| n.saturating_sub(k));
        Self::new(self.c.iter().skip(k).cloned().collect(), order)
    }

    pub fn map<L: Ring>(&self, f: impl Fn(&K) -> L) -> TSeries<L> {
        TSeries::new(self.c.iter().map(f).collect(), self.order)
    }

    /// Evaluates an exact polynomial-in-`u` series at `u = v`.
    pub fn eval_exact(&self, v: &K) -> K {
        assert!(self.order.is_none(), "eval_exact on a truncated series");
        self.c.iter().rev().fold(K::zero(), |acc, c| acc.mul(v).add(c))
    }

    fn combine_order(&self, o: &Self) -> Option<usize> {
        match (self.order, o.order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        }
    }

    /// Series inverse to the given order when the constant term is a unit.
    pub fn inv_to(&self, order: usize) -> Option<Self> {
        let n = self.order.map_or(order, |m| m.min(order));
        let c0i = self.c.first()?.inv()?;
        let mut out: Vec<K> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                out.push(c0i.clone());
                continue;
            }
            let mut acc = K::zero();
            for j in 1..=k.min(self.c.len().saturating_sub(1)) {
                acc.add_assign(&self.c[j].mul(&out[k - j]));
            }
            out.push(acc.neg().mul(&c0i));
        }
        Some(Self::with_order(out, n))
    }
}

impl<K: Ring> Ring for TSeries<K> {
    fn zero() -> Self {
        TSeries { c: Vec::new(), order: None }
    }
    fn one() -> Self {
        Self::constant(K::one())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let order = self.combine_order(o);
        let mut n = self.c.len().max(o.c.len());
        if let Some(m) = order {
            n = n.min(m);
        }
        let c = (0..n)
            .map(|i| match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => K::zero(),
            })
            .collect();
        Self::new(c, order)
    }
    fn mul(&self, o: &Self) -> Self {
        let order = self.combine_order(o);
        if self.c.is_empty() || o.c.is_empty() {
            return Self::new(Vec::new(), order);
        }
        let mut n = self.c.len() + o.c.len() - 1;
        if let Some(m) = order {
            n = n.min(m);
        }
        let mut c = vec![K::zero(); n];
        for (i, a) in self.c.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(n - i) {
                c[i + j].add_assign(&a.mul(b));
            }
        }
        Self::new(c, order)
    }
    fn neg(&self) -> Self {
        TSeries { c: self.c.iter().map(|x| x.neg()).collect(), order: self.order }
    }
    fn from_i64(n: i64) -> Self {
        Self::constant(K::from_i64(n))
    }
    fn inv(&self) -> Option<Self> {
        match self.order {
            Some(n) => self.inv_to(n),
            None if self.c.len() == 1 => Some(Self::constant(self.c[0].inv()?)),
            None => None,
        }
    }
}

impl<K: QAlgebra> QAlgebra for TSeries<K> {
    fn from_rat(r: &Rat) -> Self {
        Self::constant(K::from_rat(r))
    }
}

/// Equality of the coefficients both sides know.
impl<K: Ring> PartialEq for TSeries<K> {
    fn eq(&self, o: &Self) -> bool {
        let n = match self.combine_order(o) {
            Some(n) => n,
            None => self.c.len().max(o.c.len()),
        };
        (0..n).all(|i| {
            let a = self.c.get(i);
            let b = o.c.get(i);
            match (a, b) {
                (Some(a), Some(b)) => a == b,
                (Some(a), None) => a.is_zero(),
                (None, Some(b)) => b.is_zero(),
                (None, None) => true,
            }
        })
    }
}

impl<K: Ring> fmt::Debug for TSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.c.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({c:?})u^{i}"));
            }
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        match self.order {
            Some(n) => write!(f, "{} + O(u^{n})", parts.join(" + ")),
            None => write!(f, "{}", parts.join(" + ")),
        }
    }
}

fn require_order<K: Ring>(s: &TSeries<K>, what: &str) -> Result<usize, ExactError> {
    match s.order {
        Some(n) => Ok(n),
        None if s.c.len() <= 1 => Ok(1),
        None => Err(ExactError::Precondition(format!("{what} of an untruncated series"))),
    }
}

/// Logarithm of a series with constant term 1.
pub fn series_log<K: QAlgebra>(s: &TSeries<K>) -> Result<TSeries<K>, ExactError> {
    if !s.c.first().is_some_and(|c| c.is_one()) {
        return Err(ExactError::Precondition("log needs constant term 1".into()));
    }
    let n = require_order(s, "log")?;
    let mut l: Vec<K> = vec![K::zero(); n];
    for k in 1..n {
        let mut acc = s.coeff(k).mul(&K::from_i64(k as i64));
        for (j, lj) in l.iter().enumerate().take(k).skip(1) {
            if lj.is_zero() {
                continue;
            }
            let t = lj.mul(&s.coeff(k - j)).mul(&K::from_i64(j as i64));
            acc.sub_assign(&t);
        }
        l[k] = acc.scale(&rat(1, k as i64));
    }
    Ok(TSeries::new(l, s.order))
}

/// Exponential of a series with zero constant term.
pub fn series_exp<K: QAlgebra>(s: &TSeries<K>) -> Result<TSeries<K>, ExactError> {
    if s.c.first().is_some_and(|c| !c.is_zero()) {
        return Err(ExactError::Precondition("exp needs zero constant term".into()));
    }
    let n = require_order(s, "exp")?;
    let mut e: Vec<K> = Vec::with_capacity(n);
    e.push(K::one());
    for k in 1..n {
        let mut acc = K::zero();
        for j in 1..=k {
            let sj = s.coeff(j);
            if sj.is_zero() {
                continue;
            }
            acc.add_assign(&sj.mul(&e[k - j]).mul(&K::from_i64(j as i64)));
        }
        e.push(acc.scale(&rat(1, k as i64)));
    }
    Ok(TSeries::new(e, s.order))
}

/// `log(1 + r)` by the power series in `r`; valid in noncommutative rings.
pub fn log1p_by_powers<K: QAlgebra>(r: &TSeries<K>) -> Result<TSeries<K>, ExactError> {
    if r.c.first().is_some_and(|c| !c.is_zero()) {
        return Err(ExactError::Precondition("log(1+r) needs r = 0 mod u".into()));
    }
    let n = require_order(r, "log")?;
    let mut acc = TSeries::new(Vec::new(), r.order);
    let mut pw = r.clone();
    for m in 1..n {
        if pw.is_zero() {
            break;
        }
        let sign = if m % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&pw.scale(&rat(sign, m as i64)));
        pw = pw.mul(r);
    }
    Ok(acc)
}

/// `exp(r)` by the power series in `r`; valid in noncommutative rings.
pub fn exp_by_powers<K: QAlgebra>(r: &TSeries<K>) -> Result<TSeries<K>, ExactError> {
    if r.c.first().is_some_and(|c| !c.is_zero()) {
        return Err(ExactError::Precondition("exp needs r = 0 mod u".into()));
    }
    let n = require_order(r, "exp")?;
    let mut acc = TSeries::new(vec![K::one()], r.order);
    let mut pw = r.clone();
    let mut fact = int(1);
    for m in 1..n {
        if pw.is_zero() {
            break;
        }
        fact *= int(m as i64);
        acc = acc.add(&pw.scale(&fact.recip()));
        pw = pw.mul(r);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = TSeries<Rat>;

    #[test]
    fn log_of_one_plus_u() {
        let s = S::with_order(vec![int(1), int(1)], 6);
        let l = series_log(&s).unwrap();
        let want: Vec<Rat> =
            (0..6).map(|k| if k == 0 { int(0) } else { rat(if k % 2 == 1 { 1 } else { -1 }, k) }).collect();
        assert_eq!(l, S::with_order(want, 6));
    }

    #[test]
    fn exp_log_roundtrip() {
        assert_eq!(series_exp(&S::zero()).unwrap(), S::one());
        let s = S::with_order(vec![int(1), int(1), int(1)], 8);
        let back = series_exp(&series_log(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.order(), Some(8));
        let by_powers = exp_by_powers(&log1p_by_powers(&s.sub(&S::one())).unwrap()).unwrap();
        assert_eq!(by_powers, s);
    }

    #[test]
    fn preconditions() {
        assert!(series_log(&S::with_order(vec![int(2)], 3)).is_err());
        assert!(series_exp(&S::with_order(vec![int(1)], 3)).is_err());
        assert!(series_log(&S::exact(vec![int(1), int(1)])).is_err());
    }

    #[test]
    fn truncation_and_inverse() {
        let a = S::with_order(vec![int(1), int(1)], 4);
        let b = S::exact(vec![int(1), int(-1)]);
        let p = a.mul(&b);
        assert_eq!(p.order(), Some(4));
        assert_eq!(p.coeff(2), int(-1));
        let i = a.inv().unwrap();
        assert!(i.mul(&a).is_one());
        assert_eq!(S::var().shift_up(2).shift_down(3), S::one());
    }
}
