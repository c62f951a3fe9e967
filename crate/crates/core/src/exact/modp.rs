use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{ExactError, Rat, Ring};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn reduce_i128(v: i128, p: u64) -> i64 {
    v.rem_euclid(p as i128) as i64
}

/// Element of the prime field `F_p`.
///
/// `p = 0` marks an unreduced integer constant (as produced by `from_i64`);
/// it takes on the modulus of whatever it is combined with.
#[derive(Clone, Copy)]
pub struct Fp {
    v: i64,
    p: u64,
}

impl Fp {
    pub fn new(v: i64, p: u64) -> Self {
        assert!(p > 1, "modulus must be at least 2");
        Fp { v: reduce_i128(v as i128, p), p }
    }

    /// Reduces a rational whose denominator is prime to `p`.
    pub fn from_rat(r: &Rat, p: u64) -> Result<Self, ExactError> {
        let pb = BigInt::from(p);
        let n = r.numer().mod_floor(&pb).to_i64().unwrap();
        let d = r.denom().mod_floor(&pb).to_i64().unwrap();
        if d == 0 {
            return Err(ExactError::NotInvertible(format!("denominator of {r} vanishes mod {p}")));
        }
        Ok(Fp::new(n, p).mul(&Fp::new(d, p).inv().unwrap()))
    }

    pub fn value(&self) -> i64 {
        self.v
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn join(&self, o: &Self) -> u64 {
        match (self.p, o.p) {
            (0, q) | (q, 0) => q,
            (a, b) => {
                assert_eq!(a, b, "mixed moduli");
                a
            }
        }
    }

    fn make(v: i128, p: u64) -> Self {
        if p == 0 {
            Fp { v: v as i64, p: 0 }
        } else {
            Fp { v: reduce_i128(v, p), p }
        }
    }

    fn in_modulus(&self, p: u64) -> i64 {
        if p == 0 || self.p != 0 {
            self.v
        } else {
            reduce_i128(self.v as i128, p)
        }
    }
}

impl PartialEq for Fp {
    fn eq(&self, o: &Self) -> bool {
        let p = self.join(o);
        self.in_modulus(p) == o.in_modulus(p)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Ring for Fp {
    fn zero() -> Self {
        Fp { v: 0, p: 0 }
    }
    fn one() -> Self {
        Fp { v: 1, p: 0 }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn add(&self, o: &Self) -> Self {
        let p = self.join(o);
        Self::make(self.v as i128 + o.v as i128, p)
    }
    fn mul(&self, o: &Self) -> Self {
        let p = self.join(o);
        Self::make(self.v as i128 * o.v as i128, p)
    }
    fn neg(&self) -> Self {
        Self::make(-(self.v as i128), self.p)
    }
    fn from_i64(n: i64) -> Self {
        Fp { v: n, p: 0 }
    }
    fn inv(&self) -> Option<Self> {
        if self.p == 0 {
            return match self.v {
                1 | -1 => Some(*self),
                _ => None,
            };
        }
        if self.v == 0 {
            return None;
        }
        let e = (self.v as i128).extended_gcd(&(self.p as i128));
        Some(Self::make(e.x, self.p))
    }
}

/// Context of the finite field `F_{p^d} = F_p[z]/(f)` with `f` irreducible.
#[derive(Debug, PartialEq, Eq)]
pub struct GfCtx {
    pub p: u64,
    pub d: usize,
    /// Monic modulus, `d + 1` coefficients in increasing degree.
    modulus: Vec<u64>,
}

impl GfCtx {
    /// Builds `F_{p^d}` using the first irreducible polynomial in a
    /// deterministic enumeration.
    pub fn new(p: u64, d: usize) -> Arc<Self> {
        assert!(is_prime(p) && d >= 1);
        if d == 1 {
            return Arc::new(GfCtx { p, d, modulus: vec![0, 1] });
        }
        let total = p.pow(d as u32);
        for idx in 0..total {
            let mut f = Vec::with_capacity(d + 1);
            let mut k = idx;
            for _ in 0..d {
                f.push(k % p);
                k /= p;
            }
            f.push(1);
            if f[0] != 0 && is_irreducible(&f, p) {
                return Arc::new(GfCtx { p, d, modulus: f });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.d as u32)
    }

    pub fn from_rat(self: &Arc<Self>, r: &Rat) -> Result<Gf, ExactError> {
        let v = Fp::from_rat(r, self.p)?;
        Ok(self.embed(v.value() as u64))
    }

    pub fn embed(self: &Arc<Self>, v: u64) -> Gf {
        let mut c = vec![0; self.d];
        c[0] = v % self.p;
        Gf::Elem { c, ctx: self.clone() }
    }

    /// Uniformly random element.
    pub fn random(self: &Arc<Self>, rng: &mut impl rand::Rng) -> Gf {
        let c = (0..self.d).map(|_| rng.gen_range(0..self.p)).collect();
        Gf::Elem { c, ctx: self.clone() }
    }

    /// Uniformly random nonzero element.
    pub fn random_nonzero(self: &Arc<Self>, rng: &mut impl rand::Rng) -> Gf {
        loop {
            let g = self.random(rng);
            if !g.is_zero() {
                return g;
            }
        }
    }

    fn mul_raw(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p as u128;
        let mut prod = vec![0u128; 2 * self.d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        for k in (self.d..prod.len()).rev() {
            let t = prod[k];
            if t == 0 {
                continue;
            }
            for (j, &m) in self.modulus.iter().enumerate().take(self.d) {
                let idx = k - self.d + j;
                prod[idx] = (prod[idx] + (p - t) * m as u128) % p;
            }
            prod[k] = 0;
        }
        prod.truncate(self.d);
        prod.into_iter().map(|x| x as u64).collect()
    }
}

fn poly_mod_p(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let dm = m.len() - 1;
    let inv_lead = Fp::new(m[dm] as i64, p).inv().unwrap().value() as u64;
    while r.len() > dm {
        let t = (*r.last().unwrap() as u128 * inv_lead as u128 % p as u128) as u64;
        let shift = r.len() - 1 - dm;
        for (j, &mc) in m.iter().enumerate() {
            let idx = shift + j;
            r[idx] = ((r[idx] as u128 + (p as u128 - t as u128) * mc as u128) % p as u128) as u64;
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn poly_mul_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    out
}

fn poly_gcd_p(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    while !b.is_empty() {
        let r = poly_mod_p(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `z^(p^k) mod f`.
fn frobenius_power(f: &[u64], p: u64, k: usize) -> Vec<u64> {
    let mut x = poly_mod_p(&[0, 1], f, p);
    for _ in 0..k {
        // x <- x^p mod f
        let mut acc = vec![1u64];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mod_p(&poly_mul_p(&acc, &base, p), f, p);
            }
            base = poly_mod_p(&poly_mul_p(&base, &base, p), f, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

/// Rabin's irreducibility test for a monic `f` over `F_p`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    let sub_x = |mut g: Vec<u64>| {
        g.resize(g.len().max(2), 0);
        g[1] = (g[1] + p - 1) % p;
        while g.last() == Some(&0) {
            g.pop();
        }
        g
    };
    if !sub_x(frobenius_power(f, p, d)).is_empty() {
        return false;
    }
    for q in (2..=d).filter(|&q| d.is_multiple_of(q) && is_prime(q as u64)) {
        let h = sub_x(frobenius_power(f, p, d / q));
        let g = poly_gcd_p(f.to_vec(), h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Element of `F_{p^d}`; `Const` is an integer not yet tied to a field.
#[derive(Clone)]
pub enum Gf {
    Const(i64),
    Elem { c: Vec<u64>, ctx: Arc<GfCtx> },
}

impl Gf {
    pub fn ctx(&self) -> Option<&Arc<GfCtx>> {
        match self {
            Gf::Const(_) => None,
            Gf::Elem { ctx, .. } => Some(ctx),
        }
    }

    fn lift(&self, ctx: &Arc<GfCtx>) -> Vec<u64> {
        match self {
            Gf::Const(v) => {
                let mut c = vec![0; ctx.d];
                c[0] = v.rem_euclid(ctx.p as i64) as u64;
                c
            }
            Gf::Elem { c, .. } => c.clone(),
        }
    }

    fn common(&self, o: &Self) -> Option<Arc<GfCtx>> {
        match (self.ctx(), o.ctx()) {
            (Some(a), Some(b)) => {
                assert!(Arc::ptr_eq(a, b) || a == b, "mixed finite fields");
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }
}

impl PartialEq for Gf {
    fn eq(&self, o: &Self) -> bool {
        match self.common(o) {
            Some(ctx) => self.lift(&ctx) == o.lift(&ctx),
            None => matches!((self, o), (Gf::Const(a), Gf::Const(b)) if a == b),
        }
    }
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gf::Const(v) => write!(f, "{v}"),
            Gf::Elem { c, .. } => write!(f, "{c:?}"),
        }
    }
}

impl Ring for Gf {
    fn zero() -> Self {
        Gf::Const(0)
    }
    fn one() -> Self {
        Gf::Const(1)
    }
    fn is_zero(&self) -> bool {
        match self {
            Gf::Const(v) => *v == 0,
            Gf::Elem { c, .. } => c.iter().all(|&x| x == 0),
        }
    }
    fn add(&self, o: &Self) -> Self {
        match self.common(o) {
            None => match (self, o) {
                (Gf::Const(a), Gf::Const(b)) => Gf::Const(a + b),
                _ => unreachable!(),
            },
            Some(ctx) => {
                let a = self.lift(&ctx);
                let b = o.lift(&ctx);
                let c = a.iter().zip(&b).map(|(x, y)| (x + y) % ctx.p).collect();
                Gf::Elem { c, ctx }
            }
        }
    }
    fn mul(&self, o: &Self) -> Self {
        match self.common(o) {
            None => match (self, o) {
                (Gf::Const(a), Gf::Const(b)) => Gf::Const(a * b),
                _ => unreachable!(),
            },
            Some(ctx) => {
                let c = ctx.mul_raw(&self.lift(&ctx), &o.lift(&ctx));
                Gf::Elem { c, ctx }
            }
        }
    }
    fn neg(&self) -> Self {
        match self {
            Gf::Const(v) => Gf::Const(-v),
            Gf::Elem { c, ctx } => Gf::Elem {
                c: c.iter().map(|&x| (ctx.p - x) % ctx.p).collect(),
                ctx: ctx.clone(),
            },
        }
    }
    fn from_i64(n: i64) -> Self {
        Gf::Const(n)
    }
    fn inv(&self) -> Option<Self> {
        match self {
            Gf::Const(v) if *v == 1 || *v == -1 => Some(self.clone()),
            Gf::Const(_) => None,
            Gf::Elem { ctx, .. } => {
                if self.is_zero() {
                    None
                } else {
                    Some(self.pow(ctx.order() - 2))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use rand::SeedableRng;

    #[test]
    fn prime_field() {
        let a = Fp::new(3, 7);
        assert_eq!(a.inv().unwrap(), Fp::new(5, 7));
        assert_eq!(a.add(&Fp::from_i64(5)), Fp::new(1, 7));
        assert_eq!(Fp::from_i64(-6), Fp::new(1, 7));
        assert_eq!(Fp::from_rat(&rat(-3, 2), 5).unwrap(), Fp::new(1, 5));
        assert!(Fp::from_rat(&rat(1, 5), 5).is_err());
    }

    #[test]
    fn extension_field_inverse_and_frobenius() {
        for (p, d) in [(2, 3), (5, 2), (7, 3), (13, 2)] {
            let ctx = GfCtx::new(p, d);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
            for _ in 0..10 {
                let a = ctx.random_nonzero(&mut rng);
                assert!(a.mul(&a.inv().unwrap()).is_one());
                assert_eq!(a.pow(ctx.order()), a);
            }
        }
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(!is_irreducible(&[1, 0, 0, 0, 1], 3));
    }
}
