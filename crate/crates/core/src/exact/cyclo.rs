use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{QAlgebra, Rat, Ring, UPoly};

const TABLE_SIZE: usize = 256;

pub fn euler_phi(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

fn int_div_exact(a: &[BigInt], m: &[BigInt]) -> Vec<BigInt> {
    // m is monic
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); r.len() - dm];
    for i in (0..q.len()).rev() {
        let t = r[i + dm].clone();
        if t.is_zero() {
            continue;
        }
        for (j, c) in m.iter().enumerate() {
            r[i + j] -= &t * c;
        }
        q[i] = t;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    q
}

fn compute_cyclotomic(n: usize, lower: &dyn Fn(usize) -> Vec<BigInt>) -> Vec<BigInt> {
    let mut num = vec![BigInt::zero(); n + 1];
    num[0] = -BigInt::one();
    num[n] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = int_div_exact(&num, &lower(d));
        }
    }
    num
}

fn table() -> &'static Vec<Vec<BigInt>> {
    static TABLE: OnceLock<Vec<Vec<BigInt>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t: Vec<Vec<BigInt>> = vec![Vec::new()];
        for n in 1..=TABLE_SIZE {
            let next = compute_cyclotomic(n, &|d| t[d].clone());
            t.push(next);
        }
        t
    })
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, increasing degree.
pub fn cyclotomic_int(n: u64) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic index must be positive");
    let n = n as usize;
    if n <= TABLE_SIZE {
        return table()[n].clone();
    }
    fn rec(n: usize) -> Vec<BigInt> {
        if n <= TABLE_SIZE {
            table()[n].clone()
        } else {
            compute_cyclotomic(n, &rec)
        }
    }
    rec(n)
}

pub fn cyclotomic(n: u64) -> UPoly<Rat> {
    UPoly::new(cyclotomic_int(n).into_iter().map(Rat::from_integer).collect())
}

/// The field `Q[q]/Φ_n(q)`.
#[derive(PartialEq)]
pub struct CycCtx {
    n: u64,
    phi: UPoly<Rat>,
}

impl fmt::Debug for CycCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[q]/Phi_{}", self.n)
    }
}

impl CycCtx {
    pub fn new(n: u64) -> Arc<Self> {
        Arc::new(CycCtx { n, phi: cyclotomic(n) })
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn modulus(&self) -> &UPoly<Rat> {
        &self.phi
    }

    pub fn reduce(self: &Arc<Self>, p: &UPoly<Rat>) -> Cyc {
        let rep = p.div_rem(&self.phi).expect("monic modulus").1;
        Cyc::Elem { rep, ctx: self.clone() }
    }

    /// The class of `q^k`, `k` possibly negative.
    pub fn q_pow(self: &Arc<Self>, k: i64) -> Cyc {
        let m = k.rem_euclid(self.n as i64) as usize;
        self.reduce(&UPoly::monomial(<Rat as Ring>::one(), m))
    }
}

/// Element of a cyclotomic field; `Const` is a rational not yet tied to a level.
#[derive(Clone)]
pub enum Cyc {
    Const(Rat),
    Elem { rep: UPoly<Rat>, ctx: Arc<CycCtx> },
}

impl Cyc {
    pub fn ctx(&self) -> Option<&Arc<CycCtx>> {
        match self {
            Cyc::Const(_) => None,
            Cyc::Elem { ctx, .. } => Some(ctx),
        }
    }

    /// Canonical representative of degree `< φ(n)`.
    pub fn rep(&self) -> UPoly<Rat> {
        match self {
            Cyc::Const(r) => UPoly::constant(r.clone()),
            Cyc::Elem { rep, .. } => rep.clone(),
        }
    }

    fn lift(&self) -> UPoly<Rat> {
        self.rep()
    }

    fn common(&self, o: &Self) -> Option<Arc<CycCtx>> {
        match (self.ctx(), o.ctx()) {
            (Some(a), Some(b)) => {
                assert!(Arc::ptr_eq(a, b) || a == b, "mixed cyclotomic levels");
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }
}

impl PartialEq for Cyc {
    fn eq(&self, o: &Self) -> bool {
        self.lift() == o.lift()
    }
}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cyc::Const(r) => write!(f, "{r}"),
            Cyc::Elem { rep, .. } => write!(f, "[{rep:?}]"),
        }
    }
}

impl Ring for Cyc {
    fn zero() -> Self {
        Cyc::Const(<Rat as Ring>::zero())
    }
    fn one() -> Self {
        Cyc::Const(<Rat as Ring>::one())
    }
    fn is_zero(&self) -> bool {
        match self {
            Cyc::Const(r) => Ring::is_zero(r),
            Cyc::Elem { rep, .. } => rep.is_zero(),
        }
    }
    fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (Cyc::Const(a), Cyc::Const(b)) => Cyc::Const(a + b),
            _ => {
                let ctx = self.common(o).unwrap();
                Cyc::Elem { rep: self.lift().add(&o.lift()), ctx }
            }
        }
    }
    fn mul(&self, o: &Self) -> Self {
        match (self, o) {
            (Cyc::Const(a), Cyc::Const(b)) => Cyc::Const(a * b),
            (Cyc::Const(a), Cyc::Elem { rep, ctx }) | (Cyc::Elem { rep, ctx }, Cyc::Const(a)) => {
                Cyc::Elem { rep: rep.scale(a), ctx: ctx.clone() }
            }
            _ => {
                let ctx = self.common(o).unwrap();
                ctx.reduce(&self.lift().mul(&o.lift()))
            }
        }
    }
    fn neg(&self) -> Self {
        match self {
            Cyc::Const(a) => Cyc::Const(-a),
            Cyc::Elem { rep, ctx } => Cyc::Elem { rep: rep.neg(), ctx: ctx.clone() },
        }
    }
    fn from_i64(n: i64) -> Self {
        Cyc::Const(Rat::from_integer(BigInt::from(n)))
    }
    fn inv(&self) -> Option<Self> {
        match self {
            Cyc::Const(a) => Some(Cyc::Const(a.inv()?)),
            Cyc::Elem { rep, ctx } => {
                Some(Cyc::Elem { rep: rep.inv_mod(&ctx.phi)?, ctx: ctx.clone() })
            }
        }
    }
}

impl QAlgebra for Cyc {
    fn from_rat(r: &Rat) -> Self {
        Cyc::Const(r.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn ip(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_int(1), ip(&[-1, 1]));
        assert_eq!(cyclotomic_int(4), ip(&[1, 0, 1]));
        assert_eq!(cyclotomic_int(12), ip(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic(300).degree(), Some(euler_phi(300) as usize));
    }

    #[test]
    fn product_over_divisors() {
        for n in 1..=30u64 {
            let prod = (1..=n)
                .filter(|d| n % d == 0)
                .fold(UPoly::<Rat>::one(), |acc, d| acc.mul(&cyclotomic(d)));
            let want = UPoly::monomial(int(1), n as usize).sub(&UPoly::one());
            assert_eq!(prod, want, "n = {n}");
        }
    }

    #[test]
    fn cyclotomic_field_arithmetic() {
        let ctx = CycCtx::new(5);
        let q = ctx.q_pow(1);
        assert!(q.pow(5).is_one());
        assert_eq!(ctx.q_pow(-1), q.pow(4));
        let a = q.add(&Cyc::from_i64(2));
        assert!(a.mul(&a.inv().unwrap()).is_one());
        let s = (0..5).fold(Cyc::zero(), |acc, k| acc.add(&ctx.q_pow(k)));
        assert!(s.is_zero());
    }
}
