use std::fmt;
use std::sync::Arc;

use super::RepError;
use crate::exact::{Cyc, CycCtx, MPoly, Matrix, QFrac, QRoot, QVar, Rat, RatFunc, Ring, TSeries};
use crate::opalg::{NormalOp, QDiffOpSeries};
use crate::shiftcalc::EpsLaurent;

/// Laurent polynomials in `ξ, η` over `Q[q]/Φ_n` (variables 0 and 1).
pub type QSym = MPoly<Cyc, 2>;

/// `num / (η^n - 1)^e` with `num` a Laurent polynomial over `Q[q]/Φ_n`.
#[derive(Clone)]
pub struct Loc {
    num: QSym,
    e: u32,
    n: u32,
}

impl Loc {
    pub fn new(num: QSym, e: u32, n: u32) -> Self {
        assert!(e == 0 || n > 0, "localization needs a level");
        Loc { num, e, n }
    }

    pub fn poly(num: QSym) -> Self {
        Loc { num, e: 0, n: 0 }
    }

    /// `1 / (η^n - 1)`.
    pub fn delta_inv(n: u32) -> Self {
        Loc { num: QSym::one(), e: 1, n }
    }

    pub fn numerator(&self) -> &QSym {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.e
    }

    fn delta(n: u32) -> QSym {
        QSym::monomial([0, n as i32], Cyc::one()).sub(&QSym::one())
    }

    fn level(&self, o: &Self) -> u32 {
        self.n.max(o.n)
    }

    fn raised(&self, e: u32, n: u32) -> QSym {
        let d = Self::delta(n);
        let mut out = self.num.clone();
        for _ in self.e..e {
            out = out.mul(&d);
        }
        out
    }
}

impl PartialEq for Loc {
    fn eq(&self, o: &Self) -> bool {
        let n = self.level(o);
        let e = self.e.max(o.e);
        self.raised(e, n) == o.raised(e, n)
    }
}

impl fmt::Debug for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 0 {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/(eta^{}-1)^{}", self.num, self.n, self.e)
        }
    }
}

impl Ring for Loc {
    fn zero() -> Self {
        Self::poly(QSym::zero())
    }
    fn one() -> Self {
        Self::poly(QSym::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.level(o);
        let e = self.e.max(o.e);
        Loc { num: self.raised(e, n).add(&o.raised(e, n)), e, n }
    }
    fn mul(&self, o: &Self) -> Self {
        Loc { num: self.num.mul(&o.num), e: self.e + o.e, n: self.level(o) }
    }
    fn neg(&self) -> Self {
        Loc { num: self.num.neg(), e: self.e, n: self.n }
    }
    fn from_i64(v: i64) -> Self {
        Self::poly(QSym::from_i64(v))
    }
    fn inv(&self) -> Option<Self> {
        let m = self.num.inv()?;
        if self.e == 0 {
            return Some(Loc { num: m, e: 0, n: self.n });
        }
        Some(Loc { num: m.mul(&Self::delta(self.n).pow(self.e as u64)), e: 0, n: self.n })
    }
}

type Lift<R> = Arc<dyn Fn(&Cyc) -> R + Send + Sync>;
type LinInv<R> = Arc<dyn Fn(usize, i64) -> R + Send + Sync>;

/// The `n`-dimensional representation `x v_j = ξ v_{j+1}`, `y v_j = q^j η v_j`
/// with values in a ring `R` over `Q[q]/Φ_n`.
pub struct QRep<R: Ring> {
    pub n: usize,
    pub ctx: Arc<CycCtx>,
    pub xi: R,
    pub eta: R,
    /// `1 / (η^n - 1)`.
    pub delta_inv: R,
    lift: Lift<R>,
    lin_inv: LinInv<R>,
}

impl<R: Ring> QRep<R> {
    pub fn lift(&self, c: &Cyc) -> R {
        (self.lift)(c)
    }

    pub fn q_pow(&self, k: i64) -> R {
        self.lift(&self.ctx.q_pow(k))
    }

    pub fn reduce(&self, c: &QFrac) -> Result<R, RepError> {
        let v = c.to_cyc(&self.ctx).map_err(|_| RepError::OutOfRangeLevel(self.n as u64))?;
        Ok(self.lift(&v))
    }

    /// `1 / (q^i η - q^m)`.
    pub fn lin_inverse(&self, i: usize, m: i64) -> R {
        (self.lin_inv)(i, m)
    }

    /// `f(q^i η)`.
    pub fn func_at(&self, f: &RatFunc<QVar>, i: usize) -> Result<R, RepError> {
        let y = self.q_pow(i as i64).mul(&self.eta);
        let mut acc = R::zero();
        for c in f.numerator().coeffs().iter().rev() {
            acc = acc.mul(&y).add(&self.reduce(c)?);
        }
        for (root, &m) in f.denominator() {
            let inv = match root {
                QRoot::Zero => y.inv().ok_or(RepError::Singular("eta"))?,
                QRoot::Pow(k) => (self.lin_inv)(i, *k),
            };
            acc = acc.mul(&inv.pow(m as u64));
        }
        Ok(acc)
    }

    /// Image of a normal-form operator `Σ x^j f_j(y)`.
    pub fn op(&self, a: &NormalOp<QVar>) -> Result<Matrix<R>, RepError> {
        let n = self.n;
        let xi_inv = self.xi.inv().ok_or(RepError::Singular("xi"))?;
        let mut m = Matrix::<R>::zeros(n, n);
        for (j, f) in a.terms() {
            let xj = if j >= 0 { self.xi.pow(j as u64) } else { xi_inv.pow(j.unsigned_abs()) };
            for i in 0..n {
                let v = self.func_at(f, i)?;
                if v.is_zero() {
                    continue;
                }
                let row = (i as i64 + j).rem_euclid(n as i64) as usize;
                let cur = m.get(row, i).add(&xj.mul(&v));
                m.set(row, i, cur);
            }
        }
        Ok(m)
    }

    /// `Σ_j c_j (η^n - 1)^{-j}` for data in `η_n = 1/(q^{nε} - 1)` at `q^ε = η`.
    pub fn eval_eta_n(&self, f: &EpsLaurent<QFrac>) -> Result<R, RepError> {
        let mut acc = R::zero();
        for (j, c) in f.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&self.reduce(c)?.mul(&self.delta_inv.pow(j as u64)));
        }
        Ok(acc)
    }

    /// `(η^n - 1)^k`.
    pub fn delta_pow(&self, k: usize) -> R {
        let d = self.eta.pow(self.n as u64).sub(&R::one());
        d.pow(k as u64)
    }

    pub fn op_series(&self, a: &QDiffOpSeries, order: usize) -> Result<Matrix<TSeries<R>>, RepError> {
        let n = self.n;
        let mats: Vec<Matrix<R>> = (0..order)
            .map(|i| match a.order() {
                Some(o) if i >= o => Ok(Matrix::zeros(n, n)),
                _ => self.op(&a.coeff(i)),
            })
            .collect::<Result<_, _>>()?;
        Ok(Matrix::from_fn(n, n, |r, c| {
            TSeries::with_order(mats.iter().map(|m| m.get(r, c).clone()).collect(), order)
        }))
    }
}


/// Symbolic representation: `ξ, η` stay variables; the inverses of
/// `q^i η - q^m` live in the localization at `η^n - 1`.
pub fn rho_n_symbolic(n: usize) -> QRep<Loc> {
    let ctx = CycCtx::new(n as u64);
    let nn = n as u32;
    let lift: Lift<Loc> = Arc::new(|c: &Cyc| Loc::poly(QSym::constant(c.clone())));
    let inv_ctx = ctx.clone();
    // Π_{i'} (q^{i'} η - q^m) = (-1)^{n-1} (η^n - 1) modulo Φ_n
    let lin_inv: LinInv<Loc> = Arc::new(move |i: usize, m: i64| {
        let mut num = QSym::constant(Cyc::one());
        for i2 in (0..n).filter(|&i2| i2 != i) {
            let lin = QSym::monomial([0, 1], inv_ctx.q_pow(i2 as i64)).sub(&QSym::constant(inv_ctx.q_pow(m)));
            num = num.mul(&lin);
        }
        if n.is_multiple_of(2) {
            num = num.neg();
        }
        Loc::new(num, 1, nn)
    });
    let xi = Loc::poly(QSym::monomial([1, 0], Cyc::one()));
    let eta = Loc::poly(QSym::monomial([0, 1], Cyc::one()));
    QRep { n, ctx, xi, eta, delta_inv: Loc::delta_inv(nn), lift, lin_inv }
}

/// Representation at rational values `ξ₀, η₀` with `η₀^n ≠ 1`.
pub fn rho_n_point(n: usize, xi: &Rat, eta: &Rat) -> QRep<Cyc> {
    let ctx = CycCtx::new(n as u64);
    let lift: Lift<Cyc> = Arc::new(|c: &Cyc| c.clone());
    let inv_ctx = ctx.clone();
    let e = eta.clone();
    let lin_inv: LinInv<Cyc> = Arc::new(move |i: usize, m: i64| {
        let v = inv_ctx.q_pow(i as i64).mul(&Cyc::Const(e.clone())).sub(&inv_ctx.q_pow(m));
        v.inv().expect("eta^n != 1")
    });
    let delta = Ring::pow(eta, n as u64) - Rat::from_integer(1.into());
    let delta_inv = Cyc::Const(Ring::inv(&delta).expect("eta^n != 1"));
    QRep { n, ctx, xi: Cyc::Const(xi.clone()), eta: Cyc::Const(eta.clone()), delta_inv, lift, lin_inv }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, QAlgebra};
    use crate::oplang::{elaborate_q, parse, Dialect};

    fn op(src: &str) -> NormalOp<QVar> {
        elaborate_q(&parse(src, Dialect::QDiff, 1).unwrap(), 1).unwrap().coeff(0)
    }

    #[test]
    fn generators() {
        let r = rho_n_symbolic(2);
        let y = r.op(&op("y")).unwrap();
        assert_eq!(y.get(0, 0), &r.eta);
        assert_eq!(y.get(1, 1), &r.q_pow(1).mul(&r.eta));
        let r4 = rho_n_symbolic(4);
        assert!(r4.op(&op("y*x - q*x*y")).unwrap().is_zero());
        let r3 = rho_n_symbolic(3);
        let x3 = r3.op(&op("x^3")).unwrap();
        assert_eq!(x3, Matrix::scalar(3, &r3.xi.pow(3)));
    }

    #[test]
    fn inverse_entries() {
        let r = rho_n_symbolic(3);
        let a = r.op(&op("y - q")).unwrap();
        let b = r.op(&NormalOp::from_func(RatFunc::inv_roots(&[QRoot::Pow(1)]))).unwrap();
        assert_eq!(a.mul(&b), Matrix::identity(3));
        let c = r.op(&op("y^(-1)")).unwrap();
        assert_eq!(c.mul(&r.op(&op("y")).unwrap()), Matrix::identity(3));
    }

    #[test]
    fn trace_of_simple_pole() {
        // tr (y - 1)^{-1} = n/(η^n - 1) up to the sign convention of R_n
        let r = rho_n_symbolic(3);
        let m = r.op(&NormalOp::from_func(RatFunc::inv_roots(&[QRoot::Pow(0)]))).unwrap();
        let want = Loc::delta_inv(3).mul(&Loc::from_i64(3));
        assert_eq!(m.trace(), want);
    }

    #[test]
    fn point_mode_agrees() {
        let r = rho_n_point(3, &int(2), &int(5));
        let m = r.op(&NormalOp::from_func(RatFunc::inv_roots(&[QRoot::Pow(0)]))).unwrap();
        let want = Cyc::from_rat(&(int(3) / int(124)));
        assert_eq!(m.trace(), want);
    }
}
