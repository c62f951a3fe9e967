use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{cyclotomic_int, euler_phi, Cyc, CycCtx, ExactError, QAlgebra, Rat, Ring, UPoly};

/// Rational function in `q` whose denominator is a product of cyclotomic
/// polynomials (and powers of `q`).
///
/// Stored as `scalar · q^qpow · num(q) / Π_l Φ_l(q)^{m_l}` with `num` a
/// primitive integer polynomial, positive leading coefficient, nonzero
/// constant term and no factor `Φ_l` in common with the denominator. This
/// presentation is unique, so equality is structural and no polynomial gcd
/// is ever needed.
#[derive(Clone, PartialEq, Eq)]
pub struct QFrac {
    scalar: Rat,
    num: Vec<BigInt>,
    qpow: i64,
    den: BTreeMap<u64, u32>,
}

fn ipoly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Quotient by the monic `m` if the division is exact.
fn ipoly_div_exact(a: &[BigInt], m: &[BigInt]) -> Option<Vec<BigInt>> {
    let dm = m.len() - 1;
    if a.len() <= dm {
        return None;
    }
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); r.len() - dm];
    for i in (0..q.len()).rev() {
        let t = std::mem::take(&mut r[i + dm]);
        if t.is_zero() {
            continue;
        }
        for (j, c) in m.iter().enumerate().take(dm) {
            r[i + j] -= &t * c;
        }
        q[i] = t;
    }
    if r.iter().take(dm).all(|x| x.is_zero()) {
        Some(q)
    } else {
        None
    }
}

fn cyclo_power(l: u64, m: u32) -> Vec<BigInt> {
    let phi = cyclotomic_int(l);
    let mut out = vec![BigInt::one()];
    for _ in 0..m {
        out = ipoly_mul(&out, &phi);
    }
    out
}

impl QFrac {
    fn zero_value() -> Self {
        QFrac { scalar: <Rat as Ring>::zero(), num: Vec::new(), qpow: 0, den: BTreeMap::new() }
    }

    fn normalize(scalar: Rat, mut num: Vec<BigInt>, mut qpow: i64, mut den: BTreeMap<u64, u32>) -> Self {
        while num.last().is_some_and(|x| x.is_zero()) {
            num.pop();
        }
        if Ring::is_zero(&scalar) || num.is_empty() {
            return Self::zero_value();
        }
        let low = num.iter().position(|x| !x.is_zero()).unwrap();
        if low > 0 {
            num.drain(..low);
            qpow += low as i64;
        }
        let content = num.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let mut scalar = scalar * Rat::from_integer(content.clone());
        if !content.is_one() {
            for x in num.iter_mut() {
                *x = &*x / &content;
            }
        }
        if num.last().unwrap().is_negative() {
            for x in num.iter_mut() {
                *x = -&*x;
            }
            scalar = -scalar;
        }
        for (&l, m) in den.iter_mut() {
            let phi = cyclotomic_int(l);
            while *m > 0 {
                match ipoly_div_exact(&num, &phi) {
                    Some(q) => {
                        num = q;
                        *m -= 1;
                    }
                    None => break,
                }
            }
        }
        den.retain(|_, m| *m > 0);
        QFrac { scalar, num, qpow, den }
    }

    /// `q^k`.
    pub fn q_pow(k: i64) -> Self {
        QFrac { scalar: <Rat as Ring>::one(), num: vec![BigInt::one()], qpow: k, den: BTreeMap::new() }
    }

    /// Laurent polynomial `Σ c_i q^{i + low}`.
    pub fn from_laurent(low: i64, coeffs: &[Rat]) -> Self {
        let den_lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num: Vec<BigInt> =
            coeffs.iter().map(|c| (c * Rat::from_integer(den_lcm.clone())).to_integer()).collect();
        Self::normalize(Rat::new(BigInt::one(), den_lcm), num, low, BTreeMap::new())
    }

    pub fn from_poly(p: &UPoly<Rat>) -> Self {
        Self::from_laurent(0, p.coeffs())
    }

    /// `1/Φ_l(q)^m`.
    pub fn inv_cyclotomic(l: u64, m: u32) -> Self {
        let mut den = BTreeMap::new();
        den.insert(l, m);
        Self::normalize(<Rat as Ring>::one(), vec![BigInt::one()], 0, den)
    }

    /// `q^a - q^b`, kept factored internally after normalization.
    pub fn q_diff(a: i64, b: i64) -> Self {
        Self::q_pow(a).sub(&Self::q_pow(b))
    }

    pub fn scalar(&self) -> &Rat {
        &self.scalar
    }

    pub fn q_exponent(&self) -> i64 {
        self.qpow
    }

    /// Denominator as `l ↦ multiplicity of Φ_l`.
    pub fn denominator(&self) -> &BTreeMap<u64, u32> {
        &self.den
    }

    /// Numerator `scalar · q^qpow · num` as a Laurent polynomial: `(low, coeffs)`.
    pub fn numerator_laurent(&self) -> (i64, Vec<Rat>) {
        let c = self.num.iter().map(|x| &self.scalar * Rat::from_integer(x.clone())).collect();
        (self.qpow, c)
    }

    /// Whether the value is a Laurent polynomial in `q`.
    pub fn is_laurent(&self) -> bool {
        self.den.is_empty()
    }

    /// Value at a rational point, `None` if the denominator vanishes there.
    pub fn eval_rat(&self, v: &Rat) -> Option<Rat> {
        if self.num.is_empty() {
            return Some(<Rat as Ring>::zero());
        }
        let vp = |k: i64| -> Option<Rat> {
            if k >= 0 {
                Some(Ring::pow(v, k as u64))
            } else {
                v.inv().map(|i| Ring::pow(&i, (-k) as u64))
            }
        };
        let mut acc = <Rat as Ring>::zero();
        for c in self.num.iter().rev() {
            acc = acc * v + Rat::from_integer(c.clone());
        }
        let mut out = &self.scalar * acc * vp(self.qpow)?;
        for (&l, &m) in &self.den {
            let phi = UPoly::new(cyclotomic_int(l).into_iter().map(Rat::from_integer).collect());
            let d = phi.eval(v);
            out *= Ring::pow(&d.inv()?, m as u64);
        }
        Some(out)
    }

    /// Image in `Q[q]/Φ_n`; fails when some `Φ_l` in the denominator is `Φ_n`.
    pub fn to_cyc(&self, ctx: &Arc<CycCtx>) -> Result<Cyc, ExactError> {
        if self.num.is_empty() {
            return Ok(Cyc::zero());
        }
        let numer = UPoly::new(self.num.iter().map(|c| Rat::from_integer(c.clone())).collect());
        let mut out = ctx.reduce(&numer.scale(&self.scalar)).mul(&ctx.q_pow(self.qpow));
        for (&l, &m) in &self.den {
            let phi = UPoly::new(cyclotomic_int(l).into_iter().map(Rat::from_integer).collect());
            let d = ctx.reduce(&phi).inv().ok_or_else(|| {
                ExactError::NotInvertible(format!("Phi_{l} vanishes modulo Phi_{}", ctx.level()))
            })?;
            out = out.mul(&d.pow(m as u64));
        }
        Ok(out)
    }

    /// Exponent of `Φ_l` in the denominator.
    pub fn den_exponent(&self, l: u64) -> u32 {
        self.den.get(&l).copied().unwrap_or(0)
    }

    /// Factors `±q^k Π Φ_l^{e_l}` out of an integer polynomial by trial division.
    fn cyclotomic_factorization(num: &[BigInt]) -> Option<BTreeMap<u64, u32>> {
        let mut rest = num.to_vec();
        let mut out = BTreeMap::new();
        let mut l = 1u64;
        while rest.len() > 1 {
            if l > 256 {
                return None;
            }
            if (euler_phi(l) as usize) < rest.len() {
                let phi = cyclotomic_int(l);
                while let Some(q) = ipoly_div_exact(&rest, &phi) {
                    rest = q;
                    *out.entry(l).or_insert(0) += 1;
                }
            }
            l += 1;
        }
        if rest.len() == 1 && rest[0].abs().is_one() {
            Some(out)
        } else {
            None
        }
    }
}

impl Ring for QFrac {
    fn zero() -> Self {
        Self::zero_value()
    }
    fn one() -> Self {
        Self::q_pow(0)
    }
    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        if self.num.is_empty() {
            return o.clone();
        }
        if o.num.is_empty() {
            return self.clone();
        }
        let qmin = self.qpow.min(o.qpow);
        let mut den = self.den.clone();
        for (&l, &m) in &o.den {
            let e = den.entry(l).or_insert(0);
            *e = (*e).max(m);
        }
        let lift = |x: &QFrac| -> Vec<BigInt> {
            let mut p = vec![BigInt::zero(); (x.qpow - qmin) as usize];
            p.extend(x.num.iter().cloned());
            for (&l, &m) in &den {
                let have = x.den.get(&l).copied().unwrap_or(0);
                if m > have {
                    p = ipoly_mul(&p, &cyclo_power(l, m - have));
                }
            }
            p
        };
        let a = lift(self);
        let b = lift(o);
        let (na, da) = (self.scalar.numer(), self.scalar.denom());
        let (nb, db) = (o.scalar.numer(), o.scalar.denom());
        let fa = na * db;
        let fb = nb * da;
        let n = a.len().max(b.len());
        let mut sum = vec![BigInt::zero(); n];
        for (i, x) in a.iter().enumerate() {
            sum[i] += x * &fa;
        }
        for (i, x) in b.iter().enumerate() {
            sum[i] += x * &fb;
        }
        Self::normalize(Rat::new(BigInt::one(), da * db), sum, qmin, den)
    }
    fn mul(&self, o: &Self) -> Self {
        if self.num.is_empty() || o.num.is_empty() {
            return Self::zero_value();
        }
        let mut den = self.den.clone();
        for (&l, &m) in &o.den {
            *den.entry(l).or_insert(0) += m;
        }
        Self::normalize(&self.scalar * &o.scalar, ipoly_mul(&self.num, &o.num), self.qpow + o.qpow, den)
    }
    fn neg(&self) -> Self {
        let mut out = self.clone();
        out.scalar = -out.scalar;
        out
    }
    fn from_i64(n: i64) -> Self {
        Self::from_rat(&Rat::from_integer(BigInt::from(n)))
    }
    fn inv(&self) -> Option<Self> {
        if self.num.is_empty() {
            return None;
        }
        // num has positive leading coefficient, so it is exactly Π Φ_l^{e_l}.
        let fac = Self::cyclotomic_factorization(&self.num)?;
        let mut num = vec![BigInt::one()];
        for (&l, &m) in &self.den {
            num = ipoly_mul(&num, &cyclo_power(l, m));
        }
        Some(Self::normalize(self.scalar.recip(), num, -self.qpow, fac))
    }
}

impl QAlgebra for QFrac {
    fn from_rat(r: &Rat) -> Self {
        Self::normalize(r.clone(), vec![BigInt::one()], 0, BTreeMap::new())
    }
}

impl fmt::Debug for QFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_empty() {
            return write!(f, "0");
        }
        let (low, coeffs) = self.numerator_laurent();
        let mut terms = Vec::new();
        for (i, c) in coeffs.iter().enumerate().rev() {
            if Ring::is_zero(c) {
                continue;
            }
            let e = low + i as i64;
            let cs = super::rat_to_string(c);
            terms.push(match e {
                0 => cs,
                1 => format!("{cs}*q"),
                _ => format!("{cs}*q^{e}"),
            });
        }
        let numer = terms.join(" + ").replace("+ -", "- ");
        if self.den.is_empty() {
            return write!(f, "{numer}");
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(l, m)| if *m == 1 { format!("Phi{l}") } else { format!("Phi{l}^{m}") })
            .collect();
        write!(f, "({numer})/({})", den.join("*"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn q() -> QFrac {
        QFrac::q_pow(1)
    }

    #[test]
    fn canonical_form() {
        let a = q().sub(&QFrac::one()).mul(&q().add(&QFrac::one()));
        let b = q().mul(&q()).sub(&QFrac::one());
        assert_eq!(a, b);
        let x = QFrac::one().mul(&q().sub(&QFrac::one()).inv().unwrap());
        assert_eq!(x.denominator().get(&1), Some(&1));
        let y = x.mul(&q().sub(&QFrac::one()));
        assert!(y.is_one());
        assert_eq!(QFrac::from_rat(&rat(2, 4)).add(&QFrac::from_rat(&rat(1, 2))), QFrac::one());
    }

    #[test]
    fn inverse_of_cyclotomic_products() {
        let d = QFrac::q_diff(6, 0).mul(&QFrac::q_diff(2, 1));
        let i = d.inv().unwrap();
        assert!(i.mul(&d).is_one());
        assert_eq!(i.den_exponent(1), 2);
        assert_eq!(i.den_exponent(6), 1);
        let not_cyc = q().add(&QFrac::from_i64(2));
        assert!(not_cyc.inv().is_none());
    }

    #[test]
    fn evaluation_and_reduction() {
        let x = q().add(&QFrac::one()).inv().unwrap().mul(&q());
        assert_eq!(x.eval_rat(&int(1)), Some(rat(1, 2)));
        assert_eq!(x.eval_rat(&int(-1)), None);
        let ctx = CycCtx::new(3);
        let c = x.to_cyc(&ctx).unwrap();
        // q/(q+1) with q+1 = -q^2 in Q(ζ_3): equals -q^{-1} = -q^2.
        assert_eq!(c, ctx.q_pow(2).neg());
        assert!(QFrac::inv_cyclotomic(3, 1).to_cyc(&ctx).is_err());
    }

    #[test]
    fn display() {
        let x = q().sub(&QFrac::one()).pow(2).mul(&QFrac::inv_cyclotomic(2, 2)).neg();
        assert_eq!(x.to_string(), "(-1*q^2 + 2*q - 1)/(Phi2^2)");
    }
}
