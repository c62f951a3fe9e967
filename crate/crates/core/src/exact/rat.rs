use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::{ExactError, QAlgebra, Ring};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

impl Ring for Rat {
    fn zero() -> Self {
        <Rat as num_traits::Zero>::zero()
    }
    fn one() -> Self {
        <Rat as num_traits::One>::one()
    }
    fn is_zero(&self) -> bool {
        <Rat as num_traits::Zero>::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(n: i64) -> Self {
        int(n)
    }
    fn inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_one(&self) -> bool {
        self.numer() == self.denom()
    }
}

impl QAlgebra for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

/// Parses `"a"`, `"-a"` or `"a/b"`.
pub fn rat_from_str(s: &str) -> Result<Rat, ExactError> {
    let s = s.trim();
    let bad = || ExactError::Precondition(format!("not a rational literal: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if num_traits::Zero::is_zero(&d) {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

/// Canonical text form: `"a"` or `"a/b"`.
pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exponent of the prime `p` in the nonzero integer `n`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!num_traits::Zero::is_zero(n), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !num_traits::Zero::is_zero(&r) {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Base-`p` expansion `x = p^valuation · Σ digits[i] p^i + O(p^{valuation+D})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicDigits {
    /// `None` for `x = 0`.
    pub valuation: Option<i64>,
    pub digits: Vec<u64>,
}

pub fn padic_expansion(x: &Rat, p: u64, digits: usize) -> PadicDigits {
    if Ring::is_zero(x) {
        return PadicDigits { valuation: None, digits: vec![0; digits] };
    }
    let vn = valuation(x.numer(), p) as i64;
    let vd = valuation(x.denom(), p) as i64;
    let pb = BigInt::from(p);
    let num = x.numer() / pb.pow(vn as u32);
    let den = x.denom() / pb.pow(vd as u32);
    let modulus = pb.pow(digits as u32);
    let inv = mod_inverse(&den.mod_floor(&modulus), &modulus)
        .expect("unit part of denominator is coprime to p");
    let mut unit = (num * inv).mod_floor(&modulus);
    let mut out = Vec::with_capacity(digits);
    for _ in 0..digits {
        let (q, r) = unit.div_rem(&pb);
        out.push(r.to_u64().unwrap());
        unit = q;
    }
    PadicDigits { valuation: Some(vn - vd), digits: out }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.abs() != BigInt::from(1) {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Trial-division factorization over primes up to a bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothFactorization {
    pub factors: Vec<(u64, u32)>,
    /// Cofactor left after removing all primes `<= bound`; `1` when smooth.
    pub remainder: BigInt,
}

impl SmoothFactorization {
    pub fn exponent(&self, p: u64) -> u32 {
        self.factors.iter().find(|(q, _)| *q == p).map_or(0, |&(_, e)| e)
    }

    pub fn is_smooth(&self) -> bool {
        self.remainder == BigInt::from(1)
    }
}

pub fn smooth_factor(n: &BigInt, bound: u64) -> SmoothFactorization {
    assert!(n.is_positive(), "smooth_factor needs n >= 1");
    let mut rest = n.clone();
    let mut factors = Vec::new();
    for p in (2..=bound).filter(|&p| super::is_prime(p)) {
        let pb = BigInt::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !num_traits::Zero::is_zero(&r) {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    }
    SmoothFactorization { factors, remainder: rest }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(rat_from_str("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(rat_from_str(" 7 ").unwrap(), int(7));
        assert!(rat_from_str("1/0").is_err());
        assert!(rat_from_str("x").is_err());
        assert_eq!(rat_to_string(&rat(-101, 576)), "-101/576");
        assert_eq!(rat_to_string(&int(3)), "3");
    }

    #[test]
    fn padic_examples() {
        let e = padic_expansion(&rat(1, 2), 3, 3);
        assert_eq!(e, PadicDigits { valuation: Some(0), digits: vec![2, 1, 1] });
        let e = padic_expansion(&int(9), 3, 2);
        assert_eq!(e, PadicDigits { valuation: Some(2), digits: vec![1, 0] });
        let e = padic_expansion(&rat(-3, 2), 5, 1);
        assert_eq!(e, PadicDigits { valuation: Some(0), digits: vec![1] });
        let e = padic_expansion(&rat(5, 9), 3, 1);
        assert_eq!(e.valuation, Some(-2));
    }

    #[test]
    fn smooth_examples() {
        let f = smooth_factor(&BigInt::from(576), 5);
        assert_eq!(f.factors, vec![(2, 6), (3, 2)]);
        assert!(f.is_smooth());
        let f = smooth_factor(&BigInt::from(1), 100);
        assert!(f.factors.is_empty() && f.is_smooth());
        let f = smooth_factor(&BigInt::from(22), 3);
        assert_eq!(f.factors, vec![(2, 1)]);
        assert_eq!(f.remainder, BigInt::from(11));
    }
}
