use std::collections::BTreeMap;
use std::fmt;

use crate::exact::{MPoly, QAlgebra, Rat, Ring};

/// Coefficients of torus elements: Laurent polynomials in `q, a, b, λ`.
pub type TorusCoeff = MPoly<Rat, 4>;

pub const VAR_Q: usize = 0;
pub const VAR_A: usize = 1;
pub const VAR_B: usize = 2;
pub const VAR_LAMBDA: usize = 3;

/// Element `Σ c_{ij} x^i y^j` of the quantum torus `yx = qxy`.
#[derive(Clone, PartialEq)]
pub struct TorusElem {
    terms: BTreeMap<(i64, i64), TorusCoeff>,
}

fn q_power(k: i64) -> TorusCoeff {
    TorusCoeff::var_pow(VAR_Q, k as i32)
}

impl TorusElem {
    pub fn monomial(i: i64, j: i64, c: TorusCoeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        TorusElem { terms }
    }

    pub fn x_pow(i: i64) -> Self {
        Self::monomial(i, 0, TorusCoeff::one())
    }

    pub fn y_pow(j: i64) -> Self {
        Self::monomial(0, j, TorusCoeff::one())
    }

    pub fn scalar(c: TorusCoeff) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &TorusCoeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: i64, j: i64) -> TorusCoeff {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(TorusCoeff::zero)
    }

    pub fn map_coeffs(&self, f: impl Fn(&TorusCoeff) -> TorusCoeff) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, &f(c));
        }
        out
    }

    fn add_term(&mut self, k: (i64, i64), c: &TorusCoeff) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(TorusCoeff::zero);
        *e = e.add(c);
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }
}

impl Ring for TorusElem {
    fn zero() -> Self {
        TorusElem { terms: BTreeMap::new() }
    }
    fn one() -> Self {
        Self::scalar(TorusCoeff::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c);
        }
        out
    }
    /// `x^i y^j · x^k y^l = q^{jk} x^{i+k} y^{j+l}`.
    fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for ((i, j), c) in &self.terms {
            for ((k, l), d) in &o.terms {
                out.add_term((i + k, j + l), &c.mul(d).mul(&q_power(j * k)));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }
    fn from_i64(n: i64) -> Self {
        Self::scalar(TorusCoeff::from_i64(n))
    }
    fn inv(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&(i, j), c) = self.terms.iter().next().unwrap();
        // (c x^i y^j)^{-1} = c^{-1} y^{-j} x^{-i} = c^{-1} q^{ij} x^{-i} y^{-j}
        Some(Self::monomial(-i, -j, c.inv()?.mul(&q_power(i * j))))
    }
}

impl QAlgebra for TorusElem {
    fn from_rat(r: &Rat) -> Self {
        Self::scalar(TorusCoeff::from_rat(r))
    }
}

impl fmt::Debug for TorusElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|((i, j), c)| format!("({c:?})*x^{i}*y^{j}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: i64) -> TorusCoeff {
        q_power(k)
    }

    #[test]
    fn defining_relation() {
        let x = TorusElem::x_pow(1);
        let y = TorusElem::y_pow(1);
        assert_eq!(y.mul(&x), TorusElem::monomial(1, 1, q(1)));
        let lhs = TorusElem::x_pow(-1).mul(&TorusElem::y_pow(-1)).mul(&x.mul(&y));
        assert_eq!(lhs, TorusElem::scalar(q(-1)));
    }

    #[test]
    fn square_of_sum() {
        let x = TorusElem::x_pow(1);
        let y = TorusElem::y_pow(1);
        let s = x.add(&y);
        let want = TorusElem::x_pow(2)
            .add(&TorusElem::y_pow(2))
            .add(&TorusElem::monomial(1, 1, TorusCoeff::one().add(&q(1))));
        assert_eq!(s.mul(&s), want);
    }

    #[test]
    fn monomial_inverse() {
        let m = TorusElem::monomial(2, -1, TorusCoeff::from_i64(3));
        assert!(m.mul(&m.inv().unwrap()).is_one());
        assert!(m.inv().unwrap().mul(&m).is_one());
    }
}
