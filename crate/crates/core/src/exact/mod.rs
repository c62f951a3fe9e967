//! Exact arithmetic kernel.
//!
//! Everything here is value-typed and immutable: rationals, dense
//! univariate polynomials, sparse Laurent polynomials, truncated power
//! series, prime fields and their extensions, cyclotomic quotients, the
//! localized field `QFrac` of rational functions in `q`, factored rational
//! functions, matrices and the coprime-factor lifting routine.

mod cyclo;
mod hensel;
mod matrix;
mod modp;
mod mpoly;
mod qfrac;
mod rat;
mod ratfunc;
mod series;
mod upoly;

use std::fmt;

pub use cyclo::{cyclotomic, cyclotomic_int, euler_phi, Cyc, CycCtx};
pub use hensel::{lift_coprime_factorization, Lifted};
pub use matrix::Matrix;
pub use modp::{is_prime, Fp, Gf, GfCtx};
pub use mpoly::MPoly;
pub use qfrac::QFrac;
pub use rat::{
    int, padic_expansion, rat, rat_from_str, rat_to_string, smooth_factor, valuation, PadicDigits,
    Rat, SmoothFactorization,
};
pub use ratfunc::{partial_fractions, DiffVar, PartialFractions, PoleSum, QRoot, QVar, RatFunc, VarKind};
pub use series::{exp_by_powers, log1p_by_powers, series_exp, series_log, TSeries};
pub use upoly::UPoly;

/// Errors raised by exact arithmetic routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("factors are not coprime")]
    NotCoprime,
    #[error("factorization does not match modulo u")]
    FactorMismatch,
}

/// A commutative (unless stated otherwise) ring with exact equality.
///
/// Method names deliberately shadow nothing from `std::ops`; all operands are
/// borrowed so big-number types never get cloned implicitly.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_i64(n: i64) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplicative inverse when the element is a unit that the type can
    /// recognise; `None` otherwise.
    fn inv(&self) -> Option<Self> {
        None
    }

    fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }

    fn sub_assign(&mut self, other: &Self) {
        *self = self.sub(other);
    }
}

/// Rings containing the rationals.
pub trait QAlgebra: Ring {
    fn from_rat(r: &Rat) -> Self;

    fn scale(&self, r: &Rat) -> Self {
        self.mul(&Self::from_rat(r))
    }
}

/// Inverse that panics on non-units; for call sites where invertibility is
/// an internal invariant.
pub fn unit_inv<K: Ring>(x: &K) -> K {
    x.inv()
        .unwrap_or_else(|| panic!("internal invariant: {x:?} is not a unit"))
}

/// Sums a sequence of ring elements.
pub fn sum<'a, K: Ring>(items: impl IntoIterator<Item = &'a K>) -> K {
    items.into_iter().fold(K::zero(), |acc, x| acc.add(x))
}
