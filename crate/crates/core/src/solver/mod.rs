//! Formal solutions of `(P + Q) f = 0`, the log-derivation matrix and the
//! monodromy polynomial by two independent routes.

mod bn;
mod frobenius;
mod monodromy;

pub use bn::{bn_determinant, bn_factorization_check, BnFactor, BnReport};
pub use frobenius::{build_solutions, dlog_matrix, kernel_basis, shift_matrix, solve_p, SolutionBasis};
pub use monodromy::{
    char_poly_w, class_w, eval_w, matrix_exp, q_solutions_and_w, shift_w, solve_monodromy,
    w_via_r_exp, w_via_shift_exp, MonodromyPoly, QMonodromy, SolverMonodromy,
};

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exact::{ExactError, Rat, RatFunc, Ring, UPoly};
use crate::opalg::{LogAction, NormalOp, OpSeries};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("undeformed part is not a monic polynomial in the symbol: {0}")]
    NotNormalized(String),
    #[error("undeformed part does not split over admitted roots")]
    RootsNotAdmitted,
    #[error("deformation does not vanish modulo u")]
    DeformationNotSmall,
    #[error("operator series must be truncated")]
    Untruncated,
    #[error("projection residual at u^{0} is not zero: basis not closed")]
    Projection(usize),
    #[error("monodromy polynomial is not monic/unipotent modulo u")]
    NotUnipotent,
    #[error("exp(D_log) disagrees with the log-shift matrix")]
    ExpMismatch,
    #[error("window too small for stabilization, need N >= {required}")]
    WindowTooSmall { required: usize },
    #[error("expansion in inverse powers has a nonzero tail")]
    Tail,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Roots of `P` congruent modulo the integers, with multiplicity by offset.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentClass {
    /// Smallest representative `s`.
    pub rep: Rat,
    /// `a_j` = multiplicity of the root `s + j`, for `j = 0..=J`.
    pub mults: Vec<u32>,
}

impl ExponentClass {
    pub fn k(&self) -> usize {
        self.mults.iter().map(|&m| m as usize).sum()
    }

    pub fn span(&self) -> i64 {
        self.mults.len() as i64 - 1
    }

    pub fn mult(&self, n: i64) -> u32 {
        if n < 0 {
            return 0;
        }
        self.mults.get(n as usize).copied().unwrap_or(0)
    }

    /// Kernel slots `(j, s)` in the order `j` ascending, then `s`.
    pub fn slots(&self) -> Vec<(i64, usize)> {
        let mut out = Vec::new();
        for (j, &a) in self.mults.iter().enumerate() {
            for s in 0..a as usize {
                out.push((j as i64, s));
            }
        }
        out
    }
}

/// Groups roots into classes modulo `Z`, sorted by representative.
pub fn classify_roots<V: LogAction>(roots: &[V::Root]) -> Result<Vec<ExponentClass>, SolverError> {
    let mut groups: BTreeMap<Rat, Vec<Rat>> = BTreeMap::new();
    for r in roots {
        let e = V::root_exponent(r).ok_or(SolverError::RootsNotAdmitted)?;
        let frac = &e - Rat::from_integer(e.floor().to_integer());
        groups.entry(frac).or_default().push(e);
    }
    let mut out: Vec<ExponentClass> = groups
        .into_values()
        .map(|mut es| {
            es.sort();
            let rep = es[0].clone();
            let mut mults: Vec<u32> = Vec::new();
            for e in &es {
                let j = (e - &rep).to_integer().to_usize().expect("sorted offsets");
                if mults.len() <= j {
                    mults.resize(j + 1, 0);
                }
                mults[j] += 1;
            }
            ExponentClass { rep, mults }
        })
        .collect();
    out.sort_by(|a, b| a.rep.cmp(&b.rep));
    Ok(out)
}

/// Undeformed part, its roots and the deformation of a normalized operator.
#[derive(Clone, Debug)]
pub struct SplitOperator<V: LogAction> {
    pub p: UPoly<V::K>,
    pub roots: Vec<V::Root>,
    pub q: OpSeries<V>,
}

/// Divides `D` by the leading coefficient of its `u^0` part and splits it as
/// `P + Q`, truncating to `order`.
pub fn split_operator<V: LogAction>(
    d: &OpSeries<V>,
    order: usize,
) -> Result<(SplitOperator<V>, V::K), SolverError> {
    let d0 = d.coeff(0);
    let mut p_func = RatFunc::<V>::zero();
    for (j, f) in d0.terms() {
        if j != 0 || !f.is_poly() {
            return Err(SolverError::NotNormalized(format!("{d0:?}")));
        }
        p_func = f.clone();
    }
    let lead = p_func.numerator().lead();
    let inv = lead.inv().ok_or_else(|| SolverError::NotNormalized("leading coefficient".into()))?;
    let p = p_func.numerator().scale(&inv);
    let roots = V::split_roots(&p).ok_or(SolverError::RootsNotAdmitted)?;
    let scale = NormalOp::<V>::scalar(inv);
    let mut qc: Vec<NormalOp<V>> = (0..order).map(|i| scale.mul(&d.coeff_or_zero(i))).collect();
    qc[0] = NormalOp::zero();
    let q = OpSeries::with_order(qc, order);
    Ok((SplitOperator { p, roots, q }, lead))
}

trait CoeffOrZero<K> {
    fn coeff_or_zero(&self, i: usize) -> K;
}

impl<K: Ring> CoeffOrZero<K> for crate::exact::TSeries<K> {
    fn coeff_or_zero(&self, i: usize) -> K {
        match self.order() {
            Some(n) if i >= n => K::zero(),
            _ => self.coeff(i),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, DiffVar};

    #[test]
    fn classes() {
        let c = classify_roots::<DiffVar>(&[int(0), int(-1)]).unwrap();
        assert_eq!(c, vec![ExponentClass { rep: int(-1), mults: vec![1, 1] }]);
        let c = classify_roots::<DiffVar>(&[rat(1, 2), int(3)]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].rep, rat(1, 2));
        let c = classify_roots::<DiffVar>(&[int(1), int(1), int(3)]).unwrap();
        assert_eq!(c, vec![ExponentClass { rep: int(1), mults: vec![2, 0, 1] }]);
        assert_eq!(c[0].k(), 3);
        assert_eq!(c[0].slots(), vec![(0, 0), (0, 1), (2, 0)]);
    }
}
