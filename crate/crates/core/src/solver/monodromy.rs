use rayon::prelude::*;

use super::{build_solutions, classify_roots, dlog_matrix, shift_matrix, ExponentClass, SolutionBasis};
use super::{SolverError, SplitOperator};
use crate::exact::{DiffVar, Matrix, QAlgebra, QFrac, QVar, Rat, Ring, TSeries, UPoly};
use crate::opalg::{left_div_by_p, zero_mode_log1p_poles, LogAction};
use crate::shiftcalc::{monic_from_exp, r_eps_poles, t_eps_poles};

/// Monic polynomial in `ε` (resp. `q^ε`) with series coefficients, ascending.
pub type MonodromyPoly<K> = UPoly<TSeries<K>>;

/// `det(ε·I - A)`.
pub fn char_poly_w<K: Ring>(a: &Matrix<TSeries<K>>) -> MonodromyPoly<K> {
    UPoly::new(a.charpoly())
}

fn constant_terms<K: Ring>(w: &MonodromyPoly<K>) -> UPoly<K> {
    UPoly::new(w.coeffs().iter().map(|c| c.coeff(0)).collect())
}

/// Solution basis, `D_log` matrix and `w_i` of one exponent class.
pub type ClassData<K> = (SolutionBasis<K>, Matrix<TSeries<K>>, MonodromyPoly<K>);

/// Solutions, `D_log` matrix and `w_i` of one class; checks `w_i ≡ ε^{k_i}`.
pub fn class_w<V: LogAction>(op: &SplitOperator<V>, class: &ExponentClass) -> Result<ClassData<V::K>, SolverError> {
    let basis = build_solutions(op, class)?;
    let a = dlog_matrix::<V>(&basis)?;
    let w = char_poly_w(&a);
    if constant_terms(&w) != UPoly::monomial(V::K::one(), class.k()) {
        return Err(SolverError::NotUnipotent);
    }
    Ok((basis, a, w))
}

/// Product of the per-class monodromy polynomials, with the per-class data.
#[derive(Clone, Debug)]
pub struct SolverMonodromy {
    pub classes: Vec<(ExponentClass, Matrix<TSeries<Rat>>, MonodromyPoly<Rat>)>,
    pub w: MonodromyPoly<Rat>,
}

/// Route 1 in the differential case: characteristic polynomials of `D_log`.
pub fn solve_monodromy(op: &SplitOperator<DiffVar>) -> Result<SolverMonodromy, SolverError> {
    let classes = classify_roots::<DiffVar>(&op.roots)?;
    let per: Result<Vec<_>, SolverError> = classes
        .par_iter()
        .map(|c| class_w(op, c).map(|(_, a, w)| (c.clone(), a, w)))
        .collect();
    let per = per?;
    let w = per.iter().fold(UPoly::one(), |acc, (_, _, w)| acc.mul(w));
    Ok(SolverMonodromy { classes: per, w })
}

fn degree_k<V: LogAction>(op: &SplitOperator<V>) -> usize {
    op.roots.len()
}

/// Route 2 in the differential case: `ε^k exp(T_ε(zero mode of log(1 + P^{-1}Q)))`.
pub fn w_via_shift_exp(op: &SplitOperator<DiffVar>) -> Result<MonodromyPoly<Rat>, SolverError> {
    let k = degree_k(op);
    let r = left_div_by_p(&op.roots, &op.q);
    let zm = zero_mode_log1p_poles(&r)?;
    let s = t_eps_poles(&zm);
    let (head, tail_ok) = monic_from_exp(&s, k)?;
    if !tail_ok {
        return Err(SolverError::Tail);
    }
    // coefficient of η^m multiplies ε^{k-m}
    Ok(UPoly::new(head.into_iter().rev().collect()))
}

/// `exp(A)` for a matrix of series that is nilpotent modulo `u`.
pub fn matrix_exp<K: QAlgebra>(a: &Matrix<TSeries<K>>, order: usize) -> Matrix<TSeries<K>> {
    let k = a.rows();
    let mut acc = Matrix::identity(k);
    let mut term = Matrix::identity(k);
    for m in 1..=(k * order + k) {
        term = term.mul(a).scale(&TSeries::from_rat(&Rat::new(1.into(), (m as i64).into())));
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term);
    }
    acc.map(|c| c.truncate(order))
}

/// q-case solver output.
#[derive(Clone, Debug)]
pub struct QMonodromy {
    pub basis: SolutionBasis<QFrac>,
    pub a: Matrix<TSeries<QFrac>>,
    pub lambda: Matrix<TSeries<QFrac>>,
    pub w: MonodromyPoly<QFrac>,
}

/// Solutions in `x^l k(q)((x))[log_q x][[u]]`, `D_log`, `Λ = exp(A)` and
/// `w(z) = det(z - Λ)`.
pub fn q_solutions_and_w(op: &SplitOperator<QVar>) -> Result<QMonodromy, SolverError> {
    let classes = classify_roots::<QVar>(&op.roots)?;
    let [class] = classes.as_slice() else {
        return Err(SolverError::RootsNotAdmitted);
    };
    let basis = build_solutions(op, class)?;
    let a = dlog_matrix::<QVar>(&basis)?;
    let lambda = shift_matrix::<QVar>(&basis)?;
    if matrix_exp(&a, basis.order) != lambda {
        return Err(SolverError::ExpMismatch);
    }
    let w = char_poly_w(&lambda);
    let unipotent = UPoly::<QFrac>::from_roots(&vec![QFrac::one(); class.k()]);
    if constant_terms(&w) != unipotent {
        return Err(SolverError::NotUnipotent);
    }
    Ok(QMonodromy { basis, a, lambda, w })
}

/// `(q^ε - 1)^k exp(R_ε(zero mode of log(1 + P^{-1}Q))) = C·w(q^ε)`; returns `(w, C)`.
pub fn w_via_r_exp(op: &SplitOperator<QVar>) -> Result<(MonodromyPoly<QFrac>, TSeries<QFrac>), SolverError> {
    let k = degree_k(op);
    let r = left_div_by_p(&op.roots, &op.q);
    let zm = zero_mode_log1p_poles(&r)?;
    let s = r_eps_poles(&zm);
    let (head, tail_ok) = monic_from_exp(&s, k)?;
    if !tail_ok {
        return Err(SolverError::Tail);
    }
    let c = head[0].clone();
    let in_delta: UPoly<TSeries<QFrac>> = UPoly::new(head.into_iter().rev().collect());
    let in_z = in_delta.taylor_shift(&TSeries::from_i64(-1));
    let order = c.order().expect("truncated");
    let cinv = c.inv_to(order).ok_or(SolverError::NotUnipotent)?;
    Ok((in_z.scale(&cinv), c))
}

/// Evaluates `w` at a scalar (`ε` or `q^ε`).
pub fn eval_w<K: Ring>(w: &MonodromyPoly<K>, at: &K) -> TSeries<K> {
    w.eval(&TSeries::constant(at.clone()))
}

/// Shifted polynomial `w(ε + a)`.
pub fn shift_w(w: &MonodromyPoly<Rat>, a: &Rat) -> MonodromyPoly<Rat> {
    w.taylor_shift(&TSeries::constant(a.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::oplang::{elaborate_diff, elaborate_q, parse, Dialect};
    use crate::solver::split_operator;

    fn diff(src: &str, l: u32, order: usize) -> SplitOperator<DiffVar> {
        let d = elaborate_diff(&parse(src, Dialect::Diff, l).unwrap(), l).unwrap();
        split_operator(&d, order).unwrap().0
    }

    fn qdiff(src: &str, l: u32, order: usize) -> SplitOperator<QVar> {
        let d = elaborate_q(&parse(src, Dialect::QDiff, l).unwrap(), l).unwrap();
        split_operator(&d, order).unwrap().0
    }

    #[test]
    fn simple_routes_agree() {
        for (src, order) in [("theta + 3*t", 6), ("theta^2 + t*(x + x^(-1))", 8), ("theta*(theta+1) + t*x", 6)] {
            let op = diff(src, 1, order);
            let a = solve_monodromy(&op).unwrap().w;
            let b = w_via_shift_exp(&op).unwrap();
            assert_eq!(a, b, "{src}");
        }
        let op = diff("theta + 3*t", 1, 4);
        let w = w_via_shift_exp(&op).unwrap();
        assert_eq!(w.coeff(0), TSeries::with_order(vec![int(0), int(3)], 4));
    }

    #[test]
    fn arithmetic_operator_head() {
        let src = "theta*(theta+1) + t^(1/2)*(x^(-1)*theta^2 + theta^2*x) + t*theta*(theta+1)";
        let op = diff(src, 2, 9);
        let w = solve_monodromy(&op).unwrap().w;
        let c0 = w.coeff(0);
        assert_eq!(c0.coeff(4), rat(-1, 4));
        assert_eq!(c0.coeff(6), rat(-1, 24));
        assert_eq!(c0.coeff(8), rat(-101, 576));
        assert!(w.coeff(1).is_zero());
        assert_eq!(w, w_via_shift_exp(&op).unwrap());
    }

    #[test]
    fn q_simple() {
        let op = qdiff("y - 1 + 3*t", 1, 5);
        let m = q_solutions_and_w(&op).unwrap();
        // Λ = 1 - 3t exactly
        assert_eq!(m.lambda.get(0, 0), &TSeries::with_order(vec![int(1), int(-3)].into_iter().map(|r| QFrac::from_rat(&r)).collect(), 5));
        let (w, c) = w_via_r_exp(&op).unwrap();
        assert!(c.is_one());
        assert_eq!(w, m.w);
    }

    #[test]
    fn q_unipotent_two_roots() {
        let op = qdiff("(y-1)*(q*y-1)", 1, 3);
        let m = q_solutions_and_w(&op).unwrap();
        let want = UPoly::<QFrac>::from_roots(&[QFrac::one(), QFrac::one()]);
        assert_eq!(constant_terms(&m.w), want);
    }

    #[test]
    fn q_arithmetic_operator_head() {
        let src = "(y-1)*(q*y-1) + t^(1/2)*((y-1)^2*x + x^(-1)*(y-1)^2) + t*(y-1)*(q*y-1)";
        let op = qdiff(src, 2, 5);
        let m = q_solutions_and_w(&op).unwrap();
        let c = m.w.coeff(1).add(&TSeries::from_i64(2));
        // C_2 = -(q-1)^2/(q+1)^2
        let qm1 = QFrac::q_diff(1, 0);
        let qp1 = QFrac::q_pow(1).add(&QFrac::one());
        let want = qm1.mul(&qm1).mul(&Ring::inv(&qp1.mul(&qp1)).unwrap()).neg();
        assert_eq!(c.coeff(4), want);
        assert!(c.coeff(2).is_zero());
        assert!(m.w.coeff(0).is_one());
        assert!(m.w.coeff(2).is_one());
        let (w, _) = w_via_r_exp(&op).unwrap();
        assert_eq!(w, m.w);
    }
}
