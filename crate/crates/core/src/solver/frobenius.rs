use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{ExponentClass, SolverError, SplitOperator};
use crate::exact::{int, Matrix, Ring, TSeries, UPoly};
use crate::opalg::{
    apply_normal, nil_preimage, nil_series_inverse, poly_in_nil, vec_add_into, LogAction,
    LogLaurent,
};

/// Solutions `h_{j,s}` of one exponent class, one per kernel slot.
#[derive(Clone, Debug)]
pub struct SolutionBasis<K> {
    pub class: ExponentClass,
    pub slots: Vec<(i64, usize)>,
    pub sols: Vec<LogLaurent<K>>,
    pub order: usize,
}

/// Kernel of `P` inside the class: `x^{s+j}` times the `s`-th log basis vector.
pub fn kernel_basis<K: Ring>(class: &ExponentClass, order: usize) -> Vec<LogLaurent<K>> {
    class
        .slots()
        .into_iter()
        .map(|(j, s)| LogLaurent::basis(class.rep.clone(), j, s, order))
        .collect()
}

/// `P` on the block at offset `n` as `N^μ U(N)`; returns `U`.
fn block_unit<V: LogAction>(
    p: &UPoly<V::K>,
    class: &ExponentClass,
    n: i64,
) -> Result<(usize, UPoly<V::K>), SolverError> {
    let a = &class.rep + int(n);
    let bp = V::block_poly(p, &a)?;
    let mu = class.mult(n) as usize;
    debug_assert!(bp.coeffs().iter().take(mu).all(|c| c.is_zero()));
    Ok((mu, UPoly::new(bp.coeffs().get(mu..).unwrap_or(&[]).to_vec())))
}

/// Preimage under `P` of one u-slice with all kernel-slot coefficients zero.
pub fn solve_p<V: LogAction>(
    p: &UPoly<V::K>,
    class: &ExponentClass,
    rhs: &BTreeMap<i64, Vec<V::K>>,
) -> Result<BTreeMap<i64, Vec<V::K>>, SolverError> {
    let mut out = BTreeMap::new();
    for (n, g) in rhs {
        if g.is_empty() {
            continue;
        }
        let (mu, unit) = block_unit::<V>(p, class, *n)?;
        let uinv = nil_series_inverse::<V>(&unit, g.len())?;
        let mut h = poly_in_nil::<V>(&uinv, g);
        for _ in 0..mu {
            h = nil_preimage::<V>(&h);
        }
        if !h.is_empty() {
            out.insert(*n, h);
        }
    }
    Ok(out)
}

fn neg_slice<K: Ring>(s: &mut BTreeMap<i64, Vec<K>>) {
    for v in s.values_mut() {
        for c in v.iter_mut() {
            *c = c.neg();
        }
    }
}

/// Unique solutions with `f_0` a kernel vector and all higher orders
/// free of kernel slots.
pub fn build_solutions<V: LogAction>(
    op: &SplitOperator<V>,
    class: &ExponentClass,
) -> Result<SolutionBasis<V::K>, SolverError> {
    let order = op.q.order().ok_or(SolverError::Untruncated)?;
    let slots = class.slots();
    let sols: Result<Vec<_>, SolverError> = kernel_basis::<V::K>(class, order)
        .into_par_iter()
        .map(|mut f| {
            for m in 1..order {
                let mut rhs: BTreeMap<i64, Vec<V::K>> = BTreeMap::new();
                for i in 1..=m {
                    if i >= op.q.coeffs().len() {
                        break;
                    }
                    let qi = &op.q.coeffs()[i];
                    if qi.is_zero() {
                        continue;
                    }
                    for (n, v) in apply_normal(qi, &class.rep, &f.orders[m - i])? {
                        vec_add_into(rhs.entry(n).or_default(), &v);
                    }
                }
                rhs.retain(|_, v| !v.is_empty());
                neg_slice(&mut rhs);
                f.orders[m] = solve_p::<V>(&op.p, class, &rhs)?;
            }
            Ok(f)
        })
        .collect();
    Ok(SolutionBasis { class: class.clone(), slots, sols: sols?, order })
}

/// Applies a polynomial in the log nilpotent to every block.
fn apply_log_poly<V: LogAction>(
    f: &LogLaurent<V::K>,
    poly: impl Fn(usize) -> UPoly<V::K>,
) -> LogLaurent<V::K> {
    let mut out = LogLaurent::zero(f.base.clone(), f.order());
    for (m, slice) in f.orders.iter().enumerate() {
        for (n, v) in slice {
            let w = poly_in_nil::<V>(&poly(v.len()), v);
            if !w.is_empty() {
                out.orders[m].insert(*n, w);
            }
        }
    }
    out
}

/// Expresses a solution as a `K[[u]]`-combination of the basis by reading
/// kernel-slot coefficients order by order.
#[allow(clippy::needless_range_loop)]
fn project<V: LogAction>(
    basis: &SolutionBasis<V::K>,
    mut resid: LogLaurent<V::K>,
) -> Result<Vec<TSeries<V::K>>, SolverError> {
    let order = basis.order;
    let k = basis.slots.len();
    let mut coef: Vec<Vec<V::K>> = vec![vec![V::K::zero(); order]; k];
    for o in 0..order {
        for (idx, (j, s)) in basis.slots.iter().enumerate() {
            let c = resid.get(o, *j).get(*s).cloned().unwrap_or_else(V::K::zero);
            if c.is_zero() {
                continue;
            }
            let h = &basis.sols[idx];
            for t in 0..order - o {
                for (n, v) in &h.orders[t] {
                    let scaled: Vec<V::K> = v.iter().map(|x| x.mul(&c).neg()).collect();
                    vec_add_into(resid.orders[o + t].entry(*n).or_default(), &scaled);
                }
                resid.orders[o + t].retain(|_, v| !v.is_empty());
            }
            coef[idx][o] = c;
        }
        if !resid.orders[o].is_empty() {
            return Err(SolverError::Projection(o));
        }
    }
    Ok(coef.into_iter().map(|c| TSeries::with_order(c, order)).collect())
}

fn log_poly_matrix<V: LogAction>(
    basis: &SolutionBasis<V::K>,
    poly: impl Fn(usize) -> UPoly<V::K> + Sync,
) -> Result<Matrix<TSeries<V::K>>, SolverError> {
    let rows: Result<Vec<Vec<TSeries<V::K>>>, SolverError> = basis
        .sols
        .par_iter()
        .map(|h| project::<V>(basis, apply_log_poly::<V>(h, &poly)))
        .collect();
    let rows = rows?;
    let k = rows.len();
    Ok(Matrix::from_fn(k, k, |r, c| rows[r][c].clone()))
}

/// Matrix `A` with `D_log h_r = Σ_m A_{rm} h_m`.
pub fn dlog_matrix<V: LogAction>(
    basis: &SolutionBasis<V::K>,
) -> Result<Matrix<TSeries<V::K>>, SolverError> {
    log_poly_matrix::<V>(basis, V::dlog_poly)
}

/// Matrix of `log x -> log x + 1` on the solutions (binomial log basis).
pub fn shift_matrix<V: LogAction>(
    basis: &SolutionBasis<V::K>,
) -> Result<Matrix<TSeries<V::K>>, SolverError> {
    log_poly_matrix::<V>(basis, |_| UPoly::new(vec![V::K::one(), V::K::one()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, DiffVar, Rat};
    use crate::opalg::{apply_op, NormalOp};
    use crate::oplang::{elaborate_diff, parse, Dialect};
    use crate::solver::{classify_roots, split_operator};

    fn split(src: &str, order: usize) -> SplitOperator<DiffVar> {
        let d = elaborate_diff(&parse(src, Dialect::Diff, 1).unwrap(), 1).unwrap();
        split_operator(&d, order).unwrap().0
    }

    fn slice(n: i64, v: Vec<Rat>) -> BTreeMap<i64, Vec<Rat>> {
        BTreeMap::from([(n, v)])
    }

    #[test]
    fn solve_p_examples() {
        let theta = split("theta", 1);
        let c = &classify_roots::<DiffVar>(&theta.roots).unwrap()[0];
        assert_eq!(solve_p::<DiffVar>(&theta.p, c, &slice(0, vec![int(1)])).unwrap(), slice(0, vec![int(0), int(1)]));
        assert_eq!(solve_p::<DiffVar>(&theta.p, c, &slice(1, vec![int(1)])).unwrap(), slice(1, vec![int(1)]));
        let t2 = split("theta^2", 1);
        let c2 = &classify_roots::<DiffVar>(&t2.roots).unwrap()[0];
        assert_eq!(solve_p::<DiffVar>(&t2.p, c2, &slice(2, vec![int(1)])).unwrap(), slice(2, vec![rat(1, 4)]));
    }

    #[test]
    fn exponential_solution() {
        // (θ + t x) h = 0 gives h = e^{-tx}
        let op = split("theta + t*x", 5);
        let class = &classify_roots::<DiffVar>(&op.roots).unwrap()[0];
        let b = build_solutions(&op, class).unwrap();
        let h = &b.sols[0];
        let fact = [1, 1, 2, 6, 24];
        for (m, f) in fact.iter().enumerate() {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            assert_eq!(h.get(m, m as i64), &[rat(sign, *f)][..]);
        }
        let d = op.q.add(&TSeries::constant(NormalOp::symbol()));
        assert!(apply_op(&d, h).unwrap().is_zero());
    }

    #[test]
    fn dlog_examples() {
        let op = split("theta^2", 3);
        let class = &classify_roots::<DiffVar>(&op.roots).unwrap()[0];
        let a = dlog_matrix::<DiffVar>(&build_solutions(&op, class).unwrap()).unwrap();
        let want = Matrix::from_fn(2, 2, |r, c| {
            TSeries::with_order(vec![int(if (r, c) == (1, 0) { 1 } else { 0 })], 3)
        });
        assert_eq!(a, want);
        let op = split("theta + 3*t", 4);
        let class = &classify_roots::<DiffVar>(&op.roots).unwrap()[0];
        let a = dlog_matrix::<DiffVar>(&build_solutions(&op, class).unwrap()).unwrap();
        assert_eq!(a.get(0, 0), &TSeries::with_order(vec![int(0), int(-3)], 4));
        let op = split("theta*(theta+1)", 3);
        let class = &classify_roots::<DiffVar>(&op.roots).unwrap()[0];
        let a = dlog_matrix::<DiffVar>(&build_solutions(&op, class).unwrap()).unwrap();
        assert!(a.is_zero());
    }
}
