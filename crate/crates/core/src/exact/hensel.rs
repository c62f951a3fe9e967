use super::{ExactError, Ring, TSeries, UPoly};

/// Result of [`lift_coprime_factorization`]: `g = h · Π factors` modulo `u^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lifted<F: Ring> {
    pub h: UPoly<TSeries<F>>,
    pub factors: Vec<UPoly<TSeries<F>>>,
}

fn slices<F: Ring>(g: &UPoly<TSeries<F>>, order: usize) -> Vec<UPoly<F>> {
    (0..order)
        .map(|k| UPoly::new(g.coeffs().iter().map(|c| if c.order().is_some_and(|n| k >= n) { F::zero() } else { c.coeff(k) }).collect()))
        .collect()
}

fn assemble<F: Ring>(s: &[UPoly<F>], order: usize) -> UPoly<TSeries<F>> {
    let deg = s.iter().filter_map(|p| p.degree()).max().map_or(0, |d| d + 1);
    UPoly::new(
        (0..deg)
            .map(|e| TSeries::with_order(s.iter().map(|p| p.coeff(e)).collect(), order))
            .collect(),
    )
}

fn slice_mul<F: Ring>(a: &[UPoly<F>], b: &[UPoly<F>], order: usize) -> Vec<UPoly<F>> {
    let mut out = vec![UPoly::zero(); order];
    for (i, x) in a.iter().enumerate().take(order) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order - i) {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Lifts a factorization `g ≡ Π ḡ_i (mod u)` into pairwise coprime monic
/// factors to `g = h · Π g_i (mod u^order)` with `g_i ≡ ḡ_i`, `g_i` monic of
/// the same degree and `h ≡ 1 (mod u)`.
///
/// Each step solves `e = δh·Πḡ + Σ δg_i·Π_{j≠i} ḡ_j` for the current error
/// `e`: `δh` is the quotient of `e` by `Πḡ` and the `δg_i` come from the
/// Chinese remainder theorem on the remainder.
pub fn lift_coprime_factorization<F: Ring>(
    g: &UPoly<TSeries<F>>,
    factors: &[UPoly<F>],
    order: usize,
) -> Result<Lifted<F>, ExactError> {
    for f in factors {
        if !f.lead().is_one() {
            return Err(ExactError::Precondition("factors must be monic".into()));
        }
    }
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            if factors[i].gcd(&factors[j]).degree() != Some(0) {
                return Err(ExactError::NotCoprime);
            }
        }
    }
    let gs = slices(g, order);
    let prod = factors.iter().fold(UPoly::one(), |acc, f| acc.mul(f));
    if gs[0] != prod {
        return Err(ExactError::FactorMismatch);
    }
    let cofactor_inv: Vec<UPoly<F>> = (0..factors.len())
        .map(|i| {
            let others = factors
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(UPoly::one(), |acc, (_, f)| acc.mul(f));
            others.inv_mod(&factors[i]).ok_or(ExactError::NotCoprime)
        })
        .collect::<Result<_, _>>()?;

    let mut h: Vec<UPoly<F>> = vec![UPoly::zero(); order];
    h[0] = UPoly::one();
    let mut gi: Vec<Vec<UPoly<F>>> = factors
        .iter()
        .map(|f| {
            let mut v = vec![UPoly::zero(); order];
            v[0] = f.clone();
            v
        })
        .collect();
    for m in 1..order {
        let current = gi.iter().fold(h.clone(), |acc, f| slice_mul(&acc, f, order));
        let e = gs[m].sub(&current[m]);
        if e.is_zero() {
            continue;
        }
        let (dh, r) = e.div_rem(&prod)?;
        h[m] = dh;
        for (i, f) in factors.iter().enumerate() {
            gi[i][m] = r.mul(&cofactor_inv[i]).div_rem(f)?.1;
        }
    }
    Ok(Lifted {
        h: assemble(&h, order),
        factors: gi.iter().map(|s| assemble(s, order)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, Rat};

    fn ser(v: &[i64], n: usize) -> TSeries<Rat> {
        TSeries::with_order(v.iter().map(|&x| int(x)).collect(), n)
    }

    fn lin(r: i64) -> UPoly<Rat> {
        UPoly::new(vec![int(-r), int(1)])
    }

    #[test]
    fn exact_product_is_fixed() {
        let g = UPoly::new(vec![ser(&[2], 3), ser(&[-3], 3), ser(&[1], 3)]);
        let l = lift_coprime_factorization(&g, &[lin(1), lin(2)], 3).unwrap();
        assert!(l.h.is_one());
        assert_eq!(l.factors[0], UPoly::new(vec![ser(&[-1], 3), ser(&[1], 3)]));
    }

    #[test]
    fn first_order_correction() {
        let g = UPoly::new(vec![ser(&[2, 1], 2), ser(&[-3], 2), ser(&[1], 2)]);
        let l = lift_coprime_factorization(&g, &[lin(1), lin(2)], 2).unwrap();
        assert_eq!(l.factors[0], UPoly::new(vec![ser(&[-1, -1], 2), ser(&[1], 2)]));
        assert_eq!(l.factors[1], UPoly::new(vec![ser(&[-2, 1], 2), ser(&[1], 2)]));
        assert!(l.h.is_one());
    }

    #[test]
    fn rejects_bad_input() {
        let g = UPoly::new(vec![ser(&[1], 2), ser(&[-2], 2), ser(&[1], 2)]);
        assert_eq!(lift_coprime_factorization(&g, &[lin(1), lin(1)], 2), Err(ExactError::NotCoprime));
        assert_eq!(lift_coprime_factorization(&g, &[lin(1), lin(2)], 2), Err(ExactError::FactorMismatch));
    }
}
