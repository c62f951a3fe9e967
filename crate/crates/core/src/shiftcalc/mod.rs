//! Pole-collapsing operators and the `W_j` polynomials.
//!
//! Results are polynomials in the inverse variable: `η = 1/ε` for the
//! differential case and `η = 1/(q^ε - 1)` (resp. `1/(q^{nε} - 1)`) for the
//! q-case. The `η^0` coefficient is the regular part.

use crate::exact::{
    int, partial_fractions, DiffVar, PartialFractions, PoleSum, QAlgebra, QFrac, QRoot, QVar, Rat, RatFunc, Ring, TSeries,
    UPoly,
};

/// Laurent data `Σ_{j≥0} c_j η^j` in the inverse variable.
pub type EpsLaurent<K> = UPoly<K>;

/// `T_ε`: drops the polynomial part and moves every pole to `ε = 0`.
pub fn t_eps(f: &RatFunc<DiffVar>) -> EpsLaurent<Rat> {
    t_eps_pf(&partial_fractions(f))
}

fn t_eps_pf(pf: &PartialFractions<DiffVar>) -> EpsLaurent<Rat> {
    let mut c: Vec<Rat> = Vec::new();
    for (_, j, k) in &pf.terms {
        let j = *j as usize;
        if c.len() <= j {
            c.resize(j + 1, Rat::zero());
        }
        c[j] = &c[j] + k;
    }
    UPoly::new(c)
}

/// `T_ε` applied to every coefficient of a series.
pub fn t_eps_series(f: &TSeries<RatFunc<DiffVar>>) -> TSeries<EpsLaurent<Rat>> {
    f.map(t_eps)
}

/// `T_ε` of every entry, read as the coefficients of a series truncated at their count.
pub fn t_eps_poles(f: &[PoleSum<DiffVar>]) -> TSeries<EpsLaurent<Rat>> {
    TSeries::with_order(f.iter().map(|g| t_eps_pf(&g.to_partial_fractions())).collect(), f.len())
}

/// Partial-fraction data in the q-case: regular constant and, per order `j`,
/// the sum of `c·q^{-mj}` over poles `q^m` (poles at 0 contribute nothing).
fn q_pole_data(pf: &PartialFractions<QVar>) -> (QFrac, Vec<QFrac>) {
    let mut c: Vec<QFrac> = Vec::new();
    for (root, j, k) in &pf.terms {
        let QRoot::Pow(m) = root else { continue };
        let j = *j as usize;
        if c.len() <= j {
            c.resize(j + 1, QFrac::zero());
        }
        // 1/(z - q^m)^j = q^{-mj} / (q^{-m} z - 1)^j
        c[j] = c[j].add(&k.mul(&QFrac::q_pow(-m * j as i64)));
    }
    (pf.poly.coeff(0), c)
}

/// `R_ε`: keeps the constant, drops `q^{jε}` for `j ≠ 0`, maps
/// `1/(q^{ε+i} - 1)^j` to `η^j`.
pub fn r_eps(f: &RatFunc<QVar>) -> EpsLaurent<QFrac> {
    r_eps_pf(&partial_fractions(f))
}

fn r_eps_pf(pf: &PartialFractions<QVar>) -> EpsLaurent<QFrac> {
    let (c0, mut c) = q_pole_data(pf);
    if c.is_empty() {
        c.push(QFrac::zero());
    }
    c[0] = c0;
    UPoly::new(c)
}

pub fn r_eps_series(f: &TSeries<RatFunc<QVar>>) -> TSeries<EpsLaurent<QFrac>> {
    f.map(r_eps)
}

/// `R_ε` of every entry, as a series truncated at their count.
pub fn r_eps_poles(f: &[PoleSum<QVar>]) -> TSeries<EpsLaurent<QFrac>> {
    TSeries::with_order(f.iter().map(|g| r_eps_pf(&g.to_partial_fractions())).collect(), f.len())
}

/// Polynomial through the points `(x_i, y_i)`.
pub(crate) fn interpolate(points: &[(Rat, Rat)]) -> UPoly<Rat> {
    let mut acc = UPoly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = UPoly::constant(yi.clone());
        for (k, (xk, _)) in points.iter().enumerate() {
            if k != i {
                let lin = UPoly::linear(xk).scale(&Ring::inv(&(xi - xk)).expect("distinct nodes"));
                basis = basis.mul(&lin);
            }
        }
        acc = acc.add(&basis);
    }
    acc
}

fn binomial(n: i64, k: i64) -> Rat {
    if k < 0 {
        return Rat::zero();
    }
    (0..k).fold(Rat::one(), |acc, i| acc * int(n - i) / int(i + 1))
}

/// `W_j(n, u)` for a fixed integer `n`, from its generating series.
pub fn w_poly_at(j: u32, n: i64) -> UPoly<Rat> {
    assert!(j >= 1, "W_j needs j >= 1");
    let j = j as i64;
    // Σ_i C(ni + j - 1, j - 1) u^i, times (1 - u)^j, truncated at u^j
    let series: Vec<Rat> = (0..j).map(|i| binomial(n * i + j - 1, j - 1)).collect();
    let factor: Vec<Rat> = (0..=j).map(|m| binomial(j, m) * int(if m % 2 == 0 { 1 } else { -1 })).collect();
    let prod = UPoly::new(series).mul(&UPoly::new(factor));
    prod.truncate(j as usize)
}

/// `W_j(n, u)` with coefficients polynomial in `n` (outer variable `u`).
pub fn w_poly(j: u32) -> UPoly<UPoly<Rat>> {
    let nodes: Vec<i64> = (1..=j as i64).collect();
    let samples: Vec<UPoly<Rat>> = nodes.iter().map(|&n| w_poly_at(j, n)).collect();
    let coeffs: Vec<UPoly<Rat>> = (0..j as usize)
        .map(|m| {
            let pts: Vec<(Rat, Rat)> =
                nodes.iter().zip(&samples).map(|(&n, w)| (int(n), w.coeff(m))).collect();
            interpolate(&pts)
        })
        .collect();
    UPoly::new(coeffs)
}

/// `n W_j(n, Z)/(Z - 1)^j` as a polynomial in `η_n = 1/(Z - 1)`.
pub fn r_n_pole(j: u32, n: i64) -> EpsLaurent<Rat> {
    // Z = 1 + δ: W_j(n, 1 + δ) δ^{-j}
    let shifted = w_poly_at(j, n).taylor_shift(&int(1));
    let mut c = vec![Rat::zero(); j as usize + 1];
    for (r, w) in shifted.coeffs().iter().enumerate() {
        c[j as usize - r] = w * int(n);
    }
    UPoly::new(c)
}

/// `R_{n,ε}` as a polynomial in `η_n = 1/(q^{nε} - 1)`.
pub fn r_n_eps(f: &RatFunc<QVar>, n: u64) -> EpsLaurent<QFrac> {
    r_n_eps_pf(&partial_fractions(f), n)
}

fn r_n_eps_pf(pf: &PartialFractions<QVar>, n: u64) -> EpsLaurent<QFrac> {
    let n = n as i64;
    let (c0, c) = q_pole_data(pf);
    let mut acc = UPoly::constant(c0.scale(&int(n)));
    for (j, cj) in c.iter().enumerate().skip(1) {
        if cj.is_zero() {
            continue;
        }
        let pole = r_n_pole(j as u32, n).map(QFrac::from_rat);
        acc = acc.add(&pole.scale(cj));
    }
    acc
}

pub fn r_n_eps_series(f: &TSeries<RatFunc<QVar>>, n: u64) -> TSeries<EpsLaurent<QFrac>> {
    f.map(|g| r_n_eps(g, n))
}

/// `R_{n,ε}` of every entry, as a series truncated at their count.
pub fn r_n_eps_poles(f: &[PoleSum<QVar>], n: u64) -> TSeries<EpsLaurent<QFrac>> {
    TSeries::with_order(f.iter().map(|g| r_n_eps_pf(&g.to_partial_fractions(), n)).collect(), f.len())
}

/// `ε^k exp(S)` for `S` a series in `u` (vanishing mod `u`) with
/// coefficients in `η`; returns the coefficients of `η^0..η^k` and whether
/// every higher power of `η` vanished.
pub fn monic_from_exp<K: QAlgebra>(
    s: &TSeries<EpsLaurent<K>>,
    k: usize,
) -> Result<(Vec<TSeries<K>>, bool), crate::exact::ExactError> {
    let e = crate::exact::series_exp(s)?;
    let order = e.order().expect("truncated series");
    let mut tail_ok = true;
    let mut head: Vec<Vec<K>> = vec![Vec::with_capacity(order); k + 1];
    for m in 0..order {
        let c = e.coeff(m);
        for (deg, coeff) in c.coeffs().iter().enumerate() {
            if deg > k && !coeff.is_zero() {
                tail_ok = false;
            }
        }
        for (deg, h) in head.iter_mut().enumerate() {
            h.push(c.coeff(deg));
        }
    }
    Ok((head.into_iter().map(|c| TSeries::with_order(c, order)).collect(), tail_ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn p(v: &[Rat]) -> UPoly<Rat> {
        UPoly::new(v.to_vec())
    }

    #[test]
    fn t_eps_examples() {
        let poly = RatFunc::<DiffVar>::from_poly(p(&[int(5), int(0), int(1)]));
        assert!(t_eps(&poly).is_zero());
        let cube = RatFunc::<DiffVar>::inv_roots(&[int(2), int(2), int(2)]);
        assert_eq!(t_eps(&cube), p(&[int(0), int(0), int(0), int(1)]));
        let f = RatFunc::<DiffVar>::inv_roots(&[int(1)])
            .scale(&int(3))
            .sub(&RatFunc::inv_roots(&[int(0)]).scale(&int(3)));
        assert!(t_eps(&f).is_zero());
    }

    #[test]
    fn r_eps_examples() {
        let z3 = RatFunc::<QVar>::from_poly(UPoly::monomial(QFrac::one(), 3));
        assert!(r_eps(&z3).is_zero());
        assert!(r_eps(&RatFunc::one()).is_one());
        // 1/(q^{ε+2} - 1)^2 = q^{-4}/(z - q^{-2})^2
        let f = RatFunc::<QVar>::inv_roots(&[QRoot::Pow(-2), QRoot::Pow(-2)]).scale(&QFrac::q_pow(-4));
        assert_eq!(r_eps(&f), UPoly::monomial(QFrac::one(), 2));
    }

    #[test]
    fn w_table() {
        let n = UPoly::<Rat>::var();
        let one = UPoly::<Rat>::one();
        let nm1 = n.sub(&one);
        assert_eq!(w_poly(1), UPoly::new(vec![one.clone()]));
        assert_eq!(w_poly(2), UPoly::new(vec![one.clone(), nm1.clone()]));
        let half = UPoly::constant(rat(1, 2));
        let w3 = UPoly::new(vec![
            one.clone(),
            half.mul(&nm1).mul(&n.add(&UPoly::from_i64(4))),
            half.mul(&nm1).mul(&n.sub(&UPoly::from_i64(2))),
        ]);
        assert_eq!(w_poly(3), w3);
        let sixth = UPoly::constant(rat(1, 6));
        let third = UPoly::constant(rat(1, 3));
        let n2 = n.mul(&n);
        let w4 = UPoly::new(vec![
            one.clone(),
            sixth.mul(&nm1).mul(&n2.add(&n.scale(&int(7))).add(&UPoly::from_i64(18))),
            third.mul(&nm1).mul(&n2.scale(&int(2)).add(&n.scale(&int(2))).sub(&UPoly::from_i64(9))),
            sixth.mul(&nm1).mul(&n.sub(&UPoly::from_i64(2))).mul(&n.sub(&UPoly::from_i64(3))),
        ]);
        assert_eq!(w_poly(4), w4);
    }

    #[test]
    fn r_n_examples() {
        assert_eq!(r_n_eps(&RatFunc::one(), 7), UPoly::constant(QFrac::from_i64(7)));
        // 1/(q^{ε+5} - 1) = q^{-5}/(z - q^{-5})
        let f = RatFunc::<QVar>::inv_roots(&[QRoot::Pow(-5)]).scale(&QFrac::q_pow(-5));
        assert_eq!(r_n_eps(&f, 4), UPoly::new(vec![QFrac::zero(), QFrac::from_i64(4)]));
        // 1/(z - 1)^2 -> n(1 + (n-1)Z)/(Z-1)^2 = n(n-1)η + n^2 η^2
        let g = RatFunc::<QVar>::inv_roots(&[QRoot::Pow(0), QRoot::Pow(0)]);
        let n = 3;
        assert_eq!(
            r_n_eps(&g, n),
            UPoly::new(vec![QFrac::zero(), QFrac::from_i64(6), QFrac::from_i64(9)])
        );
    }

    #[test]
    fn exp_of_simple_pole() {
        // P = θ, Q = t c: zero mode of log(1 + c t/ε) gives ε + c t
        let c = int(3);
        let order = 5;
        let s: Vec<UPoly<Rat>> = (0..order)
            .map(|m| {
                if m == 0 {
                    UPoly::zero()
                } else {
                    let sign = if m % 2 == 1 { 1 } else { -1 };
                    UPoly::monomial(Ring::pow(&c, m as u64) * rat(sign, m as i64), m)
                }
            })
            .collect();
        let s = TSeries::with_order(s, order);
        let (head, tail_ok) = monic_from_exp(&s, 1).unwrap();
        assert!(tail_ok);
        assert!(head[0].is_one());
        assert_eq!(head[1], TSeries::with_order(vec![int(0), c], order));
    }
}
