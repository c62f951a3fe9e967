//! Randomized invariant checks shared by the property tests and the acceptance harness.
//! Inputs are plain integer data so any generator can drive them.
#![allow(dead_code)]

use std::collections::BTreeMap;

use arithsupport::exact::{
    int, partial_fractions, rat, series_exp, series_log, DiffVar, QFrac, QVar, Rat, RatFunc, Ring, TSeries, UPoly,
};
use arithsupport::opalg::{NormalOp, TorusCoeff, TorusElem};
use arithsupport::oplang::{elaborate_diff, parse, print, Dialect, OpExpr};
use arithsupport::repmat::rho_p_symbolic;

/// `(x-power, coefficients of f(theta))` terms.
pub type Terms = Vec<(i64, Vec<i64>)>;

fn upoly(c: &[i64]) -> UPoly<Rat> {
    UPoly::new(c.iter().map(|&k| int(k)).collect())
}

pub fn diff_op(terms: &Terms) -> NormalOp<DiffVar> {
    let mut a = NormalOp::zero();
    for (j, c) in terms {
        a.add_term(*j, &RatFunc::from_poly(upoly(c)));
    }
    a
}

pub fn q_op(terms: &Terms) -> NormalOp<QVar> {
    let mut a = NormalOp::zero();
    for (j, c) in terms {
        let f = UPoly::new(c.iter().enumerate().map(|(i, &k)| QFrac::from_i64(k).mul(&QFrac::q_pow(i as i64 - 1))).collect());
        a.add_term(*j, &RatFunc::from_poly(f));
    }
    a
}

/// Terms `(i, j, q-exponent, c)` for `c q^e x^i y^j`.
pub fn torus_elem(terms: &[(i64, i64, i32, i64)]) -> TorusElem {
    terms.iter().fold(TorusElem::zero(), |acc, &(i, j, e, c)| {
        acc.add(&TorusElem::monomial(i, j, TorusCoeff::monomial([e, 0, 0, 0], int(c))))
    })
}

pub fn assoc_diff(a: &Terms, b: &Terms, c: &Terms) -> bool {
    let (a, b, c) = (diff_op(a), diff_op(b), diff_op(c));
    a.mul(&b).mul(&c) == a.mul(&b.mul(&c))
}

pub fn assoc_q(a: &Terms, b: &Terms, c: &Terms) -> bool {
    let (a, b, c) = (q_op(a), q_op(b), q_op(c));
    a.mul(&b).mul(&c) == a.mul(&b.mul(&c))
}

pub fn assoc_torus(a: &[(i64, i64, i32, i64)], b: &[(i64, i64, i32, i64)], c: &[(i64, i64, i32, i64)]) -> bool {
    let (a, b, c) = (torus_elem(a), torus_elem(b), torus_elem(c));
    a.mul(&b).mul(&c) == a.mul(&b.mul(&c))
}

/// `rho(AB) = rho(A) rho(B)` in the symbolic representation.
pub fn homomorphism(a: &Terms, b: &Terms, p: u64) -> bool {
    let r = rho_p_symbolic(p).unwrap();
    let (a, b) = (diff_op(a), diff_op(b));
    r.op(&a.mul(&b)).unwrap() == r.op(&a).unwrap().mul(&r.op(&b).unwrap())
}

/// Every monomial of the determinant is a monomial in `xi^p, eta^p`.
pub fn det_in_pth_powers(a: &Terms, p: u64) -> bool {
    let r = rho_p_symbolic(p).unwrap();
    let d = r.op(&diff_op(a)).unwrap().det();
    let p = p as i32;
    let ok = d.terms().all(|(e, _)| e[0] % p == 0 && e[1] % p == 0);
    ok
}

fn ratfunc(num: &[i64], roots: &[(i64, u32)]) -> RatFunc<DiffVar> {
    let den: BTreeMap<Rat, u32> = roots.iter().map(|&(r, m)| (int(r), m)).collect();
    RatFunc::new(upoly(num), den)
}

fn eval_direct(num: &[i64], roots: &[(i64, u32)], v: &Rat) -> Rat {
    let mut d = int(1);
    for &(r, m) in roots {
        for _ in 0..m {
            d *= v - int(r);
        }
    }
    upoly(num).eval(v) / d
}

/// Sum, product and shift agree with pointwise evaluation of the defining fractions.
pub fn ratfunc_arith(na: &[i64], ra: &[(i64, u32)], nb: &[i64], rb: &[(i64, u32)], shift: i64) -> bool {
    let (a, b) = (ratfunc(na, ra), ratfunc(nb, rb));
    let (s, m, sh) = (a.add(&b), a.mul(&b), a.shift(shift));
    // Probe points avoid integer poles.
    [rat(1, 3), rat(-7, 2), rat(11, 5)].iter().all(|v| {
        let (x, y) = (eval_direct(na, ra, v), eval_direct(nb, rb, v));
        s.eval(v) == Some(&x + &y) && m.eval(v) == Some(&x * &y) && sh.eval(v) == Some(eval_direct(na, ra, &(v + int(shift))))
    })
}

pub fn partial_fractions_recombine(num: &[i64], roots: &[(i64, u32)]) -> bool {
    let f = ratfunc(num, roots);
    partial_fractions(&f).recombine() == f
}

/// `exp(log(1 + R)) = 1 + R` to the given order.
pub fn exp_log(r: &[(i64, i64)], order: usize) -> bool {
    let mut c = vec![int(1)];
    c.extend(r.iter().map(|&(a, b)| rat(a, b.max(1))));
    let s = TSeries::with_order(c, order);
    series_log(&s).and_then(|l| series_exp(&l)).is_ok_and(|e| e == s)
}

fn next_byte(seed: &[u8], i: &mut usize) -> u8 {
    let b = seed.get(*i).copied().unwrap_or(0);
    *i += 1;
    b
}

/// Random expression tree over the differential dialect.
pub fn expr(seed: &[u8]) -> OpExpr {
    fn go(seed: &[u8], i: &mut usize, depth: u32) -> OpExpr {
        let k = next_byte(seed, i);
        if depth == 0 || k % 7 < 2 {
            return match next_byte(seed, i) % 5 {
                0 => parse("x", Dialect::Diff, 1).unwrap(),
                1 => parse("dx", Dialect::Diff, 1).unwrap(),
                2 => parse("theta", Dialect::Diff, 1).unwrap(),
                3 => parse("t", Dialect::Diff, 1).unwrap(),
                _ => {
                let n = next_byte(seed, i) as i64 % 9;
                OpExpr::Num(rat(n, 1 + next_byte(seed, i) as i64 % 4))
            }
            };
        }
        match k % 7 {
            2 => OpExpr::Add(Box::new(go(seed, i, depth - 1)), Box::new(go(seed, i, depth - 1))),
            3 => OpExpr::Sub(Box::new(go(seed, i, depth - 1)), Box::new(go(seed, i, depth - 1))),
            4 => OpExpr::Neg(Box::new(go(seed, i, depth - 1))),
            5 => {
                let e = int(next_byte(seed, i) as i64 % 3);
                OpExpr::Pow(Box::new(go(seed, i, depth - 1)), e)
            }
            _ => OpExpr::Mul(Box::new(go(seed, i, depth - 1)), Box::new(go(seed, i, depth - 1))),
        }
    }
    go(seed, &mut 0, 3)
}

pub fn print_parse_roundtrip(e: &OpExpr) -> bool {
    parse(&print(e), Dialect::Diff, 1).is_ok_and(|back| back == *e)
}

/// `a^3` and `a*a*a` elaborate to the same operator series.
pub fn cube_matches_product(e: &OpExpr) -> bool {
    let cube = OpExpr::Pow(Box::new(e.clone()), int(3));
    let prod = OpExpr::Mul(Box::new(OpExpr::Mul(Box::new(e.clone()), Box::new(e.clone()))), Box::new(e.clone()));
    match (elaborate_diff(&cube, 1), elaborate_diff(&prod, 1)) {
        (Ok(a), Ok(b)) => a == b,
        (Err(_), Err(_)) => true,
        _ => false,
    }
}
