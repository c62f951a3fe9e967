use num_traits::{Signed, ToPrimitive};

use super::{Dialect, OpExpr, OpLangError, Symbol};
use crate::exact::{int, DiffVar, QAlgebra, QFrac, QRoot, QVar, Rat, RatFunc, Ring, TSeries, UPoly};
use crate::opalg::{
    DiffOpSeries, NormalOp, QDiffOpSeries, TorusCoeff, TorusElem, VAR_A, VAR_B, VAR_LAMBDA, VAR_Q,
};

/// Result of elaborating an expression in its dialect.
#[derive(Clone, Debug)]
pub enum Elaborated {
    Diff(DiffOpSeries),
    QDiff(QDiffOpSeries),
    Torus(TorusElem),
}

fn small(r: &Rat) -> Result<i64, OpLangError> {
    r.to_integer().to_i64().ok_or(OpLangError::ExponentRange)
}

fn eval<R: QAlgebra>(
    e: &OpExpr,
    sym_pow: &dyn Fn(Symbol, i64, &Rat) -> Result<R, OpLangError>,
) -> Result<R, OpLangError> {
    Ok(match e {
        OpExpr::Num(r) => R::from_rat(r),
        OpExpr::Sym(s) => sym_pow(*s, 1, &int(1))?,
        OpExpr::Neg(a) => eval(a, sym_pow)?.neg(),
        OpExpr::Add(a, b) => eval(a, sym_pow)?.add(&eval(b, sym_pow)?),
        OpExpr::Sub(a, b) => eval(a, sym_pow)?.sub(&eval(b, sym_pow)?),
        OpExpr::Mul(a, b) => eval(a, sym_pow)?.mul(&eval(b, sym_pow)?),
        OpExpr::Pow(a, r) => match a.as_ref() {
            OpExpr::Sym(s) => {
                let k = if r.is_integer() { small(r)? } else { 0 };
                sym_pow(*s, k, r)?
            }
            OpExpr::Num(c) => {
                let k = small(r)?;
                let v = Ring::pow(c, k.unsigned_abs());
                R::from_rat(&if k < 0 { Ring::inv(&v).ok_or(OpLangError::ExponentRange)? } else { v })
            }
            other => {
                if r.is_negative() || !r.is_integer() {
                    return Err(OpLangError::ExponentRange);
                }
                eval(other, sym_pow)?.pow(small(r)? as u64)
            }
        },
    })
}

fn u_power<K: Ring>(sym: Symbol, r: &Rat, ramification: u32) -> Result<TSeries<K>, OpLangError> {
    let deg = if sym == Symbol::T { r * int(ramification as i64) } else { r.clone() };
    if deg.is_negative() || !deg.is_integer() {
        return Err(OpLangError::ExponentRange);
    }
    Ok(TSeries::monomial(K::one(), small(&deg)? as usize))
}

fn wrong(sym: Symbol, dialect: Dialect) -> OpLangError {
    OpLangError::WrongDialect { pos: 0, name: sym.name().into(), dialect }
}

/// Normal form of a differential-dialect expression, exact in `u`.
pub fn elaborate_diff(e: &OpExpr, ramification: u32) -> Result<DiffOpSeries, OpLangError> {
    type Op = NormalOp<DiffVar>;
    let f = |s: Symbol, k: i64, r: &Rat| -> Result<DiffOpSeries, OpLangError> {
        let op = match s {
            Symbol::X => Op::x_pow(k),
            Symbol::Theta if k >= 0 => {
                Op::from_func(RatFunc::from_poly(UPoly::monomial(int(1), k as usize)))
            }
            // dx^k = x^{-k} θ(θ-1)...(θ-k+1)
            Symbol::Dx if k >= 0 => {
                let roots: Vec<Rat> = (0..k).map(int).collect();
                Op::term(-k, RatFunc::from_poly(UPoly::from_roots(&roots)))
            }
            Symbol::Theta | Symbol::Dx => return Err(OpLangError::ExponentRange),
            Symbol::T | Symbol::U => return u_power(s, r, ramification),
            _ => return Err(wrong(s, Dialect::Diff)),
        };
        Ok(TSeries::constant(op))
    };
    eval(e, &f)
}

/// Normal form of a q-dialect expression, exact in `u`.
pub fn elaborate_q(e: &OpExpr, ramification: u32) -> Result<QDiffOpSeries, OpLangError> {
    type Op = NormalOp<QVar>;
    let f = |s: Symbol, k: i64, r: &Rat| -> Result<QDiffOpSeries, OpLangError> {
        let op = match s {
            Symbol::X => Op::x_pow(k),
            Symbol::Y if k >= 0 => {
                Op::from_func(RatFunc::from_poly(UPoly::monomial(QFrac::one(), k as usize)))
            }
            Symbol::Y => {
                let roots = vec![QRoot::Zero; k.unsigned_abs() as usize];
                Op::from_func(RatFunc::inv_roots(&roots))
            }
            Symbol::Q => Op::scalar(QFrac::q_pow(k)),
            Symbol::T | Symbol::U => return u_power(s, r, ramification),
            _ => return Err(wrong(s, Dialect::QDiff)),
        };
        Ok(TSeries::constant(op))
    };
    eval(e, &f)
}

/// Torus element with coefficients in `q, a, b, λ`.
pub fn elaborate_torus(e: &OpExpr) -> Result<TorusElem, OpLangError> {
    let f = |s: Symbol, k: i64, _r: &Rat| -> Result<TorusElem, OpLangError> {
        let k32 = k as i32;
        Ok(match s {
            Symbol::X => TorusElem::x_pow(k),
            Symbol::Y => TorusElem::y_pow(k),
            Symbol::Q => TorusElem::scalar(TorusCoeff::var_pow(VAR_Q, k32)),
            Symbol::A => TorusElem::scalar(TorusCoeff::var_pow(VAR_A, k32)),
            Symbol::B => TorusElem::scalar(TorusCoeff::var_pow(VAR_B, k32)),
            Symbol::Lambda => TorusElem::scalar(TorusCoeff::var_pow(VAR_LAMBDA, k32)),
            _ => return Err(wrong(s, Dialect::Torus)),
        })
    };
    eval(e, &f)
}

pub fn elaborate(e: &OpExpr, dialect: Dialect, ramification: u32) -> Result<Elaborated, OpLangError> {
    Ok(match dialect {
        Dialect::Diff => Elaborated::Diff(elaborate_diff(e, ramification)?),
        Dialect::QDiff => Elaborated::QDiff(elaborate_q(e, ramification)?),
        Dialect::Torus => Elaborated::Torus(elaborate_torus(e)?),
    })
}
