//! Operator-expression language: parsing, printing and elaboration to normal form.

mod elaborate;
mod parse;

pub use elaborate::{elaborate, elaborate_diff, elaborate_q, elaborate_torus, Elaborated};
pub use parse::{parse, print, Dialect, OpExpr, Symbol};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpLangError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol '{name}' at offset {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("symbol '{name}' at offset {pos} is not available in the {dialect:?} dialect")]
    WrongDialect { pos: usize, name: String, dialect: Dialect },
    #[error("invalid power at offset {pos}: {msg}")]
    Power { pos: usize, msg: String },
    #[error("exponent out of range")]
    ExponentRange,
    #[error("ramification must be positive")]
    Ramification,
    #[error("unknown dialect '{0}'")]
    UnknownDialect(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, DiffVar, RatFunc, Ring, UPoly};
    use crate::opalg::NormalOp;

    fn sym(s: Symbol) -> Box<OpExpr> {
        Box::new(OpExpr::Sym(s))
    }

    #[test]
    fn parses_product_of_sum() {
        let e = parse("theta*(theta+1)", Dialect::Diff, 1).unwrap();
        let want = OpExpr::Mul(
            sym(Symbol::Theta),
            Box::new(OpExpr::Add(sym(Symbol::Theta), Box::new(OpExpr::Num(int(1))))),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse("dx^(-1)", Dialect::Diff, 1), Err(OpLangError::Power { .. })));
        assert!(matches!(parse("x^(1/2)", Dialect::Diff, 1), Err(OpLangError::Power { .. })));
        assert!(matches!(parse("t^(1/2)", Dialect::Diff, 1), Err(OpLangError::Power { .. })));
        assert!(parse("t^(1/2)", Dialect::Diff, 2).is_ok());
        assert!(matches!(parse("y", Dialect::Diff, 1), Err(OpLangError::WrongDialect { .. })));
        assert!(matches!(parse("theta", Dialect::QDiff, 1), Err(OpLangError::WrongDialect { .. })));
        assert!(matches!(parse("z", Dialect::Diff, 1), Err(OpLangError::UnknownSymbol { .. })));
        assert!(matches!(parse("x*(x", Dialect::Diff, 1), Err(OpLangError::Syntax { pos: 4, .. })));
        assert!(parse("2 x", Dialect::Diff, 1).is_err());
    }

    #[test]
    fn weyl_relation() {
        let a = elaborate_diff(&parse("dx*x", Dialect::Diff, 1).unwrap(), 1).unwrap();
        let b = elaborate_diff(&parse("x*dx", Dialect::Diff, 1).unwrap(), 1).unwrap();
        let theta = NormalOp::<DiffVar>::symbol();
        assert_eq!(b.coeff(0), theta);
        assert_eq!(a.coeff(0), theta.add(&NormalOp::one()));
        assert!(a.sub(&b).is_one());
    }

    #[test]
    fn ramified_t() {
        let e = elaborate_diff(&parse("t^(1/2)*x + t", Dialect::Diff, 2).unwrap(), 2).unwrap();
        assert_eq!(e.coeff(1), NormalOp::x_pow(1));
        assert!(e.coeff(2).is_one());
    }

    #[test]
    fn dx_squared_normal_form() {
        let e = elaborate_diff(&parse("dx^2", Dialect::Diff, 1).unwrap(), 1).unwrap();
        let f = RatFunc::from_poly(UPoly::new(vec![int(0), int(-1), int(1)]));
        assert_eq!(e.coeff(0), NormalOp::term(-2, f));
    }
}
