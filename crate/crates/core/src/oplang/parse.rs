use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::OpLangError;
use crate::exact::{int, rat_to_string, Rat};

/// Which operator algebra an expression lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    Diff,
    QDiff,
    Torus,
}

impl FromStr for Dialect {
    type Err = OpLangError;
    fn from_str(s: &str) -> Result<Self, OpLangError> {
        match s {
            "diff" => Ok(Dialect::Diff),
            "qdiff" => Ok(Dialect::QDiff),
            "torus" => Ok(Dialect::Torus),
            _ => Err(OpLangError::UnknownDialect(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    X,
    Dx,
    Theta,
    Y,
    Q,
    T,
    U,
    Lambda,
    A,
    B,
}

impl Symbol {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "x" => Symbol::X,
            "dx" => Symbol::Dx,
            "theta" => Symbol::Theta,
            "y" => Symbol::Y,
            "q" => Symbol::Q,
            "t" => Symbol::T,
            "u" => Symbol::U,
            "lambda" => Symbol::Lambda,
            "a" => Symbol::A,
            "b" => Symbol::B,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Symbol::X => "x",
            Symbol::Dx => "dx",
            Symbol::Theta => "theta",
            Symbol::Y => "y",
            Symbol::Q => "q",
            Symbol::T => "t",
            Symbol::U => "u",
            Symbol::Lambda => "lambda",
            Symbol::A => "a",
            Symbol::B => "b",
        }
    }

    pub fn allowed_in(self, d: Dialect) -> bool {
        use Symbol::*;
        match d {
            Dialect::Diff => matches!(self, X | Dx | Theta | T | U),
            Dialect::QDiff => matches!(self, X | Y | Q | T | U),
            Dialect::Torus => matches!(self, X | Y | Q | Lambda | A | B),
        }
    }
}

/// Operator expression; products keep their written order.
#[derive(Clone, Debug, PartialEq)]
pub enum OpExpr {
    Num(Rat),
    Sym(Symbol),
    Neg(Box<OpExpr>),
    Add(Box<OpExpr>, Box<OpExpr>),
    Sub(Box<OpExpr>, Box<OpExpr>),
    Mul(Box<OpExpr>, Box<OpExpr>),
    Pow(Box<OpExpr>, Rat),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, OpLangError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((pos, t));
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((pos, Tok::Ident(s)));
        } else {
            return Err(OpLangError::Syntax { pos, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    dialect: Dialect,
    ramification: u32,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, OpLangError> {
        Err(OpLangError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), OpLangError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<OpExpr, OpLangError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = OpExpr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                acc = OpExpr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<OpExpr, OpLangError> {
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            acc = OpExpr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<OpExpr, OpLangError> {
        if self.eat(&Tok::Minus) {
            return Ok(OpExpr::Neg(Box::new(self.factor()?)));
        }
        let atom = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(atom);
        }
        let exp_pos = self.pos();
        let e = if self.eat(&Tok::LParen) {
            let neg = self.eat(&Tok::Minus);
            let r = self.rat_literal()?;
            self.expect(&Tok::RParen, "')' after exponent")?;
            if neg {
                -r
            } else {
                r
            }
        } else {
            let neg = self.eat(&Tok::Minus);
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.i += 1;
                    let r = Rat::from_integer(n);
                    if neg {
                        -r
                    } else {
                        r
                    }
                }
                _ => return self.err("expected integer exponent"),
            }
        };
        self.check_power(&atom, &e, exp_pos)?;
        Ok(OpExpr::Pow(Box::new(atom), e))
    }

    fn check_power(&self, base: &OpExpr, e: &Rat, pos: usize) -> Result<(), OpLangError> {
        let bad = |msg: String| Err(OpLangError::Power { pos, msg });
        let integral = e.is_integer();
        let nonneg = !e.is_negative();
        match base {
            OpExpr::Sym(Symbol::T) => {
                let scaled = e * int(self.ramification as i64);
                if !nonneg || !scaled.is_integer() {
                    return bad(format!(
                        "t^({}) is incompatible with ramification L = {}",
                        rat_to_string(e),
                        self.ramification
                    ));
                }
            }
            OpExpr::Sym(s @ (Symbol::X | Symbol::Y | Symbol::Q | Symbol::A | Symbol::B)) => {
                if !integral {
                    return bad(format!("fractional power of {}", s.name()));
                }
            }
            OpExpr::Sym(s) => {
                if !integral || !nonneg {
                    return bad(format!("{} admits only nonnegative integer powers", s.name()));
                }
            }
            OpExpr::Num(c) => {
                if !integral || (!nonneg && c.is_zero()) {
                    return bad("bad power of a number".into());
                }
            }
            _ => {
                if !integral || !nonneg {
                    return bad("compound expressions admit only nonnegative integer powers".into());
                }
            }
        }
        Ok(())
    }

    fn rat_literal(&mut self) -> Result<Rat, OpLangError> {
        let Some(Tok::Int(n)) = self.peek().cloned() else {
            return self.err("expected number");
        };
        self.i += 1;
        if self.eat(&Tok::Slash) {
            let Some(Tok::Int(d)) = self.peek().cloned() else {
                return self.err("expected denominator");
            };
            if d.is_zero() {
                return self.err("zero denominator");
            }
            self.i += 1;
            Ok(Rat::new(n, d))
        } else {
            Ok(Rat::from_integer(n))
        }
    }

    fn atom(&mut self) -> Result<OpExpr, OpLangError> {
        match self.peek().cloned() {
            Some(Tok::Int(_)) => Ok(OpExpr::Num(self.rat_literal()?)),
            Some(Tok::Ident(name)) => {
                let pos = self.pos();
                let Some(s) = Symbol::from_name(&name) else {
                    return Err(OpLangError::UnknownSymbol { pos, name });
                };
                if !s.allowed_in(self.dialect) {
                    return Err(OpLangError::WrongDialect { pos, name, dialect: self.dialect });
                }
                self.i += 1;
                Ok(OpExpr::Sym(s))
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(_) => self.err("expected number, symbol or '('"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an operator string; `ramification` is the `L` in `t = u^L`.
pub fn parse(src: &str, dialect: Dialect, ramification: u32) -> Result<OpExpr, OpLangError> {
    if ramification == 0 {
        return Err(OpLangError::Ramification);
    }
    let toks = lex(src)?;
    let mut p = Parser { toks, i: 0, end: src.len(), dialect, ramification };
    let e = p.expr()?;
    if p.i < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

fn prec(e: &OpExpr) -> u8 {
    match e {
        OpExpr::Add(..) | OpExpr::Sub(..) => 0,
        OpExpr::Mul(..) => 1,
        OpExpr::Neg(..) | OpExpr::Pow(..) => 2,
        OpExpr::Num(_) | OpExpr::Sym(_) => 3,
    }
}

fn wrap(e: &OpExpr, min: u8) -> String {
    if prec(e) >= min {
        print(e)
    } else {
        format!("({})", print(e))
    }
}

/// Prints an expression so that parsing the output yields the same tree.
pub fn print(e: &OpExpr) -> String {
    match e {
        OpExpr::Num(r) => {
            if r.is_negative() {
                format!("(-{})", rat_to_string(&-r))
            } else {
                rat_to_string(r)
            }
        }
        OpExpr::Sym(s) => s.name().to_string(),
        OpExpr::Neg(a) => format!("-{}", wrap(a, 2)),
        OpExpr::Add(a, b) => format!("{} + {}", print(a), wrap(b, 1)),
        OpExpr::Sub(a, b) => format!("{} - {}", print(a), wrap(b, 1)),
        OpExpr::Mul(a, b) => format!("{}*{}", wrap(a, 1), wrap(b, 2)),
        OpExpr::Pow(a, r) => {
            let exp = if r.is_integer() && !r.is_negative() {
                rat_to_string(r)
            } else {
                format!("({})", rat_to_string(r))
            };
            format!("{}^{}", wrap(a, 3), exp)
        }
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}
