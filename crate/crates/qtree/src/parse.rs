//! Text grammar for terms, elements and move expressions.
//!
//! ```text
//! term    := "d(" index "," int ")" | "p(" term "," term ")" | "r(" int "," term ")"
//! index   := nat | "rho(" nat "," nat ")" [ "+" nat ]
//! element := nat | term
//! expr    := nat | name | "d(" index "," int ")" | "p(" expr "," expr ")"
//!          | "r(" int "," expr ")" | "succ(" expr ")" | "pred(" expr ")"
//!          | "add(" expr "," expr ")" | "mul(" expr "," expr ")"
//! ```
//!
//! Whitespace is ignored. Parsed terms are normalized.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use crate::arith::{self, Element};
use crate::error::{ModelError, ParseError};
use crate::index::Index;
use crate::term::{RawTerm, Term};

/// Parses a term and normalizes it.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_raw_term(text).map(|r| r.normalize())
}

/// Parses a term without normalizing it.
pub fn parse_raw_term(text: &str) -> Result<RawTerm, ParseError> {
    let mut p = Parser::new(text);
    let t = p.raw_term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_element(text: &str) -> Result<Element, ParseError> {
    let mut p = Parser::new(text);
    p.skip_ws();
    let e = if p.peek().is_some_and(|c| c.is_ascii_digit()) {
        Element::Std(p.nat()?)
    } else {
        Element::NonStd(p.raw_term()?.normalize())
    };
    p.finish()?;
    Ok(e)
}

/// A move expression over the named parameters `w`, `a0` and `b0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Nat(BigUint),
    Name(String),
    Leaf(Index, BigInt),
    Pair(Box<Expr>, Box<Expr>),
    R(BigInt, Box<Expr>),
    Succ(Box<Expr>),
    Pred(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

impl Expr {
    pub fn eval(&self, env: &BTreeMap<String, Element>) -> Result<Element, ModelError> {
        let term_of = |e: &Expr| -> Result<Term, ModelError> {
            match e.eval(env)? {
                Element::NonStd(t) => Ok(t),
                Element::Std(v) => Err(ModelError::State(format!(
                    "constructor argument {v} is standard"
                ))),
            }
        };
        Ok(match self {
            Expr::Nat(v) => Element::Std(v.clone()),
            Expr::Name(n) => env
                .get(n)
                .cloned()
                .ok_or_else(|| ModelError::State(format!("unknown name {n}")))?,
            Expr::Leaf(n, m) => Element::NonStd(Term::leaf(n.clone(), m.clone())),
            Expr::Pair(l, r) => Element::NonStd(Term::pair(&term_of(l)?, &term_of(r)?)),
            Expr::R(m, b) => Element::NonStd(Term::r(m.clone(), &term_of(b)?)),
            Expr::Succ(e) => arith::succ(&e.eval(env)?),
            Expr::Pred(e) => arith::pred(&e.eval(env)?),
            Expr::Add(a, b) => arith::add(&a.eval(env)?, &b.eval(env)?),
            Expr::Mul(a, b) => arith::mul(&a.eval(env)?, &b.eval(env)?)?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Nat(v) => write!(f, "{v}"),
            Expr::Name(n) => write!(f, "{n}"),
            Expr::Leaf(n, m) => write!(f, "d({n},{m})"),
            Expr::Pair(l, r) => write!(f, "p({l},{r})"),
            Expr::R(m, b) => write!(f, "r({m},{b})"),
            Expr::Succ(e) => write!(f, "succ({e})"),
            Expr::Pred(e) => write!(f, "pred({e})"),
            Expr::Add(a, b) => write!(f, "add({a},{b})"),
            Expr::Mul(a, b) => write!(f, "mul({a},{b})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.peek().is_some() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a name");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn digits(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn nat(&mut self) -> Result<BigUint, ParseError> {
        if self.peek() == Some(b'-') {
            return self.err("expected a natural number");
        }
        let d = self.digits()?;
        Ok(d.parse::<BigUint>().expect("digit string"))
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let d = self.digits()?;
        let v: BigInt = d.parse().expect("digit string");
        Ok(if neg { -v } else { v })
    }

    fn small(&mut self, what: &str) -> Result<u32, ParseError> {
        let at = self.pos;
        let v = self.nat()?;
        v.to_u32().ok_or(ParseError {
            position: at,
            message: format!("{what} out of range"),
        })
    }

    fn index(&mut self) -> Result<Index, ParseError> {
        match self.peek() {
            Some(b'-') => self.err("leaf index must be a natural number"),
            Some(c) if c.is_ascii_digit() => {
                let at = self.pos;
                let v = self.nat()?;
                Index::nat(v).map_err(|e| ParseError {
                    position: at,
                    message: e.to_string(),
                })
            }
            _ => {
                let at = self.pos;
                let name = self.ident()?;
                if name != "rho" {
                    self.pos = at;
                    return self.err("expected a leaf index");
                }
                self.expect(b'(')?;
                let n = self.small("rho argument")?;
                self.expect(b',')?;
                let k = self.small("rho argument")?;
                self.expect(b')')?;
                let mut offset = 0u64;
                if self.peek() == Some(b'+') {
                    self.pos += 1;
                    let oat = self.pos;
                    offset = self.nat()?.to_u64().ok_or(ParseError {
                        position: oat,
                        message: "offset out of range".into(),
                    })?;
                }
                Index::past_rho(n, k, offset).map_err(|e| ParseError {
                    position: at,
                    message: e.to_string(),
                })
            }
        }
    }

    fn raw_term(&mut self) -> Result<RawTerm, ParseError> {
        let at = self.pos;
        let name = self.ident()?;
        self.expect(b'(')?;
        let t = match name.as_str() {
            "d" => {
                let n = self.index()?;
                self.expect(b',')?;
                let m = self.int()?;
                RawTerm::Leaf(n, m)
            }
            "p" => {
                let l = self.raw_term()?;
                self.expect(b',')?;
                let r = self.raw_term()?;
                RawTerm::Pair(Box::new(l), Box::new(r))
            }
            "r" => {
                let m = self.int()?;
                self.expect(b',')?;
                let b = self.raw_term()?;
                RawTerm::R(m, Box::new(b))
            }
            _ => {
                self.pos = at;
                return self.err(format!("unknown constructor '{name}'"));
            }
        };
        self.expect(b')')?;
        Ok(t)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Ok(Expr::Nat(self.nat()?));
        }
        let at = self.pos;
        let name = self.ident()?;
        if self.peek() != Some(b'(') {
            return Ok(Expr::Name(name));
        }
        self.pos += 1;
        let e = match name.as_str() {
            "d" => {
                let n = self.index()?;
                self.expect(b',')?;
                Expr::Leaf(n, self.int()?)
            }
            "p" | "add" | "mul" => {
                let l = Box::new(self.expr()?);
                self.expect(b',')?;
                let r = Box::new(self.expr()?);
                match name.as_str() {
                    "p" => Expr::Pair(l, r),
                    "add" => Expr::Add(l, r),
                    _ => Expr::Mul(l, r),
                }
            }
            "r" => {
                let m = self.int()?;
                self.expect(b',')?;
                Expr::R(m, Box::new(self.expr()?))
            }
            "succ" => Expr::Succ(Box::new(self.expr()?)),
            "pred" => Expr::Pred(Box::new(self.expr()?)),
            _ => {
                self.pos = at;
                return self.err(format!("unknown function '{name}'"));
            }
        };
        self.expect(b')')?;
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_round_trip() {
        for text in ["d(0,0)", "d(3,-7)", "p(d(1,0),d(2,5))", "r(-2,p(d(1,0),d(0,3)))"] {
            assert_eq!(parse_term(text).unwrap().to_string(), text);
        }
    }

    #[test]
    fn parsing_normalizes() {
        assert_eq!(
            parse_term("p(r(-1,d(1,0)),d(1,0))").unwrap(),
            parse_term("r(0,d(1,0))").unwrap()
        );
        assert_eq!(
            parse_term(" p ( d( 1 , 0 ) ,\n d(2, +5) ) ").unwrap(),
            Term::pair(&Term::d(1, 0), &Term::d(2, 5))
        );
    }

    #[test]
    fn rejects_bad_input() {
        let e = parse_term("d(-1,0)").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(parse_term("q(1,2)").is_err());
        assert!(parse_term("d(1,0) x").is_err());
        assert!(parse_element("-3").is_err());
    }

    #[test]
    fn symbolic_indices() {
        let t = parse_term("d(rho(2,3)+1,0)").unwrap();
        assert_eq!(t.to_string(), "d(rho(2,3)+1,0)");
        assert_eq!(parse_term("d(rho(1,2)+1,0)").unwrap(), Term::d(10_066_329_601, 0));
    }

    #[test]
    fn elements_and_expressions() {
        assert_eq!(parse_element("42").unwrap(), Element::std(42));
        let mut env = BTreeMap::new();
        env.insert("a0".to_string(), Element::NonStd(Term::d(1, 0)));
        let e = parse_expr("add(succ(a0), p(a0, d(2,0)))").unwrap();
        let v = e.eval(&env).unwrap();
        assert_eq!(
            v,
            Element::NonStd(Term::pair(
                &Term::d(1, 1),
                &Term::pair(&Term::d(1, 0), &Term::d(2, 0))
            ))
        );
        assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }
}
