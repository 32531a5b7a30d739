//! Precedence-climbing parser for polynomial expressions.
//!
//! Grammar: variables `x1 .. xN`, integer and `p/q` literals, binary
//! `+ - *`, unary `-`, `^` with a nonnegative integer exponent, parentheses.
//! `^` binds tightest (chains group to the left), then unary minus, then
//! `*`, then `+ -`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::circuit::{Circuit, CircuitBuilder};
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Num(text[start..i].parse().unwrap()), start));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let name = &text[start..i];
                let index = name
                    .strip_prefix('x')
                    .filter(|d| {
                        !d.is_empty()
                            && d.bytes().all(|b| b.is_ascii_digit())
                            && !d.starts_with('0')
                    })
                    .and_then(|d| d.parse::<usize>().ok());
                match index {
                    Some(k) => out.push((Tok::Var(k - 1), start)),
                    None => {
                        return Err(Error::UnknownVariable {
                            name: name.to_string(),
                            pos: start,
                        })
                    }
                }
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
    max_vars: Option<usize>,
    b: CircuitBuilder,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self, min_prec: u8) -> Result<usize> {
        let mut lhs = self.unary()?;
        loop {
            let (prec, op) = match self.peek() {
                Some(Tok::Plus) => (1, Tok::Plus),
                Some(Tok::Minus) => (1, Tok::Minus),
                Some(Tok::Star) => (2, Tok::Star),
                _ => break,
            };
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(prec + 1)?;
            lhs = match op {
                Tok::Plus => self.b.add(lhs, rhs),
                Tok::Minus => self.b.sub(lhs, rhs),
                _ => self.b.mul(lhs, rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<usize> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let inner = self.unary()?;
            let zero = self.b.constant(Rational::zero());
            return Ok(self.b.sub(zero, inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<usize> {
        let mut base = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = match self.peek() {
                Some(Tok::Num(n)) => n.clone(),
                _ => return self.err("exponent must be a nonnegative integer literal"),
            };
            let e: u64 = match u64::try_from(&e) {
                Ok(e) => e,
                Err(_) => return self.err("exponent too large"),
            };
            self.pos += 1;
            base = self.b.pow(base, e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<usize> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    let d = match self.peek() {
                        Some(Tok::Num(d)) => d.clone(),
                        _ => return self.err("expected denominator after `/`"),
                    };
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    self.pos += 1;
                    return Ok(self.b.constant(Rational::new(n, d)));
                }
                Ok(self.b.constant(Rational::from_integer(n)))
            }
            Some(Tok::Var(i)) => {
                if let Some(max) = self.max_vars {
                    if i >= max {
                        return Err(Error::UnknownVariable {
                            name: format!("x{}", i + 1),
                            pos: self.here(),
                        });
                    }
                }
                self.pos += 1;
                Ok(self.b.input(i))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr(1)?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => self.err("expected a number, variable or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse(text: &str, n_vars: Option<usize>) -> Result<Circuit> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
        max_vars: n_vars,
        b: CircuitBuilder::new(n_vars.unwrap_or(0)),
    };
    let out = p.expr(1)?;
    if p.pos != toks.len() {
        return p.err("trailing input");
    }
    Ok(p.b.finish(out))
}

/// Parse an expression; the arity is the largest variable index used.
pub fn parse_expression(text: &str) -> Result<Circuit> {
    parse(text, None)
}

/// Parse an expression in exactly `n_vars` variables; larger indices are
/// reported as unknown variables.
pub fn parse_expression_with_arity(text: &str, n_vars: usize) -> Result<Circuit> {
    parse(text, Some(n_vars))
}
