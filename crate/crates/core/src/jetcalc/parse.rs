//! Recursive-descent parser for the expression grammar used in structure
//! files and on the command line:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' ['-'] integer)?
//! primary := number | 'x' | 'y' | 'z' | name | func '(' expr ')' | '(' expr ')'
//! func    := 'sin' | 'cos' | 'exp'
//! ```
//!
//! `name` is accepted only when it is bound by the caller (see
//! [`parse_expression_with`]).

use std::collections::HashMap;
use std::sync::Arc;

use super::expr::{Expr, ScalarField};
use super::{ParseError, ParseErrorKind};

pub fn parse_expression(text: &str) -> Result<ScalarField, ParseError> {
    parse_expression_with(text, &HashMap::new())
}

/// Parses `text`, substituting each bound identifier by its field.
pub fn parse_expression_with(
    text: &str,
    bindings: &HashMap<String, ScalarField>,
) -> Result<ScalarField, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        bindings,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(ParseErrorKind::UnexpectedChar(p.src[p.pos] as char)));
    }
    Ok(ScalarField::from_expr(e))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    bindings: &'a HashMap<String, ScalarField>,
}

impl Parser<'_> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            position: self.pos,
        }
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
        match self.peek() {
            Some(found) if found == c => {
                self.pos += 1;
                Ok(())
            }
            Some(found) => Err(self.error(ParseErrorKind::Expected {
                expected: c as char,
                found: Some(found as char),
            })),
            None => Err(self.error(ParseErrorKind::Expected {
                expected: c as char,
                found: None,
            })),
        }
    }

    fn expr(&mut self) -> Result<Arc<Expr>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Arc::new(Expr::Add(lhs, self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Arc::new(Expr::Sub(lhs, self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Arc<Expr>, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Arc::new(Expr::Mul(lhs, self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Arc::new(Expr::Div(lhs, self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Arc<Expr>, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Arc::new(Expr::Neg(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Arc<Expr>, ParseError> {
        let base = self.primary()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if matches!(self.src.get(self.pos), Some(b'.') | Some(b'e') | Some(b'E')) {
            return Err(ParseError {
                kind: ParseErrorKind::NonIntegerExponent,
                position: start,
            });
        }
        let n: i32 = text.parse().map_err(|_| ParseError {
            kind: ParseErrorKind::NonIntegerExponent,
            position: start,
        })?;
        Ok(Arc::new(Expr::Pow(base, n)))
    }

    fn primary(&mut self) -> Result<Arc<Expr>, ParseError> {
        match self.peek() {
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(self.error(ParseErrorKind::UnexpectedChar(c as char))),
        }
    }

    fn number(&mut self) -> Result<Arc<Expr>, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| ParseError {
            kind: ParseErrorKind::BadNumber(text.to_string()),
            position: start,
        })?;
        Ok(Arc::new(Expr::Const(value)))
    }

    fn identifier(&mut self) -> Result<Arc<Expr>, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "x" => return Ok(Arc::new(Expr::Var(0))),
            "y" => return Ok(Arc::new(Expr::Var(1))),
            "z" => return Ok(Arc::new(Expr::Var(2))),
            "sin" | "cos" | "exp" => {
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                return Ok(Arc::new(match name {
                    "sin" => Expr::Sin(arg),
                    "cos" => Expr::Cos(arg),
                    _ => Expr::Exp(arg),
                }));
            }
            _ => {}
        }
        match self.bindings.get(name) {
            Some(field) => Ok(field.expr().clone()),
            None => Err(ParseError {
                kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
                position: start,
            }),
        }
    }
}
