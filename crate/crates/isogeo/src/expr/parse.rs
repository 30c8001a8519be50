//! Hand-rolled recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term  (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?          -- right-assoc, exponent may be signed
//! atom   := number | symbol | func '(' expr ')' | '(' expr ')'
//! ```

use super::{Expr, Func};
use crate::error::{Error, Result};

pub fn parse(src: &str, chart: &[&str; 4], params: &[&str]) -> Result<Expr> {
    let mut p = Parser {
        src,
        bytes: src.as_bytes(),
        pos: 0,
        chart,
        params,
    };
    p.skip_ws();
    if p.pos == p.bytes.len() {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    chart: &'a [&'a str; 4],
    params: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            let inner = self.factor()?;
            Ok(Expr::Neg(Box::new(inner)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.factor()?;
            Ok(Expr::Pow(Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.symbol(),
            Some(_) => Err(self.err("expected a number, symbol or `(`")),
            None => Err(self.err("unexpected end of expression")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac_start = self.pos;
            while self
                .bytes
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_digit())
            {
                self.pos += 1;
            }
            if self.pos == frac_start && start + 1 == self.pos {
                return Err(self.err("expected digits around `.`"));
            }
        }
        if matches!(self.bytes.get(self.pos), Some(b'e') | Some(b'E')) {
            // Only consume the exponent if digits actually follow; `2e` with
            // no digits is malformed rather than `2 * e`.
            let mut p = self.pos + 1;
            if matches!(self.bytes.get(p), Some(b'+') | Some(b'-')) {
                p += 1;
            }
            if self.bytes.get(p).is_some_and(|b| b.is_ascii_digit()) {
                self.pos = p;
                while self
                    .bytes
                    .get(self.pos)
                    .is_some_and(|b| b.is_ascii_digit())
                {
                    self.pos += 1;
                }
            }
        }
        let text = &self.src[start..self.pos];
        let v: f64 = text
            .parse()
            .map_err(|_| self.err(&format!("malformed number `{}`", text)))?;
        if !v.is_finite() {
            return Err(self.err(&format!("number `{}` overflows f64", text)));
        }
        Ok(Expr::Num(v))
    }

    fn symbol(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if self.peek() == Some(b'(') {
            let func = Func::from_name(name)
                .ok_or_else(|| self.err(&format!("unknown function `{}`", name)))?;
            self.pos += 1; // consume '('
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)` after function argument"));
            }
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if let Some(idx) = self.chart.iter().position(|c| *c == name) {
            return Ok(Expr::coord(name, idx));
        }
        if self.params.contains(&name) {
            return Ok(Expr::param(name));
        }
        Err(Error::UnknownSymbol(name.to_string()))
    }
}
