//! Expression grammar shared by the CLI and the JSON formats:
//! integers, tower variables, `+ - * / ^` with integer exponents and
//! parentheses. Expressions are evaluated directly into canonical elements.

use num_bigint::BigInt;

use super::{Elem, Field, Poly};
use crate::error::{Error, Result};

struct Parser<'a> {
    field: &'a Field,
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
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

    fn expr(&mut self) -> Result<Elem> {
        let f = self.field;
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = f.add(&acc, &self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = f.sub(&acc, &self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Elem> {
        let f = self.field;
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = f.mul(&acc, &self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = f.div(&acc, &self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Elem> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.field.neg(&self.unary()?))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Elem> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            _ => false,
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let e: i64 = digits
            .parse()
            .map_err(|_| self.err("expected integer exponent"))?;
        self.field.pow(&base, if negative { -e } else { e })
    }

    fn atom(&mut self) -> Result<Elem> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = digits.parse().map_err(|_| self.err("bad integer"))?;
                Ok(self.field.from_bigint(&n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                self.field
                    .var(name)
                    .ok_or_else(|| Error::UnknownVariable(name.to_string()))
            }
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

pub(super) fn parse(field: &Field, text: &str) -> Result<Elem> {
    let mut p = Parser {
        field,
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Binary `+`/`-` at parenthesis depth zero (a leading sign is unary).
pub(crate) fn has_top_level_sum(s: &str) -> bool {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && i > 0 => return true,
            _ => {}
        }
    }
    false
}

fn has_top_level_product(s: &str) -> bool {
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' | '/' if depth == 0 => return true,
            _ => {}
        }
    }
    false
}

/// `coeff * mono` with `1` and `-1` coefficients elided.
pub(crate) fn scaled_term(field: &Field, c: &Elem, mono: &str) -> String {
    if mono.is_empty() {
        return field.format(c);
    }
    if field.is_one(c) {
        return mono.to_string();
    }
    if field.is_one(&field.neg(c)) {
        return format!("-{mono}");
    }
    let cs = field.format(c);
    if has_top_level_sum(&cs) {
        format!("({cs})*{mono}")
    } else {
        format!("{cs}*{mono}")
    }
}

/// Join terms with `+`, folding a leading `-` into the separator.
pub(crate) fn join_terms(terms: &[String]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = terms[0].clone();
    for t in &terms[1..] {
        if !t.starts_with('-') {
            out.push('+');
        }
        out.push_str(t);
    }
    out
}

fn format_poly(base: &Field, var: &str, p: &Poly) -> String {
    let terms: Vec<String> = p
        .coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !base.is_zero(c))
        .map(|(k, c)| {
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            scaled_term(base, c, &mono)
        })
        .collect();
    join_terms(&terms)
}

pub(super) fn format(field: &Field, a: &Elem) -> String {
    match a {
        Elem::Q(q) => {
            if q.denom() == &BigInt::from(1) {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        }
        Elem::Fp(r) => r.to_string(),
        Elem::Rf(r) => {
            let base = field.base().expect("rational function field");
            let var = field.var_name().unwrap();
            let num = format_poly(base, var, &r.num);
            if r.den.is_one(base) {
                return num;
            }
            let den = format_poly(base, var, &r.den);
            let num = if has_top_level_sum(&num) {
                format!("({num})")
            } else {
                num
            };
            let den = if has_top_level_sum(&den) || has_top_level_product(&den) {
                format!("({den})")
            } else {
                den
            };
            format!("{num}/{den}")
        }
    }
}
