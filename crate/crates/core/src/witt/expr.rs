//! Small expression language for Witt vectors over `F_p[vars]`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | atom
//! atom  := integer | '[' polynomial ']' | 'V' '(' expr ')' | 'F' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `[a]` is the Teichmüller lift of a polynomial written in the form grammar.
//! `V` is truncated back to the working length.

use std::sync::Arc;

use num_bigint::BigInt;

use super::vector::WittVector;
use crate::derham::parse_polynomial;
use crate::error::{Error, Result};
use crate::exactalg::{Ring, Variable};

const MAX_DEPTH: usize = 64;
const MAX_TOP_WEIGHT: u64 = 128;
const MAX_TERMS: usize = 2_000;
const MAX_EXPONENT: i64 = 10_000;

/// Identifiers occurring inside Teichmüller brackets, in order of first use.
pub fn expression_variables(src: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut depth = 0usize;
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'[' => depth += 1,
            b']' => depth = depth.saturating_sub(1),
            c if depth > 0 && (c.is_ascii_alphabetic() || c == b'_') => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let name = &src[start..i];
                // `dt` is a differential, never a variable of its own
                if !out.iter().any(|n| n == name) && !(name.starts_with('d') && name.len() > 1) {
                    out.push(name.to_string());
                }
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    out
}

/// Evaluates `src` in `W_r(F_p[vars])`, where the variables are those used in the expression.
pub fn eval_witt_expr(src: &str, p: u32, r: usize) -> Result<WittVector> {
    let vars = expression_variables(src);
    let ring = Ring::new(vars.iter().map(|v| Variable::polynomial(v)).collect(), Some(BigInt::from(p)));
    eval_witt_expr_in(src, p, r, &ring)
}

pub fn eval_witt_expr_in(src: &str, p: u32, r: usize, ring: &Arc<Ring>) -> Result<WittVector> {
    if r == 0 || !crate::exactalg::is_prime(p) {
        return Err(Error::InvalidJob(format!("need a prime p and r ≥ 1, got p = {p}, r = {r}")));
    }
    if (p as u64).checked_pow(r as u32 - 1).is_none_or(|b| b > MAX_TOP_WEIGHT) {
        return Err(Error::InvalidJob(format!("p^(r-1) must be at most {MAX_TOP_WEIGHT}")));
    }
    let mut parser = Parser { src, pos: 0, p, r, ring, depth: 0 };
    let w = parser.expr()?;
    parser.skip_ws();
    if parser.pos != src.len() {
        return Err(parser.err("unexpected trailing input"));
    }
    Ok(w)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    p: u32,
    r: usize,
    ring: &'a Arc<Ring>,
    depth: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() != Some(c) {
            return Err(self.err(&format!("expected '{c}'")));
        }
        self.pos += 1;
        Ok(())
    }

    fn guard(&self, w: WittVector) -> Result<WittVector> {
        let terms: usize = w.coords().iter().map(|c| c.num_terms()).sum();
        let exp = w.coords().iter().flat_map(|c| c.terms().flat_map(|(m, _)| m.0.iter().map(|e| e.abs()))).max().unwrap_or(0);
        if terms > MAX_TERMS || exp > MAX_EXPONENT / self.p as i64 {
            return Err(self.err("intermediate result too large"));
        }
        Ok(w)
    }

    fn expr(&mut self) -> Result<WittVector> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.guard(acc.add(&rhs)?)?;
                }
                Some('-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.guard(acc.sub(&rhs)?)?;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<WittVector> {
        let mut acc = self.unary()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = self.guard(acc.mul(&rhs)?)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<WittVector> {
        if self.peek() == Some('-') {
            self.pos += 1;
            self.depth += 1;
            if self.depth > MAX_DEPTH {
                return Err(self.err("nesting too deep"));
            }
            let w = self.unary()?.neg();
            self.depth -= 1;
            return Ok(w);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<WittVector> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let w = self.expr()?;
                self.expect(')')?;
                Ok(w)
            }
            Some('[') => {
                self.pos += 1;
                let start = self.pos;
                let end = self.src[start..].find(']').map(|i| start + i).ok_or_else(|| self.err("unclosed '['"))?;
                let a = parse_polynomial(self.ring, &self.src[start..end]).map_err(|e| match e {
                    Error::Parse { pos, msg } => Error::Parse { pos: start + pos, msg },
                    other => other,
                })?;
                self.pos = end + 1;
                self.guard(WittVector::teichmuller(self.p, self.r, &a))
            }
            Some(c @ ('V' | 'F')) => {
                self.pos += 1;
                self.expect('(')?;
                let w = self.expr()?;
                self.expect(')')?;
                if c == 'V' {
                    Ok(w.verschiebung_truncated())
                } else {
                    self.guard(w.frobenius()?)
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let len = self.src[start..].bytes().take_while(u8::is_ascii_digit).count();
                self.pos += len;
                if len > 1000 {
                    return Err(Error::Parse { pos: start, msg: "integer too long".into() });
                }
                let n: BigInt = self.src[start..self.pos].parse().expect("digits");
                Ok(WittVector::from_integer(self.p, self.r, self.ring, &n))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::LaurentPolynomial;

    #[test]
    fn documented_examples() {
        let w = eval_witt_expr("[1]+[1]", 2, 2).unwrap();
        assert_eq!(w.to_string(), "(0, 1)");
        let w = eval_witt_expr("V(F([t]))", 3, 3).unwrap();
        let t = LaurentPolynomial::var(w.ring(), 0);
        assert_eq!(w, WittVector::teichmuller(3, 3, &t).zmul(&BigInt::from(3)));
        assert!(eval_witt_expr("0", 5, 4).unwrap().is_zero());
    }

    #[test]
    fn errors() {
        assert!(matches!(eval_witt_expr("[1", 2, 2), Err(Error::Parse { .. })));
        assert!(matches!(eval_witt_expr("V(1", 2, 2), Err(Error::Parse { .. })));
        assert!(matches!(eval_witt_expr("[t] + ", 2, 2), Err(Error::Parse { pos: 6, .. })));
        assert!(matches!(eval_witt_expr("1", 4, 2), Err(Error::InvalidJob(_))));
        assert_eq!(expression_variables("[x*y] + V([x^2])"), vec!["x", "y"]);
    }
}
