//! Text syntax for polynomials and differential forms.
//!
//! ```text
//! expr    := ['+' | '-'] term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := primary ['^' ['-'] integer]
//! primary := integer | variable | 'd' variable | '(' expr ')'
//! ```
//!
//! Products are exterior products, so `x*dx*dy` is `x dx∧dy`. A name that is
//! not a variable but is `d` followed by a variable name denotes that
//! differential. Negative exponents are only allowed on monomial units.

use std::sync::Arc;

use num_bigint::BigInt;

use super::form::DifferentialForm;
use crate::error::{Error, Result};
use crate::exactalg::{LaurentPolynomial, Ring};

const MAX_DEPTH: usize = 64;
const MAX_EXPONENT: u64 = 4096;
const MAX_POLY_EXPONENT: u64 = 64;
const MAX_TERMS: usize = 20_000;
const MAX_MONOMIAL_EXPONENT: u64 = 1_000_000;
const MAX_COEFF_BITS: u64 = 1 << 16;

pub fn parse_form(ring: &Arc<Ring>, src: &str) -> Result<DifferentialForm> {
    let mut p = Parser { ring, src: src.as_bytes(), pos: 0, depth: 0 };
    let w = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(w)
}

/// Parses a degree-0 expression.
pub fn parse_polynomial(ring: &Arc<Ring>, src: &str) -> Result<LaurentPolynomial> {
    parse_form(ring, src)?
        .as_function()
        .ok_or(Error::Parse { pos: 0, msg: "expected a function, found a form of positive degree".into() })
}

struct Parser<'a> {
    ring: &'a Arc<Ring>,
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
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

    fn guard(&self, w: &DifferentialForm) -> Result<()> {
        if w.num_terms() > MAX_TERMS {
            return Err(self.err("expression too large"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<DifferentialForm> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        let mut neg = false;
        match self.peek() {
            Some(b'-') => {
                neg = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if neg { -&first } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
            self.guard(&acc)?;
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<DifferentialForm> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = acc.wedge(&rhs)?;
            self.guard(&acc)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DifferentialForm> {
        let base = self.primary()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        let e = self.integer()?;
        let e: u64 = e.try_into().map_err(|_| Error::Parse { pos: start, msg: "exponent too large".into() })?;
        let f = base.as_function().ok_or(Error::Parse { pos: start, msg: "only functions can be raised to powers".into() })?;
        let f = if neg {
            f.unit_inverse().ok_or(Error::Parse { pos: start, msg: "negative power of a non-unit".into() })?
        } else {
            f
        };
        let too_large = || Error::Parse { pos: start, msg: "exponent too large".into() };
        if f.num_terms() > 1 {
            if e > MAX_POLY_EXPONENT {
                return Err(too_large());
            }
            let mut acc = LaurentPolynomial::one(self.ring);
            for _ in 0..e {
                acc = &acc * &f;
                self.guard(&DifferentialForm::function(&acc))?;
            }
            return Ok(DifferentialForm::function(&acc));
        }
        let (max_exp, bits) = f
            .terms()
            .map(|(m, c)| (m.0.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0), c.bits()))
            .next()
            .unwrap_or((0, 0));
        if e > MAX_EXPONENT || max_exp.saturating_mul(e) > MAX_MONOMIAL_EXPONENT || bits.saturating_mul(e) > MAX_COEFF_BITS {
            return Err(too_large());
        }
        Ok(DifferentialForm::function(&f.pow(e)))
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        s.parse().map_err(|_| Error::Parse { pos: start, msg: "bad integer".into() })
    }

    fn primary(&mut self) -> Result<DifferentialForm> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(w)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(DifferentialForm::constant(self.ring, n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
                if let Some(i) = self.ring.var_index(name) {
                    return Ok(DifferentialForm::function(&LaurentPolynomial::var(self.ring, i)));
                }
                if let Some(i) = name.strip_prefix('d').and_then(|v| self.ring.var_index(v)) {
                    return Ok(DifferentialForm::dx(self.ring, i));
                }
                Err(Error::Parse { pos: start, msg: format!("unknown symbol '{name}'") })
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Variable;

    fn ring() -> Arc<Ring> {
        Ring::integers(vec![Variable::polynomial("x"), Variable::laurent("y")])
    }

    #[test]
    fn round_trips_and_products() {
        let r = ring();
        let w = parse_form(&r, "3*x^2*dx*dy - y^-1*dy").unwrap();
        assert_eq!(w.to_string(), parse_form(&r, &w.to_string()).unwrap().to_string());
        let a = parse_form(&r, "dx*dy").unwrap();
        let b = parse_form(&r, "-(dy*dx)").unwrap();
        assert_eq!(a, b);
        assert!(parse_form(&r, "dx*dx").unwrap().is_zero());
        let f = parse_polynomial(&r, "(x+1)^2 - 2*x").unwrap();
        assert_eq!(f, parse_polynomial(&r, "x^2 + 1").unwrap());
    }

    #[test]
    fn errors_report_positions() {
        let r = ring();
        assert!(matches!(parse_form(&r, "x + z"), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_form(&r, "x^-1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_form(&r, "dx^2"), Err(Error::Parse { .. })));
        assert!(matches!(parse_form(&r, "(x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_polynomial(&r, "x*dx"), Err(Error::Parse { .. })));
        assert!(matches!(parse_form(&r, "(x+y)^100"), Err(Error::Parse { .. })));
    }
}
