//! Text front end for polynomial rules.
//!
//! ```text
//! rule   := "m=" INT ";" "d=" INT ";" "f=" expr
//! expr   := term ("+" term)*
//! term   := INT | INT "*" factor | factor
//! factor := VAR | VAR "^" INT        VAR := "x" INT
//! ```
//!
//! Whitespace is ignored between tokens. As an extension, a term may be a
//! product of several factors (`2*x1*x3^2`), which makes rules such as
//! `x1*x3 + x2` expressible.

use std::fmt;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::RuleTable;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::poly::UniPoly;
use crate::zmod::Modulus;

/// `coefficient * prod x_var^exp`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct Term {
    pub coefficient: u64,
    /// `(variable index, exponent)`, variable indices are 1-based.
    pub factors: Vec<(usize, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct RuleExpression {
    pub modulus: Modulus,
    pub diameter: usize,
    pub terms: Vec<Term>,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected `{}`", c as char)))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        for &c in kw.as_bytes() {
            self.expect(c)?;
        }
        Ok(())
    }

    fn int(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::parse(start, "integer out of range"))
    }
}

impl RuleExpression {
    pub fn parse(source: &str) -> Result<Self> {
        let mut lx = Lexer {
            src: source.as_bytes(),
            pos: 0,
        };
        lx.keyword("m=")?;
        let m_pos = lx.pos;
        let m = lx.int()?;
        let modulus = u32::try_from(m)
            .map_err(|_| Error::InvalidModulus(m))
            .and_then(Modulus::new)
            .map_err(|e| Error::parse(m_pos, e.to_string()))?;
        lx.expect(b';')?;
        lx.keyword("d=")?;
        let diameter = lx.int()? as usize;
        lx.expect(b';')?;
        lx.keyword("f=")?;

        let mut terms = vec![Self::term(&mut lx, diameter)?];
        while lx.eat(b'+') {
            terms.push(Self::term(&mut lx, diameter)?);
        }
        if lx.peek().is_some() {
            return Err(Error::parse(lx.pos, "unexpected trailing input"));
        }
        Ok(RuleExpression {
            modulus,
            diameter,
            terms,
        })
    }

    fn term(lx: &mut Lexer<'_>, diameter: usize) -> Result<Term> {
        let mut coefficient = 1;
        let mut factors = Vec::new();
        if lx.peek().is_some_and(|c| c.is_ascii_digit()) {
            coefficient = lx.int()?;
            if !lx.eat(b'*') {
                return Ok(Term { coefficient, factors });
            }
        }
        loop {
            factors.push(Self::factor(lx, diameter)?);
            if !lx.eat(b'*') {
                break;
            }
        }
        Ok(Term { coefficient, factors })
    }

    fn factor(lx: &mut Lexer<'_>, diameter: usize) -> Result<(usize, u64)> {
        let pos = lx.pos;
        lx.expect(b'x')?;
        let var = lx.int()? as usize;
        if var == 0 || var > diameter + 1 {
            return Err(Error::parse(
                pos,
                format!("variable x{var} outside x1..x{}", diameter + 1),
            ));
        }
        let exp = if lx.eat(b'^') { lx.int()? } else { 1 };
        Ok((var, exp))
    }

    /// Evaluates the expression on one window (`0^0 = 1`).
    pub fn eval(&self, window: &[u32]) -> u32 {
        let m = self.modulus;
        self.terms.iter().fold(0, |acc, t| {
            let c = (t.coefficient % m.get() as u64) as u32;
            let v = t
                .factors
                .iter()
                .fold(c, |p, &(var, e)| m.mul(p, m.pow(window[var - 1], e)));
            m.add(acc, v)
        })
    }

    pub fn to_table(&self, caps: &Caps) -> Result<RuleTable> {
        RuleTable::from_fn_with_caps(self.modulus, self.diameter, caps, |w| self.eval(w))
    }

    /// The exponent as written at position `j`, when `x_j` occurs in exactly
    /// one term, that term is `c * x_j^q` with `q >= 1` and `c != 0 mod m`.
    pub fn raw_exponent(&self, j: usize) -> Option<u64> {
        let mut found = None;
        for t in &self.terms {
            if t.factors.iter().any(|&(v, e)| v == j && e > 0) {
                if found.is_some() {
                    return None;
                }
                found = Some(t);
            }
        }
        let t = found?;
        match t.factors.as_slice() {
            [(_, e)] if t.coefficient % self.modulus.get() as u64 != 0 => Some(*e),
            _ => None,
        }
    }

    /// Sum of the terms mentioning `x_j` as a polynomial in `x_j`, provided
    /// each of those terms mentions no other variable.
    pub fn univariate_polynomial(&self, j: usize) -> Option<UniPoly> {
        let mut coeffs: Vec<u64> = Vec::new();
        let mut any = false;
        for t in &self.terms {
            if !t.factors.iter().any(|&(v, _)| v == j) {
                continue;
            }
            if t.factors.iter().any(|&(v, _)| v != j) {
                return None;
            }
            any = true;
            let e: u64 = t.factors.iter().map(|&(_, e)| e).sum();
            let e = usize::try_from(e).ok().filter(|&e| e <= 1 << 16)?;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, 0);
            }
            let m = self.modulus.get() as u64;
            coeffs[e] = (coeffs[e] + t.coefficient % m) % m;
        }
        any.then(|| UniPoly::new(self.modulus, coeffs))
    }
}

impl fmt::Display for RuleExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={}; d={}; f=", self.modulus, self.diameter)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            let mut parts = Vec::new();
            if t.coefficient != 1 || t.factors.is_empty() {
                parts.push(t.coefficient.to_string());
            }
            for &(v, e) in &t.factors {
                parts.push(if e == 1 { format!("x{v}") } else { format!("x{v}^{e}") });
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}
