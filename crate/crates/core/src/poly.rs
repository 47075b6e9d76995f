//! Univariate polynomials over Z_m.
//!
//! Field-only operations (gcd, Frobenius reduction, interpolation) check
//! that the modulus is prime and fail with [`Error::NotPrime`] otherwise.

use std::fmt;
use std::str::FromStr;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::zmod::{kempner, unit_inverse, Modulus, Residue};

/// Polynomial `c_0 + c_1 x + ... + c_n x^n` with `c_n != 0`; the zero
/// polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct UniPoly {
    modulus: Modulus,
    coeffs: Vec<Residue>,
}

/// The values of a function Z_m -> Z_m, indexed by input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct FunctionTable {
    modulus: Modulus,
    values: Vec<Residue>,
}

impl FunctionTable {
    pub fn new(modulus: Modulus, values: Vec<Residue>) -> Result<Self> {
        if values.len() != modulus.get() as usize {
            return Err(Error::InvalidArgument(format!(
                "function table over Z_{modulus} needs {modulus} values, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|&&v| !modulus.contains(v)) {
            return Err(Error::InvalidArgument(format!("table value {v} not in Z_{modulus}")));
        }
        Ok(FunctionTable { modulus, values })
    }

    pub fn from_fn(modulus: Modulus, f: impl Fn(Residue) -> Residue) -> Self {
        let values = modulus.residues().map(|x| f(x) % modulus.get()).collect();
        FunctionTable { modulus, values }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn values(&self) -> &[Residue] {
        &self.values
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.values.len()];
        self.values
            .iter()
            .all(|&v| !std::mem::replace(&mut seen[v as usize], true))
    }
}

impl UniPoly {
    /// Builds a polynomial from coefficients `c_0, c_1, ...`, reducing them
    /// mod m and trimming trailing zeros.
    pub fn new(modulus: Modulus, coeffs: impl IntoIterator<Item = u64>) -> Self {
        let m = modulus.get() as u64;
        let coeffs = coeffs.into_iter().map(|c| (c % m) as Residue).collect();
        Self::from_residues(modulus, coeffs)
    }

    fn from_residues(modulus: Modulus, mut coeffs: Vec<Residue>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UniPoly { modulus, coeffs }
    }

    pub fn zero(modulus: Modulus) -> Self {
        UniPoly {
            modulus,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(modulus: Modulus, c: u64) -> Self {
        Self::new(modulus, [c])
    }

    /// `c x^e`.
    pub fn monomial(modulus: Modulus, c: u64, e: usize) -> Self {
        let mut coeffs = vec![0u64; e + 1];
        coeffs[e] = c;
        Self::new(modulus, coeffs)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn coeffs(&self) -> &[Residue] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> Residue {
        self.coeffs.last().copied().unwrap_or(0)
    }

    fn check_same_ring(&self, other: &UniPoly) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.get(),
                right: other.modulus.get(),
            });
        }
        Ok(())
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: Residue) -> Residue {
        let m = self.modulus;
        let x = x % m.get();
        self.coeffs.iter().rev().fold(0, |acc, &c| m.add(m.mul(acc, x), c))
    }

    pub fn table(&self) -> FunctionTable {
        FunctionTable::from_fn(self.modulus, |x| self.evaluate(x))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> UniPoly {
        let m = self.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| m.mul((i as u64 % m.get() as u64) as Residue, c))
            .collect();
        Self::from_residues(m, coeffs)
    }

    pub fn add(&self, other: &UniPoly) -> Result<UniPoly> {
        self.check_same_ring(other)?;
        let m = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                m.add(
                    self.coeffs.get(i).copied().unwrap_or(0),
                    other.coeffs.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Ok(Self::from_residues(m, coeffs))
    }

    pub fn sub(&self, other: &UniPoly) -> Result<UniPoly> {
        self.check_same_ring(other)?;
        let m = self.modulus;
        let neg = other.coeffs.iter().map(|&c| m.neg(c)).collect();
        self.add(&Self::from_residues(m, neg))
    }

    pub fn mul(&self, other: &UniPoly) -> Result<UniPoly> {
        self.check_same_ring(other)?;
        let m = self.modulus;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(m));
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = m.add(out[i + j], m.mul(a, b));
            }
        }
        Ok(Self::from_residues(m, out))
    }

    fn require_prime(&self) -> Result<()> {
        if self.modulus.is_prime() {
            Ok(())
        } else {
            Err(Error::NotPrime(self.modulus.get()))
        }
    }

    /// Scales to leading coefficient 1. Field only.
    pub fn monic(&self) -> Result<UniPoly> {
        self.require_prime()?;
        if self.is_zero() {
            return Ok(self.clone());
        }
        let m = self.modulus;
        let inv = unit_inverse(m, self.lead()).expect("nonzero element of a prime field");
        Ok(Self::from_residues(
            m,
            self.coeffs.iter().map(|&c| m.mul(c, inv)).collect(),
        ))
    }

    /// Remainder of division by a nonzero divisor. Field only.
    pub fn rem(&self, divisor: &UniPoly) -> Result<UniPoly> {
        self.check_same_ring(divisor)?;
        self.require_prime()?;
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let m = self.modulus;
        let inv = unit_inverse(m, divisor.lead()).expect("nonzero element of a prime field");
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let factor = m.mul(*r.last().unwrap(), inv);
            for (i, &c) in divisor.coeffs.iter().enumerate() {
                r[shift + i] = m.sub(r[shift + i], m.mul(factor, c));
            }
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        Ok(Self::from_residues(m, r))
    }

    /// The unique polynomial of degree `< p` inducing the same function,
    /// obtained by folding `x^e` onto `x^(e-(p-1))` while `e >= p`.
    pub fn frobenius_reduce(&self) -> Result<UniPoly> {
        self.require_prime()?;
        let m = self.modulus;
        let p = m.get() as usize;
        let mut out = vec![0; self.coeffs.len().min(p)];
        for (e, &c) in self.coeffs.iter().enumerate() {
            let mut e = e;
            while e >= p {
                e -= p - 1;
            }
            out[e] = m.add(out[e], c);
        }
        Ok(Self::from_residues(m, out))
    }

    /// `x^p - x` over Z_p.
    pub fn field_vanishing(modulus: Modulus) -> UniPoly {
        let p = modulus.get() as usize;
        let mut coeffs = vec![0u64; p + 1];
        coeffs[1] = modulus.get() as u64 - 1;
        coeffs[p] = 1;
        Self::new(modulus, coeffs)
    }
}

/// Monic gcd by the Euclidean algorithm over Z_p.
pub fn poly_gcd(a: &UniPoly, b: &UniPoly) -> Result<UniPoly> {
    a.check_same_ring(b)?;
    a.require_prime()?;
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = x.rem(&y)?;
        x = y;
        y = r;
    }
    x.monic()
}

/// Whether `p` induces a bijection of Z_m.
pub fn is_permutation_poly(p: &UniPoly) -> bool {
    p.table().is_bijective()
}

/// `deg(p) < p0 and gcd(p', x^p0 - x) = 1`, exactly as stated for prime
/// fields. Not equivalent to [`is_permutation_poly`]: `x^3` over Z_5 fails
/// this predicate yet permutes Z_5.
pub fn hermite_criterion(p: &UniPoly) -> Result<bool> {
    p.require_prime()?;
    let prime = p.modulus.get() as usize;
    let degree_ok = p.degree().is_none_or(|d| d < prime);
    let g = poly_gcd(&p.derivative(), &UniPoly::field_vanishing(p.modulus))?;
    Ok(degree_ok && g == UniPoly::constant(p.modulus, 1))
}

/// The unique polynomial of degree `< p` through every point of `t`,
/// found by Gaussian elimination on the Vandermonde system.
pub fn interpolate_prime(t: &FunctionTable) -> Result<UniPoly> {
    let m = t.modulus;
    if !m.is_prime() {
        return Err(Error::NotPrime(m.get()));
    }
    let n = m.get() as usize;
    // Augmented rows [x^0 .. x^(n-1) | t(x)].
    let mut rows: Vec<Vec<Residue>> = (0..n as Residue)
        .map(|x| {
            let mut row: Vec<Residue> = (0..n as u64).map(|e| m.pow(x, e)).collect();
            row.push(t.values[x as usize]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| rows[r][col] != 0)
            .expect("Vandermonde matrix on distinct nodes is invertible");
        rows.swap(col, pivot);
        let inv = unit_inverse(m, rows[col][col]).expect("nonzero pivot");
        for v in rows[col].iter_mut() {
            *v = m.mul(*v, inv);
        }
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != col && row[col] != 0 {
                let f = row[col];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v = m.sub(*v, m.mul(f, pv));
                }
            }
        }
    }
    Ok(UniPoly::from_residues(m, rows.into_iter().map(|row| row[n]).collect()))
}

/// Exhaustive search over all coefficient vectors of degree `< kempner(m)`
/// for a polynomial inducing `t`. Candidates are tried in lexicographic
/// order on `(c_0, c_1, ...)`, so the first hit is the smallest.
pub fn representability_search(t: &FunctionTable, caps: &Caps) -> Result<Option<UniPoly>> {
    let m = t.modulus;
    let k = kempner(m);
    let total = (m.get() as u128).pow(k);
    Caps::check("representability search space", total, caps.search_budget)?;
    let mut coeffs = vec![0 as Residue; k as usize];
    for _ in 0..total {
        let cand = UniPoly::from_residues(m, coeffs.clone());
        if m.residues().all(|x| cand.evaluate(x) == t.values[x as usize]) {
            return Ok(Some(cand));
        }
        // Increment with c_{k-1} as the least significant digit.
        for digit in coeffs.iter_mut().rev() {
            *digit += 1;
            if *digit == m.get() {
                *digit = 0;
            } else {
                break;
            }
        }
    }
    Ok(None)
}

impl fmt::Display for UniPoly {
    /// Text form `c0 + c1*x + c2*x^2 + ...`, zero terms omitted and unit
    /// coefficients elided.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}*x")?,
                (e, 1) => write!(f, "x^{e}")?,
                (e, c) => write!(f, "{c}*x^{e}")?,
            }
        }
        Ok(())
    }
}

/// Text form paired with its modulus, e.g. `"1 + 2*x^2 mod 3"`.
impl FromStr for UniPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, modulus) = s
            .rsplit_once("mod")
            .ok_or_else(|| Error::parse(s.len(), "expected `mod <m>` suffix"))?;
        let m: u32 = modulus
            .trim()
            .parse()
            .map_err(|_| Error::parse(body.len() + 3, "bad modulus"))?;
        let m = Modulus::new(m)?;
        let mut coeffs: Vec<u64> = Vec::new();
        let mut offset = 0;
        for term in body.split('+') {
            let t = term.trim();
            let pos = offset;
            offset += term.len() + 1;
            if t.is_empty() {
                return Err(Error::parse(pos, "empty term"));
            }
            let (coef, power) = match t.split_once('x') {
                None => (t, None),
                Some((c, rest)) => (c.trim_end_matches('*').trim(), Some(rest.trim())),
            };
            let c: u64 = if coef.is_empty() {
                1
            } else {
                coef.parse()
                    .map_err(|_| Error::parse(pos, format!("bad coefficient `{coef}`")))?
            };
            let e: usize = match power {
                None => 0,
                Some("") => 1,
                Some(p) => p
                    .strip_prefix('^')
                    .and_then(|p| p.trim().parse().ok())
                    .ok_or_else(|| Error::parse(pos, format!("bad exponent in `{t}`")))?,
            };
            if coeffs.len() <= e {
                coeffs.resize(e + 1, 0);
            }
            coeffs[e] = (coeffs[e] + c % m.get() as u64) % m.get() as u64;
        }
        Ok(UniPoly::new(m, coeffs))
    }
}
