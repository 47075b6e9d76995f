//! Exact arithmetic over Z_m and the number-theoretic helpers the criteria need.

use num_integer::Integer;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A letter of the alphabet Z_m, always kept in `[0, m)`.
pub type Residue = u32;

/// Largest supported modulus.
pub const MAX_MODULUS: u32 = 1 << 16;

/// The ring Z_m for `2 <= m <= 2^16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(try_from = "u32", into = "u32")]
pub struct Modulus(u32);

impl TryFrom<u32> for Modulus {
    type Error = Error;

    fn try_from(m: u32) -> Result<Self> {
        Modulus::new(m)
    }
}

impl From<Modulus> for u32 {
    fn from(m: Modulus) -> u32 {
        m.0
    }
}

impl std::fmt::Display for Modulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Modulus {
    pub fn new(m: u32) -> Result<Self> {
        if (2..=MAX_MODULUS).contains(&m) {
            Ok(Modulus(m))
        } else {
            Err(Error::InvalidModulus(m as u64))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn contains(self, x: u32) -> bool {
        x < self.0
    }

    /// Reduces any signed integer into `[0, m)`.
    #[inline]
    pub fn reduce(self, v: i64) -> Residue {
        v.rem_euclid(self.0 as i64) as Residue
    }

    #[inline]
    pub fn add(self, a: Residue, b: Residue) -> Residue {
        ((a as u64 + b as u64) % self.0 as u64) as Residue
    }

    #[inline]
    pub fn sub(self, a: Residue, b: Residue) -> Residue {
        ((a as u64 + self.0 as u64 - (b % self.0) as u64) % self.0 as u64) as Residue
    }

    #[inline]
    pub fn neg(self, a: Residue) -> Residue {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: Residue, b: Residue) -> Residue {
        ((a as u64 * b as u64) % self.0 as u64) as Residue
    }

    /// `x^e mod m` by square-and-multiply, with `0^0 = 1`.
    pub fn pow(self, x: Residue, mut e: u64) -> Residue {
        let m = self.0 as u64;
        let mut base = x as u64 % m;
        let mut acc = 1 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        acc as Residue
    }

    pub fn is_prime(self) -> bool {
        is_prime(self.0)
    }

    pub fn is_unit(self, a: Residue) -> bool {
        a.gcd(&self.0) == 1
    }

    pub fn residues(self) -> std::ops::Range<Residue> {
        0..self.0
    }
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while (k as u64) * (k as u64) <= n as u64 {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Prime factorization by trial division as `(prime, exponent)` pairs.
pub fn factorize(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2u32;
    while (p as u64) * (p as u64) <= n as u64 {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient.
pub fn totient(m: Modulus) -> u32 {
    factorize(m.get())
        .into_iter()
        .fold(1, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1))
}

/// Smallest `k >= 1` with `m | k!`.
pub fn kempner(m: Modulus) -> u32 {
    let mut fact = 1u64 % m.get() as u64;
    let mut k = 1u32;
    loop {
        fact = fact * k as u64 % m.get() as u64;
        if fact == 0 {
            return k;
        }
        k += 1;
    }
}

/// Multiplicative inverse of `a`, if `a` is a unit of Z_m.
pub fn unit_inverse(m: Modulus, a: Residue) -> Option<Residue> {
    let e = (a as i64 % m.get() as i64).extended_gcd(&(m.get() as i64));
    if e.gcd == 1 {
        Some(m.reduce(e.x))
    } else {
        None
    }
}

/// Bound on exponents worth inspecting: every map `x -> a x^q` with `q >= 1`
/// is induced by some exponent `1 <= q' <= kempner(m) + totient(m)`.
pub fn exponent_search_bound(m: Modulus) -> u32 {
    kempner(m) + totient(m)
}

/// Value table of `x -> a x^q` on Z_m (raw evaluation, `0^0 = 1`).
pub fn monomial_table(m: Modulus, a: Residue, q: u64) -> Vec<Residue> {
    m.residues().map(|x| m.mul(a, m.pow(x, q))).collect()
}

/// Smallest exponent `q' >= 1` inducing the same map as `x -> a x^q`.
///
/// Falls back to `q` itself if nothing smaller is found, which only happens
/// when `q` is already below the search bound.
pub fn canonical_exponent(m: Modulus, a: Residue, q: u64) -> u32 {
    let target = monomial_table(m, a, q);
    let bound = exponent_search_bound(m) as u64;
    (1..=bound.min(q.max(1)))
        .find(|&cand| monomial_table(m, a, cand) == target)
        .unwrap_or(q.min(u32::MAX as u64)) as u32
}

/// The map `x -> a x^q` on Z_m with the exponent stored in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct MonomialMap {
    pub coefficient: Residue,
    pub exponent: u32,
    pub modulus: Modulus,
}

impl MonomialMap {
    /// Builds `a x^q`; rejects `q = 0`, which is a constant rather than a
    /// variable occurrence.
    pub fn new(m: Modulus, a: Residue, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("monomial exponent must be >= 1".into()));
        }
        let a = a % m.get();
        Ok(MonomialMap {
            coefficient: a,
            exponent: canonical_exponent(m, a, q),
            modulus: m,
        })
    }

    #[inline]
    pub fn apply(&self, x: Residue) -> Residue {
        let m = self.modulus;
        m.mul(self.coefficient, m.pow(x, self.exponent as u64))
    }

    pub fn table(&self) -> Vec<Residue> {
        self.modulus.residues().map(|x| self.apply(x)).collect()
    }
}

/// Whether `x -> a x^q` permutes Z_m, decided from the full image table.
pub fn monomial_is_bijective(h: &MonomialMap) -> bool {
    let mut seen = vec![false; h.modulus.get() as usize];
    for y in h.table() {
        if std::mem::replace(&mut seen[y as usize], true) {
            return false;
        }
    }
    true
}

/// All `x` with `a x^q = b` in Z_m, in increasing order.
pub fn monomial_invert(h: &MonomialMap, b: Residue) -> Vec<Residue> {
    let b = b % h.modulus.get();
    h.modulus.residues().filter(|&x| h.apply(x) == b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(v: u32) -> Modulus {
        Modulus::new(v).unwrap()
    }

    #[test]
    fn modulus_bounds() {
        assert!(Modulus::new(0).is_err());
        assert!(Modulus::new(1).is_err());
        assert!(Modulus::new(2).is_ok());
        assert!(Modulus::new(MAX_MODULUS).is_ok());
        assert!(Modulus::new(MAX_MODULUS + 1).is_err());
    }

    #[test]
    fn totient_examples() {
        assert_eq!(totient(m(4)), 2);
        assert_eq!(totient(m(7)), 6);
        assert_eq!(totient(m(12)), 4);
        assert_eq!(totient(m(2)), 1);
    }

    #[test]
    fn kempner_examples() {
        assert_eq!(kempner(m(3)), 3);
        assert_eq!(kempner(m(4)), 4);
        assert_eq!(kempner(m(2)), 2);
        assert_eq!(kempner(m(8)), 4);
        assert_eq!(kempner(m(9)), 6);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(unit_inverse(m(7), 3), Some(5));
        assert_eq!(unit_inverse(m(4), 2), None);
        for v in 2..30 {
            assert_eq!(unit_inverse(m(v), 1), Some(1));
        }
    }

    #[test]
    fn bijectivity_examples() {
        assert!(monomial_is_bijective(&MonomialMap::new(m(5), 1, 3).unwrap()));
        assert!(!monomial_is_bijective(&MonomialMap::new(m(4), 1, 3).unwrap()));
        assert!(!monomial_is_bijective(&MonomialMap::new(m(4), 2, 1).unwrap()));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(monomial_invert(&MonomialMap::new(m(5), 1, 3).unwrap(), 2), vec![3]);
        assert_eq!(monomial_invert(&MonomialMap::new(m(7), 1, 1).unwrap(), 4), vec![4]);
        assert_eq!(monomial_invert(&MonomialMap::new(m(5), 1, 2).unwrap(), 1), vec![1, 4]);
    }

    #[test]
    fn zero_exponent_rejected() {
        assert!(MonomialMap::new(m(5), 1, 0).is_err());
        assert_eq!(m(5).pow(0, 0), 1);
    }

    #[test]
    fn canonical_exponents() {
        assert_eq!(canonical_exponent(m(5), 1, 5), 1);
        assert_eq!(canonical_exponent(m(5), 1, 8), 4);
        assert_eq!(canonical_exponent(m(4), 1, 3), 3);
        assert_eq!(canonical_exponent(m(4), 1, 5), 3);
        assert_eq!(canonical_exponent(m(3), 1, 12), 2);
    }

    #[test]
    fn prime_field_remark_exhaustive() {
        for p in [2u32, 3, 5, 7, 11, 13] {
            let md = m(p);
            for a in 1..p {
                for q in 1..=3 * (p - 1) {
                    let h = MonomialMap::new(md, a, q as u64).unwrap();
                    assert_eq!(monomial_is_bijective(&h), q.gcd(&(p - 1)) == 1, "p={p} a={a} q={q}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn totient_counts_units(v in 2u32..400) {
            let md = m(v);
            let direct = (1..=v).filter(|k| k.gcd(&v) == 1).count() as u32;
            let invertible = md.residues().filter(|&a| unit_inverse(md, a).is_some()).count() as u32;
            prop_assert_eq!(totient(md), direct);
            prop_assert_eq!(totient(md), invertible);
        }

        #[test]
        fn canonicalization_preserves_function(v in 2u32..64, a in 1u32..64, q in 1u64..200) {
            let md = m(v);
            let a = a % v;
            prop_assume!(a != 0);
            let h = MonomialMap::new(md, a, q).unwrap();
            prop_assert!(h.exponent as u64 <= q);
            prop_assert!(h.exponent <= exponent_search_bound(md));
            prop_assert_eq!(h.table(), monomial_table(md, a, q));
        }

        #[test]
        fn bijective_means_unique_preimages(v in 2u32..40, a in 1u32..40, q in 1u64..30) {
            let md = m(v);
            let a = a % v;
            prop_assume!(a != 0);
            let h = MonomialMap::new(md, a, q).unwrap();
            if monomial_is_bijective(&h) {
                for b in md.residues() {
                    prop_assert_eq!(monomial_invert(&h, b).len(), 1);
                }
            }
        }

        #[test]
        fn inverse_is_inverse(v in 2u32..1000, a in 0u32..1000) {
            let md = m(v);
            let a = a % v;
            if let Some(b) = unit_inverse(md, a) {
                prop_assert_eq!(md.mul(a, b), 1 % v);
            } else {
                prop_assert!(a.gcd(&v) != 1);
            }
        }
    }
}
