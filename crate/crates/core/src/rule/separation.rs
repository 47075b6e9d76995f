//! Detection of separated structure `f = a_j x_j^q_j + pi(rest)` in a rule table.
//!
//! Positions are 1-based throughout, matching window coordinates
//! `x_1 .. x_{d+1}`. Leftmost and rightmost positions are the extreme
//! essential positions of the table.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{decode_window, RuleExpression, RuleTable};
use crate::poly::{FunctionTable, UniPoly};
use crate::zmod::{exponent_search_bound, monomial_table, Modulus, Residue};

/// A map `Z_m^k -> Z_m` over a subset of window positions, tabulated in
/// mixed radix with the first listed position most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct ResidualMap {
    pub modulus: Modulus,
    pub positions: Vec<usize>,
    pub table: Vec<Residue>,
}

impl ResidualMap {
    /// Restriction of `rule` to `positions`, all other coordinates held at
    /// 0 (callers only pass sets that cover every coordinate the rule still
    /// depends on once the remaining ones are fixed).
    fn restrict(rule: &RuleTable, positions: &[usize]) -> Self {
        let m = rule.modulus();
        let size = (m.get() as usize).pow(positions.len() as u32);
        let mut args = vec![0; positions.len()];
        let table = (0..size)
            .map(|idx| {
                decode_window(m, idx, &mut args);
                let window_idx: usize = positions
                    .iter()
                    .zip(&args)
                    .map(|(&p, &a)| a as usize * rule.stride(p))
                    .sum();
                rule.at(window_idx)
            })
            .collect();
        ResidualMap {
            modulus: m,
            positions: positions.to_vec(),
            table,
        }
    }

    pub fn eval(&self, args: &[Residue]) -> Residue {
        let m = self.modulus.get() as usize;
        self.table[args.iter().fold(0, |acc, &a| acc * m + a as usize)]
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|&v| v == self.table[0])
    }

    /// Every value is taken exactly `m^(k-1)` times, `k >= 1`.
    pub fn is_permutation_map(&self) -> bool {
        if self.positions.is_empty() {
            return false;
        }
        let m = self.modulus.get() as usize;
        let mut counts = vec![0usize; m];
        for &v in &self.table {
            counts[v as usize] += 1;
        }
        let expected = self.table.len() / m;
        counts.iter().all(|&c| c == expected)
    }
}

/// A position at which the rule splits off a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct SeparatedPosition {
    pub position: usize,
    pub coefficient: Residue,
    /// Smallest exponent inducing the extracted monomial function.
    pub exponent: u32,
    /// Exponent as written in the source expression; equals `exponent` for
    /// table-given rules.
    pub raw_exponent: u64,
    /// `f` with `x_j = 0`, over the other essential positions.
    pub residual: ResidualMap,
}

/// Context-independent difference `f(.., x, ..) - f(.., 0, ..)` at a position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct Component {
    pub position: usize,
    pub function: FunctionTable,
    /// The polynomial as written in the source expression, when it induces
    /// `function`.
    pub written: Option<UniPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct SeparationClass {
    pub essential: Vec<usize>,
    pub separated: Vec<SeparatedPosition>,
    /// Additive univariate components, present wherever `f` splits as
    /// `g(x_j) + rest` even if `g` is not a monomial.
    pub components: Vec<Component>,
    pub lr_separated: bool,
    pub totally_separated: bool,
    pub shift_like: bool,
    pub leftmost: Option<usize>,
    pub rightmost: Option<usize>,
    /// `f(0, ..., 0)`.
    pub constant: Residue,
}

impl SeparationClass {
    pub fn separated_at(&self, j: usize) -> Option<&SeparatedPosition> {
        self.separated.iter().find(|s| s.position == j)
    }

    pub fn component_at(&self, j: usize) -> Option<&FunctionTable> {
        self.components.iter().find(|c| c.position == j).map(|c| &c.function)
    }

    /// Leftmost and rightmost separated positions of an LR-separated rule.
    pub fn ends(&self) -> Option<(&SeparatedPosition, &SeparatedPosition)> {
        if !self.lr_separated {
            return None;
        }
        Some((self.separated_at(self.leftmost?)?, self.separated_at(self.rightmost?)?))
    }

    /// Records the exponents as written (`(position, exponent)` pairs) where
    /// the written monomial induces the extracted function.
    pub fn with_exponent_hints(mut self, hints: &[(usize, u64)]) -> Self {
        for sep in &mut self.separated {
            if let Some(&(_, e)) = hints.iter().find(|(p, _)| *p == sep.position) {
                let m = sep.residual.modulus;
                if e > 0
                    && monomial_table(m, sep.coefficient, e) == monomial_table(m, sep.coefficient, sep.exponent as u64)
                {
                    sep.raw_exponent = e;
                    if e <= 1 << 16 {
                        if let Some(c) = self.components.iter_mut().find(|c| c.position == sep.position) {
                            c.written = Some(UniPoly::monomial(m, sep.coefficient as u64, e as usize));
                        }
                    }
                }
            }
        }
        self
    }

    /// Attaches the exponents and univariate polynomials written in `expr`.
    pub fn with_raw_exponents(self, expr: &RuleExpression) -> Self {
        let hints: Vec<(usize, u64)> = self
            .essential
            .iter()
            .filter_map(|&j| expr.raw_exponent(j).map(|e| (j, e)))
            .collect();
        let mut class = self.with_exponent_hints(&hints);
        for comp in &mut class.components {
            if let Some(p) = expr.univariate_polynomial(comp.position) {
                let m = comp.function.modulus();
                let induced: Vec<Residue> = m.residues().map(|x| m.sub(p.evaluate(x), p.evaluate(0))).collect();
                if induced == comp.function.values() {
                    comp.written = Some(p);
                }
            }
        }
        class
    }
}

/// Indices of windows whose digit at `j` is 0.
fn contexts(rule: &RuleTable, j: usize) -> impl Iterator<Item = usize> + '_ {
    let m = rule.modulus().get() as usize;
    let stride = rule.stride(j);
    (0..rule.entries().len()).filter(move |idx| (idx / stride).is_multiple_of(m))
}

/// Positions `j` for which two windows differing only at `j` map to
/// different values.
pub fn essential_positions(rule: &RuleTable) -> Vec<usize> {
    let m = rule.modulus().get() as usize;
    (1..=rule.arity())
        .filter(|&j| {
            let stride = rule.stride(j);
            contexts(rule, j).any(|base| (1..m).any(|x| rule.at(base + x * stride) != rule.at(base)))
        })
        .collect()
}

/// `g(x) = f(.., x, ..) - f(.., 0, ..)` when it does not depend on the
/// other coordinates.
pub fn additive_component(rule: &RuleTable, j: usize) -> Option<FunctionTable> {
    if j == 0 || j > rule.arity() {
        return None;
    }
    let m = rule.modulus();
    let stride = rule.stride(j);
    let g: Vec<Residue> = m
        .residues()
        .map(|x| m.sub(rule.at(x as usize * stride), rule.at(0)))
        .collect();
    let independent = contexts(rule, j).all(|base| {
        m.residues()
            .all(|x| m.sub(rule.at(base + x as usize * stride), rule.at(base)) == g[x as usize])
    });
    independent.then(|| FunctionTable::new(m, g).expect("values reduced mod m"))
}

/// Splits `f = a x_j^q + pi(rest)` if possible, with `a != 0`, the smallest
/// `q >= 1`, and `pi` over the remaining essential positions.
pub fn extract_monomial_at(rule: &RuleTable, j: usize) -> Option<SeparatedPosition> {
    let g = additive_component(rule, j)?;
    let m = rule.modulus();
    // a * 1^q = a, so the coefficient is forced.
    let a = g.values()[1];
    if a == 0 {
        return None;
    }
    let q = (1..=exponent_search_bound(m)).find(|&q| monomial_table(m, a, q as u64) == g.values())?;
    let rest: Vec<usize> = essential_positions(rule).into_iter().filter(|&p| p != j).collect();
    Some(SeparatedPosition {
        position: j,
        coefficient: a,
        exponent: q,
        raw_exponent: q as u64,
        residual: ResidualMap::restrict(rule, &rest),
    })
}

pub fn classify(rule: &RuleTable) -> SeparationClass {
    let essential = essential_positions(rule);
    let separated: Vec<SeparatedPosition> = essential.iter().filter_map(|&j| extract_monomial_at(rule, j)).collect();
    let components = essential
        .iter()
        .filter_map(|&j| {
            additive_component(rule, j).map(|function| Component {
                position: j,
                function,
                written: None,
            })
        })
        .collect();
    let leftmost = essential.first().copied();
    let rightmost = essential.last().copied();
    let is_sep = |p: Option<usize>| p.is_some_and(|p| separated.iter().any(|s| s.position == p));
    let lr_separated = is_sep(leftmost) && is_sep(rightmost);
    let shift_like = lr_separated && leftmost == rightmost;
    let totally_separated = !essential.is_empty() && separated.len() == essential.len();
    SeparationClass {
        constant: rule.at(0),
        essential,
        separated,
        components,
        lr_separated,
        totally_separated,
        shift_like,
        leftmost,
        rightmost,
    }
}

/// The middle map `pi(x_{l+1}, .., x_{r-1})` of an LR-separated rule, with
/// the additive constant folded in. Empty position list when `r <= l + 1`.
pub fn interior_map(rule: &RuleTable, class: &SeparationClass) -> Option<ResidualMap> {
    if !class.lr_separated {
        return None;
    }
    let (l, r) = (class.leftmost?, class.rightmost?);
    let interior: Vec<usize> = (l + 1..r).collect();
    Some(ResidualMap::restrict(rule, &interior))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use proptest::prelude::*;

    fn rule(src: &str) -> RuleTable {
        RuleExpression::parse(src).unwrap().to_table(&Caps::default()).unwrap()
    }

    #[test]
    fn essential_examples() {
        assert_eq!(essential_positions(&rule("m=7; d=2; f=x1^4+3*x2")), vec![1, 2]);
        assert!(essential_positions(&rule("m=7; d=2; f=3")).is_empty());
        assert_eq!(essential_positions(&rule("m=4; d=2; f=x1^2+x2+x3^2")), vec![1, 2, 3]);
        // x^2 + x vanishes identically mod 2
        assert!(essential_positions(&rule("m=2; d=1; f=x1^2+x1")).is_empty());
    }

    #[test]
    fn extraction_examples() {
        let r = rule("m=4; d=2; f=x1^2+x2+x3^2");
        let s = extract_monomial_at(&r, 1).unwrap();
        assert_eq!((s.coefficient, s.exponent), (1, 2));
        assert_eq!(s.residual.positions, vec![2, 3]);
        for b in 0..4 {
            for c in 0..4 {
                assert_eq!(s.residual.eval(&[b, c]), (b + c * c) % 4);
            }
        }

        let r = rule("m=7; d=2; f=x1^4+3*x2");
        let s = extract_monomial_at(&r, 2).unwrap();
        assert_eq!((s.coefficient, s.exponent), (3, 1));
        assert_eq!(s.residual.positions, vec![1]);
        for a in 0..7u32 {
            assert_eq!(s.residual.eval(&[a]), a.pow(4) % 7);
        }

        let r = rule("m=3; d=1; f=x1*x2");
        assert!(extract_monomial_at(&r, 1).is_none());
    }

    #[test]
    fn classify_examples() {
        let c = classify(&rule("m=4; d=2; f=x1^2+x2+x3^2"));
        assert!(c.lr_separated && c.totally_separated && !c.shift_like);
        assert_eq!((c.leftmost, c.rightmost), (Some(1), Some(3)));
        let (l, r) = c.ends().unwrap();
        assert_eq!((l.exponent, r.exponent), (2, 2));

        let c = classify(&rule("m=5; d=2; f=2*x2^3"));
        assert!(c.shift_like && c.lr_separated);
        assert_eq!((c.leftmost, c.rightmost), (Some(2), Some(2)));

        let c = classify(&rule("m=3; d=2; f=x1*x3+x2"));
        assert_eq!(c.separated.iter().map(|s| s.position).collect::<Vec<_>>(), vec![2]);
        assert!(!c.lr_separated && !c.totally_separated && !c.shift_like);

        let c = classify(&rule("m=3; d=2; f=1"));
        assert!(!c.lr_separated && !c.totally_separated);
        assert_eq!(c.leftmost, None);
        assert_eq!(c.constant, 1);
    }

    #[test]
    fn non_monomial_component() {
        // x^3 + 2x over Z_5 splits additively but is not a monomial function
        let r = rule("m=5; d=1; f=x1^3+2*x1+x2");
        let c = classify(&r);
        assert!(c.separated_at(1).is_none());
        assert_eq!(c.component_at(1).unwrap().values(), &[0, 3, 2, 3, 2]);
        assert!(c.separated_at(2).is_some());
    }

    #[test]
    fn raw_exponents_from_expression() {
        let e = RuleExpression::parse("m=5; d=0; f=x1^9").unwrap();
        let c = classify(&e.to_table(&Caps::default()).unwrap());
        assert_eq!(c.separated[0].exponent, 1);
        let c = c.with_raw_exponents(&e);
        assert_eq!(c.separated[0].raw_exponent, 9);
    }

    #[test]
    fn interior_examples() {
        let r = rule("m=3; d=2; f=x1^2+2*x2^2+2+x3");
        let c = classify(&r);
        let pi = interior_map(&r, &c).unwrap();
        assert_eq!(pi.positions, vec![2]);
        assert_eq!(pi.table, vec![2, 1, 1]);
        let r = rule("m=7; d=2; f=x1^4+3*x2");
        let pi = interior_map(&r, &classify(&r)).unwrap();
        assert!(pi.positions.is_empty());
        assert!(!pi.is_permutation_map());
    }

    fn arb_rule() -> impl Strategy<Value = RuleTable> {
        (2u32..5, 0usize..3).prop_flat_map(|(mv, d)| {
            let size = (mv as usize).pow(d as u32 + 1);
            proptest::collection::vec(0..mv, size)
                .prop_map(move |t| RuleTable::new(Modulus::new(mv).unwrap(), d, t).unwrap())
        })
    }

    fn arb_separated_rule() -> impl Strategy<Value = RuleTable> {
        (prop_oneof![Just(3u32), Just(4), Just(5)], 0usize..3, 1u64..9, 1u32..5).prop_flat_map(|(mv, d, q, a)| {
            let rest = (mv as usize).pow(d as u32);
            proptest::collection::vec(0..mv, rest).prop_map(move |pi| {
                let md = Modulus::new(mv).unwrap();
                let a = a % mv;
                let a = if a == 0 { 1 } else { a };
                RuleTable::from_fn(md, d, |w| {
                    let idx = w[1..].iter().fold(0usize, |acc, &x| acc * mv as usize + x as usize);
                    md.add(md.mul(a, md.pow(w[0], q)), pi[idx])
                })
                .unwrap()
            })
        })
    }

    fn reconstructs(rule: &RuleTable, s: &SeparatedPosition) -> bool {
        let m = rule.modulus();
        let mut w = vec![0; rule.arity()];
        (0..rule.entries().len()).all(|idx| {
            decode_window(m, idx, &mut w);
            let rest: Vec<Residue> = s.residual.positions.iter().map(|&p| w[p - 1]).collect();
            let v = m.add(
                m.mul(s.coefficient, m.pow(w[s.position - 1], s.exponent as u64)),
                s.residual.eval(&rest),
            );
            v == rule.at(idx)
        })
    }

    proptest! {
        #[test]
        fn extraction_reconstructs_table(r in arb_rule()) {
            for j in 1..=r.arity() {
                if let Some(s) = extract_monomial_at(&r, j) {
                    prop_assert!(reconstructs(&r, &s));
                }
            }
        }

        #[test]
        fn planted_monomial_is_found(r in arb_separated_rule()) {
            let c = classify(&r);
            if c.essential.contains(&1) {
                let s = c.separated_at(1);
                prop_assert!(s.is_some());
                prop_assert!(reconstructs(&r, s.unwrap()));
            }
        }

        #[test]
        fn class_invariants(r in arb_rule()) {
            let c = classify(&r);
            prop_assert_eq!(c.leftmost, c.essential.iter().min().copied());
            prop_assert_eq!(c.rightmost, c.essential.iter().max().copied());
            if c.shift_like { prop_assert_eq!(c.leftmost, c.rightmost); }
            if c.totally_separated {
                for j in &c.essential { prop_assert!(c.separated_at(*j).is_some()); }
            }
            for s in &c.separated { prop_assert!(s.coefficient != 0); }
        }

        #[test]
        fn classification_is_table_determined(r in arb_rule()) {
            // Rebuilding from the table file reproduces the class.
            let again = RuleTable::parse_table_file(&r.to_table_file(), &Caps::default()).unwrap();
            prop_assert_eq!(classify(&again), classify(&r));
        }
    }
}
