//! Ground-truth deciders for surjectivity and injectivity of the global map.
//!
//! Both work on the de Bruijn graph of the rule: vertices are words of
//! length `d` (encoded in mixed radix), and reading letter `a` from vertex
//! `u` follows the edge for window `u.a`, labeled `f(u.a)`.

mod collision;
mod injective;
mod surjective;

pub use collision::bipermutive_collision;
pub use injective::{decide_injective, PairGraph};
pub use surjective::{count_preimages, decide_surjective, first_unbalanced_word};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::rule::{CyclicWord, RuleTable};
use crate::zmod::Residue;

/// Finite or periodic evidence for a negative verdict.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A word whose preimage count under `f*` differs from `m^d`.
    UnbalancedWord { word: Vec<Residue>, count: u64 },
    /// Distinct equal-length words agreeing on their first and last `d`
    /// letters with equal `f*` images.
    Diamond { u: Vec<Residue>, v: Vec<Residue> },
    /// Distinct periodic configurations with equal images.
    PeriodicPair { x: CyclicWord, y: CyclicWord },
}

impl Witness {
    /// Re-checks the witness by direct recomputation on `rule`.
    pub fn validate(&self, rule: &RuleTable) -> bool {
        let d = rule.diameter();
        match self {
            Witness::UnbalancedWord { word, count } => {
                !word.is_empty()
                    && count_preimages(rule, word).ok() == Some(*count as u128)
                    && *count != rule.context_count() as u64
            }
            Witness::Diamond { u, v } => {
                u.len() == v.len()
                    && u.len() > d
                    && u != v
                    && u[..d] == v[..d]
                    && u[u.len() - d..] == v[v.len() - d..]
                    && rule.f_star(u) == rule.f_star(v)
            }
            Witness::PeriodicPair { x, y } => {
                !x.same_configuration(y) && rule.apply_periodic(x).same_configuration(&rule.apply_periodic(y))
            }
        }
    }
}

/// Verdict of a decider together with its witness when negative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Decision {
    pub verdict: bool,
    pub witness: Option<Witness>,
}

/// Mixed-radix de Bruijn structure shared by the deciders.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DeBruijn<'a> {
    pub rule: &'a RuleTable,
    pub m: usize,
    /// Number of vertices, `m^d`.
    pub vertices: usize,
}

impl<'a> DeBruijn<'a> {
    pub fn new(rule: &'a RuleTable) -> Self {
        DeBruijn {
            rule,
            m: rule.modulus().get() as usize,
            vertices: rule.context_count(),
        }
    }

    /// `(target, label)` of the edge reading `letter` from `u`.
    #[inline]
    pub fn edge(&self, u: usize, letter: usize) -> (usize, Residue) {
        let window = u * self.m + letter;
        (window % self.vertices, self.rule.at(window))
    }

    /// Letters of vertex `u`, most significant first.
    pub fn word(&self, u: usize) -> Vec<Residue> {
        let mut w = vec![0; self.rule.diameter()];
        crate::rule::decode_window(self.rule.modulus(), u, &mut w);
        w
    }
}
