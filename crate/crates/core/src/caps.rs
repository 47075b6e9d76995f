//! Resource caps shared by every exhaustive procedure.
//!
//! Defaults keep everything desk-scale. The `CA_VERIFY_CAPS` environment
//! variable overrides individual caps with a comma-separated list such as
//! `subset_states=4096,pair_vertices=65536`.

use crate::error::{Error, Result};

pub const CAPS_ENV: &str = "CA_VERIFY_CAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of entries in a rule table, m^(d+1).
    pub table_entries: u64,
    /// Maximum number of distinct subsets visited by the surjectivity decider.
    pub subset_states: u64,
    /// Maximum number of pair-graph vertices, m^(2d).
    pub pair_vertices: u64,
    /// Maximum number of coefficient vectors tried by the representability search.
    pub search_budget: u64,
    /// Maximum number of rules in an audit family or conjecture scan.
    pub family_size: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            table_entries: 1 << 24,
            subset_states: 1 << 20,
            pair_vertices: 1 << 24,
            search_budget: 1 << 24,
            family_size: 1 << 24,
        }
    }
}

impl Caps {
    /// Defaults with any overrides from `CA_VERIFY_CAPS` applied.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => Caps::default().with_overrides(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("cap override `{item}` lacks `=`")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cap `{key}` has non-integer value")))?;
            match key.trim() {
                "table_entries" => self.table_entries = value,
                "subset_states" => self.subset_states = value,
                "pair_vertices" => self.pair_vertices = value,
                "search_budget" => self.search_budget = value,
                "family_size" => self.family_size = value,
                other => return Err(Error::InvalidArgument(format!("unknown cap `{other}`"))),
            }
        }
        Ok(self)
    }

    pub(crate) fn check(what: &'static str, needed: u128, cap: u64) -> Result<()> {
        if needed > cap as u128 {
            Err(Error::CapExceeded {
                what,
                needed,
                cap: cap as u128,
            })
        } else {
            Ok(())
        }
    }
}
