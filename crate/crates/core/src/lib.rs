//! Exact analysis of one-dimensional cellular automata over Z_m.
//!
//! Rules are held as complete value tables ([`rule::RuleTable`]). The
//! [`decide`] module answers surjectivity and injectivity exactly through
//! de Bruijn subset construction and pair-graph analysis; [`criteria`]
//! evaluates the algebraic criteria for separated rules and audits them
//! against those deciders.

pub mod caps;
pub mod cli;
pub mod criteria;
pub mod decide;
pub mod error;
pub mod poly;
pub mod rule;
pub mod zmod;

pub use caps::Caps;
pub use error::{Error, Result};
pub use zmod::{Modulus, Residue};
