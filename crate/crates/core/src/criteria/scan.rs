//! Scan of LR-separated rules over Z_p comparing surjectivity with
//! `gcd(q_l, p-1) = 1 or gcd(q_r, p-1) = 1`.

use std::time::Instant;

use num_integer::Integer;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::family::{CoeffSet, Family, FamilyKind, FamilySpec, PiMode};
use crate::caps::Caps;
use crate::decide::decide_surjective;
use crate::error::{Error, Result};
use crate::zmod::{Modulus, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ScanBounds {
    pub diameter: usize,
    pub exponents: Vec<u64>,
    pub coeffs: CoeffSet,
    pub pi: PiMode,
    pub seed: u64,
}

/// One scanned rule `a_l x_1^q_l + pi(x_2..x_d) + a_r x_{d+1}^q_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ScanCase {
    pub label: String,
    pub a_l: Residue,
    pub q_l: u64,
    pub a_r: Residue,
    pub q_r: u64,
    pub pi: Vec<Residue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ScanReport {
    pub p: u32,
    pub bounds: ScanBounds,
    pub rules: u64,
    pub surjective: u64,
    /// Rules satisfying the gcd disjunction.
    pub predicted_surjective: u64,
    /// Disjunction holds but the rule is not surjective.
    pub sufficiency_violations: Vec<ScanCase>,
    /// Surjective although the disjunction fails.
    pub necessity_counterexamples: Vec<ScanCase>,
    pub runtime_ms: Option<u64>,
}

/// Runs the scan; `jobs` as in [`super::audit`]. Output is independent of
/// the number of threads.
pub fn conjecture_scan(
    p: u32,
    bounds: &ScanBounds,
    caps: &Caps,
    jobs: Option<usize>,
    with_runtime: bool,
) -> Result<ScanReport> {
    let start = Instant::now();
    let m = Modulus::new(p)?;
    if !m.is_prime() || p < 3 {
        return Err(Error::NotPrime(p));
    }
    if bounds.diameter == 0 {
        return Err(Error::InvalidArgument("scan needs d >= 1".into()));
    }
    let spec = FamilySpec {
        kind: FamilyKind::Lr,
        moduli: vec![m],
        diameter: bounds.diameter,
        exponents: bounds.exponents.clone(),
        coeffs: bounds.coeffs,
        pi: bounds.pi,
        sample: None,
        seed: bounds.seed,
        position: 1,
    };
    let family = Family::new(spec, caps)?;
    let pool = super::build_pool(jobs)?;
    let results: Vec<Result<(ScanCase, bool, bool)>> = pool.install(|| {
        (0..family.len())
            .into_par_iter()
            .map(|i| {
                let mem = family.member(i)?;
                let (a_l, q_l, a_r, q_r, pi) = mem.lr_parts.expect("lr member");
                let surjective = decide_surjective(&mem.rule, caps)?.verdict;
                let predicted = q_l.gcd(&(p as u64 - 1)) == 1 || q_r.gcd(&(p as u64 - 1)) == 1;
                Ok((
                    ScanCase {
                        label: mem.label,
                        a_l,
                        q_l,
                        a_r,
                        q_r,
                        pi,
                    },
                    surjective,
                    predicted,
                ))
            })
            .collect()
    });

    let mut report = ScanReport {
        p,
        bounds: bounds.clone(),
        rules: 0,
        surjective: 0,
        predicted_surjective: 0,
        sufficiency_violations: Vec::new(),
        necessity_counterexamples: Vec::new(),
        runtime_ms: None,
    };
    for r in results {
        let (case, surjective, predicted) = r?;
        report.rules += 1;
        report.surjective += surjective as u64;
        report.predicted_surjective += predicted as u64;
        match (predicted, surjective) {
            (true, false) => report.sufficiency_violations.push(case),
            (false, true) => report.necessity_counterexamples.push(case),
            _ => {}
        }
    }
    report.runtime_ms = with_runtime.then(|| start.elapsed().as_millis() as u64);
    Ok(report)
}
