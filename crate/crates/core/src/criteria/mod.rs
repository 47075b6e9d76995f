//! The algebraic criteria for separated rules, evaluated verbatim and
//! audited against the exact deciders.
//!
//! Every exponent-dependent criterion is evaluated twice: on the exponents
//! as written (`raw`) and on the canonical exponents (`canonical`). A
//! criterion outside its hypotheses is `NotApplicable` with a note and
//! never predicts anything.

mod family;
mod scan;

pub use family::{CoeffSet, Family, FamilyKind, FamilySpec, Member, PiMode};
pub use scan::{conjecture_scan, ScanBounds, ScanCase, ScanReport};

use std::time::Instant;

use num_integer::Integer;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::decide::{decide_injective, decide_surjective, Decision, Witness};
use crate::error::Result;
use crate::poly::{hermite_criterion, interpolate_prime, UniPoly};
use crate::rule::{classify, interior_map, RuleExpression, RuleTable, SeparationClass};
use crate::zmod::{totient, Residue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    NotApplicable,
}

impl Outcome {
    fn from_bool(b: bool) -> Self {
        if b {
            Outcome::Holds
        } else {
            Outcome::Fails
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum CriterionId {
    /// Permutive at `j` iff `gcd(q_j, phi(m)) = 1`, for a unit coefficient.
    TotientPermutivity,
    /// Permutive at `j` iff `deg(pi) < p` and `gcd(pi', x^p - x) = 1`.
    HermitePermutivity,
    /// `gcd(q_l, phi(m)) = 1` or `gcd(q_r, phi(m)) = 1` implies surjective.
    SurjectivitySufficient,
    /// With a non-permutation interior map over Z_p: surjective iff
    /// `gcd(q_l, p-1) = 1` or `gcd(q_r, p-1) = 1`.
    PpNonPermutationResidual,
    /// Totally separated and surjective over Z_p implies some
    /// `gcd(q_j, p-1) = 1`.
    PpTotallySeparated,
    /// Injective iff `l = r` and `gcd(q_l, phi(m)) = 1`.
    Injectivity,
    /// Bijective iff `l = r` and `gcd(q_l, rho(m)) = 1` as printed; `rho` is
    /// read as `phi`.
    BijectivityCorollary,
    /// Totally separated over an odd prime field with all exponents even
    /// implies neither surjective nor injective.
    EvenExponents,
}

impl CriterionId {
    pub const ALL: [CriterionId; 8] = [
        CriterionId::TotientPermutivity,
        CriterionId::HermitePermutivity,
        CriterionId::SurjectivitySufficient,
        CriterionId::PpNonPermutationResidual,
        CriterionId::PpTotallySeparated,
        CriterionId::Injectivity,
        CriterionId::BijectivityCorollary,
        CriterionId::EvenExponents,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionId::TotientPermutivity => "totient_permutivity",
            CriterionId::HermitePermutivity => "hermite_permutivity",
            CriterionId::SurjectivitySufficient => "surjectivity_sufficient",
            CriterionId::PpNonPermutationResidual => "pp_non_permutation_residual",
            CriterionId::PpTotallySeparated => "pp_totally_separated",
            CriterionId::Injectivity => "injectivity",
            CriterionId::BijectivityCorollary => "bijectivity_corollary (as-printed ambiguous)",
            CriterionId::EvenExponents => "even_exponents",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct CriterionVerdict {
    pub criterion: CriterionId,
    /// Window position for per-position criteria.
    pub position: Option<usize>,
    /// Evaluated on the exponents or polynomial as written.
    pub raw: Outcome,
    /// Evaluated on canonical exponents or the interpolated polynomial.
    pub canonical: Outcome,
    /// Present whenever the verdict is `NotApplicable`.
    pub note: Option<String>,
}

impl CriterionVerdict {
    fn not_applicable(criterion: CriterionId, position: Option<usize>, note: impl Into<String>) -> Self {
        CriterionVerdict {
            criterion,
            position,
            raw: Outcome::NotApplicable,
            canonical: Outcome::NotApplicable,
            note: Some(note.into()),
        }
    }

    fn evaluated(criterion: CriterionId, position: Option<usize>, raw: bool, canonical: bool) -> Self {
        CriterionVerdict {
            criterion,
            position,
            raw: Outcome::from_bool(raw),
            canonical: Outcome::from_bool(canonical),
            note: None,
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.raw != Outcome::NotApplicable
    }
}

/// Permutivity at `j` by exhaustion: every context makes `x_j -> f` a
/// bijection of Z_m.
pub fn permutive_bruteforce(rule: &RuleTable, j: usize) -> bool {
    permutivity_collision(rule, j).is_none() && (1..=rule.arity()).contains(&j)
}

/// Two windows differing only at `j` with equal images, if any.
pub fn permutivity_collision(rule: &RuleTable, j: usize) -> Option<(Vec<Residue>, Vec<Residue>)> {
    if j == 0 || j > rule.arity() {
        return None;
    }
    let m = rule.modulus().get() as usize;
    let stride = rule.stride(j);
    let mut seen = vec![usize::MAX; m];
    for base in (0..rule.entries().len()).filter(|idx| (idx / stride).is_multiple_of(m)) {
        seen.fill(usize::MAX);
        for x in 0..m {
            let v = rule.at(base + x * stride) as usize;
            if seen[v] != usize::MAX {
                let decode = |idx: usize| {
                    let mut w = vec![0; rule.arity()];
                    crate::rule::decode_window(rule.modulus(), idx, &mut w);
                    w
                };
                return Some((decode(base + seen[v] * stride), decode(base + x * stride)));
            }
            seen[v] = x;
        }
    }
    None
}

fn coprime(q: u64, n: u32) -> bool {
    q.gcd(&(n as u64)) == 1
}

pub fn criterion_totient_permutivity(rule: &RuleTable, class: &SeparationClass, j: usize) -> CriterionVerdict {
    let id = CriterionId::TotientPermutivity;
    let m = rule.modulus();
    let Some(sep) = class.separated_at(j) else {
        return CriterionVerdict::not_applicable(id, Some(j), "not separated at this position");
    };
    if !m.is_unit(sep.coefficient) {
        return CriterionVerdict::not_applicable(id, Some(j), "coefficient is not a unit");
    }
    let phi = totient(m);
    CriterionVerdict::evaluated(
        id,
        Some(j),
        coprime(sep.raw_exponent, phi),
        coprime(sep.exponent as u64, phi),
    )
}

pub fn criterion_hermite_permutivity(rule: &RuleTable, class: &SeparationClass, j: usize) -> CriterionVerdict {
    let id = CriterionId::HermitePermutivity;
    let m = rule.modulus();
    if !m.is_prime() {
        return CriterionVerdict::not_applicable(id, Some(j), "modulus is not prime");
    }
    let Some(comp) = class.components.iter().find(|c| c.position == j) else {
        return CriterionVerdict::not_applicable(id, Some(j), "no univariate component at this position");
    };
    let canonical_poly = interpolate_prime(&comp.function).expect("prime modulus");
    let raw_poly: &UniPoly = comp.written.as_ref().unwrap_or(&canonical_poly);
    let raw = hermite_criterion(raw_poly).expect("prime modulus");
    let canonical = hermite_criterion(&canonical_poly).expect("prime modulus");
    CriterionVerdict::evaluated(id, Some(j), raw, canonical)
}

/// Shared hypotheses of the LR-separated criteria over Z_m.
fn lr_hypotheses(rule: &RuleTable, class: &SeparationClass) -> std::result::Result<(), &'static str> {
    let m = rule.modulus();
    if m.get() < 3 {
        return Err("modulus below 3");
    }
    let Some((l, r)) = class.ends() else {
        return Err("not LR-separated");
    };
    if !m.is_unit(l.coefficient) || !m.is_unit(r.coefficient) {
        return Err("extreme coefficient is not a unit");
    }
    Ok(())
}

pub fn criterion_surjectivity_sufficient(rule: &RuleTable, class: &SeparationClass) -> CriterionVerdict {
    let id = CriterionId::SurjectivitySufficient;
    if let Err(note) = lr_hypotheses(rule, class) {
        return CriterionVerdict::not_applicable(id, None, note);
    }
    let (l, r) = class.ends().expect("checked");
    let phi = totient(rule.modulus());
    CriterionVerdict::evaluated(
        id,
        None,
        coprime(l.raw_exponent, phi) || coprime(r.raw_exponent, phi),
        coprime(l.exponent as u64, phi) || coprime(r.exponent as u64, phi),
    )
}

pub fn criterion_pp_non_permutation_residual(rule: &RuleTable, class: &SeparationClass) -> CriterionVerdict {
    let id = CriterionId::PpNonPermutationResidual;
    let m = rule.modulus();
    if !m.is_prime() || m.get() < 3 {
        return CriterionVerdict::not_applicable(id, None, "modulus is not an odd prime");
    }
    let Some((l, r)) = class.ends() else {
        return CriterionVerdict::not_applicable(id, None, "not LR-separated");
    };
    if r.position < l.position + 2 {
        return CriterionVerdict::not_applicable(id, None, "no interior positions (r < l + 2)");
    }
    let pi = interior_map(rule, class).expect("LR-separated");
    if pi.is_permutation_map() {
        return CriterionVerdict::not_applicable(id, None, "interior map is a permutation polynomial");
    }
    let pm1 = m.get() - 1;
    CriterionVerdict::evaluated(
        id,
        None,
        coprime(l.raw_exponent, pm1) || coprime(r.raw_exponent, pm1),
        coprime(l.exponent as u64, pm1) || coprime(r.exponent as u64, pm1),
    )
}

pub fn criterion_pp_totally_separated(rule: &RuleTable, class: &SeparationClass) -> CriterionVerdict {
    let id = CriterionId::PpTotallySeparated;
    let m = rule.modulus();
    if !m.is_prime() || m.get() < 3 {
        return CriterionVerdict::not_applicable(id, None, "modulus is not an odd prime");
    }
    if !class.totally_separated {
        return CriterionVerdict::not_applicable(id, None, "not totally separated");
    }
    let pm1 = m.get() - 1;
    CriterionVerdict::evaluated(
        id,
        None,
        class.separated.iter().any(|s| coprime(s.raw_exponent, pm1)),
        class.separated.iter().any(|s| coprime(s.exponent as u64, pm1)),
    )
}

fn injectivity_like(id: CriterionId, rule: &RuleTable, class: &SeparationClass) -> CriterionVerdict {
    if let Err(note) = lr_hypotheses(rule, class) {
        return CriterionVerdict::not_applicable(id, None, note);
    }
    let (l, r) = class.ends().expect("checked");
    let phi = totient(rule.modulus());
    let same = l.position == r.position;
    CriterionVerdict::evaluated(
        id,
        None,
        same && coprime(l.raw_exponent, phi),
        same && coprime(l.exponent as u64, phi),
    )
}

pub fn criterion_injectivity(rule: &RuleTable, class: &SeparationClass) -> CriterionVerdict {
    injectivity_like(CriterionId::Injectivity, rule, class)
}

/// The bijectivity corollary under the `rho = phi` reading.
pub fn criterion_bijectivity_corollary(rule: &RuleTable, class: &SeparationClass) -> CriterionVerdict {
    let mut v = injectivity_like(CriterionId::BijectivityCorollary, rule, class);
    if v.is_applicable() {
        v.note = Some("as-printed ambiguous: gcd(q_l, rho(m)) evaluated as gcd(q_l, phi(m))".into());
    }
    v
}

pub fn criterion_even_exponents(rule: &RuleTable, class: &SeparationClass) -> CriterionVerdict {
    let id = CriterionId::EvenExponents;
    let m = rule.modulus();
    if !m.is_prime() || m.get() < 3 {
        return CriterionVerdict::not_applicable(id, None, "modulus is not an odd prime");
    }
    if !class.totally_separated {
        return CriterionVerdict::not_applicable(id, None, "not totally separated");
    }
    CriterionVerdict::evaluated(
        id,
        None,
        class.separated.iter().all(|s| s.raw_exponent % 2 == 0),
        class.separated.iter().all(|s| s.exponent % 2 == 0),
    )
}

/// All criteria: per-position ones for every essential position, in
/// position order, then the global ones.
pub fn evaluate_criteria(rule: &RuleTable, class: &SeparationClass) -> Vec<CriterionVerdict> {
    let mut out = Vec::new();
    for &j in &class.essential {
        out.push(criterion_totient_permutivity(rule, class, j));
    }
    for &j in &class.essential {
        out.push(criterion_hermite_permutivity(rule, class, j));
    }
    out.push(criterion_surjectivity_sufficient(rule, class));
    out.push(criterion_pp_non_permutation_residual(rule, class));
    out.push(criterion_pp_totally_separated(rule, class));
    out.push(criterion_injectivity(rule, class));
    out.push(criterion_bijectivity_corollary(rule, class));
    out.push(criterion_even_exponents(rule, class));
    out
}

/// Decider and brute-force verdicts for one rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct GroundTruth {
    pub surjective: Decision,
    pub injective: Decision,
    /// Brute-force permutivity at positions `1..=d+1`.
    pub permutive: Vec<bool>,
}

impl GroundTruth {
    pub fn compute(rule: &RuleTable, caps: &Caps) -> Result<Self> {
        Ok(GroundTruth {
            surjective: decide_surjective(rule, caps)?,
            injective: decide_injective(rule, caps)?,
            permutive: (1..=rule.arity()).map(|j| permutive_bruteforce(rule, j)).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Raw,
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Permutive,
    Surjective,
    Injective,
}

/// Oracle evidence backing the ground-truth side of a discrepancy.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Evidence {
    Decider {
        witness: Witness,
    },
    /// Two windows differing only at `position` with the same image.
    Collision {
        position: usize,
        u: Vec<Residue>,
        v: Vec<Residue>,
    },
}

/// A criterion prediction contradicted by the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct Discrepancy {
    pub criterion: CriterionId,
    pub position: Option<usize>,
    pub variant: Variant,
    pub property: Property,
    /// What the criterion implies for `property`.
    pub predicted: bool,
    /// What the oracle says.
    pub actual: bool,
    pub evidence: Option<Evidence>,
}

/// The predictions an outcome carries, as `(property, value)` pairs.
fn predictions(criterion: CriterionId, outcome: Outcome) -> Vec<(Property, bool)> {
    let holds = match outcome {
        Outcome::NotApplicable => return Vec::new(),
        o => o == Outcome::Holds,
    };
    use CriterionId::*;
    match criterion {
        TotientPermutivity | HermitePermutivity => vec![(Property::Permutive, holds)],
        PpNonPermutationResidual => vec![(Property::Surjective, holds)],
        Injectivity | BijectivityCorollary => vec![(Property::Injective, holds)],
        // one-directional statements predict nothing on the other side
        SurjectivitySufficient if holds => vec![(Property::Surjective, true)],
        PpTotallySeparated if !holds => vec![(Property::Surjective, false)],
        EvenExponents if holds => vec![(Property::Surjective, false), (Property::Injective, false)],
        _ => Vec::new(),
    }
}

fn find_discrepancies(rule: &RuleTable, verdicts: &[CriterionVerdict], truth: &GroundTruth) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for v in verdicts {
        for (variant, outcome) in [(Variant::Raw, v.raw), (Variant::Canonical, v.canonical)] {
            for (property, predicted) in predictions(v.criterion, outcome) {
                let (actual, evidence) = match property {
                    Property::Permutive => {
                        let j = v.position.expect("per-position criterion");
                        let actual = truth.permutive[j - 1];
                        let ev =
                            permutivity_collision(rule, j).map(|(u, w)| Evidence::Collision { position: j, u, v: w });
                        (actual, ev)
                    }
                    Property::Surjective => (truth.surjective.verdict, decider_evidence(&truth.surjective)),
                    Property::Injective => (truth.injective.verdict, decider_evidence(&truth.injective)),
                };
                if predicted != actual {
                    out.push(Discrepancy {
                        criterion: v.criterion,
                        position: v.position,
                        variant,
                        property,
                        predicted,
                        actual,
                        evidence,
                    });
                }
            }
        }
    }
    out
}

fn decider_evidence(d: &Decision) -> Option<Evidence> {
    d.witness.clone().map(|witness| Evidence::Decider { witness })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct AuditReport {
    /// Rule identifier: expression text or a generated label.
    pub rule: String,
    pub modulus: u32,
    pub diameter: usize,
    pub ground_truth: GroundTruth,
    pub criteria: Vec<CriterionVerdict>,
    pub discrepancies: Vec<Discrepancy>,
}

/// Classifies, evaluates every criterion and runs every oracle on one rule.
pub fn audit_rule(rule: &RuleTable, class: &SeparationClass, label: &str, caps: &Caps) -> Result<AuditReport> {
    let ground_truth = GroundTruth::compute(rule, caps)?;
    let criteria = evaluate_criteria(rule, class);
    let discrepancies = find_discrepancies(rule, &criteria, &ground_truth);
    Ok(AuditReport {
        rule: label.to_string(),
        modulus: rule.modulus().get(),
        diameter: rule.diameter(),
        ground_truth,
        criteria,
        discrepancies,
    })
}

/// Wall-clock times in microseconds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Timings {
    pub classify_us: u64,
    pub audit_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct AnalysisReport {
    pub classification: SeparationClass,
    pub audit: AuditReport,
    pub timings: Option<Timings>,
}

/// Full analysis of a rule, optionally with the expression it came from so
/// that raw exponents and written polynomials are known.
pub fn analyze(
    rule: &RuleTable,
    expr: Option<&RuleExpression>,
    caps: &Caps,
    with_timings: bool,
) -> Result<AnalysisReport> {
    let start = Instant::now();
    let mut class = classify(rule);
    if let Some(e) = expr {
        class = class.with_raw_exponents(e);
    }
    let classify_us = start.elapsed().as_micros() as u64;
    let label = expr.map_or_else(
        || format!("m={}; d={}; table", rule.modulus(), rule.diameter()),
        |e| e.to_string(),
    );
    let start = Instant::now();
    let audit = audit_rule(rule, &class, &label, caps)?;
    let audit_us = start.elapsed().as_micros() as u64;
    Ok(AnalysisReport {
        classification: class,
        audit,
        timings: with_timings.then_some(Timings { classify_us, audit_us }),
    })
}

/// Totals over a family audit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct AuditSummary {
    pub rules: u64,
    pub rules_with_discrepancies: u64,
    pub discrepancies: u64,
    /// Applicable verdicts per criterion, in [`CriterionId::ALL`] order.
    pub applicable: Vec<(CriterionId, u64)>,
    pub discrepancies_by_criterion: Vec<(CriterionId, u64)>,
}

impl AuditSummary {
    fn new() -> Self {
        AuditSummary {
            applicable: CriterionId::ALL.iter().map(|&c| (c, 0)).collect(),
            discrepancies_by_criterion: CriterionId::ALL.iter().map(|&c| (c, 0)).collect(),
            ..Default::default()
        }
    }

    fn add(&mut self, r: &AuditReport) {
        self.rules += 1;
        self.discrepancies += r.discrepancies.len() as u64;
        if !r.discrepancies.is_empty() {
            self.rules_with_discrepancies += 1;
        }
        for v in r.criteria.iter().filter(|v| v.is_applicable()) {
            bump(&mut self.applicable, v.criterion);
        }
        for d in &r.discrepancies {
            bump(&mut self.discrepancies_by_criterion, d.criterion);
        }
    }
}

fn bump(counts: &mut [(CriterionId, u64)], id: CriterionId) {
    if let Some(slot) = counts.iter_mut().find(|(c, _)| *c == id) {
        slot.1 += 1;
    }
}

const CHUNK: u64 = 1024;

/// Audits every member of `family`, handing reports to `sink` in
/// enumeration order. Work is spread over `jobs` threads (all cores when
/// `None`); ordering does not depend on it.
pub fn audit(
    family: &Family,
    caps: &Caps,
    jobs: Option<usize>,
    mut sink: impl FnMut(&AuditReport) -> Result<()>,
) -> Result<AuditSummary> {
    let pool = build_pool(jobs)?;
    let mut summary = AuditSummary::new();
    let total = family.len();
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        let reports: Vec<Result<AuditReport>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| {
                    let member = family.member(i)?;
                    audit_rule(&member.rule, &member.classify(), &member.label, caps)
                })
                .collect()
        });
        for r in reports {
            let r = r?;
            summary.add(&r);
            sink(&r)?;
        }
        start = end;
    }
    Ok(summary)
}

pub(crate) fn build_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        b = b.num_threads(n.max(1));
    }
    b.build()
        .map_err(|e| crate::error::Error::InvalidArgument(format!("thread pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(src: &str) -> (RuleTable, SeparationClass) {
        let e = RuleExpression::parse(src).unwrap();
        let t = e.to_table(&Caps::default()).unwrap();
        let c = classify(&t).with_raw_exponents(&e);
        (t, c)
    }

    fn find(v: &[CriterionVerdict], id: CriterionId, pos: Option<usize>) -> CriterionVerdict {
        v.iter()
            .find(|x| x.criterion == id && x.position == pos)
            .unwrap()
            .clone()
    }

    #[test]
    fn bruteforce_permutivity_examples() {
        let (t, _) = rule("m=3; d=1; f=x1+x2");
        assert!(permutive_bruteforce(&t, 1));
        let (t, _) = rule("m=4; d=2; f=x1^2+x2+x3^2");
        assert!(!permutive_bruteforce(&t, 3));
        assert!(!permutive_bruteforce(&t, 1));
        assert!(permutive_bruteforce(&t, 2));
        let (t, _) = rule("m=7; d=2; f=x1^4+3*x2");
        assert!(permutive_bruteforce(&t, 2));
        assert!(!permutive_bruteforce(&t, 0));
        assert!(!permutive_bruteforce(&t, 4));
        let (u, v) = permutivity_collision(&t, 1).unwrap();
        assert_eq!(t.evaluate(&u).unwrap(), t.evaluate(&v).unwrap());
    }

    #[test]
    fn totient_examples() {
        let (t, c) = rule("m=7; d=2; f=x1^4+3*x2");
        let v = criterion_totient_permutivity(&t, &c, 2);
        assert_eq!((v.raw, v.canonical), (Outcome::Holds, Outcome::Holds));
        assert_eq!(criterion_totient_permutivity(&t, &c, 3).raw, Outcome::NotApplicable);

        let (t, c) = rule("m=4; d=0; f=x1^3");
        let v = criterion_totient_permutivity(&t, &c, 1);
        assert_eq!(v.raw, Outcome::Holds);
        assert!(!permutive_bruteforce(&t, 1));

        let (t, c) = rule("m=4; d=1; f=2*x1+x2");
        let v = criterion_totient_permutivity(&t, &c, 1);
        assert_eq!(v.raw, Outcome::NotApplicable);
        assert!(v.note.is_some());
    }

    #[test]
    fn raw_and_canonical_exponents_differ() {
        // x^5 = x on Z_5: raw gcd(5,4) = 1 as well, but x^6 = x^2
        let (t, c) = rule("m=5; d=1; f=x1^6+x2");
        let v = criterion_totient_permutivity(&t, &c, 1);
        assert_eq!((v.raw, v.canonical), (Outcome::Fails, Outcome::Fails));
        let (t, c) = rule("m=5; d=1; f=x1^9+x2");
        let s = c.separated_at(1).unwrap();
        assert_eq!((s.raw_exponent, s.exponent), (9, 1));
        let v = criterion_hermite_permutivity(&t, &c, 1);
        // written x^9 has degree >= 5
        assert_eq!((v.raw, v.canonical), (Outcome::Fails, Outcome::Holds));
    }

    #[test]
    fn hermite_examples() {
        let (t, c) = rule("m=5; d=1; f=x1+x2^2");
        assert_eq!(criterion_hermite_permutivity(&t, &c, 1).raw, Outcome::Holds);
        let (t, c) = rule("m=5; d=1; f=x1^3+x2^2");
        let v = criterion_hermite_permutivity(&t, &c, 1);
        assert_eq!(v.raw, Outcome::Fails);
        assert!(permutive_bruteforce(&t, 1));
        let (t, c) = rule("m=4; d=1; f=x1+x2");
        assert_eq!(criterion_hermite_permutivity(&t, &c, 1).raw, Outcome::NotApplicable);
        // non-monomial univariate component
        let (t, c) = rule("m=7; d=1; f=x1^4+3*x1+x2^2");
        assert_eq!(criterion_hermite_permutivity(&t, &c, 1).canonical, Outcome::Fails);
        assert!(permutive_bruteforce(&t, 1));
    }

    #[test]
    fn global_criteria_examples() {
        let (t, c) = rule("m=4; d=2; f=x1^2+x2+x3^2");
        assert_eq!(criterion_surjectivity_sufficient(&t, &c).raw, Outcome::Fails);
        let (t, c) = rule("m=7; d=2; f=x1^4+3*x2");
        assert_eq!(criterion_surjectivity_sufficient(&t, &c).raw, Outcome::Holds);
        assert_eq!(
            criterion_pp_non_permutation_residual(&t, &c).raw,
            Outcome::NotApplicable
        );
        assert_eq!(criterion_injectivity(&t, &c).raw, Outcome::Fails);

        let (t, c) = rule("m=3; d=1; f=x1^2+x2^2");
        assert_eq!(criterion_pp_totally_separated(&t, &c).raw, Outcome::Fails);
        assert_eq!(criterion_even_exponents(&t, &c).raw, Outcome::Holds);
        let (t, c) = rule("m=5; d=1; f=x1^3+x2");
        assert_eq!(criterion_pp_totally_separated(&t, &c).raw, Outcome::Holds);
        let (t, c) = rule("m=5; d=1; f=x1^2+x2^3");
        assert_eq!(criterion_even_exponents(&t, &c).raw, Outcome::Fails);

        let (t, c) = rule("m=5; d=0; f=x1");
        assert_eq!(criterion_injectivity(&t, &c).raw, Outcome::Holds);
        let v = criterion_bijectivity_corollary(&t, &c);
        assert!(v.note.unwrap().contains("as-printed ambiguous"));

        let (t, c) = rule("m=5; d=2; f=x1^2+x2^2+x3");
        assert_eq!(criterion_pp_non_permutation_residual(&t, &c).raw, Outcome::Holds);
        let (t, c) = rule("m=5; d=2; f=x1^2+x2+x3");
        assert_eq!(
            criterion_pp_non_permutation_residual(&t, &c).raw,
            Outcome::NotApplicable
        );
    }

    #[test]
    fn audit_flags_only_real_disagreements() {
        let caps = Caps::default();
        let (t, c) = rule("m=4; d=0; f=x1^3");
        let r = audit_rule(&t, &c, "x^3 mod 4", &caps).unwrap();
        let ids: Vec<CriterionId> = r.discrepancies.iter().map(|d| d.criterion).collect();
        assert!(ids.contains(&CriterionId::TotientPermutivity));
        assert!(ids.contains(&CriterionId::Injectivity));
        let d = r
            .discrepancies
            .iter()
            .find(|d| d.criterion == CriterionId::TotientPermutivity)
            .unwrap();
        assert!(matches!(d.evidence, Some(Evidence::Collision { position: 1, .. })));

        let (t, c) = rule("m=4; d=2; f=x1^2+x2+x3^2");
        let r = audit_rule(&t, &c, "", &caps).unwrap();
        assert!(r.discrepancies.is_empty(), "{:?}", r.discrepancies);
        assert!(r.ground_truth.surjective.verdict);

        let (t, c) = rule("m=4; d=1; f=x1^3+x2^3");
        let r = audit_rule(&t, &c, "", &caps).unwrap();
        assert_eq!(
            find(&r.criteria, CriterionId::SurjectivitySufficient, None).raw,
            Outcome::Holds
        );
        assert!(r
            .discrepancies
            .iter()
            .any(|d| d.criterion == CriterionId::SurjectivitySufficient && d.property == Property::Surjective));

        let (t, c) = rule("m=5; d=1; f=x1^3+x2^2");
        let r = audit_rule(&t, &c, "", &caps).unwrap();
        assert!(r
            .discrepancies
            .iter()
            .any(|d| d.criterion == CriterionId::HermitePermutivity && d.position == Some(1)));
    }

    #[test]
    fn analysis_report_round_trips() {
        let e = RuleExpression::parse("m=7; d=2; f=x1^4+3*x2").unwrap();
        let t = e.to_table(&Caps::default()).unwrap();
        let rep = analyze(&t, Some(&e), &Caps::default(), false).unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }
}
