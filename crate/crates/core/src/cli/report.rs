//! Report documents emitted by the command-line tool.

use std::fmt::Write as _;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::criteria::{AnalysisReport, AuditReport, AuditSummary, Outcome, ScanReport};
use crate::decide::{Decision, Witness};
use crate::zmod::Residue;

/// Bumped on any breaking change to the serialized layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ReportDocument {
    pub schema_version: u32,
    /// The command line that produced this document.
    pub command: Vec<String>,
    pub payload: Payload,
    pub exit_status: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Payload {
    Analysis(AnalysisReport),
    Examples(ExamplesReport),
    Audit(AuditSummary),
    Scan(ScanReport),
    Witness(WitnessReport),
    Trace(TraceReport),
    Interpolation(InterpolationReport),
    Error(ErrorReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub enum CheckStatus {
    #[serde(rename = "ok")]
    Ok,
    /// The recomputed value contradicts the printed claim.
    #[serde(rename = "DISCREPANCY")]
    Discrepancy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ExampleCheck {
    pub rule: String,
    pub claim: String,
    pub expected: String,
    pub computed: String,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ExamplesReport {
    pub checks: Vec<ExampleCheck>,
    pub discrepancies: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct CollisionWitness {
    pub window: usize,
    pub u: Vec<Residue>,
    pub v: Vec<Residue>,
    /// The common constant image `f*(u) = f*(v)`.
    pub image: Vec<Residue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct WitnessReport {
    pub rule: String,
    pub injective: Decision,
    /// Whether the witness re-validated by direct recomputation.
    pub validated: bool,
    /// Explicit collision for rules permutive at both extreme positions.
    pub collision: Option<CollisionWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct TraceReport {
    pub rule: String,
    pub width: usize,
    pub steps: usize,
    pub seed: Option<u64>,
    pub output: Option<String>,
    pub rows: Vec<Vec<Residue>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationMethod {
    /// Vandermonde solve over a prime field.
    Interpolation,
    /// Exhaustive search below the Kempner degree bound.
    ExhaustiveSearch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct InterpolationReport {
    pub modulus: u32,
    pub values: Vec<Residue>,
    pub method: InterpolationMethod,
    pub representable: bool,
    pub polynomial: Option<String>,
    pub coefficients: Option<Vec<Residue>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ErrorReport {
    pub message: String,
}

fn outcome(o: Outcome) -> &'static str {
    match o {
        Outcome::Holds => "holds",
        Outcome::Fails => "fails",
        Outcome::NotApplicable => "n/a",
    }
}

fn word(w: &[Residue]) -> String {
    w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn witness_text(w: &Witness) -> String {
    match w {
        Witness::UnbalancedWord { word: wd, count } => format!("unbalanced word [{}] with {count} preimages", word(wd)),
        Witness::Diamond { u, v } => format!("diamond [{}] / [{}]", word(u), word(v)),
        Witness::PeriodicPair { x, y } => format!("periodic pair {x} / {y}"),
    }
}

fn decision_text(name: &str, d: &Decision) -> String {
    match &d.witness {
        Some(w) => format!("{name}: {} ({})", d.verdict, witness_text(w)),
        None => format!("{name}: {}", d.verdict),
    }
}

pub fn audit_line_text(r: &AuditReport) -> String {
    format!(
        "{}  surjective={} injective={} discrepancies={}",
        r.rule,
        r.ground_truth.surjective.verdict,
        r.ground_truth.injective.verdict,
        r.discrepancies.len()
    )
}

/// Human-oriented rendering; not schema-stable.
pub fn render_text(doc: &ReportDocument) -> String {
    let mut s = String::new();
    match &doc.payload {
        Payload::Analysis(a) => {
            let r = &a.audit;
            let c = &a.classification;
            let _ = writeln!(s, "rule: {}", r.rule);
            let _ = writeln!(s, "essential positions: {:?}", c.essential);
            for sep in &c.separated {
                let _ = writeln!(
                    s,
                    "separated at {}: a={} q={} (written {})",
                    sep.position, sep.coefficient, sep.exponent, sep.raw_exponent
                );
            }
            let _ = writeln!(
                s,
                "lr-separated={} totally-separated={} shift-like={} l={:?} r={:?}",
                c.lr_separated, c.totally_separated, c.shift_like, c.leftmost, c.rightmost
            );
            let _ = writeln!(s, "{}", decision_text("surjective", &r.ground_truth.surjective));
            let _ = writeln!(s, "{}", decision_text("injective", &r.ground_truth.injective));
            for (i, p) in r.ground_truth.permutive.iter().enumerate() {
                let _ = writeln!(s, "permutive at {}: {p}", i + 1);
            }
            for v in &r.criteria {
                let pos = v.position.map(|p| format!(" @{p}")).unwrap_or_default();
                let note = v.note.as_deref().map(|n| format!("  [{n}]")).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "criterion {}{pos}: raw={} canonical={}{note}",
                    v.criterion.name(),
                    outcome(v.raw),
                    outcome(v.canonical)
                );
            }
            for d in &r.discrepancies {
                let pos = d.position.map(|p| format!(" @{p}")).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "DISCREPANCY {}{pos} ({:?}): predicts {:?}={} but oracle says {}",
                    d.criterion.name(),
                    d.variant,
                    d.property,
                    d.predicted,
                    d.actual
                );
            }
            if let Some(t) = &a.timings {
                let _ = writeln!(s, "time: classify {} us, audit {} us", t.classify_us, t.audit_us);
            }
        }
        Payload::Examples(e) => {
            for c in &e.checks {
                let mark = match c.status {
                    CheckStatus::Ok => "ok",
                    CheckStatus::Discrepancy => "DISCREPANCY",
                };
                let _ = writeln!(
                    s,
                    "[{mark}] {}: {}  expected {}  computed {}",
                    c.rule, c.claim, c.expected, c.computed
                );
            }
            let _ = writeln!(s, "{} check(s), {} discrepancy(ies)", e.checks.len(), e.discrepancies);
        }
        Payload::Audit(a) => {
            let _ = writeln!(
                s,
                "rules: {}  with discrepancies: {}  discrepancies: {}",
                a.rules, a.rules_with_discrepancies, a.discrepancies
            );
            for ((id, app), (_, dis)) in a.applicable.iter().zip(&a.discrepancies_by_criterion) {
                let _ = writeln!(s, "  {:<45} applicable {:>8}  discrepancies {:>6}", id.name(), app, dis);
            }
        }
        Payload::Scan(r) => {
            let _ = writeln!(
                s,
                "p={} d={} exponents={:?}",
                r.p, r.bounds.diameter, r.bounds.exponents
            );
            let _ = writeln!(
                s,
                "rules: {}  surjective: {}  gcd condition holds: {}",
                r.rules, r.surjective, r.predicted_surjective
            );
            let _ = writeln!(s, "sufficiency violations: {}", r.sufficiency_violations.len());
            for c in &r.sufficiency_violations {
                let _ = writeln!(s, "  {}", c.label);
            }
            let _ = writeln!(s, "necessity counterexamples: {}", r.necessity_counterexamples.len());
            for c in r.necessity_counterexamples.iter().take(20) {
                let _ = writeln!(s, "  {}", c.label);
            }
            if let Some(ms) = r.runtime_ms {
                let _ = writeln!(s, "runtime: {ms} ms");
            }
        }
        Payload::Witness(w) => {
            let _ = writeln!(s, "rule: {}", w.rule);
            let _ = writeln!(s, "{}", decision_text("injective", &w.injective));
            let _ = writeln!(s, "validated: {}", w.validated);
            if let Some(c) = &w.collision {
                let _ = writeln!(
                    s,
                    "collision (W={}): [{}] / [{}] -> [{}]",
                    c.window,
                    word(&c.u),
                    word(&c.v),
                    word(&c.image)
                );
            }
        }
        Payload::Trace(t) => {
            let _ = writeln!(s, "rule: {}  width {}  steps {}", t.rule, t.width, t.steps);
            if let Some(o) = &t.output {
                let _ = writeln!(s, "written to {o}");
            }
        }
        Payload::Interpolation(i) => match &i.polynomial {
            Some(p) => {
                let _ = writeln!(s, "{p}");
            }
            None => {
                let _ = writeln!(s, "not representable");
            }
        },
        Payload::Error(e) => {
            let _ = writeln!(s, "error: {}", e.message);
        }
    }
    s
}
