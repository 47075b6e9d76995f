use std::io::Write as _;
use std::process::Command;

use ca_verify::cli::{self, Payload, ReportDocument};

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("ca-verify").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap())
}

fn document(text: &str) -> ReportDocument {
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

#[test]
fn binary_reports_exit_status() {
    let out = Command::new(env!("CARGO_BIN_EXE_ca-verify"))
        .args(["analyze", "m=5; d=1; f=x1+x2", "--expect", "injective"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let doc: ReportDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.exit_status, 3);
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
    assert_eq!(run(&["analyze"]).0, 1);
}

#[test]
fn analysis_round_trips_byte_identically() {
    let (code, text) = run(&["analyze", "m=4; d=2; f=x1^2+x2+x3^2"]);
    assert_eq!(code, 0);
    let doc = document(&text);
    assert_eq!(serde_json::to_string(&doc).unwrap(), text.trim_end());
    let Payload::Analysis(a) = &doc.payload else {
        panic!("wrong payload")
    };
    assert!(a.audit.ground_truth.surjective.verdict);
    assert!(a.timings.is_none());
}

#[test]
fn table_file_input_matches_expression() {
    let caps = ca_verify::Caps::default();
    let e = ca_verify::rule::RuleExpression::parse("m=3; d=1; f=x1+2*x2^2")
        .unwrap()
        .to_table(&caps)
        .unwrap()
        .to_table_file();
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(e.as_bytes()).unwrap();
    let path = file.path().to_str().unwrap();
    let (code, text) = run(&["analyze", "--table", path, "--expect", "not-injective"]);
    assert_eq!(code, 0, "{text}");
    let (_, direct) = run(&["analyze", "m=3; d=1; f=x1+2*x2^2"]);
    let (Payload::Analysis(a), Payload::Analysis(b)) = (document(&text).payload, document(&direct).payload) else {
        panic!("wrong payload")
    };
    assert_eq!(a.audit.ground_truth, b.audit.ground_truth);
}

#[test]
fn examples_flag_only_the_misprinted_pair() {
    let (code, text) = run(&["examples"]);
    assert_eq!(code, 0);
    let Payload::Examples(e) = document(&text).payload else {
        panic!("wrong payload")
    };
    assert_eq!(e.discrepancies, 2);
    assert!(text.contains("\"DISCREPANCY\""));
}

#[test]
fn audit_is_independent_of_thread_count() {
    let mut family = tempfile::NamedTempFile::new().unwrap();
    writeln!(family, "family=lr\nmoduli=3,4\nd=1\nq=1..3\ncoeffs=units").unwrap();
    let path = family.path().to_str().unwrap();
    let (c1, one) = run(&["--jobs", "1", "audit", path]);
    let (c4, four) = run(&["--jobs", "4", "audit", path]);
    assert_eq!(c1, c4);
    let lines: Vec<&str> = one.lines().collect();
    let other: Vec<&str> = four.lines().collect();
    // the trailing documents differ only in the recorded command line
    assert!(
        lines[..lines.len() - 1] == other[..other.len() - 1],
        "streamed lines differ"
    );
    assert_eq!(document(&one).payload, document(&four).payload);
    let Payload::Audit(summary) = document(&one).payload else {
        panic!("wrong payload")
    };
    assert_eq!(summary.rules as usize, lines.len() - 1);
    for line in &lines[..lines.len() - 1] {
        let r: ca_verify::criteria::AuditReport = serde_json::from_str(line).unwrap();
        assert_eq!(&serde_json::to_string(&r).unwrap(), line);
    }
}

#[test]
fn shift_audit_flags_z4_cube() {
    let mut family = tempfile::NamedTempFile::new().unwrap();
    writeln!(family, "family=shift\nmoduli=4\nd=0\nq=3\ncoeffs=one").unwrap();
    let (code, text) = run(&["audit", family.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let Payload::Audit(summary) = document(&text).payload else {
        panic!("wrong payload")
    };
    assert_eq!(summary.rules, 1);
    assert!(summary.discrepancies > 0);
}

#[test]
fn conjecture_scan_reports_no_violations() {
    let (code, text) = run(&["conjecture", "--p", "3", "--d", "1", "--q", "1..4"]);
    assert_eq!(code, 0);
    let Payload::Scan(s) = document(&text).payload else {
        panic!("wrong payload")
    };
    assert!(s.sufficiency_violations.is_empty());
    assert_eq!(run(&["conjecture", "--p", "4"]).0, 1);
}

#[test]
fn witness_for_bipermutive_rule_has_collision() {
    let (code, text) = run(&["witness", "m=3; d=2; f=x1+x2^2+2*x3"]);
    assert_eq!(code, 0);
    let Payload::Witness(w) = document(&text).payload else {
        panic!("wrong payload")
    };
    assert!(!w.injective.verdict && w.validated);
    let c = w.collision.expect("collision");
    assert_ne!(c.u, c.v);
    assert_eq!(c.u.len(), 2 * c.window + 1);
}

#[test]
fn trace_writes_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.pgm");
    let p = path.to_str().unwrap();
    let (code, _) = run(&[
        "trace",
        "m=5; d=2; f=x1^3+2*x2+x3^2",
        "--seed",
        "9",
        "--width",
        "10",
        "--steps",
        "4",
        "-o",
        p,
    ]);
    assert_eq!(code, 0);
    let pgm = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = pgm.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "P2");
    assert_eq!(lines[1], "10 5");
    assert_eq!(lines.len(), 3 + 5);
    assert!(pgm.contains("# seed: 9"));
    let (_, again) = run(&[
        "trace",
        "m=5; d=2; f=x1^3+2*x2+x3^2",
        "--seed",
        "9",
        "--width",
        "10",
        "--steps",
        "4",
    ]);
    assert_eq!(again, pgm);
}

#[test]
fn interpolation_paths() {
    let (code, text) = run(&["interpolate", "--m", "5", "--values", "1,0,0,0,0"]);
    assert_eq!(code, 0);
    let Payload::Interpolation(i) = document(&text).payload else {
        panic!("wrong payload")
    };
    assert_eq!(i.coefficients, Some(vec![1, 0, 0, 0, 4]));
    let (_, text) = run(&["interpolate", "--m", "4", "--values", "1,0,0,0"]);
    let Payload::Interpolation(i) = document(&text).payload else {
        panic!("wrong payload")
    };
    assert!(!i.representable);
    let (_, text) = run(&["interpolate", "--m", "4", "--values", "0,1,0,1"]);
    let Payload::Interpolation(i) = document(&text).payload else {
        panic!("wrong payload")
    };
    assert!(i.representable);
}

#[test]
fn errors_are_documents() {
    let (code, text) = run(&["analyze", "m=3; d=1; f=x1+"]);
    assert_eq!(code, 1);
    let doc = document(&text);
    assert_eq!(doc.exit_status, 1);
    assert!(matches!(doc.payload, Payload::Error(_)));
}

#[test]
fn published_schema_is_current() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema");
    let report = std::fs::read_to_string(format!("{root}/report.schema.json")).unwrap();
    let line = std::fs::read_to_string(format!("{root}/audit-line.schema.json")).unwrap();
    assert_eq!(report, cli::report_schema(), "regenerate with `ca-verify schema`");
    assert_eq!(
        line,
        cli::audit_line_schema(),
        "regenerate with `ca-verify schema --audit-line`"
    );
}

/// Validates emitted documents against the published schema with Python's
/// `jsonschema`; skipped when that is unavailable.
#[test]
fn documents_validate_against_schema() {
    let probe = Command::new("python3").args(["-c", "import jsonschema"]).output();
    if !probe.is_ok_and(|o| o.status.success()) {
        eprintln!("python3 jsonschema unavailable, skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let mut family = tempfile::NamedTempFile::new().unwrap();
    writeln!(family, "family=totally\nmoduli=3\nd=1\nq=1,2").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["analyze", "m=4; d=2; f=x1^2+x2+x3^2", "--timings"],
        vec!["examples"],
        vec!["audit", family.path().to_str().unwrap()],
        vec!["conjecture", "--p", "3", "--d", "1"],
        vec!["witness", "m=3; d=2; f=x1+x2^2+2*x3"],
        vec!["interpolate", "--m", "4", "--values", "1,0,0,0"],
        vec!["analyze", "m=2; d=0; f=x2"],
    ];
    let mut docs = Vec::new();
    let mut lines = Vec::new();
    for args in &cases {
        let (_, text) = run(args);
        let all: Vec<&str> = text.lines().collect();
        docs.push(all[all.len() - 1].to_string());
        lines.extend(all[..all.len() - 1].iter().map(|s| s.to_string()));
    }
    let docs_path = dir.path().join("docs.jsonl");
    let lines_path = dir.path().join("lines.jsonl");
    std::fs::write(&docs_path, docs.join("\n")).unwrap();
    std::fs::write(&lines_path, lines.join("\n")).unwrap();
    let schema_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema");
    let script = r#"
import json, sys, jsonschema
def check(schema_path, data_path):
    schema = json.load(open(schema_path))
    for line in open(data_path):
        if line.strip():
            jsonschema.validate(json.loads(line), schema)
check(sys.argv[1] + "/report.schema.json", sys.argv[2])
check(sys.argv[1] + "/audit-line.schema.json", sys.argv[3])
"#;
    let out = Command::new("python3")
        .args([
            "-c",
            script,
            schema_dir,
            docs_path.to_str().unwrap(),
            lines_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!lines.is_empty());
}
