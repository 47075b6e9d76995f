//! The `ca-verify` command line.
//!
//! Exit codes: 0 success (whatever the verdicts), 1 parse or argument
//! error, 2 resource cap exceeded, 3 `--expect` mismatch, 4 sufficiency
//! violation on a prime modulus.

mod examples;
pub mod report;

pub use examples::run_examples;
pub use report::*;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::criteria::{self, CriterionId, Family, FamilySpec, ScanBounds};
use crate::decide::{bipermutive_collision, decide_injective};
use crate::error::{Error, Result};
use crate::poly::{interpolate_prime, representability_search, FunctionTable};
use crate::rule::{classify, CyclicWord, RuleExpression, RuleTable};
use crate::zmod::{Modulus, Residue};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_CAPS: i32 = 2;
pub const EXIT_EXPECT: i32 = 3;
pub const EXIT_SUFFICIENCY: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "ca-verify",
    version,
    about = "Exact analysis of one-dimensional cellular automata over Z_m"
)]
pub struct Cli {
    /// Output format; text is for humans and not schema-stable.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads for audits and scans (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RuleSource {
    /// Rule expression, e.g. "m=4; d=2; f=x1^2+x2+x3^2".
    #[arg(required_unless_present = "table", conflicts_with = "table")]
    pub rule: Option<String>,
    /// Table file: "m d" then m^(d+1) values in window order.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a rule, run every criterion and both deciders.
    Analyze {
        #[command(flatten)]
        source: RuleSource,
        /// Required verdicts, e.g. surjective, not-injective, permutive:3.
        #[arg(long, value_parser = parse_expectation)]
        expect: Vec<Expectation>,
        /// Include wall-clock timings (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Recompute the worked examples, marking contradicted claims.
    Examples,
    /// Audit every rule of a family file, one JSON line per rule.
    Audit { family: PathBuf },
    /// Compare surjectivity with the gcd condition on LR-separated rules over Z_p.
    Conjecture {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Exponent range or list, e.g. 1..4 or 2,4.
        #[arg(long, default_value = "1..4")]
        q: String,
        /// units | nonzero | one
        #[arg(long, default_value = "units")]
        coeffs: String,
        /// all | sample:N | zero
        #[arg(long, default_value = "all")]
        pi: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        timings: bool,
    },
    /// Extract a non-injectivity witness (diamond or periodic pair).
    Witness {
        #[command(flatten)]
        source: RuleSource,
        /// Half-width W of the explicit collision for bipermutive rules.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Write a space-time diagram as an ASCII PGM.
    Trace {
        #[command(flatten)]
        source: RuleSource,
        /// Initial periodic row, e.g. 5,6.
        #[arg(long, conflicts_with = "seed")]
        init: Option<String>,
        /// Seed for a random initial row.
        #[arg(long)]
        seed: Option<u64>,
        /// Row width; a multiple of the initial word's length.
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        steps: usize,
        /// Output file (stdout when absent).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Find a polynomial inducing a function Z_m -> Z_m.
    Interpolate {
        #[arg(long)]
        m: u32,
        /// Comma-separated values at 0, 1, ..., m-1.
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        values: Option<String>,
        /// File of whitespace-separated values.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Print the JSON schema of report documents (or of audit lines).
    Schema {
        #[arg(long)]
        audit_line: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Surjective(bool),
    Injective(bool),
    Permutive(usize, bool),
}

fn parse_expectation(s: &str) -> std::result::Result<Expectation, String> {
    let (negated, body) = match s.strip_prefix("not-").or_else(|| s.strip_prefix('!')) {
        Some(b) => (true, b),
        None => (false, s),
    };
    match body {
        "surjective" => Ok(Expectation::Surjective(!negated)),
        "injective" | "bijective" | "reversible" => Ok(Expectation::Injective(!negated)),
        b => match b.strip_prefix("permutive:").map(str::parse::<usize>) {
            Some(Ok(j)) => Ok(Expectation::Permutive(j, !negated)),
            _ => Err(format!("unknown expectation `{s}`")),
        },
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAPS,
        _ => EXIT_PARSE,
    }
}

fn load_rule(src: &RuleSource, caps: &Caps) -> Result<(RuleTable, Option<RuleExpression>)> {
    match (&src.rule, &src.table) {
        (Some(text), _) => {
            let e = RuleExpression::parse(text)?;
            Ok((e.to_table(caps)?, Some(e)))
        }
        (None, Some(path)) => Ok((
            RuleTable::parse_table_file(&std::fs::read_to_string(path)?, caps)?,
            None,
        )),
        (None, None) => Err(Error::InvalidArgument("no rule given".into())),
    }
}

fn rule_label(rule: &RuleTable, expr: &Option<RuleExpression>) -> String {
    match expr {
        Some(e) => e.to_string(),
        None => format!("m={}; d={}; table", rule.modulus(), rule.diameter()),
    }
}

fn parse_letters(m: Modulus, s: &str) -> Result<Vec<Residue>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let v: Residue = t
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad letter `{t}`")))?;
            if m.contains(v) {
                Ok(v)
            } else {
                Err(Error::InvalidArgument(format!("letter {v} not in Z_{m}")))
            }
        })
        .collect()
}

struct Outcome {
    payload: Payload,
    exit: i32,
    /// Emitted verbatim instead of a report (trace to stdout, schema).
    raw: Option<String>,
}

impl Outcome {
    fn report(payload: Payload) -> Self {
        Outcome {
            payload,
            exit: EXIT_OK,
            raw: None,
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// writes its output. Returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let command: Vec<String> = args.iter().skip(1).cloned().collect();
    let result = Caps::from_env().and_then(|caps| execute(&cli, &caps, out));
    let (payload, exit, raw) = match result {
        Ok(o) => (o.payload, o.exit, o.raw),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            (
                Payload::Error(ErrorReport { message: e.to_string() }),
                exit_code(&e),
                None,
            )
        }
    };
    if let Some(text) = raw {
        let _ = out.write_all(text.as_bytes());
        return exit;
    }
    let doc = ReportDocument {
        schema_version: SCHEMA_VERSION,
        command,
        payload,
        exit_status: exit,
    };
    let _ = match cli.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&doc).expect("reports serialize")),
        Format::Text => write!(out, "{}", render_text(&doc)),
    };
    exit
}

fn execute(cli: &Cli, caps: &Caps, out: &mut dyn Write) -> Result<Outcome> {
    match &cli.command {
        Command::Analyze {
            source,
            expect,
            timings,
        } => {
            let (rule, expr) = load_rule(source, caps)?;
            let report = criteria::analyze(&rule, expr.as_ref(), caps, *timings)?;
            let truth = &report.audit.ground_truth;
            let met = expect.iter().all(|e| match *e {
                Expectation::Surjective(b) => truth.surjective.verdict == b,
                Expectation::Injective(b) => truth.injective.verdict == b,
                Expectation::Permutive(j, b) => truth.permutive.get(j.wrapping_sub(1)).copied() == Some(b),
            });
            let mut o = Outcome::report(Payload::Analysis(report));
            if !met {
                o.exit = EXIT_EXPECT;
            }
            Ok(o)
        }
        Command::Examples => Ok(Outcome::report(Payload::Examples(run_examples(caps)?))),
        Command::Audit { family } => {
            let spec = FamilySpec::parse(&std::fs::read_to_string(family)?)?;
            let family = Family::new(spec, caps)?;
            let mut violation = false;
            let summary = criteria::audit(&family, caps, cli.jobs, |r| {
                violation |= Modulus::new(r.modulus).is_ok_and(|m| m.is_prime())
                    && r.discrepancies
                        .iter()
                        .any(|d| d.criterion == CriterionId::SurjectivitySufficient);
                let line = match cli.format {
                    Format::Json => serde_json::to_string(r).expect("reports serialize"),
                    Format::Text => audit_line_text(r),
                };
                writeln!(out, "{line}")?;
                Ok(())
            })?;
            let mut o = Outcome::report(Payload::Audit(summary));
            if violation {
                o.exit = EXIT_SUFFICIENCY;
            }
            Ok(o)
        }
        Command::Conjecture {
            p,
            d,
            q,
            coeffs,
            pi,
            seed,
            timings,
        } => {
            // reuse the family-file parser for the value syntax
            let spec = FamilySpec::parse(&format!(
                "family=lr\nmoduli={p}\nd={d}\nq={q}\ncoeffs={coeffs}\npi={pi}\nseed={seed}"
            ))?;
            let bounds = ScanBounds {
                diameter: spec.diameter,
                exponents: spec.exponents,
                coeffs: spec.coeffs,
                pi: spec.pi,
                seed: spec.seed,
            };
            let report = criteria::conjecture_scan(*p, &bounds, caps, cli.jobs, *timings)?;
            let violated = !report.sufficiency_violations.is_empty();
            let mut o = Outcome::report(Payload::Scan(report));
            if violated {
                o.exit = EXIT_SUFFICIENCY;
            }
            Ok(o)
        }
        Command::Witness { source, window } => {
            let (rule, expr) = load_rule(source, caps)?;
            let injective = decide_injective(&rule, caps)?;
            let validated = injective
                .witness
                .as_ref()
                .map_or(injective.verdict, |w| w.validate(&rule));
            let class = classify(&rule);
            let collision = match (class.leftmost, class.rightmost) {
                (Some(l), Some(r)) if l < r => {
                    let w = window.unwrap_or(r - l + rule.diameter() + 2);
                    bipermutive_collision(&rule, &class, w)
                        .ok()
                        .map(|(u, v)| CollisionWitness {
                            window: w,
                            image: rule.f_star(&u),
                            u,
                            v,
                        })
                }
                _ => None,
            };
            Ok(Outcome::report(Payload::Witness(WitnessReport {
                rule: rule_label(&rule, &expr),
                injective,
                validated,
                collision,
            })))
        }
        Command::Trace {
            source,
            init,
            seed,
            width,
            steps,
            output,
        } => {
            let (rule, expr) = load_rule(source, caps)?;
            if *steps == 0 {
                return Err(Error::InvalidArgument("--steps must be at least 1".into()));
            }
            let m = rule.modulus();
            let first: Vec<Residue> = match (init, seed) {
                (Some(text), _) => {
                    let letters = parse_letters(m, text)?;
                    if letters.is_empty() {
                        return Err(Error::InvalidArgument("empty --init".into()));
                    }
                    let w = width.unwrap_or(letters.len());
                    if w % letters.len() != 0 {
                        return Err(Error::InvalidArgument(
                            "--width must be a multiple of the --init length".into(),
                        ));
                    }
                    CyclicWord::new(m, letters)?.unroll(w)
                }
                (None, Some(s)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*s);
                    (0..width.unwrap_or(64)).map(|_| rng.gen_range(0..m.get())).collect()
                }
                (None, None) => return Err(Error::InvalidArgument("trace needs --init or --seed".into())),
            };
            if first.is_empty() {
                return Err(Error::InvalidArgument("--width must be positive".into()));
            }
            let mut rows = vec![first];
            for _ in 0..*steps {
                let cur = CyclicWord::new(m, rows.last().unwrap().clone())?;
                rows.push(rule.apply_periodic(&cur).letters().to_vec());
            }
            let label = rule_label(&rule, &expr);
            let pgm = render_pgm(&label, m, rule.radius(), *seed, &rows);
            match output {
                Some(path) => {
                    std::fs::write(path, &pgm)?;
                    Ok(Outcome::report(Payload::Trace(TraceReport {
                        rule: label,
                        width: rows[0].len(),
                        steps: *steps,
                        seed: *seed,
                        output: Some(path.display().to_string()),
                        rows,
                    })))
                }
                None => Ok(Outcome {
                    payload: Payload::Error(ErrorReport { message: String::new() }),
                    exit: EXIT_OK,
                    raw: Some(pgm),
                }),
            }
        }
        Command::Interpolate { m, values, file } => {
            let modulus = Modulus::new(*m)?;
            let text = match (values, file) {
                (Some(v), _) => v.clone(),
                (None, Some(f)) => std::fs::read_to_string(f)?,
                (None, None) => return Err(Error::InvalidArgument("no values given".into())),
            };
            let values = parse_letters(modulus, &text)?;
            let table = FunctionTable::new(modulus, values.clone())?;
            let (method, found) = if modulus.is_prime() {
                (InterpolationMethod::Interpolation, Some(interpolate_prime(&table)?))
            } else {
                (
                    InterpolationMethod::ExhaustiveSearch,
                    representability_search(&table, caps)?,
                )
            };
            Ok(Outcome::report(Payload::Interpolation(InterpolationReport {
                modulus: *m,
                values,
                method,
                representable: found.is_some(),
                polynomial: found.as_ref().map(|p| p.to_string()),
                coefficients: found.map(|p| p.coeffs().to_vec()),
            })))
        }
        Command::Schema { audit_line } => {
            let schema = if *audit_line {
                audit_line_schema()
            } else {
                report_schema()
            };
            Ok(Outcome {
                payload: Payload::Error(ErrorReport { message: String::new() }),
                exit: EXIT_OK,
                raw: Some(schema),
            })
        }
    }
}

/// JSON schema of [`ReportDocument`], pretty-printed.
pub fn report_schema() -> String {
    serde_json::to_string_pretty(&schemars::schema_for!(ReportDocument)).expect("schema serializes") + "\n"
}

/// JSON schema of one streamed audit line.
pub fn audit_line_schema() -> String {
    serde_json::to_string_pretty(&schemars::schema_for!(crate::criteria::AuditReport)).expect("schema serializes")
        + "\n"
}

/// ASCII PGM, one row per time step, gray level `floor(255 k / (m-1))`.
pub fn render_pgm(label: &str, m: Modulus, radius: usize, seed: Option<u64>, rows: &[Vec<Residue>]) -> String {
    let mut s = String::from("P2\n");
    s.push_str(&format!("# rule: {label}\n"));
    s.push_str(&format!(
        "# anchor: F(x)_i = f(x_(i-{radius}) .. x_(i-{radius}+d)), radius floor(d/2)\n"
    ));
    match seed {
        Some(k) => s.push_str(&format!("# seed: {k}\n")),
        None => s.push_str("# seed: none\n"),
    }
    s.push_str(&format!("{} {}\n255\n", rows.first().map_or(0, Vec::len), rows.len()));
    let top = (m.get() - 1) as u64;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&k| (255 * k as u64 / top).to_string()).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("ca-verify").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn expectations_parse() {
        assert_eq!(parse_expectation("surjective"), Ok(Expectation::Surjective(true)));
        assert_eq!(parse_expectation("not-injective"), Ok(Expectation::Injective(false)));
        assert_eq!(parse_expectation("permutive:3"), Ok(Expectation::Permutive(3, true)));
        assert!(parse_expectation("fast").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["analyze", "m=3; d=0; f=x1"]).0, EXIT_OK);
        assert_eq!(run_args(&["analyze", "m=3; d=0; f=x9"]).0, EXIT_PARSE);
        assert_eq!(
            run_args(&["analyze", "m=3; d=0; f=x1", "--expect", "not-surjective"]).0,
            EXIT_EXPECT
        );
        assert_eq!(run_args(&["analyze", "m=3; d=30; f=x1"]).0, EXIT_CAPS);
        assert_eq!(run_args(&["bogus"]).0, EXIT_PARSE);
        assert_eq!(
            run_args(&["interpolate", "--m", "4", "--values", "1,0,0"]).0,
            EXIT_PARSE
        );
    }

    #[test]
    fn pgm_gray_levels() {
        let m = Modulus::new(3).unwrap();
        let s = render_pgm("r", m, 0, None, &[vec![0, 1, 2]]);
        assert!(s.starts_with("P2\n"));
        assert!(s.ends_with("3 1\n255\n0 127 255\n"));
    }
}
