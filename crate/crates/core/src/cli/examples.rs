//! Recomputation of the worked examples for the separated-rule criteria.

use super::report::{CheckStatus, ExampleCheck, ExamplesReport};
use crate::caps::Caps;
use crate::criteria::{criterion_surjectivity_sufficient, permutive_bruteforce, Outcome};
use crate::decide::{decide_injective, decide_surjective};
use crate::error::Result;
use crate::poly::{is_permutation_poly, UniPoly};
use crate::rule::{classify, CyclicWord, RuleExpression, RuleTable};
use crate::zmod::Modulus;

struct Checks {
    rule: String,
    out: Vec<ExampleCheck>,
}

impl Checks {
    fn push(&mut self, claim: &str, expected: impl ToString, computed: impl ToString, ok: bool) {
        self.out.push(ExampleCheck {
            rule: self.rule.clone(),
            claim: claim.to_string(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            status: if ok { CheckStatus::Ok } else { CheckStatus::Discrepancy },
        });
    }

    fn flag(&mut self, claim: &str, expected: bool, computed: bool) {
        self.push(claim, expected, computed, expected == computed);
    }

    /// `F(x) = y` up to rotation, as the printed notation fixes no anchor.
    fn image(&mut self, rule: &RuleTable, x: &[u32], y: &[u32]) -> Result<()> {
        let m = rule.modulus();
        let x = CyclicWord::new(m, x.to_vec())?;
        let y = CyclicWord::new(m, y.to_vec())?;
        let img = rule.apply_periodic(&x);
        let claim = format!("F({x})");
        self.push(&claim, &y, &img, img.rotation_equivalent(&y));
        Ok(())
    }
}

fn load(src: &str) -> Result<(RuleTable, Checks)> {
    let e = RuleExpression::parse(src)?;
    Ok((
        e.to_table(&Caps::default())?,
        Checks {
            rule: src.to_string(),
            out: Vec::new(),
        },
    ))
}

fn poly(m: u32, coeffs: &[u64]) -> UniPoly {
    UniPoly::new(Modulus::new(m).expect("valid modulus"), coeffs.iter().copied())
}

/// Every printed claim of the three worked examples, recomputed.
pub fn run_examples(caps: &Caps) -> Result<ExamplesReport> {
    let mut checks = Vec::new();

    let (r, mut c) = load("m=4; d=2; f=x1^2+x2+x3^2")?;
    c.flag("surjective", true, decide_surjective(&r, caps)?.verdict);
    c.flag("left permutive", false, permutive_bruteforce(&r, 1));
    c.flag("right permutive", false, permutive_bruteforce(&r, 3));
    let v = criterion_surjectivity_sufficient(&r, &classify(&r));
    c.push(
        "gcd sufficient condition",
        "fails",
        format!("{:?}", v.raw).to_lowercase(),
        v.raw == Outcome::Fails,
    );
    checks.append(&mut c.out);

    let (r, mut c) = load("m=7; d=2; f=x1^4+3*x2")?;
    c.flag(
        "x^4 + 3*x permutes Z_7",
        true,
        is_permutation_poly(&poly(7, &[0, 3, 0, 0, 1])),
    );
    c.image(&r, &[5, 6], &[6, 2])?;
    c.image(&r, &[4, 3], &[6, 2])?;
    let inj = decide_injective(&r, caps)?;
    let validated = inj.witness.as_ref().is_some_and(|w| w.validate(&r));
    c.push(
        "injective",
        false,
        format!("{} (witness validated: {validated})", inj.verdict),
        !inj.verdict && validated,
    );
    checks.append(&mut c.out);

    let (r, mut c) = load("m=5; d=2; f=x1^3+2*x2+x3^2")?;
    c.image(&r, &[1, 0], &[2])?;
    c.image(&r, &[3], &[2])?;
    c.image(&r, &[3, 0], &[3, 4])?;
    c.image(&r, &[4, 1], &[3, 4])?;
    c.flag("injective", false, decide_injective(&r, caps)?.verdict);
    c.flag(
        "x^3 + 2*x + x^2 permutes Z_5",
        true,
        is_permutation_poly(&poly(5, &[0, 2, 1, 1])),
    );
    c.flag(
        "x^3 + 2*x permutes Z_5",
        false,
        is_permutation_poly(&poly(5, &[0, 2, 0, 1])),
    );
    c.flag("x^2 permutes Z_5", false, is_permutation_poly(&poly(5, &[0, 0, 1])));
    checks.append(&mut c.out);

    let discrepancies = checks.iter().filter(|c| c.status == CheckStatus::Discrepancy).count();
    Ok(ExamplesReport { checks, discrepancies })
}
