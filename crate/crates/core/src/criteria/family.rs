//! Rule families for audits and scans, enumerated lazily by index.
//!
//! A family file holds `key=value` lines (`#` starts a comment):
//!
//! ```text
//! family=shift|lr|totally|tables
//! moduli=3,5,7
//! d=2
//! q=1..4            # or a list such as 2,4
//! coeffs=units      # units | nonzero | one
//! pi=all            # lr only: all | sample:N | zero
//! sample=N          # optional: N members drawn from the whole family
//! seed=42
//! position=1        # shift only
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rule::{classify, RuleExpression, RuleTable, SeparationClass, Term};
use crate::zmod::{Modulus, Residue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `a x_j^q` at a single position.
    Shift,
    /// `a x_1^q + pi(x_2..x_d) + b x_{d+1}^q'` with `pi` a table.
    Lr,
    /// `sum a_i x_i^q_i` over every position.
    Totally,
    /// Every rule table.
    Tables,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum CoeffSet {
    Units,
    Nonzero,
    One,
}

impl CoeffSet {
    pub fn values(self, m: Modulus) -> Vec<Residue> {
        match self {
            CoeffSet::Units => m.residues().filter(|&a| m.is_unit(a)).collect(),
            CoeffSet::Nonzero => (1..m.get()).collect(),
            CoeffSet::One => vec![1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum PiMode {
    All,
    Sample(u64),
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub moduli: Vec<Modulus>,
    pub diameter: usize,
    pub exponents: Vec<u64>,
    pub coeffs: CoeffSet,
    pub pi: PiMode,
    pub sample: Option<u64>,
    pub seed: u64,
    pub position: usize,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec {
            kind: FamilyKind::Shift,
            moduli: Vec::new(),
            diameter: 0,
            exponents: (1..=4).collect(),
            coeffs: CoeffSet::Units,
            pi: PiMode::All,
            sample: None,
            seed: 0,
            position: 1,
        }
    }
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("`{key}`: expected an integer, got `{v}`")))
}

/// `a..b`, `a..=b` or a comma-separated list.
fn parse_range_list(key: &str, v: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b) = (parse_u64(key, a)?, parse_u64(key, b)?);
            if a > b {
                return Err(Error::InvalidArgument(format!("`{key}`: empty range {part}")));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_u64(key, part)?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument(format!("`{key}` is empty")));
    }
    Ok(out)
}

impl FamilySpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = FamilySpec::default();
        let mut kind_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno + 1, format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "family" => {
                    kind_seen = true;
                    spec.kind = match value {
                        "shift" => FamilyKind::Shift,
                        "lr" => FamilyKind::Lr,
                        "totally" => FamilyKind::Totally,
                        "tables" => FamilyKind::Tables,
                        other => return Err(Error::InvalidArgument(format!("unknown family `{other}`"))),
                    }
                }
                "moduli" | "m" => {
                    spec.moduli = parse_range_list(key, value)?
                        .into_iter()
                        .map(|m| {
                            u32::try_from(m)
                                .map_err(|_| Error::InvalidModulus(m))
                                .and_then(Modulus::new)
                        })
                        .collect::<Result<_>>()?
                }
                "d" => spec.diameter = parse_u64(key, value)? as usize,
                "q" => spec.exponents = parse_range_list(key, value)?,
                "coeffs" => {
                    spec.coeffs = match value {
                        "units" => CoeffSet::Units,
                        "nonzero" => CoeffSet::Nonzero,
                        "one" => CoeffSet::One,
                        other => return Err(Error::InvalidArgument(format!("unknown coefficient set `{other}`"))),
                    }
                }
                "pi" => {
                    spec.pi = match value {
                        "all" => PiMode::All,
                        "zero" => PiMode::Zero,
                        v => match v.strip_prefix("sample:") {
                            Some(n) => PiMode::Sample(parse_u64(key, n)?),
                            None => return Err(Error::InvalidArgument(format!("unknown pi mode `{v}`"))),
                        },
                    }
                }
                "sample" => spec.sample = Some(parse_u64(key, value)?),
                "seed" => spec.seed = parse_u64(key, value)?,
                "position" => spec.position = parse_u64(key, value)? as usize,
                other => return Err(Error::InvalidArgument(format!("unknown key `{other}`"))),
            }
        }
        if !kind_seen {
            return Err(Error::InvalidArgument("missing `family=`".into()));
        }
        if spec.moduli.is_empty() {
            return Err(Error::InvalidArgument("missing `moduli=`".into()));
        }
        if spec.exponents.contains(&0) {
            return Err(Error::InvalidArgument("exponent 0 is not a variable occurrence".into()));
        }
        if spec.kind == FamilyKind::Shift && (spec.position == 0 || spec.position > spec.diameter + 1) {
            return Err(Error::InvalidArgument(format!(
                "position {} outside 1..={}",
                spec.position,
                spec.diameter + 1
            )));
        }
        if spec.kind == FamilyKind::Lr && spec.diameter == 0 {
            return Err(Error::InvalidArgument("lr family needs d >= 1".into()));
        }
        Ok(spec)
    }
}

/// One rule of a family.
#[derive(Debug, Clone)]
pub struct Member {
    pub label: String,
    pub rule: RuleTable,
    pub expression: Option<RuleExpression>,
    /// Written exponents `(position, q)` for rules built from tables.
    pub hints: Vec<(usize, u64)>,
    /// `(a_l, q_l, a_r, q_r, pi table)` for `lr` members.
    pub lr_parts: Option<(Residue, u64, Residue, u64, Vec<Residue>)>,
}

impl Member {
    pub fn classify(&self) -> SeparationClass {
        let class = classify(&self.rule);
        match &self.expression {
            Some(e) => class.with_raw_exponents(e),
            None => class.with_exponent_hints(&self.hints),
        }
    }
}

#[derive(Debug, Clone)]
struct Block {
    modulus: Modulus,
    /// Size of the full enumeration for this modulus.
    full: u128,
    /// Members taken from it (the full count unless sampling).
    taken: u64,
    /// Number of interior tables per (coefficient, exponent) choice, `lr` only.
    pi_count: u128,
}

/// A validated family with its member count.
#[derive(Debug, Clone)]
pub struct Family {
    pub spec: FamilySpec,
    blocks: Vec<Block>,
    caps: Caps,
}

fn checked_pow(base: u128, exp: u128) -> u128 {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .unwrap_or(u128::MAX)
}

fn mul_sat(xs: &[u128]) -> u128 {
    xs.iter().fold(1u128, |acc, &x| acc.saturating_mul(x))
}

impl Family {
    pub fn new(spec: FamilySpec, caps: &Caps) -> Result<Self> {
        let d = spec.diameter;
        let nq = spec.exponents.len() as u128;
        let mut blocks = Vec::new();
        for &m in &spec.moduli {
            let mm = m.get() as u128;
            Caps::check("rule table entries", checked_pow(mm, d as u128 + 1), caps.table_entries)?;
            let nc = spec.coeffs.values(m).len() as u128;
            let mut pi_count = 1;
            let full = match spec.kind {
                FamilyKind::Shift => nc * nq,
                FamilyKind::Totally => checked_pow(nc * nq, d as u128 + 1),
                FamilyKind::Tables => checked_pow(mm, checked_pow(mm, d as u128 + 1)),
                FamilyKind::Lr => {
                    pi_count = match spec.pi {
                        PiMode::All => checked_pow(mm, checked_pow(mm, d as u128 - 1)),
                        PiMode::Sample(n) => n as u128,
                        PiMode::Zero => 1,
                    };
                    mul_sat(&[nc, nc, nq, nq, pi_count])
                }
            };
            let taken = match spec.sample {
                Some(n) => n,
                None => {
                    Caps::check("family size", full, caps.family_size)?;
                    full as u64
                }
            };
            blocks.push(Block {
                modulus: m,
                full,
                taken,
                pi_count,
            });
        }
        let total: u128 = blocks.iter().map(|b| b.taken as u128).sum();
        Caps::check("family size", total, caps.family_size)?;
        Ok(Family {
            spec,
            blocks,
            caps: *caps,
        })
    }

    pub fn len(&self) -> u64 {
        self.blocks.iter().map(|b| b.taken).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        rng.set_stream(stream);
        rng
    }

    /// Member `i` in enumeration order.
    pub fn member(&self, i: u64) -> Result<Member> {
        let mut rest = i;
        let (bi, block) = self
            .blocks
            .iter()
            .enumerate()
            .find(|(_, b)| {
                if rest < b.taken {
                    true
                } else {
                    rest -= b.taken;
                    false
                }
            })
            .ok_or_else(|| Error::InvalidArgument(format!("member {i} out of range")))?;
        let index = match self.spec.sample {
            Some(_) => self.rng(((bi as u64) << 48) ^ rest).gen_range(0..block.full),
            None => rest as u128,
        };
        self.build(block, bi, index)
    }

    fn build(&self, block: &Block, bi: usize, mut index: u128) -> Result<Member> {
        let m = block.modulus;
        let d = self.spec.diameter;
        let coeffs = self.spec.coeffs.values(m);
        let qs = &self.spec.exponents;
        let mut digit = |radix: u128| -> u128 {
            let v = index % radix;
            index /= radix;
            v
        };
        match self.spec.kind {
            FamilyKind::Shift => {
                let qi = digit(qs.len() as u128) as usize;
                let ci = digit(coeffs.len() as u128) as usize;
                let term = Term {
                    coefficient: coeffs[ci] as u64,
                    factors: vec![(self.spec.position, qs[qi])],
                };
                self.member_from_expression(RuleExpression {
                    modulus: m,
                    diameter: d,
                    terms: vec![term],
                })
            }
            FamilyKind::Totally => {
                // position d+1 is the least significant choice
                let mut terms = Vec::with_capacity(d + 1);
                for pos in (1..=d + 1).rev() {
                    let qi = digit(qs.len() as u128) as usize;
                    let ci = digit(coeffs.len() as u128) as usize;
                    terms.push(Term {
                        coefficient: coeffs[ci] as u64,
                        factors: vec![(pos, qs[qi])],
                    });
                }
                terms.reverse();
                self.member_from_expression(RuleExpression {
                    modulus: m,
                    diameter: d,
                    terms,
                })
            }
            FamilyKind::Tables => {
                let size = (m.get() as usize).pow(d as u32 + 1);
                let mut table = vec![0; size];
                for slot in table.iter_mut().rev() {
                    *slot = digit(m.get() as u128) as Residue;
                }
                let rule = RuleTable::with_caps(m, d, table, &self.caps)?;
                let label = format!(
                    "m={m}; d={d}; table={}",
                    rule.entries()
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                );
                Ok(Member {
                    label,
                    rule,
                    expression: None,
                    hints: Vec::new(),
                    lr_parts: None,
                })
            }
            FamilyKind::Lr => {
                let pi_index = digit(block.pi_count);
                let ar = coeffs[digit(coeffs.len() as u128) as usize];
                let al = coeffs[digit(coeffs.len() as u128) as usize];
                let qr = qs[digit(qs.len() as u128) as usize];
                let ql = qs[digit(qs.len() as u128) as usize];
                let pi_len = (m.get() as usize).pow(d as u32 - 1);
                let pi: Vec<Residue> = match self.spec.pi {
                    PiMode::Zero => vec![0; pi_len],
                    PiMode::All => {
                        let mut rest = pi_index;
                        let mut t = vec![0; pi_len];
                        for slot in t.iter_mut().rev() {
                            *slot = (rest % m.get() as u128) as Residue;
                            rest /= m.get() as u128;
                        }
                        t
                    }
                    PiMode::Sample(_) => {
                        let mut rng = self.rng((1 << 63) | ((bi as u64) << 48) ^ pi_index as u64);
                        (0..pi_len).map(|_| rng.gen_range(0..m.get())).collect()
                    }
                };
                let (ml, mr) = (
                    crate::zmod::MonomialMap::new(m, al, ql)?,
                    crate::zmod::MonomialMap::new(m, ar, qr)?,
                );
                let pi_ref = &pi;
                let rule = RuleTable::from_fn_with_caps(m, d, &self.caps, |w| {
                    let inner = w[1..d]
                        .iter()
                        .fold(0usize, |acc, &x| acc * m.get() as usize + x as usize);
                    m.add(m.add(ml.apply(w[0]), pi_ref[inner]), mr.apply(w[d]))
                })?;
                let pi_text: Vec<String> = pi.iter().map(|v| v.to_string()).collect();
                let label = format!(
                    "m={m}; d={d}; f={}+pi[{}]+{}",
                    monomial_text(al, 1, ql),
                    pi_text.join(","),
                    monomial_text(ar, d + 1, qr)
                );
                Ok(Member {
                    label,
                    rule,
                    expression: None,
                    hints: vec![(1, ql), (d + 1, qr)],
                    lr_parts: Some((al, ql, ar, qr, pi)),
                })
            }
        }
    }

    fn member_from_expression(&self, e: RuleExpression) -> Result<Member> {
        let rule = e.to_table(&self.caps)?;
        Ok(Member {
            label: e.to_string(),
            rule,
            expression: Some(e),
            hints: Vec::new(),
            lr_parts: None,
        })
    }
}

fn monomial_text(a: Residue, pos: usize, q: u64) -> String {
    let coef = if a == 1 { String::new() } else { format!("{a}*") };
    let pow = if q == 1 { String::new() } else { format!("^{q}") };
    format!("{coef}x{pos}{pow}")
}
