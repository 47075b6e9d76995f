//! Local rules as full value tables, plus finite-word and periodic application.

mod expr;
mod separation;

pub use expr::{RuleExpression, Term};
pub use separation::{
    additive_component, classify, essential_positions, extract_monomial_at, interior_map, ResidualMap,
    SeparatedPosition, SeparationClass,
};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::zmod::{Modulus, Residue};

/// A local rule `f: Z_m^(d+1) -> Z_m` stored as its complete value table.
///
/// Windows `(x_1, ..., x_{d+1})` are indexed in mixed radix with `x_1` as
/// the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct RuleTable {
    modulus: Modulus,
    diameter: usize,
    table: Vec<Residue>,
}

fn table_size(m: Modulus, diameter: usize, caps: &Caps) -> Result<usize> {
    let size = (m.get() as u128).checked_pow(diameter as u32 + 1).unwrap_or(u128::MAX);
    Caps::check("rule table entries", size, caps.table_entries)?;
    Ok(size as usize)
}

impl RuleTable {
    pub fn new(modulus: Modulus, diameter: usize, table: Vec<Residue>) -> Result<Self> {
        Self::with_caps(modulus, diameter, table, &Caps::default())
    }

    pub fn with_caps(modulus: Modulus, diameter: usize, table: Vec<Residue>, caps: &Caps) -> Result<Self> {
        let size = table_size(modulus, diameter, caps)?;
        if table.len() != size {
            return Err(Error::InvalidArgument(format!(
                "rule table over Z_{modulus} with d={diameter} needs {size} entries, got {}",
                table.len()
            )));
        }
        if let Some(v) = table.iter().find(|&&v| !modulus.contains(v)) {
            return Err(Error::InvalidArgument(format!("table entry {v} not in Z_{modulus}")));
        }
        Ok(RuleTable {
            modulus,
            diameter,
            table,
        })
    }

    /// Tabulates `f` over every window.
    pub fn from_fn(modulus: Modulus, diameter: usize, f: impl Fn(&[Residue]) -> Residue) -> Result<Self> {
        Self::from_fn_with_caps(modulus, diameter, &Caps::default(), f)
    }

    pub fn from_fn_with_caps(
        modulus: Modulus,
        diameter: usize,
        caps: &Caps,
        f: impl Fn(&[Residue]) -> Residue,
    ) -> Result<Self> {
        let size = table_size(modulus, diameter, caps)?;
        let mut window = vec![0; diameter + 1];
        let table = (0..size)
            .map(|idx| {
                decode_window(modulus, idx, &mut window);
                f(&window) % modulus.get()
            })
            .collect();
        Ok(RuleTable {
            modulus,
            diameter,
            table,
        })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn arity(&self) -> usize {
        self.diameter + 1
    }

    /// Output anchor `floor(d/2)`.
    pub fn radius(&self) -> usize {
        self.diameter / 2
    }

    pub fn entries(&self) -> &[Residue] {
        &self.table
    }

    /// `m^d`, the number of de Bruijn vertices.
    pub fn context_count(&self) -> usize {
        self.table.len() / self.modulus.get() as usize
    }

    #[inline]
    pub fn at(&self, window_index: usize) -> Residue {
        self.table[window_index]
    }

    /// Mixed-radix index of a window; letters are reduced mod m.
    pub fn window_index(&self, window: &[Residue]) -> usize {
        let m = self.modulus.get() as usize;
        window.iter().fold(0, |acc, &x| acc * m + (x as usize % m))
    }

    /// Weight of position `j` (1-based) in the window index.
    pub fn stride(&self, j: usize) -> usize {
        (self.modulus.get() as usize).pow((self.arity() - j) as u32)
    }

    pub fn evaluate(&self, window: &[Residue]) -> Result<Residue> {
        if window.len() != self.arity() {
            return Err(Error::InvalidArgument(format!(
                "window has length {}, rule expects {}",
                window.len(),
                self.arity()
            )));
        }
        Ok(self.table[self.window_index(window)])
    }

    /// `f*`: applies the rule to every length-(d+1) window of `word`.
    pub fn f_star(&self, word: &[Residue]) -> Vec<Residue> {
        if word.len() <= self.diameter {
            return Vec::new();
        }
        word.windows(self.arity())
            .map(|w| self.table[self.window_index(w)])
            .collect()
    }

    /// Image of the periodic configuration `x`, anchored so that
    /// `F(x)_i = f(x_{i-rho}, ..., x_{i-rho+d})`.
    pub fn apply_periodic(&self, x: &CyclicWord) -> CyclicWord {
        let n = x.letters.len();
        let rho = self.radius();
        let m = self.modulus.get() as usize;
        let letters = (0..n)
            .map(|i| {
                let idx = (0..self.arity()).fold(0usize, |acc, k| {
                    let cell = (i + k + n * (rho / n + 1) - rho) % n;
                    acc * m + x.letters[cell] as usize
                });
                self.table[idx]
            })
            .collect();
        CyclicWord {
            modulus: x.modulus,
            letters,
        }
    }

    /// Parses the table file format: a header line `m d`, then `m^(d+1)`
    /// whitespace-separated values.
    pub fn parse_table_file(text: &str, caps: &Caps) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut next_int = |what: &str| -> Result<u64> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::parse(0, format!("missing {what}")))?;
            tok.parse().map_err(|_| Error::parse(0, format!("bad {what} `{tok}`")))
        };
        let m = Modulus::new(u32::try_from(next_int("modulus")?).map_err(|_| Error::InvalidModulus(u64::MAX))?)?;
        let d = next_int("diameter")? as usize;
        let size = table_size(m, d, caps)?;
        let mut table = Vec::with_capacity(size);
        for i in 0..size {
            table.push(next_int(&format!("entry {i}"))? as Residue);
        }
        if tokens.next().is_some() {
            return Err(Error::parse(0, "trailing data after rule table"));
        }
        Self::with_caps(m, d, table, caps)
    }

    pub fn to_table_file(&self) -> String {
        let mut out = format!("{} {}\n", self.modulus, self.diameter);
        for row in self.table.chunks(self.modulus.get() as usize) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Writes the digits of `idx` into `window`, most significant first.
pub fn decode_window(m: Modulus, mut idx: usize, window: &mut [Residue]) {
    let m = m.get() as usize;
    for slot in window.iter_mut().rev() {
        *slot = (idx % m) as Residue;
        idx /= m;
    }
}

/// The spatially periodic configuration `(letters)^inf`, with `letters[0]`
/// at cell 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct CyclicWord {
    modulus: Modulus,
    letters: Vec<Residue>,
}

impl CyclicWord {
    pub fn new(modulus: Modulus, letters: Vec<Residue>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidArgument("cyclic word must be non-empty".into()));
        }
        if let Some(v) = letters.iter().find(|&&v| !modulus.contains(v)) {
            return Err(Error::InvalidArgument(format!("letter {v} not in Z_{modulus}")));
        }
        Ok(CyclicWord { modulus, letters })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn letters(&self) -> &[Residue] {
        &self.letters
    }

    pub fn period(&self) -> usize {
        self.letters.len()
    }

    /// Shift left by `k` cells: the result's cell 0 holds this word's cell `k`.
    pub fn rotate(&self, k: usize) -> CyclicWord {
        let mut letters = self.letters.clone();
        let n = letters.len();
        letters.rotate_left(k % n);
        CyclicWord {
            modulus: self.modulus,
            letters,
        }
    }

    /// Letters of cells `0..len` of the configuration.
    pub fn unroll(&self, len: usize) -> Vec<Residue> {
        (0..len).map(|i| self.letters[i % self.letters.len()]).collect()
    }

    /// Smallest period of the configuration.
    pub fn primitive_period(&self) -> usize {
        let n = self.letters.len();
        (1..=n)
            .find(|&p| n.is_multiple_of(p) && (0..n).all(|i| self.letters[i] == self.letters[i % p]))
            .unwrap_or(n)
    }

    /// Whether both words denote the same configuration.
    pub fn same_configuration(&self, other: &CyclicWord) -> bool {
        let len = num_integer::lcm(self.period(), other.period());
        self.modulus == other.modulus && self.unroll(len) == other.unroll(len)
    }

    /// Whether the configurations agree up to a shift.
    pub fn rotation_equivalent(&self, other: &CyclicWord) -> bool {
        let len = num_integer::lcm(self.period(), other.period());
        let a = self.unroll(len);
        let b = CyclicWord {
            modulus: other.modulus,
            letters: other.unroll(len),
        };
        self.modulus == other.modulus && (0..len).any(|k| b.rotate(k).letters == a)
    }
}

impl std::fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|v| v.to_string()).collect();
        write!(f, "({})^inf", parts.join(","))
    }
}
