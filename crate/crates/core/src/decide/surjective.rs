use std::collections::{HashMap, VecDeque};

use super::{DeBruijn, Decision, Witness};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rule::RuleTable;
use crate::zmod::Residue;

type Subset = Vec<u64>;

fn successor(g: &DeBruijn<'_>, subset: &Subset, label: Residue) -> Subset {
    let mut out = vec![0u64; subset.len()];
    for (w, &bits) in subset.iter().enumerate() {
        let mut bits = bits;
        while bits != 0 {
            let u = w * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            for a in 0..g.m {
                let (t, l) = g.edge(u, a);
                if l == label {
                    out[t / 64] |= 1 << (t % 64);
                }
            }
        }
    }
    out
}

/// Decides surjectivity by a subset construction over the de Bruijn graph.
///
/// Starting from the full vertex set, reading an output letter moves to the
/// set of endpoints of edges with that label. The rule is surjective iff
/// the empty set is unreachable. On failure the witness is the shortest
/// (then lexicographically smallest) word with no preimage.
pub fn decide_surjective(rule: &RuleTable, caps: &Caps) -> Result<Decision> {
    let g = DeBruijn::new(rule);
    let words = g.vertices.div_ceil(64);
    let mut full = vec![u64::MAX; words];
    if !g.vertices.is_multiple_of(64) {
        full[words - 1] = (1u64 << (g.vertices % 64)) - 1;
    }

    let mut index: HashMap<Subset, usize> = HashMap::new();
    // (parent state, label read to get here)
    let mut parents: Vec<Option<(usize, Residue)>> = vec![None];
    let mut states: Vec<Subset> = vec![full.clone()];
    index.insert(full, 0);
    let mut queue = VecDeque::from([0usize]);

    while let Some(s) = queue.pop_front() {
        for label in rule.modulus().residues() {
            let next = successor(&g, &states[s], label);
            if next.iter().all(|&w| w == 0) {
                let mut word = vec![label];
                let mut cur = s;
                while let Some((p, l)) = parents[cur] {
                    word.push(l);
                    cur = p;
                }
                word.reverse();
                return Ok(Decision {
                    verdict: false,
                    witness: Some(Witness::UnbalancedWord { word, count: 0 }),
                });
            }
            if !index.contains_key(&next) {
                Caps::check("subset states", states.len() as u128 + 1, caps.subset_states)?;
                index.insert(next.clone(), states.len());
                parents.push(Some((s, label)));
                states.push(next);
                queue.push_back(states.len() - 1);
            }
        }
    }
    Ok(Decision {
        verdict: true,
        witness: None,
    })
}

/// Number of words `u` of length `|w| + d` with `f*(u) = w`.
pub fn count_preimages(rule: &RuleTable, w: &[Residue]) -> Result<u128> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("preimage count needs a non-empty word".into()));
    }
    let g = DeBruijn::new(rule);
    let mut counts = vec![1u128; g.vertices];
    for &letter in w {
        let mut next = vec![0u128; g.vertices];
        for (u, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for a in 0..g.m {
                let (t, l) = g.edge(u, a);
                if l == letter {
                    next[t] = next[t].checked_add(c).ok_or(Error::CapExceeded {
                        what: "preimage count",
                        needed: u128::MAX,
                        cap: u128::MAX,
                    })?;
                }
            }
        }
        counts = next;
    }
    Ok(counts.iter().sum())
}

/// Balance check over every word of length `1..=max_len`: returns the first
/// word (by length, then lexicographically) whose preimage count is not
/// `m^d`.
pub fn first_unbalanced_word(rule: &RuleTable, max_len: usize) -> Result<Option<Witness>> {
    let m = rule.modulus().get() as usize;
    let expected = rule.context_count() as u128;
    for len in 1..=max_len {
        let mut word = vec![0 as Residue; len];
        loop {
            let count = count_preimages(rule, &word)?;
            if count != expected {
                let count = u64::try_from(count).map_err(|_| Error::CapExceeded {
                    what: "preimage count",
                    needed: count,
                    cap: u64::MAX as u128,
                })?;
                return Ok(Some(Witness::UnbalancedWord { word, count }));
            }
            let mut i = len;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                word[i] += 1;
                if word[i] as usize == m {
                    word[i] = 0;
                } else {
                    break;
                }
            }
            if word.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    Ok(None)
}
