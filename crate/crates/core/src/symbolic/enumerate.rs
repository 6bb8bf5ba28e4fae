//! Admissible word enumeration by pruned tree search, and growth-rate estimates.
//!
//! A partial word is summarized by the suffixes that still tie with a prefix of α (when
//! they start with 0) or of β (when they start with 1). Every other suffix has already
//! resolved strictly inside its interval and imposes nothing further.

use std::collections::{BTreeSet, HashMap};

use super::{AdmissibilityVariant, CriticalPair, Word};
use crate::error::{Error, Result};

/// Suffixes still tied with α or β, as `(against_beta, matched_len)`, oldest first.
type Ties = Vec<(bool, u32)>;

/// Extends the tie state by `s`; `None` when some suffix leaves its interval.
///
/// A tie that runs past the known critical prefix cannot be decided and is dropped,
/// which counts the word as admissible.
fn advance(crit: &CriticalPair, ties: &Ties, s: u8) -> Option<Ties> {
    let mut next = Ties::with_capacity(ties.len() + 1);
    for &(against_beta, len) in ties {
        let Some(t) = crit.symbol(against_beta, len as usize) else { continue };
        if s == t {
            next.push((against_beta, len + 1));
        } else if (s < t) == against_beta {
            // below β or above α
            return None;
        }
    }
    // the new suffix `s` ties with the first symbol of α (0) or β (1)
    next.push((s == 1, 1));
    Some(next)
}

/// All admissible words of length `n + 1`.
///
/// The three variants differ only in whether the endpoints α and β themselves belong to
/// the address space; finite prefixes cannot see that difference, so the result does not
/// depend on `variant`.
pub fn enumerate_words(crit: &CriticalPair, _variant: AdmissibilityVariant, n: usize) -> Result<BTreeSet<Word>> {
    crit.require_depth(n + 1)?;
    let mut out = BTreeSet::new();
    let mut stack: Vec<(Vec<u8>, Ties)> = vec![(Vec::new(), Ties::new())];
    while let Some((word, ties)) = stack.pop() {
        if word.len() == n + 1 {
            out.insert(Word::new(word));
            continue;
        }
        for s in [1u8, 0] {
            if let Some(t) = advance(crit, &ties, s) {
                let mut w = word.clone();
                w.push(s);
                stack.push((w, t));
            }
        }
    }
    Ok(out)
}

/// `|Ω_n|` for `n = 0..=max_n`.
pub fn count_words(crit: &CriticalPair, max_n: usize) -> Result<Vec<u128>> {
    crit.require_depth(max_n + 1)?;
    let mut memo: HashMap<(Ties, usize), u128> = HashMap::new();
    Ok((0..=max_n).map(|n| count_from(crit, &Ties::new(), n + 1, &mut memo)).collect())
}

fn count_from(crit: &CriticalPair, ties: &Ties, remaining: usize, memo: &mut HashMap<(Ties, usize), u128>) -> u128 {
    if remaining == 0 {
        return 1;
    }
    let key = (ties.clone(), remaining);
    if let Some(&c) = memo.get(&key) {
        return c;
    }
    let mut total = 0;
    for s in [0u8, 1] {
        if let Some(t) = advance(crit, ties, s) {
            total += count_from(crit, &t, remaining - 1, memo);
        }
    }
    memo.insert(key, total);
    total
}

/// Growth-rate estimates from word counts `counts[n] = |Ω_n|`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct EntropyEstimate {
    /// Largest `n` used.
    pub n: usize,
    /// `ln|Ω_n| / n`.
    pub slope: f64,
    /// `ln(|Ω_n| / |Ω_m|) / (n - m)` with `m = max(n - 10, 0)`.
    pub ratio: f64,
}

pub fn entropy_estimate(counts: &[u128]) -> Result<EntropyEstimate> {
    if counts.len() < 2 {
        return Err(Error::InsufficientData(counts.len()));
    }
    let n = counts.len() - 1;
    let m = n.saturating_sub(10);
    let ln = |c: u128| (c as f64).ln();
    Ok(EntropyEstimate { n, slope: ln(counts[n]) / n as f64, ratio: (ln(counts[n]) - ln(counts[m])) / (n - m) as f64 })
}

/// CSV rows `n,count,slope_estimate,ratio_estimate`; estimates are blank for `n = 0`.
pub fn counts_csv(counts: &[u128]) -> String {
    let mut out = String::from("n,count,slope_estimate,ratio_estimate\n");
    for (n, c) in counts.iter().enumerate() {
        match entropy_estimate(&counts[..=n]) {
            Ok(e) => out.push_str(&format!("{n},{c},{:.12},{:.12}\n", e.slope, e.ratio)),
            Err(_) => out.push_str(&format!("{n},{c},,\n")),
        }
    }
    out
}
