//! Reference word sets by exhaustive filtering.
//!
//! Every one of the `2^(n+1)` words is run through [`is_admissible`] independently of the
//! incremental tie tracking used by [`enumerate_words`](super::enumerate_words). Use it to
//! cross-check the enumerator; it is exponential by construction.

use std::collections::BTreeSet;

use super::{is_admissible, AdmissibilityVariant, CriticalPair, Word};
use crate::error::{Error, Result};

/// Largest `n` the brute-force filter accepts.
pub const MAX_BRUTE_FORCE_N: usize = 24;

pub fn brute_force_words(crit: &CriticalPair, variant: AdmissibilityVariant, n: usize) -> Result<BTreeSet<Word>> {
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::Parse(format!("brute force limited to n <= {MAX_BRUTE_FORCE_N}, got {n}")));
    }
    let len = n + 1;
    let mut out = BTreeSet::new();
    for bits in 0u64..(1u64 << len) {
        let word = Word::new((0..len).rev().map(|i| ((bits >> i) & 1) as u8).collect());
        if is_admissible(&word, crit, variant)?.passes() {
            out.insert(word);
        }
    }
    Ok(out)
}

/// `|Ω_n|` for `n = 0..=max_n` by exhaustive filtering.
pub fn brute_force_counts(crit: &CriticalPair, max_n: usize) -> Result<Vec<u128>> {
    (0..=max_n).map(|n| brute_force_words(crit, AdmissibilityVariant::Closure, n).map(|s| s.len() as u128)).collect()
}
