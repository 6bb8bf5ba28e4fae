//! Itineraries of the masked dynamical systems `T_q^±` and the lexicographic
//! description of their address spaces.

mod enumerate;
pub mod oracle;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

pub use enumerate::{count_words, counts_csv, entropy_estimate, enumerate_words, EntropyEstimate};

use crate::error::{Error, Result};
use crate::frac::{Frac, IntMoebius};
use crate::ifs::{check_mask_point, MaskedSystem, OverlappingIfs, Variant};
use crate::Rational;

/// A finite string over `{0, 1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Word {
        assert!(symbols.iter().all(|&s| s <= 1), "symbols must be 0 or 1");
        Word(symbols)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Drops the first symbol.
    pub fn shift(&self) -> Word {
        Word(self.0.get(1..).unwrap_or_default().to_vec())
    }

    pub fn truncate(&self, len: usize) -> Word {
        Word(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Word {
        Word::new(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("word {s:?} has a symbol other than 0/1"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

/// Eventual periodicity: symbol `i >= preperiod` equals symbol `i - length`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Period {
    pub preperiod: usize,
    pub length: usize,
}

impl Period {
    /// Period of the elementwise combination of two eventually periodic sequences.
    pub fn combine(a: Period, b: Period) -> Period {
        Period { preperiod: a.preperiod.max(b.preperiod), length: a.length.lcm(&b.length) }
    }
}

/// Read access to a (possibly infinite) symbol sequence.
pub trait SymbolSeq {
    /// Symbol at index `i`, if known.
    fn symbol(&self, i: usize) -> Option<u8>;
    /// Number of explicitly stored symbols.
    fn known_len(&self) -> usize;
    /// When present, every symbol is known.
    fn period(&self) -> Option<Period> {
        None
    }
}

impl SymbolSeq for Word {
    fn symbol(&self, i: usize) -> Option<u8> {
        self.0.get(i).copied()
    }

    fn known_len(&self) -> usize {
        self.0.len()
    }
}

impl SymbolSeq for [u8] {
    fn symbol(&self, i: usize) -> Option<u8> {
        self.get(i).copied()
    }

    fn known_len(&self) -> usize {
        self.len()
    }
}

/// A prefix of an itinerary, optionally certified eventually periodic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Itinerary {
    pub prefix: Word,
    pub period: Option<Period>,
}

impl Itinerary {
    /// Periodic sequence `head` followed by `cycle` repeated forever, stored to `depth`.
    pub fn eventually_periodic(head: &[u8], cycle: &[u8], depth: usize) -> Itinerary {
        assert!(!cycle.is_empty());
        let mut v = head.to_vec();
        while v.len() < depth.max(head.len() + cycle.len()) {
            v.push(cycle[(v.len() - head.len()) % cycle.len()]);
        }
        v.truncate(depth.max(head.len() + cycle.len()));
        Itinerary { prefix: Word::new(v), period: Some(Period { preperiod: head.len(), length: cycle.len() }) }
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// The first `len` symbols, extended through the period certificate if needed.
    pub fn take(&self, len: usize) -> Option<Word> {
        (0..len).map(|i| self.symbol(i)).collect::<Option<Vec<u8>>>().map(Word)
    }
}

impl fmt::Display for Itinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prefix)?;
        if let Some(p) = self.period {
            write!(f, " (preperiod {}, period {})", p.preperiod, p.length)?;
        }
        Ok(())
    }
}

impl SymbolSeq for Itinerary {
    fn symbol(&self, i: usize) -> Option<u8> {
        if let Some(s) = self.prefix.symbol(i) {
            return Some(s);
        }
        let p = self.period?;
        let j = p.preperiod + (i - p.preperiod) % p.length;
        self.prefix.symbol(j)
    }

    fn known_len(&self) -> usize {
        self.prefix.len()
    }

    fn period(&self) -> Option<Period> {
        self.period
    }
}

/// `S^k` applied to a sequence, as a view.
pub struct Shifted<'a, S: ?Sized> {
    inner: &'a S,
    by: usize,
}

pub fn shifted<S: SymbolSeq + ?Sized>(inner: &S, by: usize) -> Shifted<'_, S> {
    Shifted { inner, by }
}

impl<S: SymbolSeq + ?Sized> SymbolSeq for Shifted<'_, S> {
    fn symbol(&self, i: usize) -> Option<u8> {
        self.inner.symbol(i + self.by)
    }

    fn known_len(&self) -> usize {
        self.inner.known_len().saturating_sub(self.by)
    }

    fn period(&self) -> Option<Period> {
        self.inner.period().map(|p| Period { preperiod: p.preperiod.saturating_sub(self.by), length: p.length })
    }
}

/// Outcome of a lexicographic comparison on partially known sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LexOrder {
    Less,
    Greater,
    /// Agree on the first `n` symbols, the most either side makes available.
    EqualToDepth(usize),
    /// Proven equal through period certificates.
    Equal,
}

impl LexOrder {
    pub fn is_decided(self) -> bool {
        matches!(self, LexOrder::Less | LexOrder::Greater)
    }
}

/// Lexicographic comparison of `u` and `v`.
///
/// When both carry period certificates the comparison is exact; otherwise it runs over
/// the shorter known prefix (a certified side counts as known to any length).
pub fn lex_compare<U, V>(u: &U, v: &V) -> LexOrder
where
    U: SymbolSeq + ?Sized,
    V: SymbolSeq + ?Sized,
{
    let (limit, exact) = match (u.period(), v.period()) {
        (Some(pu), Some(pv)) => {
            let p = Period::combine(pu, pv);
            (p.preperiod + p.length, true)
        }
        (Some(_), None) => (v.known_len(), false),
        (None, Some(_)) => (u.known_len(), false),
        (None, None) => (u.known_len().min(v.known_len()), false),
    };
    for i in 0..limit {
        match (u.symbol(i), v.symbol(i)) {
            (Some(a), Some(b)) => match a.cmp(&b) {
                Ordering::Less => return LexOrder::Less,
                Ordering::Greater => return LexOrder::Greater,
                Ordering::Equal => {}
            },
            _ => return LexOrder::EqualToDepth(i),
        }
    }
    if exact {
        LexOrder::Equal
    } else {
        LexOrder::EqualToDepth(limit)
    }
}

/// Which address-space characterization to test against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdmissibilityVariant {
    /// `[0̄, α) ∪ [β, 1̄]`
    Plus,
    /// `[0̄, α] ∪ (β, 1̄]`
    Minus,
    /// `[0̄, α] ∪ [β, 1̄]`
    Closure,
}

impl From<Variant> for AdmissibilityVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Plus => AdmissibilityVariant::Plus,
            Variant::Minus => AdmissibilityVariant::Minus,
        }
    }
}

impl AdmissibilityVariant {
    fn alpha_closed(self) -> bool {
        !matches!(self, AdmissibilityVariant::Plus)
    }

    fn beta_closed(self) -> bool {
        !matches!(self, AdmissibilityVariant::Minus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Admissibility {
    Yes,
    No,
    Unknown,
}

impl Admissibility {
    /// Not refuted.
    pub fn passes(self) -> bool {
        self != Admissibility::No
    }
}

/// Critical itineraries `α = τ⁻(q)` and `β = τ⁺(q)` to a common depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPair {
    pub alpha: Itinerary,
    pub beta: Itinerary,
    pub q: Rational,
    pub depth: usize,
}

impl CriticalPair {
    /// A pair from explicit itineraries, e.g. synthetic test data.
    pub fn from_itineraries(alpha: Itinerary, beta: Itinerary, q: Rational) -> CriticalPair {
        let depth = alpha.len().min(beta.len());
        CriticalPair { alpha, beta, q, depth }
    }

    /// Depth to which both sequences are known; unbounded when both are certified periodic.
    pub fn checkable_depth(&self) -> usize {
        if self.alpha.period.is_some() && self.beta.period.is_some() {
            usize::MAX
        } else {
            self.depth
        }
    }

    fn require_depth(&self, need: usize) -> Result<()> {
        if self.checkable_depth() < need {
            return Err(Error::Depth { have: self.depth, need });
        }
        Ok(())
    }

    pub(crate) fn symbol(&self, beta: bool, i: usize) -> Option<u8> {
        if beta {
            self.beta.symbol(i)
        } else {
            self.alpha.symbol(i)
        }
    }
}

/// One application of `T_q^±`: the branch symbol and the image point.
pub fn step(sys: &MaskedSystem, x: &Rational) -> Result<(u8, Rational)> {
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::Domain { x: x.clone() });
    }
    let symbol = match sys.variant {
        Variant::Plus => u8::from(*x >= sys.q),
        Variant::Minus => u8::from(*x > sys.q),
    };
    let next = sys.ifs.map(symbol).invert(x)?;
    Ok((symbol, next))
}

/// The first `depth` symbols of the itinerary (address) of `x`.
///
/// Exact orbit states are remembered; a revisited state yields a period certificate and
/// the remaining symbols are filled in from the cycle.
pub fn itinerary(sys: &MaskedSystem, x: &Rational, depth: usize) -> Result<Itinerary> {
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::Domain { x: x.clone() });
    }
    let inverses = [IntMoebius::from_map(&sys.ifs.f0), IntMoebius::from_map(&sys.ifs.f1)];
    let mut states: Vec<Frac> = Vec::with_capacity(depth + 1);
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut symbols = Vec::with_capacity(depth);
    let mut state = Frac::from_rational(x);
    let revisit = |seen: &HashMap<u64, Vec<usize>>, states: &[Frac], state: &Frac| {
        seen.get(&state.hash_key()).and_then(|ids| ids.iter().copied().find(|&i| states[i].same_value(state)))
    };
    while symbols.len() < depth {
        if let Some(first) = revisit(&seen, &states, &state) {
            let period = Period { preperiod: first, length: symbols.len() - first };
            let head = symbols[..first].to_vec();
            let cycle = symbols[first..].to_vec();
            let mut it = Itinerary::eventually_periodic(&head, &cycle, depth);
            it.period = Some(period);
            return Ok(it);
        }
        seen.entry(state.hash_key()).or_default().push(states.len());
        let s = match (sys.variant, state.cmp_rational(&sys.q)) {
            (Variant::Plus, Ordering::Less) | (Variant::Minus, Ordering::Less | Ordering::Equal) => 0,
            _ => 1,
        };
        let next = inverses[s as usize].invert(&state);
        states.push(state);
        symbols.push(s);
        state = next;
    }
    // one more lookup: the state after the last symbol may close a cycle
    let period =
        revisit(&seen, &states, &state).map(|first| Period { preperiod: first, length: symbols.len() - first });
    Ok(Itinerary { prefix: Word(symbols), period })
}

/// `α = τ⁻(q)` and `β = τ⁺(q)` for mask point `q`.
pub fn critical_itineraries(ifs: &OverlappingIfs, q: &Rational, depth: usize) -> Result<CriticalPair> {
    check_mask_point(ifs, q)?;
    let minus = MaskedSystem::new(ifs.clone(), q.clone(), Variant::Minus)?;
    let plus = minus.with_variant(Variant::Plus);
    let alpha = itinerary(&minus, q, depth)?;
    let beta = itinerary(&plus, q, depth)?;
    debug_assert_eq!(alpha.prefix.symbol(0), Some(0));
    debug_assert_eq!(beta.prefix.symbol(0), Some(1));
    Ok(CriticalPair { alpha, beta, q: q.clone(), depth })
}

/// Checks every shift of `w` against the critical intervals.
///
/// A tie that runs to the end of the tested suffix is consistent (the suffix may continue
/// along the critical itinerary). A tie that exhausts the known critical prefix while the
/// suffix continues is `Unknown`. Exact equality, available only with period
/// certificates on both sides, respects the open/closed endpoints of `variant`.
pub fn is_admissible<S: SymbolSeq + ?Sized>(
    w: &S,
    crit: &CriticalPair,
    variant: AdmissibilityVariant,
) -> Result<Admissibility> {
    crit.require_depth(w.known_len())?;
    let starts = match w.period() {
        Some(p) => p.preperiod + p.length,
        None => w.known_len(),
    };
    let mut unknown = false;
    for k in 0..starts {
        let suffix = shifted(w, k);
        let Some(first) = suffix.symbol(0) else { break };
        let (ord, closed) = if first == 0 {
            (lex_compare(&suffix, &crit.alpha), variant.alpha_closed())
        } else {
            (lex_compare(&crit.beta, &suffix), variant.beta_closed())
        };
        // `ord` is oriented so that Less means inside the allowed interval
        match ord {
            LexOrder::Less => {}
            LexOrder::Greater => return Ok(Admissibility::No),
            LexOrder::Equal => {
                if !closed {
                    return Ok(Admissibility::No);
                }
            }
            LexOrder::EqualToDepth(n) => {
                if suffix.period().is_some() || n < suffix.known_len() {
                    unknown = true;
                }
            }
        }
    }
    Ok(if unknown { Admissibility::Unknown } else { Admissibility::Yes })
}

/// Denominator of the points drawn by [`sample_points`].
pub const SAMPLE_DENOMINATOR: u64 = 1_000_003;

/// `count` rationals `k / SAMPLE_DENOMINATOR` with `k` uniform on `0..=SAMPLE_DENOMINATOR`,
/// reproducible from `seed`.
pub fn sample_points(seed: u64, count: usize) -> Vec<Rational> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Rational::new(rng.gen_range(0..=SAMPLE_DENOMINATOR).into(), SAMPLE_DENOMINATOR.into())).collect()
}
