//! Coding maps and fractal transformations `h = π_G ∘ τ_F` between masked systems.
//!
//! `h` is never a function object: each evaluation returns an exact rational enclosure
//! `[f_w(0), f_w(1)]` for the address prefix `w` of the source point.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frac::{Frac, IntMoebius};
use crate::ifs::{format_rational, MaskedSystem, OverlappingIfs};
use crate::symbolic::{critical_itineraries, itinerary, lex_compare, CriticalPair, LexOrder, SymbolSeq, Word};
use crate::Rational;

/// Exact enclosure `[lo, hi]` of a point of `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointEnclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl PointEnclosure {
    pub fn unit() -> PointEnclosure {
        PointEnclosure { lo: Rational::zero(), hi: Rational::one() }
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn disjoint_from(&self, other: &PointEnclosure) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }
}

impl fmt::Display for PointEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

fn compose(maps: &[IntMoebius; 2], w: &[u8], x: Rational) -> Rational {
    w.iter().rev().fold(Frac::from_rational(&x), |acc, &s| maps[s as usize].apply(&acc)).to_rational()
}

/// `[f_w(0), f_w(1)]`, which contains `π(σ)` for every `σ` starting with `w`.
pub fn coding_point(ifs: &OverlappingIfs, w: &[u8]) -> PointEnclosure {
    let maps = [IntMoebius::from_map(&ifs.f0), IntMoebius::from_map(&ifs.f1)];
    PointEnclosure { lo: compose(&maps, w, Rational::zero()), hi: compose(&maps, w, Rational::one()) }
}

fn same_variant(f: &MaskedSystem, g: &MaskedSystem) -> Result<()> {
    if f.variant != g.variant {
        return Err(Error::VariantMismatch);
    }
    Ok(())
}

/// Encloses `h(x) = π_G(τ_F(x))` using the first `depth` symbols of `τ_F(x)`.
pub fn fractal_transform(f: &MaskedSystem, g: &MaskedSystem, x: &Rational, depth: usize) -> Result<PointEnclosure> {
    same_variant(f, g)?;
    let w = itinerary(f, x, depth)?;
    Ok(coding_point(&g.ifs, w.prefix.symbols()))
}

/// Encloses `h(y)` for every `y` in `enc`: the addresses of such `y` share the common
/// prefix of the addresses of the endpoints, because `τ_F` is monotone.
pub fn transform_enclosure(
    f: &MaskedSystem,
    g: &MaskedSystem,
    enc: &PointEnclosure,
    depth: usize,
) -> Result<PointEnclosure> {
    same_variant(f, g)?;
    let lo = itinerary(f, &enc.lo, depth)?;
    let hi = itinerary(f, &enc.hi, depth)?;
    let common: Vec<u8> =
        lo.prefix.symbols().iter().zip(hi.prefix.symbols()).take_while(|(a, b)| a == b).map(|(a, _)| *a).collect();
    Ok(coding_point(&g.ifs, &common))
}

/// `F → G → F`: the forward enclosure pulled back through `π_F ∘ τ_G`.
pub fn round_trip(f: &MaskedSystem, g: &MaskedSystem, x: &Rational, depth: usize) -> Result<PointEnclosure> {
    let there = fractal_transform(f, g, x, depth)?;
    transform_enclosure(g, f, &there, depth)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Critical {
    Alpha,
    Beta,
}

impl fmt::Display for Critical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Critical::Alpha => "alpha",
            Critical::Beta => "beta",
        })
    }
}

/// Comparison of the critical itineraries of two masked systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum HomeoVerdict {
    /// Both pairs agree on the first `depth` symbols; necessary, not sufficient.
    AgreeToDepth { depth: usize },
    /// The named critical itineraries first differ at `index`: `h` is not a homeomorphism.
    MismatchAt { index: usize, which: Critical },
    /// Both pairs carry period certificates and are equal as infinite sequences.
    ProvenEqual,
}

impl fmt::Display for HomeoVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomeoVerdict::AgreeToDepth { depth } => write!(f, "agree to depth {depth}"),
            HomeoVerdict::MismatchAt { index, which } => write!(f, "{which} differs at index {index}"),
            HomeoVerdict::ProvenEqual => f.write_str("proven equal"),
        }
    }
}

fn first_difference<U: SymbolSeq + ?Sized, V: SymbolSeq + ?Sized>(u: &U, v: &V) -> Option<usize> {
    (0..u.known_len().min(v.known_len())).find(|&i| u.symbol(i) != v.symbol(i))
}

/// `h = π_G ∘ τ_F` is a homeomorphism exactly when `α_F = α_G` and `β_F = β_G`.
/// The mask variants play no role here.
pub fn check_homeomorphism(f: &MaskedSystem, g: &MaskedSystem, depth: usize) -> Result<HomeoVerdict> {
    let cf = critical_itineraries(&f.ifs, &f.q, depth)?;
    let cg = critical_itineraries(&g.ifs, &g.q, depth)?;
    Ok(compare_critical(&cf, &cg))
}

/// The verdict for two critical pairs, over the depth both make available.
pub fn compare_critical(cf: &CriticalPair, cg: &CriticalPair) -> HomeoVerdict {
    let depth = cf.depth.min(cg.depth);
    let da = first_difference(&cf.alpha, &cg.alpha);
    let db = first_difference(&cf.beta, &cg.beta);
    let verdict = match (da, db) {
        (Some(a), Some(b)) if b < a => HomeoVerdict::MismatchAt { index: b, which: Critical::Beta },
        (Some(a), _) => HomeoVerdict::MismatchAt { index: a, which: Critical::Alpha },
        (None, Some(b)) => HomeoVerdict::MismatchAt { index: b, which: Critical::Beta },
        (None, None) => {
            let proven = lex_compare(&cf.alpha, &cg.alpha) == LexOrder::Equal
                && lex_compare(&cf.beta, &cg.beta) == LexOrder::Equal;
            if proven {
                HomeoVerdict::ProvenEqual
            } else {
                HomeoVerdict::AgreeToDepth { depth }
            }
        }
    };
    // beyond the stored prefixes, certified periods can still expose a difference
    if let HomeoVerdict::AgreeToDepth { .. } = verdict {
        for (which, u, v) in [(Critical::Alpha, &cf.alpha, &cg.alpha), (Critical::Beta, &cf.beta, &cg.beta)] {
            if u.period.is_some() && v.period.is_some() {
                if let LexOrder::Less | LexOrder::Greater = lex_compare(u, v) {
                    let index = (0..).find(|&i| u.symbol(i) != v.symbol(i)).unwrap();
                    return HomeoVerdict::MismatchAt { index, which };
                }
            }
        }
    }
    verdict
}

/// The address prefix of `x` under `F`, as a word.
pub fn address(f: &MaskedSystem, x: &Rational, depth: usize) -> Result<Word> {
    Ok(itinerary(f, x, depth)?.prefix)
}
