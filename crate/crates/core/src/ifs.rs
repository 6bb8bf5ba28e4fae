//! Exact increasing contractions on [0,1] and the overlapping two-map IFS built from them.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{Interval, Precision};
use crate::Rational;

/// Parses `"num/den"` or an integer string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}, expected \"num/den\""));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Renders a rational as `"num/den"` (or `"num"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// The rational with the smallest denominator in `[lo, hi]` (continued fractions).
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi);
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if &fl + Rational::one() <= *hi {
        return fl + Rational::one();
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

fn unit_check(x: &Rational) -> Result<()> {
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::Domain { x: x.clone() });
    }
    Ok(())
}

/// An increasing map on [0,1] with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MonotoneMap {
    /// `x -> a*x + b`
    Affine {
        #[serde(with = "rational_str")]
        a: Rational,
        #[serde(with = "rational_str")]
        b: Rational,
    },
    /// `x -> (a*x + b) / (c*x + d)`
    Moebius {
        #[serde(with = "rational_str")]
        a: Rational,
        #[serde(with = "rational_str")]
        b: Rational,
        #[serde(with = "rational_str")]
        c: Rational,
        #[serde(with = "rational_str")]
        d: Rational,
    },
}

impl MonotoneMap {
    pub fn affine(a: Rational, b: Rational) -> MonotoneMap {
        MonotoneMap::Affine { a, b }
    }

    pub fn moebius(a: Rational, b: Rational, c: Rational, d: Rational) -> MonotoneMap {
        MonotoneMap::Moebius { a, b, c, d }
    }

    /// The pole `c*x + d` must keep one strict sign on [0,1].
    fn pole_free(&self) -> bool {
        match self {
            MonotoneMap::Affine { .. } => true,
            MonotoneMap::Moebius { c, d, .. } => {
                let at1 = c + d;
                !d.is_zero() && !at1.is_zero() && d.is_positive() == at1.is_positive()
            }
        }
    }

    /// `a*d - b*c` for Moebius maps, the slope for affine maps.
    fn determinant(&self) -> Rational {
        match self {
            MonotoneMap::Affine { a, .. } => a.clone(),
            MonotoneMap::Moebius { a, b, c, d } => a * d - b * c,
        }
    }

    pub fn is_increasing(&self) -> bool {
        self.pole_free() && self.determinant().is_positive()
    }

    fn apply(&self, x: &Rational) -> Result<Rational> {
        match self {
            MonotoneMap::Affine { a, b } => Ok(a * x + b),
            MonotoneMap::Moebius { a, b, c, d } => {
                let den = c * x + d;
                if den.is_zero() {
                    return Err(Error::Singular);
                }
                Ok((a * x + b) / den)
            }
        }
    }

    /// `f(x)` for `x` in [0,1], exactly.
    pub fn evaluate(&self, x: &Rational) -> Result<Rational> {
        unit_check(x)?;
        self.apply(x)
    }

    /// The unique `x` in [0,1] with `f(x) = y`.
    pub fn invert(&self, y: &Rational) -> Result<Rational> {
        let lo = self.apply(&Rational::zero())?;
        let hi = self.apply(&Rational::one())?;
        if *y < lo || *y > hi {
            return Err(Error::Range { y: Box::new(y.clone()), lo: Box::new(lo), hi: Box::new(hi) });
        }
        self.invert_unchecked(y)
    }

    pub(crate) fn invert_unchecked(&self, y: &Rational) -> Result<Rational> {
        match self {
            MonotoneMap::Affine { a, b } => Ok((y - b) / a),
            MonotoneMap::Moebius { a, b, c, d } => {
                let den = a - c * y;
                if den.is_zero() {
                    return Err(Error::Singular);
                }
                Ok((d * y - b) / den)
            }
        }
    }

    /// Supremum of `f'` over [0,1]. The Moebius derivative `(ad-bc)/(cx+d)^2` is monotone
    /// away from the pole, so the supremum sits at whichever endpoint minimizes `|cx+d|`.
    pub fn contraction_factor(&self) -> Result<Rational> {
        match self {
            MonotoneMap::Affine { a, .. } => Ok(a.clone()),
            MonotoneMap::Moebius { c, d, .. } => {
                if !self.pole_free() {
                    return Err(Error::Singular);
                }
                let d0 = d * d;
                let d1 = (c + d) * (c + d);
                Ok(self.determinant() / d0.min(d1))
            }
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, MonotoneMap::Affine { .. })
    }
}

impl fmt::Display for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = format_rational;
        match self {
            MonotoneMap::Affine { a, b } => write!(f, "{}*x + {}", r(a), r(b)),
            MonotoneMap::Moebius { a, b, c, d } => {
                write!(f, "({}*x + {})/({}*x + {})", r(a), r(b), r(c), r(d))
            }
        }
    }
}

pub(crate) mod rational_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    EndpointsFixed,
    MonotoneIncreasing,
    MapsIntoUnit,
    StrictContraction,
    StrictOverlap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
    /// Both maps affine with the same slope.
    pub equal_ratio: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {:?}: {}", c.axiom, c.detail)?;
        }
        write!(f, "equal_ratio: {}", self.equal_ratio)
    }
}

/// Two increasing contractions `f0, f1` of [0,1] with `f0(0)=0`, `f1(1)=1` and
/// `0 < f1(0) < f0(1) < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OverlappingIfs {
    pub f0: MonotoneMap,
    pub f1: MonotoneMap,
}

impl OverlappingIfs {
    /// Pairs two maps without checking the axioms; see [`OverlappingIfs::validate`].
    pub fn new_unchecked(f0: MonotoneMap, f1: MonotoneMap) -> OverlappingIfs {
        OverlappingIfs { f0, f1 }
    }

    /// Pairs two maps, failing with the validation report when an axiom fails.
    pub fn new(f0: MonotoneMap, f1: MonotoneMap) -> Result<OverlappingIfs> {
        let ifs = OverlappingIfs { f0, f1 };
        let report = ifs.validate();
        if !report.passed() {
            return Err(Error::InvalidMap(report.to_string()));
        }
        Ok(ifs)
    }

    /// The uniform IFS `L0(x) = a x`, `L1(x) = a x + 1 - a`.
    pub fn uniform(a: Rational) -> OverlappingIfs {
        let b = Rational::one() - &a;
        OverlappingIfs { f0: MonotoneMap::affine(a.clone(), Rational::zero()), f1: MonotoneMap::affine(a, b) }
    }

    pub fn map(&self, symbol: u8) -> &MonotoneMap {
        if symbol == 0 {
            &self.f0
        } else {
            &self.f1
        }
    }

    /// `f1(0)`, the left end of the overlap.
    pub fn overlap_lo(&self) -> Result<Rational> {
        self.f1.evaluate(&Rational::zero())
    }

    /// `f0(1)`, the right end of the overlap.
    pub fn overlap_hi(&self) -> Result<Rational> {
        self.f0.evaluate(&Rational::one())
    }

    /// Largest contraction factor of the two maps.
    pub fn max_contraction(&self) -> Result<Rational> {
        Ok(self.f0.contraction_factor()?.max(self.f1.contraction_factor()?))
    }

    /// Checks every axiom and records the offending exact values.
    pub fn validate(&self) -> ValidationReport {
        let zero = Rational::zero();
        let one = Rational::one();
        let fmt = |r: &Result<Rational>| match r {
            Ok(v) => format_rational(v),
            Err(e) => e.to_string(),
        };
        let f00 = self.f0.evaluate(&zero);
        let f01 = self.f0.evaluate(&one);
        let f10 = self.f1.evaluate(&zero);
        let f11 = self.f1.evaluate(&one);
        let mut checks = Vec::new();

        let fixed = f00.as_ref().ok() == Some(&zero) && f11.as_ref().ok() == Some(&one);
        checks.push(AxiomCheck {
            axiom: Axiom::EndpointsFixed,
            passed: fixed,
            detail: format!("f0(0) = {}, f1(1) = {}", fmt(&f00), fmt(&f11)),
        });

        let inc = [self.f0.is_increasing(), self.f1.is_increasing()];
        checks.push(AxiomCheck {
            axiom: Axiom::MonotoneIncreasing,
            passed: inc[0] && inc[1],
            detail: format!("f0 increasing: {}, f1 increasing: {}", inc[0], inc[1]),
        });

        let into = |lo: &Result<Rational>, hi: &Result<Rational>| match (lo, hi) {
            (Ok(lo), Ok(hi)) => !lo.is_negative() && *hi <= one,
            _ => false,
        };
        let into_unit = into(&f00, &f01) && into(&f10, &f11);
        checks.push(AxiomCheck {
            axiom: Axiom::MapsIntoUnit,
            passed: into_unit,
            detail: format!("f0([0,1]) = [{}, {}], f1([0,1]) = [{}, {}]", fmt(&f00), fmt(&f01), fmt(&f10), fmt(&f11)),
        });

        let c0 = self.f0.contraction_factor();
        let c1 = self.f1.contraction_factor();
        let contracting = |c: &Result<Rational>| c.as_ref().map(|c| *c < one).unwrap_or(false);
        checks.push(AxiomCheck {
            axiom: Axiom::StrictContraction,
            passed: contracting(&c0) && contracting(&c1),
            detail: format!("factor(f0) = {}, factor(f1) = {}", fmt(&c0), fmt(&c1)),
        });

        let overlap = match (&f10, &f01) {
            (Ok(lo), Ok(hi)) => zero < *lo && lo < hi && *hi < one,
            _ => false,
        };
        let relation = match (&f10, &f01) {
            (Ok(lo), Ok(hi)) if lo >= hi => "not <",
            _ => "vs",
        };
        checks.push(AxiomCheck {
            axiom: Axiom::StrictOverlap,
            passed: overlap,
            detail: format!("f1(0) = {} {relation} f0(1) = {}", fmt(&f10), fmt(&f01)),
        });

        let equal_ratio = match (&self.f0, &self.f1) {
            (MonotoneMap::Affine { a: a0, .. }, MonotoneMap::Affine { a: a1, .. }) => a0 == a1,
            _ => false,
        };
        ValidationReport { checks, equal_ratio }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Mask `{[0,q), [q,1]}`: the mask point takes symbol 1.
    Plus,
    /// Mask `{[0,q], (q,1]}`: the mask point takes symbol 0.
    Minus,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Plus => "plus",
            Variant::Minus => "minus",
        })
    }
}

/// An overlapping IFS with a mask point; equivalently the expanding map `T_q^±`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MaskedSystem {
    pub ifs: OverlappingIfs,
    pub q: Rational,
    pub variant: Variant,
}

impl MaskedSystem {
    /// Requires a valid IFS and `f1(0) < q < f0(1)`.
    pub fn new(ifs: OverlappingIfs, q: Rational, variant: Variant) -> Result<MaskedSystem> {
        let report = ifs.validate();
        if !report.passed() {
            return Err(Error::InvalidMap(report.to_string()));
        }
        check_mask_point(&ifs, &q)?;
        Ok(MaskedSystem { ifs, q, variant })
    }

    pub fn with_variant(&self, variant: Variant) -> MaskedSystem {
        MaskedSystem { variant, ..self.clone() }
    }
}

pub(crate) fn check_mask_point(ifs: &OverlappingIfs, q: &Rational) -> Result<()> {
    let lo = ifs.overlap_lo()?;
    let hi = ifs.overlap_hi()?;
    if *q <= lo || *q >= hi {
        return Err(Error::MaskRange { q: Box::new(q.clone()), lo: Box::new(lo), hi: Box::new(hi) });
    }
    Ok(())
}

/// The uniform system `U_(a,p)`, with `a` and `p` known as enclosures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformSystem {
    pub a: Interval,
    pub p: Interval,
}

impl UniformSystem {
    /// A masked uniform system with the simplest rationals inside the enclosures of `a`
    /// and `p`, which keeps exact orbit arithmetic small.
    pub fn rational_system(&self, variant: Variant) -> Result<MaskedSystem> {
        let a = simplest_between(&self.a.lo.to_rational(), &self.a.hi.to_rational());
        let p = simplest_between(&self.p.lo.to_rational(), &self.p.hi.to_rational());
        let half = Rational::new(1.into(), 2.into());
        if a <= half || a >= Rational::one() {
            return Err(Error::InvalidMap(format!("uniform ratio {} is outside (1/2, 1)", format_rational(&a))));
        }
        MaskedSystem::new(OverlappingIfs::uniform(a), p, variant)
    }

    /// Encloses the uniform system of an exact ratio and mask point.
    pub fn from_rationals(a: &Rational, p: &Rational, prec: Precision) -> UniformSystem {
        UniformSystem { a: Interval::from_rational(a, prec), p: Interval::from_rational(p, prec) }
    }
}
