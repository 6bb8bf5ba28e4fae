//! The kneading series `D(x) = Σ (βₙ - αₙ) xⁿ`, its certified smallest root `r` in
//! `(0, 1)`, the entropy `-ln r`, and the conjugate uniform system `U_(r,p)` with
//! `p = (1 - r) Σ αₙ rⁿ`.
//!
//! Signs of `D` are certified in three tiers: an `f64` Horner evaluation with a rigorous
//! rounding bound screens the grid, a directed-rounding [`Interval`] evaluation decides
//! what the screen leaves open, and when both critical itineraries carry period
//! certificates `D` is a rational function evaluated exactly.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result, RootEvidence};
use crate::ifs::{simplest_between, OverlappingIfs, UniformSystem};
use crate::real::{Float, Interval, Precision, Round};
use crate::symbolic::{
    count_words, critical_itineraries, entropy_estimate, CriticalPair, EntropyEstimate, Itinerary, Period, SymbolSeq,
};
use crate::Rational;

/// Truncated coefficients `βₙ - αₙ`, exact beyond the truncation when periodic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneadingSeries {
    coeffs: Vec<i8>,
    period: Option<Period>,
}

impl KneadingSeries {
    /// Builds a series from explicit coefficients; `period` must be consistent with them
    /// and `coeffs` must cover at least one full cycle.
    pub fn from_coeffs(coeffs: Vec<i8>, period: Option<Period>) -> KneadingSeries {
        assert!(coeffs.iter().all(|c| (-1..=1).contains(c)));
        if let Some(p) = period {
            assert!(coeffs.len() >= p.preperiod + p.length && p.length > 0);
        }
        KneadingSeries { coeffs, period }
    }

    pub fn coeffs(&self) -> &[i8] {
        &self.coeffs
    }

    pub fn period(&self) -> Option<Period> {
        self.period
    }

    /// Index `N` of the last stored coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Option<i8> {
        if let Some(&c) = self.coeffs.get(n) {
            return Some(c);
        }
        let p = self.period?;
        Some(self.coeffs[p.preperiod + (n - p.preperiod) % p.length])
    }

    /// Exact value of the full series at rational `x` in `(0, 1)`; needs a period.
    pub fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        let p = self.period?;
        let horner =
            |cs: &[i8]| cs.iter().rev().fold(Rational::zero(), |acc, &c| acc * x + Rational::from_integer(c.into()));
        let head = horner(&self.coeffs[..p.preperiod]);
        let cycle = horner(&self.coeffs[p.preperiod..p.preperiod + p.length]);
        let xl = pow(x, p.length);
        Some(head + pow(x, p.preperiod) * cycle / (Rational::one() - xl))
    }
}

fn pow(x: &Rational, n: usize) -> Rational {
    num_traits::pow(x.clone(), n)
}

/// `D` from the critical itineraries: coefficient `n` is `βₙ - αₙ`.
pub fn kneading_series(crit: &CriticalPair) -> Result<KneadingSeries> {
    let (la, lb) = (crit.alpha.len(), crit.beta.len());
    if la != lb {
        return Err(Error::LengthMismatch { alpha: la, beta: lb });
    }
    let period = match (crit.alpha.period, crit.beta.period) {
        (Some(a), Some(b)) => Some(Period::combine(a, b)),
        _ => None,
    };
    let len = period.map_or(la, |p| la.max(p.preperiod + p.length));
    let coeffs = (0..len)
        .map(|n| {
            let a = crit.alpha.symbol(n).expect("known symbol") as i8;
            let b = crit.beta.symbol(n).expect("known symbol") as i8;
            b - a
        })
        .collect();
    Ok(KneadingSeries { coeffs, period })
}

/// An evaluation of `D(x)`: the truncated polynomial enclosed by `value`, and the bound
/// on the omitted tail (zero when the evaluation is exact).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesValue {
    pub value: Interval,
    pub tail_bound: Float,
}

impl SeriesValue {
    /// Certified sign of the full series, if decidable.
    pub fn sign(&self) -> Option<i32> {
        if self.value.lo.sub(&self.tail_bound).is_positive() {
            Some(1)
        } else if self.value.hi.add(&self.tail_bound).is_negative() {
            Some(-1)
        } else if self.tail_bound.is_zero() && self.value.lo.is_zero() && self.value.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }
}

fn check_open_unit(x: &Float) -> Result<()> {
    if !x.is_positive() || *x >= Float::one() {
        return Err(Error::OpenUnitInterval(x.to_f64()));
    }
    Ok(())
}

/// Upper bound on `x^(N+1) / (1 - x)`.
fn tail_bound(x: &Float, n_terms: usize, prec: Precision) -> Float {
    let xi = Interval::point(x.clone());
    let num = xi.powi(n_terms as u32, prec);
    let den = Interval::point(Float::one().sub(x));
    num.div(&den, prec).hi
}

fn horner_interval(coeffs: &[i8], x: &Interval, prec: Precision) -> Interval {
    coeffs.iter().rev().fold(Interval::from_int(0), |acc, &c| acc.mul(x, prec).add(&Interval::from_int(c as i64), prec))
}

/// `D(x)` at `0 < x < 1`. With a period certificate the value is the exact rational
/// function value (enclosed to `prec` bits) and the tail bound is zero.
pub fn eval_series(s: &KneadingSeries, x: &Float, prec: Precision) -> Result<SeriesValue> {
    check_open_unit(x)?;
    if let Some(v) = s.eval_exact(&x.to_rational()) {
        let value = if v.is_zero() { Interval::from_int(0) } else { Interval::from_rational(&v, prec) };
        return Ok(SeriesValue { value, tail_bound: Float::zero() });
    }
    Ok(SeriesValue {
        value: horner_interval(&s.coeffs, &Interval::point(x.clone()), prec),
        tail_bound: tail_bound(x, s.coeffs.len(), prec),
    })
}

/// Certified sign from double precision, or `None` when rounding and tail swamp it.
///
/// Horner in binary64 satisfies `|fl(p(x)) - p(x)| <= γ_2n Σ|cᵢ| xⁱ` with
/// `γ_k = k u / (1 - k u)`; the bound used here is twice that.
fn screen_sign_f64(coeffs: &[i8], x: f64) -> Option<i32> {
    let (mut v, mut a) = (0.0f64, 0.0f64);
    for &c in coeffs.iter().rev() {
        v = v * x + c as f64;
        a = a * x + (c as f64).abs();
    }
    let n = coeffs.len() as f64;
    let u = f64::EPSILON / 2.0;
    let gamma = 2.0 * n * u / (1.0 - 2.0 * n * u);
    let rounding = 2.0 * gamma * a / (1.0 - gamma) + f64::MIN_POSITIVE;
    let tail = x.powi(coeffs.len() as i32) / (1.0 - x) * (1.0 + 1e-10);
    let slack = rounding + tail;
    if v - slack > 0.0 {
        Some(1)
    } else if v + slack < 0.0 {
        Some(-1)
    } else {
        None
    }
}

/// Tunables for [`smallest_root`].
#[derive(Clone, Debug)]
pub struct RootOptions {
    /// Uniform scan points on `(0, 1 - 2^-20]`.
    pub grid: usize,
    /// Subdivision factor applied to a bracket before bisection.
    pub refine: usize,
    pub precision: Precision,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { grid: 4096, refine: 16, precision: Precision::from_env() }
    }
}

/// Enclosure `[lo, hi]` of the smallest root of `D` in `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootEnclosure {
    pub lo: Float,
    pub hi: Float,
    /// `D` is certified positive at `lo` and at every scanned grid point below it, and
    /// certified non-positive at `hi`.
    pub certified: bool,
    /// Signs came from the exact rational form of a periodic series.
    pub exact_periodic: bool,
    /// The root itself, when it was recognized as a rational and verified exactly.
    pub exact: Option<Rational>,
}

impl RootEnclosure {
    pub fn mid(&self) -> Float {
        Float::midpoint(&self.lo, &self.hi)
    }

    pub fn width(&self) -> Float {
        self.hi.sub(&self.lo)
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }
}

struct SignOracle<'a> {
    series: &'a KneadingSeries,
    prec: Precision,
}

impl SignOracle<'_> {
    fn sign(&self, x: &Float) -> Option<i32> {
        if self.series.period.is_none() {
            let xf = x.to_f64();
            if Float::from_f64(xf) == *x {
                if let Some(s) = screen_sign_f64(&self.series.coeffs, xf) {
                    return Some(s);
                }
            }
        }
        eval_series(self.series, x, self.prec).ok()?.sign()
    }
}

/// Smallest root of `D` on `(0, 1)`, bracketed by a certified sign change and bisected
/// until the bracket is no wider than `tol` or the sign becomes undecidable.
pub fn smallest_root(s: &KneadingSeries, tol: &Float, opts: &RootOptions) -> Result<RootEnclosure> {
    assert!(tol.is_positive(), "tolerance must be positive");
    let oracle = SignOracle { series: s, prec: opts.precision };
    let exact_periodic = s.period.is_some();
    let grid = opts.grid.max(2);
    let step = Float::one().sub(&Float::pow2(-20)).div(&Float::from_int(grid as i64), Precision::new(64), Round::Down);
    let point = |j: usize, sub: usize, of: usize| -> Float {
        // j + sub/of grid steps from zero, exact in binary
        let scaled = Float::from_int((j * of + sub) as i64).mul(&step);
        scaled.div(&Float::from_int(of as i64), Precision::new(96), Round::Nearest)
    };

    let mut evidence = RootEvidence {
        grid_points: grid,
        certified_positive: 0,
        undecided: 0,
        last_positive: 0.0,
        min_lower_bound: f64::INFINITY,
    };
    let mut last_pos = 0usize;
    let mut bracket = None;
    for j in 1..=grid {
        let x = point(j, 0, 1);
        match oracle.sign(&x) {
            Some(1) => {
                evidence.certified_positive += 1;
                evidence.last_positive = x.to_f64();
                last_pos = j;
            }
            Some(0) => {
                let r = x.to_rational();
                return Ok(RootEnclosure {
                    lo: x.clone(),
                    hi: x,
                    certified: evidence.undecided == 0,
                    exact_periodic,
                    exact: Some(r),
                });
            }
            Some(_) => {
                bracket = Some((last_pos, j));
                break;
            }
            None => {
                evidence.undecided += 1;
                if let Ok(v) = eval_series(s, &x, opts.precision) {
                    let lower = v.value.lo.sub(&v.tail_bound).to_f64();
                    evidence.min_lower_bound = evidence.min_lower_bound.min(lower);
                }
            }
        }
    }
    let Some((a, b)) = bracket else {
        return Err(Error::NoRootFound(evidence));
    };
    // undecided points strictly between the last positive and the first negative one
    // sit inside the bracket; any others lie below it
    let clean = evidence.undecided == b - a - 1;

    // refine the bracket on a finer grid
    let sub = opts.refine.max(1);
    let mut lo = if a == 0 { Float::zero() } else { point(a, 0, 1) };
    let mut hi = point(b, 0, 1);
    let total = (b - a) * sub;
    for k in 1..total {
        let x = point(a, k, sub);
        match oracle.sign(&x) {
            Some(1) => lo = x,
            Some(0) => {
                return Ok(RootEnclosure {
                    lo: x.clone(),
                    hi: x.clone(),
                    certified: clean,
                    exact_periodic,
                    exact: Some(x.to_rational()),
                })
            }
            Some(_) => {
                hi = x;
                break;
            }
            None => {}
        }
    }

    while hi.sub(&lo) > *tol {
        let mid = Float::midpoint(&lo, &hi);
        match oracle.sign(&mid) {
            Some(1) => lo = mid,
            Some(0) => {
                return Ok(RootEnclosure {
                    lo: mid.clone(),
                    hi: mid.clone(),
                    certified: clean,
                    exact_periodic,
                    exact: Some(mid.to_rational()),
                })
            }
            Some(_) => hi = mid,
            None => break,
        }
    }

    let exact = if exact_periodic {
        let cand = simplest_between(&lo.to_rational(), &hi.to_rational());
        s.eval_exact(&cand).filter(|v| v.is_zero()).map(|_| cand)
    } else {
        None
    };
    Ok(RootEnclosure { lo, hi, certified: clean, exact_periodic, exact })
}

/// `π_a(ω) = (1 - a) Σ ωₖ aᵏ` as an enclosure valid for every `a` in `a`.
pub fn pi_interval<S: SymbolSeq + ?Sized>(a: &Interval, w: &S, depth: usize, prec: Precision) -> Interval {
    let one = Interval::from_int(1);
    let one_minus = one.sub(a, prec);
    let digits = |from: usize, to: usize| -> Vec<i8> { (from..to).map(|i| w.symbol(i).unwrap_or(0) as i8).collect() };
    if let Some(p) = w.period() {
        let head = horner_interval(&digits(0, p.preperiod), a, prec);
        let cycle = horner_interval(&digits(p.preperiod, p.preperiod + p.length), a, prec);
        let scale = a.powi(p.preperiod as u32, prec);
        let den = one.sub(&a.powi(p.length as u32, prec), prec);
        let sum = head.add(&scale.mul(&cycle, prec).div(&den, prec), prec);
        return one_minus.mul(&sum, prec);
    }
    let n = depth.min(w.known_len());
    let body = one_minus.mul(&horner_interval(&digits(0, n), a, prec), prec);
    // remaining digits are 0 or 1: the tail lies in [0, a^n]
    let tail = a.powi(n as u32, prec).hi;
    Interval::new(body.lo, body.hi.add(&tail).round(prec, Round::Up))
}

/// `π_a(w)` truncated to `depth` digits: `(value, error_bound)`.
pub fn pi_uniform<S: SymbolSeq + ?Sized>(a: &Float, w: &S, depth: usize, prec: Precision) -> Result<(Float, Float)> {
    check_open_unit(a)?;
    let iv = pi_interval(&Interval::point(a.clone()), w, depth, prec);
    let mid = iv.mid();
    let err = iv.hi.sub(&mid).round(prec, Round::Up);
    Ok((mid, err))
}

/// Tunables for [`entropy`] and [`conjugate_uniform`].
#[derive(Clone, Debug)]
pub struct EntropyOptions {
    /// Critical itinerary depth.
    pub depth: usize,
    /// Target bracket width for the root.
    pub tol: Float,
    pub root: RootOptions,
    /// Largest `n` for the word-count cross-check.
    pub cross_check_n: usize,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions { depth: 256, tol: Float::pow2(-100), root: RootOptions::default(), cross_check_n: 30 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub n: usize,
    pub slope: f64,
    pub ratio: f64,
}

impl From<EntropyEstimate> for CrossCheck {
    fn from(e: EntropyEstimate) -> Self {
        CrossCheck { n: e.n, slope: e.slope, ratio: e.ratio }
    }
}

#[derive(Clone, Debug)]
pub struct EntropyResult {
    pub root: RootEnclosure,
    /// `-ln` of the root midpoint.
    pub entropy: f64,
    /// `[-ln hi, -ln lo]`.
    pub entropy_bounds: (f64, f64),
    /// `π_r(α)` over the root enclosure.
    pub p: Interval,
    /// `π_r(β)` over the root enclosure; overlaps `p` at a true root.
    pub p_from_beta: Interval,
    pub equal_ratio: bool,
    /// Certified root and either equal slopes or an exact periodic root.
    pub guaranteed: bool,
    pub cross_check: CrossCheck,
    pub crit: CriticalPair,
}

fn ln_f64(x: &Float) -> f64 {
    x.to_f64().ln()
}

/// Entropy of `T_q^±` as `-ln r`, with the word-growth cross-check.
pub fn entropy(ifs: &OverlappingIfs, q: &Rational, opts: &EntropyOptions) -> Result<EntropyResult> {
    let crit = critical_itineraries(ifs, q, opts.depth)?;
    entropy_from_critical(crit, ifs.validate().equal_ratio, opts)
}

/// [`entropy`] for an already computed critical pair.
pub fn entropy_from_critical(crit: CriticalPair, equal_ratio: bool, opts: &EntropyOptions) -> Result<EntropyResult> {
    let series = kneading_series(&crit)?;
    let root = smallest_root(&series, &opts.tol, &opts.root)?;
    let prec = opts.root.precision;
    let r_iv = match &root.exact {
        Some(r) => Interval::from_rational(r, prec),
        None => root.interval(),
    };
    let p = pi_interval(&r_iv, &crit.alpha, crit.depth, prec);
    let p_from_beta = pi_interval(&r_iv, &crit.beta, crit.depth, prec);
    let n = opts.cross_check_n.min(crit.checkable_depth().saturating_sub(1)).max(1);
    let cross_check = entropy_estimate(&count_words(&crit, n)?)?.into();
    let entropy = match &root.exact {
        Some(r) => -ln_f64(&Float::from_rational(r, prec, Round::Nearest)),
        None => -ln_f64(&root.mid()),
    };
    let guaranteed = root.certified && (equal_ratio || root.exact_periodic);
    Ok(EntropyResult {
        entropy,
        entropy_bounds: (-ln_f64(&root.hi), -ln_f64(&root.lo)),
        p,
        p_from_beta,
        equal_ratio,
        guaranteed,
        cross_check,
        root,
        crit,
    })
}

/// The uniform system `U_(r,p)` conjugate to `T_q`.
pub fn conjugate_uniform(ifs: &OverlappingIfs, q: &Rational, opts: &EntropyOptions) -> Result<UniformSystem> {
    let res = entropy(ifs, q, opts)?;
    conjugate_from_entropy(&res)
}

pub fn conjugate_from_entropy(res: &EntropyResult) -> Result<UniformSystem> {
    if !res.root.certified {
        return Err(Error::NotCertified);
    }
    let prec = Precision::new(res.p.lo.bits().max(res.p.hi.bits()) as u32);
    let a = match &res.root.exact {
        Some(r) => Interval::from_rational(r, prec),
        None => res.root.interval(),
    };
    Ok(UniformSystem { a, p: res.p.clone() })
}

/// Symbol-by-symbol comparison of a replayed itinerary with a reference one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReplayTally {
    pub agree: usize,
    pub mismatches: Vec<usize>,
    /// Indices where the enclosed orbit point straddled the mask point.
    pub indeterminate: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub alpha: ReplayTally,
    pub beta: ReplayTally,
}

impl ReplayReport {
    pub fn mismatch_free(&self) -> bool {
        self.alpha.mismatches.is_empty() && self.beta.mismatches.is_empty()
    }

    pub fn indeterminate(&self) -> usize {
        self.alpha.indeterminate.len() + self.beta.indeterminate.len()
    }
}

/// Replays the itineraries of `p` under `U_(a,p)^∓` with interval arithmetic and compares
/// them to `α` and `β`. After an undecidable symbol the reference branch is followed.
pub fn replay_critical(u: &UniformSystem, crit: &CriticalPair, depth: usize, prec: Precision) -> ReplayReport {
    ReplayReport {
        alpha: replay_one(u, &crit.alpha, false, depth, prec),
        beta: replay_one(u, &crit.beta, true, depth, prec),
    }
}

fn replay_one(u: &UniformSystem, reference: &Itinerary, plus: bool, depth: usize, prec: Precision) -> ReplayTally {
    let mut tally = ReplayTally::default();
    let one = Interval::from_int(1);
    let mut x = u.p.clone();
    for n in 0..depth.min(reference.known_len()) {
        let want = reference.symbol(n).unwrap();
        let got = if n == 0 {
            // the orbit starts exactly at the mask point
            Some(u8::from(plus))
        } else if x.hi < u.p.lo || (!plus && x.hi <= u.p.lo) {
            Some(0)
        } else if x.lo > u.p.hi || (plus && x.lo >= u.p.hi) {
            Some(1)
        } else {
            None
        };
        let branch = match got {
            Some(s) if s == want => {
                tally.agree += 1;
                s
            }
            Some(s) => {
                tally.mismatches.push(n);
                s
            }
            None => {
                tally.indeterminate.push(n);
                want
            }
        };
        x = if branch == 0 { x.div(&u.a, prec) } else { one.sub(&one.sub(&x, prec).div(&u.a, prec), prec) };
    }
    tally
}
