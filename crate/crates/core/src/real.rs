//! Radix-2 multiprecision reals with directed rounding, and intervals over them.
//!
//! A [`Float`] is `mant * 2^exp` with an arbitrary-precision mantissa. Addition,
//! subtraction and multiplication are exact; [`Float::round`] trims the mantissa to a
//! working precision in a chosen direction. [`Interval`] arithmetic rounds the lower
//! endpoint down and the upper endpoint up, so every interval result encloses the
//! exact result of the same operation on the enclosed reals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Environment variable that overrides the mantissa width.
pub const PRECISION_ENV: &str = "IFSDYN_PRECISION_BITS";

/// Working mantissa width in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(128);
    pub const MIN_BITS: u32 = 64;

    pub fn new(bits: u32) -> Precision {
        Precision(bits.max(Self::MIN_BITS))
    }

    /// Reads `IFSDYN_PRECISION_BITS`, falling back to 128 bits.
    pub fn from_env() -> Precision {
        std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
            .map(Precision::new)
            .unwrap_or(Self::DEFAULT)
    }

    pub fn bits(self) -> u32 {
        self.0
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

/// `mant * 2^exp`, kept canonical (odd mantissa, or zero with `exp == 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Float {
    mant: BigInt,
    exp: i64,
}

fn div_round(n: &BigInt, d: &BigInt, dir: Round) -> BigInt {
    debug_assert!(d.is_positive());
    match dir {
        Round::Down => n.div_floor(d),
        Round::Up => -((-n).div_floor(d)),
        Round::Nearest => (n * BigInt::from(2) + d).div_floor(&(d * BigInt::from(2))),
    }
}

impl Float {
    pub fn zero() -> Float {
        Float { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Float {
        Float::from_int(1)
    }

    pub fn from_int(n: i64) -> Float {
        Float::from_parts(BigInt::from(n), 0)
    }

    /// Builds `mant * 2^exp` and canonicalizes.
    pub fn from_parts(mant: BigInt, exp: i64) -> Float {
        if mant.is_zero() {
            return Float::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        Float { mant: mant >> tz, exp: exp + tz as i64 }
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Float {
        Float { mant: BigInt::one(), exp: e }
    }

    /// Exact conversion; every finite `f64` is a dyadic rational.
    pub fn from_f64(x: f64) -> Float {
        assert!(x.is_finite(), "non-finite f64");
        if x == 0.0 {
            return Float::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
        Float::from_parts(BigInt::from(m) * sign, e)
    }

    /// Rounds a rational to `prec` significant bits.
    pub fn from_rational(r: &Rational, prec: Precision, dir: Round) -> Float {
        let (n, d) = (r.numer(), r.denom());
        if n.is_zero() {
            return Float::zero();
        }
        let k = prec.bits() as i64 + d.bits() as i64 - n.bits() as i64 + 1;
        let m = if k >= 0 { div_round(&(n << k as usize), d, dir) } else { div_round(n, &(d << (-k) as usize), dir) };
        Float::from_parts(m, -k).round(prec, dir)
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as usize)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let shift = (bits - 60).max(0);
        let m = div_round(&self.mant, &(BigInt::one() << shift as usize), Round::Nearest);
        let m = m.to_f64().unwrap_or(f64::NAN);
        let e = self.exp + shift;
        // split the scaling so intermediate powers stay finite
        let half = e / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    pub fn round(&self, prec: Precision, dir: Round) -> Float {
        let bits = self.mant.bits();
        if bits <= prec.bits() as u64 {
            return self.clone();
        }
        let shift = bits - prec.bits() as u64;
        let m = div_round(&self.mant, &(BigInt::one() << shift as usize), dir);
        Float::from_parts(m, self.exp + shift as i64)
    }

    pub fn neg(&self) -> Float {
        Float { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Float {
        Float { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn add(&self, other: &Float) -> Float {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        Float::from_parts(a + b, e)
    }

    pub fn sub(&self, other: &Float) -> Float {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Float) -> Float {
        Float::from_parts(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// `self * 2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Float {
        if self.is_zero() {
            return Float::zero();
        }
        Float { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Exact midpoint of two floats.
    pub fn midpoint(a: &Float, b: &Float) -> Float {
        a.add(b).mul_pow2(-1)
    }

    /// `self / other` rounded to `prec` bits in direction `dir`.
    pub fn div(&self, other: &Float, prec: Precision, dir: Round) -> Float {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Float::zero();
        }
        let (num, den) = if other.is_negative() { (self.neg(), other.neg()) } else { (self.clone(), other.clone()) };
        let k = prec.bits() as i64 + den.mant.bits() as i64 - num.mant.bits() as i64 + 2;
        let m = if k >= 0 {
            div_round(&(&num.mant << k as usize), &den.mant, dir)
        } else {
            div_round(&num.mant, &(&den.mant << (-k) as usize), dir)
        };
        Float::from_parts(m, num.exp - den.exp - k).round(prec, dir)
    }

    /// Decimal rendering with `digits` digits after the point, rounded in `dir`.
    pub fn to_decimal(&self, digits: usize, dir: Round) -> String {
        let scaled = self.to_rational() * Rational::from_integer(BigInt::from(10u32).pow(digits as u32));
        let n = div_round(scaled.numer(), scaled.denom(), dir);
        let neg = n.is_negative();
        let s = n.abs().to_string();
        let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Float {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        a.cmp(&b)
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

/// Closed interval `[lo, hi]` of floats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Float,
    pub hi: Float,
}

impl Interval {
    pub fn new(lo: Float, hi: Float) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Float) -> Interval {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: i64) -> Interval {
        Interval::point(Float::from_int(n))
    }

    /// Tightest `prec`-bit enclosure of a rational.
    pub fn from_rational(r: &Rational, prec: Precision) -> Interval {
        Interval { lo: Float::from_rational(r, prec, Round::Down), hi: Float::from_rational(r, prec, Round::Up) }
    }

    pub fn mid(&self) -> Float {
        Float::midpoint(&self.lo, &self.hi)
    }

    pub fn width(&self) -> Float {
        self.hi.sub(&self.lo)
    }

    pub fn contains(&self, x: &Float) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        self.lo.to_rational() <= *x && *x <= self.hi.to_rational()
    }

    /// Entirely above zero.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Entirely below zero.
    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn add(&self, o: &Interval, prec: Precision) -> Interval {
        Interval { lo: self.lo.add(&o.lo).round(prec, Round::Down), hi: self.hi.add(&o.hi).round(prec, Round::Up) }
    }

    pub fn sub(&self, o: &Interval, prec: Precision) -> Interval {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Interval, prec: Precision) -> Interval {
        if self.lo.signum() >= 0 && o.lo.signum() >= 0 {
            return Interval {
                lo: self.lo.mul(&o.lo).round(prec, Round::Down),
                hi: self.hi.mul(&o.hi).round(prec, Round::Up),
            };
        }
        let products = [self.lo.mul(&o.lo), self.lo.mul(&o.hi), self.hi.mul(&o.lo), self.hi.mul(&o.hi)];
        let lo = products.iter().min().unwrap().round(prec, Round::Down);
        let hi = products.iter().max().unwrap().round(prec, Round::Up);
        Interval { lo, hi }
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, o: &Interval, prec: Precision) -> Interval {
        assert!(o.is_positive() || o.is_negative(), "interval division by zero");
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for n in [&self.lo, &self.hi] {
            for d in [&o.lo, &o.hi] {
                let l = n.div(d, prec, Round::Down);
                let h = n.div(d, prec, Round::Up);
                if lo.as_ref().is_none_or(|c| &l < c) {
                    lo = Some(l);
                }
                if hi.as_ref().is_none_or(|c| &h > c) {
                    hi = Some(h);
                }
            }
        }
        Interval { lo: lo.unwrap(), hi: hi.unwrap() }
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: u32, prec: Precision) -> Interval {
        let mut acc = Interval::from_int(1);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            base = base.mul(&base, prec);
            k >>= 1;
        }
        acc
    }

    /// Smallest interval containing both.
    pub fn hull(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    /// Widens both ends by `eps`.
    pub fn inflate(&self, eps: &Float) -> Interval {
        Interval { lo: self.lo.sub(eps), hi: self.hi.add(eps) }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
