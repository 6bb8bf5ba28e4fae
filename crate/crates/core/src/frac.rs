//! Unreduced fractions for long exact orbits.
//!
//! Reducing a rational costs a gcd, which dominates once orbit points carry thousands of
//! bits. Orbit loops keep `n / d` unreduced, compare by cross-multiplication, hash through
//! a residue modulo a prime, and reduce once when a value leaves the loop.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ifs::MonotoneMap;
use crate::Rational;

/// `n / d` with `d > 0`, not necessarily in lowest terms.
#[derive(Clone, Debug)]
pub(crate) struct Frac {
    n: BigInt,
    d: BigInt,
}

/// A Mersenne prime for residue hashing.
const P: u64 = (1 << 61) - 1;

fn residue(x: &BigInt) -> u64 {
    let r = x.mod_floor(&BigInt::from(P));
    r.to_u64().expect("residue fits")
}

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    acc
}

impl Frac {
    pub fn from_rational(x: &Rational) -> Frac {
        Frac { n: x.numer().clone(), d: x.denom().clone() }
    }

    fn new(n: BigInt, d: BigInt) -> Frac {
        if d.is_negative() {
            Frac { n: -n, d: -d }
        } else {
            Frac { n, d }
        }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.n.clone(), self.d.clone())
    }

    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        (&self.n * q.denom()).cmp(&(q.numer() * &self.d))
    }

    pub fn same_value(&self, other: &Frac) -> bool {
        &self.n * &other.d == &other.n * &self.d
    }

    /// Equal values give equal keys.
    pub fn hash_key(&self) -> u64 {
        let d = residue(&self.d);
        if d == 0 {
            return u64::MAX;
        }
        mul_mod(residue(&self.n), pow_mod(d, P - 2))
    }
}

/// `x -> (a x + b) / (c x + d)` with integer coefficients.
#[derive(Clone, Debug)]
pub(crate) struct IntMoebius {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl IntMoebius {
    pub fn from_map(m: &MonotoneMap) -> IntMoebius {
        let zero = Rational::zero();
        let one = Rational::one();
        let (a, b, c, d) = match m {
            MonotoneMap::Affine { a, b } => (a, b, &zero, &one),
            MonotoneMap::Moebius { a, b, c, d } => (a, b, c, d),
        };
        let l = [a, b, c, d].iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
        let scale = |r: &Rational| r.numer() * (&l / r.denom());
        IntMoebius { a: scale(a), b: scale(b), c: scale(c), d: scale(d) }
    }

    pub fn apply(&self, x: &Frac) -> Frac {
        Frac::new(&self.a * &x.n + &self.b * &x.d, &self.c * &x.n + &self.d * &x.d)
    }

    /// The preimage of `y`; `y` must lie in the image of [0,1].
    pub fn invert(&self, y: &Frac) -> Frac {
        let den = &self.a * &y.d - &self.c * &y.n;
        debug_assert!(den.sign() != Sign::NoSign);
        Frac::new(&self.d * &y.n - &self.b * &y.d, den)
    }
}
