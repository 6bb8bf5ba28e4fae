//! Overlapping iterated function systems on the unit interval.
//!
//! Two increasing contractions `f0, f1` of `[0, 1]` with overlapping images, together
//! with a mask point `q`, define a piecewise expanding map `T_q^±` whose itineraries are
//! the addresses of points under the IFS. This crate computes those itineraries exactly
//! (rational arithmetic), the critical itineraries `α`, `β` of the mask point, the
//! admissible words of the address space, the topological entropy as `-ln r` for the
//! smallest root `r` of the kneading series `Σ(βₙ - αₙ)xⁿ`, the conjugate uniform system
//! `U_(r,p)`, and fractal transformations `π_G ∘ τ_F` between masked systems, including
//! their action on pictures.

pub mod cli;
pub mod error;
mod frac;
pub mod ifs;
pub mod kneading;
pub mod picture;
pub mod real;
pub mod symbolic;
pub mod transform;

pub use error::{Error, Result};
pub use ifs::{MaskedSystem, MonotoneMap, OverlappingIfs, UniformSystem, Variant};

/// Exact rational coordinate.
pub type Rational = num_rational::BigRational;
