//! Coefficient rings.
//!
//! Four rings are provided: exact rationals, Gaussian rationals, double
//! precision complex numbers and truncated Taylor jets in one parameter over
//! any of the other three. Everything upstream (series, maps, the normal form
//! engine) is generic over [`Scalar`].
//!
//! Jets carry their order at runtime, so "same ring" is a property of two
//! values rather than of a type. Binary operations on the trait assume
//! compatible operands; [`ring_arith`] is the checked entry point.

mod complex;
mod gaussian;
mod jet;
mod rational;

use core::cmp::Ordering;
use core::fmt;

pub use complex::ApproxComplex;
pub use gaussian::GaussianRational;
pub use jet::ParamJet;
pub use rational::Rational;

use crate::error::{Error, Result};

/// A commutative ring with enough structure for normal form computations.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    /// Arithmetic is exact (no rounding).
    const EXACT: bool;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;

    /// Both values live in the same ring instance (same jet order).
    fn same_ring(&self, _other: &Self) -> bool {
        true
    }

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    /// Multiplicative inverse; fails on non-units.
    fn inv(&self) -> Result<Self>;

    /// `re² + im²`, of the constant term for jets.
    fn magnitude_squared(&self) -> Magnitude;

    /// Largest absolute value over all components, in double precision.
    fn abs_f64(&self) -> f64;

    /// Embed an exact rational into this ring.
    fn embed(&self, r: &Rational) -> Self;

    /// Embed a double; `None` for exact rings.
    fn embed_f64(&self, x: f64) -> Option<Self>;

    /// Value at `λ = λ₀` as a double precision complex pair.
    fn approx(&self) -> (f64, f64);

    fn is_finite(&self) -> bool {
        true
    }

    /// The value may be dropped from sparse storage.
    fn is_prunable(&self) -> bool {
        Self::EXACT && self.is_zero()
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Squared modulus, exact where the ring is.
#[derive(Debug, Clone, PartialEq)]
pub enum Magnitude {
    Exact(Rational),
    Approx(f64),
}

impl Magnitude {
    pub fn to_f64(&self) -> f64 {
        match self {
            Magnitude::Exact(r) => r.to_f64(),
            Magnitude::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Magnitude::Exact(_))
    }

    /// Compare against one; exact for exact magnitudes.
    pub fn cmp_one(&self) -> Ordering {
        match self {
            Magnitude::Exact(r) => r.cmp(&Rational::one()),
            Magnitude::Approx(x) => x.partial_cmp(&1.0).unwrap_or(Ordering::Equal),
        }
    }

    pub fn mul(&self, rhs: &Magnitude) -> Magnitude {
        match (self, rhs) {
            (Magnitude::Exact(a), Magnitude::Exact(b)) => Magnitude::Exact(a.mul(b)),
            _ => Magnitude::Approx(self.to_f64() * rhs.to_f64()),
        }
    }

    pub fn pow(&self, e: u32) -> Magnitude {
        match self {
            Magnitude::Exact(r) => Magnitude::Exact(Scalar::pow(r, e)),
            Magnitude::Approx(x) => Magnitude::Approx(libm::pow(*x, e as f64)),
        }
    }

    /// Natural log of the modulus itself, i.e. `ln(√self)`.
    pub fn ln_modulus(&self) -> f64 {
        0.5 * libm::log(self.to_f64())
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Exact(r) => write!(f, "{r}"),
            Magnitude::Approx(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary operation: refuses operands from different ring instances.
pub fn ring_arith<S: Scalar>(a: &S, b: &S, op: RingOp) -> Result<S> {
    if !a.same_ring(b) {
        return Err(Error::config("operands belong to different rings"));
    }
    Ok(match op {
        RingOp::Add => a.add(b),
        RingOp::Sub => a.sub(b),
        RingOp::Mul => a.mul(b),
    })
}

pub fn invert_scalar<S: Scalar>(a: &S) -> Result<S> {
    a.inv()
}

pub fn magnitude_squared<S: Scalar>(a: &S) -> Magnitude {
    a.magnitude_squared()
}
