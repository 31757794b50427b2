//! Finite-order analytic normal forms of planar hyperbolic saddle families.
//!
//! The crate computes, for a local diffeomorphism
//! `f(x) = (μ₁x₁, μ₂x₂) + Σ a_k x^k` truncated at total degree `D`, a
//! tangent-to-identity change of variables `h` and a normal form
//! `g = h⁻¹∘f∘h` whose surviving monomials follow the explicit flat-remainder
//! structure of the modulus-resonant (`|μ₁|^p = |μ₂|^{-q}`) and the
//! irrational-ratio cases.
//!
//! Layout:
//! - [`scalar`]: coefficient rings (exact rationals, Gaussian rationals,
//!   double precision complex, one-parameter jets).
//! - [`lattice`]: exponent cones, Bezout frames, continued fractions.
//! - [`series`]: truncated bivariate series and planar map algebra.
//! - [`normalform`]: the two-stage elimination pipelines and structure
//!   extraction.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod lattice;
pub mod normalform;
pub mod scalar;
pub mod series;

pub use error::{Error, Result, StructureViolation, Witness};
pub use lattice::{ConeTag, Frame, MultiIndex};
pub use scalar::{ApproxComplex, GaussianRational, ParamJet, Rational, Scalar};
pub use series::{PlanarMap, Series2};
