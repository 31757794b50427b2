//! Two-stage homological elimination and the structural checks on its output.

mod decay;
mod eliminate;
mod pipeline;
mod structure;

use alloc::format;
use core::cmp::Ordering;

pub use decay::{decay_constants, decay_sweep, DecayConstants, DecaySweep};
pub use eliminate::{
    compose_steps, eliminate_plan, homological_degree_step, invert_steps, EliminationPlan, StageDiagnostics,
    StageOutput,
};
pub use pipeline::{
    audit_outcome, conjugacy_residual, pipeline_theorem1, pipeline_theorem2, NormalFormOutcome, Residual,
};
pub use structure::{
    extract_structure_t1, extract_structure_t2, StructuralForm, StructuralFormT1, StructuralFormT2,
};

use crate::error::{Error, Result};
use crate::scalar::{Magnitude, Scalar};

/// Relative tolerance for float modulus checks.
pub const FLOAT_CHECK_TOL: f64 = 1e-9;

/// Whether coordinates were exchanged to reach `|μ₁| < 1 < |μ₂|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Normal,
    Swapped,
}

impl Orientation {
    pub fn is_swapped(self) -> bool {
        self == Orientation::Swapped
    }
}

/// Mode dependent data for [`check_preconditions`], in the caller's
/// coordinates: `|μ₁|^p·|μ₂|^q = 1` in the resonant mode, `R = −ln|μ₁|/ln|μ₂|`
/// in the irrational mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeData {
    Theorem1 { p: u32, q: u32 },
    Theorem2 { declared_ratio: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionReport {
    pub orientation: Orientation,
    /// `|μ₁|`, `|μ₂|` in double precision, caller's coordinates.
    pub moduli: [f64; 2],
    /// The resonance was verified without rounding.
    pub exact: bool,
    /// `−ln|μ₁|/ln|μ₂|` after normalization.
    pub measured_ratio: f64,
}

fn modulus(m: &Magnitude) -> f64 {
    libm::sqrt(m.to_f64())
}

pub fn check_preconditions<S: Scalar>(mu1: &S, mu2: &S, mode: &ModeData) -> Result<PreconditionReport> {
    let (a, b) = (mu1.magnitude_squared(), mu2.magnitude_squared());
    let orientation = match (a.cmp_one(), b.cmp_one()) {
        (Ordering::Less, Ordering::Greater) => Orientation::Normal,
        (Ordering::Greater, Ordering::Less) => Orientation::Swapped,
        _ => {
            return Err(Error::Precondition(format!(
                "saddle: need |mu1| < 1 < |mu2| (or reversed), got |mu1|^2 = {a}, |mu2|^2 = {b}"
            )))
        }
    };
    let exact = a.is_exact() && b.is_exact();
    let moduli = [modulus(&a), modulus(&b)];
    let (lo, hi) = match orientation {
        Orientation::Normal => (moduli[0], moduli[1]),
        Orientation::Swapped => (moduli[1], moduli[0]),
    };
    let measured_ratio = -libm::log(lo) / libm::log(hi);
    match *mode {
        ModeData::Theorem1 { p, q } => {
            if p == 0 || q == 0 {
                return Err(Error::Domain("p and q must be positive".into()));
            }
            let lhs = a.pow(2 * p).mul(&b.pow(2 * q));
            let ok = match &lhs {
                Magnitude::Exact(v) => *v == crate::scalar::Rational::one(),
                Magnitude::Approx(_) => {
                    let log = p as f64 * libm::log(moduli[0]) + q as f64 * libm::log(moduli[1]);
                    let scale = p as f64 * libm::fabs(libm::log(moduli[0]));
                    libm::fabs(log) <= FLOAT_CHECK_TOL * scale
                }
            };
            if !ok {
                return Err(Error::Precondition(format!(
                    "modulus resonance: need |mu1|^(2p)·|mu2|^(2q) = 1 for p = {p}, q = {q}, got {lhs}"
                )));
            }
        }
        ModeData::Theorem2 { declared_ratio } => {
            if let Some(r) = declared_ratio {
                let r = if orientation.is_swapped() { 1.0 / r } else { r };
                if libm::fabs(measured_ratio - r).partial_cmp(&(FLOAT_CHECK_TOL * libm::fabs(r))) != Some(core::cmp::Ordering::Less) {
                    return Err(Error::Precondition(format!(
                        "modulus ratio: declared R = {r} but -ln|mu1|/ln|mu2| = {measured_ratio}"
                    )));
                }
            }
        }
    }
    Ok(PreconditionReport {
        orientation,
        moduli,
        exact,
        measured_ratio,
    })
}
