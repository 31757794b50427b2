use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lattice::MultiIndex;

/// One offending coefficient found while checking the shape of a map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Where the violation was detected (stage or check name).
    pub context: String,
    /// Map component, 1 or 2.
    pub component: u8,
    /// Multiplier exponent `m` (or monomial exponent when `monomial` is set).
    pub exponent: MultiIndex,
    pub monomial: bool,
    pub reason: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.monomial { "monomial" } else { "multiplier" };
        write!(
            f,
            "[{}] component {} {} exponent {}: {}",
            self.context, self.component, kind, self.exponent, self.reason
        )
    }
}

/// Witness list carried by [`Error::Structure`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureViolation(pub Vec<Witness>);

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation(s)", self.0.len())?;
        if let Some(first) = self.0.first() {
            write!(f, ", first: {first}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("value {value} is not invertible")]
    NonInvertible { value: String },
    #[error("p = {p} and q = {q} are not coprime")]
    NotCoprime { p: u64, q: u64 },
    #[error("not irrational: {0}")]
    NotIrrational(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("small divisor {divisor} for component {component}, exponent {exponent}")]
    SmallDivisor {
        component: u8,
        exponent: MultiIndex,
        divisor: String,
    },
    #[error("structure violation: {0}")]
    Structure(StructureViolation),
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn is_structure(&self) -> bool {
        matches!(self, Error::Structure(_))
    }

    pub fn witnesses(&self) -> &[Witness] {
        match self {
            Error::Structure(v) => &v.0,
            _ => &[],
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
