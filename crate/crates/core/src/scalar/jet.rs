use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use super::{Magnitude, Rational, Scalar};
use crate::error::{Error, Result};

/// Truncated Taylor expansion `c₀ + c₁·(λ−λ₀) + … + c_J·(λ−λ₀)^J` over a base
/// ring. Products are truncated at order `J`.
///
/// Operations on jets of different order panic; use
/// [`ring_arith`](super::ring_arith) for a checked variant.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamJet<B> {
    coeffs: Vec<B>,
}

impl<B: Scalar> ParamJet<B> {
    pub fn new(coeffs: Vec<B>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::config("a jet needs at least the constant term"));
        };
        if coeffs.iter().any(|c| !c.same_ring(first)) {
            return Err(Error::config("jet coefficients from different rings"));
        }
        Ok(ParamJet { coeffs })
    }

    /// Constant jet of the given order.
    pub fn constant(value: B, order: usize) -> Self {
        let zero = value.zero_like();
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(value);
        coeffs.resize(order + 1, zero);
        ParamJet { coeffs }
    }

    /// `value + λ` (the identity jet shifted by `value`).
    pub fn variable(value: B, order: usize) -> Self {
        let mut j = ParamJet::constant(value, order);
        if order >= 1 {
            j.coeffs[1] = j.coeffs[0].one_like();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[B] {
        &self.coeffs
    }

    /// Evaluation at `λ = λ₀`.
    pub fn constant_term(&self) -> &B {
        &self.coeffs[0]
    }

    fn check(&self, rhs: &Self) {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "jet ring mismatch");
    }

    fn map(&self, f: impl Fn(&B) -> B) -> Self {
        ParamJet {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&B, &B) -> B) -> Self {
        self.check(rhs);
        ParamJet {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl<B: Scalar> fmt::Display for ParamJet<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl<B: Scalar> Scalar for ParamJet<B> {
    const EXACT: bool = B::EXACT;

    fn zero_like(&self) -> Self {
        self.map(|c| c.zero_like())
    }

    fn one_like(&self) -> Self {
        ParamJet::constant(self.coeffs[0].one_like(), self.order())
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(B::is_zero)
    }

    fn same_ring(&self, other: &Self) -> bool {
        self.coeffs.len() == other.coeffs.len() && self.coeffs[0].same_ring(&other.coeffs[0])
    }

    fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, B::add)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, B::sub)
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.check(rhs);
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|k| {
                (1..=k).fold(self.coeffs[0].mul(&rhs.coeffs[k]), |acc, j| {
                    acc.add(&self.coeffs[j].mul(&rhs.coeffs[k - j]))
                })
            })
            .collect();
        ParamJet { coeffs }
    }

    fn neg(&self) -> Self {
        self.map(B::neg)
    }

    fn inv(&self) -> Result<Self> {
        let c0_inv = self.coeffs[0].inv().map_err(|_| Error::NonInvertible {
            value: self.to_string(),
        })?;
        let mut out: Vec<B> = Vec::with_capacity(self.coeffs.len());
        out.push(c0_inv.clone());
        for k in 1..self.coeffs.len() {
            let s = (1..=k).fold(self.coeffs[0].zero_like(), |acc, j| {
                acc.add(&self.coeffs[j].mul(&out[k - j]))
            });
            out.push(s.mul(&c0_inv).neg());
        }
        Ok(ParamJet { coeffs: out })
    }

    fn magnitude_squared(&self) -> Magnitude {
        self.coeffs[0].magnitude_squared()
    }

    fn abs_f64(&self) -> f64 {
        self.coeffs.iter().map(B::abs_f64).fold(0.0, f64::max)
    }

    fn embed(&self, r: &Rational) -> Self {
        ParamJet::constant(self.coeffs[0].embed(r), self.order())
    }

    fn embed_f64(&self, x: f64) -> Option<Self> {
        Some(ParamJet::constant(self.coeffs[0].embed_f64(x)?, self.order()))
    }

    fn approx(&self) -> (f64, f64) {
        self.coeffs[0].approx()
    }

    fn is_finite(&self) -> bool {
        self.coeffs.iter().all(B::is_finite)
    }

    fn is_prunable(&self) -> bool {
        B::EXACT && self.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn geometric_series_inverse() {
        // 1/(1 − λ) = 1 + λ + λ² + λ³
        let one = Rational::one();
        let j = ParamJet::new(vec![one.clone(), one.neg(), Rational::zero(), Rational::zero()]).unwrap();
        let inv = j.inv().unwrap();
        assert!(inv.coefficients().iter().all(|c| *c == one));
    }

    #[test]
    fn variable_jet() {
        let j = ParamJet::variable(Rational::new(1, 4), 3);
        assert_eq!(j.to_string(), "[1/4, 1, 0, 0]");
        let cube = j.pow(3);
        // (1/4 + λ)³ = 1/64 + 3/16 λ + 3/4 λ² + λ³
        let expect = [Rational::new(1, 64), Rational::new(3, 16), Rational::new(3, 4), Rational::one()];
        assert_eq!(cube.coefficients(), &expect);
    }
}
