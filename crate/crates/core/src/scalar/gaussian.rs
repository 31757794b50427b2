use alloc::string::ToString;
use core::fmt;

use super::{Magnitude, Rational, Scalar};
use crate::error::{Error, Result};

/// `re + i·im` with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_real(re: Rational) -> Self {
        GaussianRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    fn norm(&self) -> Rational {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})+({})i", self.re, self.im)
    }
}

impl Scalar for GaussianRational {
    const EXACT: bool = true;

    fn zero_like(&self) -> Self {
        GaussianRational::from_real(Rational::zero())
    }

    fn one_like(&self) -> Self {
        GaussianRational::from_real(Rational::one())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        GaussianRational::new(self.re.add(&rhs.re), self.im.add(&rhs.im))
    }

    fn sub(&self, rhs: &Self) -> Self {
        GaussianRational::new(self.re.sub(&rhs.re), self.im.sub(&rhs.im))
    }

    fn mul(&self, rhs: &Self) -> Self {
        let re = self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im));
        let im = self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re));
        GaussianRational::new(re, im)
    }

    fn neg(&self) -> Self {
        GaussianRational::new(self.re.neg(), self.im.neg())
    }

    fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::NonInvertible {
                value: self.to_string(),
            });
        }
        let n_inv = n.inv()?;
        let c = self.conj();
        Ok(GaussianRational::new(c.re.mul(&n_inv), c.im.mul(&n_inv)))
    }

    fn magnitude_squared(&self) -> Magnitude {
        Magnitude::Exact(self.norm())
    }

    fn abs_f64(&self) -> f64 {
        libm::hypot(self.re.to_f64(), self.im.to_f64())
    }

    fn embed(&self, r: &Rational) -> Self {
        GaussianRational::from_real(r.clone())
    }

    fn embed_f64(&self, _x: f64) -> Option<Self> {
        None
    }

    fn approx(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}
