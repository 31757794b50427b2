use alloc::format;
use core::fmt;

use num_complex::Complex64;

use super::{Magnitude, Rational, Scalar};
use crate::error::{Error, Result};

/// Double precision complex number with both parts finite at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxComplex(Complex64);

impl ApproxComplex {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::NonFinite(format!("complex literal ({re}, {im})")));
        }
        Ok(ApproxComplex(Complex64::new(re, im)))
    }

    pub fn real(re: f64) -> Result<Self> {
        ApproxComplex::new(re, 0.0)
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }
}

impl fmt::Display for ApproxComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.0.re, self.0.im)
    }
}

impl Scalar for ApproxComplex {
    const EXACT: bool = false;

    fn zero_like(&self) -> Self {
        ApproxComplex(Complex64::new(0.0, 0.0))
    }

    fn one_like(&self) -> Self {
        ApproxComplex(Complex64::new(1.0, 0.0))
    }

    fn is_zero(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }

    fn add(&self, rhs: &Self) -> Self {
        ApproxComplex(self.0 + rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        ApproxComplex(self.0 - rhs.0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        ApproxComplex(self.0 * rhs.0)
    }

    fn neg(&self) -> Self {
        ApproxComplex(-self.0)
    }

    fn inv(&self) -> Result<Self> {
        let n = self.0.norm_sqr();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NonInvertible {
                value: format!("{self}"),
            });
        }
        Ok(ApproxComplex(Complex64::new(self.0.re / n, -self.0.im / n)))
    }

    fn magnitude_squared(&self) -> Magnitude {
        Magnitude::Approx(self.0.norm_sqr())
    }

    fn abs_f64(&self) -> f64 {
        libm::hypot(self.0.re, self.0.im)
    }

    fn embed(&self, r: &Rational) -> Self {
        ApproxComplex(Complex64::new(r.to_f64(), 0.0))
    }

    fn embed_f64(&self, x: f64) -> Option<Self> {
        ApproxComplex::real(x).ok()
    }

    fn approx(&self) -> (f64, f64) {
        (self.0.re, self.0.im)
    }

    fn is_finite(&self) -> bool {
        self.0.re.is_finite() && self.0.im.is_finite()
    }
}
