//! Simple continued fractions and the convergent frames of the
//! irrational-ratio case.
//!
//! Convergents are indexed from one with seeds `q₀ = 1, q₋₁ = 0, p₀ = 0,
//! p₋₁ = 1`, so that `q₁/p₁ = a₁`. Odd convergents approach the value from
//! below and even ones from above.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::MultiIndex;
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Largest number of quotients extracted from a double.
pub const FLOAT_QUOTIENT_LIMIT: usize = 12;

/// The quadratic irrational `(a + b·√d) / c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

fn sign_of_sum(x: &BigInt, y: &BigInt, d: &BigInt) -> Ordering {
    // sign of x + y·√d for non-square d > 0
    let sx = x.sign();
    let sy = y.sign();
    use num_bigint::Sign::*;
    match (sx, sy) {
        (NoSign, NoSign) => Ordering::Equal,
        (Plus | NoSign, Plus | NoSign) => Ordering::Greater,
        (Minus | NoSign, Minus | NoSign) => Ordering::Less,
        _ => {
            let x2 = x * x;
            let y2d = y * y * d;
            let x_dominates = x2 > y2d;
            match (x_dominates, sx) {
                (true, Plus) | (false, Minus) => Ordering::Greater,
                _ => Ordering::Less,
            }
        }
    }
}

impl QuadraticSurd {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Domain("surd denominator is zero".into()));
        }
        if !d.is_positive() {
            return Err(Error::Domain(format!("radicand {d} must be positive")));
        }
        let root = d.sqrt();
        if &root * &root == d || b.is_zero() {
            return Err(Error::NotIrrational(format!("({a} + {b}·√{d})/{c}")));
        }
        let s = QuadraticSurd { a, b, c, d };
        if s.signum() != Ordering::Greater {
            return Err(Error::Domain(format!("{s} is not positive")));
        }
        Ok(s)
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        QuadraticSurd::new(a.into(), b.into(), c.into(), d.into())
    }

    /// `(1 + √5)/2`
    pub fn golden() -> Self {
        QuadraticSurd::from_i64(1, 1, 2, 5).expect("golden ratio")
    }

    fn signum(&self) -> Ordering {
        let s = sign_of_sum(&self.a, &self.b, &self.d);
        if self.c.is_negative() {
            s.reverse()
        } else {
            s
        }
    }

    /// Exact comparison with the rational `num/den`, `den > 0`.
    pub fn cmp_rational(&self, num: &BigInt, den: &BigInt) -> Ordering {
        // (a + b√d)/c − num/den = (den·a − num·c + den·b·√d) / (den·c)
        let x = den * &self.a - num * &self.c;
        let y = den * &self.b;
        let s = sign_of_sum(&x, &y, &self.d);
        if self.c.is_negative() {
            s.reverse()
        } else {
            s
        }
    }

    /// `c / (a + b√d)` rewritten as a surd.
    pub fn reciprocal(&self) -> Self {
        let den = &self.a * &self.a - &self.b * &self.b * &self.d;
        QuadraticSurd {
            a: &self.c * &self.a,
            b: -(&self.c * &self.b),
            c: den,
            d: self.d.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        (f(&self.a) + f(&self.b) * libm::sqrt(f(&self.d))) / f(&self.c)
    }

    /// First `n` partial quotients via the periodic algorithm on
    /// `(P + √D)/Q` with `Q | D − P²`.
    pub fn quotients(&self, n: usize) -> Vec<BigInt> {
        let (mut a, mut b, mut c) = (self.a.clone(), self.b.clone(), self.c.clone());
        if b.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let mut big_d = &b * &b * &self.d;
        let mut p = a;
        let mut q = c;
        if !(&big_d - &p * &p).is_multiple_of(&q) {
            let qa = q.abs();
            p *= &qa;
            big_d *= &q * &q;
            q *= &qa;
        }
        let root = big_d.sqrt();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let num = &p + &root;
            let quotient = if q.is_positive() {
                num.div_floor(&q)
            } else {
                -num.div_floor(&-&q) - BigInt::one()
            };
            p = &quotient * &q - &p;
            q = (&big_d - &p * &p) / &q;
            out.push(quotient);
        }
        out
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}·√{})/{}", self.a, self.b, self.d, self.c)
    }
}

/// How the modulus ratio `R` is given.
#[derive(Debug, Clone, PartialEq)]
pub enum RatioSpec {
    Rational(Rational),
    Surd(QuadraticSurd),
    /// Leading quotients of an expansion known only through them.
    Quotients(Vec<BigInt>),
    /// A double, expanded to at most `max_terms ≤ FLOAT_QUOTIENT_LIMIT` quotients.
    Float { value: f64, max_terms: usize },
}

impl RatioSpec {
    pub fn value_f64(&self) -> Option<f64> {
        match self {
            RatioSpec::Rational(r) => Some(r.to_f64()),
            RatioSpec::Surd(s) => Some(s.to_f64()),
            RatioSpec::Quotients(_) => None,
            RatioSpec::Float { value, .. } => Some(*value),
        }
    }

    /// The spec of `1/R`.
    pub fn reciprocal(&self) -> Result<RatioSpec> {
        Ok(match self {
            RatioSpec::Rational(r) => RatioSpec::Rational(crate::scalar::Scalar::inv(r)?),
            RatioSpec::Surd(s) => RatioSpec::Surd(s.reciprocal()),
            RatioSpec::Quotients(qs) => match qs.split_first() {
                Some((first, rest)) if first.is_zero() => RatioSpec::Quotients(rest.to_vec()),
                _ => {
                    let mut v = Vec::with_capacity(qs.len() + 1);
                    v.push(BigInt::zero());
                    v.extend_from_slice(qs);
                    RatioSpec::Quotients(v)
                }
            },
            RatioSpec::Float { value, max_terms } => RatioSpec::Float {
                value: 1.0 / value,
                max_terms: *max_terms,
            },
        })
    }
}

/// Partial quotients `a₁, a₂, …` of a simple continued fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct CfExpansion {
    pub quotients: Vec<BigInt>,
    /// The input is known to be rational.
    pub rational: bool,
    /// The expansion ended within the returned quotients.
    pub terminated: bool,
    /// Quotients were extracted from a double and may be unreliable.
    pub approximate: bool,
}

pub fn cf_quotients(spec: &RatioSpec, n: usize) -> Result<CfExpansion> {
    if n == 0 {
        return Err(Error::Domain("at least one quotient must be requested".into()));
    }
    match spec {
        RatioSpec::Surd(s) => Ok(CfExpansion {
            quotients: s.quotients(n),
            rational: false,
            terminated: false,
            approximate: false,
        }),
        RatioSpec::Rational(r) => {
            if !r.is_positive() {
                return Err(Error::Domain(format!("{r} is not positive")));
            }
            let (mut num, mut den) = (r.numer().clone(), r.denom().clone());
            let mut quotients = Vec::new();
            let mut terminated = false;
            while quotients.len() < n {
                let (a, rem) = num.div_mod_floor(&den);
                quotients.push(a);
                if rem.is_zero() {
                    terminated = true;
                    break;
                }
                num = den;
                den = rem;
            }
            Ok(CfExpansion {
                quotients,
                rational: true,
                terminated,
                approximate: false,
            })
        }
        RatioSpec::Quotients(qs) => {
            if qs.is_empty() {
                return Err(Error::Domain("empty quotient list".into()));
            }
            if qs[0].is_negative() || qs[1..].iter().any(|a| !a.is_positive()) {
                return Err(Error::Domain(
                    "quotients must be positive (the first may be zero)".into(),
                ));
            }
            if qs.len() < n {
                return Err(Error::Domain(format!(
                    "{n} quotients requested but only {} supplied",
                    qs.len()
                )));
            }
            Ok(CfExpansion {
                quotients: qs[..n].to_vec(),
                rational: false,
                terminated: false,
                approximate: false,
            })
        }
        RatioSpec::Float { value, max_terms } => {
            if !(value.is_finite() && *value > 0.0) {
                return Err(Error::Domain(format!("{value} is not a positive finite number")));
            }
            let limit = (*max_terms).min(FLOAT_QUOTIENT_LIMIT);
            if n > limit {
                return Err(Error::Domain(format!(
                    "{n} quotients requested from a double; the guard allows {limit}"
                )));
            }
            let mut x = *value;
            let mut quotients = Vec::new();
            let mut terminated = false;
            while quotients.len() < n {
                let a = libm::floor(x);
                quotients.push(BigInt::from(a as u64));
                let frac = x - a;
                if frac == 0.0 {
                    terminated = true;
                    break;
                }
                x = 1.0 / frac;
                if !x.is_finite() {
                    terminated = true;
                    break;
                }
            }
            Ok(CfExpansion {
                quotients,
                rational: false,
                terminated,
                approximate: true,
            })
        }
    }
}

/// Convergents `(q_n, p_n)`, `q_n/p_n = [a₁ … a_n]`.
pub fn cf_convergents(quotients: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::with_capacity(quotients.len());
    for a in quotients {
        let q_next = a * &q + &q_prev;
        let p_next = a * &p + &p_prev;
        q_prev = core::mem::replace(&mut q, q_next);
        p_prev = core::mem::replace(&mut p, p_next);
        out.push((q.clone(), p.clone()));
    }
    out
}

/// Consecutive convergents `q/p = q_{2k+1}/p_{2k+1}` and
/// `q̃/p̃ = q_{2k+2}/p_{2k+2}` bracketing `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentFrame {
    pub quotients: Vec<BigInt>,
    pub k: u32,
    pub p: u32,
    pub q: u32,
    pub p_tilde: u32,
    pub q_tilde: u32,
}

impl ConvergentFrame {
    /// Exponent of `u = x₁^p x₂^q`.
    pub fn u(&self) -> MultiIndex {
        MultiIndex::new(self.p, self.q)
    }

    /// Exponent of `ũ = x₁^p̃ x₂^q̃`.
    pub fn u_tilde(&self) -> MultiIndex {
        MultiIndex::new(self.p_tilde, self.q_tilde)
    }

    /// `(j, l)` with `m = j·(p,q) + l·(p̃,q̃)`; the basis has determinant one.
    pub fn coordinates(&self, m: MultiIndex) -> (i64, i64) {
        let (m1, m2) = (m.m1 as i64, m.m2 as i64);
        (
            self.q_tilde as i64 * m1 - self.p_tilde as i64 * m2,
            -(self.q as i64) * m1 + self.p as i64 * m2,
        )
    }
}

fn small(x: &BigInt, what: &str) -> Result<u32> {
    x.to_u32()
        .filter(|v| *v > 0)
        .ok_or_else(|| Error::Domain(format!("{what} = {x} is not a usable positive exponent")))
}

pub fn theorem2_frame(spec: &RatioSpec, k: u32) -> Result<ConvergentFrame> {
    if let RatioSpec::Rational(r) = spec {
        return Err(Error::NotIrrational(format!(
            "{r} is rational; use the resonant pipeline"
        )));
    }
    let needed = 2 * k as usize + 2;
    let exp = cf_quotients(spec, needed)?;
    if exp.terminated || exp.quotients.len() < needed {
        return Err(Error::NotIrrational(
            "the expansion terminates before the requested convergents".into(),
        ));
    }
    let conv = cf_convergents(&exp.quotients);
    let (q, p) = &conv[2 * k as usize];
    let (qt, pt) = &conv[2 * k as usize + 1];
    match spec {
        RatioSpec::Surd(s) => {
            if s.cmp_rational(q, p) != Ordering::Greater || s.cmp_rational(qt, pt) != Ordering::Less {
                return Err(Error::Domain(format!(
                    "convergents {q}/{p}, {qt}/{pt} do not bracket {s}"
                )));
            }
        }
        RatioSpec::Float { value, .. } => {
            let lo = q.to_f64().unwrap_or(f64::NAN) / p.to_f64().unwrap_or(f64::NAN);
            let hi = qt.to_f64().unwrap_or(f64::NAN) / pt.to_f64().unwrap_or(f64::NAN);
            if !(lo < *value && *value < hi) {
                return Err(Error::Domain(format!("convergents do not bracket {value}")));
            }
        }
        _ => {}
    }
    Ok(ConvergentFrame {
        quotients: exp.quotients,
        k,
        p: small(p, "p")?,
        q: small(q, "q")?,
        p_tilde: small(pt, "p̃")?,
        q_tilde: small(qt, "q̃")?,
    })
}

impl fmt::Display for ConvergentFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} u=x1^{} x2^{} ũ=x1^{} x2^{}",
            self.k, self.p, self.q, self.p_tilde, self.q_tilde
        )
    }
}
