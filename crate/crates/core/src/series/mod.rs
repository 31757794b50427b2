//! Truncated bivariate power series and planar maps built from them.

mod map;
mod view;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

pub use map::{map_compose, map_eval, map_inverse, PlanarMap};
pub use view::{from_view, to_multiplier_view, MultiplierView};

use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::scalar::Scalar;

/// Sparse series `Σ c_m x^m` with every key of total degree at most `bound`.
/// Exact rings never store zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Series2<S> {
    bound: u32,
    terms: BTreeMap<MultiIndex, S>,
}

/// Position of `m` in the dense triangle of degree ≤ bound.
fn tri_index(m: MultiIndex) -> usize {
    let d = m.degree() as usize;
    d * (d + 1) / 2 + m.m2 as usize
}

fn tri_len(bound: u32) -> usize {
    let b = bound as usize;
    (b + 1) * (b + 2) / 2
}

/// Dense accumulator keyed by [`tri_index`].
struct Accumulator<S> {
    slots: Vec<Option<S>>,
    bound: u32,
}

impl<S: Scalar> Accumulator<S> {
    fn new(bound: u32) -> Self {
        Accumulator {
            slots: vec![None; tri_len(bound)],
            bound,
        }
    }

    fn add(&mut self, m: MultiIndex, c: S) {
        let slot = &mut self.slots[tri_index(m)];
        match slot {
            Some(v) => *v = v.add(&c),
            None => *slot = Some(c),
        }
    }

    fn finish(self) -> Series2<S> {
        let mut terms = BTreeMap::new();
        for d in 0..=self.bound {
            for m in MultiIndex::of_degree(d) {
                if let Some(c) = &self.slots[tri_index(m)] {
                    if !c.is_prunable() {
                        terms.insert(m, c.clone());
                    }
                }
            }
        }
        Series2 {
            bound: self.bound,
            terms,
        }
    }
}

impl<S: Scalar> Series2<S> {
    pub fn zero(bound: u32) -> Self {
        Series2 {
            bound,
            terms: BTreeMap::new(),
        }
    }

    /// Sums repeated keys; rejects keys above the bound and non-finite values.
    pub fn from_terms(bound: u32, terms: impl IntoIterator<Item = (MultiIndex, S)>) -> Result<Self> {
        let mut s = Series2::zero(bound);
        let mut first: Option<S> = None;
        for (m, c) in terms {
            if m.degree() > bound {
                return Err(Error::config(alloc::format!(
                    "exponent {m} exceeds the degree bound {bound}"
                )));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite(alloc::format!("coefficient of {m}")));
            }
            match &first {
                Some(f) if !f.same_ring(&c) => {
                    return Err(Error::config("coefficients from different rings"))
                }
                None => first = Some(c.clone()),
                _ => {}
            }
            s.add_term(m, c);
        }
        Ok(s)
    }

    pub fn monomial(bound: u32, m: MultiIndex, c: S) -> Self {
        let mut s = Series2::zero(bound);
        s.add_term(m, c);
        s
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn coeff(&self, m: MultiIndex) -> Option<&S> {
        self.terms.get(&m)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        self.terms.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some stored coefficient, used as a ring template.
    pub fn representative(&self) -> Option<&S> {
        self.terms.values().next()
    }

    /// Add `c·x^m`; terms above the bound are dropped.
    pub fn add_term(&mut self, m: MultiIndex, c: S) {
        if m.degree() > self.bound {
            return;
        }
        let v = match self.terms.remove(&m) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !v.is_prunable() {
            self.terms.insert(m, v);
        }
    }

    pub fn set(&mut self, m: MultiIndex, c: S) {
        if m.degree() > self.bound {
            return;
        }
        if c.is_prunable() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, c);
        }
    }

    pub fn remove(&mut self, m: MultiIndex) -> Option<S> {
        self.terms.remove(&m)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.truncate(self.bound.min(rhs.bound));
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.truncate(self.bound.min(rhs.bound));
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    /// Cauchy product truncated at `min(bound, rhs.bound)`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let bound = self.bound.min(rhs.bound);
        let mut right: Vec<(MultiIndex, &S)> = rhs.terms.iter().map(|(m, c)| (*m, c)).collect();
        right.sort_by_key(|(m, _)| m.degree());
        let mut acc = Accumulator::new(bound);
        for (ma, ca) in &self.terms {
            let room = match bound.checked_sub(ma.degree()) {
                Some(r) => r,
                None => continue,
            };
            for (mb, cb) in &right {
                if mb.degree() > room {
                    break;
                }
                acc.add(*ma + *mb, ca.mul(cb));
            }
        }
        acc.finish()
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Series2::zero(self.bound);
        for (m, v) in &self.terms {
            out.set(*m, c.mul(v));
        }
        out
    }

    pub fn truncate(&self, bound: u32) -> Self {
        Series2 {
            bound,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= bound)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Same terms under a larger bound.
    pub(crate) fn widen(mut self, bound: u32) -> Self {
        debug_assert!(bound >= self.bound);
        self.bound = bound;
        self
    }

    /// Terms of total degree exactly `n`.
    pub fn homogeneous(&self, n: u32) -> Self {
        Series2 {
            bound: self.bound,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == n)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Series2<T> {
        let mut out = Series2::zero(self.bound);
        for (m, c) in &self.terms {
            out.set(*m, f(c));
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(S::abs_f64).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.terms.values().all(S::is_finite)
    }

    fn compatible(&self, rhs: &Self) -> bool {
        let Some(r) = self.representative().or_else(|| rhs.representative()) else {
            return true;
        };
        self.terms.values().chain(rhs.terms.values()).all(|c| c.same_ring(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

/// Checked series arithmetic; the result bound is the smaller of the two.
pub fn series_arith<S: Scalar>(a: &Series2<S>, b: &Series2<S>, op: SeriesOp) -> Result<Series2<S>> {
    if !a.compatible(b) {
        return Err(Error::config("series over different rings"));
    }
    Ok(match op {
        SeriesOp::Add => a.add(b),
        SeriesOp::Sub => a.sub(b),
        SeriesOp::Mul => a.mul(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ParamJet, Rational};

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn mi(a: u32, b: u32) -> MultiIndex {
        MultiIndex::new(a, b)
    }

    fn s(bound: u32, t: &[((u32, u32), i64)]) -> Series2<Rational> {
        Series2::from_terms(bound, t.iter().map(|&((a, b), c)| (mi(a, b), q(c)))).unwrap()
    }

    #[test]
    fn product_of_binomials() {
        let a = s(2, &[((0, 0), 1), ((1, 0), 1)]);
        let b = s(2, &[((0, 0), 1), ((0, 1), 1)]);
        let expect = s(2, &[((0, 0), 1), ((1, 0), 1), ((0, 1), 1), ((1, 1), 1)]);
        assert_eq!(series_arith(&a, &b, SeriesOp::Mul).unwrap(), expect);
    }

    #[test]
    fn zero_annihilates() {
        let a = s(4, &[((0, 0), 3), ((2, 1), -1)]);
        assert!(a.mul(&Series2::zero(4)).is_empty());
    }

    #[test]
    fn truncated_square() {
        let g = s(3, &[((0, 0), 1), ((1, 0), 1), ((2, 0), 1), ((3, 0), 1)]);
        let expect = s(3, &[((0, 0), 1), ((1, 0), 2), ((2, 0), 3), ((3, 0), 4)]);
        assert_eq!(g.mul(&g), expect);
    }

    #[test]
    fn bound_is_minimum() {
        let a = s(5, &[((1, 1), 1)]);
        let b = s(3, &[((1, 0), 1)]);
        let c = a.mul(&b);
        assert_eq!(c.bound(), 3);
        assert_eq!(c.coeff(mi(2, 1)), Some(&q(1)));
        assert_eq!(a.add(&b).bound(), 3);
    }

    #[test]
    fn cancellation_prunes_exact_zeros() {
        let a = s(3, &[((1, 1), 2)]);
        assert!(a.sub(&a).is_empty());
    }

    #[test]
    fn rejects_out_of_bound_keys_and_mixed_jets() {
        assert!(Series2::from_terms(2, [(mi(2, 1), q(1))]).is_err());
        let j1 = ParamJet::constant(q(1), 1);
        let j2 = ParamJet::constant(q(1), 2);
        assert!(Series2::from_terms(3, [(mi(1, 0), j1.clone()), (mi(0, 1), j2.clone())]).is_err());
        let a = Series2::monomial(3, mi(1, 0), j1);
        let b = Series2::monomial(3, mi(1, 0), j2);
        assert!(series_arith(&a, &b, SeriesOp::Add).is_err());
    }
}
