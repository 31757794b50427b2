use alloc::format;
use alloc::vec::Vec;

use super::Series2;
use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::scalar::Scalar;

/// Germ `F(x) = (μ₁x₁ + N₁(x), μ₂x₂ + N₂(x))` with diagonal linear part and
/// nonlinear parts of degree ≥ 2, truncated at a common degree bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMap<S> {
    mu: [S; 2],
    nonlinear: [Series2<S>; 2],
    bound: u32,
}

impl<S: Scalar> PlanarMap<S> {
    pub fn new(mu1: S, mu2: S, n1: Series2<S>, n2: Series2<S>) -> Result<Self> {
        let bound = n1.bound();
        if n2.bound() != bound {
            return Err(Error::config("component series have different degree bounds"));
        }
        if !mu1.same_ring(&mu2) {
            return Err(Error::config("multipliers from different rings"));
        }
        if !mu1.is_finite() || !mu2.is_finite() {
            return Err(Error::NonFinite("multiplier".into()));
        }
        for (i, n) in [&n1, &n2].into_iter().enumerate() {
            for (m, c) in n.terms() {
                if m.degree() < 2 {
                    return Err(Error::config(format!(
                        "component {} has a term of degree {} at {m}",
                        i + 1,
                        m.degree()
                    )));
                }
                if !c.same_ring(&mu1) {
                    return Err(Error::config("coefficient ring differs from the multipliers"));
                }
                if !c.is_finite() {
                    return Err(Error::NonFinite(format!("component {} at {m}", i + 1)));
                }
            }
        }
        Ok(PlanarMap {
            mu: [mu1, mu2],
            nonlinear: [n1, n2],
            bound,
        })
    }

    /// Build from `(component index 0 or 1, exponent, coefficient)` triples.
    pub fn from_terms(
        mu1: S,
        mu2: S,
        bound: u32,
        terms: impl IntoIterator<Item = (usize, MultiIndex, S)>,
    ) -> Result<Self> {
        let mut parts: [Vec<(MultiIndex, S)>; 2] = [Vec::new(), Vec::new()];
        for (i, m, c) in terms {
            if i > 1 {
                return Err(Error::config(format!("component index {i} out of range")));
            }
            parts[i].push((m, c));
        }
        let [a, b] = parts;
        PlanarMap::new(mu1, mu2, Series2::from_terms(bound, a)?, Series2::from_terms(bound, b)?)
    }

    pub fn linear(mu1: S, mu2: S, bound: u32) -> Self {
        PlanarMap {
            mu: [mu1, mu2],
            nonlinear: [Series2::zero(bound), Series2::zero(bound)],
            bound,
        }
    }

    pub fn identity(like: &S, bound: u32) -> Self {
        PlanarMap::linear(like.one_like(), like.one_like(), bound)
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn mu(&self, i: usize) -> &S {
        &self.mu[i]
    }

    pub fn mus(&self) -> &[S; 2] {
        &self.mu
    }

    pub fn nonlinear(&self, i: usize) -> &Series2<S> {
        &self.nonlinear[i]
    }

    pub fn nonlinear_mut(&mut self, i: usize) -> &mut Series2<S> {
        &mut self.nonlinear[i]
    }

    /// Full component `i` including its linear term.
    pub fn component(&self, i: usize) -> Series2<S> {
        let mut s = self.nonlinear[i].clone();
        s.add_term(MultiIndex::unit(i), self.mu[i].clone());
        s
    }

    /// Monomial coefficient of `x^k` in component `i`, linear term included.
    pub fn coeff(&self, i: usize, k: MultiIndex) -> S {
        let lin = if k == MultiIndex::unit(i) {
            self.mu[i].clone()
        } else {
            self.mu[i].zero_like()
        };
        match self.nonlinear[i].coeff(k) {
            Some(c) => lin.add(c),
            None => lin,
        }
    }

    pub fn truncate(&self, bound: u32) -> Self {
        PlanarMap {
            mu: self.mu.clone(),
            nonlinear: [self.nonlinear[0].truncate(bound), self.nonlinear[1].truncate(bound)],
            bound,
        }
    }

    pub fn swap_coordinates(&self) -> Self {
        let sw = |s: &Series2<S>| {
            let mut out = Series2::zero(s.bound());
            for (m, c) in s.terms() {
                out.set(m.swap(), c.clone());
            }
            out
        };
        PlanarMap {
            mu: [self.mu[1].clone(), self.mu[0].clone()],
            nonlinear: [sw(&self.nonlinear[1]), sw(&self.nonlinear[0])],
            bound: self.bound,
        }
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PlanarMap<T> {
        PlanarMap {
            mu: [f(&self.mu[0]), f(&self.mu[1])],
            nonlinear: [self.nonlinear[0].map_coeffs(&f), self.nonlinear[1].map_coeffs(&f)],
            bound: self.bound,
        }
    }

    /// Both coordinate axes are invariant: every term of component `i` is
    /// divisible by `x_i`.
    pub fn preserves_axes(&self) -> bool {
        (0..2).all(|i| self.nonlinear[i].keys().all(|m| m.get(i) >= 1))
    }

    pub fn max_abs(&self) -> f64 {
        self.mu
            .iter()
            .map(S::abs_f64)
            .chain(self.nonlinear.iter().map(Series2::max_abs))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.mu.iter().all(S::is_finite) && self.nonlinear.iter().all(Series2::is_finite)
    }

    /// `N_i ∘ G` for both components, truncated at the common bound.
    fn nonlinear_at(&self, inner: &PlanarMap<S>) -> [Series2<S>; 2] {
        let bound = self.bound.min(inner.bound);
        // A monomial of degree d in the outer map only sees the inner map
        // through degree bound − d + 1.
        let low = self.nonlinear.iter().filter_map(Series2::min_degree).min().unwrap_or(2);
        let inner_bound = bound.saturating_sub(low) + 1;
        let g1 = inner.component(0).truncate(inner_bound).widen(bound);
        let g2 = inner.component(1).truncate(inner_bound).widen(bound);
        let one = Series2::monomial(bound, MultiIndex::ZERO, self.mu[0].one_like());
        let max_a = self.nonlinear.iter().flat_map(|n| n.keys()).map(|m| m.m1).max().unwrap_or(0);
        let mut pow1 = Vec::with_capacity(max_a as usize + 1);
        pow1.push(one);
        for a in 1..=max_a as usize {
            let next = pow1[a - 1].mul(&g1);
            pow1.push(next);
        }
        let eval = |n: &Series2<S>| -> Series2<S> {
            let Some(max_b) = n.keys().map(|m| m.m2).max() else {
                return Series2::zero(bound);
            };
            // Horner in the second variable: Σ_b P_b(G₁)·G₂^b.
            let mut rows: Vec<Vec<(u32, &S)>> = (0..=max_b).map(|_| Vec::new()).collect();
            for (m, c) in n.terms() {
                rows[m.m2 as usize].push((m.m1, c));
            }
            let mut acc = Series2::zero(bound);
            for b in (0..=max_b as usize).rev() {
                if b < max_b as usize {
                    acc = acc.mul(&g2);
                }
                for (a, c) in &rows[b] {
                    acc = acc.add(&pow1[*a as usize].scale(c));
                }
            }
            acc
        };
        [eval(&self.nonlinear[0]), eval(&self.nonlinear[1])]
    }

    /// `self ∘ inner` without ring checks.
    pub fn compose(&self, inner: &PlanarMap<S>) -> PlanarMap<S> {
        let bound = self.bound.min(inner.bound);
        let [n1, n2] = self.nonlinear_at(inner);
        let part = |i: usize, n: Series2<S>| {
            inner.nonlinear[i].truncate(bound).scale(&self.mu[i]).add(&n)
        };
        PlanarMap {
            mu: [self.mu[0].mul(&inner.mu[0]), self.mu[1].mul(&inner.mu[1])],
            nonlinear: [part(0, n1), part(1, n2)],
            bound,
        }
    }

    /// Compositional inverse by the fixed point `G = Λ⁻¹(y − N(G))`. The
    /// degree-`b` part of `N(G)` only involves `G` below degree `b`, so pass
    /// `b` works at truncation `b` and fixes degree `b`.
    pub fn inverse(&self) -> Result<PlanarMap<S>> {
        let inv = [self.mu[0].inv()?, self.mu[1].inv()?];
        let neg_inv = [inv[0].neg(), inv[1].neg()];
        let mut g = PlanarMap::linear(inv[0].clone(), inv[1].clone(), self.bound);
        for b in 2..=self.bound {
            let outer = self.truncate(b);
            let [n1, n2] = outer.nonlinear_at(&g.truncate(b));
            g.nonlinear = [
                n1.scale(&neg_inv[0]).widen(self.bound),
                n2.scale(&neg_inv[1]).widen(self.bound),
            ];
        }
        Ok(g)
    }

    /// `self⁻¹∘y` for `self` tangent to the identity, without forming the
    /// inverse: solves `X + N(X) = y`. With `N` of lowest degree `n`, the
    /// degree-`b` part of `N(X)` only involves `X` below degree `b`.
    pub fn left_divide(&self, y: &PlanarMap<S>) -> PlanarMap<S> {
        let bound = self.bound.min(y.bound);
        let y = y.truncate(bound);
        let Some(low) = self.nonlinear.iter().filter_map(Series2::min_degree).min() else {
            return y;
        };
        // `x` is exact through degree `done`; one pass extends that by low − 1.
        let mut x = y.clone();
        let mut done = low - 1;
        while done < bound {
            let b = (done + low - 1).min(bound);
            let [n1, n2] = self.truncate(b).nonlinear_at(&x.truncate(b));
            x.nonlinear = [
                y.nonlinear[0].sub(&n1.widen(bound)),
                y.nonlinear[1].sub(&n2.widen(bound)),
            ];
            done = b;
        }
        x
    }

    /// Value of the truncated map at a point.
    pub fn eval(&self, z: &[S; 2]) -> [S; 2] {
        let mono = |m: MultiIndex| z[0].pow(m.m1).mul(&z[1].pow(m.m2));
        let comp = |i: usize| {
            self.nonlinear[i]
                .terms()
                .fold(self.mu[i].mul(&z[i]), |acc, (m, c)| acc.add(&c.mul(&mono(*m))))
        };
        [comp(0), comp(1)]
    }

    fn same_ring_as(&self, other: &PlanarMap<S>) -> bool {
        let r = &self.mu[0];
        let all = |f: &PlanarMap<S>| {
            f.mu.iter().all(|c| c.same_ring(r))
                && f.nonlinear.iter().all(|n| n.terms().all(|(_, c)| c.same_ring(r)))
        };
        all(self) && all(other)
    }
}

/// `outer ∘ inner`, truncated at the smaller bound.
pub fn map_compose<S: Scalar>(outer: &PlanarMap<S>, inner: &PlanarMap<S>) -> Result<PlanarMap<S>> {
    if !outer.same_ring_as(inner) {
        return Err(Error::config("maps over different rings"));
    }
    Ok(outer.compose(inner))
}

pub fn map_inverse<S: Scalar>(f: &PlanarMap<S>) -> Result<PlanarMap<S>> {
    f.inverse()
}

pub fn map_eval<S: Scalar>(f: &PlanarMap<S>, z: &[S; 2]) -> Result<[S; 2]> {
    if !z.iter().all(|c| c.same_ring(&f.mu[0])) {
        return Err(Error::config("point and map over different rings"));
    }
    Ok(f.eval(z))
}
