use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{cone_member, ConeTag, Frame, MultiIndex};
use crate::scalar::Scalar;
use crate::series::{PlanarMap, Series2};

/// Relative divisor threshold in approximate rings.
pub const SMALL_DIVISOR_TOL: f64 = 1e-8;

/// Which monomials one elimination stage removes: `x^k` in component `i`
/// is targeted when `k − e_i` lies in the stage cone, or when `k_i = 0` and
/// axis terms are included.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationPlan {
    pub tag: ConeTag,
    pub frame: Frame,
    pub include_axis_terms: bool,
}

impl EliminationPlan {
    pub fn new(tag: ConeTag, frame: Frame, include_axis_terms: bool) -> Result<Self> {
        cone_member(MultiIndex::new(1, 0), tag, &frame)?;
        Ok(EliminationPlan {
            tag,
            frame,
            include_axis_terms,
        })
    }

    pub fn targets(&self, i: usize, k: MultiIndex) -> bool {
        match k.checked_sub(MultiIndex::unit(i)) {
            None => self.include_axis_terms,
            Some(m) => !m.is_zero() && cone_member(m, self.tag, &self.frame).unwrap_or(false),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageDiagnostics {
    pub stage: String,
    /// Nonzero coefficients removed over all degrees.
    pub eliminated: usize,
    /// Smallest `|μ^k − μ_i|` over all targeted monomials.
    pub min_divisor: f64,
    /// Largest targeted coefficient left after cleaning (zero in exact rings).
    pub leftover: f64,
    /// Largest coefficient at the truncation degree, an estimate of what the
    /// truncation drops.
    pub top_degree_max: f64,
}

/// Inverted divisors `1/(μ^k − μ_i)` for every targeted monomial in a degree
/// range, validated up front.
struct DivisorTable<S> {
    inv: BTreeMap<(usize, MultiIndex), S>,
    min_abs: f64,
}

fn modulus<S: Scalar>(s: &S) -> f64 {
    let (re, im) = s.approx();
    libm::hypot(re, im)
}

impl<S: Scalar> DivisorTable<S> {
    fn build(mu: &[S; 2], plan: &EliminationPlan, degrees: core::ops::RangeInclusive<u32>) -> Result<Self> {
        let top = *degrees.end();
        let mut pows: [Vec<S>; 2] = [Vec::new(), Vec::new()];
        for (i, pw) in pows.iter_mut().enumerate() {
            pw.push(mu[i].one_like());
            for e in 1..=top as usize {
                let next = pw[e - 1].mul(&mu[i]);
                pw.push(next);
            }
        }
        let mut inv = BTreeMap::new();
        let mut min_abs = f64::INFINITY;
        for n in degrees {
            for k in MultiIndex::of_degree(n) {
                for (i, mu_i) in mu.iter().enumerate() {
                    if !plan.targets(i, k) {
                        continue;
                    }
                    let div = pows[0][k.m1 as usize].mul(&pows[1][k.m2 as usize]).sub(mu_i);
                    let size = modulus(&div);
                    let small = !S::EXACT && size < SMALL_DIVISOR_TOL * modulus(mu_i);
                    let d_inv = match div.inv() {
                        Ok(v) if !small => v,
                        _ => {
                            return Err(Error::SmallDivisor {
                                component: i as u8 + 1,
                                exponent: k,
                                divisor: format!("{div}"),
                            })
                        }
                    };
                    min_abs = min_abs.min(size);
                    inv.insert((i, k), d_inv);
                }
            }
        }
        Ok(DivisorTable { inv, min_abs })
    }
}

fn degree_step<S: Scalar>(
    f: &PlanarMap<S>,
    n: u32,
    plan: &EliminationPlan,
    table: &DivisorTable<S>,
) -> Result<(PlanarMap<S>, PlanarMap<S>, usize)> {
    let bound = f.bound();
    let one = f.mu(0).one_like();
    let mut corr = [Series2::zero(bound), Series2::zero(bound)];
    let mut count = 0;
    for (i, c) in corr.iter_mut().enumerate() {
        for (k, a) in f.nonlinear(i).terms() {
            if k.degree() != n {
                continue;
            }
            if let Some(d_inv) = table.inv.get(&(i, *k)) {
                if !a.is_zero() {
                    count += 1;
                }
                c.set(*k, a.mul(d_inv));
            }
        }
    }
    if count == 0 {
        return Ok((f.clone(), PlanarMap::identity(&one, bound), 0));
    }
    let [c1, c2] = corr;
    let h = PlanarMap::new(one.clone(), one, c1, c2)?;
    let mut next = h.left_divide(&f.compose(&h));
    if !S::EXACT {
        // Cancellation leaves rounding noise; the exact value is zero.
        for i in 0..2 {
            let hit: Vec<MultiIndex> = next
                .nonlinear(i)
                .keys()
                .filter(|k| k.degree() == n && plan.targets(i, *k))
                .collect();
            for k in hit {
                next.nonlinear_mut(i).remove(k);
            }
        }
    }
    Ok((next, h, count))
}

/// One homological step at degree `n`: returns `(h_n⁻¹∘F∘h_n, h_n)` with
/// `h_n = id + H`, `H` homogeneous of degree `n` and coefficients
/// `a_{k,i}/(μ^k − μ_i)` on the targeted monomials.
pub fn homological_degree_step<S: Scalar>(
    f: &PlanarMap<S>,
    n: u32,
    plan: &EliminationPlan,
) -> Result<(PlanarMap<S>, PlanarMap<S>)> {
    if n < 2 || n > f.bound() {
        return Err(Error::config(format!("degree {n} outside 2..={}", f.bound())));
    }
    let table = DivisorTable::build(f.mus(), plan, n..=n)?;
    let (g, h, _) = degree_step(f, n, plan, &table)?;
    Ok((g, h))
}

/// Output of [`eliminate_plan`]: `map = h⁻¹∘F∘h` with `h = h₂∘h₃∘…∘h_D`.
#[derive(Debug, Clone, PartialEq)]
pub struct StageOutput<S> {
    pub map: PlanarMap<S>,
    /// The nontrivial factors `h_n = id + H_n`, in order of degree.
    pub steps: Vec<PlanarMap<S>>,
    pub diagnostics: StageDiagnostics,
}

/// `h₁∘h₂∘…∘h_r`, folded from the right so each outer factor is a single
/// homogeneous correction.
pub fn compose_steps<S: Scalar>(id: &PlanarMap<S>, steps: &[PlanarMap<S>]) -> PlanarMap<S> {
    steps.iter().rev().fold(id.clone(), |acc, h| h.compose(&acc))
}

/// `(h₁∘h₂∘…∘h_r)⁻¹ = h_r⁻¹∘…∘h₁⁻¹`.
pub fn invert_steps<S: Scalar>(id: &PlanarMap<S>, steps: &[PlanarMap<S>]) -> PlanarMap<S> {
    steps.iter().fold(id.clone(), |acc, h| h.left_divide(&acc))
}

impl<S: Scalar> StageOutput<S> {
    pub fn h(&self) -> PlanarMap<S> {
        compose_steps(&self.identity(), &self.steps)
    }

    pub fn h_inv(&self) -> PlanarMap<S> {
        invert_steps(&self.identity(), &self.steps)
    }

    fn identity(&self) -> PlanarMap<S> {
        PlanarMap::identity(self.map.mu(0), self.map.bound())
    }
}

/// Runs the homological step for `n = 2..=D`.
pub fn eliminate_plan<S: Scalar>(
    f: &PlanarMap<S>,
    plan: &EliminationPlan,
    degree: u32,
    stage: &str,
) -> Result<StageOutput<S>> {
    if degree > f.bound() {
        return Err(Error::config(format!(
            "degree {degree} exceeds the map's bound {}",
            f.bound()
        )));
    }
    let mut cur = f.truncate(degree);
    let mut steps = Vec::new();
    let table = DivisorTable::build(cur.mus(), plan, 2..=degree.max(1))?;
    let mut eliminated = 0;
    for n in 2..=degree {
        let (next, h_n, count) = degree_step(&cur, n, plan, &table)?;
        if count > 0 {
            steps.push(h_n);
            eliminated += count;
        }
        cur = next;
    }
    let mut leftover: f64 = 0.0;
    let mut top_degree_max: f64 = 0.0;
    for i in 0..2 {
        for (k, c) in cur.nonlinear(i).terms() {
            if plan.targets(i, *k) {
                leftover = leftover.max(c.abs_f64());
            }
            if k.degree() == degree {
                top_degree_max = top_degree_max.max(c.abs_f64());
            }
        }
    }
    let diag = StageDiagnostics {
        stage: stage.into(),
        eliminated,
        min_divisor: if table.inv.is_empty() { f64::INFINITY } else { table.min_abs },
        leftover,
        top_degree_max,
    };
    Ok(StageOutput {
        map: cur,
        steps,
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::resonance_frame;
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn stage1() -> EliminationPlan {
        EliminationPlan::new(ConeTag::G0, resonance_frame(3, 2, 1).unwrap().into(), true).unwrap()
    }

    #[test]
    fn removes_axis_square() {
        let f = PlanarMap::from_terms(q(1, 4), q(8, 1), 4, [(0, MultiIndex::new(0, 2), q(1, 1))]).unwrap();
        let (g, h) = homological_degree_step(&f, 2, &stage1()).unwrap();
        assert_eq!(h.nonlinear(0).coeff(MultiIndex::new(0, 2)), Some(&q(4, 255)));
        assert!(g.nonlinear(0).coeff(MultiIndex::new(0, 2)).is_none());
        assert_eq!(g.compose(&PlanarMap::identity(&q(1, 1), 4)), g);
        assert_eq!(f.compose(&h), h.compose(&g));
    }

    #[test]
    fn untouched_degree_is_identity() {
        let f = PlanarMap::from_terms(q(1, 4), q(8, 1), 4, [(0, MultiIndex::new(2, 1), q(1, 1))]).unwrap();
        let (g, h) = homological_degree_step(&f, 2, &stage1()).unwrap();
        assert_eq!(g, f.truncate(4));
        assert_eq!(h, PlanarMap::identity(&q(1, 1), 4));
    }

    #[test]
    fn zero_divisor_is_reported() {
        // μ^(3,2)·μ₁ = μ₁ for the resonant multiplier, and (3,2) ∉ G0, so
        // target it through a plan that wrongly includes B2.
        let plan = EliminationPlan::new(ConeTag::B2, resonance_frame(3, 2, 1).unwrap().into(), false).unwrap();
        let f = PlanarMap::linear(q(1, 4), q(8, 1), 6);
        let e = eliminate_plan(&f, &plan, 6, "bad").unwrap_err();
        assert!(matches!(e, Error::SmallDivisor { exponent, .. } if exponent == MultiIndex::new(4, 2) || exponent == MultiIndex::new(3, 3)));
    }

    #[test]
    fn alpha0_divisor() {
        let plan = stage1();
        let mu = [q(1, 4), q(8, 1)];
        let t = DivisorTable::build(&mu, &plan, 4..=4).unwrap();
        // k = (3,1) = α₀ + e₁: divisor μ₁(μ^α₀ − 1) = −1/8
        assert_eq!(t.inv.get(&(0, MultiIndex::new(3, 1))), Some(&q(-8, 1)));
    }
}
