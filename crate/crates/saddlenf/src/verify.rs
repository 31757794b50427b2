//! Independent oracles and generators.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saddlenf_core::lattice::{RatioSpec, ResonanceFrame};
use saddlenf_core::normalform::NormalFormOutcome;
use saddlenf_core::{ApproxComplex, ConeTag, Error, Frame, MultiIndex, PlanarMap, Rational, Result, Scalar};
use serde::{Deserialize, Serialize};

use crate::job::RatioLiteral;

/// Default search box half-width for [`brute_cone_member`].
pub const DEFAULT_SEARCH_BOUND: i64 = 200;

/// `num/den` as an extended slope, `None` for the undefined `0/0`.
fn slope(num: i64, den: i64) -> Option<Option<Rational>> {
    match (num, den) {
        (0, 0) => None,
        (_, 0) => Some(None),
        _ => Some(Some(Rational::new(num, den))),
    }
}

/// Compare extended slopes, `None` being `+∞`.
fn cmp_slope(a: &Option<Rational>, b: &Option<Rational>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Greater,
        (Some(_), None) => Ordering::Less,
        (Some(x), Some(y)) => x.cmp(y),
    }
}

/// All `(k1, k2) ∈ [−B, B]²` with `m = k1·a + k2·b`.
fn representations(m: (i64, i64), a: (i64, i64), b: (i64, i64), bound: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for k1 in -bound..=bound {
        let rest = (m.0 - k1 * a.0, m.1 - k1 * a.1);
        // k2·b = rest, with b a nonzero vector of nonnegative entries
        let k2 = if b.0 != 0 {
            if rest.0 % b.0 != 0 {
                continue;
            }
            rest.0 / b.0
        } else {
            if rest.1 % b.1 != 0 {
                continue;
            }
            rest.1 / b.1
        };
        if k2.abs() <= bound && k2 * b.0 == rest.0 && k2 * b.1 == rest.1 {
            out.push((k1, k2));
        }
    }
    out
}

fn resonant_brute(m: (i64, i64), tag: ConeTag, f: &ResonanceFrame, bound: i64) -> bool {
    let pq = (f.p as i64, f.q as i64);
    let a0 = (f.r0 as i64, f.s0 as i64);
    let a1 = (f.r1 as i64, f.s1 as i64);
    let n1 = f.n as i64 + 1;
    let lower = slope(f.s0 as i64 + n1 * pq.1, f.r0 as i64 + n1 * pq.0).flatten();
    let upper = slope(f.s1 as i64 + n1 * pq.1, f.r1 as i64 + n1 * pq.0).flatten();
    let reps = |a| representations(m, a, pq, bound);
    match tag {
        ConeTag::G0 => reps(a0).iter().any(|&(k1, k2)| k1 >= 1 && k2 <= n1 * k1),
        ConeTag::B0 => !resonant_brute(m, ConeTag::G0, f, bound),
        ConeTag::B1 => reps(a0).iter().any(|&(k1, k2)| k1 >= 1 && k2 > n1 * k1),
        ConeTag::B2 => reps(a0).iter().any(|&(k1, _)| k1 <= 0),
        ConeTag::G1 => reps(a1).iter().any(|&(k1, k2)| k1 >= 1 && k2 <= n1 * k1),
        ConeTag::TildeB => match slope(m.1, m.0) {
            // the origin is kept in t̃B so that B0 ⊆ t̃B holds at m = 0
            None => true,
            Some(s) => cmp_slope(&s, &lower) != Ordering::Less,
        },
        ConeTag::HatB => match slope(m.1, m.0) {
            None => false,
            Some(s) => cmp_slope(&s, &lower) != Ordering::Less && cmp_slope(&s, &upper) != Ordering::Greater,
        },
        _ => false,
    }
}

fn convergent_brute(m: (i64, i64), tag: ConeTag, u: (i64, i64), ut: (i64, i64), bound: i64) -> bool {
    match tag {
        ConeTag::IrrStage1 => match slope(m.1, m.0) {
            Some(s) => cmp_slope(&s, &slope(u.1, u.0).flatten()) == Ordering::Less,
            None => false,
        },
        ConeTag::IrrStage2 => match slope(m.1, m.0) {
            Some(s) => cmp_slope(&s, &slope(ut.1, ut.0).flatten()) == Ordering::Greater,
            None => false,
        },
        ConeTag::IrrFinal => representations(m, u, ut, bound)
            .iter()
            .any(|&(j, l)| j >= 0 && l >= 0 && j + l >= 1),
        _ => false,
    }
}

/// Membership decided from the set definitions by searching coefficient
/// pairs in `[−bound, bound]²`. Tags of the wrong frame kind are never members.
pub fn brute_cone_member(m: MultiIndex, tag: ConeTag, frame: &Frame, bound: i64) -> bool {
    let mm = (m.m1 as i64, m.m2 as i64);
    match frame {
        Frame::Resonance(f) => resonant_brute(mm, tag, f, bound),
        Frame::Convergent(f) => convergent_brute(
            mm,
            tag,
            (f.p as i64, f.q as i64),
            (f.p_tilde as i64, f.q_tilde as i64),
            bound,
        ),
    }
}

/// Inclusive ranges for random coefficients `a/b`; zero numerators are
/// redrawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientPool {
    pub numerators: [i64; 2],
    pub denominators: [i64; 2],
}

impl Default for CoefficientPool {
    fn default() -> Self {
        CoefficientPool {
            numerators: [-3, 3],
            denominators: [1, 4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorFrame {
    /// `μ₁ = c^{−q}`, `μ₂ = c^p`.
    Resonant {
        p: u32,
        q: u32,
        #[serde(rename = "N")]
        n: u32,
        c: String,
    },
    /// `μ₁ = e^{−t}`, `μ₂ = e^{t/R}`; approximate rings only.
    Irrational { ratio: RatioLiteral, k: u32, t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub frame: GeneratorFrame,
    /// Probability that a given monomial is populated.
    pub density: f64,
    #[serde(default)]
    pub pool: CoefficientPool,
    pub degree: u32,
}

impl GeneratorSpec {
    pub fn resonant(seed: u64, p: u32, q: u32, n: u32, c: &str, degree: u32) -> Self {
        GeneratorSpec {
            seed,
            frame: GeneratorFrame::Resonant {
                p,
                q,
                n,
                c: c.into(),
            },
            density: 0.5,
            pool: CoefficientPool::default(),
            degree,
        }
    }

    pub fn irrational(seed: u64, ratio: RatioLiteral, k: u32, t: f64, degree: u32) -> Self {
        GeneratorSpec {
            seed,
            frame: GeneratorFrame::Irrational { ratio, k, t },
            density: 0.5,
            pool: CoefficientPool::default(),
            degree,
        }
    }
}

fn generator_multipliers<S: Scalar>(frame: &GeneratorFrame, like: &S) -> Result<[S; 2]> {
    match frame {
        GeneratorFrame::Resonant { p, q, c, .. } => {
            let c = crate::literal::parse_rational(c)
                .filter(|c| c > &Rational::one())
                .ok_or_else(|| Error::Config(format!("generator base {c} must be a rational > 1")))?;
            let c = like.embed(&c);
            Ok([c.pow(*q).inv()?, c.pow(*p)])
        }
        GeneratorFrame::Irrational { ratio, t, .. } => {
            let r = ratio
                .to_spec()?
                .value_f64()
                .ok_or_else(|| Error::Config("generator ratio needs a numeric value".into()))?;
            if !(*t > 0.0 && r > 0.0) {
                return Err(Error::Config("generator needs t > 0 and R > 0".into()));
            }
            match (like.embed_f64((-t).exp()), like.embed_f64((t / r).exp())) {
                (Some(a), Some(b)) => Ok([a, b]),
                _ => Err(Error::Config(
                    "irrational multipliers need an approximate coefficient ring".into(),
                )),
            }
        }
    }
}

/// Random saddle family whose multipliers satisfy the frame's hypothesis by
/// construction. Coefficients live in the ring of `like`.
pub fn random_resonant_saddle<S: Scalar>(spec: &GeneratorSpec, like: &S) -> Result<PlanarMap<S>> {
    let [lo, hi] = spec.pool.numerators;
    let [dlo, dhi] = spec.pool.denominators;
    if lo > hi || dlo > dhi || dlo < 1 || (lo == 0 && hi == 0) {
        return Err(Error::Config("empty or invalid coefficient pool".into()));
    }
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(Error::Config(format!("density {} outside [0, 1]", spec.density)));
    }
    let [mu1, mu2] = generator_multipliers(&spec.frame, like)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut terms = Vec::new();
    for n in 2..=spec.degree {
        for k in MultiIndex::of_degree(n) {
            for i in 0..2 {
                if !rng.random_bool(spec.density) {
                    continue;
                }
                let num = loop {
                    let v = rng.random_range(lo..=hi);
                    if v != 0 {
                        break v;
                    }
                };
                let den = rng.random_range(dlo..=dhi);
                terms.push((i, k, like.embed(&Rational::new(num, den))));
            }
        }
    }
    PlanarMap::from_terms(mu1, mu2, spec.degree, terms)
}

/// The frame a generator spec was built for.
pub fn generator_frame(spec: &GeneratorSpec) -> Result<GeneratorTarget> {
    match &spec.frame {
        GeneratorFrame::Resonant { p, q, n, .. } => {
            Ok(GeneratorTarget::Resonance(saddlenf_core::lattice::resonance_frame(*p, *q, *n)?))
        }
        GeneratorFrame::Irrational { ratio, k, .. } => Ok(GeneratorTarget::Ratio(ratio.to_spec()?, *k)),
    }
}

/// Pipeline parameters matching a generated map.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorTarget {
    Resonance(ResonanceFrame),
    Ratio(RatioSpec, u32),
}

type Poly<S> = std::collections::BTreeMap<(u32, u32), S>;

fn poly_product<S: Scalar>(a: &Poly<S>, b: &Poly<S>) -> Poly<S> {
    let mut out: Poly<S> = Poly::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            let k = (ka.0 + kb.0, ka.1 + kb.1);
            let v = ca.mul(cb);
            match out.get_mut(&k) {
                Some(x) => *x = x.add(&v),
                None => {
                    out.insert(k, v);
                }
            }
        }
    }
    out
}

fn full_component<S: Scalar>(f: &PlanarMap<S>, i: usize) -> Poly<S> {
    let mut p: Poly<S> = f.nonlinear(i).terms().map(|(k, c)| ((k.m1, k.m2), c.clone())).collect();
    p.insert(if i == 0 { (1, 0) } else { (0, 1) }, f.mu(i).clone());
    p
}

/// `outer∘inner` by substituting the full inner polynomials into every
/// outer monomial and multiplying out without intermediate truncation.
pub fn naive_compose<S: Scalar>(outer: &PlanarMap<S>, inner: &PlanarMap<S>) -> Result<PlanarMap<S>> {
    let bound = outer.bound().min(inner.bound());
    let one = outer.mu(0).one_like();
    let g = [full_component(inner, 0), full_component(inner, 1)];
    let mut comps: [Poly<S>; 2] = [Poly::new(), Poly::new()];
    for (i, comp) in comps.iter_mut().enumerate() {
        for ((a, b), c) in full_component(outer, i) {
            let mut term: Poly<S> = Poly::from([((0, 0), c)]);
            for _ in 0..a {
                term = poly_product(&term, &g[0]);
            }
            for _ in 0..b {
                term = poly_product(&term, &g[1]);
            }
            for (k, v) in term {
                match comp.get_mut(&k) {
                    Some(x) => *x = x.add(&v),
                    None => {
                        comp.insert(k, v);
                    }
                }
            }
        }
    }
    let zero = one.zero_like();
    let lin = |i: usize, k: (u32, u32)| comps[i].get(&k).cloned().unwrap_or_else(|| zero.clone());
    let (mu1, mu2) = (lin(0, (1, 0)), lin(1, (0, 1)));
    if !lin(0, (0, 1)).is_zero() || !lin(1, (1, 0)).is_zero() {
        return Err(Error::Config("composition is not diagonal at linear order".into()));
    }
    let mut terms = Vec::new();
    for (i, comp) in comps.iter().enumerate() {
        for (&(a, b), c) in comp {
            if a + b >= 2 && a + b <= bound {
                terms.push((i, MultiIndex::new(a, b), c.clone()));
            }
        }
    }
    PlanarMap::from_terms(mu1, mu2, bound, terms)
}

/// Result of [`conjugacy_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub samples: usize,
    /// `max |f(h(z)) − h(g(z))|`.
    pub max_deviation: f64,
    /// Largest `deviation / allowed` ratio; above one means flagged.
    pub worst_ratio: f64,
    pub flagged: bool,
}

fn to_approx<S: Scalar>(f: &PlanarMap<S>) -> Result<PlanarMap<ApproxComplex>> {
    let conv = |c: &S| {
        let (re, im) = c.approx();
        ApproxComplex::new(re, im)
    };
    for i in 0..2 {
        for (_, c) in f.nonlinear(i).terms() {
            conv(c)?;
        }
    }
    conv(f.mu(0))?;
    conv(f.mu(1))?;
    Ok(f.map_coeffs(|c| conv(c).expect("checked above")))
}

/// Coefficientwise majorant `Σ_n c_n ρ^n` of both components on the
/// polydisk `|z₁|, |z₂| ≤ ρ`.
fn majorant(f: &PlanarMap<ApproxComplex>) -> Vec<f64> {
    let mut c = vec![0.0; f.bound() as usize + 1];
    for i in 0..2 {
        let mut row = vec![0.0; c.len()];
        row[1] = f.mu(i).abs_f64();
        for (k, a) in f.nonlinear(i).terms() {
            row[k.degree() as usize] += a.re().hypot(a.im());
        }
        for (x, y) in c.iter_mut().zip(row) {
            *x = f64::max(*x, y);
        }
    }
    c
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Majorant of `outer∘inner`, untruncated.
fn poly_compose(outer: &[f64], inner: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    // Horner from the top coefficient
    for c in outer.iter().rev() {
        out = poly_mul(&out, inner);
        out[0] += c;
    }
    out
}

fn poly_eval(c: &[f64], from: usize, rho: f64) -> f64 {
    c.iter().enumerate().skip(from).map(|(n, x)| x * rho.powi(n as i32)).sum()
}

fn dist(a: &[ApproxComplex; 2], b: &[ApproxComplex; 2]) -> f64 {
    (0..2)
        .map(|i| {
            let d = a[i].sub(&b[i]);
            d.re().hypot(d.im())
        })
        .fold(0.0, f64::max)
}

/// Spot check of `f∘h = h∘g` in double precision at `samples` seeded points
/// with `|z| ≤ 10⁻²`. The allowance at `ρ = max|z_i|` is the part of degree
/// above `D` of the majorants of `f∘h` and `h∘g`, plus a rounding term.
pub fn conjugacy_oracle<S: Scalar>(
    f: &PlanarMap<S>,
    outcome: &NormalFormOutcome<S>,
    samples: usize,
) -> Result<OracleReport> {
    let d = outcome.degree;
    let f = to_approx(&f.truncate(d))?;
    let g = to_approx(&outcome.g)?;
    let h = to_approx(&outcome.h)?;
    let (mf, mg, mh) = (majorant(&f), majorant(&g), majorant(&h));
    let fh = poly_compose(&mf, &mh);
    let hg = poly_compose(&mh, &mg);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5add1e);
    let mut report = OracleReport {
        samples,
        max_deviation: 0.0,
        worst_ratio: 0.0,
        flagged: false,
    };
    for s in 0..samples {
        // radii cycle through 1e-2, 1e-3, 1e-4
        let r = 10f64.powi(-2 - (s % 3) as i32);
        let z: [ApproxComplex; 2] = std::array::from_fn(|_| {
            let rho = r * rng.random_range(0.1..=1.0) / std::f64::consts::SQRT_2;
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            ApproxComplex::new(rho * th.cos(), rho * th.sin()).expect("finite sample")
        });
        let norm = z.iter().map(|v| v.re().hypot(v.im())).fold(0.0, f64::max);
        let lhs = f.eval(&h.eval(&z));
        let rhs = h.eval(&g.eval(&z));
        let dev = dist(&lhs, &rhs);
        let tail = poly_eval(&fh, d as usize + 1, norm) + poly_eval(&hg, d as usize + 1, norm);
        let size = poly_eval(&fh, 0, norm) + poly_eval(&hg, 0, norm);
        let allowed = tail + 64.0 * f64::EPSILON * size;
        report.max_deviation = report.max_deviation.max(dev);
        report.worst_ratio = report.worst_ratio.max(dev / allowed);
    }
    report.flagged = report.worst_ratio > 1.0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use saddlenf_core::lattice::{cone_member, resonance_frame};
    use saddlenf_core::normalform::{check_preconditions, pipeline_theorem1, ModeData};

    fn fr(p: u32, q: u32, n: u32) -> Frame {
        resonance_frame(p, q, n).unwrap().into()
    }

    #[test]
    fn witnesses() {
        let f = fr(3, 2, 1);
        assert!(brute_cone_member(MultiIndex::new(2, 1), ConeTag::G0, &f, DEFAULT_SEARCH_BOUND));
        assert!(!brute_cone_member(MultiIndex::new(3, 2), ConeTag::G0, &f, DEFAULT_SEARCH_BOUND));
        assert_eq!(
            representations((2, 1), (2, 1), (3, 2), 10),
            vec![(1, 0)],
            "unique representation in a unimodular basis"
        );
    }

    #[test]
    fn agrees_with_closed_forms_on_small_sweep() {
        let f = fr(3, 2, 1);
        for m in MultiIndex::up_to_degree(12) {
            for tag in [ConeTag::G0, ConeTag::B0, ConeTag::B1, ConeTag::B2, ConeTag::TildeB, ConeTag::G1, ConeTag::HatB] {
                assert_eq!(
                    brute_cone_member(m, tag, &f, 60),
                    cone_member(m, tag, &f).unwrap(),
                    "{m} {tag:?}"
                );
            }
        }
    }

    #[test]
    fn generator_examples() {
        let like = Rational::zero();
        let spec = GeneratorSpec::resonant(7, 3, 2, 1, "2", 5);
        let f = random_resonant_saddle(&spec, &like).unwrap();
        assert_eq!(f.mus(), &[Rational::new(1, 4), Rational::from_integer(8)]);
        assert_eq!(f, random_resonant_saddle(&spec, &like).unwrap());
        let g = random_resonant_saddle(&GeneratorSpec::resonant(7, 2, 1, 0, "3", 5), &like).unwrap();
        assert_eq!(g.mus(), &[Rational::new(1, 3), Rational::from_integer(9)]);
        let pre = check_preconditions(g.mu(0), g.mu(1), &ModeData::Theorem1 { p: 2, q: 1 }).unwrap();
        assert!(pre.exact);
        let other = random_resonant_saddle(&GeneratorSpec::resonant(8, 3, 2, 1, "2", 5), &like).unwrap();
        assert_ne!(f, other);
    }

    #[test]
    fn irrational_generator_needs_approximate_ring() {
        let spec = GeneratorSpec::irrational(1, RatioLiteral::Surd([1, 1, 2, 5]), 1, 1.0, 4);
        assert!(random_resonant_saddle(&spec, &Rational::zero()).is_err());
        let like = ApproxComplex::real(0.0).unwrap();
        let f = random_resonant_saddle(&spec, &like).unwrap();
        assert!((f.mu(0).re() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn oracle_accepts_pipeline_and_flags_perturbation() {
        let spec = GeneratorSpec::resonant(3, 3, 2, 1, "2", 6);
        let f = random_resonant_saddle(&spec, &Rational::zero()).unwrap();
        let frame = resonance_frame(3, 2, 1).unwrap();
        let mut out = pipeline_theorem1(&f, &frame, 6).unwrap();
        let rep = conjugacy_oracle(&f, &out, 24).unwrap();
        assert!(!rep.flagged, "{rep:?}");
        out.h.nonlinear_mut(0).add_term(MultiIndex::new(1, 1), Rational::new(1, 1000));
        assert!(conjugacy_oracle(&f, &out, 24).unwrap().flagged);
    }

    #[test]
    fn naive_composition_of_a_known_pair() {
        // (2x₁, 3x₂ + x₁²) has inverse (x₁/2, x₂/3 − x₁²/12)
        let q = Rational::new;
        let f = PlanarMap::from_terms(q(2, 1), q(3, 1), 4, [(1, MultiIndex::new(2, 0), q(1, 1))]).unwrap();
        let g = PlanarMap::from_terms(q(1, 2), q(1, 3), 4, [(1, MultiIndex::new(2, 0), q(-1, 12))]).unwrap();
        assert_eq!(naive_compose(&f, &g).unwrap(), PlanarMap::identity(&q(1, 1), 4));
        assert_eq!(naive_compose(&g, &f).unwrap(), PlanarMap::identity(&q(1, 1), 4));
        assert_eq!(f.inverse().unwrap(), g);
    }

    #[test]
    fn identity_outcome_has_zero_deviation() {
        let f = PlanarMap::linear(Rational::new(1, 4), Rational::from_integer(8), 4);
        let out = pipeline_theorem1(&f, &resonance_frame(3, 2, 1).unwrap(), 4).unwrap();
        assert_eq!(conjugacy_oracle(&f, &out, 9).unwrap().max_deviation, 0.0);
    }
}
