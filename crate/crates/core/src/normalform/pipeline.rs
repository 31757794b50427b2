use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::decay::{decay_constants, DecayConstants};
use super::eliminate::{compose_steps, eliminate_plan, invert_steps, EliminationPlan, StageDiagnostics};
use super::structure::{extract_structure_t1, extract_structure_t2, StructuralForm};
use super::{check_preconditions, ModeData, Orientation, PreconditionReport};
use crate::error::{Error, Result, StructureViolation, Witness};
use crate::lattice::{cone_member, theorem2_frame, ConeTag, Frame, MultiIndex, RatioSpec, ResonanceFrame};
use crate::scalar::Scalar;
use crate::series::{to_multiplier_view, PlanarMap};

/// Result of a pipeline run. `g`, `h` and `h_inv` are in the caller's
/// coordinates; `frame` and `structure` refer to the normalized orientation
/// `|μ₁| < 1 < |μ₂|`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormOutcome<S> {
    pub g: PlanarMap<S>,
    pub h: PlanarMap<S>,
    pub h_inv: PlanarMap<S>,
    pub degree: u32,
    pub orientation: Orientation,
    pub frame: Frame,
    pub stages: Vec<StageDiagnostics>,
    pub structure: StructuralForm<S>,
    pub residual: Residual,
    pub decay: DecayConstants,
    pub preconditions: PreconditionReport,
}

impl<S: Scalar> NormalFormOutcome<S> {
    /// `g` in the normalized orientation.
    pub fn normalized_g(&self) -> PlanarMap<S> {
        match self.orientation {
            Orientation::Normal => self.g.clone(),
            Orientation::Swapped => self.g.swap_coordinates(),
        }
    }
}

/// Coefficients of `f∘h − h∘g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub max_abs: f64,
    /// `max_abs` over the largest coefficient of either side.
    pub relative: f64,
    pub nonzero_terms: usize,
    pub exact_zero: bool,
    /// The offending monomials (component index, exponent), capped.
    pub support: Vec<(usize, MultiIndex)>,
}

const SUPPORT_CAP: usize = 16;

pub fn conjugacy_residual<S: Scalar>(f: &PlanarMap<S>, g: &PlanarMap<S>, h: &PlanarMap<S>) -> Result<Residual> {
    let left = crate::series::map_compose(f, h)?;
    let right = crate::series::map_compose(h, g)?;
    let mut max_abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut nonzero = 0;
    let mut support = Vec::new();
    for i in 0..2 {
        let (a, b) = (left.component(i), right.component(i));
        scale = scale.max(a.max_abs()).max(b.max_abs());
        for (k, c) in a.sub(&b).terms() {
            if c.is_zero() {
                continue;
            }
            nonzero += 1;
            max_abs = max_abs.max(c.abs_f64());
            if support.len() < SUPPORT_CAP {
                support.push((i, *k));
            }
        }
    }
    Ok(Residual {
        max_abs,
        relative: if scale > 0.0 { max_abs / scale } else { max_abs },
        nonzero_terms: nonzero,
        exact_zero: nonzero == 0,
        support,
    })
}

fn structure_error(witnesses: Vec<Witness>) -> Result<()> {
    if witnesses.is_empty() {
        Ok(())
    } else {
        Err(Error::Structure(StructureViolation(witnesses)))
    }
}

/// Witnesses for multiplier exponents of `g` failing `keep`.
fn cone_witnesses<S: Scalar>(
    g: &PlanarMap<S>,
    context: &str,
    reason: &str,
    keep: impl Fn(MultiIndex) -> bool,
) -> Result<Vec<Witness>> {
    let view = match to_multiplier_view(g) {
        Ok(v) => v,
        Err(Error::Structure(StructureViolation(mut w))) => {
            for x in &mut w {
                x.context = context.to_string();
            }
            return Ok(w);
        }
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    for i in 0..2 {
        for m in view.exponents(i) {
            if !keep(m) {
                out.push(Witness {
                    context: context.to_string(),
                    component: i as u8 + 1,
                    exponent: m,
                    monomial: false,
                    reason: reason.to_string(),
                });
            }
        }
    }
    Ok(out)
}

fn final_tag(frame: &Frame) -> ConeTag {
    match frame {
        Frame::Resonance(_) => ConeTag::HatB,
        Frame::Convergent(_) => ConeTag::IrrFinal,
    }
}

/// Survivor containment and structure extraction on a normalized `g`.
fn audit_normalized<S: Scalar>(g: &PlanarMap<S>, frame: &Frame) -> Result<StructuralForm<S>> {
    let tag = final_tag(frame);
    let w = cone_witnesses(g, "survivors", &format!("not in {}", tag.name()), |m| {
        cone_member(m, tag, frame).unwrap_or(false)
    })?;
    structure_error(w)?;
    Ok(match frame {
        Frame::Resonance(f) => StructuralForm::T1(extract_structure_t1(g, f)?),
        Frame::Convergent(f) => StructuralForm::T2(extract_structure_t2(g, f)?),
    })
}

/// Re-run the survivor and shape checks on an outcome, e.g. one read back
/// from a report.
pub fn audit_outcome<S: Scalar>(outcome: &NormalFormOutcome<S>) -> Result<StructuralForm<S>> {
    audit_normalized(&outcome.normalized_g(), &outcome.frame)
}

struct TwoStage<S> {
    g: PlanarMap<S>,
    h: PlanarMap<S>,
    h_inv: PlanarMap<S>,
    stages: Vec<StageDiagnostics>,
}

fn two_stage<S: Scalar>(
    work: &PlanarMap<S>,
    frame: &Frame,
    tags: [ConeTag; 2],
    degree: u32,
    between: (&str, &dyn Fn(MultiIndex) -> bool),
) -> Result<TwoStage<S>> {
    let plan1 = EliminationPlan::new(tags[0], frame.clone(), true)?;
    let s1 = eliminate_plan(work, &plan1, degree, "stage 1")?;
    let g1_inv = s1.map.inverse()?;
    let w = cone_witnesses(&g1_inv, "inverse after stage 1", between.0, between.1)?;
    structure_error(w)?;
    let plan2 = EliminationPlan::new(tags[1], frame.clone(), false)?;
    let s2 = eliminate_plan(&g1_inv, &plan2, degree, "stage 2")?;
    // h = h̃∘ĥ, one chain of homogeneous factors.
    let steps: Vec<PlanarMap<S>> = s1.steps.iter().chain(&s2.steps).cloned().collect();
    let id = PlanarMap::identity(work.mu(0), degree);
    Ok(TwoStage {
        g: s2.map.inverse()?,
        h: compose_steps(&id, &steps),
        h_inv: invert_steps(&id, &steps),
        stages: vec![s1.diagnostics, s2.diagnostics],
    })
}

fn finish<S: Scalar>(
    work: &PlanarMap<S>,
    run: TwoStage<S>,
    frame: Frame,
    degree: u32,
    pre: PreconditionReport,
) -> Result<NormalFormOutcome<S>> {
    let structure = audit_normalized(&run.g, &frame)?;
    let residual = conjugacy_residual(work, &run.g, &run.h)?;
    if S::EXACT && !residual.exact_zero {
        let w = residual
            .support
            .iter()
            .map(|(i, k)| Witness {
                context: "conjugacy".into(),
                component: *i as u8 + 1,
                exponent: *k,
                monomial: true,
                reason: "f∘h − h∘g is nonzero".into(),
            })
            .collect();
        structure_error(w)?;
    }
    let moduli = match pre.orientation {
        Orientation::Normal => pre.moduli,
        Orientation::Swapped => [pre.moduli[1], pre.moduli[0]],
    };
    let decay = decay_constants(&frame, moduli)?;
    let back = |m: PlanarMap<S>| match pre.orientation {
        Orientation::Normal => m,
        Orientation::Swapped => m.swap_coordinates(),
    };
    Ok(NormalFormOutcome {
        g: back(run.g),
        h: back(run.h),
        h_inv: back(run.h_inv),
        degree,
        orientation: pre.orientation,
        frame,
        stages: run.stages,
        structure,
        residual,
        decay,
        preconditions: pre,
    })
}

fn normalized_input<S: Scalar>(f: &PlanarMap<S>, degree: u32, orientation: Orientation) -> Result<PlanarMap<S>> {
    if degree < 2 || degree > f.bound() {
        return Err(Error::config(format!(
            "degree {degree} must lie in 2..={}",
            f.bound()
        )));
    }
    let f = f.truncate(degree);
    Ok(match orientation {
        Orientation::Normal => f,
        Orientation::Swapped => f.swap_coordinates(),
    })
}

/// Resonant pipeline. `frame` is given in the caller's coordinates, i.e.
/// `|μ₁|^p·|μ₂|^q = 1`.
pub fn pipeline_theorem1<S: Scalar>(
    f: &PlanarMap<S>,
    frame: &ResonanceFrame,
    degree: u32,
) -> Result<NormalFormOutcome<S>> {
    let pre = check_preconditions(f.mu(0), f.mu(1), &ModeData::Theorem1 { p: frame.p, q: frame.q })?;
    let work = normalized_input(f, degree, pre.orientation)?;
    let fr = if pre.orientation.is_swapped() { frame.swapped() } else { *frame };
    let frame = Frame::Resonance(fr);
    let tilde = |m: MultiIndex| cone_member(m, ConeTag::TildeB, &frame).unwrap_or(false);
    let run = two_stage(&work, &frame, [ConeTag::G0, ConeTag::G1], degree, ("not in TildeB", &tilde))?;
    finish(&work, run, frame, degree, pre)
}

/// Irrational-ratio pipeline for `R = −ln|μ₁|/ln|μ₂|` given by `ratio`
/// (caller's coordinates) and the convergent index `k`.
pub fn pipeline_theorem2<S: Scalar>(
    f: &PlanarMap<S>,
    ratio: &RatioSpec,
    k: u32,
    degree: u32,
) -> Result<NormalFormOutcome<S>> {
    let mode = ModeData::Theorem2 {
        declared_ratio: ratio.value_f64(),
    };
    let pre = check_preconditions(f.mu(0), f.mu(1), &mode)?;
    let work = normalized_input(f, degree, pre.orientation)?;
    let cf = if pre.orientation.is_swapped() {
        theorem2_frame(&ratio.reciprocal()?, k)?
    } else {
        theorem2_frame(ratio, k)?
    };
    let frame = Frame::Convergent(cf);
    let outside = |m: MultiIndex| !cone_member(m, ConeTag::IrrStage1, &frame).unwrap_or(true);
    let run = two_stage(
        &work,
        &frame,
        [ConeTag::IrrStage1, ConeTag::IrrStage2],
        degree,
        ("in IrrStage1", &outside),
    )?;
    finish(&work, run, frame, degree, pre)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{resonance_frame, QuadraticSurd};
    use crate::scalar::{ApproxComplex, Rational};

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn linear_map_is_its_own_normal_form() {
        let f = PlanarMap::linear(q(1, 4), q(8, 1), 8);
        let out = pipeline_theorem1(&f, &resonance_frame(3, 2, 1).unwrap(), 8).unwrap();
        assert_eq!(out.g, f);
        assert_eq!(out.h, PlanarMap::identity(&q(1, 1), 8));
        assert!(out.structure.is_empty());
        assert!(out.residual.exact_zero);
    }

    #[test]
    fn resonant_monomial_survives_with_unit_coefficient() {
        // x₁(μ₁ + u), u = x₁³x₂²
        let f = PlanarMap::from_terms(q(1, 4), q(8, 1), 11, [(0, MultiIndex::new(4, 2), q(1, 1))]).unwrap();
        let out = pipeline_theorem1(&f, &resonance_frame(3, 2, 1).unwrap(), 11).unwrap();
        let StructuralForm::T1(s) = &out.structure else { panic!() };
        assert_eq!(s.b0[0].get(&1), Some(&q(1, 1)));
        assert!(out.residual.exact_zero);
    }

    #[test]
    fn reversed_orientation_round_trips() {
        let f = PlanarMap::from_terms(
            q(8, 1),
            q(1, 4),
            7,
            [(0, MultiIndex::new(1, 1), q(1, 1)), (1, MultiIndex::new(2, 1), q(-1, 2))],
        )
        .unwrap();
        let out = pipeline_theorem1(&f, &resonance_frame(2, 3, 1).unwrap(), 7).unwrap();
        assert!(out.orientation.is_swapped());
        assert!(conjugacy_residual(&f, &out.g, &out.h).unwrap().exact_zero);
        assert_eq!(out.h.compose(&out.h_inv), PlanarMap::identity(&q(1, 1), 7));
    }

    #[test]
    fn golden_stage_two_removes_steep_exponent() {
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        let c = |x: f64| ApproxComplex::real(x).unwrap();
        let f = PlanarMap::from_terms(
            c(libm::exp(-1.0)),
            c(libm::exp(1.0 / phi)),
            6,
            [(0, MultiIndex::new(1, 1), c(1.0))],
        )
        .unwrap();
        let out = pipeline_theorem2(&f, &RatioSpec::Surd(QuadraticSurd::golden()), 0, 6).unwrap();
        assert!(out.g.nonlinear(0).coeff(MultiIndex::new(1, 1)).is_none());
        assert!(out.residual.relative < 1e-12);
    }
}
