use crate::error::{Error, Result};
use crate::lattice::{enumerate_cone, ConeTag, Frame};

/// Geometric decay rates of `|μ^m|` on the stage cones, for a normalized
/// saddle `|μ₁| < 1 < |μ₂|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayConstants {
    pub d0: f64,
    pub d1: f64,
    /// Resonant case only: the variant with `N` in place of `N+1` in the
    /// exponent, kept as a diagnostic.
    pub d0_with_n: Option<f64>,
    pub d1_with_n: Option<f64>,
    /// `R = −ln|μ₁|/ln|μ₂|`.
    pub ratio: f64,
}

/// Moduli are `|μ₁|, |μ₂|` in normalized orientation.
pub fn decay_constants(frame: &Frame, moduli: [f64; 2]) -> Result<DecayConstants> {
    let [a, b] = moduli;
    if !(a > 0.0 && a < 1.0 && b > 1.0 && b.is_finite()) {
        return Err(Error::Precondition(
            "decay constants need 0 < |mu1| < 1 < |mu2|".into(),
        ));
    }
    let ratio = -libm::log(a) / libm::log(b);
    Ok(match frame {
        Frame::Resonance(f) => {
            let (p, q) = (f.p as f64, f.q as f64);
            let e0 = |n: f64| q * (f.r0 as f64 + f.s0 as f64 + n * (p + q));
            let e1 = |n: f64| p * (f.r1 as f64 + f.s1 as f64 + n * (p + q));
            let n = f.n as f64;
            DecayConstants {
                d0: libm::pow(a, 1.0 / e0(n + 1.0)),
                d1: libm::pow(b, -1.0 / e1(n + 1.0)),
                d0_with_n: Some(libm::pow(a, 1.0 / e0(n))),
                d1_with_n: Some(libm::pow(b, -1.0 / e1(n))),
                ratio,
            }
        }
        Frame::Convergent(f) => {
            let (p, q) = (f.p as f64, f.q as f64);
            let (pt, qt) = (f.p_tilde as f64, f.q_tilde as f64);
            DecayConstants {
                d0: libm::pow(a, (ratio * p - q) / (ratio * (p + q))),
                d1: libm::pow(1.0 / b, (qt - ratio * pt) / (pt + qt)),
                d0_with_n: None,
                d1_with_n: None,
                ratio,
            }
        }
    })
}

/// Outcome of checking `|μ^m| ≤ D₀^{|m|}` on the first stage cone and
/// `|μ^{−m}| ≤ D₁^{|m|}` on the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySweep {
    pub checked: usize,
    pub holds: bool,
    /// Largest `|μ^{±m}| / D^{|m|}` seen.
    pub worst_ratio: f64,
    /// Same sweep with the `N` variant (resonant case).
    pub holds_with_n: Option<bool>,
}

/// Relative slack allowed in the decay inequalities.
pub const DECAY_SLACK: f64 = 1e-12;

pub fn decay_sweep(frame: &Frame, moduli: [f64; 2], maxdeg: u32) -> Result<DecaySweep> {
    let c = decay_constants(frame, moduli)?;
    let (l1, l2) = (libm::log(moduli[0]), libm::log(moduli[1]));
    let (t0, t1) = match frame {
        Frame::Resonance(_) => (ConeTag::G0, ConeTag::G1),
        Frame::Convergent(_) => (ConeTag::IrrStage1, ConeTag::IrrStage2),
    };
    let first = enumerate_cone(t0, frame, maxdeg)?;
    let second = enumerate_cone(t1, frame, maxdeg)?;
    let run = |d0: f64, d1: f64| {
        let mut worst: f64 = 0.0;
        for (set, sign, d) in [(&first, 1.0, d0), (&second, -1.0, d1)] {
            for m in set.iter() {
                let log_mu = sign * (m.m1 as f64 * l1 + m.m2 as f64 * l2);
                let log_bound = m.degree() as f64 * libm::log(d);
                worst = worst.max(libm::exp(log_mu - log_bound));
            }
        }
        worst
    };
    let worst = run(c.d0, c.d1);
    let holds_with_n = match (c.d0_with_n, c.d1_with_n) {
        (Some(a), Some(b)) => Some(run(a, b) <= 1.0 + DECAY_SLACK),
        _ => None,
    };
    Ok(DecaySweep {
        checked: first.len() + second.len(),
        holds: worst <= 1.0 + DECAY_SLACK,
        worst_ratio: worst,
        holds_with_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{resonance_frame, theorem2_frame, QuadraticSurd, RatioSpec};

    #[test]
    fn resonant_constants() {
        let f: Frame = resonance_frame(3, 2, 1).unwrap().into();
        let c = decay_constants(&f, [0.25, 8.0]).unwrap();
        assert!((c.d0 - libm::pow(0.25, 1.0 / 26.0)).abs() < 1e-15);
        assert!((c.d0 - 0.9481).abs() < 1e-4);
        assert!((c.d1 - 0.9439).abs() < 1e-4);
        let s = decay_sweep(&f, [0.25, 8.0], 30).unwrap();
        assert!(s.holds, "worst {}", s.worst_ratio);
    }

    #[test]
    fn golden_constants() {
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        let f: Frame = theorem2_frame(&RatioSpec::Surd(QuadraticSurd::golden()), 0).unwrap().into();
        let m = [libm::exp(-1.0), libm::exp(1.0 / phi)];
        let c = decay_constants(&f, m).unwrap();
        assert!((c.d0 - libm::exp(-0.190983)).abs() < 1e-6);
        assert!((c.d0 - 0.8261).abs() < 1e-4);
        assert!(decay_sweep(&f, m, 30).unwrap().holds);
    }
}
