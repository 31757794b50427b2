use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result, StructureViolation, Witness};
use crate::lattice::{basis_decompose, Branch, ConvergentFrame, MultiIndex, ResonanceFrame};
use crate::scalar::Scalar;
use crate::series::{from_view, to_multiplier_view, MultiplierView, PlanarMap};

/// `b⁰_i(u)` plus the families `b⁰ᵏ_i`, `b¹ᵏ_i`: an entry `power ↦ c` of
/// family `k` stands for `c·x^{k·α}·u^{N·k+1+power}` inside the multiplier of
/// component `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralFormT1<S> {
    pub frame: ResonanceFrame,
    pub b0: [BTreeMap<u32, S>; 2],
    pub b0k: [BTreeMap<u32, BTreeMap<u32, S>>; 2],
    pub b1k: [BTreeMap<u32, BTreeMap<u32, S>>; 2],
}

/// Entries `(a, b) ↦ c` of `b1` stand for `c·u^{a+1}ũ^b`, those of `b2` for
/// `c·u^a ũ^{b+1}`. Monomials divisible by both `u` and `ũ` go to `b1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralFormT2<S> {
    pub frame: ConvergentFrame,
    pub b1: [BTreeMap<(u32, u32), S>; 2],
    pub b2: [BTreeMap<(u32, u32), S>; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub enum StructuralForm<S> {
    T1(StructuralFormT1<S>),
    T2(StructuralFormT2<S>),
}

impl<S: Scalar> StructuralForm<S> {
    pub fn is_empty(&self) -> bool {
        match self {
            StructuralForm::T1(s) => (0..2).all(|i| s.b0[i].is_empty() && s.b0k[i].is_empty() && s.b1k[i].is_empty()),
            StructuralForm::T2(s) => (0..2).all(|i| s.b1[i].is_empty() && s.b2[i].is_empty()),
        }
    }
}

fn witness(context: &str, i: usize, m: MultiIndex, reason: String) -> Witness {
    Witness {
        context: context.to_string(),
        component: i as u8 + 1,
        exponent: m,
        monomial: false,
        reason,
    }
}

fn finish<T>(value: T, witnesses: Vec<Witness>) -> Result<T> {
    if witnesses.is_empty() {
        Ok(value)
    } else {
        Err(Error::Structure(StructureViolation(witnesses)))
    }
}

fn lift(k: i64, c: i64, base: MultiIndex, u: MultiIndex) -> MultiIndex {
    MultiIndex::new(
        (k * base.m1 as i64 + c * u.m1 as i64) as u32,
        (k * base.m2 as i64 + c * u.m2 as i64) as u32,
    )
}

pub fn extract_structure_t1<S: Scalar>(g: &PlanarMap<S>, frame: &ResonanceFrame) -> Result<StructuralFormT1<S>> {
    let view = to_multiplier_view(g)?;
    let n = frame.n as i64;
    let mut out = StructuralFormT1 {
        frame: *frame,
        b0: [BTreeMap::new(), BTreeMap::new()],
        b0k: [BTreeMap::new(), BTreeMap::new()],
        b1k: [BTreeMap::new(), BTreeMap::new()],
    };
    let mut witnesses = Vec::new();
    for i in 0..2 {
        for (m, c) in &view.multipliers[i] {
            let (k1, k2) = basis_decompose(*m, frame, Branch::Zero);
            if k1 == 0 {
                if k2 >= 1 {
                    out.b0[i].insert(k2 as u32, c.clone());
                } else {
                    witnesses.push(witness("structure t1", i, *m, format!("u-power {k2} < 1")));
                }
            } else if k1 >= 1 {
                if k2 > n * k1 {
                    let fam = out.b0k[i].entry(k1 as u32).or_default();
                    fam.insert((k2 - n * k1 - 1) as u32, c.clone());
                } else {
                    witnesses.push(witness(
                        "structure t1",
                        i,
                        *m,
                        format!("branch 0 (k1, k2) = ({k1}, {k2}) needs k2 >= {}", n * k1 + 1),
                    ));
                }
            } else {
                let (j1, j2) = basis_decompose(*m, frame, Branch::One);
                if j1 >= 1 && j2 > n * j1 {
                    let fam = out.b1k[i].entry(j1 as u32).or_default();
                    fam.insert((j2 - n * j1 - 1) as u32, c.clone());
                } else {
                    witnesses.push(witness(
                        "structure t1",
                        i,
                        *m,
                        format!("branch 1 (k1, k2) = ({j1}, {j2}) needs k2 >= {}", n * j1 + 1),
                    ));
                }
            }
        }
    }
    finish(out, witnesses)
}

pub fn extract_structure_t2<S: Scalar>(g: &PlanarMap<S>, frame: &ConvergentFrame) -> Result<StructuralFormT2<S>> {
    let view = to_multiplier_view(g)?;
    let mut out = StructuralFormT2 {
        frame: frame.clone(),
        b1: [BTreeMap::new(), BTreeMap::new()],
        b2: [BTreeMap::new(), BTreeMap::new()],
    };
    let mut witnesses = Vec::new();
    for i in 0..2 {
        for (m, c) in &view.multipliers[i] {
            let (j, l) = frame.coordinates(*m);
            if j < 0 || l < 0 || j + l < 1 {
                witnesses.push(witness(
                    "structure t2",
                    i,
                    *m,
                    format!("coordinates (j, l) = ({j}, {l}) leave the closed cone"),
                ));
            } else if j >= 1 {
                out.b1[i].insert(((j - 1) as u32, l as u32), c.clone());
            } else {
                out.b2[i].insert((0, (l - 1) as u32), c.clone());
            }
        }
    }
    finish(out, witnesses)
}

impl<S: Scalar> StructuralFormT1<S> {
    /// Multiplier exponents and coefficients encoded by the tables.
    pub fn multipliers(&self, i: usize) -> BTreeMap<MultiIndex, S> {
        let f = &self.frame;
        let n = f.n as i64;
        let u = f.resonant();
        let mut out = BTreeMap::new();
        for (pw, c) in &self.b0[i] {
            out.insert(lift(0, *pw as i64, u, u), c.clone());
        }
        for (fam, base) in [(&self.b0k[i], f.alpha0()), (&self.b1k[i], f.alpha1())] {
            for (k, entries) in fam {
                let k = *k as i64;
                for (pw, c) in entries {
                    out.insert(lift(k, n * k + 1 + *pw as i64, base, u), c.clone());
                }
            }
        }
        out
    }

    pub fn reassemble(&self, mu: [S; 2], bound: u32) -> Result<PlanarMap<S>> {
        from_view(&MultiplierView {
            mu,
            multipliers: [self.multipliers(0), self.multipliers(1)],
            bound,
        })
    }
}

impl<S: Scalar> StructuralFormT2<S> {
    pub fn multipliers(&self, i: usize) -> BTreeMap<MultiIndex, S> {
        let (u, ut) = (self.frame.u(), self.frame.u_tilde());
        let mut out = BTreeMap::new();
        for ((a, b), c) in &self.b1[i] {
            out.insert(lift(*a as i64 + 1, *b as i64, u, ut), c.clone());
        }
        for ((a, b), c) in &self.b2[i] {
            out.insert(lift(*a as i64, *b as i64 + 1, u, ut), c.clone());
        }
        out
    }

    pub fn reassemble(&self, mu: [S; 2], bound: u32) -> Result<PlanarMap<S>> {
        from_view(&MultiplierView {
            mu,
            multipliers: [self.multipliers(0), self.multipliers(1)],
            bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{resonance_frame, theorem2_frame, QuadraticSurd, RatioSpec};
    use crate::scalar::Rational;

    fn one() -> Rational {
        Rational::one()
    }

    fn map_with(mults: &[(usize, (u32, u32))]) -> PlanarMap<Rational> {
        let terms = mults.iter().map(|&(i, (a, b))| (i, MultiIndex::new(a, b) + MultiIndex::unit(i), one()));
        PlanarMap::from_terms(Rational::new(1, 4), Rational::new(8, 1), 20, terms).unwrap()
    }

    #[test]
    fn t1_tables() {
        let fr = resonance_frame(3, 2, 1).unwrap();
        let g = map_with(&[(0, (3, 2)), (0, (11, 7))]);
        let s = extract_structure_t1(&g, &fr).unwrap();
        assert_eq!(s.b0[0].keys().copied().collect::<Vec<_>>(), [1]);
        assert_eq!(s.b0k[0][&1].keys().copied().collect::<Vec<_>>(), [1]);
        assert_eq!(s.reassemble(g.mus().clone(), 20).unwrap(), g);
    }

    #[test]
    fn t1_violation_names_exponent() {
        let fr = resonance_frame(3, 2, 1).unwrap();
        let e = extract_structure_t1(&map_with(&[(1, (5, 4))]), &fr).unwrap_err();
        let w = e.witnesses();
        assert_eq!(w.len(), 1);
        assert_eq!((w[0].component, w[0].exponent), (2, MultiIndex::new(5, 4)));
    }

    #[test]
    fn t2_tables() {
        let fr = theorem2_frame(&RatioSpec::Surd(QuadraticSurd::golden()), 0).unwrap();
        let g = map_with(&[(0, (1, 1)), (0, (1, 2)), (1, (2, 3))]);
        let s = extract_structure_t2(&g, &fr).unwrap();
        assert!(s.b1[0].contains_key(&(0, 0)));
        assert!(s.b2[0].contains_key(&(0, 0)));
        assert!(s.b1[1].contains_key(&(0, 1)));
        assert_eq!(s.reassemble(g.mus().clone(), 20).unwrap(), g);
        assert!(extract_structure_t2(&map_with(&[(0, (1, 0))]), &fr).is_err());
    }
}
