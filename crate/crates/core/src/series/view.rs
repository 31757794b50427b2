use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::{PlanarMap, Series2};
use crate::error::{Error, Result, StructureViolation, Witness};
use crate::lattice::MultiIndex;
use crate::scalar::Scalar;

/// `F_i(x) = x_i·(μ_i + Σ_m a_{i,m} x^m)`: the monomial `x^k` of component
/// `i` is stored under the multiplier exponent `m = k − e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierView<S> {
    pub mu: [S; 2],
    pub multipliers: [BTreeMap<MultiIndex, S>; 2],
    pub bound: u32,
}

impl<S: Scalar> MultiplierView<S> {
    pub fn exponents(&self, i: usize) -> impl Iterator<Item = MultiIndex> + '_ {
        self.multipliers[i].keys().copied()
    }
}

/// Fails with a witness per monomial not divisible by its own coordinate.
pub fn to_multiplier_view<S: Scalar>(f: &PlanarMap<S>) -> Result<MultiplierView<S>> {
    let mut witnesses = Vec::new();
    let mut multipliers = [BTreeMap::new(), BTreeMap::new()];
    for (i, mult) in multipliers.iter_mut().enumerate() {
        for (k, c) in f.nonlinear(i).terms() {
            match k.checked_sub(MultiIndex::unit(i)) {
                Some(m) => {
                    mult.insert(m, c.clone());
                }
                None => witnesses.push(Witness {
                    context: "multiplier view".to_string(),
                    component: i as u8 + 1,
                    exponent: *k,
                    monomial: true,
                    reason: format!("not divisible by x{}", i + 1),
                }),
            }
        }
    }
    if !witnesses.is_empty() {
        return Err(Error::Structure(StructureViolation(witnesses)));
    }
    Ok(MultiplierView {
        mu: f.mus().clone(),
        multipliers,
        bound: f.bound(),
    })
}

pub fn from_view<S: Scalar>(view: &MultiplierView<S>) -> Result<PlanarMap<S>> {
    let series = |i: usize| {
        Series2::from_terms(
            view.bound,
            view.multipliers[i].iter().map(|(m, c)| (*m + MultiIndex::unit(i), c.clone())),
        )
    };
    PlanarMap::new(view.mu[0].clone(), view.mu[1].clone(), series(0)?, series(1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn round_trip_and_witnesses() {
        let mi = MultiIndex::new;
        let one = Rational::one();
        let f = PlanarMap::from_terms(
            one.clone(),
            one.clone(),
            4,
            [(0, mi(2, 1), one.clone()), (1, mi(1, 3), one.clone())],
        )
        .unwrap();
        let v = to_multiplier_view(&f).unwrap();
        assert_eq!(v.exponents(0).collect::<Vec<_>>(), [mi(1, 1)]);
        assert_eq!(v.exponents(1).collect::<Vec<_>>(), [mi(1, 2)]);
        assert_eq!(from_view(&v).unwrap(), f);

        let bad = PlanarMap::from_terms(one.clone(), one.clone(), 4, [(1, mi(3, 0), one.clone())]).unwrap();
        let err = to_multiplier_view(&bad).unwrap_err();
        assert_eq!(err.witnesses().len(), 1);
        assert_eq!(err.witnesses()[0].component, 2);
    }
}
