use proptest::prelude::*;
use saddlenf_core::scalar::Magnitude;
use saddlenf_core::{GaussianRational, ParamJet, Rational, Scalar};

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..=1000, 1i64..=60).prop_map(|(n, d)| Rational::new(n, d))
}

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (rational(), rational()).prop_map(|(a, b)| GaussianRational::new(a, b))
}

fn jet(order: usize) -> impl Strategy<Value = ParamJet<Rational>> {
    prop::collection::vec(rational(), order + 1).prop_map(|c| ParamJet::new(c).unwrap())
}

fn field_axioms<S: Scalar>(a: &S, b: &S, c: &S) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
    prop_assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
    prop_assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
    prop_assert_eq!(a.mul(b), b.mul(a));
    if !a.is_zero() {
        prop_assert_eq!(a.mul(&a.inv().unwrap()), a.one_like());
    } else {
        prop_assert!(a.inv().is_err());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rational_field(a in rational(), b in rational(), c in rational()) {
        field_axioms(&a, &b, &c)?;
    }

    #[test]
    fn gaussian_field(a in gaussian(), b in gaussian(), c in gaussian()) {
        field_axioms(&a, &b, &c)?;
    }

    #[test]
    fn magnitude_is_multiplicative(a in gaussian(), b in gaussian()) {
        let lhs = a.mul(&b).magnitude_squared();
        let rhs = a.magnitude_squared().mul(&b.magnitude_squared());
        prop_assert!(matches!(lhs, Magnitude::Exact(_)));
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn jet_inverse(a in jet(4)) {
        prop_assume!(!a.constant_term().is_zero());
        let inv = a.inv().unwrap();
        prop_assert_eq!(a.mul(&inv), a.one_like());
    }

    #[test]
    fn jet_without_constant_term_is_not_a_unit(a in jet(3)) {
        let mut c = a.coefficients().to_vec();
        c[0] = Rational::zero();
        prop_assert!(ParamJet::new(c).unwrap().inv().is_err());
    }

    #[test]
    fn jet_ring_axioms(a in jet(3), b in jet(3), c in jet(3)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }
}
