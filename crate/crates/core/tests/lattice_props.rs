use num_bigint::BigInt;
use proptest::prelude::*;
use saddlenf_core::lattice::{
    basis_decompose, cf_convergents, cf_quotients, cone_member, resonance_frame, theorem2_frame, Branch, QuadraticSurd,
    RatioSpec,
};
use saddlenf_core::{ConeTag, Frame, MultiIndex};

const FRAMES: [(u32, u32, u32); 4] = [(3, 2, 1), (2, 1, 0), (5, 3, 2), (1, 1, 0)];

fn is(m: MultiIndex, tag: ConeTag, frame: &Frame) -> bool {
    cone_member(m, tag, frame).unwrap()
}

#[test]
fn resonant_partitions_and_inclusion() {
    for (p, q, n) in FRAMES {
        let rf = resonance_frame(p, q, n).unwrap();
        let frame = Frame::Resonance(rf);
        for m in MultiIndex::up_to_degree(50) {
            let (g0, b0) = (is(m, ConeTag::G0, &frame), is(m, ConeTag::B0, &frame));
            assert!(g0 ^ b0, "({p},{q},{n}) {m}: G0 {g0} B0 {b0}");
            assert_eq!(b0, is(m, ConeTag::B1, &frame) ^ is(m, ConeTag::B2, &frame), "({p},{q},{n}) {m}");
            if b0 {
                assert!(is(m, ConeTag::TildeB, &frame), "({p},{q},{n}) {m} in B0 but not TildeB");
            }
            for branch in [Branch::Zero, Branch::One] {
                let base = if branch == Branch::Zero { rf.alpha0() } else { rf.alpha1() };
                let (k1, k2) = basis_decompose(m, &rf, branch);
                let back = [
                    k1 * base.m1 as i64 + k2 * p as i64,
                    k1 * base.m2 as i64 + k2 * q as i64,
                ];
                assert_eq!(back, [m.m1 as i64, m.m2 as i64]);
            }
        }
    }
}

#[test]
fn hat_b_excludes_origin() {
    for (p, q, n) in FRAMES {
        let frame = Frame::Resonance(resonance_frame(p, q, n).unwrap());
        assert!(!is(MultiIndex::new(0, 0), ConeTag::HatB, &frame));
        assert!(is(MultiIndex::new(p, q), ConeTag::HatB, &frame));
    }
}

#[test]
fn irrational_final_cone_is_the_complement() {
    for surd in [QuadraticSurd::golden(), QuadraticSurd::from_i64(0, 1, 1, 2).unwrap()] {
        for k in 0..=2 {
            let frame = Frame::Convergent(theorem2_frame(&RatioSpec::Surd(surd.clone()), k).unwrap());
            for m in MultiIndex::up_to_degree(50) {
                let expected =
                    !is(m, ConeTag::IrrStage1, &frame) && !is(m, ConeTag::IrrStage2, &frame) && !m.is_zero();
                assert_eq!(is(m, ConeTag::IrrFinal, &frame), expected, "k={k} {m}");
            }
        }
    }
}

#[test]
fn wrong_frame_kind_is_rejected() {
    let rf = Frame::Resonance(resonance_frame(3, 2, 0).unwrap());
    assert!(cone_member(MultiIndex::new(1, 1), ConeTag::IrrFinal, &rf).is_err());
    let cf = Frame::Convergent(theorem2_frame(&RatioSpec::Surd(QuadraticSurd::golden()), 0).unwrap());
    assert!(cone_member(MultiIndex::new(1, 1), ConeTag::HatB, &cf).is_err());
}

fn surd() -> impl Strategy<Value = QuadraticSurd> {
    (-20i64..=20, 1i64..=6, 1i64..=9, 2i64..=60)
        .prop_filter("irrational", |&(_, _, _, d)| (d as f64).sqrt().fract() != 0.0)
        .prop_filter_map("valid surd", |(a, b, c, d)| QuadraticSurd::from_i64(a, b, c, d).ok())
        .prop_filter("positive", |s| s.to_f64() > 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn convergent_determinants_alternate(s in surd()) {
        let e = cf_quotients(&RatioSpec::Surd(s), 26).unwrap();
        let conv = cf_convergents(&e.quotients);
        let one = BigInt::from(1);
        let mut prev: Option<BigInt> = None;
        for w in conv.windows(2) {
            let ((q0, p0), (q1, p1)) = (&w[0], &w[1]);
            let det = q0 * p1 - q1 * p0;
            prop_assert!(det == one || det == -one.clone(), "det {}", det);
            if let Some(d) = &prev {
                prop_assert_eq!(d, &-det.clone());
            }
            prev = Some(det);
        }
    }

    #[test]
    fn resonance_frame_invariants(p in 1u32..40, q in 1u32..40, n in 0u32..5) {
        match resonance_frame(p, q, n) {
            Ok(f) => {
                let (a0, a1) = (f.alpha0(), f.alpha1());
                prop_assert_eq!(q as i64 * a0.m1 as i64 - p as i64 * a0.m2 as i64, 1);
                prop_assert_eq!(q as i64 * a1.m1 as i64 - p as i64 * a1.m2 as i64, -1);
                prop_assert_eq!(a0 + a1, MultiIndex::new(p, q));
            }
            Err(_) => prop_assert!(num_integer::gcd(p, q) != 1),
        }
    }
}
