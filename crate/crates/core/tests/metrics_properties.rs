mod common;

use dmp_core::metrics::mean_angular_difference;
use proptest::prelude::*;

use common::{arb_rotation, arb_sphere, rotate};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mad_is_symmetric_and_bounded(a in arb_sphere(1), b in arb_sphere(1)) {
        let ab = mean_angular_difference(&a, &b).unwrap();
        let ba = mean_angular_difference(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=180.0).contains(&ab));
    }

    #[test]
    fn mad_is_rotation_invariant(a in arb_sphere(1), b in arb_sphere(1), rotation in arb_rotation()) {
        let before = mean_angular_difference(&a, &b).unwrap();
        let after = mean_angular_difference(&rotate(&a, &rotation), &rotate(&b, &rotation)).unwrap();
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn reversing_both_orientations_preserves_mad(a in arb_sphere(1), b in arb_sphere(1)) {
        let mut flipped = b.clone();
        for f in &mut flipped.faces {
            f.swap(1, 2);
        }
        let mut a_flipped = a.clone();
        a_flipped.faces = flipped.faces.clone();
        let direct = mean_angular_difference(&a, &b).unwrap();
        let opposite = mean_angular_difference(&a_flipped, &flipped).unwrap();
        prop_assert!((direct - opposite).abs() < 1e-9);
    }
}
