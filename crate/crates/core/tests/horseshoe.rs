mod common;

use proptest::prelude::*;
use renorm_core::horseshoe::*;
use renorm_core::pwa::{build_pwa, verify_combinatorics};
use renorm_core::tower::{build_tower, verify_proper};

#[test]
fn branch_system_layout() {
    let b = common::default_system();
    assert_eq!(b.alphabet(), 3);
    assert!(b.fixed_points.windows(2).all(|w| w[0] < w[1]));
    assert!(b.derivatives.iter().all(|&d| d > 2.0));
    assert_eq!(b.base, (b.fixed_points[0], b.fixed_points[2]));
    for (i, &(lo, hi)) in b.domains.iter().enumerate() {
        assert!(lo >= b.base.0 - 1e-15 && hi <= b.base.1 + 1e-15);
        let ends = [b.branch(i, lo).unwrap(), b.branch(i, hi).unwrap()];
        assert!((ends[0] - b.base.0).abs() < 1e-9 && (ends[1] - b.base.1).abs() < 1e-9);
    }
    assert!(b.domains.windows(2).all(|w| w[0].1 < w[1].0));
}

#[test]
fn weak_expansion_or_bad_order_rejected() {
    assert!(build_branch_system(&[1.0]).is_err());
    assert!(build_branch_system(&[0.98, 1.02]).is_err());
}

#[test]
fn full_shift_counts() {
    let b = common::default_system();
    for n in 1..=10 {
        assert_eq!(cylinder_count(&b, n).unwrap(), 3u64.pow(n as u32));
    }
    let h = entropy_estimate(cylinder_count(&b, 10).unwrap(), 10);
    assert!((h - 3f64.ln()).abs() < 0.01);
    let b5 = build_branch_system(&FIVE_EPSILONS).unwrap();
    for n in 1..=6 {
        assert_eq!(cylinder_count(&b5, n).unwrap(), 5u64.pow(n as u32));
    }
}

#[test]
fn periodic_coding() {
    let b = common::default_system();
    let word: Vec<usize> = (0..12).map(|k| k % 2).collect();
    let c = code_to_point(&b, &word, 12).unwrap();
    assert!(c.residual < 1e-12);
    assert_eq!(branch_of(&b, c.point), Some(0));
    // the two-periodic point maps to its shift and back
    let p = code_periodic(&b, &[0, 1]).unwrap();
    let q = code_periodic(&b, &[1, 0]).unwrap();
    assert!((b.branch(0, p).unwrap() - q).abs() < 1e-10);
    assert!((b.branch(1, q).unwrap() - p).abs() < 1e-10);
}

#[test]
fn dense_word_builds_proper_tower() {
    let b = common::default_system();
    let w = dense_orbit_word(2, 3);
    let seq = symbol_scaling_sequence(&b, &w).unwrap();
    let t = build_tower(&seq, 10).unwrap();
    assert!(t.check_nesting());
    assert!(verify_proper(&seq, 10).unwrap().margin > 0.0);
    let f = build_pwa(&seq, 6).unwrap();
    assert!((1..=4).all(|n| verify_combinatorics(&f, n)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coding_preserves_lexicographic_order(
        a in prop::collection::vec(0usize..3, 6),
        b in prop::collection::vec(0usize..3, 6),
    ) {
        prop_assume!(a != b);
        let sys = common::default_system();
        let pa = code_to_point(&sys, &a, 6).unwrap().point;
        let pb = code_to_point(&sys, &b, 6).unwrap().point;
        prop_assert_eq!(a < b, pa < pb);
    }

    #[test]
    fn coded_points_are_consistent(word in prop::collection::vec(0usize..3, 2..8)) {
        let sys = common::default_system();
        let c = code_to_point(&sys, &word, word.len()).unwrap();
        prop_assert!(c.residual < 1e-12);
        prop_assert_eq!(branch_of(&sys, c.point), Some(word[0]));
    }
}
