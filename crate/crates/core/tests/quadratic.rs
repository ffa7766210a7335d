use proptest::prelude::*;
use renorm_core::affine::Affine;
use renorm_core::quadratic::{CriticalPoint, QuadraticUnimodal, Side};

fn family(c: f64) -> QuadraticUnimodal {
    QuadraticUnimodal::new(CriticalPoint::new(c).unwrap())
}

proptest! {
    #[test]
    fn values_stay_in_unit_interval(c in 0.01f64..0.49, x in 0.0f64..=1.0) {
        let v = family(c).eval(x).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn preimages_invert(c in 0.01f64..0.49, y in 0.0f64..=1.0) {
        let u = family(c);
        for side in [Side::Left, Side::Right] {
            if let Ok(x) = u.preimage(y, side) {
                prop_assert!((u.eval(x).unwrap() - y).abs() <= 1e-12);
                match side {
                    Side::Left => prop_assert!(x <= c),
                    Side::Right => prop_assert!(x >= c),
                }
            }
        }
    }

    #[test]
    fn iterates_compose(c in 0.01f64..0.49, x in 0.0f64..=1.0, a in 0usize..5, b in 0usize..5) {
        let u = family(c);
        let direct = u.iterate(x, a + b).unwrap();
        let split = u.iterate(u.iterate(x, a).unwrap(), b).unwrap();
        prop_assert_eq!(direct, split);
    }

    #[test]
    fn maximum_at_critical_point(c in 0.01f64..0.49, x in 0.0f64..=1.0) {
        let u = family(c);
        prop_assert!(u.eval(x).unwrap() <= u.eval(c).unwrap());
        prop_assert_eq!(u.eval(c).unwrap(), 1.0);
    }

    #[test]
    fn affine_unit_to_round_trip(a in -2.0f64..2.0, b in -2.0f64..2.0, t in 0.0f64..1.0) {
        prop_assume!((a - b).abs() > 1e-3);
        let m = Affine::unit_to(a, b);
        prop_assert!((m.inverse().apply(m.apply(t)) - t).abs() < 1e-12);
        prop_assert!((m.apply(0.0) - a).abs() < 1e-15);
        prop_assert!((m.apply(1.0) - b).abs() < 1e-15);
    }
}

#[test]
fn symmetric_member_is_the_logistic_shape() {
    // c = 1/2 gives 4x(1 - x)
    let u = QuadraticUnimodal::with_raw(0.5);
    for k in 0..=10 {
        let x = k as f64 / 10.0;
        assert!((u.apply(x) - 4.0 * x * (1.0 - x)).abs() < 1e-15);
    }
}
