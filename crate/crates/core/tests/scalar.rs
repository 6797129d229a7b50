mod common;

use std::cmp::Ordering;

use common::s;
use iet_core::Scalar;
use proptest::prelude::*;

fn quad() -> impl Strategy<Value = Scalar> {
    (-1000i64..1000, 1i64..500, -1000i64..1000, 1i64..500).prop_map(|(a, p, b, q)| {
        &Scalar::from_ratio(a, p) + &(&Scalar::from_ratio(b, q) * &s("sqrt(5)"))
    })
}

fn big_quad() -> impl Strategy<Value = Scalar> {
    (any::<i64>(), 1i64..i64::MAX, any::<i64>(), 1i64..i64::MAX).prop_map(|(a, p, b, q)| {
        &Scalar::from_ratio(a, p) + &(&Scalar::from_ratio(b, q) * &s("sqrt(5)"))
    })
}

proptest! {
    #[test]
    fn field_axioms(x in quad(), y in quad(), z in quad()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        prop_assert_eq!(&x + &(-&x), Scalar::zero());
        if !y.is_zero() {
            prop_assert_eq!(&(&x / &y) * &y, x.clone());
        }
    }

    #[test]
    fn large_operands_stay_exact(x in big_quad(), y in big_quad()) {
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        prop_assert_eq!(&(&x * &y) - &(&y * &x), Scalar::zero());
        if !y.is_zero() {
            prop_assert_eq!(&(&x / &y) * &y, x.clone());
        }
    }

    #[test]
    fn render_parse_round_trip(x in quad()) {
        let back: Scalar = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn order_agrees_with_floats(x in quad(), y in quad()) {
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-9 * (1.0 + fx.abs().max(fy.abs())) {
            prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
        }
        prop_assert_eq!(x.cmp(&y), (&x - &y).signum());
        prop_assert_eq!(x.cmp(&y) == Ordering::Equal, x == y);
    }

    #[test]
    fn largest_rational_below_is_below(x in quad(), den in 1u64..10_000) {
        let y = x.largest_rational_below(den);
        prop_assert!(y.is_rational());
        prop_assert!(y < x);
    }
}

#[test]
fn radicands_are_square_free() {
    assert_eq!(s("sqrt(8)"), s("2*sqrt(2)"));
    assert_eq!(s("1/3*sqrt(45)"), s("sqrt(5)"));
    assert!(s("sqrt(9)").is_rational());
}

#[test]
fn mixed_fields_are_rejected() {
    assert!(s("sqrt(2)").try_add(&s("sqrt(3)")).is_err());
    assert!(s("1/2").try_add(&s("sqrt(3)")).is_ok());
}
