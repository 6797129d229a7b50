#![allow(dead_code)]

use iet_core::{Iet, Permutation, Scalar};
use proptest::prelude::*;

pub fn s(x: &str) -> Scalar {
    x.parse().expect("scalar literal")
}

pub fn golden() -> Iet {
    Iet::new(
        vec![s("-1/2+1/2*sqrt(5)"), s("3/2-1/2*sqrt(5)")],
        Permutation::new(vec![2, 1]).unwrap(),
    )
    .unwrap()
}

pub fn quadratic_four() -> Iet {
    Iet::new(
        vec![
            s("-1/2+1/2*sqrt(2)"),
            s("1/4"),
            s("3/8-1/8*sqrt(2)"),
            s("7/8-3/8*sqrt(2)"),
        ],
        Permutation::new(vec![4, 3, 2, 1]).unwrap(),
    )
    .unwrap()
}

pub fn irreducible_perm(r: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=r).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_filter_map("reducible", |v| {
            let p = Permutation::new(v).ok()?;
            p.is_irreducible().then_some(p)
        })
}

/// Lengths in `Q(sqrt 2)`, or rational when `quadratic` is false.
pub fn lengths(r: usize, quadratic: bool) -> impl Strategy<Value = Vec<Scalar>> {
    let sqrt2 = s("sqrt(2)");
    prop::collection::vec((10i64..=100, -50i64..=50), r).prop_map(move |v| {
        v.into_iter()
            .map(|(a, b)| {
                let rat = Scalar::from_ratio(a, 100);
                if quadratic {
                    &rat + &(&Scalar::from_ratio(b, 1000) * &sqrt2)
                } else {
                    &rat + &Scalar::from_ratio(b + 50, 100_003)
                }
            })
            .collect()
    })
}

pub fn iet() -> impl Strategy<Value = Iet> {
    (2usize..=4, any::<bool>())
        .prop_flat_map(|(r, q)| (irreducible_perm(r), lengths(r, q)))
        .prop_map(|(p, l)| Iet::new(l, p).unwrap())
}

/// A point `b * k / 10007` of `[0, b)`.
pub fn point_of(f: &Iet, k: u32) -> Scalar {
    f.total_length() * &Scalar::from_ratio(i64::from(k % 10_007), 10_007)
}

pub fn iet_and_point() -> impl Strategy<Value = (Iet, Scalar)> {
    (iet(), any::<u32>()).prop_map(|(f, k)| {
        let x = point_of(&f, k);
        (f, x)
    })
}
