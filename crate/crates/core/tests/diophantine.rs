mod common;

use common::{golden, iet_and_point, quadratic_four, s};
use iet_core::diophantine::{
    classify, phi_records, profile, psi_records, rho, schedule, Classification, SeparationTracker,
};
use iet_core::{Iet, Scalar};
use proptest::prelude::*;

fn distance_to_endpoints(f: &Iet, x: &Scalar) -> Scalar {
    f.endpoints().iter().map(|d| (x - d).abs()).min().unwrap()
}

fn brute_rho_n(f: &Iet, x: &Scalar, n: u64) -> Scalar {
    let w = f.orbit_window(x, n).unwrap();
    w.points
        .iter()
        .map(|y| distance_to_endpoints(f, y))
        .min()
        .unwrap()
}

fn brute_delta_n(f: &Iet, x: &Scalar, n: u64) -> Scalar {
    let w = f.orbit_window_symmetric(x, n).unwrap();
    let mut best: Option<Scalar> = None;
    for (i, p) in w.points.iter().enumerate() {
        for q in &w.points[i + 1..] {
            let d = (p - q).abs();
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        }
    }
    best.unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separations_match_brute_force((f, x) in iet_and_point(), n in 1u64..40) {
        let p = profile(&f, &x, n).unwrap();
        prop_assert_eq!(&p.rho, &rho(&f, &x));
        prop_assert_eq!(&p.rho, &distance_to_endpoints(&f, &x));
        prop_assert_eq!(&p.rho_n, &brute_rho_n(&f, &x, n));
        prop_assert_eq!(&p.delta_n, &brute_delta_n(&f, &x, n));
        let half = p.delta_n.div_int(2);
        prop_assert_eq!(p.rho_prime_n, p.rho_n.clone().min(half));
    }

    #[test]
    fn separations_are_monotone((f, x) in iet_and_point()) {
        let mut tracker = SeparationTracker::new(&f, &x).unwrap();
        tracker.advance();
        let mut last = tracker.profile();
        for _ in 0..60 {
            tracker.advance();
            let next = tracker.profile();
            prop_assert!(next.rho_n <= last.rho_n);
            prop_assert!(next.delta_n <= last.delta_n);
            prop_assert!(next.rho_prime_n <= last.rho_prime_n);
            prop_assert!(last.rho_n <= last.rho);
            last = next;
        }
    }

    #[test]
    fn shifting_the_centre_shrinks_the_window((f, x) in iet_and_point(), n in 2u64..40) {
        let fx = f.evaluate(&x).unwrap();
        let here = profile(&f, &x, n).unwrap().rho_prime_n;
        let there = profile(&f, &fx, n - 1).unwrap().rho_prime_n;
        prop_assert!(there >= here);
    }
}

#[test]
fn schedule_is_dense_then_geometric() {
    let sched = schedule(10_000);
    assert_eq!(&sched[..64], &(1..=64).collect::<Vec<_>>()[..]);
    assert!(sched.windows(2).all(|w| w[0] < w[1]));
    assert!(*sched.last().unwrap() <= 10_000);
    assert!(*sched.last().unwrap() as f64 * 1.05 > 10_000.0);
    for w in sched[64..].windows(2) {
        let ratio = w[1] as f64 / w[0] as f64;
        assert!(ratio <= 1.06, "{w:?}");
    }
    let short = schedule(1000);
    assert_eq!(&sched[..short.len()], &short[..]);
}

#[test]
fn records_are_prefix_stable() {
    let f = quadratic_four();
    let t = s("1/3");
    let small = psi_records(&f, &t, 1000).unwrap();
    let large = psi_records(&f, &t, 10_000).unwrap();
    let common = small.entries.len() - 1;
    assert_eq!(small.entries[..common], large.entries[..common]);
    let mut best = Scalar::zero();
    for e in &large.entries {
        assert_eq!(e.is_record, e.value > best);
        if e.is_record {
            best = e.value.clone();
        }
    }
}

#[test]
fn phi_dominates_psi() {
    let f = golden();
    let t = s("1/3");
    let psi = psi_records(&f, &t, 2000).unwrap();
    let phi = phi_records(&f, &t, 2000).unwrap();
    for (a, b) in psi.entries.iter().zip(&phi.entries) {
        assert_eq!(a.n, b.n);
        assert!(b.value >= a.value);
    }
}

#[test]
fn orbit_of_zero_vanishes() {
    let f = golden();
    let t = f.iterate(&Scalar::zero(), 5);
    let series = psi_records(&f, &t, 1000).unwrap();
    assert!(!series.valid);
    let last = series.entries.last().unwrap();
    assert!(last.value.is_zero());
    assert_eq!(series.vanished_at, Some(last.n));
    let row = classify(&f, &t, 1000, 1.0 / 48.0).unwrap();
    assert_eq!(row.classification, Classification::DPrimeHit);
}

#[test]
fn golden_generic_point_has_positive_evidence() {
    let f = golden();
    let row = classify(&f, &s("1/2"), 10_000, 1.0 / 48.0).unwrap();
    assert_eq!(row.classification, Classification::PsiPositiveEvidence);
    assert!(row.psi_hat >= 1.0 / 48.0);
}
