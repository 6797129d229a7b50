mod common;

use std::f64::consts::PI;

use common::{golden, quadratic_four, s};
use iet_core::diophantine::rho_prime_n;
use iet_core::induction::induce;
use iet_core::spectral::{
    boundary_averages, complex, eigenvalue_scan, visit_counts, weyl_grid, weyl_value_at,
    weyl_value_forward,
};
use proptest::prelude::*;

fn dirichlet(alpha: f64, h: u64) -> f64 {
    let den = (PI * alpha).sin();
    if den.abs() < 1e-15 {
        return 1.0;
    }
    ((PI * h as f64 * alpha).sin() / (h as f64 * den)).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_threshold_gives_the_dirichlet_kernel(alpha in 0.0f64..1.0, h in 1u64..20_000) {
        let f = quadratic_four();
        let series = visit_counts(&f, &s("1/7"), f.total_length(), h).unwrap();
        prop_assert_eq!(series.counts.last().copied(), Some(h));
        let v = weyl_value_at(&series, alpha, h);
        prop_assert!((v - dirichlet(alpha, h)).abs() < 1e-8, "{} vs {}", v, dirichlet(alpha, h));
    }

    #[test]
    fn run_lengths_match_forward_sums(alpha in 0.0f64..1.0, h in 1u64..50_000) {
        let f = golden();
        let series = visit_counts(&f, &s("1/3"), &s("1/2"), 50_000).unwrap();
        let fast = weyl_value_at(&series, alpha, h);
        let slow = weyl_value_forward(&series, alpha, h);
        prop_assert!((fast - slow).abs() < 1e-10, "{} vs {}", fast, slow);
    }
}

#[test]
fn grid_matches_pointwise_values() {
    let f = quadratic_four();
    let series = visit_counts(&f, &s("1/5"), &s("1/2"), 30_000).unwrap();
    let grid = weyl_grid(&series, 257, 30_000);
    for (m, v) in grid.iter().enumerate() {
        let direct = weyl_value_at(&series, m as f64 / 257.0, 30_000);
        assert!((v - direct).abs() < 1e-10);
    }
}

#[test]
fn golden_control_peak_sits_at_the_induced_rotation() {
    let f = golden();
    let a = s("-1/2+1/2*sqrt(5)");
    let induced = induce(&f, &a, 1000).unwrap();
    let frequency = (induced.pieces()[0].translation.to_f64() / a.to_f64()).rem_euclid(1.0);
    let scan = eigenvalue_scan(&f, &a, 1024, 100_000, None, 0.0, 1).unwrap();
    let best = &scan.peaks[0];
    assert!(best.persistent);
    let off = (best.alpha - frequency)
        .abs()
        .min((best.alpha - (1.0 - frequency)).abs());
    assert!(off < 1e-3, "peak {} vs frequency {}", best.alpha, frequency);
    // Averaging e^{-2πiα S_k} along a rotation orbit with S_k ≈ a k gives (a/π)|sin(π a^2)|.
    let av = a.to_f64();
    let predicted = av / PI * (PI * av * av).sin().abs();
    assert!(
        (best.v_n - predicted).abs() < 0.01,
        "{} vs {}",
        best.v_n,
        predicted
    );
}

#[test]
fn jobs_do_not_change_the_scan() {
    let f = quadratic_four();
    let one = eigenvalue_scan(&f, &s("1/2"), 256, 20_000, None, 0.0, 1).unwrap();
    let four = eigenvalue_scan(&f, &s("1/2"), 256, 20_000, None, 0.0, 4).unwrap();
    assert_eq!(one, four);
}

#[test]
fn boundary_averages_obey_the_cocycle_relation() {
    let f = golden();
    for t in [s("1/2"), s("1/3")] {
        let scan = eigenvalue_scan(&f, &t, 1024, 100_000, None, 0.0, 1).unwrap();
        let alpha = scan.peaks.iter().find(|p| p.persistent).unwrap().alpha;
        for n in [20u64, 100, 500] {
            let eps = rho_prime_n(&f, &t, n).unwrap();
            let avg = boundary_averages(&f, &t, alpha, n, &eps, 64, 100_000).unwrap();
            let theta = complex(avg.theta);
            assert!((complex(avg.beta1) - complex(avg.beta0)).norm() < 1e-6);
            assert!((complex(avg.gamma1) - theta * complex(avg.gamma0)).norm() < 1e-6);
            assert!(complex(avg.alpha0).norm() <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn boundary_averages_need_a_distinct_stack() {
    let f = golden();
    let t = s("1/2");
    let eps = rho_prime_n(&f, &t, 50).unwrap();
    assert!(boundary_averages(&f, &t, 0.3, 50, &eps.scale(2), 16, 1000).is_err());
}
