//! Weyl-sum diagnostics for eigenvalues of induced maps.
//!
//! For a base point `x` let `S_k = #{0 <= j < k : f^j(x) < t}`. If `f_t` has an
//! eigenvalue `e^{2πiα}`, the averages `1/N Σ_{k<N} e^{2πiα S_k}` stay bounded
//! away from 0; for weakly mixing `f_t` they decay at every `α ≠ 0`.
//! Sums are taken in floating point; exact arithmetic is used only for orbits.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iet::Iet;
use crate::scalar::Scalar;

/// `|V(N) - V(2N)|` below this makes a peak persistent.
pub const PERSISTENCE_TOLERANCE: f64 = 0.05;

/// Number of coarse local maxima that get refined.
pub const REFINED_PEAKS: usize = 8;

/// Samples per refinement stage.
const ZOOM_POINTS: usize = 17;

/// Visit counts `S_0..=S_N` of the orbit of `x` to `[0, t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CocycleSeries {
    pub x: Scalar,
    pub t: Scalar,
    pub counts: Vec<u64>,
}

impl CocycleSeries {
    /// The horizon `N`.
    pub fn horizon(&self) -> u64 {
        (self.counts.len() - 1) as u64
    }

    /// `c_j = #{k < h : S_k = j}`.
    pub fn run_lengths(&self, h: u64) -> Vec<u64> {
        let h = h as usize;
        let top = self.counts[h.saturating_sub(1)] as usize;
        let mut c = vec![0u64; top + 1];
        for &s in &self.counts[..h] {
            c[s as usize] += 1;
        }
        c
    }

    /// First `k` with `S_k >= level`, or the horizon.
    pub fn first_reaching(&self, level: u64) -> u64 {
        self.counts
            .partition_point(|&s| s < level)
            .min(self.counts.len() - 1) as u64
    }
}

pub fn visit_counts(f: &Iet, x: &Scalar, t: &Scalar, horizon: u64) -> Result<CocycleSeries> {
    f.check_point("x", x)?;
    if !t.compatible(x) || !t.is_positive() || t > f.total_length() {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t.clone(),
            domain: format!("(0, {}]", f.total_length()),
        });
    }
    let mut counts = Vec::with_capacity(horizon as usize + 1);
    counts.push(0);
    let mut y = x.clone();
    let mut s = 0u64;
    for _ in 0..horizon {
        if y < *t {
            s += 1;
        }
        y = f.step(&y);
        counts.push(s);
    }
    Ok(CocycleSeries {
        x: x.clone(),
        t: t.clone(),
        counts,
    })
}

/// Compensated complex accumulator.
#[derive(Default)]
struct Neumaier {
    sum: Complex64,
    comp: Complex64,
}

impl Neumaier {
    fn add(&mut self, v: Complex64) {
        self.sum.re = neumaier_step(self.sum.re, v.re, &mut self.comp.re);
        self.sum.im = neumaier_step(self.sum.im, v.im, &mut self.comp.im);
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier_step(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

fn unit(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * turns.rem_euclid(1.0))
}

/// `Σ_j c_j e^{2πiαj}`, with the phase re-anchored every 256 terms.
fn weighted_sum(c: &[u64], alpha: f64) -> Complex64 {
    let step = unit(alpha);
    let mut acc = Neumaier::default();
    let mut z = Complex64::new(1.0, 0.0);
    for (j, &cj) in c.iter().enumerate() {
        if j % 256 == 0 {
            z = unit(alpha * j as f64 - (alpha * j as f64).floor());
        }
        if cj != 0 {
            acc.add(z * cj as f64);
        }
        z *= step;
    }
    acc.total()
}

/// `V_h(α) = |1/h Σ_{k<h} e^{2πiα S_k}|`, from run lengths of `S`.
pub fn weyl_value_at(series: &CocycleSeries, alpha: f64, h: u64) -> f64 {
    if h == 0 {
        return 0.0;
    }
    weighted_sum(&series.run_lengths(h), alpha).norm() / h as f64
}

pub fn weyl_value(series: &CocycleSeries, alpha: f64) -> f64 {
    weyl_value_at(series, alpha, series.horizon())
}

/// The same value summed term by term.
pub fn weyl_value_forward(series: &CocycleSeries, alpha: f64, h: u64) -> f64 {
    let mut acc = Neumaier::default();
    for &s in &series.counts[..h as usize] {
        let phase = (alpha * s as f64).rem_euclid(1.0);
        acc.add(unit(phase));
    }
    acc.total().norm() / h as f64
}

/// `V_h(m/G)` for every `m < G`: fold the run lengths modulo `G`, then one
/// direct DFT with exact integer phase indices.
pub fn weyl_grid(series: &CocycleSeries, grid_size: usize, h: u64) -> Vec<f64> {
    let g = grid_size;
    let mut folded = vec![0u64; g];
    for (j, c) in series.run_lengths(h).into_iter().enumerate() {
        folded[j % g] += c;
    }
    let roots: Vec<Complex64> = (0..g).map(|r| unit(r as f64 / g as f64)).collect();
    (0..g)
        .map(|m| {
            let mut acc = Neumaier::default();
            for (r, &c) in folded.iter().enumerate() {
                if c != 0 {
                    acc.add(roots[(m * r) % g] * c as f64);
                }
            }
            acc.total().norm() / h.max(1) as f64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Peak {
    pub alpha: f64,
    /// Grid index the refinement started from.
    pub grid_index: usize,
    pub v_n: f64,
    pub v_2n: f64,
    pub persistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylScan {
    pub t: Scalar,
    pub x: Scalar,
    pub horizon: u64,
    pub grid_size: usize,
    /// Horizon at which the coarse grid located candidate peaks.
    pub coarse_horizon: u64,
    pub v_n: Vec<f64>,
    pub v_2n: Vec<f64>,
    pub peak_threshold: f64,
    /// Refined peaks with `v_n >= peak_threshold`, by decreasing `v_n`.
    pub peaks: Vec<Peak>,
}

impl WeylScan {
    pub fn alpha(&self, m: usize) -> f64 {
        m as f64 / self.grid_size as f64
    }

    pub fn persistent(&self, m: usize) -> bool {
        (self.v_n[m] - self.v_2n[m]).abs() < PERSISTENCE_TOLERANCE
    }
}

/// Default base point: `t/2`, moved by `1/257` until its orbit avoids `D` for `depth` steps.
pub fn default_base_point(f: &Iet, t: &Scalar, depth: u64) -> Result<Scalar> {
    let nudge = Scalar::from_ratio(1, 257);
    let mut x = t.div_int(2);
    while x < *f.total_length() {
        if !f.dprime_probe(&x, depth)?.is_hit() {
            return Ok(x);
        }
        x = x + &nudge;
    }
    Err(Error::Precondition(format!(
        "no base point t/2 + k/257 avoids D for {depth} steps"
    )))
}

/// Weyl values over the grid `m/G` at horizons `N` and `2N`, plus refined peaks.
///
/// The grid spacing `1/G` is far coarser than the peak width `1/S_N`, so each
/// of the strongest local maxima at the horizon where `S` first reaches `G`
/// is tracked while the horizon doubles up to `2N`, each stage searching
/// `±2/S_h` around the previous location.
pub fn eigenvalue_scan(
    f: &Iet,
    t: &Scalar,
    grid_size: usize,
    horizon: u64,
    x: Option<Scalar>,
    peak_threshold: f64,
    jobs: usize,
) -> Result<WeylScan> {
    if grid_size < 2 {
        return Err(Error::Precondition(format!(
            "grid size {grid_size} is below 2"
        )));
    }
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    let x = match x {
        Some(x) => x,
        None => default_base_point(f, t, horizon)?,
    };
    let series = visit_counts(f, &x, t, 2 * horizon)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let g = grid_size;
    let (v_n, v_2n) = pool.install(|| {
        rayon::join(
            || weyl_grid(&series, g, horizon),
            || weyl_grid(&series, g, 2 * horizon),
        )
    });
    let coarse_horizon = series.first_reaching(g as u64).max(1);
    let coarse = weyl_grid(&series, g, coarse_horizon);
    let mut candidates: Vec<usize> = (1..g)
        .filter(|&m| coarse[m] >= coarse[m - 1] && coarse[m] > coarse[(m + 1) % g])
        .collect();
    candidates.sort_by(|&a, &b| coarse[b].total_cmp(&coarse[a]).then(a.cmp(&b)));
    candidates.truncate(REFINED_PEAKS);

    let mut stages = Vec::new();
    let mut h = coarse_horizon;
    while h < 2 * horizon {
        h = (2 * h).min(2 * horizon);
        stages.push((h, series.run_lengths(h)));
    }
    let mut peaks: Vec<Peak> = pool.install(|| {
        candidates
            .par_iter()
            .map(|&m| {
                let alpha = refine(&series, &stages, m, g);
                let v_n = weyl_value_at(&series, alpha, horizon);
                let v_2n = weyl_value_at(&series, alpha, 2 * horizon);
                Peak {
                    alpha,
                    grid_index: m,
                    v_n,
                    v_2n,
                    persistent: (v_n - v_2n).abs() < PERSISTENCE_TOLERANCE,
                }
            })
            .collect()
    });
    peaks.retain(|p| p.v_n >= peak_threshold);
    peaks.sort_by(|a, b| b.v_n.total_cmp(&a.v_n).then(a.alpha.total_cmp(&b.alpha)));
    Ok(WeylScan {
        t: t.clone(),
        x,
        horizon,
        grid_size: g,
        coarse_horizon,
        v_n,
        v_2n,
        peak_threshold,
        peaks,
    })
}

fn refine(series: &CocycleSeries, stages: &[(u64, Vec<u64>)], m: usize, g: usize) -> f64 {
    let g = g as f64;
    let center = m as f64 / g;
    let lo = (center - 1.0 / g).max(0.5 / g);
    let hi = (center + 1.0 / g).min(1.0 - 0.5 / g);
    let mut alpha = center;
    for (h, runs) in stages {
        let reach = series.counts[*h as usize - 1].max(1) as f64;
        let half = 2.0 / reach;
        let mut best = (weighted_sum(runs, alpha).norm(), alpha);
        for i in 0..ZOOM_POINTS {
            let offset = half * (i as f64 - (ZOOM_POINTS / 2) as f64) / (ZOOM_POINTS / 2) as f64;
            let a = (alpha + offset).clamp(lo, hi);
            let v = weighted_sum(runs, a).norm();
            if v > best.0 {
                best = (v, a);
            }
        }
        alpha = best.1;
    }
    alpha
}

/// Empirical averages of `F_m(y) = e^{-2πiα S_m(y)}` over the intervals
/// `A = (c-ε, c+ε)`, `B = (c, c+ε)`, `C = (c-ε, c)` for `c = f^k(t)`, `k ∈ {0, 1}`.
///
/// `F_m` satisfies `F_m(f(y)) = θ^{[y<t]} F_m(y)` up to the factor
/// `θ^{-[f^m(y)<t]}`, with `θ = e^{2πiα}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryAverages {
    pub m: u64,
    pub theta: [f64; 2],
    pub alpha0: [f64; 2],
    pub beta0: [f64; 2],
    pub gamma0: [f64; 2],
    pub alpha1: [f64; 2],
    pub beta1: [f64; 2],
    pub gamma1: [f64; 2],
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// `m` is the least `m >= horizon/2` with `f^m(t) >= t + ε`.
#[allow(clippy::too_many_arguments)]
pub fn boundary_averages(
    f: &Iet,
    t: &Scalar,
    alpha: f64,
    n: u64,
    eps: &Scalar,
    sample_density: usize,
    horizon: u64,
) -> Result<BoundaryAverages> {
    f.check_point("t", t)?;
    if !eps.is_positive() {
        return Err(Error::Precondition(format!("eps = {eps} must be positive")));
    }
    if sample_density == 0 {
        return Err(Error::Precondition(
            "sample density must be positive".into(),
        ));
    }
    let bound = crate::diophantine::rho_prime_n(f, t, n)?;
    if *eps > bound {
        return Err(Error::Precondition(format!(
            "eps = {eps} exceeds rho'_{n}(t) = {bound}; the stack around t is not distinct"
        )));
    }
    let floor = t + eps;
    let mut m = horizon / 2;
    let mut y = f.iterate(t, m as i64);
    let cap = horizon.max(1) * 64;
    while y < floor {
        y = f.step(&y);
        m += 1;
        if m > cap {
            return Err(Error::StepCapExceeded {
                cap,
                unfinished: None,
            });
        }
    }

    let samples = |lo: &Scalar, hi: &Scalar| -> Vec<Scalar> {
        let width = hi - lo;
        let d = sample_density as i64 + 1;
        (1..d)
            .map(|i| lo + &width * Scalar::from_ratio(i, d))
            .collect()
    };
    // Returns (F_m(y), F_m(f(y))).
    let values = |y: &Scalar| -> (Complex64, Complex64) {
        let mut z = y.clone();
        let mut s = 0u64;
        let mut s_m = 0u64;
        for j in 0..=m {
            if j == m {
                s_m = s;
            }
            if z < *t {
                s += 1;
            }
            z = f.step(&z);
        }
        let first = u64::from(y < t);
        let here = unit(-alpha * s_m as f64);
        let there = unit(-alpha * (s - first) as f64);
        (here, there)
    };
    let average = |pts: Vec<Scalar>| -> (Complex64, Complex64) {
        let vals: Vec<(Complex64, Complex64)> = pts.par_iter().map(values).collect();
        let k = vals.len() as f64;
        let a: Complex64 = vals.iter().map(|v| v.0).sum();
        let b: Complex64 = vals.iter().map(|v| v.1).sum();
        (a / k, b / k)
    };
    let (a0, a1) = average(samples(&(t - eps), &(t + eps)));
    let (b0, b1) = average(samples(t, &(t + eps)));
    let (c0, c1) = average(samples(&(t - eps), t));
    Ok(BoundaryAverages {
        m,
        theta: pair(unit(alpha)),
        alpha0: pair(a0),
        beta0: pair(b0),
        gamma0: pair(c0),
        alpha1: pair(a1),
        beta1: pair(b1),
        gamma1: pair(c1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iet::Permutation;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    fn golden() -> Iet {
        Iet::new(
            vec![s("-1/2+1/2*sqrt(5)"), s("3/2-1/2*sqrt(5)")],
            Permutation::new(vec![2, 1]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn full_interval_counts_every_step() {
        let f = golden();
        let series = visit_counts(&f, &s("1/3"), f.total_length(), 50).unwrap();
        assert!(series
            .counts
            .iter()
            .enumerate()
            .all(|(k, &c)| c == k as u64));
    }

    #[test]
    fn tiny_threshold_is_never_visited() {
        let f = golden();
        let t = s("1/100000");
        let x = s("1/2");
        let series = visit_counts(&f, &x, &t, 20).unwrap();
        assert!((0..20).all(|k| f.iterate(&x, k) >= t));
        assert_eq!(series.counts[20], 0);
    }

    #[test]
    fn increments_are_zero_or_one() {
        let f = golden();
        let series = visit_counts(&f, &s("1/7"), &s("1/2"), 1000).unwrap();
        assert_eq!(series.counts[0], 0);
        assert!(series.counts.windows(2).all(|w| w[1] - w[0] <= 1));
        let ratio = series.counts[1000] as f64 / 1000.0;
        assert!((ratio - 0.5).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn weyl_trivial_values() {
        let f = golden();
        let series = visit_counts(&f, &s("1/3"), f.total_length(), 1001).unwrap();
        assert!((weyl_value(&series, 0.0) - 1.0).abs() < 1e-12);
        assert!(weyl_value(&series, 0.5) <= 1.0 / 1001.0 + 1e-12);
    }

    #[test]
    fn run_lengths_match_forward_sum() {
        let f = golden();
        let series = visit_counts(&f, &s("1/5"), &s("1/2"), 3000).unwrap();
        for alpha in [0.1, 0.25, 0.381966, 0.9, 0.123456789] {
            let a = weyl_value(&series, alpha);
            let b = weyl_value_forward(&series, alpha, 3000);
            assert!((a - b).abs() < 1e-10, "{alpha}: {a} vs {b}");
        }
        let grid = weyl_grid(&series, 64, 3000);
        for (m, v) in grid.iter().enumerate() {
            let b = weyl_value_forward(&series, m as f64 / 64.0, 3000);
            assert!((v - b).abs() < 1e-10);
        }
        assert!((grid[5] - grid[59]).abs() < 1e-12);
    }

    #[test]
    fn two_point_grid() {
        let f = golden();
        let scan = eigenvalue_scan(&f, &s("1/2"), 2, 500, None, 0.0, 1).unwrap();
        assert!((scan.v_n[0] - 1.0).abs() < 1e-12);
        assert!((scan.v_2n[0] - 1.0).abs() < 1e-12);
        assert_eq!(scan.x, s("1/4"));
    }

    #[test]
    fn scan_does_not_depend_on_jobs() {
        let f = golden();
        let one = eigenvalue_scan(&f, &s("1/2"), 64, 2000, None, 0.0, 1).unwrap();
        let four = eigenvalue_scan(&f, &s("1/2"), 64, 2000, None, 0.0, 4).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn boundary_averages_at_zero_frequency() {
        let f = golden();
        let t = s("1/2");
        let eps = crate::diophantine::rho_prime_n(&f, &t, 20).unwrap();
        let avg = boundary_averages(&f, &t, 0.0, 20, &eps, 16, 200).unwrap();
        for z in [
            avg.alpha0, avg.beta0, avg.gamma0, avg.alpha1, avg.beta1, avg.gamma1,
        ] {
            assert!((complex(z) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert!(avg.m >= 100);
        assert!(f.iterate(&t, avg.m as i64) >= &t + &eps);
        let too_wide = eps.scale(2);
        assert!(boundary_averages(&f, &t, 0.3, 20, &too_wide, 16, 200).is_err());
    }
}
