//! Orbit separation: `rho`, `rho_n`, `delta_n`, `rho'_n`, and the `phi`/`psi` record series.
//!
//! `rho_n(x)` is the distance from `f^k(x)`, `-n <= k < n`, to `D_0`;
//! `delta_n(x)` is the least gap among `f^k(x)`, `|k| <= n`;
//! `rho'_n(x) = min(rho_n(x), delta_n(x)/2)`.
//! [`SeparationTracker`] advances `n` one step at a time in `O(log n)` comparisons.

use std::collections::BTreeSet;
use std::ops::Bound::{Excluded, Unbounded};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::iet::{DPrimeProbe, Iet};
use crate::scalar::Scalar;

/// Schedule identifier carried by every record series.
pub const SCHEDULE_ID: &str = "all n<=64, then round(64*1.05^j), deduplicated";

/// `dist(x, D_0)`.
pub fn rho(f: &Iet, x: &Scalar) -> Scalar {
    let pts = f.endpoints();
    let i = pts.partition_point(|p| p <= x);
    let below = x - &pts[i - 1];
    match pts.get(i) {
        Some(above) => below.min(above - x),
        None => below,
    }
}

pub fn rho_n(f: &Iet, x: &Scalar, n: u64) -> Result<Scalar> {
    Ok(profile(f, x, n)?.rho_n)
}

pub fn delta_n(f: &Iet, x: &Scalar, n: u64) -> Result<Scalar> {
    Ok(profile(f, x, n)?.delta_n)
}

pub fn rho_prime_n(f: &Iet, x: &Scalar, n: u64) -> Result<Scalar> {
    Ok(profile(f, x, n)?.rho_prime_n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationProfile {
    pub x: Scalar,
    pub n: u64,
    pub rho: Scalar,
    pub rho_n: Scalar,
    pub delta_n: Scalar,
    pub rho_prime_n: Scalar,
}

/// All separation quantities of `x` at depth `n >= 1`.
pub fn profile(f: &Iet, x: &Scalar, n: u64) -> Result<SeparationProfile> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let mut tracker = SeparationTracker::new(f, x)?;
    while tracker.n() < n {
        tracker.advance();
    }
    Ok(tracker.profile())
}

/// Incremental `rho_n`, `delta_n` for `n = 1, 2, ...`.
#[derive(Debug, Clone)]
pub struct SeparationTracker<'a> {
    f: &'a Iet,
    x: Scalar,
    n: u64,
    back: Scalar,
    front: Scalar,
    points: BTreeSet<Scalar>,
    rho_n: Option<Scalar>,
    delta_n: Option<Scalar>,
}

impl<'a> SeparationTracker<'a> {
    /// Tracker at `n = 0`, where both minima are over empty sets.
    pub fn new(f: &'a Iet, x: &Scalar) -> Result<Self> {
        f.check_point("x", x)?;
        Ok(SeparationTracker {
            f,
            x: x.clone(),
            n: 0,
            back: x.clone(),
            front: x.clone(),
            points: BTreeSet::from([x.clone()]),
            rho_n: None,
            delta_n: None,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Moves from `n` to `n + 1`.
    pub fn advance(&mut self) {
        let f = self.f;
        self.back = f.step_back(&self.back);
        let near = rho(f, &self.back).min(rho(f, &self.front));
        self.rho_n = Some(match self.rho_n.take() {
            Some(r) => r.min(near),
            None => near,
        });
        self.front = f.step(&self.front);
        let back = self.back.clone();
        let front = self.front.clone();
        self.insert(back);
        self.insert(front);
        self.n += 1;
    }

    fn insert(&mut self, p: Scalar) {
        let mut gap: Option<Scalar> = None;
        if let Some(lo) = self.points.range(..&p).next_back() {
            gap = Some(&p - lo);
        }
        if let Some(hi) = self.points.range((Excluded(&p), Unbounded)).next() {
            let g = hi - &p;
            gap = Some(gap.map_or(g.clone(), |h| h.min(g)));
        }
        if !self.points.insert(p) {
            gap = Some(Scalar::zero());
        }
        if let Some(g) = gap {
            self.delta_n = Some(match self.delta_n.take() {
                Some(d) => d.min(g),
                None => g,
            });
        }
    }

    /// `rho_n`; only meaningful for `n >= 1`.
    pub fn rho_n(&self) -> &Scalar {
        self.rho_n.as_ref().expect("rho_n needs n >= 1")
    }

    pub fn delta_n(&self) -> &Scalar {
        self.delta_n.as_ref().expect("delta_n needs n >= 1")
    }

    pub fn rho_prime_n(&self) -> Scalar {
        self.rho_n().clone().min(self.delta_n().div_int(2))
    }

    pub fn profile(&self) -> SeparationProfile {
        SeparationProfile {
            x: self.x.clone(),
            n: self.n,
            rho: rho(self.f, &self.x),
            rho_n: self.rho_n().clone(),
            delta_n: self.delta_n().clone(),
            rho_prime_n: self.rho_prime_n(),
        }
    }
}

/// The sampled depths up to `horizon`: every `n <= 64`, then `round(64 * 1.05^j)`.
///
/// The sequence does not depend on `horizon`, so shorter schedules are prefixes of longer ones.
pub fn schedule(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=horizon.min(64)).collect();
    let mut v = 64.0f64;
    loop {
        v *= 1.05;
        let n = v.round() as u64;
        if n > horizon {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    /// `n * rho_n`, whose limsup is `phi`.
    Phi,
    /// `n * rho'_n`, whose limsup is `psi`.
    Psi,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordEntry {
    pub n: u64,
    pub value: Scalar,
    pub is_record: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordSeries {
    pub t: Scalar,
    pub functional: Functional,
    pub horizon: u64,
    pub schedule: &'static str,
    pub entries: Vec<RecordEntry>,
    /// Max of the values over scheduled `n` in `[horizon/2, horizon]`.
    pub psi_hat: f64,
    /// Entry attaining `psi_hat`.
    pub best: Option<RecordEntry>,
    /// First `n` at which the value is exactly 0; the series stops there.
    pub vanished_at: Option<u64>,
    /// False when the series vanished, in which case `psi_hat` comes from the pre-hit tail.
    pub valid: bool,
}

impl RecordSeries {
    pub fn record_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_record).count()
    }
}

pub fn psi_records(f: &Iet, t: &Scalar, horizon: u64) -> Result<RecordSeries> {
    records(f, t, horizon, Functional::Psi)
}

pub fn phi_records(f: &Iet, t: &Scalar, horizon: u64) -> Result<RecordSeries> {
    records(f, t, horizon, Functional::Phi)
}

fn records(f: &Iet, t: &Scalar, horizon: u64, functional: Functional) -> Result<RecordSeries> {
    if !t.is_positive() {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t.clone(),
            domain: format!("(0, {})", f.total_length()),
        });
    }
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    let mut tracker = SeparationTracker::new(f, t)?;
    let sched = schedule(horizon);
    let mut next = sched.iter().peekable();
    let mut entries: Vec<RecordEntry> = Vec::with_capacity(sched.len());
    let mut vanished_at = None;
    let mut top: Option<Scalar> = None;
    while tracker.n() < horizon {
        tracker.advance();
        let n = tracker.n();
        let sep = match functional {
            Functional::Psi => tracker.rho_prime_n(),
            Functional::Phi => tracker.rho_n().clone(),
        };
        let scheduled = next.peek() == Some(&&n);
        if scheduled {
            next.next();
        }
        if sep.is_zero() {
            vanished_at = Some(n);
        }
        if scheduled || vanished_at.is_some() {
            let value = sep.scale(n as i64);
            let is_record = top.as_ref().is_none_or(|m| value > *m);
            if is_record {
                top = Some(value.clone());
            }
            entries.push(RecordEntry {
                n,
                value,
                is_record,
            });
        }
        if vanished_at.is_some() {
            break;
        }
    }
    let tail_from = horizon / 2;
    let pool: Vec<&RecordEntry> = match vanished_at {
        None => entries.iter().filter(|e| e.n >= tail_from).collect(),
        Some(n0) => {
            let before: Vec<&RecordEntry> = entries.iter().filter(|e| e.n < n0).collect();
            let tail: Vec<&RecordEntry> = before
                .iter()
                .copied()
                .filter(|e| e.n >= tail_from)
                .collect();
            if tail.is_empty() {
                before
            } else {
                tail
            }
        }
    };
    let best = pool
        .iter()
        .copied()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .cloned();
    let psi_hat = best.as_ref().map_or(0.0, |e| e.value.to_f64());
    Ok(RecordSeries {
        t: t.clone(),
        functional,
        horizon,
        schedule: SCHEDULE_ID,
        entries,
        psi_hat,
        best,
        valid: vanished_at.is_none(),
        vanished_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    DPrimeHit,
    PsiPositiveEvidence,
    Undecided,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::DPrimeHit => "DPrimeHit",
            Classification::PsiPositiveEvidence => "PsiPositiveEvidence",
            Classification::Undecided => "Undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub t: Scalar,
    pub classification: Classification,
    pub psi_hat: f64,
    pub record_count: usize,
    pub best_n: Option<u64>,
    pub best_value_exact: Option<Scalar>,
    /// `|k|` of the witness `f^k(t) ∈ D` on a hit, otherwise the probe depth.
    pub dprime_depth: u64,
}

/// Default evidence threshold `b/(24r)`.
pub fn default_threshold(f: &Iet) -> f64 {
    f.total_length().to_f64() / (24.0 * f.r() as f64)
}

/// Classifies one `t`.
pub fn classify(f: &Iet, t: &Scalar, horizon: u64, threshold: f64) -> Result<ScanRow> {
    let probe = f.dprime_probe(t, horizon)?;
    let series = psi_records(f, t, horizon)?;
    let (classification, dprime_depth) = match probe {
        DPrimeProbe::Hit { steps, .. } => (Classification::DPrimeHit, steps.unsigned_abs()),
        DPrimeProbe::NotInDPrimeUpTo { depth } if series.valid && series.psi_hat >= threshold => {
            (Classification::PsiPositiveEvidence, depth)
        }
        DPrimeProbe::NotInDPrimeUpTo { depth } => (Classification::Undecided, depth),
    };
    Ok(ScanRow {
        t: t.clone(),
        classification,
        psi_hat: series.psi_hat,
        record_count: series.record_count(),
        best_n: series.best.as_ref().map(|e| e.n),
        best_value_exact: series.best.map(|e| e.value),
        dprime_depth,
    })
}

/// Classifies every grid point on `jobs` threads; rows come back sorted by `t`.
pub fn scan_critical(
    f: &Iet,
    grid: &[Scalar],
    horizon: u64,
    threshold: f64,
    jobs: usize,
) -> Result<Vec<ScanRow>> {
    use rayon::prelude::*;
    for t in grid {
        f.check_point("t", t)?;
        if t.is_zero() {
            return Err(Error::OutOfDomain {
                what: "t",
                value: t.clone(),
                domain: format!("(0, {})", f.total_length()),
            });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let mut rows = pool.install(|| {
        grid.par_iter()
            .map(|t| classify(f, t, horizon, threshold))
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by(|a, b| a.t.cmp(&b.t));
    Ok(rows)
}
