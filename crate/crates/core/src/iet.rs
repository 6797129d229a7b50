//! Interval exchange transformations over exact scalars.
//!
//! An r-IET on `[0, b)` is given by positive lengths `lambda_1..lambda_r` and a
//! permutation in one-line notation: `perm[k]` is the position (1-based) that
//! the k-th interval `X_k = [d_{k-1}, d_k)` occupies after the exchange.
//! Intervals are right-continuous: `x` belongs to `X_k` iff `d_{k-1} <= x < d_k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A permutation of `{1..r}`, `r >= 2`, in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let r = images.len();
        if r < 2 {
            return Err(Error::InvalidPermutation(format!(
                "perm needs at least 2 entries, got {r}"
            )));
        }
        let mut seen = vec![false; r];
        for &p in &images {
            if p == 0 || p > r {
                return Err(Error::InvalidPermutation(format!(
                    "perm entry {p} outside 1..={r}"
                )));
            }
            if std::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::InvalidPermutation(format!(
                    "perm entry {p} repeated"
                )));
            }
        }
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// One-line notation, 1-based.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// 0-based position of the image of the 0-based interval `k`.
    pub fn position(&self, k: usize) -> usize {
        self.images[k] - 1
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (k, &p) in self.images.iter().enumerate() {
            inv[p - 1] = k + 1;
        }
        Permutation { images: inv }
    }

    /// No proper prefix `{1..k}` is mapped onto itself.
    pub fn is_irreducible(&self) -> bool {
        let mut max = 0;
        for (k, &p) in self.images[..self.images.len() - 1].iter().enumerate() {
            max = max.max(p);
            if max == k + 1 {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

pub fn is_irreducible(perm: &Permutation) -> bool {
    perm.is_irreducible()
}

/// `[lo, hi)`, or `(lo, hi)` when `open` is set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
    #[serde(default)]
    pub open: bool,
}

impl Interval {
    pub fn half_open(lo: Scalar, hi: Scalar) -> Result<Self> {
        Interval::checked(lo, hi, false)
    }

    pub fn open(lo: Scalar, hi: Scalar) -> Result<Self> {
        Interval::checked(lo, hi, true)
    }

    fn checked(lo: Scalar, hi: Scalar, open: bool) -> Result<Self> {
        if lo.try_cmp(&hi)?.is_ge() {
            return Err(Error::Precondition(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi, open })
    }

    /// The open ball `B_eps(x) = (x - eps, x + eps)`.
    pub fn ball(center: &Scalar, eps: &Scalar) -> Result<Self> {
        Interval::open(center - eps, center + eps)
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        let above = if self.open {
            *x > self.lo
        } else {
            *x >= self.lo
        };
        above && *x < self.hi
    }

    pub fn translate(&self, by: &Scalar) -> Interval {
        Interval {
            lo: &self.lo + by,
            hi: &self.hi + by,
            open: self.open,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.open { "(" } else { "[" };
        write!(f, "{open}{}, {})", self.lo, self.hi)
    }
}

/// The configuration document describing an IET.
///
/// ```toml
/// lengths = ["3/5", "2/5"]
/// perm = [2, 1]
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IetConfig {
    pub lengths: Vec<String>,
    pub perm: Vec<usize>,
}

impl IetConfig {
    pub fn build(&self) -> Result<Iet> {
        let lengths = self
            .lengths
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.parse::<Scalar>()
                    .map_err(|e| Error::InvalidLengths(format!("lengths[{i}] = {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Iet::new(lengths, Permutation::new(self.perm.clone())?)
    }
}

/// Whether a discontinuity orbit hits the discontinuity set within the probe depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum IdocReport {
    Ok {
        depth: u64,
    },
    /// `f^steps(from) == to`, both in `D`.
    Collision {
        steps: u64,
        from: Scalar,
        to: Scalar,
    },
}

impl IdocReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, IdocReport::Ok { .. })
    }
}

/// Result of probing whether a point's orbit meets `D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum DPrimeProbe {
    NotInDPrimeUpTo {
        depth: u64,
    },
    /// `f^steps(x) == point`, with `point` a discontinuity.
    Hit {
        steps: i64,
        point: Scalar,
    },
}

impl DPrimeProbe {
    pub fn is_hit(&self) -> bool {
        matches!(self, DPrimeProbe::Hit { .. })
    }
}

/// Orbit points `f^k(x)` for `k` in `first..first + points.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitWindow {
    pub first: i64,
    pub points: Vec<Scalar>,
}

impl OrbitWindow {
    pub fn get(&self, k: i64) -> Option<&Scalar> {
        let i = k.checked_sub(self.first)?;
        usize::try_from(i).ok().and_then(|i| self.points.get(i))
    }

    pub fn indices(&self) -> std::ops::Range<i64> {
        self.first..self.first + self.points.len() as i64
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.indices().zip(self.points.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iet {
    lengths: Vec<Scalar>,
    perm: Permutation,
    /// `d_0 = 0 < d_1 < ... < d_r = b`.
    cuts: Vec<Scalar>,
    /// Translation constant of each exchanged interval.
    shifts: Vec<Scalar>,
    /// Left endpoints of the image intervals, by position, followed by `b`.
    image_cuts: Vec<Scalar>,
    /// Interval index occupying each image position.
    at_position: Vec<usize>,
    radicand: Option<u64>,
}

impl Iet {
    pub fn new(lengths: Vec<Scalar>, perm: Permutation) -> Result<Self> {
        let r = perm.len();
        if lengths.len() != r {
            return Err(Error::InvalidLengths(format!(
                "{} lengths for a permutation of {r} symbols",
                lengths.len()
            )));
        }
        let mut radicand = None;
        for (i, l) in lengths.iter().enumerate() {
            if !l.is_positive() {
                return Err(Error::InvalidLengths(format!(
                    "lengths[{i}] = {l} is not positive"
                )));
            }
            if let Some(d) = l.radicand() {
                match radicand {
                    None => radicand = Some(d),
                    Some(e) if e != d => {
                        return Err(Error::InvalidLengths(format!(
                            "lengths mix sqrt({e}) and sqrt({d})"
                        )))
                    }
                    _ => {}
                }
            }
        }
        let mut cuts = Vec::with_capacity(r + 1);
        cuts.push(Scalar::zero());
        for l in &lengths {
            let next = cuts.last().unwrap() + l;
            cuts.push(next);
        }
        let at_position = perm
            .inverse()
            .images
            .iter()
            .map(|k| k - 1)
            .collect::<Vec<_>>();
        let mut image_cuts = Vec::with_capacity(r + 1);
        image_cuts.push(Scalar::zero());
        for &k in &at_position {
            let next = image_cuts.last().unwrap() + &lengths[k];
            image_cuts.push(next);
        }
        let shifts = (0..r)
            .map(|k| &image_cuts[perm.position(k)] - &cuts[k])
            .collect();
        Ok(Iet {
            lengths,
            perm,
            cuts,
            shifts,
            image_cuts,
            at_position,
            radicand,
        })
    }

    /// Rotation `x -> x + alpha mod 1` as the 2-IET `((1 - alpha, alpha), (2 1))`.
    pub fn rotation(alpha: Scalar) -> Result<Self> {
        let rest = Scalar::one() - &alpha;
        Iet::new(vec![rest, alpha], Permutation::new(vec![2, 1])?)
    }

    pub fn r(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[Scalar] {
        &self.lengths
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    /// `b`, the length of the whole interval.
    pub fn total_length(&self) -> &Scalar {
        &self.cuts[self.r()]
    }

    /// `D = {d_1, ..., d_{r-1}}`.
    pub fn discontinuities(&self) -> &[Scalar] {
        &self.cuts[1..self.r()]
    }

    /// `D_0 = D ∪ {0, b}`, sorted.
    pub fn endpoints(&self) -> &[Scalar] {
        &self.cuts
    }

    pub fn translations(&self) -> &[Scalar] {
        &self.shifts
    }

    pub fn radicand(&self) -> Option<u64> {
        self.radicand
    }

    /// The exchanged interval `X_k` (0-based `k`).
    pub fn exchanged(&self, k: usize) -> Interval {
        Interval {
            lo: self.cuts[k].clone(),
            hi: self.cuts[k + 1].clone(),
            open: false,
        }
    }

    pub fn config(&self) -> IetConfig {
        IetConfig {
            lengths: self.lengths.iter().map(|l| l.to_string()).collect(),
            perm: self.perm.images.clone(),
        }
    }

    /// Checks that `x` can be fed to the map: same field and `0 <= x < b`.
    pub fn check_point(&self, what: &'static str, x: &Scalar) -> Result<()> {
        if let (Some(d), Some(e)) = (self.radicand, x.radicand()) {
            if d != e {
                return Err(crate::ScalarError::FieldMismatch(d, e).into());
            }
        }
        if x.is_negative() || x >= self.total_length() {
            return Err(Error::OutOfDomain {
                what,
                value: x.clone(),
                domain: format!("[0, {})", self.total_length()),
            });
        }
        Ok(())
    }

    /// Index `k` (0-based) with `d_k <= x < d_{k+1}`.
    pub fn interval_index(&self, x: &Scalar) -> usize {
        self.cuts[1..self.r()].partition_point(|d| d <= x)
    }

    /// `f(x)` for a point already known to lie in `[0, b)`.
    pub fn step(&self, x: &Scalar) -> Scalar {
        x + &self.shifts[self.interval_index(x)]
    }

    /// `f^{-1}(y)` for a point already known to lie in `[0, b)`.
    pub fn step_back(&self, y: &Scalar) -> Scalar {
        let p = self.image_cuts[1..self.r()].partition_point(|c| c <= y);
        y - &self.shifts[self.at_position[p]]
    }

    /// `f^m(x)` for any integer `m`.
    pub fn iterate(&self, x: &Scalar, m: i64) -> Scalar {
        let mut y = x.clone();
        if m >= 0 {
            for _ in 0..m {
                y = self.step(&y);
            }
        } else {
            for _ in 0..m.unsigned_abs() {
                y = self.step_back(&y);
            }
        }
        y
    }

    pub fn evaluate(&self, x: &Scalar) -> Result<Scalar> {
        self.check_point("x", x)?;
        Ok(self.step(x))
    }

    pub fn evaluate_inverse(&self, y: &Scalar) -> Result<Scalar> {
        self.check_point("y", y)?;
        Ok(self.step_back(y))
    }

    /// The inverse map as an IET in its own right.
    pub fn inverse(&self) -> Iet {
        let lengths = self
            .at_position
            .iter()
            .map(|&k| self.lengths[k].clone())
            .collect();
        Iet::new(lengths, self.perm.inverse()).expect("inverse of a valid IET")
    }

    /// Position of `x` in `D`, if it is a discontinuity.
    pub fn discontinuity_index(&self, x: &Scalar) -> Option<usize> {
        self.discontinuities().binary_search(x).ok()
    }

    /// `f^k(x)` for `k = -n..n-1` (the window of `rho_n`).
    pub fn orbit_window(&self, x: &Scalar, n: u64) -> Result<OrbitWindow> {
        self.check_point("x", x)?;
        Ok(self.window(x, n, false))
    }

    /// `f^k(x)` for `k = -n..=n` (the window of `delta_n`).
    pub fn orbit_window_symmetric(&self, x: &Scalar, n: u64) -> Result<OrbitWindow> {
        self.check_point("x", x)?;
        Ok(self.window(x, n, true))
    }

    pub(crate) fn window(&self, x: &Scalar, n: u64, inclusive: bool) -> OrbitWindow {
        let forward = if inclusive { n + 1 } else { n };
        let mut back = Vec::with_capacity(n as usize);
        let mut y = x.clone();
        for _ in 0..n {
            y = self.step_back(&y);
            back.push(y.clone());
        }
        back.reverse();
        let mut points = back;
        let mut y = x.clone();
        for i in 0..forward {
            if i > 0 {
                y = self.step(&y);
            }
            points.push(y.clone());
        }
        OrbitWindow {
            first: -(n as i64),
            points,
        }
    }

    /// Searches `f^m(d_i) = d_j` for `1 <= m <= depth`, reporting the smallest `m`.
    pub fn check_idoc(&self, depth: u64) -> IdocReport {
        let starts = self.discontinuities().to_vec();
        let mut current = starts.clone();
        for m in 1..=depth {
            for (i, y) in current.iter_mut().enumerate() {
                *y = self.step(y);
                if let Some(j) = self.discontinuity_index(y) {
                    return IdocReport::Collision {
                        steps: m,
                        from: starts[i].clone(),
                        to: self.discontinuities()[j].clone(),
                    };
                }
            }
        }
        IdocReport::Ok { depth }
    }

    /// Searches `f^k(x) ∈ D` for `|k| <= depth`, by increasing `|k|` (forward first).
    pub fn dprime_probe(&self, x: &Scalar, depth: u64) -> Result<DPrimeProbe> {
        self.check_point("x", x)?;
        if let Some(j) = self.discontinuity_index(x) {
            return Ok(DPrimeProbe::Hit {
                steps: 0,
                point: self.discontinuities()[j].clone(),
            });
        }
        let mut fwd = x.clone();
        let mut bwd = x.clone();
        for k in 1..=depth {
            fwd = self.step(&fwd);
            if let Some(j) = self.discontinuity_index(&fwd) {
                return Ok(DPrimeProbe::Hit {
                    steps: k as i64,
                    point: self.discontinuities()[j].clone(),
                });
            }
            bwd = self.step_back(&bwd);
            if let Some(j) = self.discontinuity_index(&bwd) {
                return Ok(DPrimeProbe::Hit {
                    steps: -(k as i64),
                    point: self.discontinuities()[j].clone(),
                });
            }
        }
        Ok(DPrimeProbe::NotInDPrimeUpTo { depth })
    }
}

impl fmt::Display for Iet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("IET(lengths=[")?;
        for (i, l) in self.lengths.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "], perm={})", self.perm)
    }
}
