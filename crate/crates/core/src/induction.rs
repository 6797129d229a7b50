//! First-return induction, basic intervals and stacks.
//!
//! [`induce`] computes the first-return map of an IET to `[0, t)` by pushing
//! subintervals forward and splitting them at discontinuities and at `t`.
//! Every piece it returns carries an exact return time and total translation.
//!
//! A [`Stack`] is a sequence of open intervals `Y_1..Y_h` with each `Y_k`
//! (`k < h`) basic and `f(Y_k) = Y_{k+1}`; [`verify_stack`] checks this
//! exactly and [`build_tall_stack`] produces distinct stacks of prescribed
//! height and measure at least `b/r`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iet::{DPrimeProbe, Iet, Interval, Permutation};
use crate::scalar::Scalar;
use crate::SCHEMA_VERSION;

pub const DEFAULT_STEP_CAP: u64 = 1_000_000;

/// Largest denominator considered when choosing the rational base of a tall stack.
pub const BASE_DENOMINATOR_LIMIT: u64 = 1_000_000;

/// Maximal subinterval of `[0, t)` on which the first return is a single translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedPiece {
    pub interval: Interval,
    pub return_time: u64,
    pub translation: Scalar,
}

impl InducedPiece {
    pub fn length(&self) -> Scalar {
        self.interval.length()
    }
}

/// The first-return map `f_t` of an IET to `[0, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedIet {
    t: Scalar,
    pieces: Vec<InducedPiece>,
    map: Iet,
}

impl InducedIet {
    pub fn t(&self) -> &Scalar {
        &self.t
    }

    pub fn pieces(&self) -> &[InducedPiece] {
        &self.pieces
    }

    /// `s(t)`, the number of intervals exchanged by `f_t`.
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// `f_t` as an IET on `[0, t)`.
    pub fn iet(&self) -> &Iet {
        &self.map
    }

    pub fn piece_index(&self, x: &Scalar) -> usize {
        self.pieces[1..].partition_point(|p| p.interval.lo <= *x)
    }

    pub fn evaluate(&self, x: &Scalar) -> Result<Scalar> {
        if x.is_negative() || *x >= self.t {
            return Err(Error::OutOfDomain {
                what: "x",
                value: x.clone(),
                domain: format!("[0, {})", self.t),
            });
        }
        Ok(x + &self.pieces[self.piece_index(x)].translation)
    }

    /// Interior piece boundaries, i.e. the discontinuities of `f_t`.
    pub fn boundaries(&self) -> impl Iterator<Item = &Scalar> {
        self.pieces[1..].iter().map(|p| &p.interval.lo)
    }

    /// `sum(return_time * length)`; equals `b` when the towers over the pieces tile `[0, b)`.
    pub fn tower_mass(&self) -> Scalar {
        self.pieces.iter().fold(Scalar::zero(), |acc, p| {
            acc + p.length().scale(p.return_time as i64)
        })
    }
}

struct Pending {
    lo: Scalar,
    hi: Scalar,
    shift: Scalar,
    time: u64,
}

fn check_threshold(f: &Iet, t: &Scalar) -> Result<()> {
    if !t.compatible(f.total_length()) || !t.is_positive() || t > f.total_length() {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t.clone(),
            domain: format!("(0, {}]", f.total_length()),
        });
    }
    Ok(())
}

/// First-return map of `f` to `[0, t)`, `0 < t <= b`.
///
/// `step_cap` bounds the total number of interval pushes.
pub fn induce(f: &Iet, t: &Scalar, step_cap: u64) -> Result<InducedIet> {
    check_threshold(f, t)?;
    let mut work = vec![Pending {
        lo: Scalar::zero(),
        hi: t.clone(),
        shift: Scalar::zero(),
        time: 0,
    }];
    let mut done: Vec<InducedPiece> = Vec::new();
    let mut steps = 0u64;
    while let Some(item) = work.pop() {
        steps += 1;
        if steps > step_cap {
            let unfinished = work
                .iter()
                .chain(std::iter::once(&item))
                .fold(Scalar::zero(), |acc, w| acc + (&w.hi - &w.lo));
            return Err(Error::StepCapExceeded {
                cap: step_cap,
                unfinished: Some(unfinished),
            });
        }
        let image_lo = &item.lo + &item.shift;
        let image_hi = &item.hi + &item.shift;
        // Split the current image at the discontinuities it straddles.
        let mut cuts: Vec<Scalar> = vec![image_lo.clone()];
        cuts.extend(
            f.discontinuities()
                .iter()
                .filter(|d| **d > image_lo && **d < image_hi)
                .cloned(),
        );
        cuts.push(image_hi);
        for w in cuts.windows(2) {
            let omega = &f.translations()[f.interval_index(&w[0])];
            let shift = &item.shift + omega;
            let new_lo = &w[0] + omega;
            let new_hi = &w[1] + omega;
            let orig_lo = &w[0] - &item.shift;
            let orig_hi = &w[1] - &item.shift;
            let time = item.time + 1;
            if new_hi <= *t {
                done.push(piece(orig_lo, orig_hi, time, shift));
            } else if new_lo >= *t {
                work.push(Pending {
                    lo: orig_lo,
                    hi: orig_hi,
                    shift,
                    time,
                });
            } else {
                let split = t - &shift;
                done.push(piece(orig_lo, split.clone(), time, shift.clone()));
                work.push(Pending {
                    lo: split,
                    hi: orig_hi,
                    shift,
                    time,
                });
            }
        }
    }
    done.sort_by(|a, b| a.interval.lo.cmp(&b.interval.lo));
    let mut pieces: Vec<InducedPiece> = Vec::with_capacity(done.len());
    for p in done {
        match pieces.last_mut() {
            Some(last)
                if last.return_time == p.return_time
                    && last.translation == p.translation
                    && last.interval.hi == p.interval.lo =>
            {
                last.interval.hi = p.interval.hi;
            }
            _ => pieces.push(p),
        }
    }
    if pieces.len() < 2 {
        return Err(Error::Induction(format!(
            "the first return to [0, {t}) is a single translation; f is periodic there"
        )));
    }
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by(|&i, &j| {
        let a = &pieces[i].interval.lo + &pieces[i].translation;
        let b = &pieces[j].interval.lo + &pieces[j].translation;
        a.cmp(&b)
    });
    let mut images = vec![0; pieces.len()];
    for (pos, &i) in order.iter().enumerate() {
        images[i] = pos + 1;
    }
    let lengths = pieces.iter().map(InducedPiece::length).collect();
    let map = Iet::new(lengths, Permutation::new(images)?)?;
    debug_assert!(pieces
        .iter()
        .zip(map.translations())
        .all(|(p, w)| p.translation == *w));
    Ok(InducedIet {
        t: t.clone(),
        pieces,
        map,
    })
}

fn piece(lo: Scalar, hi: Scalar, return_time: u64, translation: Scalar) -> InducedPiece {
    InducedPiece {
        interval: Interval {
            lo,
            hi,
            open: false,
        },
        return_time,
        translation,
    }
}

/// Least `m >= 1` with `f^m(x) ∈ [0, t)`.
pub fn return_time(f: &Iet, t: &Scalar, x: &Scalar, step_cap: u64) -> Result<u64> {
    check_threshold(f, t)?;
    f.check_point("x", x)?;
    if x >= t {
        return Err(Error::OutOfDomain {
            what: "x",
            value: x.clone(),
            domain: format!("[0, {t})"),
        });
    }
    let mut y = x.clone();
    for m in 1..=step_cap {
        y = f.step(&y);
        if y < *t {
            return Ok(m);
        }
    }
    Err(Error::StepCapExceeded {
        cap: step_cap,
        unfinished: None,
    })
}

/// Whether the open interval `y` avoids every discontinuity of `f`.
pub fn is_basic(f: &Iet, y: &Interval) -> bool {
    !f.discontinuities().iter().any(|d| *d > y.lo && *d < y.hi)
}

/// The constant `f(x) - x` on a basic interval.
pub fn translation_constant(f: &Iet, y: &Interval) -> Option<Scalar> {
    is_basic(f, y).then(|| f.translations()[f.interval_index(&y.lo)].clone())
}

fn inside(f: &Iet, y: &Interval) -> bool {
    !y.lo.is_negative() && y.hi <= *f.total_length()
}

/// Sequence of open intervals `Y_1..Y_h` with a distinctness flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stack {
    levels: Vec<Interval>,
    distinct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    /// A level is not a basic subinterval of `[0, b)`.
    S1,
    /// `f(Y_k) != Y_{k+1}`.
    S2,
    /// The stack claims to be distinct but two levels overlap.
    Overlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum StackCheck {
    Ok,
    Violation { level: usize, which: ViolationKind },
}

impl StackCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, StackCheck::Ok)
    }
}

#[derive(Serialize, Deserialize)]
struct StackHeader {
    schema_version: u32,
    height: usize,
    width: Scalar,
    measure: Scalar,
    distinct: bool,
}

#[derive(Serialize, Deserialize)]
struct StackLevelLine {
    level: usize,
    lo: Scalar,
    hi: Scalar,
}

impl Stack {
    /// Builds a stack from open levels; distinctness is computed.
    pub fn new(levels: Vec<Interval>) -> Result<Self> {
        let mut stack = Stack::with_claim(levels, false)?;
        stack.distinct = stack.overlapping_level().is_none();
        Ok(stack)
    }

    /// Builds a stack carrying a caller-supplied distinctness claim.
    pub fn with_claim(levels: Vec<Interval>, distinct: bool) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Precondition(
                "a stack needs at least one level".into(),
            ));
        }
        let levels = levels
            .into_iter()
            .map(|y| Interval::open(y.lo, y.hi))
            .collect::<Result<Vec<_>>>()?;
        Ok(Stack { levels, distinct })
    }

    pub fn levels(&self) -> &[Interval] {
        &self.levels
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn width(&self) -> Scalar {
        self.levels[0].length()
    }

    pub fn is_distinct(&self) -> bool {
        self.distinct
    }

    /// Union of the levels as disjoint sorted intervals.
    pub fn support(&self) -> Vec<Interval> {
        let mut sorted: Vec<&Interval> = self.levels.iter().collect();
        sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::new();
        for y in sorted {
            match out.last_mut() {
                Some(last) if y.lo < last.hi => {
                    if y.hi > last.hi {
                        last.hi = y.hi.clone();
                    }
                }
                _ => out.push(y.clone()),
            }
        }
        out
    }

    /// Lebesgue measure of the support.
    pub fn measure(&self) -> Scalar {
        if self.distinct {
            return self.width().scale(self.height() as i64);
        }
        self.support()
            .iter()
            .fold(Scalar::zero(), |acc, y| acc + y.length())
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.levels.iter().any(|y| y.contains(x))
    }

    /// Index of a level overlapping an earlier-sorted one, if any.
    fn overlapping_level(&self) -> Option<usize> {
        let mut order: Vec<usize> = (0..self.levels.len()).collect();
        order.sort_by(|&i, &j| self.levels[i].lo.cmp(&self.levels[j].lo));
        order
            .windows(2)
            .find_map(|w| (self.levels[w[1]].lo < self.levels[w[0]].hi).then(|| w[0].max(w[1])))
    }

    /// JSON lines: a header with summary values, then one line per level.
    pub fn to_jsonl(&self) -> String {
        let header = StackHeader {
            schema_version: SCHEMA_VERSION,
            height: self.height(),
            width: self.width(),
            measure: self.measure(),
            distinct: self.distinct,
        };
        let mut out = serde_json::to_string(&header).expect("serializable header");
        out.push('\n');
        for (level, y) in self.levels.iter().enumerate() {
            let line = StackLevelLine {
                level,
                lo: y.lo.clone(),
                hi: y.hi.clone(),
            };
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string(&line).expect("serializable level")
            );
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let bad = |e: serde_json::Error| Error::Precondition(format!("stack dump: {e}"));
        let header: StackHeader = serde_json::from_str(lines.next().unwrap_or("")).map_err(bad)?;
        let mut levels = Vec::new();
        for (i, line) in lines.enumerate() {
            let l: StackLevelLine = serde_json::from_str(line).map_err(bad)?;
            if l.level != i {
                return Err(Error::Precondition(format!(
                    "stack dump: level {} out of order at line {}",
                    l.level,
                    i + 2
                )));
            }
            levels.push(Interval {
                lo: l.lo,
                hi: l.hi,
                open: true,
            });
        }
        Stack::with_claim(levels, header.distinct)
    }
}

/// `(B_eps(f^k(x)))_{k=-n..=n}`.
///
/// The result is a valid stack iff `eps <= rho_n(x)` and distinct iff
/// additionally `eps <= rho'_n(x)`; validity is left to [`verify_stack`].
pub fn stack_from_window(f: &Iet, x: &Scalar, n: u64, eps: &Scalar) -> Result<Stack> {
    f.check_point("x", x)?;
    if !eps.is_positive() {
        return Err(Error::Precondition(format!("eps = {eps} must be positive")));
    }
    if let DPrimeProbe::Hit { steps, point } = f.dprime_probe(x, n)? {
        return Err(Error::Precondition(format!(
            "f^{steps}(x) = {point} is a discontinuity inside the window"
        )));
    }
    let window = f.window(x, n, true);
    let levels = window
        .points
        .iter()
        .map(|c| Interval::ball(c, eps))
        .collect::<Result<Vec<_>>>()?;
    Stack::new(levels)
}

/// Exact check of the stack conditions and of the distinctness claim.
pub fn verify_stack(f: &Iet, s: &Stack) -> StackCheck {
    let h = s.height();
    for (k, y) in s.levels.iter().enumerate() {
        if !inside(f, y) {
            return StackCheck::Violation {
                level: k,
                which: ViolationKind::S1,
            };
        }
        if k + 1 == h {
            break;
        }
        let Some(c) = translation_constant(f, y) else {
            return StackCheck::Violation {
                level: k,
                which: ViolationKind::S1,
            };
        };
        if y.translate(&c) != s.levels[k + 1] {
            return StackCheck::Violation {
                level: k,
                which: ViolationKind::S2,
            };
        }
    }
    if s.distinct {
        if let Some(level) = s.overlapping_level() {
            return StackCheck::Violation {
                level,
                which: ViolationKind::Overlap,
            };
        }
    }
    StackCheck::Ok
}

/// The middle third `((2a+b)/3, (a+2b)/3)` of an interval.
pub fn middle_third(y: &Interval) -> Interval {
    Interval {
        lo: (y.lo.scale(2) + &y.hi).div_int(3),
        hi: (&y.lo + y.hi.scale(2)).div_int(3),
        open: true,
    }
}

/// Middle thirds of the levels `p+1..q-1` (1-based), `p = floor(h/3)`, `q = h - p + 1`.
pub fn trim_stack(s: &Stack) -> Result<Stack> {
    let h = s.height();
    if h < 6 {
        return Err(Error::Precondition(format!(
            "trimming needs a stack of height at least 6, got {h}"
        )));
    }
    let p = h / 3;
    let q = h - p + 1;
    let levels = s.levels[p..q - 1].iter().map(middle_third).collect();
    Ok(Stack {
        levels,
        distinct: s.distinct,
    })
}

/// How the base interval `[0, y)` of a tall stack was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseChoice {
    /// Largest rational of bounded denominator below `b/(rN)`.
    Rational,
    /// A point of the orbit of `D ∪ {0}` below `b/(rN)`.
    OrbitPoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TallStack {
    pub stack: Stack,
    /// Right end `y` of the base interval `[0, y)`.
    pub base: Scalar,
    pub base_choice: BaseChoice,
    /// 0-based index of the chosen piece of the induced map.
    pub tower: usize,
    /// Number of pieces of the induced map on the base.
    pub towers: usize,
}

/// A distinct stack of height at least `min_height` and measure at least `b/r`.
///
/// The stack is a tower `(f^n(Y_k))_{0 <= n < n_k}` over a piece `Y_k` of the
/// first-return map to a base `[0, y)` with `y < b/(r * min_height)`.
pub fn build_tall_stack(f: &Iet, min_height: u64, step_cap: u64) -> Result<TallStack> {
    if min_height == 0 {
        return Err(Error::Precondition("min_height must be positive".into()));
    }
    if !f.permutation().is_irreducible() {
        return Err(Error::Precondition(format!(
            "permutation {} is reducible",
            f.permutation()
        )));
    }
    let probe_depth = step_cap.min(10_000);
    if let crate::iet::IdocReport::Collision { steps, from, to } = f.check_idoc(probe_depth) {
        return Err(Error::Precondition(format!(
            "f^{steps}({from}) = {to}: discontinuity orbits collide"
        )));
    }
    let b = f.total_length().clone();
    let r = f.r() as i64;
    let bound = b.div_int(r).div_int(min_height as i64);
    let target = b.div_int(r);

    let qualifies = |induced: &InducedIet| -> Option<usize> {
        induced.pieces().iter().position(|p| {
            p.return_time >= min_height && p.length().scale(p.return_time as i64) >= target
        })
    };

    // First choice: a rational base endpoint outside D'.
    let mut y = bound.largest_rational_below(BASE_DENOMINATOR_LIMIT);
    while y.is_positive() && f.dprime_probe(&y, probe_depth)?.is_hit() {
        y = y.largest_rational_below(BASE_DENOMINATOR_LIMIT);
    }
    if y.is_positive() {
        match induce(f, &y, step_cap) {
            Ok(induced) => {
                if let Some(k) = qualifies(&induced) {
                    return Ok(tower_stack(f, &induced, k, BaseChoice::Rational));
                }
            }
            Err(e @ Error::StepCapExceeded { .. }) => return Err(e),
            Err(_) => {}
        }
    }

    // Otherwise bases from the orbit of D ∪ {0}: the first-return map on such
    // a base can exchange as few as r intervals, which forces a tower of
    // measure at least b/r.
    let horizon = (16 * f.r() as u64 * min_height).max(64).min(step_cap);
    let mut candidates = BTreeSet::new();
    let mut starts = vec![Scalar::zero()];
    starts.extend(f.discontinuities().iter().cloned());
    for start in &starts {
        let mut fwd = start.clone();
        let mut bwd = start.clone();
        for _ in 0..horizon {
            fwd = f.step(&fwd);
            bwd = f.step_back(&bwd);
            for p in [&fwd, &bwd] {
                if p.is_positive() && *p < bound {
                    candidates.insert(p.clone());
                }
            }
        }
    }
    let mut last_err = None;
    for y in candidates.iter().rev().take(64) {
        match induce(f, y, step_cap) {
            Ok(induced) => {
                if let Some(k) = qualifies(&induced) {
                    return Ok(tower_stack(f, &induced, k, BaseChoice::OrbitPoint));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::Induction(format!(
        "no base below {bound} produced a tower of height >= {min_height} and measure >= {target}{}",
        last_err.map(|e| format!(" (last error: {e})")).unwrap_or_default()
    )))
}

fn tower_stack(f: &Iet, induced: &InducedIet, k: usize, base_choice: BaseChoice) -> TallStack {
    let piece = &induced.pieces()[k];
    let width = piece.length();
    let mut lo = piece.interval.lo.clone();
    let mut levels = Vec::with_capacity(piece.return_time as usize);
    for _ in 0..piece.return_time {
        levels.push(Interval {
            hi: &lo + &width,
            lo: lo.clone(),
            open: true,
        });
        lo = f.step(&lo);
    }
    TallStack {
        stack: Stack::new(levels).expect("tower levels are nonempty"),
        base: induced.t().clone(),
        base_choice,
        tower: k,
        towers: induced.piece_count(),
    }
}
