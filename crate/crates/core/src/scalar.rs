//! Exact scalars: rationals and elements of a real quadratic field `Q(sqrt(d))`.
//!
//! A [`Scalar`] is stored as `(p + q*sqrt(d)) / r` with integers `r > 0` and
//! `gcd(p, q, r) = 1`; a value whose irrational part vanishes is a plain
//! rational (radicand `0`). Coefficients live in machine words while they fit
//! and move to big integers otherwise. Ordering is decided exactly by sign
//! analysis, so nothing downstream ever depends on floating point.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ScalarError;

/// An exact element of `Q` or of a real quadratic field `Q(sqrt(d))`.
///
/// For rationals `q == 0` and `d == 0`; for quadratic values `q != 0` and
/// `d >= 2` is square-free. The representation is unique, so structural
/// equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    repr: Repr,
    d: u64,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { p: i64, q: i64, r: i64 },
    Big(Box<BigParts>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct BigParts {
    p: BigInt,
    q: BigInt,
    r: BigInt,
}

/// Owned view of a scalar's coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalarKind {
    Rational(BigRational),
    Quadratic {
        a: BigRational,
        b: BigRational,
        d: u64,
    },
}

fn gcd3_i128(p: i128, q: i128, r: i128) -> i128 {
    p.gcd(&q).gcd(&r)
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::small(0, 0, 1, 0)
    }

    pub fn one() -> Self {
        Scalar::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::small(n, 0, 1, 0)
    }

    /// `num/den`, reduced. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::from_i128(num as i128, 0, den as i128, 0)
    }

    pub fn from_rational(a: BigRational) -> Self {
        Scalar::from_parts(a, BigRational::zero(), 0)
    }

    /// `a + b*sqrt(radicand)`; the radicand is reduced to its square-free part.
    pub fn quadratic(a: BigRational, b: BigRational, radicand: u64) -> Result<Self, ScalarError> {
        if radicand == 0 || b.is_zero() {
            return Ok(Scalar::from_rational(a));
        }
        let (square, free) = split_square_factor(radicand)?;
        let b = b * BigRational::from_integer(BigInt::from(square));
        if free == 1 {
            return Ok(Scalar::from_rational(a + b));
        }
        Ok(Scalar::from_parts(a, b, free))
    }

    /// `a + b*sqrt(d)` for a square-free `d` (or `d == 0`).
    fn from_parts(a: BigRational, b: BigRational, d: u64) -> Self {
        let r = a.denom().lcm(b.denom());
        let p = a.numer() * (&r / a.denom());
        let q = b.numer() * (&r / b.denom());
        Scalar::from_big(p, q, r, d)
    }

    fn small(p: i64, q: i64, r: i64, d: u64) -> Self {
        Scalar {
            repr: Repr::Small { p, q, r },
            d,
        }
    }

    /// Normalizes `(p + q*sqrt(d)) / r` with `r != 0`.
    fn from_i128(mut p: i128, mut q: i128, mut r: i128, mut d: u64) -> Self {
        if q == 0 || d == 0 {
            q = 0;
            d = 0;
        }
        if r < 0 {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = gcd3_i128(p, q, r);
        if g > 1 {
            p /= g;
            q /= g;
            r /= g;
        }
        match (i64::try_from(p), i64::try_from(q), i64::try_from(r)) {
            (Ok(p), Ok(q), Ok(r)) => Scalar::small(p, q, r, d),
            _ => Scalar::from_big(p.into(), q.into(), r.into(), d),
        }
    }

    fn from_big(mut p: BigInt, mut q: BigInt, mut r: BigInt, mut d: u64) -> Self {
        if q.is_zero() || d == 0 {
            q = BigInt::zero();
            d = 0;
        }
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        match (p.to_i64(), q.to_i64(), r.to_i64()) {
            (Some(p), Some(q), Some(r)) => Scalar::small(p, q, r, d),
            _ => Scalar {
                repr: Repr::Big(Box::new(BigParts { p, q, r })),
                d,
            },
        }
    }

    fn big_parts(&self) -> (BigInt, BigInt, BigInt) {
        match &self.repr {
            Repr::Small { p, q, r } => (BigInt::from(*p), BigInt::from(*q), BigInt::from(*r)),
            Repr::Big(b) => (b.p.clone(), b.q.clone(), b.r.clone()),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        if self.d == 0 {
            ScalarKind::Rational(self.rational_part())
        } else {
            ScalarKind::Quadratic {
                a: self.rational_part(),
                b: self.irrational_part(),
                d: self.d,
            }
        }
    }

    /// Square-free radicand, or `None` for a rational value.
    pub fn radicand(&self) -> Option<u64> {
        (self.d != 0).then_some(self.d)
    }

    pub fn rational_part(&self) -> BigRational {
        let (p, _, r) = self.big_parts();
        BigRational::new(p, r)
    }

    pub fn irrational_part(&self) -> BigRational {
        let (_, q, r) = self.big_parts();
        BigRational::new(q, r)
    }

    pub fn is_rational(&self) -> bool {
        self.d == 0
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Small { p, .. } => self.d == 0 && *p == 0,
            Repr::Big(_) => false,
        }
    }

    /// Whether `self` and `other` can meet in one arithmetic expression.
    pub fn compatible(&self, other: &Scalar) -> bool {
        self.d == 0 || other.d == 0 || self.d == other.d
    }

    fn common_radicand(&self, other: &Scalar) -> Result<u64, ScalarError> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(ScalarError::FieldMismatch(x, y)),
        }
    }

    /// Exact sign of the real number represented.
    pub fn signum(&self) -> Ordering {
        match &self.repr {
            Repr::Small { p, q, .. } => sign_small(*p as i128, *q as i128, self.d),
            Repr::Big(b) => sign_big(&b.p, &b.q, self.d),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    fn add_sub(&self, other: &Scalar, negate: bool) -> Result<Scalar, ScalarError> {
        let d = self.common_radicand(other)?;
        if let (
            Repr::Small {
                p: p1,
                q: q1,
                r: r1,
            },
            Repr::Small {
                p: p2,
                q: q2,
                r: r2,
            },
        ) = (&self.repr, &other.repr)
        {
            let (p1, q1, r1) = (*p1 as i128, *q1 as i128, *r1 as i128);
            let (mut p2, mut q2, r2) = (*p2 as i128, *q2 as i128, *r2 as i128);
            if negate {
                p2 = -p2;
                q2 = -q2;
            }
            if r1 == r2 {
                return Ok(Scalar::from_i128(p1 + p2, q1 + q2, r1, d));
            }
            return Ok(Scalar::from_i128(
                p1 * r2 + p2 * r1,
                q1 * r2 + q2 * r1,
                r1 * r2,
                d,
            ));
        }
        let (p1, q1, r1) = self.big_parts();
        let (mut p2, mut q2, r2) = other.big_parts();
        if negate {
            p2 = -p2;
            q2 = -q2;
        }
        Ok(Scalar::from_big(
            &p1 * &r2 + &p2 * &r1,
            &q1 * &r2 + &q2 * &r1,
            r1 * r2,
            d,
        ))
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.add_sub(other, false)
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.add_sub(other, true)
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        let d = self.common_radicand(other)?;
        if let (
            Repr::Small {
                p: p1,
                q: q1,
                r: r1,
            },
            Repr::Small {
                p: p2,
                q: q2,
                r: r2,
            },
        ) = (&self.repr, &other.repr)
        {
            let (p1, q1, r1) = (*p1 as i128, *q1 as i128, *r1 as i128);
            let (p2, q2, r2) = (*p2 as i128, *q2 as i128, *r2 as i128);
            let p = (q1 * q2)
                .checked_mul(d as i128)
                .and_then(|x| x.checked_add(p1 * p2));
            let q = (p1 * q2).checked_add(q1 * p2);
            if let (Some(p), Some(q)) = (p, q) {
                return Ok(Scalar::from_i128(p, q, r1 * r2, d));
            }
        }
        let (p1, q1, r1) = self.big_parts();
        let (p2, q2, r2) = other.big_parts();
        Ok(Scalar::from_big(
            &p1 * &p2 + &q1 * &q2 * BigInt::from(d),
            &p1 * &q2 + &q1 * &p2,
            r1 * r2,
            d,
        ))
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let d = self.common_radicand(other)?;
        // 1/y = r (p - q sqrt(d)) / (p^2 - d q^2); the norm is nonzero because sqrt(d) is irrational.
        let (p2, q2, r2) = other.big_parts();
        let norm = &p2 * &p2 - &q2 * &q2 * BigInt::from(d);
        let inverse = Scalar::from_big(&r2 * p2, -(r2 * q2), norm, d);
        self.try_mul(&inverse)
    }

    pub fn try_cmp(&self, other: &Scalar) -> Result<Ordering, ScalarError> {
        let d = self.common_radicand(other)?;
        if let (
            Repr::Small {
                p: p1,
                q: q1,
                r: r1,
            },
            Repr::Small {
                p: p2,
                q: q2,
                r: r2,
            },
        ) = (&self.repr, &other.repr)
        {
            let (p1, q1, r1) = (*p1 as i128, *q1 as i128, *r1 as i128);
            let (p2, q2, r2) = (*p2 as i128, *q2 as i128, *r2 as i128);
            if r1 == r2 {
                return Ok(sign_small(p1 - p2, q1 - q2, d));
            }
            return Ok(sign_small(p1 * r2 - p2 * r1, q1 * r2 - q2 * r1, d));
        }
        let (p1, q1, r1) = self.big_parts();
        let (p2, q2, r2) = other.big_parts();
        Ok(sign_big(
            &(&p1 * &r2 - &p2 * &r1),
            &(&q1 * &r2 - &q2 * &r1),
            d,
        ))
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplies by an integer without changing the field.
    pub fn scale(&self, k: i64) -> Scalar {
        self * Scalar::from_integer(k)
    }

    /// Divides by a nonzero integer.
    pub fn div_int(&self, k: i64) -> Scalar {
        assert!(k != 0, "division by zero");
        match &self.repr {
            Repr::Small { p, q, r } => {
                Scalar::from_i128(*p as i128, *q as i128, *r as i128 * k as i128, self.d)
            }
            Repr::Big(b) => Scalar::from_big(b.p.clone(), b.q.clone(), &b.r * k, self.d),
        }
    }

    /// Nearest-double approximation. Reporting only.
    pub fn to_f64(&self) -> f64 {
        let (p, q, r) = self.big_parts();
        let a = ratio_to_f64(&BigRational::new(p.clone(), r.clone()));
        if self.d == 0 {
            return a;
        }
        let root = (self.d as f64).sqrt();
        let b = ratio_to_f64(&BigRational::new(q.clone(), r.clone()));
        if p.is_zero() || p.is_positive() == q.is_positive() {
            return a + b * root;
        }
        // Opposite signs: evaluate through the conjugate to avoid cancellation.
        let norm = &p * &p - &q * &q * BigInt::from(self.d);
        ratio_to_f64(&BigRational::new(norm, &r * &r)) / (a - b * root)
    }

    /// Largest rational `p/q < self` with `1 <= q <= max_den`.
    pub fn largest_rational_below(&self, max_den: u64) -> Scalar {
        assert!(max_den >= 1);
        // Integer floor by exponential search: lo <= self < lo + 1, but we want
        // strictly below, so work with the bracket (lo, lo + 1].
        let mut lo = BigInt::zero();
        let val = |n: &BigInt| Scalar::from_rational(BigRational::from_integer(n.clone()));
        if val(&lo) >= *self {
            let mut step = BigInt::one();
            while val(&(&lo - &step)) >= *self {
                step *= 2;
            }
            lo -= &step;
        } else {
            let mut step = BigInt::one();
            while val(&(&lo + &step)) < *self {
                lo += &step;
                step *= 2;
            }
        }
        // Narrow to lo < self <= lo + 1 with lo an integer.
        loop {
            if val(&(&lo + 1)) < *self {
                lo += 1;
            } else if val(&lo) >= *self {
                lo -= 1;
            } else {
                break;
            }
        }
        let q_max = BigInt::from(max_den);
        let (mut p0, mut q0) = (lo.clone(), BigInt::one());
        let (mut p1, mut q1) = (lo + 1, BigInt::one());
        let frac =
            |p: &BigInt, q: &BigInt| Scalar::from_rational(BigRational::new(p.clone(), q.clone()));
        loop {
            if &q0 + &q1 > q_max {
                break;
            }
            let mediant = frac(&(&p0 + &p1), &(&q0 + &q1));
            if mediant < *self {
                // move the left end: (p0 + k p1)/(q0 + k q1) < self
                let ok = |k: &BigInt| {
                    &q0 + k * &q1 <= q_max && frac(&(&p0 + k * &p1), &(&q0 + k * &q1)) < *self
                };
                let k = last_true(ok);
                p0 += &k * &p1;
                q0 += &k * &q1;
            } else {
                let ok = |k: &BigInt| {
                    &q1 + k * &q0 <= q_max && frac(&(&p1 + k * &p0), &(&q1 + k * &q0)) >= *self
                };
                let k = last_true(ok);
                p1 += &k * &p0;
                q1 += &k * &q0;
            }
        }
        frac(&p0, &q0)
    }
}

/// Largest `k >= 1` with `pred(k)`, given `pred(1)` holds and `pred` is monotone.
fn last_true(pred: impl Fn(&BigInt) -> bool) -> BigInt {
    let mut good = BigInt::one();
    let mut bad = BigInt::from(2);
    while pred(&bad) {
        good = bad.clone();
        bad *= 2;
    }
    while &bad - &good > BigInt::one() {
        let mid: BigInt = (&good + &bad) / 2;
        if pred(&mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}
/// Sign of `p + q*sqrt(d)`.
fn sign_small(p: i128, q: i128, d: u64) -> Ordering {
    let sp = p.cmp(&0);
    let sq = q.cmp(&0);
    if d == 0 || sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    let p2 = p.unsigned_abs().checked_mul(p.unsigned_abs());
    let q2d = q
        .unsigned_abs()
        .checked_mul(q.unsigned_abs())
        .and_then(|x| x.checked_mul(d as u128));
    match (p2, q2d) {
        (Some(p2), Some(q2d)) => {
            if p2 > q2d {
                sp
            } else {
                sq
            }
        }
        _ => sign_big(&BigInt::from(p), &BigInt::from(q), d),
    }
}

fn sign_big(p: &BigInt, q: &BigInt, d: u64) -> Ordering {
    let sp = p.sign().cmp(&num_bigint::Sign::NoSign);
    let sq = q.sign().cmp(&num_bigint::Sign::NoSign);
    if d == 0 || sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    if p * p > q * q * BigInt::from(d) {
        sp
    } else {
        sq
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
        if n.unsigned_abs() < (1 << 53) && d < (1 << 53) {
            return n as f64 / d as f64;
        }
    }
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Writes `n = s^2 * f` with `f` square-free.
fn split_square_factor(n: u64) -> Result<(u64, u64), ScalarError> {
    if n == 0 {
        return Ok((0, 0));
    }
    let mut rest = n;
    let mut square = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p).saturating_mul(p) <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            square = square.checked_mul(p).ok_or(ScalarError::Overflow)?;
        }
        if e % 2 == 1 {
            free *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // Every prime factor left exceeds cbrt(rest), so rest is 1, a prime,
    // a product of two distinct primes, or the square of a prime.
    let r = rest.isqrt();
    if r > 1 && r * r == rest {
        square = square.checked_mul(r).ok_or(ScalarError::Overflow)?;
    } else {
        free *= rest;
    }
    Ok((square, free))
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order of the real embedding. Panics when the two values live in
/// different quadratic fields; use [`Scalar::try_cmp`] to handle that case.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other)
            .expect("comparison across quadratic fields")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$try(rhs)
                    .expect(concat!("Scalar::", stringify!($method)))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.repr {
            Repr::Small { p, q, r } => {
                Scalar::from_i128(-(*p as i128), -(*q as i128), *r as i128, self.d)
            }
            Repr::Big(b) => Scalar::from_big(-&b.p, -&b.q, b.r.clone(), self.d),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_rational(r)
    }
}

fn write_ratio(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Canonical rendering: `p/q`, `p/q+u/v*sqrt(d)`, `-sqrt(d)`, ...
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.rational_part();
        if self.d == 0 {
            return write_ratio(f, &a);
        }
        let b = self.irrational_part();
        let has_a = !a.is_zero();
        if has_a {
            write_ratio(f, &a)?;
        }
        let b_abs = b.abs();
        if b.is_negative() {
            f.write_str("-")?;
        } else if has_a {
            f.write_str("+")?;
        }
        if !b_abs.is_one() {
            write_ratio(f, &b_abs)?;
            f.write_str("*")?;
        }
        write!(f, "sqrt({})", self.d)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt, ScalarError> {
    if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) {
        return Err(ScalarError::Malformed(whole.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ScalarError::Malformed(whole.to_string()))
}

fn parse_ratio(s: &str, whole: &str) -> Result<BigRational, ScalarError> {
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s, whole)?)),
        Some((n, d)) => {
            let n = parse_int(n, whole)?;
            let d = parse_int(d, whole)?;
            if d.is_zero() {
                return Err(ScalarError::ZeroDenominator);
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Parses one unsigned term: `RAT`, `RAT*sqrt(INT)` or `sqrt(INT)`.
fn parse_term(s: &str, whole: &str) -> Result<Scalar, ScalarError> {
    let (coef, radical) = match s.find("sqrt(") {
        None => return Ok(Scalar::from_rational(parse_ratio(s, whole)?)),
        Some(0) => (BigRational::one(), &s[5..]),
        Some(i) => {
            let head = s[..i]
                .strip_suffix('*')
                .ok_or_else(|| ScalarError::Malformed(whole.to_string()))?;
            (parse_ratio(head, whole)?, &s[i + 5..])
        }
    };
    let inner = radical
        .strip_suffix(')')
        .ok_or_else(|| ScalarError::Malformed(whole.to_string()))?;
    let n = parse_int(inner, whole)?;
    let n = n.to_u64().ok_or(ScalarError::Overflow)?;
    if n == 0 {
        return Ok(Scalar::zero());
    }
    let (square, free) = split_square_factor(n)?;
    let coef = coef * BigRational::from_integer(BigInt::from(square));
    if free == 1 {
        Ok(Scalar::from_rational(coef))
    } else {
        Ok(Scalar::from_parts(BigRational::zero(), coef, free))
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(ScalarError::Malformed(text.to_string()));
        }
        let mut total = Scalar::zero();
        let mut rest = s.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let (negative, body) = match rest.as_bytes()[0] {
                b'-' => (true, &rest[1..]),
                b'+' if !first => (false, &rest[1..]),
                _ if first => (false, rest),
                _ => return Err(ScalarError::Malformed(text.to_string())),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = parse_term(&body[..end], text)?;
            total = total
                .try_add(&if negative { -term } else { term })
                .map_err(|_| ScalarError::Malformed(text.to_string()))?;
            rest = &body[end..];
            first = false;
        }
        Ok(total)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Helper for tests and callers that hold integer pairs.
pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::from_ratio(num, den)
}
