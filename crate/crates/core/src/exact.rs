//! Exact arithmetic in a real quadratic field `Q(√d)`.
//!
//! Every slope handled by this crate is a [`QuadExpr`], a number of the form
//! `(p + q·√d) / r` with arbitrary precision integer coefficients. The floor
//! operator `[n·x]` is evaluated with integer square roots only, so no term of
//! any sequence is ever subject to rounding.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Trial division bound used when extracting square factors from a radicand.
const SQUARE_FACTOR_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("negative radicand {0}")]
    NegativeRadicand(BigInt),
    #[error("radicand {0} does not fit in 64 bits")]
    RadicandTooLarge(BigInt),
    #[error("radicand mismatch: sqrt({0}) and sqrt({1})")]
    RadicandMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("multiplier n must be positive")]
    NonPositiveN,
    #[error("floor_mul needs a positive operand, got {0}")]
    NonPositiveOperand(QuadExpr),
    #[error("result does not fit the requested integer width")]
    Overflow,
    #[error("cannot parse slope expression {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, ExactError>;

/// An element `(p + q·√d) / r` of `Q(√d)` in canonical form.
///
/// Canonical form means `r > 0`, `gcd(p, q, r) = 1`, `d` square-free, and
/// `q = 0` exactly when `d = 0`. A perfect-square radicand is folded into the
/// rational part at construction, so [`QuadExpr::is_irrational`] reduces to
/// `q ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExpr {
    p: BigInt,
    q: BigInt,
    d: u64,
    r: BigInt,
}

impl QuadExpr {
    /// Builds `(p + q·√d) / r` and brings it into canonical form.
    pub fn make(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        d: impl Into<BigInt>,
        r: impl Into<BigInt>,
    ) -> Result<Self> {
        let r = r.into();
        if r.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        let d = d.into();
        if d.is_negative() {
            return Err(ExactError::NegativeRadicand(d));
        }
        let d = d.to_u64().ok_or(ExactError::RadicandTooLarge(d.clone()))?;
        Ok(Self::normalized(p.into(), q.into(), d, r))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::normalized(n.into(), BigInt::zero(), 0, BigInt::one())
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        Self::make(num, 0, 0, den)
    }

    /// `√d`.
    pub fn sqrt(d: u64) -> Self {
        Self::normalized(BigInt::zero(), BigInt::one(), d, BigInt::one())
    }

    /// The golden ratio `(1 + √5) / 2`.
    pub fn phi() -> Self {
        Self::normalized(BigInt::one(), BigInt::one(), 5, BigInt::from(2))
    }

    fn normalized(mut p: BigInt, mut q: BigInt, mut d: u64, mut r: BigInt) -> Self {
        if d == 0 || q.is_zero() {
            q = BigInt::zero();
            d = 0;
        } else {
            let (outer, inner) = split_square_factor(d);
            q *= outer;
            d = inner;
            if d == 1 {
                p += &q;
                q = BigInt::zero();
                d = 0;
            }
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
        QuadExpr { p, q, d, r }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn is_irrational(&self) -> bool {
        !self.q.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// Sign of the represented real number.
    pub fn signum(&self) -> Ordering {
        sign_of_surd(&self.p, &self.q, self.d)
    }

    fn common_radicand(&self, other: &Self) -> Result<u64> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (a, b) if a == b => Ok(a),
            (a, b) => Err(ExactError::RadicandMismatch(a, b)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        Ok(Self::normalized(
            &self.p * &other.r + &other.p * &self.r,
            &self.q * &other.r + &other.q * &self.r,
            d,
            &self.r * &other.r,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        let dd = BigInt::from(d);
        Ok(Self::normalized(
            &self.p * &other.p + &self.q * &other.q * dd,
            &self.p * &other.q + &self.q * &other.p,
            d,
            &self.r * &other.r,
        ))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        if other.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        // x / y = x · conj(y) · r_y / N(y·r_y), with N(a + b√d) = a² − b²d ≠ 0.
        let dd = BigInt::from(d);
        let norm = &other.p * &other.p - &other.q * &other.q * &dd;
        let cp = &other.p * &other.r;
        let cq = -(&other.q * &other.r);
        Ok(Self::normalized(
            &self.p * &cp + &self.q * &cq * &dd,
            &self.p * &cq + &self.q * &cp,
            d,
            &self.r * norm,
        ))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::integer(1).checked_div(self)
    }

    pub fn neg(&self) -> Self {
        QuadExpr {
            p: -&self.p,
            q: -&self.q,
            d: self.d,
            r: self.r.clone(),
        }
    }

    /// Multiplies by an integer. Never changes the radicand.
    pub fn scale(&self, n: impl Into<BigInt>) -> Self {
        let n = n.into();
        Self::normalized(&self.p * &n, &self.q * &n, self.d, self.r.clone())
    }

    /// Adds an integer.
    pub fn shift(&self, n: impl Into<BigInt>) -> Self {
        let n = n.into();
        Self::normalized(&self.p + n * &self.r, self.q.clone(), self.d, self.r.clone())
    }

    /// Exact total order on values. Decided by integer sign analysis.
    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        self.common_radicand(other)?;
        Ok(self.checked_sub(other)?.signum())
    }

    /// Compares against the rational `num/den` (`den > 0`). Never fails.
    pub fn cmp_rational(&self, num: i64, den: i64) -> Ordering {
        assert!(den > 0, "denominator must be positive");
        // (p + q√d)/r  vs  num/den  <=>  den·p − num·r + den·q√d  vs  0
        let den = BigInt::from(den);
        sign_of_surd(
            &(&den * &self.p - BigInt::from(num) * &self.r),
            &(&den * &self.q),
            self.d,
        )
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        floor_parts(&self.p, &self.q, self.d, &self.r)
    }

    /// Conservative `f64` approximation, for display only.
    pub fn approx(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        (p + q * (self.d as f64).sqrt()) / r
    }
}

/// Returns `(s, m)` with `d = s²·m` and `m` free of square factors below the
/// trial-division limit (a leftover perfect square is folded as well).
fn split_square_factor(d: u64) -> (u64, u64) {
    let mut outer = 1u64;
    let mut rest = d;
    let mut i = 2u64;
    while i <= SQUARE_FACTOR_LIMIT && i * i <= rest {
        let sq = i * i;
        while rest.is_multiple_of(sq) {
            rest /= sq;
            outer *= i;
        }
        i += 1;
    }
    let s = rest.sqrt();
    if s * s == rest {
        outer *= s;
        rest = 1;
    }
    (outer, rest)
}

fn sign_of_surd(p: &BigInt, q: &BigInt, d: u64) -> Ordering {
    if q.is_zero() || d == 0 {
        return p.sign().cmp(&Sign::NoSign);
    }
    let sp = p.sign();
    let sq = q.sign();
    if sp != Sign::Minus && sq == Sign::Plus {
        return Ordering::Greater;
    }
    if sp != Sign::Plus && sq == Sign::Minus {
        return Ordering::Less;
    }
    // opposite signs: compare p² with q²d
    let p2 = p * p;
    let q2d = q * q * BigInt::from(d);
    let mag = p2.cmp(&q2d);
    if sp == Sign::Plus {
        mag
    } else {
        mag.reverse()
    }
}

fn floor_parts(p: &BigInt, q: &BigInt, d: u64, r: &BigInt) -> BigInt {
    if q.is_zero() {
        return p.div_floor(r);
    }
    let s = isqrt(&(q * q * BigInt::from(d)));
    if q.is_positive() {
        (p + s).div_floor(r)
    } else {
        (p - s - 1u32).div_floor(r)
    }
}

/// Largest `s` with `s² ≤ n`.
///
/// # Panics
///
/// Panics if `n` is negative.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative number");
    n.sqrt()
}

/// Exact `[n·x]` for `x > 0` and `n ≥ 1`.
pub fn floor_mul(x: &QuadExpr, n: impl Into<BigInt>) -> Result<BigInt> {
    let n = n.into();
    if !n.is_positive() {
        return Err(ExactError::NonPositiveN);
    }
    if x.signum() != Ordering::Greater {
        return Err(ExactError::NonPositiveOperand(x.clone()));
    }
    Ok(floor_parts(&(&n * &x.p), &(&n * &x.q), x.d, &x.r))
}

/// A slope prepared for repeated evaluation of `[n·x]`.
///
/// Uses 128-bit integer arithmetic whenever the coefficients allow it and falls
/// back to arbitrary precision otherwise. Both paths are exact.
#[derive(Clone, Debug)]
pub struct FloorKernel {
    expr: QuadExpr,
    small: Option<SmallKernel>,
}

#[derive(Clone, Copy, Debug)]
struct SmallKernel {
    p: i128,
    q_neg: bool,
    q2d: u128,
    r: i128,
}

impl FloorKernel {
    pub fn new(expr: &QuadExpr) -> Self {
        let small = (|| {
            let p = expr.p.to_i128()?;
            let q = expr.q.to_i128()?;
            let r = expr.r.to_i128()?;
            let qa = q.unsigned_abs();
            let q2d = qa.checked_mul(qa)?.checked_mul(expr.d as u128)?;
            Some(SmallKernel {
                p,
                q_neg: q < 0,
                q2d,
                r,
            })
        })();
        FloorKernel {
            expr: expr.clone(),
            small,
        }
    }

    pub fn expr(&self) -> &QuadExpr {
        &self.expr
    }

    /// `[n·x]` for any `n` (no sign preconditions).
    pub fn floor_at(&self, n: u64) -> i128 {
        if let Some(v) = self.small.and_then(|k| k.floor_at(n)) {
            return v;
        }
        let n = BigInt::from(n);
        floor_parts(&(&n * &self.expr.p), &(&n * &self.expr.q), self.expr.d, &self.expr.r)
            .to_i128()
            .expect("floor value exceeds 128 bits")
    }
}

impl SmallKernel {
    fn floor_at(self, n: u64) -> Option<i128> {
        let n = n as i128;
        let x = n.checked_mul(self.p)?;
        if self.q2d == 0 {
            return Some(Integer::div_floor(&x, &self.r));
        }
        let nn = (n as u128).checked_mul(n as u128)?;
        let s = i128::try_from(nn.checked_mul(self.q2d)?.sqrt()).ok()?;
        let num = if self.q_neg {
            x.checked_sub(s)?.checked_sub(1)?
        } else {
            x.checked_add(s)?
        };
        Some(Integer::div_floor(&num, &self.r))
    }
}

impl fmt::Display for QuadExpr {
    /// Renders in the slope grammar: `(p+q*sqrt(d))/r`, `p/r` or `p`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_irrational() {
            let op = if self.q.is_negative() { '-' } else { '+' };
            write!(f, "({}{}{}*sqrt({}))/{}", self.p, op, self.q.abs(), self.d, self.r)
        } else if self.r.is_one() {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.r)
        }
    }
}

impl FromStr for QuadExpr {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}

/// Parses the slope grammar
///
/// ```text
/// expr := "(" INT (("+"|"-") INT "*sqrt(" INT ")")? ")/" INT
///       | "sqrt(" INT ")" | "phi" | INT "/" INT | INT
/// ```
///
/// Whitespace is ignored.
pub fn parse_expr(input: &str) -> Result<QuadExpr> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let mut cur = Cursor {
        s: compact.as_bytes(),
        pos: 0,
    };
    let fail = |reason: &str| ExactError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let value = if cur.eat("phi") {
        QuadExpr::phi()
    } else if cur.eat("sqrt(") {
        let d = cur.int().ok_or_else(|| fail("expected radicand"))?;
        if !cur.eat(")") {
            return Err(fail("expected ')'"));
        }
        QuadExpr::make(0, 1, d, 1)?
    } else if cur.eat("(") {
        let p = cur.int().ok_or_else(|| fail("expected integer"))?;
        let (q, d) = if cur.peek() == Some(b'+') || cur.peek() == Some(b'-') {
            let negative = cur.peek() == Some(b'-');
            cur.pos += 1;
            let q = cur.uint().ok_or_else(|| fail("expected radical coefficient"))?;
            if !cur.eat("*sqrt(") {
                return Err(fail("expected '*sqrt('"));
            }
            let d = cur.int().ok_or_else(|| fail("expected radicand"))?;
            if !cur.eat(")") {
                return Err(fail("expected ')' after radicand"));
            }
            (if negative { -q } else { q }, d)
        } else {
            (BigInt::zero(), BigInt::zero())
        };
        if !cur.eat(")/") {
            return Err(fail("expected ')/'"));
        }
        let r = cur.int().ok_or_else(|| fail("expected denominator"))?;
        QuadExpr::make(p, q, d, r)?
    } else {
        let num = cur.int().ok_or_else(|| fail("unrecognized expression"))?;
        if cur.eat("/") {
            let den = cur.int().ok_or_else(|| fail("expected denominator"))?;
            QuadExpr::rational(num, den)?
        } else {
            QuadExpr::integer(num)
        }
    };
    if cur.pos != cur.s.len() {
        return Err(fail("trailing input"));
    }
    Ok(value)
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn int(&mut self) -> Option<BigInt> {
        let negative = self.eat("-");
        let v = self.uint()?;
        Some(if negative { -v } else { v })
    }
}

fn json_int<S: SerializeStruct>(st: &mut S, key: &'static str, v: &BigInt) -> std::result::Result<(), S::Error> {
    match v.to_i64() {
        Some(small) => st.serialize_field(key, &small),
        None => st.serialize_field(key, &v.to_string()),
    }
}

impl Serialize for QuadExpr {
    /// `{"p":…, "q":…, "d":…, "r":…}`; coefficients beyond 64 bits are emitted
    /// as decimal strings.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("QuadExpr", 4)?;
        json_int(&mut st, "p", &self.p)?;
        json_int(&mut st, "q", &self.q)?;
        st.serialize_field("d", &self.d)?;
        json_int(&mut st, "r", &self.r)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Int(i64),
    Text(String),
}

impl JsonInt {
    fn into_bigint<E: de::Error>(self) -> std::result::Result<BigInt, E> {
        match self {
            JsonInt::Int(v) => Ok(BigInt::from(v)),
            JsonInt::Text(s) => s.parse().map_err(E::custom),
        }
    }
}

impl<'de> Deserialize<'de> for QuadExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: JsonInt,
            q: JsonInt,
            d: u64,
            r: JsonInt,
        }
        let raw = Raw::deserialize(deserializer)?;
        QuadExpr::make(
            raw.p.into_bigint::<D::Error>()?,
            raw.q.into_bigint::<D::Error>()?,
            raw.d,
            raw.r.into_bigint::<D::Error>()?,
        )
        .map_err(de::Error::custom)
    }
}
