//! Beatty and Sturmian sequences over exact slopes.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::iter::Peekable;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exact::{FloorKernel, QuadExpr};
use crate::{out_of_range, Error, Result};

/// The sequence `b_n = [n·slope]`, `n ≥ 1`.
///
/// Terms are evaluated on demand. [`BeattySeq::with_cache`] materializes a
/// bounded prefix up front; nothing is cached beyond that bound.
#[derive(Clone, Debug)]
pub struct BeattySeq {
    kernel: FloorKernel,
    cache: Vec<u64>,
}

impl BeattySeq {
    /// A Beatty sequence with positive irrational slope.
    pub fn new(slope: QuadExpr) -> Result<Self> {
        if !slope.is_irrational() {
            return Err(Error::NotIrrational(slope));
        }
        Self::oracle_rational(slope)
    }

    /// Like [`BeattySeq::new`] but also accepts rational slopes. Only meant
    /// for oracles and degenerate tests: rational slopes never give
    /// complementary pairs.
    pub fn oracle_rational(slope: QuadExpr) -> Result<Self> {
        if slope.signum() != Ordering::Greater {
            return out_of_range(&slope, "slope > 0");
        }
        Ok(BeattySeq {
            kernel: FloorKernel::new(&slope),
            cache: Vec::new(),
        })
    }

    pub fn with_cache(slope: QuadExpr, cache_len: usize) -> Result<Self> {
        let mut seq = Self::new(slope)?;
        seq.cache = seq.prefix(cache_len);
        Ok(seq)
    }

    pub fn slope(&self) -> &QuadExpr {
        self.kernel.expr()
    }

    /// `[n·slope]`.
    ///
    /// # Panics
    ///
    /// Panics if `n == 0` or the term does not fit in a `u64`.
    pub fn term(&self, n: u64) -> u64 {
        assert!(n >= 1, "Beatty sequences are indexed from 1");
        if let Some(&t) = self.cache.get((n - 1) as usize) {
            return t;
        }
        u64::try_from(self.kernel.floor_at(n)).expect("Beatty term exceeds u64")
    }

    /// The first `len` terms.
    pub fn prefix(&self, len: usize) -> Vec<u64> {
        self.iter().take(len).collect()
    }

    /// All terms `≤ bound`, in order. Requires a slope ≥ 1 to terminate
    /// quickly; slopes below 1 repeat values and are handled as well.
    pub fn terms_up_to(&self, bound: u64) -> Vec<u64> {
        self.iter().take_while(|&t| t <= bound).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (1u64..).map(move |n| self.term(n))
    }
}

/// Exact `[n·slope]` for positive slopes.
pub fn beatty_term(slope: &QuadExpr, n: u64) -> Result<u64> {
    if slope.signum() != Ordering::Greater {
        return Err(Error::SlopeOutOfRange {
            slope: slope.clone(),
            expected: "slope > 0",
        });
    }
    let v = crate::exact::floor_mul(slope, n)?;
    v.to_u64().ok_or(Error::Exact(crate::ExactError::Overflow))
}

/// The slope `β = α/(α − 1)` complementary to `α > 1`.
pub fn complement_slope(alpha: &QuadExpr) -> Result<QuadExpr> {
    if !alpha.is_irrational() {
        return Err(Error::NotIrrational(alpha.clone()));
    }
    if alpha.cmp_rational(1, 1) != Ordering::Greater {
        return out_of_range(alpha, "slope > 1");
    }
    Ok(alpha.checked_div(&alpha.shift(-1))?)
}

/// Two irrational slopes with `1/α + 1/β = 1`, oriented so `1 < α < 2 < β`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementaryPair {
    alpha: QuadExpr,
    beta: QuadExpr,
}

impl ComplementaryPair {
    /// The pair generated by a single irrational slope `x > 1`, together with
    /// a flag telling whether `x` was the larger member (and hence became β).
    pub fn from_slope(x: &QuadExpr) -> Result<(Self, bool)> {
        let y = complement_slope(x)?;
        let pair = orient_pair(x, &y)?;
        let swapped = pair.alpha != *x;
        Ok((pair, swapped))
    }

    /// A pair without the complementarity check. Only for negative controls:
    /// every identity downstream is expected to fail on such a pair.
    pub fn unchecked(alpha: QuadExpr, beta: QuadExpr) -> Self {
        ComplementaryPair { alpha, beta }
    }

    pub fn alpha(&self) -> &QuadExpr {
        &self.alpha
    }

    pub fn beta(&self) -> &QuadExpr {
        &self.beta
    }

    pub fn lower(&self) -> Result<BeattySeq> {
        BeattySeq::new(self.alpha.clone())
    }

    pub fn upper(&self) -> Result<BeattySeq> {
        BeattySeq::new(self.beta.clone())
    }
}

/// Orders two complementary slopes into a [`ComplementaryPair`].
pub fn orient_pair(x: &QuadExpr, y: &QuadExpr) -> Result<ComplementaryPair> {
    for s in [x, y] {
        if !s.is_irrational() {
            return Err(Error::NotIrrational(s.clone()));
        }
        if s.signum() != Ordering::Greater {
            return Err(Error::NotComplementary(Box::new((x.clone(), y.clone()))));
        }
    }
    let sum = x.recip()?.checked_add(&y.recip()?)?;
    if sum != QuadExpr::integer(1) {
        return Err(Error::NotComplementary(Box::new((x.clone(), y.clone()))));
    }
    let (alpha, beta) = match x.compare(y)? {
        Ordering::Less => (x.clone(), y.clone()),
        _ => (y.clone(), x.clone()),
    };
    if alpha.cmp_rational(2, 1) != Ordering::Less || alpha.cmp_rational(1, 1) != Ordering::Greater {
        return Err(Error::InvariantViolation(format!(
            "smaller complementary slope {alpha} outside (1, 2)"
        )));
    }
    Ok(ComplementaryPair { alpha, beta })
}

/// True iff the terms `≤ m` of `a` and `b` are disjoint and cover `1..=m`.
pub fn is_complementary_prefix(a: &BeattySeq, b: &BeattySeq, m: u64) -> bool {
    let mut seen = vec![false; m as usize + 1];
    for seq in [a, b] {
        for t in seq.terms_up_to(m) {
            if t == 0 || seen[t as usize] {
                return false;
            }
            seen[t as usize] = true;
        }
    }
    seen[1..].iter().all(|&s| s)
}

fn unit_interval(alpha: &QuadExpr) -> Result<()> {
    if !alpha.is_irrational() {
        return Err(Error::NotIrrational(alpha.clone()));
    }
    if alpha.signum() != Ordering::Greater || alpha.cmp_rational(1, 1) != Ordering::Less {
        return out_of_range(alpha, "0 < slope < 1");
    }
    Ok(())
}

/// The Sturmian characteristic word `f_α(n) = [α(n+1)] − [αn]` for `0 < α < 1`.
pub fn sturmian_char(alpha: &QuadExpr, n: u64) -> Result<u8> {
    unit_interval(alpha)?;
    let k = FloorKernel::new(alpha);
    Ok(sturmian_at(&k, n))
}

fn sturmian_at(kernel: &FloorKernel, n: u64) -> u8 {
    let v = kernel.floor_at(n + 1) - kernel.floor_at(n);
    debug_assert!(v == 0 || v == 1);
    v as u8
}

/// Indicator of the Beatty sequence of `β > 1`, evaluated as `f_{1/β}(n)`.
pub fn indicator(beta: &QuadExpr, n: u64) -> Result<u8> {
    if !beta.is_irrational() {
        return Err(Error::NotIrrational(beta.clone()));
    }
    if beta.cmp_rational(1, 1) != Ordering::Greater {
        return out_of_range(beta, "slope > 1");
    }
    sturmian_char(&beta.recip()?, n)
}

/// `Σ_{n=1}^{m} f_α(n)`, cross-checked against the telescoped `[α(m+1)]`.
pub fn char_prefix_sum(alpha: &QuadExpr, m: u64) -> Result<u64> {
    unit_interval(alpha)?;
    let kernel = FloorKernel::new(alpha);
    let sum: u64 = (1..=m).map(|n| sturmian_at(&kernel, n) as u64).sum();
    let telescoped = kernel.floor_at(m + 1);
    if sum as i128 != telescoped {
        return Err(Error::InvariantViolation(format!(
            "prefix sum {sum} of f_{alpha} disagrees with [{alpha}·{}] = {telescoped}",
            m + 1
        )));
    }
    Ok(sum)
}

/// The band index `k` with `1/(k+1) < α < 1/k`, for `0 < α < 1`.
pub fn band(alpha: &QuadExpr) -> Result<u64> {
    unit_interval(alpha)?;
    let k = alpha
        .recip()?
        .floor()
        .to_u64()
        .ok_or(Error::Exact(crate::ExactError::Overflow))?;
    let k_i = i64::try_from(k).map_err(|_| Error::Exact(crate::ExactError::Overflow))?;
    if alpha.cmp_rational(1, k_i + 1) != Ordering::Greater || alpha.cmp_rational(1, k_i) != Ordering::Less {
        return Err(Error::InvariantViolation(format!(
            "band check failed for {alpha}, k = {k}"
        )));
    }
    Ok(k)
}

/// Multiplicities of the values of `[nα]`, `n ≤ N`, for `0 < α < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepetitionProfile {
    pub k: u64,
    /// Interior values repeating `k + 1` times.
    pub heavy: Vec<u64>,
    /// Interior values repeating `k` times.
    pub light: Vec<u64>,
    pub counts: BTreeMap<u64, u64>,
}

/// Counts how often each value of `[nα]` occurs for `n ≤ N`.
///
/// The largest value may be cut off by the window and is left out of the
/// heavy/light split. Any interior multiplicity other than `k` or `k + 1` is
/// reported as an invariant violation.
pub fn repetition_profile(alpha: &QuadExpr, n: u64) -> Result<RepetitionProfile> {
    let k = band(alpha)?;
    let kernel = FloorKernel::new(alpha);
    let mut counts = BTreeMap::new();
    for i in 1..=n {
        *counts.entry(kernel.floor_at(i) as u64).or_insert(0u64) += 1;
    }
    let last = counts.keys().next_back().copied();
    let mut heavy = Vec::new();
    let mut light = Vec::new();
    for (&value, &mult) in &counts {
        if Some(value) == last {
            continue;
        }
        if mult == k + 1 {
            heavy.push(value);
        } else if mult == k {
            light.push(value);
        } else {
            return Err(Error::InvariantViolation(format!(
                "value {value} of [n·{alpha}] repeats {mult} times, expected {k} or {}",
                k + 1
            )));
        }
    }
    Ok(RepetitionProfile {
        k,
        heavy,
        light,
        counts,
    })
}

/// One continued-fraction peeling step `α ↦ −1 + 1/(1 − α)` for `0 < α < 1`.
pub fn peel(alpha: &QuadExpr) -> Result<QuadExpr> {
    unit_interval(alpha)?;
    let one = QuadExpr::integer(1);
    Ok(one.checked_sub(alpha)?.recip()?.shift(-1))
}

/// Slopes of the values repeated `k + 1` times (heavy) and `k` times (light,
/// positive values only) in `[nα]`, `0 < α < 1`.
///
/// The heavy slope is `k` peeling steps applied to `α`; the light slope is its
/// complement.
pub fn heavy_light_slopes(alpha: &QuadExpr) -> Result<(QuadExpr, QuadExpr)> {
    let k = band(alpha)?;
    let mut heavy = alpha.clone();
    for _ in 0..k {
        heavy = peel(&heavy)?;
    }
    let light = complement_slope(&heavy)?;
    Ok((heavy, light))
}

/// Merge-with-repetition of two nondecreasing sequences, truncated to `n` terms.
pub fn sortjoin<I, J>(x: I, y: J, n: usize) -> Vec<u64>
where
    I: IntoIterator<Item = u64>,
    J: IntoIterator<Item = u64>,
{
    SortJoin {
        left: x.into_iter().peekable(),
        right: y.into_iter().peekable(),
    }
    .take(n)
    .collect()
}

/// `Z₀^k`: every non-negative integer repeated `k` times. Empty for `k = 0`.
pub fn naturals_power(k: u64) -> impl Iterator<Item = u64> {
    let limit = if k == 0 { 0 } else { u64::MAX };
    (0..limit).flat_map(move |v| std::iter::repeat_n(v, k as usize))
}

/// Lazy sortjoin of two nondecreasing iterators.
pub struct SortJoin<I: Iterator<Item = u64>, J: Iterator<Item = u64>> {
    left: Peekable<I>,
    right: Peekable<J>,
}

impl<I: Iterator<Item = u64>, J: Iterator<Item = u64>> SortJoin<I, J> {
    pub fn new(left: I, right: J) -> Self {
        SortJoin {
            left: left.peekable(),
            right: right.peekable(),
        }
    }
}

impl<I: Iterator<Item = u64>, J: Iterator<Item = u64>> Iterator for SortJoin<I, J> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        match (self.left.peek(), self.right.peek()) {
            (Some(a), Some(b)) if a <= b => self.left.next(),
            (Some(_), Some(_)) => self.right.next(),
            (Some(_), None) => self.left.next(),
            (None, _) => self.right.next(),
        }
    }
}

/// JSON dump of a sequence prefix.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SequenceDump {
    pub slope: QuadExpr,
    pub terms: Vec<u64>,
}

/// CSV dump with header `n,term`.
pub fn sequence_csv(terms: &[u64]) -> String {
    let mut out = String::from("n,term\n");
    for (i, t) in terms.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, t));
    }
    out
}
