//! The MEX algorithm and MES, its generalization with skipping.
//!
//! Both algorithms build two complementary sequences `A` and `B` one step at a
//! time. Step `n` assigns `a_n = mex(A_{n−1} ∪ B_{n−1})`; MEX then places
//! `b_n = a_n + h_n`, while MES places `b_n = mex_{c_n}(A_n ∪ B_{n−1})`, the
//! `(c_n + 1)`-st free positive integer.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::sequences::{naturals_power, BeattySeq, ComplementaryPair, SortJoin};
use crate::{Error, Result};

/// `mex(S)`: the least positive integer not in `S`.
pub fn mex<'a>(set: impl IntoIterator<Item = &'a u64>) -> u64 {
    mex_k(set, 0)
}

/// `mex_k(S)`: the `(k+1)`-st least positive integer not in `S`.
pub fn mex_k<'a>(set: impl IntoIterator<Item = &'a u64>, k: u64) -> u64 {
    let set: BTreeSet<u64> = set.into_iter().copied().filter(|&v| v > 0).collect();
    let mut skipped = 0;
    let mut candidate = 1;
    for &v in &set {
        // free integers in [candidate, v)
        let free = v - candidate;
        if skipped + free > k {
            return candidate + (k - skipped);
        }
        skipped += free;
        candidate = v + 1;
    }
    candidate + (k - skipped)
}

/// Occupied positive integers, tracked as the list of free integers below the
/// highest occupied value.
///
/// `mex` and `mex_k` read directly from that list, so a whole run moves each
/// integer into and out of it at most once.
#[derive(Clone, Debug, Default)]
pub struct ExclusionState {
    gaps: VecDeque<u64>,
    high: u64,
    touched: u64,
}

impl ExclusionState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Least free positive integer. Never decreases.
    pub fn frontier(&self) -> u64 {
        self.gaps.front().copied().unwrap_or(self.high + 1)
    }

    pub fn mex(&self) -> u64 {
        self.frontier()
    }

    pub fn mex_k(&self, k: u64) -> u64 {
        match usize::try_from(k) {
            Ok(i) if i < self.gaps.len() => self.gaps[i],
            _ => self.high + 1 + (k - self.gaps.len() as u64),
        }
    }

    pub fn is_occupied(&self, x: u64) -> bool {
        x >= 1 && x <= self.high && self.gaps.binary_search(&x).is_err()
    }

    /// Number of free positive integers strictly below `x`.
    pub fn free_below(&self, x: u64) -> u64 {
        let listed = self.gaps.partition_point(|&g| g < x) as u64;
        listed + x.saturating_sub(self.high + 1)
    }

    /// Marks `x` as occupied. Returns `false` if it already was.
    pub fn mark(&mut self, x: u64) -> bool {
        assert!(x >= 1, "only positive integers are tracked");
        if x > self.high {
            self.gaps.extend(self.high + 1..x);
            self.touched += x - self.high;
            self.high = x;
            return true;
        }
        match self.gaps.binary_search(&x) {
            Ok(i) => {
                self.touched += 1 + i.min(self.gaps.len() - i) as u64;
                self.gaps.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    /// Work counter: integers pushed to or removed from the free list,
    /// including element shifts for removals from its middle.
    pub fn touched(&self) -> u64 {
        self.touched
    }
}

/// The gap rule `h_n` consumed by the MEX algorithm.
#[derive(Clone)]
pub enum GapSequence {
    /// `h_n = t·n`.
    Linear(i64),
    /// `h_n` read from a list, `n` starting at 1.
    Explicit(Vec<i64>),
    Callback(Arc<dyn Fn(u64) -> i64 + Send + Sync>),
}

impl GapSequence {
    fn get(&self, n: usize) -> Result<i64> {
        match self {
            GapSequence::Linear(t) => Ok(t.saturating_mul(n as i64)),
            GapSequence::Explicit(v) => v.get(n - 1).copied().ok_or(Error::SequenceTooShort {
                needed: n,
                available: v.len(),
            }),
            GapSequence::Callback(f) => Ok(f(n as u64)),
        }
    }
}

impl fmt::Debug for GapSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapSequence::Linear(t) => write!(f, "Linear({t})"),
            GapSequence::Explicit(v) => f.debug_tuple("Explicit").field(v).finish(),
            GapSequence::Callback(_) => f.write_str("Callback(..)"),
        }
    }
}

/// Aligned columns of an MEX or MES run; row `i` holds `a_{i+1}, b_{i+1}, …`.
///
/// `c_n` is the number of free integers skipped between `a_n` and `b_n` and
/// `r_n` the number of earlier `B` values lying between them, so
/// `b_n − a_n = c_n + r_n + 1` holds on every row.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MesRun {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
    pub r: Vec<u64>,
}

/// One row of a run dump.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunRow {
    pub n: usize,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub r: u64,
}

impl MesRun {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = RunRow> + '_ {
        (0..self.len()).map(move |i| RunRow {
            n: i + 1,
            a: self.a[i],
            b: self.b[i],
            c: self.c[i],
            r: self.r[i],
        })
    }

    /// First row violating `b_n − a_n = c_n + r_n + 1`, if any.
    pub fn decomposition_violation(&self) -> Option<RunRow> {
        self.rows()
            .find(|row| row.b < row.a || row.b - row.a != row.c + row.r + 1)
    }

    /// Whether both `A` and `B` are strictly increasing. `A` always is; `B`
    /// is exactly when `c_{n+1} ≥ c_n − 1` throughout.
    pub fn is_monotone(&self) -> bool {
        self.a.windows(2).all(|w| w[0] < w[1]) && self.b.windows(2).all(|w| w[0] < w[1])
    }

    /// CSV with header `n,a,b,c,r`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,a,b,c,r\n");
        for row in self.rows() {
            out.push_str(&format!("{},{},{},{},{}\n", row.n, row.a, row.b, row.c, row.r));
        }
        out
    }
}

fn record_row(run: &mut MesRun, state: &ExclusionState, a: u64, b: u64) {
    // all values in (a, b) are either free (skipped) or earlier b's
    let skipped = state.free_below(b) - state.free_below(a + 1);
    run.a.push(a);
    run.b.push(b);
    run.c.push(skipped);
    run.r.push(b - a - 1 - skipped);
}

/// The MEX algorithm: `a_n = mex(A_{n−1} ∪ B_{n−1})`, `b_n = a_n + h_n`.
///
/// The `C` column holds the skip counts MES would need to reproduce the run.
pub fn run_mex(gaps: &GapSequence, n: usize) -> Result<MesRun> {
    let mut state = ExclusionState::new();
    let mut run = MesRun::default();
    for step in 1..=n {
        let a = state.mex();
        state.mark(a);
        let h = gaps.get(step)?;
        if h < 1 {
            return Err(Error::GapTooSmall { n: step, h });
        }
        let b = a + h as u64;
        if state.is_occupied(b) {
            return Err(Error::Collision { n: step, value: b });
        }
        record_row(&mut run, &state, a, b);
        state.mark(b);
    }
    Ok(run)
}

/// The MES algorithm driven by the skipping sequence `skips` (`c_1, c_2, …`).
pub fn run_mes(skips: &[i64], n: usize) -> Result<MesRun> {
    run_mes_counted(skips, n).map(|(run, _)| run)
}

fn mes_step(state: &mut ExclusionState, run: &mut MesRun, c: u64) {
    let a = state.mex();
    state.mark(a);
    let b = state.mex_k(c);
    record_row(run, state, a, b);
    state.mark(b);
}

/// MES run together with the work counter of its exclusion state.
pub fn run_mes_counted(skips: &[i64], n: usize) -> Result<(MesRun, u64)> {
    if skips.len() < n {
        return Err(Error::SequenceTooShort {
            needed: n,
            available: skips.len(),
        });
    }
    let mut state = ExclusionState::new();
    let mut run = MesRun::default();
    for (i, &c) in skips[..n].iter().enumerate() {
        if c < 0 {
            return Err(Error::NegativeSkip { n: i + 1, value: c });
        }
        mes_step(&mut state, &mut run, c as u64);
    }
    Ok((run, state.touched()))
}

/// State of an MES run whose skipping sequence is generated from its own
/// output: every non-negative value `v` enters `C` `k` times when `v ∈ A` and
/// `k − 1` times otherwise (`0` counts as not in `A`).
///
/// With `k = 2` this is the golden rule; `C` is extended as soon as the
/// membership of the next value is settled, i.e. up to `frontier − 1`.
#[derive(Clone, Debug)]
pub struct SelfGeneratingRun {
    k: u64,
    state: ExclusionState,
    run: MesRun,
    skips: Vec<u64>,
    settled: u64,
    in_a: Vec<bool>,
}

impl SelfGeneratingRun {
    pub fn new(k: u64) -> Self {
        assert!(k >= 1, "multiplicity k must be at least 1");
        let mut s = SelfGeneratingRun {
            k,
            state: ExclusionState::new(),
            run: MesRun::default(),
            skips: Vec::new(),
            settled: 0,
            in_a: vec![false],
        };
        s.push_value(0);
        s
    }

    fn push_value(&mut self, v: u64) {
        let times = if self.in_a.get(v as usize).copied().unwrap_or(false) {
            self.k
        } else {
            self.k - 1
        };
        self.skips.extend(std::iter::repeat_n(v, times as usize));
    }

    fn settle(&mut self) {
        let frontier = self.state.frontier();
        while self.settled + 1 < frontier {
            self.settled += 1;
            let v = self.settled;
            self.push_value(v);
        }
    }

    fn mark_a(&mut self, a: u64) {
        if self.in_a.len() <= a as usize {
            self.in_a.resize(a as usize + 1, false);
        }
        self.in_a[a as usize] = true;
    }

    /// Performs one step of the algorithm.
    pub fn step(&mut self) -> Result<()> {
        let n = self.run.len() + 1;
        let a = self.state.mex();
        self.state.mark(a);
        self.mark_a(a);
        self.settle();
        let c = *self
            .skips
            .get(n - 1)
            .ok_or_else(|| Error::InvariantViolation(format!("skipping sequence not settled at step {n}")))?;
        let b = self.state.mex_k(c);
        record_row(&mut self.run, &self.state, a, b);
        self.state.mark(b);
        self.settle();
        Ok(())
    }

    pub fn run(&self) -> &MesRun {
        &self.run
    }

    /// The part of `C` settled so far (may run ahead of the step count).
    pub fn skips(&self) -> &[u64] {
        &self.skips
    }
}

/// Runs the self-generating rule with multiplicity `k` for `n` steps.
pub fn run_self_generating(k: u64, n: usize) -> Result<SelfGeneratingRun> {
    let mut s = SelfGeneratingRun::new(k);
    for _ in 0..n {
        s.step()?;
    }
    Ok(s)
}

/// The first `n` terms of the golden skipping sequence `0, 1, 1, 2, 3, 3, …`,
/// produced alongside the MES run it drives.
pub fn golden_c_rule(n: usize) -> Vec<u64> {
    let mut s = SelfGeneratingRun::new(2);
    while s.skips().len() < n {
        s.step().expect("golden rule settles ahead of its own run");
    }
    s.skips()[..n].to_vec()
}

/// `(C, R)` of a complementary pair: `c_n` counts `A` values and `r_n` counts
/// `B` values strictly between `a_n` and `b_n`.
///
/// `r_n` is computed both on the open interval `(a_n, b_n)` and on the
/// half-open `(a_n, b_{n−1}]` restricted to `B_{n−1}`; disagreement is an
/// invariant violation.
pub fn derive_skipping(pair: &ComplementaryPair, n: usize) -> Result<(Vec<u64>, Vec<u64>)> {
    let lower = pair.lower()?;
    let upper = pair.upper()?;
    let b = upper.prefix(n);
    let bound = b.last().copied().unwrap_or(0);
    let a = lower.terms_up_to(bound);
    skip_counts(&a, &b, n)
}

/// Counting core of [`derive_skipping`] over explicit increasing prefixes.
/// `a` must contain every `A` value below `b[n−1]`.
pub(crate) fn skip_counts(a: &[u64], b: &[u64], n: usize) -> Result<(Vec<u64>, Vec<u64>)> {
    let mut c = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    let mut a_below = 0usize; // #{a ∈ A : a < b_i}
    for i in 0..n {
        let (ai, bi) = (a[i], b[i]);
        while a_below < a.len() && a[a_below] < bi {
            a_below += 1;
        }
        // a_1 < … < a_i = ai are the A values up to ai
        c.push(a_below.saturating_sub(i + 1) as u64);
        let prev = &b[..i];
        let open = prev.partition_point(|&x| x < bi) - prev.partition_point(|&x| x <= ai);
        let half_open = if i == 0 {
            0
        } else {
            prev.partition_point(|&x| x <= b[i - 1]) - prev.partition_point(|&x| x <= ai)
        };
        if open != half_open {
            return Err(Error::InvariantViolation(format!(
                "r_{} differs between (a_n, b_n) count {open} and (a_n, b_(n-1)] count {half_open}",
                i + 1
            )));
        }
        r.push(open as u64);
    }
    Ok((c, r))
}

/// MES driven by `C = D ⋆ Z₀^{k−1}` where `D` is a Beatty sequence.
pub fn mes_from_defining(defining: &BeattySeq, k: u64, n: usize) -> Result<MesRun> {
    if k == 0 {
        return Err(Error::InvariantViolation("frequency k must be at least 1".into()));
    }
    let skips: Vec<i64> = SortJoin::new(defining.iter(), naturals_power(k - 1))
        .take(n)
        .map(|v| v as i64)
        .collect();
    run_mes(&skips, n)
}
