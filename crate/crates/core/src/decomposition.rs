//! Derived slopes of a complementary pair and verification of the identities
//! relating them.
//!
//! For `1 < α < 2` with complement `β`, the counts `c_n` (values of `A`) and
//! `r_n` (values of `B`) strictly between `a_n` and `b_n` satisfy
//! `b_n − a_n = c_n + r_n + 1`, and are themselves Beatty sequences with slopes
//! `γ = (2 − α)/(α − 1)` and `ρ = 2 − α`. Every check here compares exact
//! integers; a report lists the indices where the two sides differ.

use std::cmp::Ordering;
use std::fmt;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exact::{FloorKernel, QuadExpr};
use crate::mesalg::{mes_from_defining, run_mex, skip_counts, GapSequence};
use crate::sequences::{BeattySeq, ComplementaryPair};
use crate::{out_of_range, Error, Result};

/// Reports stop collecting after this many failures and abort the range.
pub const DEFAULT_FAILURE_CAP: usize = 32;

/// Every slope derived from `α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeBundle {
    pub alpha: QuadExpr,
    pub beta: QuadExpr,
    /// Slope of `C`: `(2 − α)/(α − 1) = β/α − 1`.
    pub gamma: QuadExpr,
    /// Slope of `R`: `2 − α = 1 − α/β`.
    pub rho: QuadExpr,
    /// Frequency: `(2k − 1)/k < α < (2k + 1)/(k + 1)`.
    pub k: u64,
    /// Slope of the defining sequence: `(2 − α)/(kα − 2k + 1)`.
    pub delta: QuadExpr,
}

fn open_unit_to_two(alpha: &QuadExpr) -> Result<()> {
    if !alpha.is_irrational() {
        return Err(Error::NotIrrational(alpha.clone()));
    }
    if alpha.cmp_rational(1, 1) != Ordering::Greater || alpha.cmp_rational(2, 1) != Ordering::Less {
        return out_of_range(alpha, "1 < alpha < 2");
    }
    Ok(())
}

fn invariant(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvariantViolation(what()))
    }
}

/// The unique `k ≥ 1` with `(2k − 1)/k < α < (2k + 1)/(k + 1)`.
pub fn frequency_k(alpha: &QuadExpr) -> Result<u64> {
    open_unit_to_two(alpha)?;
    // the band is equivalent to k − 1 < (α − 1)/(2 − α) < k
    let ratio = alpha.shift(-1).checked_div(&alpha.neg().shift(2))?;
    let k = ratio
        .floor()
        .to_u64()
        .ok_or(Error::Exact(crate::ExactError::Overflow))?
        + 1;
    let ki = i64::try_from(k).map_err(|_| Error::Exact(crate::ExactError::Overflow))?;
    invariant(
        alpha.cmp_rational(2 * ki - 1, ki) == Ordering::Greater
            && alpha.cmp_rational(2 * ki + 1, ki + 1) == Ordering::Less,
        || format!("{alpha} not inside frequency band k = {k}"),
    )?;
    Ok(k)
}

/// `δ = (2 − α)/(kα − 2k + 1)` with `k` the frequency of `α`.
pub fn defining_slope(alpha: &QuadExpr) -> Result<(QuadExpr, u64)> {
    let k = frequency_k(alpha)?;
    let k_big = k as i64;
    let den = alpha.scale(k_big).shift(1 - 2 * k_big);
    Ok((alpha.neg().shift(2).checked_div(&den)?, k))
}

/// `α = (2 − δ + 2kδ)/(1 + kδ)`, the slope generated by MES from a defining
/// Beatty sequence of slope `δ > 1` with frequency `k`.
pub fn slope_from_defining(delta: &QuadExpr, k: u64) -> Result<QuadExpr> {
    if !delta.is_irrational() {
        return Err(Error::NotIrrational(delta.clone()));
    }
    if delta.cmp_rational(1, 1) != Ordering::Greater {
        return out_of_range(delta, "defining slope > 1");
    }
    if k == 0 {
        return Err(Error::InvariantViolation("frequency k must be at least 1".into()));
    }
    let k = k as i64;
    let num = delta.scale(2 * k - 1).shift(2);
    let den = delta.scale(k).shift(1);
    let alpha = num.checked_div(&den)?;
    let (back, k_back) = defining_slope(&alpha)?;
    invariant(back == *delta && k_back == k as u64, || {
        format!("defining slope round trip failed: ({delta}, {k}) -> {alpha} -> ({back}, {k_back})")
    })?;
    Ok(alpha)
}

/// The slope with `slope_from_defining(α, k) = α`: `(k − 1 + √(k² + 1))/k`.
pub fn fixed_point_slope(k: u64) -> Result<QuadExpr> {
    if k == 0 {
        return Err(Error::InvariantViolation("frequency k must be at least 1".into()));
    }
    let alpha = QuadExpr::make(k - 1, 1, k * k + 1, k)?;
    let image = slope_from_defining(&alpha, k)?;
    invariant(image == alpha, || format!("{alpha} is not fixed for k = {k}"))?;
    Ok(alpha)
}

/// `α = (2 − t + √(t² + 4))/2`, the slope generated by MEX with `h_n = t·n`.
pub fn mex_family_slope(t: u64) -> Result<QuadExpr> {
    if t == 0 {
        return Err(Error::InvariantViolation("gap multiplier t must be at least 1".into()));
    }
    let t = t as i64;
    Ok(QuadExpr::make(2 - t, 1, t * t + 4, 2)?)
}

/// Computes and cross-checks the full [`SlopeBundle`] for `1 < α < 2`.
pub fn derived_slopes(alpha: &QuadExpr) -> Result<SlopeBundle> {
    open_unit_to_two(alpha)?;
    let beta = crate::sequences::complement_slope(alpha)?;
    let two_minus = alpha.neg().shift(2);
    let gamma = two_minus.checked_div(&alpha.shift(-1))?;
    let rho = two_minus;
    invariant(gamma == beta.checked_div(alpha)?.shift(-1), || {
        format!("gamma != beta/alpha - 1 for {alpha}")
    })?;
    invariant(
        rho == QuadExpr::integer(1).checked_sub(&alpha.checked_div(&beta)?)?,
        || format!("rho != 1 - alpha/beta for {alpha}"),
    )?;
    invariant(gamma == beta.shift(-2), || format!("gamma != beta - 2 for {alpha}"))?;
    let (delta, k) = defining_slope(alpha)?;
    let regenerated = slope_from_defining(&delta, k)?;
    invariant(regenerated == *alpha, || {
        format!("slope_from_defining({delta}, {k}) = {regenerated} != {alpha}")
    })?;
    Ok(SlopeBundle {
        alpha: alpha.clone(),
        beta,
        gamma,
        rho,
        k,
        delta,
    })
}

/// Name of a checked identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// `b_n − a_n = c_n + r_n + 1` against a membership-counting oracle.
    Decomposition,
    /// `c_n = [nγ]` and `r_n = [nρ]`.
    SlopeMatch,
    /// `[β⁻¹(b_{n−1} + 1)] − [β⁻¹a_n] = [(2 − α)n]`, `n ≥ 2`.
    #[serde(rename = "identity-12a")]
    Identity12a,
    /// `[α⁻¹b_n] − [α⁻¹(a_n + 1)] = [γn]`.
    #[serde(rename = "identity-12b")]
    Identity12b,
    /// `[nβ] − [nα] = [n(β/α − 1)] + [n(1 − α/β)] + 1`.
    #[serde(rename = "corollary1")]
    Corollary1,
    /// `[nφ²] − [nφ] = n`.
    Wythoff,
    /// `[αn] + [(2 − α)n] = 2n − 1`.
    FloorSum,
    /// `r_{n+1} − r_n ∈ {0, 1}`, equal to 1 iff `a_{n+1} − a_n = 1`.
    RDifferences,
    /// `c_{n+1} − c_n ∈ {q − 2, q − 1}` with `q = [β]`, equal to `q − 2` iff
    /// `b_{n+1} − b_n = q`.
    CDifferences,
    /// MES on a Beatty defining sequence reproduces the predicted Beatty `A`.
    MesProducesBeatty,
    /// MEX with `h_n = t·n` reproduces its Beatty pair and `[nβ] − [nα] = tn`.
    MexFamily,
}

impl Identity {
    pub fn tag(self) -> &'static str {
        match self {
            Identity::Decomposition => "decomposition",
            Identity::SlopeMatch => "slope-match",
            Identity::Identity12a => "identity-12a",
            Identity::Identity12b => "identity-12b",
            Identity::Corollary1 => "corollary1",
            Identity::Wythoff => "wythoff",
            Identity::FloorSum => "floor-sum",
            Identity::RDifferences => "r-differences",
            Identity::CDifferences => "c-differences",
            Identity::MesProducesBeatty => "mes-produces-beatty",
            Identity::MexFamily => "mex-family",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub n: u64,
    pub lhs: i128,
    pub rhs: i128,
}

/// Outcome of checking one identity over `n = 1..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub identity: Identity,
    pub alpha: QuadExpr,
    pub n_max: u64,
    pub failures: Vec<Failure>,
    pub elapsed: Duration,
    /// Set when the failure cap was hit and the range abandoned.
    pub aborted: bool,
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Combines reports of the same identity over split ranges.
    pub fn merge(mut self, other: VerificationReport) -> VerificationReport {
        assert_eq!(self.identity, other.identity, "merging different identities");
        self.n_max = self.n_max.max(other.n_max);
        self.failures.extend(other.failures);
        self.failures.sort_by_key(|f| f.n);
        self.elapsed += other.elapsed;
        self.aborted |= other.aborted;
        self.warnings.extend(other.warnings);
        self
    }
}

impl Serialize for VerificationReport {
    /// `{"identity", "alpha", "N", "failures", "elapsed_ms"}` plus `aborted`
    /// and `warnings` when they carry information.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = serializer.serialize_map(None)?;
        m.serialize_entry("identity", &self.identity)?;
        m.serialize_entry("alpha", &self.alpha)?;
        m.serialize_entry("N", &self.n_max)?;
        m.serialize_entry("failures", &self.failures)?;
        m.serialize_entry("elapsed_ms", &(self.elapsed.as_millis() as u64))?;
        if self.aborted {
            m.serialize_entry("aborted", &true)?;
        }
        if !self.warnings.is_empty() {
            m.serialize_entry("warnings", &self.warnings)?;
        }
        m.end()
    }
}

struct Tally {
    report: VerificationReport,
    cap: usize,
    started: Instant,
}

impl Tally {
    fn new(identity: Identity, alpha: &QuadExpr, n_max: u64) -> Self {
        Tally {
            report: VerificationReport {
                identity,
                alpha: alpha.clone(),
                n_max,
                failures: Vec::new(),
                elapsed: Duration::ZERO,
                aborted: false,
                warnings: Vec::new(),
            },
            cap: DEFAULT_FAILURE_CAP,
            started: Instant::now(),
        }
    }

    /// Records `lhs == rhs` at `n`; returns `false` once the cap is reached.
    fn check(&mut self, n: u64, lhs: i128, rhs: i128) -> bool {
        if lhs != rhs {
            self.report.failures.push(Failure { n, lhs, rhs });
            if self.report.failures.len() >= self.cap {
                self.report.aborted = true;
                return false;
            }
        }
        true
    }

    fn finish(mut self) -> VerificationReport {
        self.report.elapsed = self.started.elapsed();
        self.report
    }
}

/// Materialized prefixes of a pair, shared by the pair-based checks.
///
/// Holds `a_1..a_{N+1}`, `b_1..b_{N+1}`, every `A` value below `b_{N+1}`, and
/// `c_n`, `r_n` from [`crate::mesalg::derive_skipping`]'s counting core.
pub struct PairPrefix {
    pair: ComplementaryPair,
    n: usize,
    a: Vec<u64>,
    b: Vec<u64>,
    a_all: Vec<u64>,
    c: Vec<u64>,
    r: Vec<u64>,
}

impl PairPrefix {
    pub fn new(pair: &ComplementaryPair, n: usize) -> Result<Self> {
        let upper = pair.upper()?;
        let lower = pair.lower()?;
        let b = upper.prefix(n + 1);
        let a_all = lower.terms_up_to(*b.last().expect("n + 1 ≥ 1 terms"));
        // A is the sparser-gapped sequence, so a_all always reaches index n + 1
        let a = lower.prefix(n + 1);
        let (c, r) = skip_counts(&a_all, &b, n + 1)?;
        Ok(PairPrefix {
            pair: pair.clone(),
            n,
            a,
            b,
            a_all,
            c,
            r,
        })
    }

    pub fn c(&self) -> &[u64] {
        &self.c[..self.n]
    }

    pub fn r(&self) -> &[u64] {
        &self.r[..self.n]
    }

    fn alpha(&self) -> &QuadExpr {
        self.pair.alpha()
    }

    /// `b_n − a_n = c_n + r_n + 1`, with `c_n`, `r_n` recounted from
    /// membership tables of `A` and `B`; the counted values must also agree
    /// with the derived skipping sequence.
    pub fn decomposition(&self) -> VerificationReport {
        let mut t = Tally::new(Identity::Decomposition, self.alpha(), self.n as u64);
        let top = self.b[self.n - 1] as usize;
        let mut in_a = vec![0u32; top + 1];
        let mut in_b = vec![0u32; top + 1];
        for &x in self.a_all.iter().filter(|&&x| x as usize <= top) {
            in_a[x as usize] += 1;
        }
        for &x in self.b.iter().filter(|&&x| x as usize <= top) {
            in_b[x as usize] += 1;
        }
        // prefix counts: count[x] = #values ≤ x
        for x in 1..=top {
            in_a[x] += in_a[x - 1];
            in_b[x] += in_b[x - 1];
        }
        for i in 0..self.n {
            let (a, b) = (self.a[i] as usize, self.b[i] as usize);
            let (c_o, r_o) = if b > a {
                (in_a[b - 1] - in_a[a], in_b[b - 1] - in_b[a])
            } else {
                (0, 0)
            };
            let n = i as u64 + 1;
            let lhs = b as i128 - a as i128;
            if !t.check(n, lhs, c_o as i128 + r_o as i128 + 1) {
                break;
            }
            if !t.check(n, self.c[i] as i128, c_o as i128) || !t.check(n, self.r[i] as i128, r_o as i128) {
                break;
            }
        }
        t.finish()
    }

    /// `c_n = [nγ]` and `r_n = [nρ]`.
    pub fn slope_match(&self) -> Result<VerificationReport> {
        let bundle = derived_slopes(self.alpha())?;
        let gamma = FloorKernel::new(&bundle.gamma);
        let rho = FloorKernel::new(&bundle.rho);
        let mut t = Tally::new(Identity::SlopeMatch, self.alpha(), self.n as u64);
        for i in 0..self.n {
            let n = i as u64 + 1;
            if !t.check(n, self.c[i] as i128, gamma.floor_at(n)) || !t.check(n, self.r[i] as i128, rho.floor_at(n)) {
                break;
            }
        }
        Ok(t.finish())
    }

    /// `[β⁻¹(b_{n−1} + 1)] − [β⁻¹a_n] = [(2 − α)n]` for `2 ≤ n ≤ N`.
    pub fn identity_12a(&self) -> Result<VerificationReport> {
        let inv_beta = FloorKernel::new(&self.pair.beta().recip()?);
        let rho = FloorKernel::new(&self.alpha().neg().shift(2));
        let mut t = Tally::new(Identity::Identity12a, self.alpha(), self.n as u64);
        for i in 1..self.n {
            let n = i as u64 + 1;
            let lhs = inv_beta.floor_at(self.b[i - 1] + 1) - inv_beta.floor_at(self.a[i]);
            if !t.check(n, lhs, rho.floor_at(n)) {
                break;
            }
        }
        Ok(t.finish())
    }

    /// `[α⁻¹b_n] − [α⁻¹(a_n + 1)] = [γn]` for `1 ≤ n ≤ N`.
    pub fn identity_12b(&self) -> Result<VerificationReport> {
        let inv_alpha = FloorKernel::new(&self.alpha().recip()?);
        let alpha = self.alpha();
        let gamma = FloorKernel::new(&alpha.neg().shift(2).checked_div(&alpha.shift(-1))?);
        let mut t = Tally::new(Identity::Identity12b, alpha, self.n as u64);
        for i in 0..self.n {
            let n = i as u64 + 1;
            let lhs = inv_alpha.floor_at(self.b[i]) - inv_alpha.floor_at(self.a[i] + 1);
            if !t.check(n, lhs, gamma.floor_at(n)) {
                break;
            }
        }
        Ok(t.finish())
    }

    /// `[αn] + [(2 − α)n] = 2n − 1`.
    pub fn floor_sum(&self) -> VerificationReport {
        let rho = FloorKernel::new(&self.alpha().neg().shift(2));
        let mut t = Tally::new(Identity::FloorSum, self.alpha(), self.n as u64);
        for i in 0..self.n {
            let n = i as u64 + 1;
            let lhs = self.a[i] as i128 + rho.floor_at(n);
            if !t.check(n, lhs, 2 * n as i128 - 1) {
                break;
            }
        }
        t.finish()
    }

    /// `r_{n+1} − r_n ∈ {0, 1}`, and it is 1 exactly when `a_{n+1} = a_n + 1`.
    ///
    /// Failures record `lhs = r_{n+1} − r_n` and `rhs` = the value predicted
    /// from the gap in `A`.
    pub fn r_differences(&self) -> VerificationReport {
        let mut t = Tally::new(Identity::RDifferences, self.alpha(), self.n as u64);
        for i in 0..self.n {
            let n = i as u64 + 1;
            let dr = self.r[i + 1] as i128 - self.r[i] as i128;
            let predicted = i128::from(self.a[i + 1] - self.a[i] == 1);
            if !t.check(n, dr, predicted) {
                break;
            }
        }
        t.finish()
    }

    /// `c_{n+1} − c_n ∈ {q − 2, q − 1}` with `q = [β]`, equal to `q − 2`
    /// exactly when `b_{n+1} − b_n = q`.
    pub fn c_differences(&self) -> VerificationReport {
        let q = self.pair.beta().floor().to_i128().expect("[beta] fits in 128 bits");
        let mut t = Tally::new(Identity::CDifferences, self.alpha(), self.n as u64);
        for i in 0..self.n {
            let n = i as u64 + 1;
            let dc = self.c[i + 1] as i128 - self.c[i] as i128;
            let db = self.b[i + 1] as i128 - self.b[i] as i128;
            let predicted = if db == q { q - 2 } else { q - 1 };
            if !t.check(n, dc, predicted) {
                break;
            }
        }
        t.finish()
    }
}

/// Checks `b_n − a_n = c_n + r_n + 1` for `n ≤ N`.
pub fn verify_decomposition(pair: &ComplementaryPair, n: usize) -> Result<VerificationReport> {
    Ok(PairPrefix::new(pair, n)?.decomposition())
}

/// Checks `c_n = [nγ]` and `r_n = [nρ]` for `n ≤ N`.
pub fn verify_slope_match(pair: &ComplementaryPair, n: usize) -> Result<VerificationReport> {
    PairPrefix::new(pair, n)?.slope_match()
}

pub fn verify_identity_12a(pair: &ComplementaryPair, n: usize) -> Result<VerificationReport> {
    PairPrefix::new(pair, n)?.identity_12a()
}

pub fn verify_identity_12b(pair: &ComplementaryPair, n: usize) -> Result<VerificationReport> {
    PairPrefix::new(pair, n)?.identity_12b()
}

/// `[nβ] − [nα] = [n(β/α − 1)] + [n(1 − α/β)] + 1` for `n ≤ N`.
///
/// The two right-hand slopes are formed from `β/α` and `α/β` directly rather
/// than through the bundle's `γ` and `ρ`. A slope `α > 2` is replaced by its
/// complement and the report carries a warning.
pub fn verify_corollary1(alpha: &QuadExpr, n: u64) -> Result<VerificationReport> {
    if !alpha.is_irrational() {
        return Err(Error::NotIrrational(alpha.clone()));
    }
    if alpha.cmp_rational(1, 1) != Ordering::Greater {
        return out_of_range(alpha, "alpha > 1");
    }
    let (pair, swapped) = ComplementaryPair::from_slope(alpha)?;
    let (alpha, beta) = (pair.alpha(), pair.beta());
    let left = beta.checked_div(alpha)?.shift(-1);
    let right = QuadExpr::integer(1).checked_sub(&alpha.checked_div(beta)?)?;
    let [ka, kb, kl, kr] = [alpha, beta, &left, &right].map(FloorKernel::new);
    let mut t = Tally::new(Identity::Corollary1, alpha, n);
    if swapped {
        t.report.warnings.push(reoriented_warning(pair.beta(), alpha));
    }
    for m in 1..=n {
        let lhs = kb.floor_at(m) - ka.floor_at(m);
        let rhs = kl.floor_at(m) + kr.floor_at(m) + 1;
        if !t.check(m, lhs, rhs) {
            break;
        }
    }
    Ok(t.finish())
}

/// `[nφ²] − [nφ] = n`, with `φ² = φ + 1` built independently of the pair code.
pub fn verify_wythoff(n: u64) -> VerificationReport {
    let phi = QuadExpr::phi();
    let phi_sq = phi.checked_mul(&phi).expect("same radicand");
    let (kp, ks) = (FloorKernel::new(&phi), FloorKernel::new(&phi_sq));
    let mut t = Tally::new(Identity::Wythoff, &phi, n);
    for m in 1..=n {
        if !t.check(m, ks.floor_at(m) - kp.floor_at(m), m as i128) {
            break;
        }
    }
    t.finish()
}

/// Runs MES on `D = Beatty(δ)` with frequency `k` and compares `A` with the
/// Beatty sequence of `slope_from_defining(δ, k)`.
pub fn verify_mes_produces_beatty(delta: &QuadExpr, k: u64, n: usize) -> Result<VerificationReport> {
    let alpha = slope_from_defining(delta, k)?;
    let run = mes_from_defining(&BeattySeq::new(delta.clone())?, k, n)?;
    let expected = FloorKernel::new(&alpha);
    let mut t = Tally::new(Identity::MesProducesBeatty, &alpha, n as u64);
    for (i, &a) in run.a.iter().enumerate() {
        let m = i as u64 + 1;
        if !t.check(m, a as i128, expected.floor_at(m)) {
            break;
        }
    }
    Ok(t.finish())
}

/// Runs MEX with `h_n = t·n`; checks the output against the Beatty pair of
/// [`mex_family_slope`] and `[nβ] − [nα] = tn`.
pub fn verify_mex_family(t_mult: u64, n: usize) -> Result<VerificationReport> {
    let alpha = mex_family_slope(t_mult)?;
    let (pair, _) = ComplementaryPair::from_slope(&alpha)?;
    let run = run_mex(&GapSequence::Linear(t_mult as i64), n)?;
    let (ka, kb) = (FloorKernel::new(pair.alpha()), FloorKernel::new(pair.beta()));
    let mut t = Tally::new(Identity::MexFamily, pair.alpha(), n as u64);
    for i in 0..n {
        let m = i as u64 + 1;
        let (fa, fb) = (ka.floor_at(m), kb.floor_at(m));
        if !t.check(m, run.a[i] as i128, fa)
            || !t.check(m, run.b[i] as i128, fb)
            || !t.check(m, fb - fa, (t_mult * m) as i128)
        {
            break;
        }
    }
    Ok(t.finish())
}

fn reoriented_warning(given: &QuadExpr, used: &QuadExpr) -> String {
    format!("slope {given} exceeds 2; verified with complementary slope {used}")
}

/// One slope of a verification battery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatteryEntry {
    pub label: String,
    pub slope: QuadExpr,
    pub n: u64,
    /// Replaces the complementary slope, for negative controls.
    pub beta_override: Option<QuadExpr>,
}

/// A fixed list of slopes to verify.
///
/// Config files are TOML:
///
/// ```toml
/// default_n = 10000          # optional, N for entries without their own
///
/// [[slope]]
/// expr = "phi"               # slope grammar of `QuadExpr`
/// n = 100000                 # optional
/// label = "golden"           # optional, defaults to expr
/// beta = "(3+1*sqrt(5))/2"   # optional override of the complement
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Battery {
    pub entries: Vec<BatteryEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BatteryFile {
    default_n: Option<u64>,
    #[serde(default)]
    slope: Vec<BatteryFileEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BatteryFileEntry {
    expr: String,
    n: Option<u64>,
    label: Option<String>,
    beta: Option<String>,
}

/// Slopes with their labels: φ, √2, √3, (3+√3)/2 (reoriented to √3),
/// (187+2√13)/113 and the fixed points for k = 1..6.
pub fn standard_slopes() -> Vec<(String, QuadExpr)> {
    let mut out = vec![
        ("phi".to_string(), QuadExpr::phi()),
        ("sqrt(2)".to_string(), QuadExpr::sqrt(2)),
        ("sqrt(3)".to_string(), QuadExpr::sqrt(3)),
        ("(3+sqrt(3))/2".to_string(), QuadExpr::make(3, 1, 3, 2).expect("valid")),
        (
            "(187+2*sqrt(13))/113".to_string(),
            QuadExpr::make(187, 2, 13, 113).expect("valid"),
        ),
    ];
    for k in 1..=6 {
        out.push((
            format!("fixed-point k={k}"),
            fixed_point_slope(k).expect("fixed point exists"),
        ));
    }
    out
}

impl Battery {
    pub fn standard(n: u64) -> Battery {
        Battery {
            entries: standard_slopes()
                .into_iter()
                .map(|(label, slope)| BatteryEntry {
                    label,
                    slope,
                    n,
                    beta_override: None,
                })
                .collect(),
        }
    }

    /// Parses a TOML battery; `fallback_n` applies when neither the entry nor
    /// `default_n` sets N.
    pub fn parse(text: &str, fallback_n: u64) -> Result<Battery> {
        let file: BatteryFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let default_n = file.default_n.unwrap_or(fallback_n);
        let mut entries = Vec::with_capacity(file.slope.len());
        for raw in file.slope {
            let slope: QuadExpr = raw.expr.parse()?;
            if !slope.is_irrational() {
                return Err(Error::NotIrrational(slope));
            }
            let beta_override = match raw.beta {
                Some(b) => Some(b.parse::<QuadExpr>()?),
                None => None,
            };
            let n = raw.n.unwrap_or(default_n);
            if n == 0 {
                return Err(Error::Config(format!("N must be positive for {}", raw.expr)));
            }
            entries.push(BatteryEntry {
                label: raw.label.unwrap_or_else(|| raw.expr.clone()),
                slope,
                n,
                beta_override,
            });
        }
        if entries.is_empty() {
            return Err(Error::Config("battery lists no slopes".into()));
        }
        Ok(Battery { entries })
    }
}

/// Runs every identity on one battery entry, in a fixed order.
pub fn verify_entry(entry: &BatteryEntry) -> Result<Vec<VerificationReport>> {
    let (oriented, swapped) = ComplementaryPair::from_slope(&entry.slope)?;
    let pair = match &entry.beta_override {
        Some(beta) => ComplementaryPair::unchecked(oriented.alpha().clone(), beta.clone()),
        None => oriented.clone(),
    };
    let n = entry.n as usize;
    let prefix = PairPrefix::new(&pair, n)?;
    let bundle = derived_slopes(pair.alpha())?;
    let mut reports = vec![
        prefix.decomposition(),
        prefix.slope_match()?,
        prefix.identity_12a()?,
        prefix.identity_12b()?,
        verify_corollary1(pair.alpha(), entry.n)?,
        prefix.floor_sum(),
        prefix.r_differences(),
        prefix.c_differences(),
        verify_mes_produces_beatty(&bundle.delta, bundle.k, n)?,
    ];
    if *pair.alpha() == QuadExpr::phi() {
        reports.push(verify_wythoff(entry.n));
    }
    if swapped {
        let warning = reoriented_warning(&entry.slope, pair.alpha());
        for r in &mut reports {
            r.warnings.push(warning.clone());
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, q: i64, d: i64, r: i64) -> QuadExpr {
        QuadExpr::make(p, q, d, r).unwrap()
    }

    fn golden_pair() -> ComplementaryPair {
        ComplementaryPair::from_slope(&QuadExpr::phi()).unwrap().0
    }

    #[test]
    fn bundle_golden() {
        let b = derived_slopes(&QuadExpr::phi()).unwrap();
        assert_eq!(b.gamma, q(-1, 1, 5, 2));
        assert_eq!(b.rho, q(3, -1, 5, 2));
        assert_eq!(b.k, 2);
        assert_eq!(b.delta, QuadExpr::phi());
        assert_eq!(b.beta, q(3, 1, 5, 2));
    }

    #[test]
    fn bundle_sqrt3() {
        let b = derived_slopes(&QuadExpr::sqrt(3)).unwrap();
        assert_eq!(b.gamma, q(-1, 1, 3, 2));
        assert_eq!(b.rho, q(2, -1, 3, 1));
        assert_eq!(b.beta, q(3, 1, 3, 2));
        assert!(matches!(
            derived_slopes(&q(3, 1, 3, 2)),
            Err(Error::SlopeOutOfRange { .. })
        ));
        assert!(matches!(
            derived_slopes(&QuadExpr::rational(3, 2).unwrap()),
            Err(Error::NotIrrational(_))
        ));
    }

    #[test]
    fn bundle_sqrt13_example() {
        let b = derived_slopes(&q(187, 2, 13, 113)).unwrap();
        assert_eq!(b.k, 3);
        assert_eq!(b.delta, q(0, 1, 13, 2));
    }

    #[test]
    fn frequency_examples() {
        assert_eq!(frequency_k(&QuadExpr::phi()).unwrap(), 2);
        assert_eq!(frequency_k(&q(187, 2, 13, 113)).unwrap(), 3);
        assert_eq!(frequency_k(&QuadExpr::sqrt(2)).unwrap(), 1);
        assert_eq!(frequency_k(&q(5, 1, 2, 6)).unwrap(), 1); // ≈ 1.069
        assert!(frequency_k(&QuadExpr::sqrt(5)).is_err());
    }

    #[test]
    fn defining_slope_examples() {
        assert_eq!(slope_from_defining(&q(0, 1, 13, 2), 3).unwrap(), q(187, 2, 13, 113));
        assert_eq!(slope_from_defining(&QuadExpr::phi(), 2).unwrap(), QuadExpr::phi());
        assert!(matches!(
            slope_from_defining(&QuadExpr::rational(7, 3).unwrap(), 2),
            Err(Error::NotIrrational(_))
        ));
        assert!(matches!(
            slope_from_defining(&q(-1, 1, 5, 2), 2),
            Err(Error::SlopeOutOfRange { .. })
        ));
    }

    #[test]
    fn fixed_points() {
        assert_eq!(fixed_point_slope(2).unwrap(), QuadExpr::phi());
        assert_eq!(fixed_point_slope(1).unwrap(), QuadExpr::sqrt(2));
        assert_eq!(fixed_point_slope(3).unwrap(), q(2, 1, 10, 3));
        for k in 1..=8 {
            let a = fixed_point_slope(k).unwrap();
            assert_eq!(frequency_k(&a).unwrap(), k);
        }
    }

    #[test]
    fn mex_family() {
        assert_eq!(mex_family_slope(1).unwrap(), QuadExpr::phi());
        assert_eq!(mex_family_slope(2).unwrap(), QuadExpr::sqrt(2));
        for t in 1..=4 {
            assert!(verify_mex_family(t, 2000).unwrap().passed());
        }
    }

    #[test]
    fn golden_identities_small() {
        let pre = PairPrefix::new(&golden_pair(), 2000).unwrap();
        assert!(pre.decomposition().passed());
        assert!(pre.slope_match().unwrap().passed());
        assert!(pre.identity_12a().unwrap().passed());
        assert!(pre.identity_12b().unwrap().passed());
        assert!(pre.floor_sum().passed());
        assert!(pre.r_differences().passed());
        assert!(pre.c_differences().passed());
        assert!(verify_wythoff(2000).passed());
        assert!(verify_corollary1(&QuadExpr::phi(), 2000).unwrap().passed());
    }

    #[test]
    fn identity_12a_at_four() {
        // b_3 = 7, a_4 = 6: [8/φ²] − [6/φ²] = 3 − 2 = 1 = [4(2 − φ)]
        let inv_beta_sq = q(3, -1, 5, 2);
        let k = FloorKernel::new(&inv_beta_sq);
        assert_eq!(k.floor_at(8) - k.floor_at(6), 1);
        assert_eq!(FloorKernel::new(&q(3, -1, 5, 2)).floor_at(4), 1);
    }

    #[test]
    fn corollary1_sqrt3_first_term() {
        // [(3+√3)/2] − [√3] = 2 − 1 = 1 = 0 + 0 + 1
        let r = verify_corollary1(&QuadExpr::sqrt(3), 1).unwrap();
        assert!(r.passed());
        let swapped = verify_corollary1(&q(3, 1, 3, 2), 100).unwrap();
        assert!(swapped.passed());
        assert_eq!(swapped.alpha, QuadExpr::sqrt(3));
        assert_eq!(swapped.warnings.len(), 1);
        assert!(verify_corollary1(&QuadExpr::rational(3, 2).unwrap(), 5).is_err());
    }

    #[test]
    fn corrupted_pair_fails_and_caps() {
        let beta = q(3, 1, 5, 2).checked_add(&QuadExpr::rational(1, 100).unwrap()).unwrap();
        let bad = ComplementaryPair::unchecked(QuadExpr::phi(), beta);
        let report = verify_decomposition(&bad, 10_000).unwrap();
        assert!(!report.passed());
        assert!(report.aborted);
        assert_eq!(report.failures.len(), DEFAULT_FAILURE_CAP);
    }

    #[test]
    fn merge_sorts_failures() {
        let mk = |ns: &[u64]| VerificationReport {
            identity: Identity::Wythoff,
            alpha: QuadExpr::phi(),
            n_max: 10,
            failures: ns.iter().map(|&n| Failure { n, lhs: 0, rhs: 1 }).collect(),
            elapsed: Duration::from_millis(1),
            aborted: false,
            warnings: vec![],
        };
        let merged = mk(&[5, 9]).merge(mk(&[2, 7]));
        let ns: Vec<u64> = merged.failures.iter().map(|f| f.n).collect();
        assert_eq!(ns, vec![2, 5, 7, 9]);
    }

    #[test]
    fn report_json_shape() {
        let r = verify_wythoff(10);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["identity"], "wythoff");
        assert_eq!(v["N"], 10);
        assert_eq!(v["alpha"], serde_json::json!({"p": 1, "q": 1, "d": 5, "r": 2}));
        assert!(v["failures"].as_array().unwrap().is_empty());
        assert!(v.get("elapsed_ms").is_some());
    }

    #[test]
    fn battery_parsing() {
        let text = r#"
            default_n = 500
            [[slope]]
            expr = "phi"
            [[slope]]
            expr = "(187+2*sqrt(13))/113"
            n = 40
            label = "sqrt13 example"
        "#;
        let b = Battery::parse(text, 10).unwrap();
        assert_eq!(b.entries.len(), 2);
        assert_eq!(b.entries[0].n, 500);
        assert_eq!(b.entries[1].n, 40);
        assert_eq!(b.entries[1].label, "sqrt13 example");

        assert!(matches!(
            Battery::parse("[[slope]]\nexpr = \"3/2\"\n", 10),
            Err(Error::NotIrrational(_))
        ));
        assert!(matches!(
            Battery::parse("[[slope]]\nexpr = \"sqrt(\"\n", 10),
            Err(Error::Exact(_))
        ));
        assert!(matches!(Battery::parse("slope = 3", 10), Err(Error::Config(_))));
    }

    #[test]
    fn standard_battery_entry_reports() {
        let entry = BatteryEntry {
            label: "(3+sqrt(3))/2".into(),
            slope: q(3, 1, 3, 2),
            n: 300,
            beta_override: None,
        };
        let reports = verify_entry(&entry).unwrap();
        assert!(reports.iter().all(|r| r.passed()));
        assert!(reports.iter().all(|r| r.warnings.len() == 1));
        assert_eq!(Battery::standard(10).entries.len(), 11);
    }
}
