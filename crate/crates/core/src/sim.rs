//! Forward and backward iteration, coupled burn-in, and empirical tail
//! statistics.
//!
//! Everything here is single-stream; the `alifs` crate splits work into
//! shards, one [`RandomStream`] per `(seed, shard)`, and reduces in shard
//! order so results do not depend on the thread count.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::Sign;
use crate::error::{Error, Result};
use crate::model::{FunctionSample, ModelSpec, StateDomain};
use crate::rng::RandomStream;

/// `X₁, …, Xₙ` with `Xₖ = Ψₖ(Xₖ₋₁)`.
pub fn iterate_forward(spec: &ModelSpec, x0: f64, n: usize, rng: &mut RandomStream) -> Vec<f64> {
    let mut x = x0;
    (0..n)
        .map(|_| {
            x = spec.sample_function(rng).psi(x);
            x
        })
        .collect()
}

/// Burn-in policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BurnIn {
    /// Run coupled chains until they meet.
    Auto,
    /// Fixed number of steps from the default start.
    Fixed(u64),
}

/// Parameters of the coupled burn-in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    /// Chains start at `±start` (`1/start` and `start` on `x > 0`).
    pub start: f64,
    /// The chains have met when their gap drops below this.
    pub tol: f64,
    /// Give up after this many steps.
    pub max_steps: u64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            start: 1e6,
            tol: 1e-9,
            max_steps: 10_000_000,
        }
    }
}

/// Stationary sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Burn-in policy.
    pub burn_in: BurnIn,
    /// Keep every `stride`-th state.
    pub stride: usize,
    /// Coupling parameters for [`BurnIn::Auto`].
    pub coupling: CouplingConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            burn_in: BurnIn::Auto,
            stride: 1,
            coupling: CouplingConfig::default(),
        }
    }
}

/// Outcome of a coupled burn-in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingCertificate {
    /// Steps until the chains met.
    pub meeting_time: u64,
    /// Gap at the meeting time.
    pub gap: f64,
    /// Common state after meeting.
    pub state: f64,
}

fn default_start(domain: StateDomain) -> f64 {
    match domain {
        StateDomain::Real => 0.0,
        StateDomain::Positive => 1.0,
    }
}

/// Runs chains from `±start` and from the default start with shared draws
/// until all of them meet. The middle chain matters for maps that only see
/// `|x|`, where the two outer chains merge after one step while still far
/// from stationarity.
pub fn couple(
    spec: &ModelSpec,
    cfg: &CouplingConfig,
    rng: &mut RandomStream,
) -> Result<CouplingCertificate> {
    let mut xs = match spec.domain() {
        StateDomain::Real => [-cfg.start, 0.0, cfg.start],
        StateDomain::Positive => [1.0 / cfg.start, 1.0, cfg.start],
    };
    for step in 1..=cfg.max_steps {
        let f = spec.sample_function(rng);
        for x in xs.iter_mut() {
            *x = f.psi(*x);
        }
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gap = hi - lo;
        if !gap.is_finite() {
            return Err(Error::NoContractionCertificate(step));
        }
        if gap < cfg.tol {
            return Ok(CouplingCertificate {
                meeting_time: step,
                gap,
                state: xs[1],
            });
        }
    }
    Err(Error::NoContractionCertificate(cfg.max_steps))
}

/// Diagnostics of a stationary run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunDiagnostics {
    /// Coupling succeeded.
    pub certified: bool,
    /// Meeting time (or fixed burn-in length).
    pub burn_in: u64,
    /// Gap at the meeting time; `None` for fixed burn-in or failure.
    pub coupling_gap: Option<f64>,
    /// Largest `|X|` among kept samples.
    pub max_abs: f64,
    /// Kept samples equal to zero.
    pub zero_count: u64,
    /// States that overflowed or left the domain (dropped, chain restarted).
    pub nonfinite_count: u64,
}

/// Samples from one stream.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRun {
    /// Start after burn-in.
    pub x0: f64,
    /// Kept samples.
    pub samples: Vec<f64>,
    /// Diagnostics.
    pub diagnostics: RunDiagnostics,
}

/// `n` stationary samples from one stream. Failed certification is reported
/// in the diagnostics and sampling continues from the default start.
pub fn sample_stationary(
    spec: &ModelSpec,
    n: usize,
    cfg: &SimConfig,
    rng: &mut RandomStream,
) -> ChainRun {
    let start = default_start(spec.domain());
    let mut diag = RunDiagnostics::default();
    let mut x = match cfg.burn_in {
        BurnIn::Auto => match couple(spec, &cfg.coupling, rng) {
            Ok(c) => {
                diag.certified = true;
                diag.burn_in = c.meeting_time;
                diag.coupling_gap = Some(c.gap);
                c.state
            }
            Err(Error::NoContractionCertificate(steps)) => {
                diag.burn_in = steps;
                start
            }
            Err(_) => start,
        },
        BurnIn::Fixed(k) => {
            diag.burn_in = k;
            let mut x = start;
            for _ in 0..k {
                x = spec.sample_function(rng).psi(x);
                if !x.is_finite() {
                    x = start;
                }
            }
            x
        }
    };
    let x0 = x;
    let stride = cfg.stride.max(1);
    let mut samples = Vec::with_capacity(n);
    while samples.len() < n {
        for _ in 0..stride {
            x = spec.sample_function(rng).psi(x);
        }
        if !x.is_finite() {
            diag.nonfinite_count += 1;
            x = start;
            continue;
        }
        if x == 0.0 {
            diag.zero_count += 1;
        }
        diag.max_abs = diag.max_abs.max(x.abs());
        samples.push(x);
    }
    ChainRun {
        x0,
        samples,
        diagnostics: diag,
    }
}

/// Sizes of `shards` near-equal parts of `n` (larger parts first).
pub fn shard_sizes(n: usize, shards: usize) -> Vec<usize> {
    let shards = shards.max(1);
    let (q, r) = (n / shards, n % shards);
    (0..shards).map(|i| q + usize::from(i < r)).collect()
}

/// Which half-line a tail statistic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// `X < 0`, magnitudes `−X`.
    Left,
    /// `X > 0`.
    Right,
}

impl Tail {
    /// Matching sign.
    pub fn sign(self) -> Sign {
        match self {
            Tail::Left => Sign::Minus,
            Tail::Right => Sign::Plus,
        }
    }
}

/// Positive magnitudes on one side, NaN and infinities dropped.
pub fn tail_magnitudes(samples: &[f64], tail: Tail) -> Vec<f64> {
    samples
        .iter()
        .filter(|x| x.is_finite())
        .filter_map(|&x| match tail {
            Tail::Right if x > 0.0 => Some(x),
            Tail::Left if x < 0.0 => Some(-x),
            _ => None,
        })
        .collect()
}

/// `floor(n^{2/3})` clamped to `[100, n/10]`, where `n` counts the positive
/// magnitudes on the relevant side.
pub fn default_hill_k(n_side: usize) -> usize {
    // Integer cube root of n² so exact powers land on the right value.
    let sq = (n_side as u128) * (n_side as u128);
    let mut k = libm::cbrt(sq as f64) as u128;
    while (k + 1).pow(3) <= sq {
        k += 1;
    }
    while k > 0 && k.pow(3) > sq {
        k -= 1;
    }
    let k = k as usize;
    k.min(n_side / 10).max(100)
}

/// Hill estimate with its normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillEstimate {
    /// Tail side.
    pub tail: Tail,
    /// Order statistics used.
    pub k: usize,
    /// Positive magnitudes available.
    pub n_tail: usize,
    /// `k / Σ log(x₍ᵢ₎/x₍ₖ₊₁₎)`.
    pub alpha: f64,
    /// `alpha·(1 − 1.96/√k)`.
    pub ci_lo: f64,
    /// `alpha·(1 + 1.96/√k)`.
    pub ci_hi: f64,
}

impl HillEstimate {
    /// Whether `x` lies in the interval.
    pub fn covers(&self, x: f64) -> bool {
        self.ci_lo <= x && x <= self.ci_hi
    }
}

/// Hill estimator on the top `k` magnitudes of one tail.
pub fn hill_estimate(samples: &[f64], tail: Tail, k: usize) -> Result<HillEstimate> {
    let mut mags = tail_magnitudes(samples, tail);
    let n_tail = mags.len();
    if k == 0 || n_tail < k + 1 {
        return Err(Error::InsufficientTail {
            available: n_tail,
            needed: k + 1,
        });
    }
    // Put the k+1 largest at the front, the (k+1)-th largest at index k.
    let cmp = |a: &f64, b: &f64| b.total_cmp(a);
    mags.select_nth_unstable_by(k, cmp);
    let threshold = mags[k];
    if !(threshold > 0.0) {
        return Err(Error::InsufficientTail {
            available: n_tail,
            needed: k + 1,
        });
    }
    let lt = libm::log(threshold);
    let sum: f64 = mags[..k].iter().map(|&x| libm::log(x) - lt).sum();
    if !(sum > 0.0) {
        return Err(Error::InsufficientTail {
            available: n_tail,
            needed: k + 1,
        });
    }
    let alpha = k as f64 / sum;
    let half = 1.96 / libm::sqrt(k as f64);
    Ok(HillEstimate {
        tail,
        k,
        n_tail,
        alpha,
        ci_lo: alpha * (1.0 - half),
        ci_hi: alpha * (1.0 + half),
    })
}

/// Log-spaced thresholds from `lo` to `hi`.
pub fn log_thresholds(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (libm::log(lo), libm::log(hi));
    (0..n)
        .map(|i| {
            let t = if n <= 1 {
                0.0
            } else {
                i as f64 / (n - 1) as f64
            };
            libm::exp(a + t * (b - a))
        })
        .collect()
}

/// One threshold of a tail curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    /// Threshold `t`.
    pub threshold: f64,
    /// `t^κ·#{X < −t}/n`.
    pub left: f64,
    /// `t^κ·#{X > t}/n`.
    pub right: f64,
    /// Raw left exceedances.
    pub left_count: u64,
    /// Raw right exceedances.
    pub right_count: u64,
    /// 95% binomial interval of `left`.
    pub left_ci: (f64, f64),
    /// 95% binomial interval of `right`.
    pub right_ci: (f64, f64),
}

/// `t^κ`-scaled empirical exceedance curves for both tails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    /// Exponent used for scaling.
    pub kappa: f64,
    /// Finite samples used.
    pub n: u64,
    /// One entry per threshold.
    pub points: Vec<TailPoint>,
}

impl TailCurve {
    /// `max/min` of the nonzero values on one side, over thresholds in
    /// `[lo, hi]`.
    pub fn flatness(&self, tail: Tail, lo: f64, hi: f64) -> Option<f64> {
        let vals: Vec<f64> = self
            .points
            .iter()
            .filter(|p| p.threshold >= lo && p.threshold <= hi)
            .map(|p| match tail {
                Tail::Left => p.left,
                Tail::Right => p.right,
            })
            .collect();
        if vals.is_empty() || vals.iter().any(|&v| !(v > 0.0)) {
            return None;
        }
        let max = vals.iter().copied().fold(f64::MIN, f64::max);
        let min = vals.iter().copied().fold(f64::MAX, f64::min);
        Some(max / min)
    }
}

fn binomial_ci(count: u64, n: u64, scale: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let p = count as f64 / n as f64;
    let h = 1.96 * libm::sqrt(p * (1.0 - p) / n as f64);
    (scale * (p - h).max(0.0), scale * (p + h))
}

/// Tail curves on the given ascending thresholds.
pub fn empirical_tail_curve(samples: &[f64], kappa: f64, thresholds: &[f64]) -> Result<TailCurve> {
    if thresholds.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidParameter(
            "thresholds must be ascending".into(),
        ));
    }
    let mut sorted: Vec<f64> = samples.iter().copied().filter(|x| x.is_finite()).collect();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as u64;
    let points = thresholds
        .iter()
        .map(|&t| {
            let right_count = (sorted.len() - sorted.partition_point(|&x| x <= t)) as u64;
            let left_count = sorted.partition_point(|&x| x < -t) as u64;
            let scale = libm::pow(t, kappa);
            let frac = |c: u64| if n == 0 { 0.0 } else { c as f64 / n as f64 };
            TailPoint {
                threshold: t,
                left: scale * frac(left_count),
                right: scale * frac(right_count),
                left_count,
                right_count,
                left_ci: binomial_ci(left_count, n, scale),
                right_ci: binomial_ci(right_count, n, scale),
            }
        })
        .collect();
    Ok(TailCurve { kappa, n, points })
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    /// Mean.
    pub mean: f64,
    /// Standard error.
    pub std_error: f64,
    /// Terms averaged.
    pub n: u64,
}

impl MeanEstimate {
    /// Mean and standard error of `values`.
    pub fn of<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let mut acc = MeanAccumulator::default();
        for v in values {
            acc.push(v);
        }
        acc.finish()
    }

    /// 95% normal interval.
    pub fn ci(&self) -> (f64, f64) {
        (
            self.mean - 1.96 * self.std_error,
            self.mean + 1.96 * self.std_error,
        )
    }
}

/// Running sums for [`MeanEstimate`]; merge in a fixed order for
/// reproducible reductions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanAccumulator {
    /// Count.
    pub n: u64,
    /// Sum.
    pub sum: f64,
    /// Sum of squares.
    pub sum_sq: f64,
}

impl MeanAccumulator {
    /// Adds one value.
    #[inline]
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    /// Adds another accumulator.
    pub fn merge(&mut self, other: &MeanAccumulator) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    /// Mean and standard error.
    pub fn finish(&self) -> MeanEstimate {
        if self.n == 0 {
            return MeanEstimate {
                mean: 0.0,
                std_error: 0.0,
                n: 0,
            };
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        MeanEstimate {
            mean,
            std_error: libm::sqrt(var / n),
            n: self.n,
        }
    }
}

/// Empirical `E|X|^θ` over finite samples.
pub fn fractional_moment(samples: &[f64], theta: f64) -> Result<MeanEstimate> {
    if !(theta >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "theta must be nonnegative, got {theta}"
        )));
    }
    Ok(MeanEstimate::of(
        samples
            .iter()
            .filter(|x| x.is_finite())
            .map(|&x| libm::pow(x.abs(), theta)),
    ))
}

/// Running means of `|X|^θ` over the prefixes `sizes`, for the blow-up
/// diagnostic above `κ`.
pub fn moment_growth(samples: &[f64], theta: f64, sizes: &[usize]) -> Vec<(usize, f64)> {
    sizes
        .iter()
        .filter(|&&m| m > 0 && m <= samples.len())
        .map(|&m| {
            let s: f64 = samples[..m]
                .iter()
                .filter(|x| x.is_finite())
                .map(|&x| libm::pow(x.abs(), theta))
                .sum();
            (m, s / m as f64)
        })
        .collect()
}

/// Autocorrelations of `log(1 + |X|)` at the given lags. The transform has
/// every moment whatever the tail index, so the estimate is meaningful even
/// when `X` has infinite variance. `None` where the lag is too long or the
/// series is constant.
pub fn autocorrelation(samples: &[f64], lags: &[usize]) -> Vec<(usize, Option<f64>)> {
    let y: Vec<f64> = samples
        .iter()
        .filter(|x| x.is_finite())
        .map(|x| libm::log1p(x.abs()))
        .collect();
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n.max(1) as f64;
    let var: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    lags.iter()
        .map(|&h| {
            if h == 0 || h + 1 >= n || !(var > 0.0) {
                return (h, None);
            }
            let cov: f64 = (0..n - h).map(|t| (y[t] - mean) * (y[t + h] - mean)).sum();
            (h, Some(cov / var))
        })
        .collect()
}

/// Two-slope homogeneous map `y ↦ g₊y (y > 0), g₋y (y < 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSlope {
    /// Left slope.
    pub minus: f64,
    /// Right slope.
    pub plus: f64,
}

impl TwoSlope {
    /// Identity.
    pub const IDENTITY: TwoSlope = TwoSlope {
        minus: 1.0,
        plus: 1.0,
    };

    /// Evaluation.
    #[inline]
    pub fn apply(&self, y: f64) -> f64 {
        if y > 0.0 {
            self.plus * y
        } else if y < 0.0 {
            self.minus * y
        } else {
            0.0
        }
    }

    /// `self ∘ inner` where `inner` is the linear part of a draw.
    #[inline]
    pub fn after(&self, inner: &FunctionSample) -> TwoSlope {
        TwoSlope {
            minus: -self.apply(-inner.a_minus),
            plus: self.apply(inner.a_plus),
        }
    }

    /// Lipschitz constant `max(|g₋|, |g₊|)`.
    #[inline]
    pub fn lip(&self) -> f64 {
        self.minus.abs().max(self.plus.abs())
    }
}

/// One backward comparison draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackwardCheck {
    /// Compositions depth.
    pub n: usize,
    /// `Ŷₙ = Σₖ Lip(Λ₁⋯Λₖ₋₁)·Bₖ`.
    pub y_hat: f64,
    /// `max_x |Ψ₁⋯Ψₙ(x) − Λ₁⋯Λₙ(x)| − Ŷₙ` over the probes.
    pub worst_excess: f64,
    /// Probes where the excess is beyond rounding slack.
    pub violations: u32,
}

/// Probe points for the comparison bound.
pub fn backward_probes(domain: StateDomain) -> [f64; 3] {
    match domain {
        StateDomain::Real => [-10.0, 0.0, 10.0],
        StateDomain::Positive => [0.1, 1.0, 10.0],
    }
}

/// Draws `Ψ₁, …, Ψₙ` and checks `|Ψ₁⋯Ψₙ(x) − Λ₁⋯Λₙ(x)| ≤ Ŷₙ` at the
/// probe points.
pub fn backward_error_bound(
    spec: &ModelSpec,
    n: usize,
    rng: &mut RandomStream,
) -> Result<BackwardCheck> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let draws: Vec<FunctionSample> = (0..n).map(|_| spec.sample_function(rng)).collect();
    let mut g = TwoSlope::IDENTITY;
    let mut y_hat = 0.0;
    for f in &draws {
        y_hat += g.lip() * f.b;
        g = g.after(f);
    }
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for x in backward_probes(spec.domain()) {
        let (mut p, mut l) = (x, x);
        for f in draws.iter().rev() {
            p = f.psi(p);
            l = f.lambda(l);
        }
        let excess = (p - l).abs() - y_hat;
        let slack = 1e-12 * (y_hat + p.abs() + l.abs());
        if !(excess <= slack) {
            violations += 1;
        }
        worst = worst.max(if excess.is_nan() {
            f64::INFINITY
        } else {
            excess
        });
    }
    Ok(BackwardCheck {
        n,
        y_hat,
        worst_excess: worst,
        violations,
    })
}

/// Per-path `log Lip(Λₙ⋯Λ₁)`, tracked in log space.
pub fn log_lip_forward(spec: &ModelSpec, n: usize, rng: &mut RandomStream) -> f64 {
    // Images of ±1 as (sign, log|·|).
    let mut state = [(-1.0f64, 0.0f64), (1.0, 0.0)];
    for _ in 0..n {
        let f = spec.sample_function(rng);
        for s in state.iter_mut() {
            if s.0 == 0.0 {
                continue;
            }
            let a = if s.0 > 0.0 { f.a_plus } else { f.a_minus };
            if a == 0.0 {
                *s = (0.0, f64::NEG_INFINITY);
            } else {
                *s = (s.0 * a.signum(), s.1 + libm::log(a.abs()));
            }
        }
    }
    state[0].1.max(state[1].1)
}

/// Accumulates `exp(θ·ℓ − shift)` for a log-space mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMeanAccumulator {
    /// Common shift applied to every exponent.
    pub shift: f64,
    /// Plain accumulator of shifted terms.
    pub acc: MeanAccumulator,
}

/// `(E Lip(Λₙ⋯Λ₁)^θ)^{1/n}` from per-path log-Lipschitz constants.
pub fn gelfand_estimate(log_lips: &[f64], theta: f64, n: usize) -> MeanEstimate {
    let shift = log_lips.iter().copied().fold(f64::NEG_INFINITY, f64::max) * theta;
    let shift = if shift.is_finite() { shift } else { 0.0 };
    let m = MeanEstimate::of(log_lips.iter().map(|&l| libm::exp(theta * l - shift)));
    // log of the mean, then the n-th root; delta method for the error.
    let log_mean = libm::log(m.mean) + shift;
    let value = libm::exp(log_mean / n as f64);
    MeanEstimate {
        mean: value,
        std_error: value * (m.std_error / m.mean) / n as f64,
        n: m.n,
    }
}

/// One path's contribution to the `n`-step product moments
/// `E|Λₙ⋯Λ₁(δ)|^θ·1{sign = ε}`: returns the end signs and log-moduli
/// starting from `δ = −1` and `δ = +1`.
pub fn product_endpoints(
    spec: &ModelSpec,
    n: usize,
    rng: &mut RandomStream,
) -> [(Option<Sign>, f64); 2] {
    let mut y = [-1.0f64, 1.0];
    let mut logs = [0.0f64; 2];
    for _ in 0..n {
        let f = spec.sample_function(rng);
        for i in 0..2 {
            let a = if y[i] > 0.0 {
                f.a_plus
            } else if y[i] < 0.0 {
                f.a_minus
            } else {
                0.0
            };
            y[i] *= a.signum();
            logs[i] += libm::log(a.abs());
        }
    }
    [(Sign::of(y[0]), logs[0]), (Sign::of(y[1]), logs[1])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ScalarDist;
    use crate::model::Kernel;

    #[test]
    fn autocorrelation_of_iid_and_ar1() {
        let mut rng = RandomStream::new(4, 0);
        let iid: Vec<f64> = (0..50_000).map(|_| rng.uniform()).collect();
        for (_, r) in autocorrelation(&iid, &[1, 5]) {
            assert!(r.unwrap().abs() < 0.02);
        }
        let spec = ModelSpec::Affine {
            a: ScalarDist::PointMass { value: 0.9 },
            b: ScalarDist::Gaussian { mean: 0.0, sd: 1.0 },
        };
        let xs = iterate_forward(&spec, 0.0, 50_000, &mut rng);
        let r = autocorrelation(&xs, &[1, 49_999, 60_000]);
        assert!(r[0].1.unwrap() > 0.5, "{r:?}");
        assert_eq!((r[1].1, r[2].1), (None, None));
        assert!(autocorrelation(&[1.0; 10], &[1])[0].1.is_none());
    }

    fn affine(a: f64, b: f64) -> ModelSpec {
        ModelSpec::Affine {
            a: ScalarDist::PointMass { value: a },
            b: ScalarDist::PointMass { value: b },
        }
    }

    #[test]
    fn forward_geometric() {
        let xs = iterate_forward(&affine(0.5, 1.0), 0.0, 60, &mut RandomStream::new(0, 0));
        assert_eq!(&xs[..3], &[1.0, 1.5, 1.75]);
        assert!((xs[59] - 2.0).abs() < 1e-15);
        let bh = ModelSpec::BevertonHolt {
            a: ScalarDist::PointMass { value: 2.0 },
            b: ScalarDist::PointMass { value: 1.0 },
        };
        assert_eq!(
            iterate_forward(&bh, 1.0, 3, &mut RandomStream::new(0, 0)),
            [1.0; 3]
        );
    }

    #[test]
    fn lindley_reflection() {
        let spec = ModelSpec::Lindley {
            a: ScalarDist::PointMass { value: 1.0 },
            b: ScalarDist::standard_normal(),
        };
        let xs = iterate_forward(&spec, 0.0, 100, &mut RandomStream::new(4, 0));
        let mut rng = RandomStream::new(4, 0);
        let mut x = 0.0f64;
        for &y in &xs {
            let f = spec.sample_function(&mut rng);
            let Kernel::Lindley { b, .. } = f.kernel else {
                unreachable!()
            };
            x = (x + b).max(0.0);
            assert_eq!(x, y);
        }
    }

    #[test]
    fn coupling_time_for_halving() {
        let c = couple(
            &affine(0.5, 1.0),
            &CouplingConfig::default(),
            &mut RandomStream::new(0, 0),
        )
        .unwrap();
        // gap 2e6 halves each step until below 1e-9
        assert_eq!(c.meeting_time, 51);
        assert!((c.state - 2.0).abs() < 1e-9);
        assert!(matches!(
            couple(
                &affine(2.0, 1.0),
                &CouplingConfig::default(),
                &mut RandomStream::new(0, 0)
            ),
            Err(Error::NoContractionCertificate(_))
        ));
    }

    #[test]
    fn arch_certifies() {
        let spec = ModelSpec::Arch1 {
            beta: 1.0,
            lambda: 1.0,
            z: ScalarDist::standard_normal(),
        };
        let run = sample_stationary(
            &spec,
            1000,
            &SimConfig::default(),
            &mut RandomStream::new(9, 0),
        );
        assert!(run.diagnostics.certified);
        // ±start merge at once for an even map; the middle chain must catch up.
        assert!(run.diagnostics.burn_in > 20, "{:?}", run.diagnostics);
        assert!(run.x0.abs() < 1e3);
        assert_eq!(run.samples.len(), 1000);
    }

    #[test]
    fn hill_on_exact_pareto() {
        let d = ScalarDist::Pareto {
            scale: 1.0,
            alpha: 2.0,
        };
        let mut rng = RandomStream::new(1, 0);
        let xs: Vec<f64> = (0..1_000_000).map(|_| d.sample(&mut rng)).collect();
        let h = hill_estimate(&xs, Tail::Right, 10_000).unwrap();
        assert!(h.alpha > 1.95 && h.alpha < 2.05, "{}", h.alpha);
        assert!(matches!(
            hill_estimate(&[3.0; 50], Tail::Right, 10),
            Err(Error::InsufficientTail { .. })
        ));
        assert!(matches!(
            hill_estimate(&xs, Tail::Left, 10),
            Err(Error::InsufficientTail { .. })
        ));
    }

    #[test]
    fn hill_k_default() {
        assert_eq!(default_hill_k(1_000_000), 10_000);
        assert_eq!(default_hill_k(500), 100);
        assert_eq!(default_hill_k(100_000), 2154);
    }

    #[test]
    fn tail_curve_on_pareto() {
        let d = ScalarDist::Pareto {
            scale: 1.0,
            alpha: 2.0,
        };
        let mut rng = RandomStream::new(2, 0);
        let xs: Vec<f64> = (0..200_000).map(|_| d.sample(&mut rng)).collect();
        let c = empirical_tail_curve(&xs, 2.0, &log_thresholds(1.0, 30.0, 8)).unwrap();
        for p in &c.points {
            assert!((p.right - 1.0).abs() < 0.15, "{p:?}");
            assert_eq!(p.left, 0.0);
        }
        assert!(c
            .points
            .windows(2)
            .all(|w| w[0].right_count >= w[1].right_count));
        let c = empirical_tail_curve(&[0.5, -0.2, 0.1], 1.0, &[1.0, 2.0]).unwrap();
        assert!(c.points.iter().all(|p| p.left == 0.0 && p.right == 0.0));
    }

    #[test]
    fn moment_at_zero_is_one() {
        let m = fractional_moment(&[0.0, -3.0, 2.0], 0.0).unwrap();
        assert_eq!(m.mean, 1.0);
    }

    #[test]
    fn backward_geometric() {
        let mut rng = RandomStream::new(0, 0);
        let c = backward_error_bound(&affine(0.5, 1.0), 40, &mut rng).unwrap();
        assert!((c.y_hat - 2.0).abs() < 1e-11);
        assert_eq!(c.violations, 0);
        let c = backward_error_bound(&affine(0.5, 1.0), 1, &mut rng).unwrap();
        assert_eq!(c.y_hat, 1.0);
    }

    #[test]
    fn two_slope_composition() {
        let f = FunctionSample {
            a_minus: 3.0,
            a_plus: -0.5,
            b: 1.0,
            kernel: crate::model::Kernel::TwoSlope {
                shift: 0.0,
                wobble: 0.0,
            },
        };
        let g = TwoSlope {
            minus: -2.0,
            plus: 4.0,
        }
        .after(&f);
        for &y in &[-1.5, 2.0] {
            assert_eq!(
                g.apply(y),
                TwoSlope {
                    minus: -2.0,
                    plus: 4.0
                }
                .apply(f.lambda(y))
            );
        }
    }

    #[test]
    fn shards_cover() {
        assert_eq!(shard_sizes(10, 4), [3, 3, 2, 2]);
        assert_eq!(shard_sizes(0, 3), [0, 0, 0]);
    }
}
