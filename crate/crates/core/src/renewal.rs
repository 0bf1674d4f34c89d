//! Markov random walk of the linearized iteration, exponential change of
//! measure, lattice test, tail predictions and tail-constant estimators.
//!
//! The walk is `ξₙ = sign(Λₙ⋯Λ₁(x₀))`, `Sₙ = log|Λₙ⋯Λ₁(x₀)|`. Tail
//! constants are reported as limits `t^κ·ν((t,∞))` and `t^κ·ν((−∞,−t))`,
//! each a linear combination of
//! `E[T_ε(κ)]`, `T_ε(κ) = |Ψ(R)|^κ 1{εΨ(R)>0} − |Λ(R)|^κ 1{εΛ(R)>0}`,
//! with `R` stationary and `(Ψ, Λ)` a fresh draw.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::Sign;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::rng::RandomStream;
use crate::sim::{MeanAccumulator, MeanEstimate};
use crate::slope::SlopeLaw;
use crate::spectral::{self, CaseTag, CramerTransform, MomentMethod, SpectralData};
use crate::tail_index::{self, DriftValue, KappaSolution};

/// One state of the walk; `xi = 0` is the absorbing grave with `s = −∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MrwState {
    /// Sign `−1`, `0` or `+1`.
    pub xi: i8,
    /// Log-modulus.
    pub s: f64,
    /// Step index.
    pub step: u64,
}

impl MrwState {
    /// State at step 0 for start `x0`.
    pub fn start(x0: f64) -> Self {
        match Sign::of(x0) {
            Some(s) => Self {
                xi: s.as_f64() as i8,
                s: libm::log(x0.abs()),
                step: 0,
            },
            None => Self::grave(0),
        }
    }

    fn grave(step: u64) -> Self {
        Self {
            xi: 0,
            s: f64::NEG_INFINITY,
            step,
        }
    }

    /// Sign as [`Sign`], `None` in the grave.
    pub fn sign(&self) -> Option<Sign> {
        match self.xi {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    /// Applies a slope to the state.
    #[inline]
    pub fn advance(&self, slope: f64) -> Self {
        if self.xi == 0 || slope == 0.0 {
            return Self::grave(self.step + 1);
        }
        Self {
            xi: if slope > 0.0 { self.xi } else { -self.xi },
            s: self.s + libm::log(slope.abs()),
            step: self.step + 1,
        }
    }
}

/// States `0..=n` of the walk. Uses the draws in the same order as
/// [`crate::sim::iterate_forward`], so equal streams give matching paths.
pub fn mrw_path(spec: &ModelSpec, x0: f64, n: usize, rng: &mut RandomStream) -> Vec<MrwState> {
    let mut st = MrwState::start(x0);
    let mut out = Vec::with_capacity(n + 1);
    out.push(st);
    for _ in 0..n {
        let f = spec.sample_function(rng);
        let slope = match st.sign() {
            Some(s) => f.slope(s),
            None => 0.0,
        };
        st = st.advance(slope);
        out.push(st);
    }
    out
}

/// Running sums of `e^{θSₖ}v_{ξₖ}/ρᵏ` for `k = 0..=n` and both starts.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleAccumulator {
    theta: f64,
    spectral: SpectralData,
    /// `sums[k][δ]`.
    pub sums: Vec<[MeanAccumulator; 2]>,
}

impl MartingaleAccumulator {
    /// Empty accumulator for horizons up to `n`.
    pub fn new(theta: f64, spectral: SpectralData, n: usize) -> Self {
        Self {
            theta,
            spectral,
            sums: vec![[MeanAccumulator::default(); 2]; n + 1],
        }
    }

    /// Adds `paths` paths started from `−1` and `+1` with shared draws.
    pub fn run(&mut self, spec: &ModelSpec, paths: usize, rng: &mut RandomStream) {
        let n = self.sums.len() - 1;
        let (theta, rho, v) = (self.theta, self.spectral.rho, self.spectral.v);
        let log_rho = libm::log(rho);
        for _ in 0..paths {
            let mut st = [MrwState::start(-1.0), MrwState::start(1.0)];
            for k in 0..=n {
                if k > 0 {
                    let f = spec.sample_function(rng);
                    for s in st.iter_mut() {
                        let slope = s.sign().map_or(0.0, |d| f.slope(d));
                        *s = s.advance(slope);
                    }
                }
                for (d, s) in st.iter().enumerate() {
                    let value = match s.sign() {
                        Some(x) => libm::exp(theta * s.s - k as f64 * log_rho) * v[x.index()],
                        None => 0.0,
                    };
                    self.sums[k][d].push(value);
                }
            }
        }
    }

    /// Adds another accumulator.
    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.sums.iter_mut().zip(other.sums.iter()) {
            a[0].merge(&b[0]);
            a[1].merge(&b[1]);
        }
    }

    /// Compares each statistic with `v_δ`.
    pub fn finish(&self) -> MartingaleReport {
        let mut rows = Vec::new();
        for (k, pair) in self.sums.iter().enumerate() {
            for d in Sign::BOTH {
                let est = pair[d.index()].finish();
                let target = self.spectral.v[d.index()];
                let dev = (est.mean - target).abs();
                let pass = dev <= 4.0 * est.std_error + 1e-12 * target.abs();
                rows.push(MartingaleRow {
                    n: k,
                    start: d,
                    estimate: est.mean,
                    std_error: est.std_error,
                    target,
                    pass,
                });
            }
        }
        MartingaleReport {
            theta: self.theta,
            rho: self.spectral.rho,
            pass: rows.iter().all(|r| r.pass),
            rows,
        }
    }
}

/// One statistic of the martingale check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartingaleRow {
    /// Horizon.
    pub n: usize,
    /// Start sign.
    pub start: Sign,
    /// `E_δ[e^{θSₙ}v_{ξₙ}]/ρⁿ`.
    pub estimate: f64,
    /// Standard error.
    pub std_error: f64,
    /// `v_δ(θ)`.
    pub target: f64,
    /// Within four standard errors.
    pub pass: bool,
}

/// Outcome of the martingale check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleReport {
    /// Argument.
    pub theta: f64,
    /// `ρ(θ)`.
    pub rho: f64,
    /// All rows pass.
    pub pass: bool,
    /// One row per `(n, δ)`.
    pub rows: Vec<MartingaleRow>,
}

/// Single-stream martingale check.
pub fn martingale_statistic(
    t: &CramerTransform,
    spec: &ModelSpec,
    theta: f64,
    n: usize,
    paths: usize,
    rng: &mut RandomStream,
) -> Result<MartingaleReport> {
    let s = spectral::eigen_pair(&t.matrix(theta)?)?;
    s.require_normalized()?;
    let mut acc = MartingaleAccumulator::new(theta, s, n);
    acc.run(spec, paths, rng);
    Ok(acc.finish())
}

/// Running sums of `|Λₙ⋯Λ₁(δ)|^θ·1{sign = ε}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMomentAccumulator {
    theta: f64,
    horizons: Vec<usize>,
    /// `sums[h][δ][ε]`.
    pub sums: Vec<[[MeanAccumulator; 2]; 2]>,
}

impl ProductMomentAccumulator {
    /// Empty accumulator for the given horizons.
    pub fn new(theta: f64, horizons: &[usize]) -> Self {
        Self {
            theta,
            horizons: horizons.to_vec(),
            sums: vec![[[MeanAccumulator::default(); 2]; 2]; horizons.len()],
        }
    }

    /// Adds `paths` paths per horizon.
    pub fn run(&mut self, spec: &ModelSpec, paths: usize, rng: &mut RandomStream) {
        for (h, &n) in self.horizons.iter().enumerate() {
            for _ in 0..paths {
                let ends = crate::sim::product_endpoints(spec, n, rng);
                for d in Sign::BOTH {
                    let (sign, log_mod) = ends[d.index()];
                    for e in Sign::BOTH {
                        let v = if sign == Some(e) {
                            libm::exp(self.theta * log_mod)
                        } else {
                            0.0
                        };
                        self.sums[h][d.index()][e.index()].push(v);
                    }
                }
            }
        }
    }

    /// Adds another accumulator.
    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.sums.iter_mut().zip(other.sums.iter()) {
            for i in 0..2 {
                for j in 0..2 {
                    a[i][j].merge(&b[i][j]);
                }
            }
        }
    }

    /// Compares with the entries of `P(θ)ⁿ`.
    pub fn finish(&self, t: &CramerTransform) -> Result<Vec<ProductMomentRow>> {
        let p = t.matrix(self.theta)?.entries();
        let mut out = Vec::new();
        for (h, &n) in self.horizons.iter().enumerate() {
            let mut pow = [[1.0, 0.0], [0.0, 1.0]];
            for _ in 0..n {
                pow = mat_mul(&pow, &p);
            }
            for d in Sign::BOTH {
                for e in Sign::BOTH {
                    let est = self.sums[h][d.index()][e.index()].finish();
                    let target = pow[d.index()][e.index()];
                    out.push(ProductMomentRow {
                        n,
                        from: d,
                        to: e,
                        estimate: est.mean,
                        std_error: est.std_error,
                        target,
                        pass: (est.mean - target).abs()
                            <= 4.0 * est.std_error + 1e-12 * target.abs(),
                    });
                }
            }
        }
        Ok(out)
    }
}

fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// One entry of the product-moment check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductMomentRow {
    /// Horizon.
    pub n: usize,
    /// Start sign `δ`.
    pub from: Sign,
    /// End sign `ε`.
    pub to: Sign,
    /// Monte Carlo estimate.
    pub estimate: f64,
    /// Standard error.
    pub std_error: f64,
    /// `(P(θ)ⁿ)_{δε}`.
    pub target: f64,
    /// Within four standard errors.
    pub pass: bool,
}

/// How a tilted row is sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TiltMethod {
    /// Exact tilted atom probabilities.
    Exact,
    /// Acceptance-rejection against the untilted law.
    Rejection {
        /// Envelope constant.
        envelope: f64,
    },
    /// Tilting of a base-quantile grid.
    Discretized {
        /// Grid cells.
        cells: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum TiltedRow {
    Table { values: Vec<f64>, cum: Vec<f64> },
    Rejection { law: SlopeLaw, envelope: f64 },
}

/// Sampler for the tilted kernel
/// `Q_θ((δ, ·), (ε, dy)) = e^{θy}v_ε/(ρ v_δ)·P_δ(ξ₁ = ε, S₁ ∈ dy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedSampler {
    /// Argument.
    pub theta: f64,
    /// Spectral data at `θ`.
    pub spectral: SpectralData,
    /// Route per starting sign.
    pub methods: [TiltMethod; 2],
    rows: [TiltedRow; 2],
}

/// Cells of the discretized tilting grid.
pub const TILT_GRID_CELLS: usize = 4096;

impl TiltedSampler {
    /// Builds the sampler; needs `v₋, v₊ > 0`.
    pub fn new(t: &CramerTransform, theta: f64) -> Result<Self> {
        let m = t.matrix(theta)?;
        let s = spectral::eigen_pair(&m)?;
        spectral::phat(&m, &s)?;
        let weight = |d: Sign, a: f64| -> f64 {
            match Sign::of(a) {
                Some(sa) => {
                    libm::pow(a.abs(), theta) * s.v[sa.times(d).index()] / (s.rho * s.v[d.index()])
                }
                None => 0.0,
            }
        };
        let mut rows = Vec::with_capacity(2);
        let mut methods = Vec::with_capacity(2);
        for d in Sign::BOTH {
            let law = t.law(d);
            if let Some(atoms) = law.merged_atoms() {
                let pairs: Vec<(f64, f64)> =
                    atoms.iter().map(|&(a, p)| (a, p * weight(d, a))).collect();
                rows.push(table(pairs));
                methods.push(TiltMethod::Exact);
                continue;
            }
            let (lo, hi) = law.image_bounds();
            if lo.is_finite() && hi.is_finite() {
                let vmax = s.v[0].max(s.v[1]);
                let envelope =
                    libm::pow(lo.abs().max(hi.abs()), theta) * vmax / (s.rho * s.v[d.index()]);
                rows.push(TiltedRow::Rejection {
                    law: law.clone(),
                    envelope,
                });
                methods.push(TiltMethod::Rejection { envelope });
            } else {
                let n = TILT_GRID_CELLS;
                let pairs: Vec<(f64, f64)> = (0..n)
                    .map(|j| {
                        let a = law.at_driver_quantile((j as f64 + 0.5) / n as f64);
                        (a, weight(d, a))
                    })
                    .collect();
                rows.push(table(pairs));
                methods.push(TiltMethod::Discretized { cells: n });
            }
        }
        let r1 = rows.pop().unwrap_or(TiltedRow::Table {
            values: Vec::new(),
            cum: Vec::new(),
        });
        let r0 = rows.pop().unwrap_or(TiltedRow::Table {
            values: Vec::new(),
            cum: Vec::new(),
        });
        let m1 = methods.pop().unwrap_or(TiltMethod::Exact);
        let m0 = methods.pop().unwrap_or(TiltMethod::Exact);
        Ok(Self {
            theta,
            spectral: s,
            methods: [m0, m1],
            rows: [r0, r1],
        })
    }

    /// Exact tilted atoms `(slope, probability)` for a discrete row.
    pub fn atoms(&self, from: Sign) -> Option<Vec<(f64, f64)>> {
        match &self.rows[from.index()] {
            TiltedRow::Table { values, cum } if self.methods[from.index()] == TiltMethod::Exact => {
                let mut prev = 0.0;
                Some(
                    values
                        .iter()
                        .zip(cum.iter())
                        .map(|(&v, &c)| {
                            let p = c - prev;
                            prev = c;
                            (v, p)
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Draws a slope from the tilted row of `from`.
    pub fn sample_slope(&self, from: Sign, rng: &mut RandomStream) -> f64 {
        match &self.rows[from.index()] {
            TiltedRow::Table { values, cum } => {
                let u = rng.uniform() * cum.last().copied().unwrap_or(1.0);
                let i = cum
                    .partition_point(|&c| c <= u)
                    .min(values.len().saturating_sub(1));
                values[i]
            }
            TiltedRow::Rejection { law, envelope } => {
                let s = &self.spectral;
                loop {
                    let a = law.sample(rng);
                    let w = match Sign::of(a) {
                        Some(sa) => {
                            libm::pow(a.abs(), self.theta) * s.v[sa.times(from).index()]
                                / (s.rho * s.v[from.index()])
                        }
                        None => 0.0,
                    };
                    if rng.uniform() * envelope < w {
                        return a;
                    }
                }
            }
        }
    }
}

fn table(pairs: Vec<(f64, f64)>) -> TiltedRow {
    let mut values = Vec::with_capacity(pairs.len());
    let mut cum = Vec::with_capacity(pairs.len());
    let mut acc = 0.0;
    for (a, w) in pairs {
        if w > 0.0 {
            acc += w;
            values.push(a);
            cum.push(acc);
        }
    }
    TiltedRow::Table { values, cum }
}

/// One step of the walk under the tilted kernel.
pub fn tilted_step(sampler: &TiltedSampler, state: MrwState, rng: &mut RandomStream) -> MrwState {
    match state.sign() {
        Some(d) => state.advance(sampler.sample_slope(d, rng)),
        None => MrwState::grave(state.step + 1),
    }
}

/// Result of the lattice test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LatticeReport {
    /// Every generator lies in `span·ℤ`; `None` when all generators vanish.
    Arithmetic {
        /// Largest admissible span.
        span: Option<f64>,
    },
    /// Two generators with no small integer relation.
    Nonarithmetic {
        /// Reference generator.
        reference: f64,
        /// Generator incommensurable with it.
        witness: f64,
    },
    /// A slope law has a continuous component.
    NonarithmeticByContinuity,
    /// Rational relations found but with denominators beyond the bound.
    Inconclusive {
        /// Denominator bound that was hit.
        denominator_bound: u64,
    },
}

impl LatticeReport {
    /// Hypothesis status of "nonarithmetic".
    pub fn status(&self) -> HypothesisStatus {
        match self {
            LatticeReport::Nonarithmetic { .. } | LatticeReport::NonarithmeticByContinuity => {
                HypothesisStatus::Pass
            }
            LatticeReport::Arithmetic { .. } => HypothesisStatus::Fail,
            LatticeReport::Inconclusive { .. } => HypothesisStatus::Unknown,
        }
    }
}

/// Denominator bound of the rational-dependence test.
pub const LATTICE_DENOMINATOR_BOUND: u64 = 1_000_000;
/// Tolerance on the integer relation `|q·r − p|`.
pub const LATTICE_TOLERANCE: f64 = 1e-9;

/// Continued-fraction search for `p/q ≈ r` with `|q·r − p| < tol` and
/// `q ≤ qmax`.
pub fn rational_relation(r: f64, qmax: u64, tol: f64) -> Option<(i64, u64)> {
    if !r.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (1.0f64, 0.0f64, libm::floor(r), 1.0f64);
    let mut x = r - libm::floor(r);
    loop {
        if q1 > qmax as f64 {
            return None;
        }
        if (q1 * r - p1).abs() < tol {
            return Some((p1 as i64, q1 as u64));
        }
        if x == 0.0 {
            return None;
        }
        let inv = 1.0 / x;
        let a = libm::floor(inv);
        x = inv - a;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest lattice `dℤ` containing all generators, if one exists.
pub fn lattice_of(generators: &[f64]) -> LatticeReport {
    let gens: Vec<f64> = generators
        .iter()
        .copied()
        .filter(|g| g.abs() > 1e-300)
        .collect();
    let Some(&g0) = gens.first() else {
        return LatticeReport::Arithmetic { span: None };
    };
    let bound = LATTICE_DENOMINATOR_BOUND;
    let mut lcm: u64 = 1;
    let mut rel = Vec::with_capacity(gens.len());
    for &g in &gens {
        match rational_relation(g / g0, bound, LATTICE_TOLERANCE) {
            Some((p, q)) => {
                lcm = lcm / gcd(lcm, q) * q;
                if lcm > bound {
                    return LatticeReport::Inconclusive {
                        denominator_bound: bound,
                    };
                }
                rel.push((p, q));
            }
            None => {
                return LatticeReport::Nonarithmetic {
                    reference: g0,
                    witness: g,
                }
            }
        }
    }
    // g = g0·p/q = (g0/lcm)·(p·lcm/q); the span is (|g0|/lcm)·gcd of the integers.
    let mut common = 0u64;
    for &(p, q) in &rel {
        let k = (p.unsigned_abs()) * (lcm / q);
        common = gcd(common, k);
    }
    LatticeReport::Arithmetic {
        span: Some(g0.abs() / lcm as f64 * common as f64),
    }
}

/// Joint lattice test of the walk's increments: within each transition
/// type all increments must share one residue class, self-transitions must
/// lie on the lattice, and a round trip `− → + → −` must as well.
pub fn lattice_check(spec: &ModelSpec) -> LatticeReport {
    let laws = [spec.slope_law(Sign::Minus), spec.slope_law(Sign::Plus)];
    let mut inc: [[Vec<f64>; 2]; 2] = Default::default();
    for d in Sign::BOTH {
        let Some(atoms) = laws[d.index()].merged_atoms() else {
            return LatticeReport::NonarithmeticByContinuity;
        };
        for (a, p) in atoms {
            if p > 0.0 {
                if let Some(sa) = Sign::of(a) {
                    inc[d.index()][sa.times(d).index()].push(libm::log(a.abs()));
                }
            }
        }
    }
    let mut gens = Vec::new();
    for (i, row) in inc.iter().enumerate() {
        for (j, xs) in row.iter().enumerate() {
            if let Some(&x0) = xs.first() {
                if i == j {
                    gens.push(x0);
                }
                gens.extend(xs.iter().skip(1).map(|x| x - x0));
            }
        }
    }
    if let (Some(&x), Some(&y)) = (inc[0][1].first(), inc[1][0].first()) {
        gens.push(x + y);
    }
    lattice_of(&gens)
}

/// Lattice test of `log ^δA` given `^δA > 0`.
pub fn lattice_check_positive(law: &SlopeLaw) -> LatticeReport {
    match law.merged_atoms() {
        Some(atoms) => {
            let gens: Vec<f64> = atoms
                .iter()
                .filter(|&&(a, p)| p > 0.0 && a > 0.0)
                .map(|&(a, _)| libm::log(a))
                .collect();
            lattice_of(&gens)
        }
        None => LatticeReport::NonarithmeticByContinuity,
    }
}

/// Status of one theorem hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HypothesisStatus {
    /// Verified.
    Pass,
    /// Violated.
    Fail,
    /// Could not be decided.
    Unknown,
}

/// One entry of a hypothesis ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    /// Condition.
    pub condition: String,
    /// Status.
    pub status: HypothesisStatus,
    /// Supporting numbers.
    pub detail: String,
}

fn hyp(condition: &str, status: HypothesisStatus, detail: String) -> Hypothesis {
    Hypothesis {
        condition: condition.to_string(),
        status,
        detail,
    }
}

fn pass_if(b: bool) -> HypothesisStatus {
    if b {
        HypothesisStatus::Pass
    } else {
        HypothesisStatus::Fail
    }
}

/// Which limit theorem a tail prediction rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailTheorem {
    /// Irreducible sign chain, common exponent `κ`.
    Irreducible,
    /// Unilateral, tail on the leaking side at `κ_l`.
    UnilateralLeaking,
    /// Unilateral, receiving tail at `κ_r < κ_l`.
    UnilateralReceiving,
    /// Unilateral, receiving tail inherits `κ_l < κ_r`.
    UnilateralInherited,
    /// Separated sign chain, one-sided recursion.
    Separated,
}

/// How one constant is assembled from `E[T₋(κ)]` and `E[T₊(κ)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantFormula {
    /// Name in the report (`c_plus`, `c_plus_1`, …).
    pub label: String,
    /// Tail the constant belongs to.
    pub tail: Sign,
    /// Exponent.
    pub kappa: f64,
    /// Coefficients on `E[T₋(κ)]`, `E[T₊(κ)]`.
    pub coef: [f64; 2],
}

/// Prediction for one tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailPrediction {
    /// Tail side.
    pub tail: Sign,
    /// Theorem invoked, if any.
    pub theorem: Option<TailTheorem>,
    /// Predicted tail exponent.
    pub exponent: Option<f64>,
    /// Hypothesis ledger of the invoked theorem.
    pub hypotheses: Vec<Hypothesis>,
    /// All hypotheses pass.
    pub covered: bool,
    /// Why no prediction was made.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TailPrediction {
    fn none(tail: Sign, note: &str) -> Self {
        Self {
            tail,
            theorem: None,
            exponent: None,
            hypotheses: Vec::new(),
            covered: false,
            note: Some(note.to_string()),
        }
    }

    fn new(tail: Sign, theorem: TailTheorem, exponent: f64, hypotheses: Vec<Hypothesis>) -> Self {
        let covered = hypotheses
            .iter()
            .all(|h| h.status == HypothesisStatus::Pass);
        Self {
            tail,
            theorem: Some(theorem),
            exponent: Some(exponent),
            hypotheses,
            covered,
            note: None,
        }
    }
}

/// Everything the theory says about a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// Case of the sign chain.
    pub case: CaseTag,
    /// Root of `ρ = 1`.
    pub kappa: Option<KappaSolution>,
    /// Root of `p₋₋ = 1`.
    pub kappa_minus: Option<KappaSolution>,
    /// Root of `p₊₊ = 1`.
    pub kappa_plus: Option<KappaSolution>,
    /// Spectral data at `κ` (irreducible case).
    pub spectral_at_kappa: Option<SpectralData>,
    /// Drift at `κ` (irreducible case).
    pub drift: Option<DriftValue>,
    /// Joint lattice test.
    pub lattice: LatticeReport,
    /// Left and right tail predictions.
    pub tails: [TailPrediction; 2],
    /// Constants to estimate.
    pub constants: Vec<ConstantFormula>,
    /// Set when the configuration is outside what the theory covers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unsupported: Option<String>,
}

impl Prediction {
    /// Distinct exponents at which `T_ε` must be estimated, ascending.
    pub fn kappas(&self) -> Vec<f64> {
        let mut ks: Vec<f64> = self.constants.iter().map(|c| c.kappa).collect();
        ks.sort_unstable_by(f64::total_cmp);
        ks.dedup();
        ks
    }
}

fn moment_hypothesis(law_sup: f64, b_sup: f64, kappa: f64, side: Option<Sign>) -> [Hypothesis; 2] {
    let which = match side {
        None => "E|^δA|^κ log|^δA| < ∞ for δ = ±",
        Some(Sign::Minus) => "E|⁻A|^κ log|⁻A| < ∞",
        Some(Sign::Plus) => "E|⁺A|^κ log|⁺A| < ∞",
    };
    [
        hyp(
            which,
            pass_if(kappa < law_sup),
            format!("κ = {kappa}, moment domain sup = {law_sup}"),
        ),
        hyp(
            "E B^κ < ∞",
            pass_if(kappa < b_sup),
            format!("κ = {kappa}, B moment sup = {b_sup}"),
        ),
    ]
}

fn positive_lattice_hypothesis(law: &SlopeLaw, side: Sign) -> Hypothesis {
    let r = lattice_check_positive(law);
    let cond = match side {
        Sign::Minus => "law of log|⁻A| given ⁻A > 0 is nonarithmetic",
        Sign::Plus => "law of log|⁺A| given ⁺A > 0 is nonarithmetic",
    };
    hyp(cond, r.status(), format!("{r:?}"))
}

/// Classifies the model, solves for the exponents and lists which tail
/// constants the theory defines, with a hypothesis ledger per tail.
pub fn predict(spec: &ModelSpec, method: MomentMethod, tol: f64) -> Result<Prediction> {
    let t = CramerTransform::new(spec, method);
    let p0 = t.matrix(0.0)?;
    let case = spectral::classify_case(&p0)?;
    let sup = t.domain_sup();
    let b_sup = spec.b_theta_max();
    let lattice = lattice_check(spec);
    let solve_diag = |s: Sign| match tail_index::solve_diag_kappa(&t, s, tol) {
        Ok(k) => Ok(Some(k)),
        Err(Error::DegenerateSpectrum) => Ok(None),
        Err(e) => Err(e),
    };
    let kappa_minus = solve_diag(Sign::Minus)?;
    let kappa_plus = solve_diag(Sign::Plus)?;
    let kappa = match tail_index::solve_kappa(&t, tol) {
        Ok(k) => Some(k),
        Err(Error::DegenerateSpectrum) => None,
        Err(e) => return Err(e),
    };
    let root = |k: &Option<KappaSolution>| k.as_ref().and_then(|k| k.kappa);
    let mut out = Prediction {
        case,
        kappa: kappa.clone(),
        kappa_minus: kappa_minus.clone(),
        kappa_plus: kappa_plus.clone(),
        spectral_at_kappa: None,
        drift: None,
        lattice: lattice.clone(),
        tails: [
            TailPrediction::none(Sign::Minus, "no exponent"),
            TailPrediction::none(Sign::Plus, "no exponent"),
        ],
        constants: Vec::new(),
        unsupported: None,
    };
    match case {
        CaseTag::Irreducible => {
            let Some(k) = root(&kappa) else {
                out.tails = [
                    TailPrediction::none(Sign::Minus, "ρ(θ) = 1 has no root in the moment domain"),
                    TailPrediction::none(Sign::Plus, "ρ(θ) = 1 has no root in the moment domain"),
                ];
                return Ok(out);
            };
            let dips = kappa.as_ref().is_some_and(|s| s.flags.rho_dips_below_one);
            let s = spectral::eigen_pair(&t.matrix(k)?)?;
            let drift = tail_index::stationary_drift(&t, k)?;
            let [m1, m2] = moment_hypothesis(sup, b_sup, k, None);
            let hyps = vec![
                hyp(
                    "ρ(κ) = 1 with ρ < 1 on a right neighbourhood of 0",
                    pass_if(dips),
                    format!("κ = {k}"),
                ),
                m1,
                m2,
                hyp(
                    "increments nonarithmetic under the tilted stationary law",
                    lattice.status(),
                    format!("{lattice:?}"),
                ),
            ];
            let denom = k * drift.drift;
            for side in Sign::BOTH {
                out.tails[side.index()] =
                    TailPrediction::new(side, TailTheorem::Irreducible, k, hyps.clone());
                out.constants.push(ConstantFormula {
                    label: label(side, ""),
                    tail: side,
                    kappa: k,
                    coef: [
                        s.u[side.index()] * s.v[0] / denom,
                        s.u[side.index()] * s.v[1] / denom,
                    ],
                });
            }
            out.spectral_at_kappa = Some(s);
            out.drift = Some(drift);
        }
        CaseTag::UnilateralMinus | CaseTag::UnilateralPlus => {
            let l = if case == CaseTag::UnilateralMinus {
                Sign::Minus
            } else {
                Sign::Plus
            };
            let r = l.flip();
            let (kl_sol, kr_sol) = if l == Sign::Minus {
                (&kappa_minus, &kappa_plus)
            } else {
                (&kappa_plus, &kappa_minus)
            };
            let (kl, kr) = (root(kl_sol), root(kr_sol));
            if let (Some(a), Some(b)) = (kl, kr) {
                if (a - b).abs() <= 1e-9 * a.max(1.0) {
                    out.unsupported = Some(format!(
                        "κ₋ = κ₊ = {a}: boundary case without a tail result"
                    ));
                    let n = "equal diagonal exponents are not covered";
                    out.tails = [
                        TailPrediction::none(Sign::Minus, n),
                        TailPrediction::none(Sign::Plus, n),
                    ];
                    return Ok(out);
                }
            }
            let law_l = t.law(l);
            let law_r = t.law(r);
            let mut tails: [Option<TailPrediction>; 2] = [None, None];
            if let Some(k) = kl {
                let dp = t.derivative(k)?.get(l, l);
                let [m1, m2] = moment_hypothesis(law_l.theta_max(), b_sup, k, Some(l));
                let hyps = vec![
                    hyp(
                        diag_root_name(l),
                        HypothesisStatus::Pass,
                        format!("κ = {k}"),
                    ),
                    m1,
                    m2,
                    positive_lattice_hypothesis(law_l, l),
                ];
                tails[l.index()] = Some(TailPrediction::new(
                    l,
                    TailTheorem::UnilateralLeaking,
                    k,
                    hyps,
                ));
                out.constants.push(ConstantFormula {
                    label: label(l, ""),
                    tail: l,
                    kappa: k,
                    coef: side_coef(l, 1.0 / (k * dp)),
                });
            }
            let m_at = |th: f64| t.matrix(th);
            let receiving_b = match kr {
                Some(k) => m_at(k)?.get(l, l) < 1.0,
                None => false,
            };
            if receiving_b {
                let k = kr.unwrap_or(0.0);
                let m = m_at(k)?;
                let dp = t.derivative(k)?.get(r, r);
                let (pll, plr) = (m.get(l, l), m.get(l, r));
                let [m1, m2] = moment_hypothesis(law_r.theta_max(), b_sup, k, Some(r));
                let hyps = vec![
                    hyp(
                        diag_root_name(r),
                        HypothesisStatus::Pass,
                        format!("κ = {k}"),
                    ),
                    hyp(leak_diag_below_one(l), pass_if(pll < 1.0), format!("{pll}")),
                    hyp(
                        cross_finite(l),
                        pass_if(k < law_l.theta_max()),
                        format!("{plr}"),
                    ),
                    m1,
                    m2,
                    positive_lattice_hypothesis(law_r, r),
                ];
                tails[r.index()] = Some(TailPrediction::new(
                    r,
                    TailTheorem::UnilateralReceiving,
                    k,
                    hyps,
                ));
                let c1 = plr / ((1.0 - pll) * dp * k);
                let c2 = 1.0 / (dp * k);
                let mut both = side_coef(l, c1);
                both[r.index()] = c2;
                out.constants.push(ConstantFormula {
                    label: label(r, "_1"),
                    tail: r,
                    kappa: k,
                    coef: side_coef(l, c1),
                });
                out.constants.push(ConstantFormula {
                    label: label(r, "_2"),
                    tail: r,
                    kappa: k,
                    coef: side_coef(r, c2),
                });
                out.constants.push(ConstantFormula {
                    label: label(r, ""),
                    tail: r,
                    kappa: k,
                    coef: both,
                });
            } else if let Some(k) = kl {
                let m = m_at(k)?;
                let (prr, plr) = (m.get(r, r), m.get(l, r));
                let dp = t.derivative(k)?.get(l, l);
                // some θ > κ_l with p_rr(θ) < 1 and p_lr(θ) < ∞
                let probe = k * (1.0 + 1e-3);
                let beyond = probe < sup && m_at(probe)?.get(r, r) < 1.0;
                let [m1, m2] = moment_hypothesis(law_l.theta_max(), b_sup, k, Some(l));
                let hyps = vec![
                    hyp(
                        diag_root_name(l),
                        HypothesisStatus::Pass,
                        format!("κ = {k}"),
                    ),
                    hyp(recv_diag_below_one(r), pass_if(prr < 1.0), format!("{prr}")),
                    hyp(
                        "p_rr(θ) < 1 and p_lr(θ) < ∞ for some θ > κ_l",
                        pass_if(beyond),
                        format!("θ = {probe}"),
                    ),
                    m1,
                    m2,
                    positive_lattice_hypothesis(law_l, l),
                ];
                tails[r.index()] = Some(TailPrediction::new(
                    r,
                    TailTheorem::UnilateralInherited,
                    k,
                    hyps,
                ));
                out.constants.push(ConstantFormula {
                    label: label(r, ""),
                    tail: r,
                    kappa: k,
                    coef: side_coef(l, plr / (dp * (1.0 - prr) * k)),
                });
            }
            for side in Sign::BOTH {
                if let Some(p) = tails[side.index()].take() {
                    out.tails[side.index()] = p;
                }
            }
        }
        CaseTag::Separated => {
            for side in Sign::BOTH {
                let sol = if side == Sign::Minus {
                    &kappa_minus
                } else {
                    &kappa_plus
                };
                let Some(k) = root(sol) else { continue };
                let law = t.law(side);
                let dp = t.derivative(k)?.get(side, side);
                let [m1, m2] = moment_hypothesis(law.theta_max(), b_sup, k, Some(side));
                let hyps = vec![
                    hyp(
                        diag_root_name(side),
                        HypothesisStatus::Pass,
                        format!("κ = {k}"),
                    ),
                    m1,
                    m2,
                    positive_lattice_hypothesis(law, side),
                ];
                out.tails[side.index()] =
                    TailPrediction::new(side, TailTheorem::Separated, k, hyps);
                out.constants.push(ConstantFormula {
                    label: label(side, ""),
                    tail: side,
                    kappa: k,
                    coef: side_coef(side, 1.0 / (k * dp)),
                });
            }
        }
    }
    Ok(out)
}

fn label(side: Sign, suffix: &str) -> String {
    match side {
        Sign::Minus => format!("c_minus{suffix}"),
        Sign::Plus => format!("c_plus{suffix}"),
    }
}

fn side_coef(side: Sign, c: f64) -> [f64; 2] {
    let mut out = [0.0; 2];
    out[side.index()] = c;
    out
}

fn diag_root_name(s: Sign) -> &'static str {
    match s {
        Sign::Minus => "κ₋ exists: p₋₋(κ₋) = 1",
        Sign::Plus => "κ₊ exists: p₊₊(κ₊) = 1",
    }
}

fn leak_diag_below_one(l: Sign) -> &'static str {
    match l {
        Sign::Minus => "p₋₋(κ₊) < 1",
        Sign::Plus => "p₊₊(κ₋) < 1",
    }
}

fn recv_diag_below_one(r: Sign) -> &'static str {
    match r {
        Sign::Plus => "p₊₊(κ₋) < 1",
        Sign::Minus => "p₋₋(κ₊) < 1",
    }
}

fn cross_finite(l: Sign) -> &'static str {
    match l {
        Sign::Minus => "p₋₊(κ₊) < ∞",
        Sign::Plus => "p₊₋(κ₋) < ∞",
    }
}

/// Sums of `T₋(κ)`, `T₊(κ)`, their squares and product over `(R, Ψ)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TermMoments {
    /// Exponent.
    pub kappa: f64,
    /// Pairs.
    pub n: u64,
    /// `Σ T₋`, `Σ T₊`.
    pub sum: [f64; 2],
    /// `Σ T₋²`, `Σ T₊²`.
    pub sum_sq: [f64; 2],
    /// `Σ T₋T₊`.
    pub sum_cross: f64,
}

impl TermMoments {
    /// Adds one pair `(Ψ(R), Λ(R))`.
    #[inline]
    pub fn push(&mut self, psi: f64, lambda: f64) {
        let k = self.kappa;
        let term = |e: Sign| {
            let a = if Sign::of(psi) == Some(e) {
                libm::pow(psi.abs(), k)
            } else {
                0.0
            };
            let b = if Sign::of(lambda) == Some(e) {
                libm::pow(lambda.abs(), k)
            } else {
                0.0
            };
            a - b
        };
        let t = [term(Sign::Minus), term(Sign::Plus)];
        self.n += 1;
        for (i, &x) in t.iter().enumerate() {
            self.sum[i] += x;
            self.sum_sq[i] += x * x;
        }
        self.sum_cross += t[0] * t[1];
    }

    /// Adds another accumulator with the same exponent.
    pub fn merge(&mut self, other: &TermMoments) {
        self.n += other.n;
        for i in 0..2 {
            self.sum[i] += other.sum[i];
            self.sum_sq[i] += other.sum_sq[i];
        }
        self.sum_cross += other.sum_cross;
    }

    /// Mean and standard error of `c₋T₋ + c₊T₊`.
    pub fn combination(&self, coef: [f64; 2]) -> MeanEstimate {
        if self.n == 0 {
            return MeanEstimate {
                mean: 0.0,
                std_error: 0.0,
                n: 0,
            };
        }
        let n = self.n as f64;
        let m = [self.sum[0] / n, self.sum[1] / n];
        let var0 = self.sum_sq[0] / n - m[0] * m[0];
        let var1 = self.sum_sq[1] / n - m[1] * m[1];
        let cov = self.sum_cross / n - m[0] * m[1];
        let var =
            coef[0] * coef[0] * var0 + coef[1] * coef[1] * var1 + 2.0 * coef[0] * coef[1] * cov;
        MeanEstimate {
            mean: coef[0] * m[0] + coef[1] * m[1],
            std_error: libm::sqrt(var.max(0.0) * n / (n - 1.0).max(1.0) / n),
            n: self.n,
        }
    }
}

/// Pairs every stationary sample with a fresh draw and accumulates the
/// terms at each exponent.
pub fn accumulate_terms(
    spec: &ModelSpec,
    samples: &[f64],
    kappas: &[f64],
    rng: &mut RandomStream,
) -> Vec<TermMoments> {
    let mut acc: Vec<TermMoments> = kappas
        .iter()
        .map(|&kappa| TermMoments {
            kappa,
            ..Default::default()
        })
        .collect();
    for &r in samples {
        if !r.is_finite() {
            continue;
        }
        let f = spec.sample_function(rng);
        let (psi, lambda) = (f.psi(r), f.lambda(r));
        if !psi.is_finite() {
            continue;
        }
        for a in acc.iter_mut() {
            a.push(psi, lambda);
        }
    }
    acc
}

/// One estimated constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    /// Name.
    pub label: String,
    /// Tail.
    pub tail: Sign,
    /// Exponent.
    pub kappa: f64,
    /// Estimate.
    pub value: f64,
    /// Standard error.
    pub std_error: f64,
    /// 95% normal interval.
    pub ci: (f64, f64),
    /// Pairs used.
    pub n_samples: u64,
    /// All hypotheses of the tail's theorem pass; otherwise the value is
    /// reported but not covered by the theory.
    pub covered: bool,
}

/// Evaluates every formula of a prediction on accumulated terms.
pub fn tail_constants(pred: &Prediction, terms: &[TermMoments]) -> Vec<ConstantEstimate> {
    pred.constants
        .iter()
        .filter_map(|c| {
            let t = terms.iter().find(|t| t.kappa == c.kappa)?;
            let est = t.combination(c.coef);
            Some(ConstantEstimate {
                label: c.label.clone(),
                tail: c.tail,
                kappa: c.kappa,
                value: est.mean,
                std_error: est.std_error,
                ci: est.ci(),
                n_samples: est.n,
                covered: pred.tails[c.tail.index()].covered,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ScalarDist;
    use crate::model::{Perturbation, SlopeCoupling};

    const PHI: f64 = 1.618_033_988_749_895;

    fn affine(a: ScalarDist) -> ModelSpec {
        ModelSpec::Affine {
            a,
            b: ScalarDist::PointMass { value: 1.0 },
        }
    }

    fn custom(minus: ScalarDist, plus: ScalarDist, perturbation: Perturbation) -> ModelSpec {
        ModelSpec::CustomTwoSlope {
            slopes: SlopeCoupling::Independent { minus, plus },
            b: ScalarDist::PointMass { value: 1.0 },
            perturbation,
        }
    }

    fn arch() -> ModelSpec {
        ModelSpec::Arch1 {
            beta: 1.0,
            lambda: 1.0,
            z: ScalarDist::standard_normal(),
        }
    }

    #[test]
    fn mrw_examples() {
        let spec = ModelSpec::CustomTwoSlope {
            slopes: SlopeCoupling::Comonotone {
                minus: ScalarDist::PointMass { value: 1.0 },
                plus: ScalarDist::TwoPoint {
                    v1: -0.5,
                    p1: 0.5,
                    v2: 2.0,
                },
            },
            b: ScalarDist::PointMass { value: 1.0 },
            perturbation: Perturbation::Shift,
        };
        // Find a seed producing the draws 2, −0.5.
        let seed = (0..1000)
            .find(|&s| {
                let mut r = RandomStream::new(s, 0);
                let a = spec.sample_function(&mut r).a_plus;
                let b = spec.sample_function(&mut r).a_plus;
                (a, b) == (2.0, -0.5)
            })
            .unwrap();
        let path = mrw_path(&spec, 1.0, 2, &mut RandomStream::new(seed, 0));
        assert_eq!((path[0].xi, path[0].s), (1, 0.0));
        assert_eq!((path[1].xi, path[1].s), (1, libm::log(2.0)));
        assert_eq!(path[2].xi, -1);
        assert!(path[2].s.abs() < 1e-15);

        let grave = mrw_path(&spec, 0.0, 3, &mut RandomStream::new(0, 0));
        assert!(grave.iter().all(|s| s.xi == 0 && s.s == f64::NEG_INFINITY));

        let slash = custom(
            ScalarDist::PointMass { value: 3.0 },
            ScalarDist::PointMass { value: 3.0 },
            Perturbation::Shift,
        );
        let p = mrw_path(&slash, -1.0, 4, &mut RandomStream::new(0, 0));
        for (k, s) in p.iter().enumerate() {
            assert_eq!(s.xi, -1);
            assert!((s.s - k as f64 * libm::log(3.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn grave_is_absorbing() {
        let spec = ModelSpec::Lindley {
            a: ScalarDist::Uniform { lo: -1.0, hi: 1.0 },
            b: ScalarDist::PointMass { value: 0.0 },
        };
        let p = mrw_path(&spec, 1.0, 50, &mut RandomStream::new(3, 0));
        let first = p.iter().position(|s| s.xi == 0).unwrap();
        assert!(p[first..]
            .iter()
            .all(|s| s.xi == 0 && s.s == f64::NEG_INFINITY));
    }

    #[test]
    fn deterministic_martingale_is_exact() {
        let spec = affine(ScalarDist::PointMass { value: 1.7 });
        let t = CramerTransform::new(&spec, MomentMethod::Auto);
        let r = martingale_statistic(&t, &spec, 0.8, 6, 10, &mut RandomStream::new(0, 0));
        // Separated diagonal with equal entries: the tie gives v = (1, 1).
        let r = r.unwrap();
        assert!(r.pass);
        for row in &r.rows {
            assert!((row.estimate - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn arch_martingale() {
        let spec = arch();
        let t = CramerTransform::new(&spec, MomentMethod::Auto);
        let r =
            martingale_statistic(&t, &spec, 1.0, 5, 20_000, &mut RandomStream::new(1, 0)).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.rows[0].estimate, 1.0);
    }

    #[test]
    fn goldie_tilted_atoms() {
        let spec = affine(ScalarDist::fair_two_point(2.0, 0.25));
        let t = CramerTransform::new(&spec, MomentMethod::Auto);
        let k = tail_index::solve_kappa(&t, 1e-13).unwrap().kappa.unwrap();
        let s = TiltedSampler::new(&t, k).unwrap();
        let atoms = s.atoms(Sign::Plus).unwrap();
        let up = atoms.iter().find(|a| a.0 == 2.0).unwrap().1;
        assert!((up - PHI / 2.0).abs() < 1e-10);
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tilted_rows_reproduce_phat() {
        let spec = ModelSpec::Ar1Arch1 {
            alpha: 0.3,
            beta: 1.0,
            lambda: 1.0,
            z: ScalarDist::Uniform { lo: -2.0, hi: 2.0 },
        };
        let t = CramerTransform::new(&spec, MomentMethod::Auto);
        let theta = 1.0;
        let s = TiltedSampler::new(&t, theta).unwrap();
        assert!(matches!(s.methods[0], TiltMethod::Rejection { .. }));
        let q = s.spectral.phat.unwrap();
        let mut rng = RandomStream::new(8, 0);
        let n = 100_000;
        for d in Sign::BOTH {
            let stay = (0..n)
                .filter(|_| {
                    let a = s.sample_slope(d, &mut rng);
                    a > 0.0
                })
                .count() as f64
                / n as f64;
            let p = q[d.index()][d.index()];
            let se = libm::sqrt(p * (1.0 - p) / n as f64);
            assert!((stay - p).abs() < 4.0 * se, "{d:?} {stay} {p}");
        }
        // Discretized rows for unbounded laws.
        let t = CramerTransform::new(&arch(), MomentMethod::Auto);
        let s = TiltedSampler::new(&t, 1.0).unwrap();
        assert_eq!(
            s.methods[1],
            TiltMethod::Discretized {
                cells: TILT_GRID_CELLS
            }
        );
        let st = tilted_step(&s, MrwState::start(1.0), &mut rng);
        assert_eq!(st.step, 1);
    }

    #[test]
    fn lattice_examples() {
        match lattice_check(&affine(ScalarDist::fair_two_point(2.0, 0.25))) {
            LatticeReport::Arithmetic { span: Some(d) } => {
                assert!((d - libm::log(2.0)).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            lattice_check(&affine(ScalarDist::fair_two_point(2.0, 0.1))),
            LatticeReport::Nonarithmetic { .. }
        ));
        assert_eq!(
            lattice_check(&arch()),
            LatticeReport::NonarithmeticByContinuity
        );
        assert_eq!(
            lattice_check(&affine(ScalarDist::PointMass { value: 1.0 })),
            LatticeReport::Arithmetic { span: None }
        );
        let one_atom = SlopeLaw::identity(ScalarDist::fair_two_point(-0.5, 1.2));
        match lattice_check_positive(&one_atom) {
            LatticeReport::Arithmetic { span: Some(d) } => {
                assert!((d - libm::log(1.2)).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rational_relations() {
        assert_eq!(rational_relation(-2.0, 1_000_000, 1e-9), Some((-2, 1)));
        assert_eq!(rational_relation(0.375, 1_000_000, 1e-9), Some((3, 8)));
        let r = libm::log(2.0) / libm::log(10.0);
        assert_eq!(rational_relation(r, 1_000_000, 1e-9), None);
    }

    #[test]
    fn arch_prediction_is_symmetric() {
        let p = predict(&arch(), MomentMethod::Auto, 1e-12).unwrap();
        assert_eq!(p.case, CaseTag::Irreducible);
        assert!(p
            .tails
            .iter()
            .all(|t| t.covered && (t.exponent.unwrap() - 2.0).abs() < 1e-9));
        let c: Vec<&ConstantFormula> = p.constants.iter().collect();
        assert_eq!(c.len(), 2);
        assert!((c[0].coef[0] - c[1].coef[1]).abs() < 1e-12);
    }

    #[test]
    fn unilateral_prediction() {
        let spec = custom(
            ScalarDist::fair_two_point(-0.5, 1.2),
            ScalarDist::fair_two_point(2.0, 0.1),
            Perturbation::SignedShift,
        );
        let p = predict(&spec, MomentMethod::Auto, 1e-12).unwrap();
        assert_eq!(p.case, CaseTag::UnilateralMinus);
        let left = &p.tails[0];
        let right = &p.tails[1];
        assert_eq!(left.theorem, Some(TailTheorem::UnilateralLeaking));
        assert!((left.exponent.unwrap() - 3.801_784_016_923_931).abs() < 1e-9);
        // ⁻A | ⁻A > 0 is a single atom: lattice hypothesis fails.
        assert!(!left.covered);
        assert_eq!(right.theorem, Some(TailTheorem::UnilateralReceiving));
        assert!((right.exponent.unwrap() - 0.907_963_449_733_675_2).abs() < 1e-9);
        assert!(right.covered);
        let labels: Vec<&str> = p.constants.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, ["c_minus", "c_plus_1", "c_plus_2", "c_plus"]);
    }

    #[test]
    fn unilateral_inherited_and_equal_roots() {
        // κ₊ absent: ⁺A ∈ {0.9, 0.1}.
        let spec = custom(
            ScalarDist::fair_two_point(-0.5, 3.0),
            ScalarDist::fair_two_point(0.9, 0.1),
            Perturbation::SignedShift,
        );
        let p = predict(&spec, MomentMethod::Auto, 1e-12).unwrap();
        assert_eq!(p.tails[1].theorem, Some(TailTheorem::UnilateralInherited));
        assert_eq!(p.tails[1].exponent, p.tails[0].exponent);

        let spec = custom(
            ScalarDist::fair_two_point(-0.5, 2.0),
            ScalarDist::fair_two_point(2.0, 0.0),
            Perturbation::SignedShift,
        );
        let p = predict(&spec, MomentMethod::Auto, 1e-12).unwrap();
        assert!(p.unsupported.is_some());
        assert!(p.constants.is_empty());
    }

    #[test]
    fn separated_prediction_and_constant() {
        let spec = affine(ScalarDist::fair_two_point(2.0, 0.1));
        let p = predict(&spec, MomentMethod::Auto, 1e-12).unwrap();
        assert_eq!(p.case, CaseTag::Separated);
        assert!(p.tails[1].covered);
        let mut rng = RandomStream::new(4, 0);
        let run = crate::sim::sample_stationary(&spec, 100_000, &Default::default(), &mut rng);
        let terms = accumulate_terms(&spec, &run.samples, &p.kappas(), &mut rng);
        let c = tail_constants(&p, &terms);
        let cp = c.iter().find(|c| c.label == "c_plus").unwrap();
        assert!(cp.ci.0 > 0.0, "{cp:?}");
    }

    #[test]
    fn contraction_constant_vanishes() {
        let spec = affine(ScalarDist::PointMass { value: 0.5 });
        let p = predict(&spec, MomentMethod::Auto, 1e-12).unwrap();
        assert!(p.constants.is_empty());
        assert!(p.tails.iter().all(|t| t.exponent.is_none()));
    }

    #[test]
    fn term_combination_matches_direct() {
        let mut t = TermMoments {
            kappa: 1.0,
            ..Default::default()
        };
        for &(p, l) in &[(2.0, 1.0), (-3.0, -1.0), (0.5, -0.5)] {
            t.push(p, l);
        }
        // T₋ = (0, 2, −0.5), T₊ = (1, 0, 0.5)
        let m = t.combination([1.0, 1.0]);
        assert!((m.mean - 1.0).abs() < 1e-15);
        let direct = MeanEstimate::of([1.0, 2.0, 0.0]);
        assert!((m.std_error - direct.std_error).abs() < 1e-14);
    }
}
