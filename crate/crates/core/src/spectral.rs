//! Cramér transform `P(θ)` of the slope pair, its Perron root and
//! eigenvectors, the case taxonomy and the degeneracy scan.
//!
//! Entries are indexed `[δ][ε]` with `−` = 0 and `+` = 1:
//! `p_{δε}(θ) = E|^δA|^θ·1{sign(^δA)·δ = ε}`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::Sign;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::rng::RandomStream;
use crate::slope::{Evaluation, MomentKind, Provenance, SlopeLaw};

/// Requested evaluation route for matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum MomentMethod {
    /// Closed forms where available, quadrature otherwise.
    #[default]
    Auto,
    /// Closed forms only.
    Analytic,
    /// Quadrature for every continuous law.
    Quadrature,
    /// Plain Monte Carlo over function draws.
    MonteCarlo {
        /// Number of draws.
        samples: u64,
        /// Stream seed.
        seed: u64,
    },
}

/// How the entries of a matrix were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixProvenance {
    /// Closed forms or exact finite sums.
    Analytic,
    /// At least one entry by quadrature.
    Quadrature,
    /// Monte Carlo estimate from `n` draws.
    MonteCarlo {
        /// Number of draws.
        n: u64,
    },
}

/// `P(θ)` (or its derivative `P′(θ)`) with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CramerMatrix {
    /// Argument.
    pub theta: f64,
    /// `p₋₋`.
    pub p_mm: f64,
    /// `p₋₊`.
    pub p_mp: f64,
    /// `p₊₋`.
    pub p_pm: f64,
    /// `p₊₊`.
    pub p_pp: f64,
    /// Evaluation route.
    pub method: MatrixProvenance,
    /// Bound on the worst entry error (standard error for Monte Carlo).
    pub abs_error: f64,
    /// Per-entry standard errors for Monte Carlo matrices, in `[δ][ε]` order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<[[f64; 2]; 2]>,
    /// Entries known to vanish from the support of the slope laws.
    pub structural_zero: [[bool; 2]; 2],
}

impl CramerMatrix {
    /// Exact matrix from raw entries; zeros are taken as structural.
    pub fn from_entries(theta: f64, p: [[f64; 2]; 2]) -> Self {
        Self {
            theta,
            p_mm: p[0][0],
            p_mp: p[0][1],
            p_pm: p[1][0],
            p_pp: p[1][1],
            method: MatrixProvenance::Analytic,
            abs_error: 0.0,
            std_errors: None,
            structural_zero: [
                [p[0][0] == 0.0, p[0][1] == 0.0],
                [p[1][0] == 0.0, p[1][1] == 0.0],
            ],
        }
    }

    /// Entries as a 2×2 array.
    #[inline]
    pub fn entries(&self) -> [[f64; 2]; 2] {
        [[self.p_mm, self.p_mp], [self.p_pm, self.p_pp]]
    }

    /// Entry `p_{δε}`.
    #[inline]
    pub fn get(&self, from: Sign, to: Sign) -> f64 {
        self.entries()[from.index()][to.index()]
    }
}

/// Shape of the eigen problem, mirroring the case taxonomy of `P(θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenStructure {
    /// Both off-diagonal entries positive.
    Irreducible,
    /// Triangular with the dominant diagonal entry on the receiving side:
    /// both components of `v` positive.
    TriangularRegular,
    /// Triangular with the dominant diagonal entry on the leaking side:
    /// one component of `v` vanishes.
    TriangularDefective,
    /// Triangular with equal diagonal entries: `uᵀv = 1` is impossible.
    TriangularBoundary,
    /// Diagonal with distinct entries.
    Diagonal,
    /// Diagonal with equal entries: every vector is an eigenvector.
    DiagonalTie,
}

/// Perron root and normalized eigenvectors of `P(θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    /// Argument.
    pub theta: f64,
    /// Spectral radius.
    pub rho: f64,
    /// Left eigenvector with `u₋ + u₊ = 1`.
    pub u: [f64; 2],
    /// Right eigenvector with `uᵀv = 1`.
    pub v: [f64; 2],
    /// `(u₋v₋, u₊v₊)` when the normalization holds.
    pub pihat: Option<[f64; 2]>,
    /// Stochastic matrix `p_{δε}v_ε/(ρv_δ)` when `v > 0`.
    pub phat: Option<[[f64; 2]; 2]>,
    /// Eigen structure.
    pub structure: EigenStructure,
    /// The nonnegative eigen-pair is unique.
    pub eigen_unique: bool,
    /// `uᵀv = 1` could be imposed.
    pub normalized: bool,
}

impl SpectralData {
    /// Fails with `EigenDegenerate` unless the normalization holds.
    pub fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::EigenDegenerate)
        }
    }

    /// `u_δ`.
    #[inline]
    pub fn u_of(&self, s: Sign) -> f64 {
        self.u[s.index()]
    }

    /// `v_δ`.
    #[inline]
    pub fn v_of(&self, s: Sign) -> f64 {
        self.v[s.index()]
    }

    /// Largest of `‖uᵀP − ρuᵀ‖∞` and `‖Pv − ρv‖∞`.
    pub fn residual(&self, m: &CramerMatrix) -> f64 {
        let p = m.entries();
        let (u, v, r) = (self.u, self.v, self.rho);
        let left = [
            u[0] * p[0][0] + u[1] * p[1][0] - r * u[0],
            u[0] * p[0][1] + u[1] * p[1][1] - r * u[1],
        ];
        let right = [
            p[0][0] * v[0] + p[0][1] * v[1] - r * v[0],
            p[1][0] * v[0] + p[1][1] * v[1] - r * v[1],
        ];
        left.iter()
            .chain(right.iter())
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }
}

/// Sign-transition structure of the driving chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// `p₋₊ > 0` and `p₊₋ > 0`.
    Irreducible,
    /// `p₋₊ > 0` and `p₊₋ = 0`.
    UnilateralMinus,
    /// `p₊₋ > 0` and `p₋₊ = 0`.
    UnilateralPlus,
    /// `p₋₊ = p₊₋ = 0`.
    Separated,
}

/// `sup{θ : E|⁻A|^θ + E|⁺A|^θ < ∞}`.
pub fn moment_domain_sup(spec: &ModelSpec) -> f64 {
    spec.slope_law(Sign::Minus)
        .theta_max()
        .min(spec.slope_law(Sign::Plus).theta_max())
}

/// The slope laws of a model together with an evaluation route; evaluates
/// `P(θ)` and `P′(θ)` at any `θ` in the moment domain.
#[derive(Debug, Clone)]
pub struct CramerTransform {
    spec: ModelSpec,
    laws: [SlopeLaw; 2],
    method: MomentMethod,
    domain_sup: f64,
}

struct Entries {
    p: [[f64; 2]; 2],
    se: Option<[[f64; 2]; 2]>,
    err: f64,
    all_analytic: bool,
}

impl CramerTransform {
    /// Builds the transform for `spec`.
    pub fn new(spec: &ModelSpec, method: MomentMethod) -> Self {
        let laws = [spec.slope_law(Sign::Minus), spec.slope_law(Sign::Plus)];
        let domain_sup = laws[0].theta_max().min(laws[1].theta_max());
        Self {
            spec: spec.clone(),
            laws,
            method,
            domain_sup,
        }
    }

    /// Slope law on `side`.
    pub fn law(&self, side: Sign) -> &SlopeLaw {
        &self.laws[side.index()]
    }

    /// The evaluation route.
    pub fn method(&self) -> MomentMethod {
        self.method
    }

    /// Upper end of the moment domain.
    pub fn domain_sup(&self) -> f64 {
        self.domain_sup
    }

    fn structural_zero(&self) -> [[bool; 2]; 2] {
        let mut z = [[false; 2]; 2];
        for d in Sign::BOTH {
            for e in Sign::BOTH {
                z[d.index()][e.index()] = !self.laws[d.index()].can_take(e.times(d));
            }
        }
        z
    }

    fn eval(&self, theta: f64, kind: MomentKind) -> Result<Entries> {
        if !(theta >= 0.0) || theta >= self.domain_sup {
            return Err(Error::MomentDivergence(theta));
        }
        if let MomentMethod::MonteCarlo { samples, seed } = self.method {
            return Ok(self.monte_carlo(theta, kind, samples, seed));
        }
        let mode = match self.method {
            MomentMethod::Analytic => Evaluation::AnalyticOnly,
            MomentMethod::Quadrature => Evaluation::QuadratureOnly,
            _ => Evaluation::Auto,
        };
        let mut p = [[0.0; 2]; 2];
        let mut err = 0.0f64;
        let mut all_analytic = true;
        for d in Sign::BOTH {
            for e in Sign::BOTH {
                let m = self.laws[d.index()].moment_with(theta, e.times(d), kind, mode)?;
                p[d.index()][e.index()] = m.value;
                err = err.max(m.abs_error);
                all_analytic &= m.provenance == Provenance::Analytic;
            }
        }
        Ok(Entries {
            p,
            se: None,
            err,
            all_analytic,
        })
    }

    fn monte_carlo(&self, theta: f64, kind: MomentKind, samples: u64, seed: u64) -> Entries {
        let mut rng = RandomStream::new(seed, 0);
        let mut sum = [[0.0f64; 2]; 2];
        let mut sq = [[0.0f64; 2]; 2];
        let zero = self.structural_zero();
        for _ in 0..samples {
            let f = self.spec.sample_function(&mut rng);
            for d in Sign::BOTH {
                let a = f.slope(d);
                let Some(s) = Sign::of(a) else { continue };
                let e = s.times(d);
                if zero[d.index()][e.index()] {
                    continue;
                }
                let x = a.abs();
                let mut w = libm::pow(x, theta);
                if kind == MomentKind::PowerLog {
                    w *= libm::log(x);
                }
                sum[d.index()][e.index()] += w;
                sq[d.index()][e.index()] += w * w;
            }
        }
        let n = samples.max(1) as f64;
        let mut p = [[0.0; 2]; 2];
        let mut se = [[0.0; 2]; 2];
        let mut err = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let mean = sum[i][j] / n;
                let var = (sq[i][j] / n - mean * mean).max(0.0);
                p[i][j] = mean;
                se[i][j] = libm::sqrt(var / n);
                err = err.max(se[i][j]);
            }
        }
        Entries {
            p,
            se: Some(se),
            err,
            all_analytic: false,
        }
    }

    fn wrap(&self, theta: f64, e: Entries) -> CramerMatrix {
        let method = match self.method {
            MomentMethod::MonteCarlo { samples, .. } => MatrixProvenance::MonteCarlo { n: samples },
            _ if e.all_analytic => MatrixProvenance::Analytic,
            _ => MatrixProvenance::Quadrature,
        };
        CramerMatrix {
            theta,
            p_mm: e.p[0][0],
            p_mp: e.p[0][1],
            p_pm: e.p[1][0],
            p_pp: e.p[1][1],
            method,
            abs_error: e.err,
            std_errors: e.se,
            structural_zero: self.structural_zero(),
        }
    }

    /// `P(θ)`.
    pub fn matrix(&self, theta: f64) -> Result<CramerMatrix> {
        let e = self.eval(theta, MomentKind::Power)?;
        Ok(self.wrap(theta, e))
    }

    /// `P′(θ)`, entries `E|^δA|^θ log|^δA|·1{…}` (may be negative).
    pub fn derivative(&self, theta: f64) -> Result<CramerMatrix> {
        let e = self.eval(theta, MomentKind::PowerLog)?;
        Ok(self.wrap(theta, e))
    }

    /// `ρ(θ)`.
    pub fn rho(&self, theta: f64) -> Result<f64> {
        Ok(spectral_radius(&self.matrix(theta)?))
    }
}

/// `P(θ)` for `spec`.
pub fn cramer_matrix(spec: &ModelSpec, theta: f64, method: MomentMethod) -> Result<CramerMatrix> {
    CramerTransform::new(spec, method).matrix(theta)
}

/// `ρ − p₋₋` and `ρ − p₊₊`, computed without cancellation.
fn gaps(p: &[[f64; 2]; 2]) -> (f64, f64, f64) {
    let (a, b, c, d) = (p[0][0], p[0][1], p[1][0], p[1][1]);
    let h = 0.5 * (a - d);
    let bc = b * c;
    let r = libm::sqrt(h * h + bc);
    let rho_minus_a = if h > 0.0 { bc / (r + h) } else { r - h };
    let rho_minus_d = if h < 0.0 { bc / (r - h) } else { r + h };
    (0.5 * (a + d) + r, rho_minus_a, rho_minus_d)
}

/// Dominant eigenvalue `(p₋₋+p₊₊)/2 + √((p₋₋−p₊₊)²/4 + p₋₊p₊₋)`.
pub fn spectral_radius(m: &CramerMatrix) -> f64 {
    gaps(&m.entries()).0
}

/// Eigen-pair with `u₋ + u₊ = 1` and `uᵀv = 1`. Boundary cases come back
/// with the relevant flags unset rather than as errors.
pub fn eigen_pair(m: &CramerMatrix) -> Result<SpectralData> {
    let p = m.entries();
    let (a, b, c, d) = (p[0][0], p[0][1], p[1][0], p[1][1]);
    let (rho, ra, rd) = gaps(&p);
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::ZeroSpectralRadius);
    }
    let tie = (a - d).abs() <= 1e-10 * rho;
    let (u, v, structure, unique, normalized) = if b > 0.0 && c > 0.0 {
        let (u, v) = if ra >= rd {
            ([c, ra], [b, ra])
        } else {
            ([rd, b], [rd, c])
        };
        (u, v, EigenStructure::Irreducible, true, true)
    } else if b > 0.0 || c > 0.0 {
        // Triangular: `leak` is the state that can move to the other one.
        let upper = b > 0.0;
        let (p_leak, p_recv, off) = if upper { (a, d, b) } else { (d, a, c) };
        let (u, v, s, n) = if tie {
            (
                [0.0, 1.0],
                [1.0, 0.0],
                EigenStructure::TriangularBoundary,
                false,
            )
        } else if p_recv > p_leak {
            (
                [0.0, 1.0],
                [off / (p_recv - p_leak), 1.0],
                EigenStructure::TriangularRegular,
                true,
            )
        } else {
            let w = p_leak - p_recv + off;
            let u0 = (p_leak - p_recv) / w;
            (
                [u0, off / w],
                [1.0 / u0, 0.0],
                EigenStructure::TriangularDefective,
                true,
            )
        };
        // Vectors above are in (leak, receive) order.
        let flip = |x: [f64; 2]| if upper { x } else { [x[1], x[0]] };
        (flip(u), flip(v), s, true, n)
    } else if tie {
        (
            [0.5, 0.5],
            [1.0, 1.0],
            EigenStructure::DiagonalTie,
            false,
            true,
        )
    } else if a > d {
        ([1.0, 0.0], [1.0, 0.0], EigenStructure::Diagonal, true, true)
    } else {
        ([0.0, 1.0], [0.0, 1.0], EigenStructure::Diagonal, true, true)
    };
    let (u, v) = if normalized && structure == EigenStructure::Irreducible {
        let s = u[0] + u[1];
        let u = [u[0] / s, u[1] / s];
        let k = u[0] * v[0] + u[1] * v[1];
        (u, [v[0] / k, v[1] / k])
    } else {
        (u, v)
    };
    let pihat = normalized.then(|| [u[0] * v[0], u[1] * v[1]]);
    let mut out = SpectralData {
        theta: m.theta,
        rho,
        u,
        v,
        pihat,
        phat: None,
        structure,
        eigen_unique: unique,
        normalized,
    };
    out.phat = phat(m, &out).ok();
    Ok(out)
}

/// Stochastic matrix `p_{δε}·v_ε/(ρ·v_δ)`.
pub fn phat(m: &CramerMatrix, s: &SpectralData) -> Result<[[f64; 2]; 2]> {
    if !(s.v[0] > 0.0 && s.v[1] > 0.0) {
        return Err(Error::NotDefinable);
    }
    let p = m.entries();
    let mut q = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            q[i][j] = p[i][j] * s.v[j] / (s.rho * s.v[i]);
        }
    }
    Ok(q)
}

fn entry_is_zero(m: &CramerMatrix, i: usize, j: usize) -> Result<bool> {
    if m.structural_zero[i][j] {
        return Ok(true);
    }
    let x = m.entries()[i][j];
    match (m.method, m.std_errors) {
        (MatrixProvenance::MonteCarlo { .. }, Some(se)) => {
            if x <= 4.0 * se[i][j] {
                Err(Error::AmbiguousClassification)
            } else {
                Ok(false)
            }
        }
        _ => Ok(x == 0.0),
    }
}

/// Case taxonomy from the off-diagonal entries of `P(0)`.
pub fn classify_case(p0: &CramerMatrix) -> Result<CaseTag> {
    let mp = !entry_is_zero(p0, 0, 1)?;
    let pm = !entry_is_zero(p0, 1, 0)?;
    Ok(match (mp, pm) {
        (true, true) => CaseTag::Irreducible,
        (true, false) => CaseTag::UnilateralMinus,
        (false, true) => CaseTag::UnilateralPlus,
        (false, false) => CaseTag::Separated,
    })
}

/// Stationary law `(p₊₋, p₋₊)/(p₋₊ + p₊₋)` of a stochastic irreducible `P(0)`.
pub fn stationary_pi(p0: &CramerMatrix) -> Result<[f64; 2]> {
    let p = p0.entries();
    for row in &p {
        if (row[0] + row[1] - 1.0).abs() > 1e-12 {
            return Err(Error::NotStochastic);
        }
    }
    if classify_case(p0)? != CaseTag::Irreducible {
        return Err(Error::NotIrreducible);
    }
    let s = p0.p_mp + p0.p_pm;
    Ok([p0.p_pm / s, p0.p_mp / s])
}

/// Which alternative explains `ρ ≡ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "alternative", rename_all = "snake_case")]
pub enum DegeneracyAlternative {
    /// One off-diagonal entry vanishes and the slope on `side` is a.s. 1.
    UnitSlope {
        /// Side with the unit slope.
        side: Sign,
    },
    /// Atoms `{1, −1/a}` for `⁻A` and `{1, −a}` for `⁺A` with constant
    /// off-diagonal product.
    TwoAtom {
        /// The parameter `a`.
        a: f64,
        /// `p₋₊(θ)·p₊₋(θ)`.
        product: f64,
    },
    /// `ρ ≡ 1` on the grid but no known structure matched.
    Unidentified,
}

/// Outcome of [`degeneracy_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    /// `|ρ(θ) − 1| < 1e-10` on the whole grid.
    pub flagged: bool,
    /// `max |ρ(θ) − 1|` over the grid.
    pub max_residual: f64,
    /// `max |(1−p₋₋)(1−p₊₊) − p₋₊p₊₋|` over the grid.
    pub identity_residual: f64,
    /// Structure when flagged.
    pub alternative: Option<DegeneracyAlternative>,
}

fn is_unit_slope(law: &SlopeLaw) -> bool {
    match law.merged_atoms() {
        Some(atoms) => atoms.len() == 1 && atoms[0].0 == 1.0,
        None => false,
    }
}

fn unit_and_negative(law: &SlopeLaw) -> Option<f64> {
    let atoms = law.merged_atoms()?;
    if atoms.len() != 2 {
        return None;
    }
    let one = atoms.iter().any(|&(v, _)| v == 1.0);
    let neg = atoms.iter().find(|&&(v, _)| v < 0.0)?;
    one.then_some(neg.0)
}

/// Tests whether `ρ ≡ 1` on `grid` and, if so, identifies the structure.
pub fn degeneracy_scan(
    spec: &ModelSpec,
    grid: &[f64],
    method: MomentMethod,
) -> Result<DegeneracyReport> {
    let t = CramerTransform::new(spec, method);
    let mut max_residual = 0.0f64;
    let mut identity_residual = 0.0f64;
    let mut products = Vec::with_capacity(grid.len());
    for &theta in grid {
        let m = t.matrix(theta)?;
        max_residual = max_residual.max((spectral_radius(&m) - 1.0).abs());
        identity_residual =
            identity_residual.max(((1.0 - m.p_mm) * (1.0 - m.p_pp) - m.p_mp * m.p_pm).abs());
        products.push(m.p_mp * m.p_pm);
    }
    let flagged = !grid.is_empty() && max_residual < 1e-10;
    let alternative = flagged.then(|| {
        let p0 = products[0];
        let constant = products
            .iter()
            .all(|&q| (q - p0).abs() <= 1e-12 * p0.abs().max(1e-300));
        if p0 == 0.0 {
            for side in Sign::BOTH {
                if is_unit_slope(t.law(side)) {
                    return DegeneracyAlternative::UnitSlope { side };
                }
            }
            DegeneracyAlternative::Unidentified
        } else if let (true, Some(nm), Some(np)) = (
            constant,
            unit_and_negative(t.law(Sign::Minus)),
            unit_and_negative(t.law(Sign::Plus)),
        ) {
            if (nm * np - 1.0).abs() < 1e-12 {
                DegeneracyAlternative::TwoAtom {
                    a: -np,
                    product: p0,
                }
            } else {
                DegeneracyAlternative::Unidentified
            }
        } else {
            DegeneracyAlternative::Unidentified
        }
    });
    Ok(DegeneracyReport {
        flagged,
        max_residual,
        identity_residual,
        alternative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ScalarDist;

    fn m(p: [[f64; 2]; 2]) -> CramerMatrix {
        CramerMatrix::from_entries(1.0, p)
    }

    fn affine(a: ScalarDist) -> ModelSpec {
        ModelSpec::Affine {
            a,
            b: ScalarDist::PointMass { value: 1.0 },
        }
    }

    fn ar_arch(alpha: f64, z: ScalarDist) -> ModelSpec {
        ModelSpec::Ar1Arch1 {
            alpha,
            beta: 1.0,
            lambda: 1.0,
            z,
        }
    }

    #[test]
    fn cramer_examples() {
        let c = cramer_matrix(
            &affine(ScalarDist::fair_two_point(2.0, 0.25)),
            1.0,
            MomentMethod::Auto,
        )
        .unwrap();
        assert_eq!(c.entries(), [[1.125, 0.0], [0.0, 1.125]]);
        let arch = ModelSpec::Arch1 {
            beta: 1.0,
            lambda: 1.0,
            z: ScalarDist::standard_normal(),
        };
        for method in [MomentMethod::Analytic, MomentMethod::Quadrature] {
            let c = cramer_matrix(&arch, 2.0, method).unwrap();
            for row in c.entries() {
                for x in row {
                    assert!((x - 0.5).abs() < 1e-10, "{method:?} {x}");
                }
            }
        }
        let c = cramer_matrix(
            &affine(ScalarDist::PointMass { value: 0.5 }),
            1.0,
            MomentMethod::Auto,
        )
        .unwrap();
        assert_eq!(c.entries(), [[0.5, 0.0], [0.0, 0.5]]);
    }

    #[test]
    fn divergence_outside_domain() {
        let spec = affine(ScalarDist::Pareto {
            scale: 0.1,
            alpha: 3.0,
        });
        assert!(matches!(
            cramer_matrix(&spec, 3.5, MomentMethod::Auto),
            Err(Error::MomentDivergence(_))
        ));
    }

    #[test]
    fn radius_examples() {
        assert_eq!(spectral_radius(&m([[0.5, 0.0], [0.0, 0.8]])), 0.8);
        assert_eq!(spectral_radius(&m([[0.5, 0.5], [0.5, 0.5]])), 1.0);
        assert!((spectral_radius(&m([[0.2, 0.3], [0.4, 0.1]])) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eigen_examples() {
        let s = eigen_pair(&m([[0.5, 0.5], [0.5, 0.5]])).unwrap();
        assert_eq!(
            (s.u, s.v, s.pihat),
            ([0.5, 0.5], [1.0, 1.0], Some([0.5, 0.5]))
        );

        let c = m([[0.2, 0.4], [0.0, 0.6]]);
        let s = eigen_pair(&c).unwrap();
        assert_eq!(s.u, [0.0, 1.0]);
        assert!((s.v[0] - 1.0).abs() < 1e-15 && s.v[1] == 1.0);
        assert!(s.residual(&c) < 1e-12);
        let q = s.phat.unwrap();
        assert!((q[0][0] - 1.0 / 3.0).abs() < 1e-15 && (q[0][1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(q[1], [0.0, 1.0]);

        let c = m([[0.2, 0.3], [0.4, 0.1]]);
        let s = eigen_pair(&c).unwrap();
        assert!((s.u[0] - 4.0 / 7.0).abs() < 1e-15 && (s.u[1] - 3.0 / 7.0).abs() < 1e-15);
        assert!((s.v[0] - 1.0).abs() < 1e-14 && (s.v[1] - 1.0).abs() < 1e-14);
        assert!(s.residual(&c) < 1e-12 * s.rho);
    }

    #[test]
    fn defective_and_boundary() {
        let c = m([[0.7, 0.2], [0.0, 0.3]]);
        let s = eigen_pair(&c).unwrap();
        assert_eq!(s.structure, EigenStructure::TriangularDefective);
        assert_eq!(s.v[1], 0.0);
        assert!(s.residual(&c) < 1e-14);
        assert!((s.u[0] * s.v[0] - 1.0).abs() < 1e-14);
        assert!(matches!(phat(&c, &s), Err(Error::NotDefinable)));

        let c = m([[0.4, 0.2], [0.0, 0.4]]);
        let s = eigen_pair(&c).unwrap();
        assert_eq!(s.structure, EigenStructure::TriangularBoundary);
        assert!(!s.normalized);
        assert!(matches!(
            s.require_normalized(),
            Err(Error::EigenDegenerate)
        ));

        let c = m([[0.1, 0.0], [0.5, 0.6]]);
        let s = eigen_pair(&c).unwrap();
        assert_eq!(s.structure, EigenStructure::TriangularDefective);
        assert!(s.residual(&c) < 1e-14);
    }

    #[test]
    fn stationary_pi_examples() {
        assert_eq!(
            stationary_pi(&m([[0.5, 0.5], [0.5, 0.5]])).unwrap(),
            [0.5, 0.5]
        );
        let p = stationary_pi(&m([[0.8, 0.2], [0.6, 0.4]])).unwrap();
        assert!((p[0] - 0.75).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15);
        assert!(matches!(
            stationary_pi(&m([[1.0, 0.0], [0.3, 0.7]])),
            Err(Error::NotIrreducible)
        ));
        assert!(matches!(
            stationary_pi(&m([[0.5, 0.0], [0.3, 0.7]])),
            Err(Error::NotStochastic)
        ));
    }

    #[test]
    fn classification_table() {
        let cases = [
            (
                ar_arch(1.0, ScalarDist::standard_normal()),
                CaseTag::Irreducible,
            ),
            (
                ar_arch(1.0, ScalarDist::Uniform { lo: -0.5, hi: 0.5 }),
                CaseTag::Separated,
            ),
            (
                ar_arch(0.5, ScalarDist::Uniform { lo: -0.4, hi: 2.0 }),
                CaseTag::UnilateralMinus,
            ),
        ];
        for (spec, want) in cases {
            let p0 = cramer_matrix(&spec, 0.0, MomentMethod::Auto).unwrap();
            assert_eq!(classify_case(&p0).unwrap(), want);
        }
    }

    #[test]
    fn monte_carlo_never_certifies_zero() {
        let spec = ar_arch(1.0, ScalarDist::Uniform { lo: -0.5, hi: 0.5 });
        let p0 = cramer_matrix(
            &spec,
            0.0,
            MomentMethod::MonteCarlo {
                samples: 1000,
                seed: 3,
            },
        )
        .unwrap();
        assert_eq!(classify_case(&p0).unwrap(), CaseTag::Separated);
        // Tiny but positive crossing probability: a handful of draws cannot decide it.
        let spec = ar_arch(
            1.0,
            ScalarDist::Uniform {
                lo: -1.0 - 1e-9,
                hi: 0.5,
            },
        );
        let p0 = cramer_matrix(
            &spec,
            0.0,
            MomentMethod::MonteCarlo {
                samples: 1000,
                seed: 3,
            },
        )
        .unwrap();
        assert!(matches!(
            classify_case(&p0),
            Err(Error::AmbiguousClassification)
        ));
    }

    #[test]
    fn degeneracy_two_atom() {
        let spec = ModelSpec::CustomTwoSlope {
            slopes: crate::model::SlopeCoupling::Independent {
                minus: ScalarDist::fair_two_point(1.0, -2.0),
                plus: ScalarDist::fair_two_point(1.0, -0.5),
            },
            b: ScalarDist::PointMass { value: 1.0 },
            perturbation: crate::model::Perturbation::Shift,
        };
        let grid: Vec<f64> = (0..=40).map(|i| 0.1 * i as f64).collect();
        let r = degeneracy_scan(&spec, &grid, MomentMethod::Auto).unwrap();
        assert!(r.flagged);
        assert!(r.max_residual < 1e-12);
        assert!(r.identity_residual < 1e-12);
        match r.alternative.unwrap() {
            DegeneracyAlternative::TwoAtom { a, product } => {
                assert_eq!(a, 0.5);
                assert!((product - 0.25).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degeneracy_unit_slope_and_negative() {
        let grid = [0.5, 1.0, 2.0];
        let r = degeneracy_scan(
            &affine(ScalarDist::PointMass { value: 1.0 }),
            &grid,
            MomentMethod::Auto,
        )
        .unwrap();
        assert!(r.flagged);
        assert!(matches!(
            r.alternative,
            Some(DegeneracyAlternative::UnitSlope { .. })
        ));
        let arch = ModelSpec::Arch1 {
            beta: 1.0,
            lambda: 1.0,
            z: ScalarDist::standard_normal(),
        };
        assert!(
            !degeneracy_scan(&arch, &grid, MomentMethod::Auto)
                .unwrap()
                .flagged
        );
    }
}
