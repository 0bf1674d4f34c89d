//! Tail exponents `κ`, `κ₋`, `κ₊` and the stationary drift at `κ`.
//!
//! All three exponents are roots of `f(θ) = 1` for a log-convex `f`
//! (`ρ`, `p₋₋` or `p₊₊`). The solver probes `θ = 1e-3, 2e-3, 4e-3, …`
//! until `f` exceeds one, then refines inside the bracket.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::Sign;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::spectral::{self, CramerTransform, MomentMethod};

/// Largest `θ` the bracket search will try.
pub const THETA_CAP: f64 = 256.0;

const FIRST_PROBE: f64 = 1e-3;
const MAX_REFINE: usize = 300;

/// Diagnostics attached to a root search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KappaFlags {
    /// `f(θ) < 1` at some probe.
    pub rho_dips_below_one: bool,
    /// `f` decreases between `θ = 0` and the first probe.
    pub drift_negative_at_zero: bool,
    /// `f(θ) > 1` at some probe.
    pub exceeds_one: bool,
    /// The probe sequence stopped at [`THETA_CAP`].
    pub cap_reached: bool,
}

/// Result of a root search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaSolution {
    /// The root, when one exists in the moment domain.
    pub kappa: Option<f64>,
    /// Final bracket.
    pub bracket: (f64, f64),
    /// `f(κ) − 1`.
    pub residual: f64,
    /// Refinement steps.
    pub iterations: usize,
    /// Upper end of the moment domain.
    pub domain_sup: f64,
    /// Diagnostics.
    pub flags: KappaFlags,
    /// Every `(θ, f(θ))` evaluated, in order.
    pub history: Vec<(f64, f64)>,
}

/// `sup{θ ≥ 0 : E|⁻A|^θ + E|⁺A|^θ < ∞}`.
pub fn domain_sup(spec: &ModelSpec) -> f64 {
    spectral::moment_domain_sup(spec)
}

/// Root of `f(θ) = 1` on `(0, min(sup, THETA_CAP)]`.
fn solve<F: FnMut(f64) -> Result<f64>>(mut f: F, sup: f64, tol: f64) -> Result<KappaSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut history: Vec<(f64, f64)> = Vec::new();
    let mut flags = KappaFlags::default();
    let f0 = f(0.0)?;
    history.push((0.0, f0));
    let cap = sup.min(THETA_CAP);
    let domain_limited = sup <= THETA_CAP;

    let mut lo = 0.0;
    let mut flo = f0;
    let mut hi = None;
    let mut theta = FIRST_PROBE.min(0.5 * cap);
    let mut approach = 0;
    loop {
        let v = f(theta)?;
        history.push((theta, v));
        if history.len() == 2 {
            flags.drift_negative_at_zero = v < f0;
        }
        if v > 1.0 {
            flags.exceeds_one = true;
            hi = Some((theta, v));
            break;
        }
        if v < 1.0 {
            flags.rho_dips_below_one = true;
            lo = theta;
            flo = v;
        }
        if theta >= cap {
            flags.cap_reached = true;
            break;
        }
        let next = 2.0 * theta;
        if next < cap {
            theta = next;
        } else if domain_limited {
            // Creep toward the divergence point without touching it.
            approach += 1;
            if approach > 60 {
                break;
            }
            theta = 0.5 * (theta + cap);
        } else {
            theta = cap;
        }
    }

    if history.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-10) {
        return Err(Error::DegenerateSpectrum);
    }

    let Some((mut hi, mut fhi)) = hi else {
        let last = history.last().copied().unwrap_or((0.0, f0));
        return Ok(KappaSolution {
            kappa: None,
            bracket: (lo, last.0),
            residual: last.1 - 1.0,
            iterations: 0,
            domain_sup: sup,
            flags,
            history,
        });
    };
    if !(flo < 1.0) {
        // f never went below one before exceeding it.
        return Ok(KappaSolution {
            kappa: None,
            bracket: (lo, hi),
            residual: fhi - 1.0,
            iterations: 0,
            domain_sup: sup,
            flags,
            history,
        });
    }

    let mut best = if (flo - 1.0).abs() < (fhi - 1.0).abs() {
        (lo, flo)
    } else {
        (hi, fhi)
    };
    let mut iterations = 0;
    let mut last_width = hi - lo;
    while iterations < MAX_REFINE {
        let width = hi - lo;
        if (best.1 - 1.0).abs() < tol && width < tol * best.0.max(1.0) {
            break;
        }
        iterations += 1;
        let secant = lo + (1.0 - flo) * (hi - lo) / (fhi - flo);
        let interior = secant > lo + 0.01 * width && secant < hi - 0.01 * width;
        // Fall back to bisection when the secant stalls.
        let x = if interior && width < 0.75 * last_width.max(width * 1.5) && iterations % 3 != 0 {
            secant
        } else {
            0.5 * (lo + hi)
        };
        last_width = width;
        if x <= lo || x >= hi {
            break;
        }
        let v = f(x)?;
        history.push((x, v));
        if (v - 1.0).abs() < (best.1 - 1.0).abs() {
            best = (x, v);
        }
        if v < 1.0 {
            lo = x;
            flo = v;
        } else if v > 1.0 {
            hi = x;
            fhi = v;
        } else {
            lo = x;
            hi = x;
            best = (x, v);
            break;
        }
    }
    Ok(KappaSolution {
        kappa: Some(best.0),
        bracket: (lo, hi),
        residual: best.1 - 1.0,
        iterations,
        domain_sup: sup,
        flags,
        history,
    })
}

/// Root of `ρ(κ) = 1`.
pub fn solve_kappa(t: &CramerTransform, tol: f64) -> Result<KappaSolution> {
    solve(|th| t.rho(th), t.domain_sup(), tol)
}

/// Root of `p_{δδ}(κ_δ) = 1`.
pub fn solve_diag_kappa(t: &CramerTransform, side: Sign, tol: f64) -> Result<KappaSolution> {
    solve(|th| Ok(t.matrix(th)?.get(side, side)), t.domain_sup(), tol)
}

/// [`solve_kappa`] with automatic moment evaluation.
pub fn solve_kappa_for(spec: &ModelSpec, tol: f64) -> Result<KappaSolution> {
    solve_kappa(&CramerTransform::new(spec, MomentMethod::Auto), tol)
}

/// How a drift value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftMethod {
    /// `uᵀP′v/ρ`.
    EigenFormula,
    /// `Σ_δ π̂_δ E|^δA|^θ log|^δA|`.
    MomentFormula,
    /// Central difference of `log ρ`.
    FiniteDifference,
}

/// Stationary drift `(log ρ)′(θ)` of the tilted walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftValue {
    /// Argument.
    pub theta: f64,
    /// Drift in nats per step.
    pub drift: f64,
    /// Route of `drift`.
    pub method: DriftMethod,
    /// `Σ_δ π̂_δ E|^δA|^θ log|^δA|`.
    pub moment_form: Option<f64>,
    /// Central difference of `log ρ`, when `θ ± h` stays in the domain.
    pub finite_difference: Option<f64>,
    /// `|moment_form − drift| < 1e-6·max(1, |drift|)`.
    pub forms_agree: Option<bool>,
}

/// Drift at `θ` from the eigen formula, with the moment form and a finite
/// difference alongside.
pub fn stationary_drift(t: &CramerTransform, theta: f64) -> Result<DriftValue> {
    if theta >= t.domain_sup() {
        return Err(Error::InfiniteDrift(theta));
    }
    let m = t.matrix(theta)?;
    let s = spectral::eigen_pair(&m)?;
    s.require_normalized()?;
    let d = t.derivative(theta)?.entries();
    let (u, v) = (s.u, s.v);
    let mut rho_prime = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            rho_prime += u[i] * d[i][j] * v[j];
        }
    }
    let drift = rho_prime / s.rho;
    if !drift.is_finite() {
        return Err(Error::InfiniteDrift(theta));
    }
    let moment_form = s
        .pihat
        .map(|p| p[0] * (d[0][0] + d[0][1]) + p[1] * (d[1][0] + d[1][1]));
    let h = (1e-6f64).max(1e-6 * theta);
    let finite_difference = if theta - h >= 0.0 && theta + h < t.domain_sup() {
        let up = t.rho(theta + h)?;
        let down = t.rho(theta - h)?;
        Some((libm::log(up) - libm::log(down)) / (2.0 * h))
    } else {
        None
    };
    Ok(DriftValue {
        theta,
        drift,
        method: DriftMethod::EigenFormula,
        moment_form,
        finite_difference,
        forms_agree: moment_form.map(|mf| (mf - drift).abs() < 1e-6 * drift.abs().max(1.0)),
    })
}
