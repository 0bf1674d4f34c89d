//! Laws of asymptotic slopes as transforms of a scalar driver law.
//!
//! Every family maps one driver draw `X` to its slopes through one of a few
//! monotone maps (affine, reciprocal, positive or negative part). Keeping the
//! driver explicit lets fractional moments stay in closed form whenever the
//! driver admits one, and reduces everything else to a one-dimensional
//! integral against the driver density.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::{ScalarDist, Sign};
use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};
use crate::rng::RandomStream;

/// Map from driver value `x` to slope value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum SlopeMap {
    /// `offset + scale·x`.
    Affine {
        /// Additive offset.
        offset: f64,
        /// Multiplier.
        scale: f64,
    },
    /// `scale / x`.
    Reciprocal {
        /// Numerator.
        scale: f64,
    },
    /// `scale·max(x, 0)`.
    PositivePart {
        /// Multiplier.
        scale: f64,
    },
    /// `scale·min(x, 0)`.
    NegativePart {
        /// Multiplier.
        scale: f64,
    },
}

impl SlopeMap {
    /// Evaluates the map.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            SlopeMap::Affine { offset, scale } => offset + scale * x,
            SlopeMap::Reciprocal { scale } => scale / x,
            SlopeMap::PositivePart { scale } => scale * x.max(0.0),
            SlopeMap::NegativePart { scale } => scale * x.min(0.0),
        }
    }
}

/// Which functional of the slope to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// `E|A|^θ 1{sign A = side}`.
    Power,
    /// `E|A|^θ log|A| 1{sign A = side}`, the `θ`-derivative of `Power`.
    PowerLog,
}

/// How a moment may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    /// Closed form when available, quadrature otherwise.
    #[default]
    Auto,
    /// Closed form or fail with `MethodUnavailable`.
    AnalyticOnly,
    /// Numerical integration even when a closed form exists.
    QuadratureOnly,
}

/// Where a moment value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed form or exact finite sum.
    Analytic,
    /// Adaptive quadrature.
    Quadrature,
}

/// A moment value with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    /// The value.
    pub value: f64,
    /// Absolute error bound (0 for closed forms).
    pub abs_error: f64,
    /// Evaluation route.
    pub provenance: Provenance,
}

impl Moment {
    fn exact(value: f64) -> Self {
        Self {
            value,
            abs_error: 0.0,
            provenance: Provenance::Analytic,
        }
    }
}

/// Law of `map(X)` with `X` drawn from `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeLaw {
    /// Driver law.
    pub base: ScalarDist,
    /// Transform applied to the driver.
    pub map: SlopeMap,
}

/// `E[|X|^t (log|X|)^k 1{sign X = side}]` in closed form, when available.
/// Returns `Some(inf)` for divergent moments.
fn base_closed(base: &ScalarDist, t: f64, side: Sign, kind: MomentKind) -> Option<f64> {
    match *base {
        ScalarDist::PointMass { .. } | ScalarDist::TwoPoint { .. } => {
            let atoms = base.atoms()?;
            Some(
                atoms
                    .iter()
                    .map(|&(v, p)| atom_term(v, p, t, side, kind))
                    .sum(),
            )
        }
        ScalarDist::Uniform { lo, hi } => {
            let (a, b) = match side {
                Sign::Plus => (lo.max(0.0), hi.max(0.0)),
                Sign::Minus => ((-hi).max(0.0), (-lo).max(0.0)),
            };
            if b <= a {
                return Some(0.0);
            }
            let e = t + 1.0;
            let width = hi - lo;
            if a == 0.0 && e <= 0.0 {
                return Some(f64::INFINITY);
            }
            let value = match kind {
                MomentKind::Power => {
                    if e == 0.0 {
                        libm::log(b / a)
                    } else {
                        (libm::pow(b, e) - libm::pow(a, e)) / e
                    }
                }
                MomentKind::PowerLog => {
                    if e == 0.0 {
                        0.5 * (libm::log(b) * libm::log(b) - libm::log(a) * libm::log(a))
                    } else {
                        let anti = |x: f64| {
                            if x == 0.0 {
                                0.0
                            } else {
                                libm::pow(x, e) * (libm::log(x) / e - 1.0 / (e * e))
                            }
                        };
                        anti(b) - anti(a)
                    }
                }
            };
            Some(value / width)
        }
        ScalarDist::Gaussian { mean, sd } => {
            if mean != 0.0 || t <= -1.0 {
                return None;
            }
            Some(match kind {
                MomentKind::Power => crate::math::centered_normal_half_moment(sd, t),
                MomentKind::PowerLog => crate::math::centered_normal_half_log_moment(sd, t),
            })
        }
        ScalarDist::LogNormal { mu, sigma } => {
            if side == Sign::Minus {
                return Some(0.0);
            }
            let m = libm::exp(t * mu + 0.5 * t * t * sigma * sigma);
            Some(match kind {
                MomentKind::Power => m,
                MomentKind::PowerLog => (mu + t * sigma * sigma) * m,
            })
        }
        ScalarDist::Pareto { scale, alpha } => {
            if side == Sign::Minus {
                return Some(0.0);
            }
            if t >= alpha {
                return Some(f64::INFINITY);
            }
            let m = alpha * libm::pow(scale, t) / (alpha - t);
            Some(match kind {
                MomentKind::Power => m,
                MomentKind::PowerLog => m * (libm::log(scale) + 1.0 / (alpha - t)),
            })
        }
    }
}

#[inline]
fn atom_term(v: f64, p: f64, t: f64, side: Sign, kind: MomentKind) -> f64 {
    if p <= 0.0 || Sign::of(v) != Some(side) {
        return 0.0;
    }
    let a = v.abs();
    match kind {
        MomentKind::Power => p * libm::pow(a, t),
        MomentKind::PowerLog => p * libm::pow(a, t) * libm::log(a),
    }
}

fn sign_of_scale(s: f64) -> Option<Sign> {
    Sign::of(s)
}

impl SlopeLaw {
    /// The driver itself.
    pub fn identity(base: ScalarDist) -> Self {
        Self {
            base,
            map: SlopeMap::Affine {
                offset: 0.0,
                scale: 1.0,
            },
        }
    }

    /// `offset + scale·X`.
    pub fn affine(base: ScalarDist, offset: f64, scale: f64) -> Self {
        Self {
            base,
            map: SlopeMap::Affine { offset, scale },
        }
    }

    /// Almost surely zero slope.
    pub fn zero() -> Self {
        Self::identity(ScalarDist::PointMass { value: 0.0 })
    }

    /// Draws one slope.
    #[inline]
    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        self.map.apply(self.base.sample(rng))
    }

    /// Slope value at driver quantile `u`.
    pub fn at_driver_quantile(&self, u: f64) -> f64 {
        self.map.apply(self.base.quantile(u))
    }

    /// Atoms of the slope law, if the driver is discrete.
    pub fn atoms(&self) -> Option<[(f64, f64); 2]> {
        self.base.atoms().map(|a| {
            [
                (self.map.apply(a[0].0), a[0].1),
                (self.map.apply(a[1].0), a[1].1),
            ]
        })
    }

    /// Distinct atoms with positive mass, merged.
    pub fn merged_atoms(&self) -> Option<Vec<(f64, f64)>> {
        let atoms = self.atoms()?;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (v, p) in atoms {
            if p <= 0.0 {
                continue;
            }
            match out.iter_mut().find(|(w, _)| *w == v) {
                Some(entry) => entry.1 += p,
                None => out.push((v, p)),
            }
        }
        Some(out)
    }

    /// `sup{θ : E|A|^θ < ∞}`.
    pub fn theta_max(&self) -> f64 {
        if self.base.is_discrete() {
            return f64::INFINITY;
        }
        let (lo, hi) = self.base.support();
        match self.map {
            SlopeMap::Affine { scale, .. } => {
                if scale == 0.0 {
                    f64::INFINITY
                } else {
                    self.base.theta_max()
                }
            }
            SlopeMap::Reciprocal { .. } => match self.base {
                ScalarDist::Gaussian { .. } => 1.0,
                ScalarDist::Uniform { .. } if lo <= 0.0 && hi >= 0.0 => 1.0,
                _ => f64::INFINITY,
            },
            SlopeMap::PositivePart { scale } => {
                if scale == 0.0 || hi <= 0.0 {
                    f64::INFINITY
                } else {
                    self.base.theta_max()
                }
            }
            SlopeMap::NegativePart { scale } => {
                if scale == 0.0 || lo >= 0.0 {
                    f64::INFINITY
                } else {
                    self.base.theta_max()
                }
            }
        }
    }

    /// Whether `sign(A) = side` has positive probability, decided from the
    /// support alone (never from a numerical estimate).
    pub fn can_take(&self, side: Sign) -> bool {
        if let Some(atoms) = self.atoms() {
            return atoms
                .iter()
                .any(|&(v, p)| p > 0.0 && Sign::of(v) == Some(side));
        }
        let (lo, hi) = self.base.support();
        match self.map {
            SlopeMap::Affine { offset, scale } => {
                if scale == 0.0 {
                    return Sign::of(offset) == Some(side);
                }
                let (a, b) = if scale > 0.0 {
                    (offset + scale * lo, offset + scale * hi)
                } else {
                    (offset + scale * hi, offset + scale * lo)
                };
                match side {
                    Sign::Plus => b > 0.0,
                    Sign::Minus => a < 0.0,
                }
            }
            SlopeMap::Reciprocal { scale } => match sign_of_scale(scale) {
                None => false,
                Some(s) => {
                    let base_side = side.times(s);
                    match base_side {
                        Sign::Plus => hi > 0.0,
                        Sign::Minus => lo < 0.0,
                    }
                }
            },
            SlopeMap::PositivePart { scale } => sign_of_scale(scale) == Some(side) && hi > 0.0,
            SlopeMap::NegativePart { scale } => {
                sign_of_scale(scale).map(Sign::flip) == Some(side) && lo < 0.0
            }
        }
    }

    /// Closed hull of the slope's support (may be unbounded).
    pub fn image_bounds(&self) -> (f64, f64) {
        if let Some(atoms) = self.merged_atoms() {
            let lo = atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
            let hi = atoms.iter().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max);
            return (lo, hi);
        }
        let (lo, hi) = self.base.support();
        let sorted = |a: f64, b: f64| if a <= b { (a, b) } else { (b, a) };
        let scaled = |s: f64, x: f64| if s == 0.0 { 0.0 } else { s * x };
        match self.map {
            SlopeMap::Affine { offset, scale } => {
                sorted(offset + scaled(scale, lo), offset + scaled(scale, hi))
            }
            SlopeMap::Reciprocal { scale } => {
                if lo > 0.0 || hi < 0.0 {
                    let f = |x: f64| if x.is_infinite() { 0.0 } else { scale / x };
                    sorted(f(lo), f(hi))
                } else {
                    (f64::NEG_INFINITY, f64::INFINITY)
                }
            }
            SlopeMap::PositivePart { scale } => {
                sorted(scaled(scale, lo.max(0.0)), scaled(scale, hi.max(0.0)))
            }
            SlopeMap::NegativePart { scale } => {
                sorted(scaled(scale, lo.min(0.0)), scaled(scale, hi.min(0.0)))
            }
        }
    }

    /// `P[A = 0]`.
    pub fn prob_zero(&self) -> f64 {
        if let Some(atoms) = self.atoms() {
            return atoms
                .iter()
                .filter(|(v, _)| *v == 0.0)
                .map(|(_, p)| p)
                .sum();
        }
        match self.map {
            SlopeMap::Affine { offset, scale } => {
                if scale == 0.0 && offset == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            SlopeMap::Reciprocal { scale } => {
                if scale == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            SlopeMap::PositivePart { scale } => {
                if scale == 0.0 {
                    1.0
                } else {
                    self.base.cdf(0.0)
                }
            }
            SlopeMap::NegativePart { scale } => {
                if scale == 0.0 {
                    1.0
                } else {
                    1.0 - self.base.cdf(0.0)
                }
            }
        }
    }

    /// `E|A|^θ 1{sign A = side}`.
    pub fn moment(&self, theta: f64, side: Sign) -> Result<Moment> {
        self.moment_with(theta, side, MomentKind::Power, Evaluation::Auto)
    }

    /// `E|A|^θ log|A| 1{sign A = side}`.
    pub fn log_moment(&self, theta: f64, side: Sign) -> Result<Moment> {
        self.moment_with(theta, side, MomentKind::PowerLog, Evaluation::Auto)
    }

    /// Whether every moment of this law has a closed form.
    pub fn has_closed_form(&self) -> bool {
        Sign::BOTH
            .iter()
            .all(|&s| self.closed_form(0.5, s, MomentKind::Power).is_some())
    }

    fn closed_form(&self, theta: f64, side: Sign, kind: MomentKind) -> Option<f64> {
        if let Some(atoms) = self.atoms() {
            return Some(
                atoms
                    .iter()
                    .map(|&(v, p)| atom_term(v, p, theta, side, kind))
                    .sum(),
            );
        }
        let combine = |scale: f64, base_side: Sign, t: f64, invert: bool| -> Option<f64> {
            let s = scale.abs();
            let m0 = base_closed(&self.base, t, base_side, MomentKind::Power)?;
            let st = libm::pow(s, theta);
            Some(match kind {
                MomentKind::Power => st * m0,
                MomentKind::PowerLog => {
                    let m1 = base_closed(&self.base, t, base_side, MomentKind::PowerLog)?;
                    let m1 = if invert { -m1 } else { m1 };
                    st * (libm::log(s) * m0 + m1)
                }
            })
        };
        match self.map {
            SlopeMap::Affine { offset, scale } => {
                if scale == 0.0 {
                    return Some(atom_term(offset, 1.0, theta, side, kind));
                }
                let scale_sign = sign_of_scale(scale)?;
                if offset == 0.0 {
                    return combine(scale, side.times(scale_sign), theta, false);
                }
                let shifted = match self.base {
                    ScalarDist::Uniform { lo, hi } => {
                        let (a, b) = (offset + scale * lo, offset + scale * hi);
                        ScalarDist::Uniform {
                            lo: a.min(b),
                            hi: a.max(b),
                        }
                    }
                    ScalarDist::Gaussian { mean, sd } => ScalarDist::Gaussian {
                        mean: offset + scale * mean,
                        sd: sd * scale.abs(),
                    },
                    _ => return None,
                };
                base_closed(&shifted, theta, side, kind)
            }
            SlopeMap::Reciprocal { scale } => {
                let scale_sign = sign_of_scale(scale)?;
                combine(scale, side.times(scale_sign), -theta, true)
            }
            SlopeMap::PositivePart { scale } => match sign_of_scale(scale) {
                Some(s) if s == side => combine(scale, Sign::Plus, theta, false),
                _ => Some(0.0),
            },
            SlopeMap::NegativePart { scale } => match sign_of_scale(scale) {
                Some(s) if s.flip() == side => combine(scale, Sign::Minus, theta, false),
                _ => Some(0.0),
            },
        }
    }

    /// Driver interval on which `sign(map(x)) = side` and `map(x) ≠ 0`.
    fn driver_region(&self, side: Sign) -> Option<(f64, f64)> {
        let (lo, hi) = self.base.truncated_support();
        let (a, b) = match self.map {
            SlopeMap::Affine { offset, scale } => {
                let s = sign_of_scale(scale)?;
                let root = -offset / scale;
                if side.times(s) == Sign::Plus {
                    (root, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, root)
                }
            }
            SlopeMap::Reciprocal { scale } => {
                let s = sign_of_scale(scale)?;
                if side.times(s) == Sign::Plus {
                    (0.0, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, 0.0)
                }
            }
            SlopeMap::PositivePart { scale } => {
                if sign_of_scale(scale)? != side {
                    return None;
                }
                (0.0, f64::INFINITY)
            }
            SlopeMap::NegativePart { scale } => {
                if sign_of_scale(scale)?.flip() != side {
                    return None;
                }
                (f64::NEG_INFINITY, 0.0)
            }
        };
        let (a, b) = (a.max(lo), b.min(hi));
        if b > a {
            Some((a, b))
        } else {
            None
        }
    }

    fn quadrature(&self, theta: f64, side: Sign, kind: MomentKind) -> Result<Moment> {
        if let Some(atoms) = self.atoms() {
            let v: f64 = atoms
                .iter()
                .map(|&(v, p)| atom_term(v, p, theta, side, kind))
                .sum();
            return Ok(Moment::exact(v));
        }
        let Some((a, b)) = self.driver_region(side) else {
            return Ok(Moment::exact(0.0));
        };
        let map = self.map;
        let base = &self.base;
        let integrand = |x: f64| {
            let g = map.apply(x).abs();
            if g == 0.0 || !g.is_finite() {
                return 0.0;
            }
            let d = base.pdf(x);
            if d == 0.0 {
                return 0.0;
            }
            let p = libm::pow(g, theta) * d;
            match kind {
                MomentKind::Power => p,
                MomentKind::PowerLog => p * libm::log(g),
            }
        };
        let mut breaks: Vec<f64> = Vec::new();
        match *base {
            ScalarDist::Gaussian { mean, sd } => {
                for k in -4..=4 {
                    breaks.push(mean + k as f64 * sd);
                }
            }
            ScalarDist::LogNormal { mu, sigma } => {
                for k in -4..=4 {
                    breaks.push(libm::exp(mu + k as f64 * sigma));
                }
            }
            ScalarDist::Pareto { scale, .. } => {
                let mut x = scale * 2.0;
                while x < b {
                    breaks.push(x);
                    x *= 4.0;
                }
            }
            _ => {}
        }
        breaks.push(0.0);
        let r = quad::integrate(integrand, a, b, &breaks, QuadConfig::default());
        if !r.value.is_finite() {
            return Err(Error::QuadratureFailed {
                value: r.value,
                error: r.abs_error,
            });
        }
        Ok(Moment {
            value: r.value,
            abs_error: r.abs_error,
            provenance: Provenance::Quadrature,
        })
    }

    /// General moment evaluation.
    pub fn moment_with(
        &self,
        theta: f64,
        side: Sign,
        kind: MomentKind,
        mode: Evaluation,
    ) -> Result<Moment> {
        if !(theta >= 0.0) || theta >= self.theta_max() {
            return Err(Error::MomentDivergence(theta));
        }
        if !self.can_take(side) {
            return Ok(Moment::exact(0.0));
        }
        match mode {
            Evaluation::QuadratureOnly => self.quadrature(theta, side, kind),
            Evaluation::AnalyticOnly => match self.closed_form(theta, side, kind) {
                Some(v) if v.is_finite() => Ok(Moment::exact(v)),
                Some(_) => Err(Error::MomentDivergence(theta)),
                None => Err(Error::MethodUnavailable(
                    "no closed form for this slope law",
                )),
            },
            Evaluation::Auto => match self.closed_form(theta, side, kind) {
                Some(v) if v.is_finite() => Ok(Moment::exact(v)),
                Some(_) => Err(Error::MomentDivergence(theta)),
                None => self.quadrature(theta, side, kind),
            },
        }
    }
}
