//! Scalar laws used for slopes, drivers and perturbation bounds.

use alloc::format;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::rng::RandomStream;
use crate::slope::{Moment, SlopeLaw};

/// One of the two signed half-lines; also indexes the driving chain states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    /// Negative half-line, state `−`.
    Minus,
    /// Positive half-line, state `+`.
    Plus,
}

impl Sign {
    /// Both signs in matrix order `(−, +)`.
    pub const BOTH: [Sign; 2] = [Sign::Minus, Sign::Plus];

    /// Matrix index: `−` is 0, `+` is 1.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Sign::Minus => 0,
            Sign::Plus => 1,
        }
    }

    /// `−1.0` or `+1.0`.
    #[inline]
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    /// The opposite sign.
    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    /// Sign of a nonzero real; `None` for zero and NaN.
    #[inline]
    pub fn of(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Plus)
        } else if x < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    /// Sign product `self · other`.
    #[inline]
    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// A real-valued law with exact sampling and fractional-moment support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum ScalarDist {
    /// Dirac mass at `value`.
    PointMass {
        /// Atom location.
        value: f64,
    },
    /// `v1` with probability `p1`, else `v2`.
    TwoPoint {
        /// First atom.
        v1: f64,
        /// Probability of the first atom.
        p1: f64,
        /// Second atom.
        v2: f64,
    },
    /// Uniform on `[lo, hi]`.
    Uniform {
        /// Lower end.
        lo: f64,
        /// Upper end.
        hi: f64,
    },
    /// Normal law.
    Gaussian {
        /// Mean.
        mean: f64,
        /// Standard deviation.
        sd: f64,
    },
    /// `exp(N(mu, sigma²))`.
    LogNormal {
        /// Log-mean.
        mu: f64,
        /// Log-standard deviation.
        sigma: f64,
    },
    /// Pareto law with `P[X > x] = (scale/x)^alpha` for `x ≥ scale`.
    Pareto {
        /// Minimum value.
        scale: f64,
        /// Tail index.
        alpha: f64,
    },
}

fn finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite, got {x}"
        )))
    }
}

impl ScalarDist {
    /// Standard normal law.
    pub fn standard_normal() -> Self {
        ScalarDist::Gaussian { mean: 0.0, sd: 1.0 }
    }

    /// Two atoms with probability one half each.
    pub fn fair_two_point(v1: f64, v2: f64) -> Self {
        ScalarDist::TwoPoint { v1, p1: 0.5, v2 }
    }

    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarDist::PointMass { value } => finite("value", value),
            ScalarDist::TwoPoint { v1, p1, v2 } => {
                finite("v1", v1)?;
                finite("v2", v2)?;
                if !(0.0..=1.0).contains(&p1) {
                    return Err(Error::InvalidParameter(format!(
                        "p1 must lie in [0,1], got {p1}"
                    )));
                }
                Ok(())
            }
            ScalarDist::Uniform { lo, hi } => {
                finite("lo", lo)?;
                finite("hi", hi)?;
                if !(lo < hi) {
                    return Err(Error::InvalidParameter(format!(
                        "uniform needs lo < hi, got [{lo}, {hi}]"
                    )));
                }
                Ok(())
            }
            ScalarDist::Gaussian { mean, sd } => {
                finite("mean", mean)?;
                finite("sd", sd)?;
                if !(sd > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "sd must be positive, got {sd}"
                    )));
                }
                Ok(())
            }
            ScalarDist::LogNormal { mu, sigma } => {
                finite("mu", mu)?;
                finite("sigma", sigma)?;
                if !(sigma > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "sigma must be positive, got {sigma}"
                    )));
                }
                Ok(())
            }
            ScalarDist::Pareto { scale, alpha } => {
                finite("scale", scale)?;
                finite("alpha", alpha)?;
                if !(scale > 0.0 && alpha > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "pareto needs scale > 0 and alpha > 0, got ({scale}, {alpha})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Exact draw.
    #[inline]
    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        match *self {
            ScalarDist::PointMass { value } => value,
            ScalarDist::TwoPoint { v1, p1, v2 } => {
                if rng.uniform() < p1 {
                    v1
                } else {
                    v2
                }
            }
            ScalarDist::Uniform { lo, hi } => lo + (hi - lo) * rng.uniform(),
            ScalarDist::Gaussian { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            ScalarDist::LogNormal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                libm::exp(mu + sigma * z)
            }
            ScalarDist::Pareto { scale, alpha } => {
                scale * libm::pow(rng.open_uniform(), -1.0 / alpha)
            }
        }
    }

    /// Atoms `(value, probability)` for discrete laws.
    pub fn atoms(&self) -> Option<[(f64, f64); 2]> {
        match *self {
            ScalarDist::PointMass { value } => Some([(value, 1.0), (value, 0.0)]),
            ScalarDist::TwoPoint { v1, p1, v2 } => Some([(v1, p1), (v2, 1.0 - p1)]),
            _ => None,
        }
    }

    /// Whether the law has finite support.
    pub fn is_discrete(&self) -> bool {
        self.atoms().is_some()
    }

    /// Closed support `[lo, hi]` (atoms: hull of atoms with positive mass).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            ScalarDist::PointMass { value } => (value, value),
            ScalarDist::TwoPoint { v1, p1, v2 } => {
                if p1 <= 0.0 {
                    (v2, v2)
                } else if p1 >= 1.0 {
                    (v1, v1)
                } else {
                    (v1.min(v2), v1.max(v2))
                }
            }
            ScalarDist::Uniform { lo, hi } => (lo, hi),
            ScalarDist::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            ScalarDist::LogNormal { .. } => (0.0, f64::INFINITY),
            ScalarDist::Pareto { scale, .. } => (scale, f64::INFINITY),
        }
    }

    /// Support truncated at the `1e-12` and `1 − 1e-12` quantiles, used as
    /// the integration range for continuous laws.
    pub fn truncated_support(&self) -> (f64, f64) {
        match *self {
            ScalarDist::Gaussian { mean, sd } => (
                mean - math::NORMAL_TAIL_Z * sd,
                mean + math::NORMAL_TAIL_Z * sd,
            ),
            ScalarDist::LogNormal { mu, sigma } => (
                libm::exp(mu - math::NORMAL_TAIL_Z * sigma),
                libm::exp(mu + math::NORMAL_TAIL_Z * sigma),
            ),
            ScalarDist::Pareto { scale, alpha } => (scale, scale * libm::pow(1e12, 1.0 / alpha)),
            _ => self.support(),
        }
    }

    /// Density of a continuous law (zero for discrete laws).
    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            ScalarDist::PointMass { .. } | ScalarDist::TwoPoint { .. } => 0.0,
            ScalarDist::Uniform { lo, hi } => {
                if x >= lo && x <= hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            ScalarDist::Gaussian { mean, sd } => math::normal_pdf((x - mean) / sd) / sd,
            ScalarDist::LogNormal { mu, sigma } => {
                if x > 0.0 {
                    math::normal_pdf((libm::log(x) - mu) / sigma) / (sigma * x)
                } else {
                    0.0
                }
            }
            ScalarDist::Pareto { scale, alpha } => {
                if x >= scale {
                    alpha * libm::pow(scale, alpha) / libm::pow(x, alpha + 1.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// `P[X ≤ x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ScalarDist::PointMass { value } => {
                if x >= value {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarDist::TwoPoint { v1, p1, v2 } => {
                let mut c = 0.0;
                if x >= v1 {
                    c += p1;
                }
                if x >= v2 {
                    c += 1.0 - p1;
                }
                c
            }
            ScalarDist::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            ScalarDist::Gaussian { mean, sd } => math::normal_cdf((x - mean) / sd),
            ScalarDist::LogNormal { mu, sigma } => {
                if x > 0.0 {
                    math::normal_cdf((libm::log(x) - mu) / sigma)
                } else {
                    0.0
                }
            }
            ScalarDist::Pareto { scale, alpha } => {
                if x > scale {
                    1.0 - libm::pow(scale / x, alpha)
                } else {
                    0.0
                }
            }
        }
    }

    /// Generalized inverse CDF on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            ScalarDist::PointMass { value } => value,
            ScalarDist::TwoPoint { v1, p1, v2 } => {
                let (lo, plo, hi) = if v1 <= v2 {
                    (v1, p1, v2)
                } else {
                    (v2, 1.0 - p1, v1)
                };
                if u < plo {
                    lo
                } else {
                    hi
                }
            }
            ScalarDist::Uniform { lo, hi } => lo + (hi - lo) * u,
            ScalarDist::Gaussian { mean, sd } => mean + sd * math::normal_quantile(u),
            ScalarDist::LogNormal { mu, sigma } => libm::exp(mu + sigma * math::normal_quantile(u)),
            ScalarDist::Pareto { scale, alpha } => scale * libm::pow(1.0 - u, -1.0 / alpha),
        }
    }

    /// `sup{θ ≥ 0 : E|X|^θ < ∞}`.
    pub fn theta_max(&self) -> f64 {
        match *self {
            ScalarDist::Pareto { alpha, .. } => alpha,
            _ => f64::INFINITY,
        }
    }

    /// Fractional moment `E[|X|^θ 1{sign(X) = side}]`.
    pub fn moment(&self, theta: f64, side: Sign) -> Result<Moment> {
        SlopeLaw::identity(self.clone()).moment(theta, side)
    }

    /// Mean of `|X|^θ` over both signs.
    pub fn abs_moment(&self, theta: f64) -> Result<f64> {
        Ok(self.moment(theta, Sign::Minus)?.value + self.moment(theta, Sign::Plus)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(ScalarDist::TwoPoint {
            v1: 1.0,
            p1: 1.5,
            v2: 0.0
        }
        .validate()
        .is_err());
        assert!(ScalarDist::Uniform { lo: 1.0, hi: 1.0 }.validate().is_err());
        assert!(ScalarDist::Gaussian { mean: 0.0, sd: 0.0 }
            .validate()
            .is_err());
        assert!(ScalarDist::LogNormal {
            mu: 0.0,
            sigma: -1.0
        }
        .validate()
        .is_err());
        assert!(ScalarDist::Pareto {
            scale: 0.0,
            alpha: 2.0
        }
        .validate()
        .is_err());
        assert!(ScalarDist::Pareto {
            scale: 1.0,
            alpha: 2.0
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn quantile_and_cdf_agree() {
        let laws = [
            ScalarDist::Uniform { lo: -1.0, hi: 3.0 },
            ScalarDist::Gaussian { mean: 1.0, sd: 2.0 },
            ScalarDist::LogNormal {
                mu: 0.3,
                sigma: 0.7,
            },
            ScalarDist::Pareto {
                scale: 2.0,
                alpha: 3.0,
            },
        ];
        for law in &laws {
            for &u in &[0.01, 0.2, 0.5, 0.9, 0.999] {
                let x = law.quantile(u);
                assert!((law.cdf(x) - u).abs() < 1e-10, "{law:?} u={u}");
            }
        }
    }

    #[test]
    fn two_point_sampling_frequency() {
        let law = ScalarDist::TwoPoint {
            v1: 2.0,
            p1: 0.3,
            v2: -1.0,
        };
        let mut rng = RandomStream::new(11, 0);
        let n = 200_000;
        let hits = (0..n).filter(|_| law.sample(&mut rng) == 2.0).count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.3).abs() < 4.0 * libm::sqrt(0.21 / n as f64));
    }

    #[test]
    fn sample_means_match_moments() {
        let mut rng = RandomStream::new(5, 1);
        let law = ScalarDist::LogNormal {
            mu: -0.2,
            sigma: 0.5,
        };
        let xs: Vec<f64> = (0..200_000).map(|_| law.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let exact = libm::exp(-0.2 + 0.125);
        assert!((mean - exact).abs() < 0.01);
    }
}
