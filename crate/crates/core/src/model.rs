//! Model families, function draws and the asymptotic-linearity bound.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dist::{ScalarDist, Sign};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::slope::{SlopeLaw, SlopeMap};

/// `r(u) = −1/u + 1/(1−u)`, a diffeomorphism of `(0,1)` onto the real line.
#[inline]
pub fn unit_to_real(u: f64) -> f64 {
    -1.0 / u + 1.0 / (1.0 - u)
}

/// Inverse of [`unit_to_real`].
#[inline]
pub fn real_to_unit(x: f64) -> f64 {
    let s = libm::sqrt(x * x + 4.0);
    if x > 0.0 {
        2.0 / (2.0 + 4.0 / (x + s))
    } else {
        2.0 / (2.0 - x + s)
    }
}

/// Random self-map `Φ` of `[0,1]` to be conjugated onto the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum UnitMapSpec {
    /// `Φ(u) = A·u·(1−u)` with `A ∈ (0, 4)` almost surely.
    Logistic {
        /// Law of the growth parameter `A`.
        growth: ScalarDist,
    },
    /// `Φ ≡ value` with `value ∈ (0, 1)`.
    Constant {
        /// The constant.
        value: f64,
    },
}

/// How the two slopes of a custom model are drawn jointly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "coupling", rename_all = "snake_case")]
pub enum SlopeCoupling {
    /// Independent draws from each marginal.
    Independent {
        /// Law of `⁻A`.
        minus: ScalarDist,
        /// Law of `⁺A`.
        plus: ScalarDist,
    },
    /// Both slopes are quantiles of one shared uniform.
    Comonotone {
        /// Law of `⁻A`.
        minus: ScalarDist,
        /// Law of `⁺A`.
        plus: ScalarDist,
    },
    /// Both slopes are maps of one shared driver draw.
    SharedDriver {
        /// Driver law.
        driver: ScalarDist,
        /// `⁻A = minus(X)`.
        minus: SlopeMap,
        /// `⁺A = plus(X)`.
        plus: SlopeMap,
    },
}

/// Bounded perturbation added to the two-slope map in a custom model.
///
/// `β` below is the signed draw from the model's `b` law and `b = max(1, |β|)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Perturbation {
    /// `Ψ = Λ`.
    None,
    /// `Ψ = Λ + β`.
    #[default]
    Shift,
    /// `Ψ = Λ ± |β|` with a fair random sign.
    SignedShift,
    /// `Ψ = Λ + U·|β|` with `U` uniform on `(−1, 1)`.
    UniformShift,
    /// `Ψ(x) = Λ(x) + |β|·tanh(x)`.
    Saturating,
    /// `Ψ = Λ + factor·b`; violates the bound when `factor > 1`.
    Scaled {
        /// Multiple of `b`.
        factor: f64,
    },
}

/// Law of the random function `Ψ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    /// `Ψ(x) = A·x + B`.
    Affine {
        /// Slope law.
        a: ScalarDist,
        /// Intercept law.
        b: ScalarDist,
    },
    /// `Ψ(x) = (A·x + B)⁺`.
    Lindley {
        /// Slope law.
        a: ScalarDist,
        /// Intercept law.
        b: ScalarDist,
    },
    /// `Ψ(x) = Z·√(β + λx²)`.
    Arch1 {
        /// `β > 0`.
        beta: f64,
        /// `λ > 0`.
        lambda: f64,
        /// Innovation law.
        z: ScalarDist,
    },
    /// `Ψ(x) = α·x + Z·√(β + λx²)`.
    Ar1Arch1 {
        /// Autoregressive coefficient.
        alpha: f64,
        /// `β > 0`.
        beta: f64,
        /// `λ > 0`.
        lambda: f64,
        /// Innovation law.
        z: ScalarDist,
    },
    /// `Ψ(x) = A·x/(1 + x/B)` on `x > 0`.
    BevertonHolt {
        /// Growth law (positive).
        a: ScalarDist,
        /// Capacity law (positive).
        b: ScalarDist,
    },
    /// `Ψ = r∘Φ∘r⁻¹` for a random self-map `Φ` of the unit interval.
    UnitIntervalConjugate {
        /// The map `Φ`.
        inner: UnitMapSpec,
    },
    /// `Ψ = Λ + bounded perturbation` with freely specified slopes.
    CustomTwoSlope {
        /// Joint law of `(⁻A, ⁺A)`.
        slopes: SlopeCoupling,
        /// Law of the perturbation size `β`.
        b: ScalarDist,
        /// How `β` enters `Ψ`.
        #[serde(default)]
        perturbation: Perturbation,
    },
}

/// State space of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateDomain {
    /// The whole line.
    Real,
    /// `x > 0` only.
    Positive,
}

/// Closed-form evaluator carried by a function draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `a·x + b`.
    Affine {
        /// Slope.
        a: f64,
        /// Intercept.
        b: f64,
    },
    /// `(a·x + b)⁺`.
    Lindley {
        /// Slope.
        a: f64,
        /// Intercept.
        b: f64,
    },
    /// `α·x + z·√(β + λx²)`.
    Arch {
        /// Autoregressive coefficient.
        alpha: f64,
        /// `β`.
        beta: f64,
        /// `λ`.
        lambda: f64,
        /// Innovation.
        z: f64,
    },
    /// `a·x/(1 + x/b)` on `x > 0`.
    BevertonHolt {
        /// Growth.
        a: f64,
        /// Capacity.
        b: f64,
    },
    /// Conjugated logistic map with growth `a`.
    Logistic {
        /// Growth.
        a: f64,
    },
    /// Constant function.
    Constant {
        /// Value.
        value: f64,
    },
    /// `Λ(x) + shift + wobble·tanh(x)`.
    TwoSlope {
        /// Constant offset.
        shift: f64,
        /// Saturating offset amplitude.
        wobble: f64,
    },
}

/// One realized draw `(Ψ, ⁻A, ⁺A, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionSample {
    /// Left slope `⁻A`.
    pub a_minus: f64,
    /// Right slope `⁺A`.
    pub a_plus: f64,
    /// Bound `B ≥ 1`.
    pub b: f64,
    /// Evaluator for `Ψ`.
    pub kernel: Kernel,
}

/// Shape of `Λ`, from the signs of its two slopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeTag {
    /// Both slopes positive.
    Slash,
    /// Both slopes negative.
    Backslash,
    /// `⁻A < 0 < ⁺A`.
    Vee,
    /// `⁺A < 0 < ⁻A`.
    Wedge,
    /// At least one slope is zero.
    DegenerateZero,
}

impl ShapeTag {
    /// All tags in a fixed order.
    pub const ALL: [ShapeTag; 5] = [
        ShapeTag::Slash,
        ShapeTag::Backslash,
        ShapeTag::Vee,
        ShapeTag::Wedge,
        ShapeTag::DegenerateZero,
    ];
}

/// Shape of a function draw.
pub fn shape_of(sample: &FunctionSample) -> ShapeTag {
    match (Sign::of(sample.a_minus), Sign::of(sample.a_plus)) {
        (Some(Sign::Plus), Some(Sign::Plus)) => ShapeTag::Slash,
        (Some(Sign::Minus), Some(Sign::Minus)) => ShapeTag::Backslash,
        (Some(Sign::Minus), Some(Sign::Plus)) => ShapeTag::Vee,
        (Some(Sign::Plus), Some(Sign::Minus)) => ShapeTag::Wedge,
        _ => ShapeTag::DegenerateZero,
    }
}

#[inline]
fn logistic_psi(a: f64, x: f64) -> f64 {
    let s2 = libm::sqrt(x * x + 4.0) + 2.0;
    -s2 / a + 1.0 + a / (s2 - a)
}

impl FunctionSample {
    /// `Λ(x)`.
    #[inline]
    pub fn lambda(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.a_plus * x
        } else if x < 0.0 {
            self.a_minus * x
        } else {
            0.0
        }
    }

    /// Lipschitz constant of `Λ`.
    #[inline]
    pub fn lip(&self) -> f64 {
        self.a_minus.abs().max(self.a_plus.abs())
    }

    /// `Ψ(x)`, NaN outside the state space.
    #[inline]
    pub fn psi(&self, x: f64) -> f64 {
        match self.kernel {
            Kernel::Affine { a, b } => a * x + b,
            Kernel::Lindley { a, b } => (a * x + b).max(0.0),
            Kernel::Arch {
                alpha,
                beta,
                lambda,
                z,
            } => alpha * x + z * libm::sqrt(beta + lambda * x * x),
            Kernel::BevertonHolt { a, b } => {
                if x > 0.0 {
                    a * x / (1.0 + x / b)
                } else {
                    f64::NAN
                }
            }
            Kernel::Logistic { a } => logistic_psi(a, x),
            Kernel::Constant { value } => value,
            Kernel::TwoSlope { shift, wobble } => self.lambda(x) + shift + wobble * libm::tanh(x),
        }
    }

    /// `Ψ(x)` with domain checking.
    pub fn eval_psi(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::DomainViolation {
                x,
                detail: "argument must be finite",
            });
        }
        if let Kernel::BevertonHolt { .. } = self.kernel {
            if x <= 0.0 {
                return Err(Error::DomainViolation {
                    x,
                    detail: "Beverton-Holt maps are defined on x > 0",
                });
            }
        }
        Ok(self.psi(x))
    }

    /// Left/right slope by side.
    #[inline]
    pub fn slope(&self, side: Sign) -> f64 {
        match side {
            Sign::Minus => self.a_minus,
            Sign::Plus => self.a_plus,
        }
    }
}

fn check_positive_support(name: &str, d: &ScalarDist) -> Result<()> {
    if d.support().0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive almost surely"
        )));
    }
    Ok(())
}

fn check_map(map: &SlopeMap) -> Result<()> {
    let ok = match *map {
        SlopeMap::Affine { offset, scale } => offset.is_finite() && scale.is_finite(),
        SlopeMap::Reciprocal { scale }
        | SlopeMap::PositivePart { scale }
        | SlopeMap::NegativePart { scale } => scale.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "non-finite slope map {map:?}"
        )))
    }
}

/// Tightest analytic bound on `|ψ − Λ|` for the conjugated logistic map.
fn logistic_bound(a: f64) -> f64 {
    (1.0 - 4.0 / a)
        .abs()
        .max((1.0 - 2.0 / a + a / (4.0 - a)).abs())
}

impl ModelSpec {
    /// Checks parameter invariants and structural requirements.
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Affine { a, b } | ModelSpec::Lindley { a, b } => {
                a.validate()?;
                b.validate()
            }
            ModelSpec::Arch1 { beta, lambda, z }
            | ModelSpec::Ar1Arch1 {
                beta, lambda, z, ..
            } => {
                if !(*beta > 0.0 && beta.is_finite() && *lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "ARCH needs beta > 0 and lambda > 0, got ({beta}, {lambda})"
                    )));
                }
                if let ModelSpec::Ar1Arch1 { alpha, .. } = self {
                    if !alpha.is_finite() {
                        return Err(Error::InvalidParameter("alpha must be finite".into()));
                    }
                }
                z.validate()
            }
            ModelSpec::BevertonHolt { a, b } => {
                a.validate()?;
                b.validate()?;
                check_positive_support("Beverton-Holt growth", a)?;
                check_positive_support("Beverton-Holt capacity", b)
            }
            ModelSpec::UnitIntervalConjugate { inner } => match inner {
                UnitMapSpec::Logistic { growth } => {
                    growth.validate()?;
                    let (lo, hi) = growth.support();
                    if !(lo > 0.0 && hi < 4.0) {
                        return Err(Error::InvalidParameter(format!(
                            "logistic growth must lie in (0, 4) almost surely, support is [{lo}, {hi}]"
                        )));
                    }
                    // Range containment on a probe grid.
                    for k in 1..64 {
                        let u = k as f64 / 64.0;
                        for a in [lo, hi] {
                            let y = a * u * (1.0 - u);
                            if !(y > 0.0 && y < 1.0) {
                                return Err(Error::InvalidParameter(format!(
                                    "logistic map leaves (0,1) at u = {u}, A = {a}"
                                )));
                            }
                        }
                    }
                    Ok(())
                }
                UnitMapSpec::Constant { value } => {
                    if *value > 0.0 && *value < 1.0 {
                        Ok(())
                    } else {
                        Err(Error::InvalidParameter(format!(
                            "constant map must lie in (0,1), got {value}"
                        )))
                    }
                }
            },
            ModelSpec::CustomTwoSlope {
                slopes,
                b,
                perturbation,
            } => {
                b.validate()?;
                if let Perturbation::Scaled { factor } = perturbation {
                    if !factor.is_finite() {
                        return Err(Error::InvalidParameter(
                            "perturbation factor must be finite".into(),
                        ));
                    }
                }
                match slopes {
                    SlopeCoupling::Independent { minus, plus }
                    | SlopeCoupling::Comonotone { minus, plus } => {
                        minus.validate()?;
                        plus.validate()
                    }
                    SlopeCoupling::SharedDriver {
                        driver,
                        minus,
                        plus,
                    } => {
                        driver.validate()?;
                        check_map(minus)?;
                        check_map(plus)
                    }
                }
            }
        }
    }

    /// State space of the iteration.
    pub fn domain(&self) -> StateDomain {
        match self {
            ModelSpec::BevertonHolt { .. } => StateDomain::Positive,
            _ => StateDomain::Real,
        }
    }

    /// Marginal law of the slope on `side`.
    pub fn slope_law(&self, side: Sign) -> SlopeLaw {
        let pm = side.as_f64();
        match self {
            ModelSpec::Affine { a, .. } => SlopeLaw::identity(a.clone()),
            ModelSpec::Lindley { a, .. } => SlopeLaw {
                base: a.clone(),
                map: match side {
                    Sign::Minus => SlopeMap::NegativePart { scale: 1.0 },
                    Sign::Plus => SlopeMap::PositivePart { scale: 1.0 },
                },
            },
            ModelSpec::Arch1 { lambda, z, .. } => {
                SlopeLaw::affine(z.clone(), 0.0, pm * libm::sqrt(*lambda))
            }
            ModelSpec::Ar1Arch1 {
                alpha, lambda, z, ..
            } => SlopeLaw::affine(z.clone(), *alpha, pm * libm::sqrt(*lambda)),
            ModelSpec::BevertonHolt { .. } => SlopeLaw::zero(),
            ModelSpec::UnitIntervalConjugate { inner } => match inner {
                UnitMapSpec::Logistic { growth } => SlopeLaw {
                    base: growth.clone(),
                    map: SlopeMap::Reciprocal { scale: -pm },
                },
                UnitMapSpec::Constant { .. } => SlopeLaw::zero(),
            },
            ModelSpec::CustomTwoSlope { slopes, .. } => match slopes {
                SlopeCoupling::Independent { minus, plus }
                | SlopeCoupling::Comonotone { minus, plus } => SlopeLaw::identity(match side {
                    Sign::Minus => minus.clone(),
                    Sign::Plus => plus.clone(),
                }),
                SlopeCoupling::SharedDriver {
                    driver,
                    minus,
                    plus,
                } => SlopeLaw {
                    base: driver.clone(),
                    map: match side {
                        Sign::Minus => *minus,
                        Sign::Plus => *plus,
                    },
                },
            },
        }
    }

    /// `sup{θ : E B^θ < ∞}` for the bound `B`.
    pub fn b_theta_max(&self) -> f64 {
        match self {
            ModelSpec::Affine { b, .. } | ModelSpec::Lindley { b, .. } => b.theta_max(),
            ModelSpec::CustomTwoSlope { b, .. } => b.theta_max(),
            ModelSpec::Arch1 { z, .. } | ModelSpec::Ar1Arch1 { z, .. } => z.theta_max(),
            ModelSpec::BevertonHolt { a, b } => a.theta_max().min(b.theta_max()),
            ModelSpec::UnitIntervalConjugate { .. } => f64::INFINITY,
        }
    }

    /// One i.i.d. draw of `(Ψ, ⁻A, ⁺A, B)`.
    pub fn sample_function(&self, rng: &mut RandomStream) -> FunctionSample {
        match self {
            ModelSpec::Affine { a, b } => {
                let a = a.sample(rng);
                let b = b.sample(rng);
                FunctionSample {
                    a_minus: a,
                    a_plus: a,
                    b: b.abs().max(1.0),
                    kernel: Kernel::Affine { a, b },
                }
            }
            ModelSpec::Lindley { a, b } => {
                let a = a.sample(rng);
                let b = b.sample(rng);
                FunctionSample {
                    a_minus: a.min(0.0),
                    a_plus: a.max(0.0),
                    b: b.abs().max(1.0),
                    kernel: Kernel::Lindley { a, b },
                }
            }
            ModelSpec::Arch1 { beta, lambda, z } => arch_sample(0.0, *beta, *lambda, z.sample(rng)),
            ModelSpec::Ar1Arch1 {
                alpha,
                beta,
                lambda,
                z,
            } => arch_sample(*alpha, *beta, *lambda, z.sample(rng)),
            ModelSpec::BevertonHolt { a, b } => {
                let a = a.sample(rng);
                let b = b.sample(rng);
                FunctionSample {
                    a_minus: 0.0,
                    a_plus: 0.0,
                    b: (a * b).max(1.0),
                    kernel: Kernel::BevertonHolt { a, b },
                }
            }
            ModelSpec::UnitIntervalConjugate { inner } => match inner {
                UnitMapSpec::Logistic { growth } => {
                    let a = growth.sample(rng);
                    FunctionSample {
                        a_minus: 1.0 / a,
                        a_plus: -1.0 / a,
                        b: logistic_bound(a).max(1.0),
                        kernel: Kernel::Logistic { a },
                    }
                }
                UnitMapSpec::Constant { value } => {
                    let value = unit_to_real(*value);
                    FunctionSample {
                        a_minus: 0.0,
                        a_plus: 0.0,
                        b: value.abs().max(1.0),
                        kernel: Kernel::Constant { value },
                    }
                }
            },
            ModelSpec::CustomTwoSlope {
                slopes,
                b,
                perturbation,
            } => {
                let (a_minus, a_plus) = match slopes {
                    SlopeCoupling::Independent { minus, plus } => {
                        let m = minus.sample(rng);
                        (m, plus.sample(rng))
                    }
                    SlopeCoupling::Comonotone { minus, plus } => {
                        let u = rng.open_uniform();
                        (minus.quantile(u), plus.quantile(u))
                    }
                    SlopeCoupling::SharedDriver {
                        driver,
                        minus,
                        plus,
                    } => {
                        let x = driver.sample(rng);
                        (minus.apply(x), plus.apply(x))
                    }
                };
                let beta = b.sample(rng);
                let bound = beta.abs().max(1.0);
                let (shift, wobble) = match *perturbation {
                    Perturbation::None => (0.0, 0.0),
                    Perturbation::Shift => (beta, 0.0),
                    Perturbation::SignedShift => {
                        let s = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
                        (s * beta.abs(), 0.0)
                    }
                    Perturbation::UniformShift => ((2.0 * rng.uniform() - 1.0) * beta.abs(), 0.0),
                    Perturbation::Saturating => (0.0, beta.abs()),
                    Perturbation::Scaled { factor } => (factor * bound, 0.0),
                };
                FunctionSample {
                    a_minus,
                    a_plus,
                    b: bound,
                    kernel: Kernel::TwoSlope { shift, wobble },
                }
            }
        }
    }
}

fn arch_sample(alpha: f64, beta: f64, lambda: f64, z: f64) -> FunctionSample {
    let sl = libm::sqrt(lambda);
    FunctionSample {
        a_minus: alpha - sl * z,
        a_plus: alpha + sl * z,
        b: (libm::sqrt(beta) * z.abs()).max(1.0),
        kernel: Kernel::Arch {
            alpha,
            beta,
            lambda,
            z,
        },
    }
}

/// Wraps a unit-interval map as a model on the real line.
pub fn conjugate_from_unit_interval(inner: UnitMapSpec) -> Result<ModelSpec> {
    let spec = ModelSpec::UnitIntervalConjugate { inner };
    spec.validate()?;
    Ok(spec)
}

/// Probe grid for [`verify_al_bound`]: log-spaced `|x|` plus zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Smallest `|x|`.
    pub min_abs: f64,
    /// Largest `|x|`.
    pub max_abs: f64,
    /// Points per half-line.
    pub points_per_side: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            min_abs: 1e-3,
            max_abs: 1e6,
            points_per_side: 1000,
        }
    }
}

impl GridSpec {
    /// Grid points restricted to `domain`, ascending.
    pub fn points(&self, domain: StateDomain) -> Vec<f64> {
        let n = self.points_per_side.max(1);
        let (l0, l1) = (libm::log(self.min_abs), libm::log(self.max_abs));
        let mags: Vec<f64> = (0..n)
            .map(|i| {
                let t = if n == 1 {
                    0.0
                } else {
                    i as f64 / (n - 1) as f64
                };
                libm::exp(l0 + t * (l1 - l0))
            })
            .collect();
        let mut out = Vec::with_capacity(2 * n + 1);
        if domain == StateDomain::Real {
            out.extend(mags.iter().rev().map(|m| -m));
            out.push(0.0);
        }
        out.extend(mags.iter().copied());
        out
    }
}

/// A point where `|ψ − Λ|` exceeds `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundWitness {
    /// Index of the offending draw.
    pub sample: usize,
    /// Grid point.
    pub x: f64,
    /// `|ψ(x) − Λ(x)|`.
    pub gap: f64,
    /// The draw's `b`.
    pub b: f64,
}

/// Outcome of [`verify_al_bound`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Draws tested.
    pub n_samples: usize,
    /// Grid points per draw.
    pub n_points: usize,
    /// `max (|ψ − Λ| − b)` over draws and grid points.
    pub max_excess: f64,
    /// First violation found, if any.
    pub witness: Option<BoundWitness>,
    /// No violation beyond rounding slack.
    pub pass: bool,
}

/// Checks `|ψ(x) − Λ(x)| ≤ b` on a grid for `n_samples` draws.
pub fn verify_al_bound(
    spec: &ModelSpec,
    n_samples: usize,
    grid: &GridSpec,
    rng: &mut RandomStream,
) -> BoundReport {
    let pts = grid.points(spec.domain());
    let mut max_excess = f64::NEG_INFINITY;
    let mut witness = None;
    for i in 0..n_samples {
        let f = spec.sample_function(rng);
        for &x in &pts {
            let (p, l) = (f.psi(x), f.lambda(x));
            let gap = (p - l).abs();
            let excess = gap - f.b;
            let slack = 1e-12 * (f.b + p.abs() + l.abs());
            if excess > max_excess || excess.is_nan() {
                max_excess = if excess.is_nan() {
                    f64::INFINITY
                } else {
                    excess
                };
            }
            if witness.is_none() && !(excess <= slack) {
                witness = Some(BoundWitness {
                    sample: i,
                    x,
                    gap,
                    b: f.b,
                });
            }
        }
    }
    BoundReport {
        n_samples,
        n_points: pts.len(),
        max_excess,
        pass: witness.is_none(),
        witness,
    }
}
