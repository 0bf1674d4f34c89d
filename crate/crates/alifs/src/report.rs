//! The `report.json` document.
//!
//! Field order is fixed by the struct definitions and maps are `BTreeMap`s,
//! so equal inputs serialize to equal bytes. Non-finite numbers appear as
//! `null`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use alifs_core::model::{BoundReport, StateDomain};
use alifs_core::renewal::{ConstantEstimate, Prediction};
use alifs_core::sim::{HillEstimate, RunDiagnostics, TailCurve};
use alifs_core::spectral::DegeneracyReport;
use alifs_core::CaseTag;
use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Version of the report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Top-level report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Layout version.
    pub schema_version: u32,
    /// Subcommand that produced the report.
    pub command: String,
    /// Effective configuration with every default spelled out.
    pub config: RunConfig,
    /// Structural and spectral analysis.
    pub analysis: Option<Analysis>,
    /// Simulation results.
    pub empirical: Option<Empirical>,
    /// Verification ledger.
    pub checks: Vec<Check>,
    /// Summary of the ledger.
    pub verdict: Option<Verdict>,
    /// Non-fatal problems.
    pub warnings: Vec<String>,
}

impl Report {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        let p = dir.join("report.json");
        std::fs::write(&p, self.to_json()).with_context(|| format!("writing {}", p.display()))
    }

    /// Reads `report.json` from `dir`. A `null` where a plain number is
    /// expected reads back as NaN, since that is how non-finite values were
    /// written.
    pub fn read(dir: &Path) -> anyhow::Result<Self> {
        let p = dir.join("report.json");
        let text =
            std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
        Self::from_json(&text).with_context(|| format!("parsing {}", p.display()))
    }

    /// Parses report JSON, see [`Report::read`].
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        Self::deserialize(lenient::Lenient(v))
    }
}

/// One point of the `ρ(θ)` grid; `None` where the entries diverge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoPoint {
    /// Argument.
    pub theta: f64,
    /// Spectral radius.
    pub rho: Option<f64>,
    /// Cramér matrix entries, rows `−, +`.
    pub p: [[Option<f64>; 2]; 2],
}

/// Existence of a stationary law: some `θ > 0` with `ρ(θ) < 1` and
/// `E B^θ < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Existence {
    /// Witness `θ`, if found.
    pub theta: Option<f64>,
    /// `ρ` at the witness.
    pub rho: Option<f64>,
    /// Condition holds.
    pub holds: bool,
}

/// Output of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    /// State space.
    pub domain: StateDomain,
    /// Case of the sign chain.
    pub case: CaseTag,
    /// Stationary law of the sign chain (irreducible case).
    pub sign_chain_stationary: Option<[f64; 2]>,
    /// Relative frequencies of the shapes of `Λ`.
    pub shape_frequencies: BTreeMap<String, f64>,
    /// Empirical check of `|Ψ − Λ| ≤ B`.
    pub al_bound: BoundReport,
    /// `ρ(θ)` over the configured grid.
    pub rho_grid: Vec<RhoPoint>,
    /// Stationary-law existence.
    pub existence: Existence,
    /// Degeneracy scan over the grid.
    pub degeneracy: Option<DegeneracyReport>,
    /// Exponents, spectral data at `κ`, drift, lattice test, predictions.
    pub prediction: Option<Prediction>,
    /// Errors of individual steps.
    pub errors: Vec<String>,
}

/// Output of `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    /// Samples kept.
    pub n: usize,
    /// Shards.
    pub shards: usize,
    /// All shards coupled.
    pub certified: bool,
    /// Per-shard diagnostics.
    pub diagnostics: Vec<RunDiagnostics>,
    /// Hill estimates, left then right.
    pub hill: [Option<HillEstimate>; 2],
    /// Why a Hill estimate is missing.
    pub hill_errors: [Option<String>; 2],
    /// Exponents used to scale the left and right tail curves.
    pub tail_curve_kappa: [f64; 2],
    /// Tail curves; `left` scaled by the first exponent, `right` by the second.
    pub tail_curve: Option<TailCurve>,
    /// Fractional-moment diagnostics.
    pub moments: Vec<MomentRow>,
    /// Lag autocorrelation of `log(1 + |X|)`, averaged over shards. Reported
    /// only; the samples are not thinned or reweighted.
    pub autocorrelation: Vec<(usize, Option<f64>)>,
    /// Tail-constant estimates.
    pub constants: Vec<ConstantEstimate>,
    /// `u₊C₋ − u₋C₊` with its standard error (irreducible case).
    pub constant_relation: Option<(f64, f64)>,
}

/// Fractional moment with its subsample growth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    /// Order.
    pub theta: f64,
    /// Mean of `|X|^θ` over all samples.
    pub mean: f64,
    /// Standard error.
    pub std_error: f64,
    /// Means over the leading `n` samples.
    pub growth: Vec<(usize, f64)>,
}

/// Outcome of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckStatus {
    /// Passed.
    Pass,
    /// Failed.
    Fail,
    /// The theory makes no claim because a hypothesis fails.
    PredictionNotCovered,
    /// Not applicable to this model.
    Skipped,
    /// The check could not run.
    Error,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::PredictionNotCovered => "PREDICTION_NOT_COVERED",
            Self::Skipped => "SKIPPED",
            Self::Error => "ERROR",
        })
    }
}

/// One entry of the verification ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// Identifier.
    pub name: String,
    /// Required checks decide the exit code; advisory ones only with `--strict`.
    pub required: bool,
    /// Outcome.
    pub status: CheckStatus,
    /// Measured value.
    pub measured: Option<f64>,
    /// Reference value.
    pub target: Option<f64>,
    /// Tolerance, in words.
    pub tolerance: String,
    /// Free-form detail.
    pub detail: String,
}

/// Counts over the ledger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    /// Passed checks.
    pub passed: usize,
    /// Failed or errored required checks.
    pub failed_required: usize,
    /// Failed or errored advisory checks.
    pub failed_advisory: usize,
    /// Checks outside the theory's hypotheses.
    pub not_covered: usize,
    /// Skipped checks.
    pub skipped: usize,
    /// Whether the run succeeds under the chosen strictness.
    pub ok: bool,
}

impl Verdict {
    /// Tallies a ledger.
    pub fn of(checks: &[Check], strict: bool) -> Self {
        let mut v = Verdict {
            passed: 0,
            failed_required: 0,
            failed_advisory: 0,
            not_covered: 0,
            skipped: 0,
            ok: true,
        };
        for c in checks {
            match c.status {
                CheckStatus::Pass => v.passed += 1,
                CheckStatus::Fail | CheckStatus::Error if c.required => v.failed_required += 1,
                CheckStatus::Fail | CheckStatus::Error => v.failed_advisory += 1,
                CheckStatus::PredictionNotCovered => v.not_covered += 1,
                CheckStatus::Skipped => v.skipped += 1,
            }
        }
        v.ok = v.failed_required == 0 && (!strict || v.failed_advisory == 0);
        v
    }
}

/// Plain-text summary of a report.
pub fn summary(r: &Report) -> String {
    let mut s = String::new();
    let push = |s: &mut String, line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    push(&mut s, format!("command: {}", r.command));
    if let Some(a) = &r.analysis {
        push(&mut s, format!("case: {:?}", a.case));
        if let Some(p) = &a.prediction {
            let root = |k: &Option<alifs_core::tail_index::KappaSolution>| {
                k.as_ref()
                    .and_then(|k| k.kappa)
                    .map_or("none".to_string(), |x| format!("{x:.10}"))
            };
            push(
                &mut s,
                format!(
                    "kappa: {}  kappa_minus: {}  kappa_plus: {}",
                    root(&p.kappa),
                    root(&p.kappa_minus),
                    root(&p.kappa_plus)
                ),
            );
            for t in &p.tails {
                push(
                    &mut s,
                    format!(
                        "tail {:?}: exponent {:?}, theorem {:?}, covered {}",
                        t.tail, t.exponent, t.theorem, t.covered
                    ),
                );
            }
        }
    }
    if let Some(e) = &r.empirical {
        push(
            &mut s,
            format!("samples: {} (certified: {})", e.n, e.certified),
        );
        for h in e.hill.iter().flatten() {
            push(
                &mut s,
                format!(
                    "hill {:?}: {:.4} [{:.4}, {:.4}] k={}",
                    h.tail, h.alpha, h.ci_lo, h.ci_hi, h.k
                ),
            );
        }
        let ac: Vec<String> = e
            .autocorrelation
            .iter()
            .map(|(h, r)| match r {
                Some(r) => format!("lag {h} {r:.3}"),
                None => format!("lag {h} n/a"),
            })
            .collect();
        if !ac.is_empty() {
            push(
                &mut s,
                format!("autocorrelation of log(1+|X|): {}", ac.join(", ")),
            );
        }
        for c in &e.constants {
            push(
                &mut s,
                format!(
                    "{}: {:.6} ± {:.6} (covered: {})",
                    c.label, c.value, c.std_error, c.covered
                ),
            );
        }
    }
    for c in &r.checks {
        push(
            &mut s,
            format!(
                "[{}] {}{}: measured {:?}, target {:?}, {}",
                c.status,
                c.name,
                if c.required { " (required)" } else { "" },
                c.measured,
                c.target,
                c.tolerance
            ),
        );
    }
    if let Some(v) = &r.verdict {
        push(
            &mut s,
            format!(
                "verdict: {} passed, {} required failed, {} advisory failed, {} not covered, {} skipped",
                v.passed, v.failed_required, v.failed_advisory, v.not_covered, v.skipped
            ),
        );
    }
    for w in &r.warnings {
        push(&mut s, format!("warning: {w}"));
    }
    s
}

mod lenient {
    //! A `serde_json::Value` deserializer that turns `null` into NaN when a
    //! float is requested.

    use serde::de::{self, DeserializeSeed, IntoDeserializer, Visitor};
    use serde::forward_to_deserialize_any;
    use serde_json::{Error, Map, Value};

    pub struct Lenient(pub Value);

    impl<'de> de::Deserializer<'de> for Lenient {
        type Error = Error;

        fn deserialize_any<V: Visitor<'de>>(self, v: V) -> Result<V::Value, Error> {
            match self.0 {
                Value::Array(a) => v.visit_seq(Seq(a.into_iter())),
                Value::Object(m) => v.visit_map(MapAcc {
                    it: m.into_iter(),
                    value: None,
                }),
                other => de::Deserializer::deserialize_any(other, v),
            }
        }

        fn deserialize_f64<V: Visitor<'de>>(self, v: V) -> Result<V::Value, Error> {
            match self.0 {
                Value::Null => v.visit_f64(f64::NAN),
                other => de::Deserializer::deserialize_f64(other, v),
            }
        }

        fn deserialize_f32<V: Visitor<'de>>(self, v: V) -> Result<V::Value, Error> {
            self.deserialize_f64(v)
        }

        fn deserialize_option<V: Visitor<'de>>(self, v: V) -> Result<V::Value, Error> {
            match self.0 {
                Value::Null => v.visit_none(),
                other => v.visit_some(Lenient(other)),
            }
        }

        fn deserialize_newtype_struct<V: Visitor<'de>>(
            self,
            _: &'static str,
            v: V,
        ) -> Result<V::Value, Error> {
            v.visit_newtype_struct(self)
        }

        fn deserialize_enum<V: Visitor<'de>>(
            self,
            name: &'static str,
            variants: &'static [&'static str],
            v: V,
        ) -> Result<V::Value, Error> {
            match self.0 {
                Value::Object(m) if m.len() == 1 => {
                    let (tag, value) = m.into_iter().next().unwrap();
                    v.visit_enum(Enum { tag, value })
                }
                other => de::Deserializer::deserialize_enum(other, name, variants, v),
            }
        }

        forward_to_deserialize_any! {
            bool i8 i16 i32 i64 i128 u8 u16 u32 u64 u128 char str string bytes byte_buf
            unit unit_struct seq tuple tuple_struct map struct identifier ignored_any
        }
    }

    struct Seq(std::vec::IntoIter<Value>);

    impl<'de> de::SeqAccess<'de> for Seq {
        type Error = Error;

        fn next_element_seed<T: DeserializeSeed<'de>>(
            &mut self,
            seed: T,
        ) -> Result<Option<T::Value>, Error> {
            self.0
                .next()
                .map(|x| seed.deserialize(Lenient(x)))
                .transpose()
        }
    }

    struct MapAcc {
        it: <Map<String, Value> as IntoIterator>::IntoIter,
        value: Option<Value>,
    }

    impl<'de> de::MapAccess<'de> for MapAcc {
        type Error = Error;

        fn next_key_seed<K: DeserializeSeed<'de>>(
            &mut self,
            seed: K,
        ) -> Result<Option<K::Value>, Error> {
            match self.it.next() {
                Some((k, v)) => {
                    self.value = Some(v);
                    seed.deserialize(Value::String(k)).map(Some)
                }
                None => Ok(None),
            }
        }

        fn next_value_seed<T: DeserializeSeed<'de>>(&mut self, seed: T) -> Result<T::Value, Error> {
            seed.deserialize(Lenient(self.value.take().unwrap_or(Value::Null)))
        }
    }

    struct Enum {
        tag: String,
        value: Value,
    }

    impl<'de> de::EnumAccess<'de> for Enum {
        type Error = Error;
        type Variant = Lenient;

        fn variant_seed<T: DeserializeSeed<'de>>(
            self,
            seed: T,
        ) -> Result<(T::Value, Lenient), Error> {
            let tag = seed.deserialize(self.tag.into_deserializer())?;
            Ok((tag, Lenient(self.value)))
        }
    }

    impl<'de> de::VariantAccess<'de> for Lenient {
        type Error = Error;

        fn unit_variant(self) -> Result<(), Error> {
            Ok(())
        }

        fn newtype_variant_seed<T: DeserializeSeed<'de>>(self, seed: T) -> Result<T::Value, Error> {
            seed.deserialize(self)
        }

        fn tuple_variant<V: Visitor<'de>>(self, _: usize, v: V) -> Result<V::Value, Error> {
            de::Deserializer::deserialize_any(self, v)
        }

        fn struct_variant<V: Visitor<'de>>(
            self,
            _: &'static [&'static str],
            v: V,
        ) -> Result<V::Value, Error> {
            de::Deserializer::deserialize_any(self, v)
        }
    }
}
