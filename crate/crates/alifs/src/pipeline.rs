//! The analyze, simulate and verify stages.

use std::collections::BTreeMap;
use std::path::Path;

use alifs_core::model::{self, GridSpec, ShapeTag};
use alifs_core::renewal::{self, MartingaleAccumulator, Prediction, TermMoments};
use alifs_core::sim::{self, Tail, TailCurve};
use alifs_core::spectral::{self, CramerTransform};
use alifs_core::{CaseTag, Sign};
use anyhow::Context;

use crate::config::RunConfig;
use crate::io;
use crate::parallel::{stage, Executor, ShardedRun};
use crate::report::{
    Analysis, Check, CheckStatus, Empirical, Existence, MomentRow, Report, RhoPoint, Verdict,
};

/// Structural analysis; needs no seed beyond the shape and bound draws,
/// which use stream family `seed` (0 when unset).
pub fn analyze(cfg: &RunConfig, exec: &Executor) -> Analysis {
    let spec = &cfg.model;
    let opts = &cfg.analyze;
    let mut errors = Vec::new();
    let t = CramerTransform::new(spec, opts.moment_method);

    let shape_counts = exec.map_counts(stage::SHAPES, opts.shape_samples, |k, rng| {
        let mut c = [0u64; 5];
        for _ in 0..k {
            let f = spec.sample_function(rng);
            let tag = model::shape_of(&f);
            c[ShapeTag::ALL.iter().position(|&s| s == tag).unwrap_or(4)] += 1;
        }
        c
    });
    let mut totals = [0u64; 5];
    for c in &shape_counts {
        for i in 0..5 {
            totals[i] += c[i];
        }
    }
    let n_shapes = opts.shape_samples.max(1) as f64;
    let shape_frequencies: BTreeMap<String, f64> = ShapeTag::ALL
        .iter()
        .zip(totals)
        .map(|(tag, c)| (shape_name(*tag), c as f64 / n_shapes))
        .collect();

    let mut bound_rng = exec.stream(stage::SHAPES, usize::MAX >> 1);
    let al_bound = model::verify_al_bound(
        spec,
        opts.bound_samples,
        &GridSpec::default(),
        &mut bound_rng,
    );

    let grid = opts.theta_grid.points();
    let rho_grid: Vec<RhoPoint> = grid
        .iter()
        .map(|&theta| match t.matrix(theta) {
            Ok(m) => RhoPoint {
                theta,
                rho: Some(spectral::spectral_radius(&m)),
                p: [[Some(m.p_mm), Some(m.p_mp)], [Some(m.p_pm), Some(m.p_pp)]],
            },
            Err(_) => RhoPoint {
                theta,
                rho: None,
                p: [[None; 2]; 2],
            },
        })
        .collect();

    let existence = existence(cfg, &t, &grid);

    let case = match t.matrix(0.0).and_then(|m| spectral::classify_case(&m)) {
        Ok(c) => c,
        Err(e) => {
            errors.push(format!("classification: {e}"));
            CaseTag::Separated
        }
    };
    let sign_chain_stationary = t.matrix(0.0).and_then(|m| spectral::stationary_pi(&m)).ok();

    let finite_grid: Vec<f64> = rho_grid
        .iter()
        .filter(|r| r.rho.is_some())
        .map(|r| r.theta)
        .collect();
    let degeneracy = match spectral::degeneracy_scan(spec, &finite_grid, opts.moment_method) {
        Ok(d) => Some(d),
        Err(e) => {
            errors.push(format!("degeneracy scan: {e}"));
            None
        }
    };

    let prediction = match renewal::predict(spec, opts.moment_method, opts.tolerance) {
        Ok(p) => Some(p),
        Err(e) => {
            errors.push(format!("prediction: {e}"));
            None
        }
    };

    Analysis {
        domain: spec.domain(),
        case,
        sign_chain_stationary,
        shape_frequencies,
        al_bound,
        rho_grid,
        existence,
        degeneracy,
        prediction,
        errors,
    }
}

fn shape_name(tag: ShapeTag) -> String {
    serde_json::to_value(tag)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| format!("{tag:?}"))
}

fn existence(cfg: &RunConfig, t: &CramerTransform, grid: &[f64]) -> Existence {
    let sup = t.domain_sup().min(cfg.model.b_theta_max());
    let mut probes: Vec<f64> = [1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.25, 0.5]
        .into_iter()
        .chain(grid.iter().copied())
        .filter(|&x| x > 0.0 && x < sup)
        .collect();
    probes.sort_by(f64::total_cmp);
    for theta in probes {
        if let Ok(rho) = t.rho(theta) {
            if rho < 1.0 {
                return Existence {
                    theta: Some(theta),
                    rho: Some(rho),
                    holds: true,
                };
            }
        }
    }
    Existence {
        theta: None,
        rho: None,
        holds: false,
    }
}

/// Tail exponents used for the left and right curves: the predicted ones,
/// falling back to the other side's, then to 1.
pub fn curve_exponents(pred: Option<&Prediction>) -> [f64; 2] {
    let e = |s: Sign| pred.and_then(|p| p.tails[s.index()].exponent);
    let (l, r) = (e(Sign::Minus), e(Sign::Plus));
    [l.or(r).unwrap_or(1.0), r.or(l).unwrap_or(1.0)]
}

fn tail_curve(samples: &[f64], kappa: [f64; 2], points: usize) -> Option<TailCurve> {
    let mut mags: Vec<f64> = samples
        .iter()
        .filter(|x| x.is_finite())
        .map(|x| x.abs())
        .collect();
    if mags.len() < 20 || points == 0 {
        return None;
    }
    mags.sort_unstable_by(f64::total_cmp);
    let lo = mags[mags.len() / 4];
    let hi = mags[mags.len() - 10];
    if !(lo > 0.0 && hi > lo) {
        return None;
    }
    let th = sim::log_thresholds(lo, hi, points);
    let left = sim::empirical_tail_curve(samples, kappa[0], &th).ok()?;
    let right = sim::empirical_tail_curve(samples, kappa[1], &th).ok()?;
    let merged = left
        .points
        .iter()
        .zip(&right.points)
        .map(|(l, r)| sim::TailPoint {
            left: l.left,
            left_ci: l.left_ci,
            ..*r
        })
        .collect();
    Some(TailCurve {
        kappa: kappa[1],
        n: right.n,
        points: merged,
    })
}

/// Exceedances needed at the top of a flatness window.
pub const FLATNESS_MIN_COUNT: u64 = 30;

/// Two-decade window of a tail curve and its `max/min` ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatnessWindow {
    /// Lower threshold.
    pub lo: f64,
    /// Upper threshold.
    pub hi: f64,
    /// `max/min` of the scaled curve; `None` if it vanishes somewhere.
    pub ratio: Option<f64>,
}

/// The window ends at the largest threshold with at least
/// [`FLATNESS_MIN_COUNT`] exceedances and starts two decades lower.
pub fn flatness_window(curve: &TailCurve, tail: Tail) -> Option<FlatnessWindow> {
    let count = |pt: &sim::TailPoint| match tail {
        Tail::Left => pt.left_count,
        Tail::Right => pt.right_count,
    };
    let hi = curve
        .points
        .iter()
        .filter(|pt| count(pt) >= FLATNESS_MIN_COUNT)
        .map(|pt| pt.threshold)
        .fold(f64::NAN, f64::max);
    let lo = hi / 100.0;
    let first = curve.points.first()?.threshold;
    (hi.is_finite() && first <= lo * (1.0 + 1e-12)).then(|| FlatnessWindow {
        lo,
        hi,
        ratio: curve.flatness(tail, lo, hi),
    })
}

/// Lags reported in the autocorrelation diagnostic.
pub const AUTOCORRELATION_LAGS: [usize; 4] = [1, 2, 5, 10];

/// Autocorrelation within each shard, averaged over the shards where it is
/// defined. Shards are separate chains, so lags never straddle a boundary.
fn shard_autocorrelation(
    samples: &[f64],
    sizes: &[usize],
    offsets: &[usize],
) -> Vec<(usize, Option<f64>)> {
    AUTOCORRELATION_LAGS
        .iter()
        .map(|&h| {
            let vals: Vec<f64> = sizes
                .iter()
                .zip(offsets)
                .filter_map(|(&n, &o)| sim::autocorrelation(&samples[o..o + n], &[h])[0].1)
                .collect();
            let mean = (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64);
            (h, mean)
        })
        .collect()
}

/// Stationary sampling and every empirical statistic.
pub fn simulate(
    cfg: &RunConfig,
    exec: &Executor,
    analysis: &Analysis,
) -> (Empirical, ShardedRun, Vec<String>) {
    let spec = &cfg.model;
    let opts = &cfg.simulate;
    let mut warnings = Vec::new();
    if !analysis.existence.holds {
        warnings.push(
            "no θ > 0 with ρ(θ) < 1 and E B^θ < ∞ was found; a stationary law may not exist".into(),
        );
    }
    let run = exec.sample_stationary(spec, opts.samples, &opts.sim_config());
    if !run.certified() {
        let failed = run.shards.iter().filter(|d| !d.certified).count();
        warnings.push(format!(
            "coupling did not certify burn-in on {failed} of {} shards (NoContractionCertificate)",
            run.shards.len()
        ));
    }
    let nonfinite: u64 = run.shards.iter().map(|d| d.nonfinite_count).sum();
    if nonfinite > 0 {
        warnings.push(format!("{nonfinite} states overflowed and were dropped"));
    }
    let samples = &run.samples;
    let pred = analysis.prediction.as_ref();

    let mut hill = [None, None];
    let mut hill_errors = [None, None];
    for (i, tail) in [Tail::Left, Tail::Right].into_iter().enumerate() {
        let n_side = sim::tail_magnitudes(samples, tail).len();
        let k = opts.hill_k.unwrap_or_else(|| sim::default_hill_k(n_side));
        match sim::hill_estimate(samples, tail, k) {
            Ok(h) => hill[i] = Some(h),
            Err(e) => hill_errors[i] = Some(e.to_string()),
        }
    }

    let kappa = curve_exponents(pred);
    let curve = tail_curve(samples, kappa, opts.tail_points);

    let mut moments = Vec::new();
    if !samples.is_empty() {
        let base = pred
            .and_then(|p| p.tails.iter().filter_map(|t| t.exponent).reduce(f64::min))
            .unwrap_or(1.0);
        let sizes: Vec<usize> = [1_000usize, 10_000, 100_000, 1_000_000]
            .into_iter()
            .filter(|&s| s <= samples.len())
            .collect();
        for theta in [0.5 * base, 1.25 * base] {
            if let Ok(m) = sim::fractional_moment(samples, theta) {
                moments.push(MomentRow {
                    theta,
                    mean: m.mean,
                    std_error: m.std_error,
                    growth: sim::moment_growth(samples, theta, &sizes),
                });
            }
        }
    }

    let sizes = sim::shard_sizes(samples.len(), exec.shards());
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let autocorrelation = shard_autocorrelation(samples, &sizes, &offsets);

    let mut constants = Vec::new();
    let mut constant_relation = None;
    if let (Some(p), false) = (pred, samples.is_empty()) {
        let ks = p.kappas();
        if !ks.is_empty() {
            let parts = exec.map_shards(stage::CONSTANTS, |i, rng| {
                renewal::accumulate_terms(
                    spec,
                    &samples[offsets[i]..offsets[i] + sizes[i]],
                    &ks,
                    rng,
                )
            });
            let mut terms: Vec<TermMoments> = ks
                .iter()
                .map(|&kappa| TermMoments {
                    kappa,
                    ..Default::default()
                })
                .collect();
            for part in &parts {
                for (a, b) in terms.iter_mut().zip(part) {
                    a.merge(b);
                }
            }
            constants = renewal::tail_constants(p, &terms);
            if let (CaseTag::Irreducible, Some(s)) = (p.case, &p.spectral_at_kappa) {
                let f = |label: &str| p.constants.iter().find(|c| c.label == label);
                if let (Some(cm), Some(cp)) = (f("c_minus"), f("c_plus")) {
                    let coef = [
                        s.u[1] * cm.coef[0] - s.u[0] * cp.coef[0],
                        s.u[1] * cm.coef[1] - s.u[0] * cp.coef[1],
                    ];
                    if let Some(t) = terms.iter().find(|t| t.kappa == cm.kappa) {
                        let e = t.combination(coef);
                        constant_relation = Some((e.mean, e.std_error));
                    }
                }
            }
        }
    }

    let empirical = Empirical {
        n: samples.len(),
        shards: exec.shards(),
        certified: run.certified(),
        diagnostics: run.shards.clone(),
        hill,
        hill_errors,
        tail_curve_kappa: kappa,
        tail_curve: curve,
        moments,
        autocorrelation,
        constants,
        constant_relation,
    };
    (empirical, run, warnings)
}

fn check(name: impl Into<String>, required: bool, status: CheckStatus) -> Check {
    Check {
        name: name.into(),
        required,
        status,
        measured: None,
        target: None,
        tolerance: String::new(),
        detail: String::new(),
    }
}

fn pass(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

/// Runs the verification ledger.
pub fn verify(
    cfg: &RunConfig,
    exec: &Executor,
    analysis: &Analysis,
    empirical: &Empirical,
) -> Vec<Check> {
    let spec = &cfg.model;
    let opts = &cfg.verify;
    let t = CramerTransform::new(spec, cfg.analyze.moment_method);
    let mut out = Vec::new();
    let pred = analysis.prediction.as_ref();

    // Analytic checks.
    let Some(p) = pred else {
        let mut c = check("prediction", true, CheckStatus::Error);
        c.detail = analysis.errors.join("; ");
        out.push(c);
        return out;
    };
    for (name, sol, diag) in [
        ("kappa_root", &p.kappa, None),
        ("kappa_minus_root", &p.kappa_minus, Some(Sign::Minus)),
        ("kappa_plus_root", &p.kappa_plus, Some(Sign::Plus)),
    ] {
        let mut c = check(name, true, CheckStatus::Skipped);
        c.tolerance = "|f(κ) − 1| ≤ 1e-9".into();
        c.target = Some(1.0);
        if let Some(k) = sol.as_ref().and_then(|s| s.kappa) {
            c.detail = format!("κ = {k:?}");
            let v = t.matrix(k).map(|m| match diag {
                None => spectral::spectral_radius(&m),
                Some(s) => m.get(s, s),
            });
            match v {
                Ok(v) => {
                    c.measured = Some(v);
                    c.status = pass((v - 1.0).abs() <= 1e-9);
                }
                Err(e) => {
                    c.status = CheckStatus::Error;
                    c.detail = e.to_string();
                }
            }
        }
        out.push(c);
    }
    for (name, want, got) in [
        (
            "expected_kappa",
            opts.expect.kappa,
            p.kappa.as_ref().and_then(|s| s.kappa),
        ),
        (
            "expected_kappa_minus",
            opts.expect.kappa_minus,
            p.kappa_minus.as_ref().and_then(|s| s.kappa),
        ),
        (
            "expected_kappa_plus",
            opts.expect.kappa_plus,
            p.kappa_plus.as_ref().and_then(|s| s.kappa),
        ),
    ] {
        let Some(want) = want else { continue };
        let tol = opts.expect.tolerance.unwrap_or(1e-9);
        let mut c = check(name, true, CheckStatus::Fail);
        c.target = Some(want);
        c.measured = got;
        c.tolerance = format!("absolute {tol:e}");
        if let Some(g) = got {
            c.status = pass((g - want).abs() <= tol);
        }
        out.push(c);
    }
    {
        let theta = p.kappa.as_ref().and_then(|s| s.kappa).unwrap_or(1.0);
        let mut c = check("eigen_residual", true, CheckStatus::Error);
        c.tolerance = "max |Pv − ρv|, |uᵀP − ρuᵀ| ≤ 1e-10·ρ".into();
        match t
            .matrix(theta)
            .and_then(|m| spectral::eigen_pair(&m).map(|s| (s.residual(&m), s.rho)))
        {
            Ok((r, rho)) => {
                c.measured = Some(r);
                c.status = pass(r <= 1e-10 * rho.max(1.0));
                c.detail = format!("θ = {theta:?}");
            }
            Err(e) => c.detail = e.to_string(),
        }
        out.push(c);
    }
    {
        let pts: Vec<(f64, f64)> = analysis
            .rho_grid
            .iter()
            .filter_map(|r| r.rho.filter(|&x| x > 0.0).map(|x| (r.theta, x.ln())))
            .collect();
        let mut worst = 0.0f64;
        for w in pts.windows(3) {
            let (h1, h2) = (w[1].0 - w[0].0, w[2].0 - w[1].0);
            if h1 > 0.0 && h2 > 0.0 {
                let second = (w[2].1 - w[1].1) / h2 - (w[1].1 - w[0].1) / h1;
                worst = worst.min(second);
            }
        }
        let mut c = check("log_convexity", true, pass(worst >= -1e-9));
        c.measured = Some(worst);
        c.tolerance = "second differences of log ρ ≥ −1e-9".into();
        out.push(c);
    }
    if let Some(d) = &p.drift {
        let mut c = check("drift_finite_difference", true, CheckStatus::Skipped);
        c.measured = Some(d.drift);
        c.target = d.finite_difference;
        c.tolerance = "relative 1e-5".into();
        if let Some(fd) = d.finite_difference {
            c.status = pass((d.drift - fd).abs() <= 1e-5 * fd.abs().max(1.0));
        }
        out.push(c);
    }

    // Monte Carlo checks.
    let sup = t.domain_sup();
    for &theta in &opts.gelfand_thetas {
        let mut c = check(
            format!("gelfand_theta_{theta}"),
            false,
            CheckStatus::Skipped,
        );
        c.tolerance = format!("relative {}", opts.gelfand_tolerance);
        if theta < sup {
            match t.rho(theta) {
                Ok(rho) => {
                    let n = opts.gelfand_horizon;
                    let logs: Vec<f64> = exec
                        .map_counts(stage::GELFAND, opts.paths, |k, rng| {
                            (0..k)
                                .map(|_| sim::log_lip_forward(spec, n, rng))
                                .collect::<Vec<f64>>()
                        })
                        .concat();
                    let est = sim::gelfand_estimate(&logs, theta, n);
                    c.measured = Some(est.mean);
                    c.target = Some(rho);
                    c.status = pass((est.mean - rho).abs() <= opts.gelfand_tolerance * rho);
                }
                Err(e) => {
                    c.status = CheckStatus::Error;
                    c.detail = e.to_string();
                }
            }
        }
        out.push(c);
    }
    {
        let theta = if 1.0 < sup { 1.0 } else { 0.5 * sup.min(2.0) };
        let mut c = check("martingale", false, CheckStatus::Skipped);
        c.tolerance = "every statistic within 4 SE of v_δ(θ)".into();
        match t.matrix(theta).and_then(|m| spectral::eigen_pair(&m)) {
            Ok(s) if s.normalized => {
                let n = opts.martingale_horizon;
                let parts = exec.map_counts(stage::MARTINGALE, opts.paths, |k, rng| {
                    let mut a = MartingaleAccumulator::new(theta, s, n);
                    a.run(spec, k, rng);
                    a
                });
                let mut acc = MartingaleAccumulator::new(theta, s, n);
                for part in &parts {
                    acc.merge(part);
                }
                let r = acc.finish();
                let worst = r
                    .rows
                    .iter()
                    .map(|row| (row.estimate - row.target).abs() / row.std_error.max(1e-300))
                    .filter(|z| z.is_finite())
                    .fold(0.0f64, f64::max);
                c.measured = Some(worst);
                c.target = Some(0.0);
                c.status = pass(r.pass);
                c.detail = format!(
                    "θ = {theta:?}, worst deviation {worst:.3} SE over {} statistics",
                    r.rows.len()
                );
            }
            Ok(_) => c.detail = "eigenvectors not normalizable at θ".into(),
            Err(e) => c.detail = e.to_string(),
        }
        out.push(c);
    }
    {
        let depth = opts.bound_depth;
        let parts = exec.map_counts(stage::BOUND, opts.bound_draws, |k, rng| {
            let mut v = 0u32;
            let mut worst = f64::NEG_INFINITY;
            for j in 0..k {
                if let Ok(b) = sim::backward_error_bound(spec, 1 + j % depth, rng) {
                    v += b.violations;
                    worst = worst.max(b.worst_excess);
                }
            }
            (v, worst)
        });
        let violations: u32 = parts.iter().map(|p| p.0).sum();
        let worst = parts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let mut c = check("comparison_bound", false, pass(violations == 0));
        c.measured = Some(violations as f64);
        c.target = Some(0.0);
        c.tolerance = "zero violations".into();
        c.detail = format!("worst excess {worst:e}");
        out.push(c);
    }
    {
        let mut c = check("coupling", false, pass(empirical.certified));
        c.measured = empirical
            .diagnostics
            .iter()
            .map(|d| d.burn_in as f64)
            .reduce(f64::max);
        c.tolerance = "every shard's chains meet".into();
        c.detail = format!(
            "{} shards; measured is the longest meeting time",
            empirical.shards
        );
        out.push(c);
    }
    for side in Sign::BOTH {
        let tp = &p.tails[side.index()];
        let name = match side {
            Sign::Minus => "left",
            Sign::Plus => "right",
        };
        let mut c = check(format!("hill_{name}"), false, CheckStatus::Skipped);
        c.tolerance = "exponent inside the Hill interval".into();
        if let Some(k) = tp.exponent {
            c.target = Some(k);
            match &empirical.hill[side.index()] {
                Some(h) => {
                    c.measured = Some(h.alpha);
                    c.detail = format!("[{:?}, {:?}], k = {}", h.ci_lo, h.ci_hi, h.k);
                    c.status = if !tp.covered {
                        CheckStatus::PredictionNotCovered
                    } else {
                        pass(h.covers(k))
                    };
                }
                None => {
                    c.status = CheckStatus::Error;
                    c.detail = empirical.hill_errors[side.index()]
                        .clone()
                        .unwrap_or_default();
                }
            }
        }
        out.push(c);

        let mut c = check(format!("tail_flatness_{name}"), false, CheckStatus::Skipped);
        c.tolerance = format!("max/min ≤ {} over two decades", opts.flatness_factor);
        if let (Some(_), Some(curve)) = (tp.exponent, &empirical.tail_curve) {
            let tail = if side == Sign::Minus {
                Tail::Left
            } else {
                Tail::Right
            };
            match flatness_window(curve, tail) {
                Some(w) => {
                    c.measured = w.ratio;
                    c.detail = format!("window [{:?}, {:?}]", w.lo, w.hi);
                    c.status = if !tp.covered {
                        CheckStatus::PredictionNotCovered
                    } else {
                        pass(w.ratio.is_some_and(|f| f <= opts.flatness_factor))
                    };
                }
                None => c.detail = "sampled tail spans less than two decades".into(),
            }
        }
        out.push(c);
    }
    for est in &empirical.constants {
        let mut c = check(
            format!("{}_positive", est.label),
            false,
            CheckStatus::Skipped,
        );
        c.measured = Some(est.value);
        c.tolerance = "95% interval excludes 0".into();
        c.detail = format!("[{:?}, {:?}]", est.ci.0, est.ci.1);
        c.status = if !est.covered {
            CheckStatus::PredictionNotCovered
        } else {
            pass(est.ci.0 > 0.0)
        };
        out.push(c);
    }
    if let Some((diff, se)) = empirical.constant_relation {
        let covered = p.tails.iter().all(|t| t.covered);
        let mut c = check(
            "constant_relation",
            false,
            CheckStatus::PredictionNotCovered,
        );
        c.measured = Some(diff);
        c.target = Some(0.0);
        c.tolerance = "|u₊C₋ − u₋C₊| ≤ 1.96 SE".into();
        if covered {
            c.status = pass(diff.abs() <= 1.96 * se + 1e-12);
        }
        out.push(c);
    }
    out
}

/// Which subcommand to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Structure, spectrum, exponents.
    Analyze,
    /// Plus stationary sampling and artifacts.
    Simulate,
    /// Plus the verification ledger.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
        }
    }
}

/// Runs a command and writes its artifacts into `out` when given.
pub fn run(cmd: Command, cfg: &RunConfig, out: Option<&Path>) -> anyhow::Result<Report> {
    let seed = match cmd {
        Command::Analyze => cfg.seed.unwrap_or(0),
        _ => cfg.require_seed()?,
    };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let exec = Executor::new(cfg.threads, seed, cfg.simulate.shards)?;
    let analysis = analyze(cfg, &exec);
    let mut warnings: Vec<String> = analysis.errors.clone();
    if let Some(p) = &analysis.prediction {
        if let Some(u) = &p.unsupported {
            warnings.push(format!("Unsupported: {u}"));
        }
    }
    let mut empirical = None;
    let mut checks = Vec::new();
    if cmd != Command::Analyze {
        let (emp, run, w) = simulate(cfg, &exec, &analysis);
        warnings.extend(w);
        if let Some(dir) = out {
            io::write_samples_bin(&dir.join("samples.bin"), &run.samples)?;
            if cfg.simulate.samples_csv {
                io::write_samples_csv(&dir.join("samples.csv"), &run.samples)?;
            }
            match &emp.tail_curve {
                Some(c) => io::write_tail_curve(dir, c)?,
                None => io::write_tail_curve(
                    dir,
                    &TailCurve {
                        kappa: emp.tail_curve_kappa[1],
                        n: 0,
                        points: Vec::new(),
                    },
                )?,
            }
        }
        if cmd == Command::Verify {
            checks = verify(cfg, &exec, &analysis, &emp);
        }
        empirical = Some(emp);
    }
    if let Some(dir) = out {
        io::write_rho_grid(&dir.join("rho_grid.csv"), &analysis.rho_grid)?;
        if cmd == Command::Verify {
            io::write_checks(&dir.join("checks.csv"), &checks)?;
        }
    }
    let verdict = (cmd == Command::Verify).then(|| Verdict::of(&checks, cfg.strict));
    let report = Report {
        schema_version: crate::report::SCHEMA_VERSION,
        command: cmd.name().into(),
        config: cfg.echo(),
        analysis: Some(analysis),
        empirical,
        checks,
        verdict,
        warnings,
    };
    if let Some(dir) = out {
        report.write(dir)?;
    }
    Ok(report)
}
