//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line.
//!
//! Run with `cargo test -p alifs --test acceptance -- --nocapture --test-threads 1`
//! for clean timings.

use std::time::{Duration, Instant};

use alifs::config::RunConfig;
use alifs::parallel::Executor;
use alifs::{pipeline, Command};
use alifs_core::dist::ScalarDist;
use alifs_core::model::{ModelSpec, Perturbation, SlopeCoupling};
use alifs_core::renewal::{self, LatticeReport, MartingaleAccumulator};
use alifs_core::sim::{self, Tail};
use alifs_core::spectral::{self, CramerTransform, DegeneracyAlternative, MomentMethod};
use alifs_core::tail_index;
use alifs_core::{CaseTag, RandomStream};

/// Criteria whose failure is a documented property of the criterion itself,
/// not of the implementation. They print `[FAIL]` but do not abort the run.
const EXPECTED_RED: &[u32] = &[];

fn verdict(id: u32, name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:>2} {name}: {detail}");
    if !pass && !EXPECTED_RED.contains(&id) {
        panic!("criterion {id} failed: {detail}");
    }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn arch() -> ModelSpec {
    ModelSpec::Arch1 {
        beta: 1.0,
        lambda: 1.0,
        z: ScalarDist::standard_normal(),
    }
}

fn ar1_arch(alpha: f64, z: ScalarDist) -> ModelSpec {
    ModelSpec::Ar1Arch1 {
        alpha,
        beta: 1.0,
        lambda: 1.0,
        z,
    }
}

fn two_tailed() -> ModelSpec {
    ModelSpec::CustomTwoSlope {
        slopes: SlopeCoupling::Independent {
            minus: ScalarDist::fair_two_point(-0.5, 1.2),
            plus: ScalarDist::fair_two_point(2.0, 0.1),
        },
        b: ScalarDist::PointMass { value: 1.0 },
        perturbation: Perturbation::SignedShift,
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) * f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) * f(lo) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_01_two_atom_affine_kappa() {
    let spec = ModelSpec::Affine {
        a: ScalarDist::fair_two_point(2.0, 0.25),
        b: ScalarDist::PointMass { value: 1.0 },
    };
    let oracle = ((1.0 + 5f64.sqrt()) / 2.0).log2();
    // warm-up excludes one-time page faults from the timing
    tail_index::solve_kappa_for(&spec, 1e-13).unwrap();
    let t0 = Instant::now();
    let k = tail_index::solve_kappa_for(&spec, 1e-13)
        .unwrap()
        .kappa
        .unwrap();
    let dt = t0.elapsed();
    let err = (k - oracle).abs();
    verdict(
        1,
        "two-atom affine κ",
        err < 1e-9 && within(dt, Duration::from_millis(10)),
        format!("κ = {k:.15}, |κ − log₂φ| = {err:.2e}, {dt:?}"),
    );
}

#[test]
fn criterion_02_arch_kappa_and_drift() {
    let t0 = Instant::now();
    let t = CramerTransform::new(&arch(), MomentMethod::Quadrature);
    let k = tail_index::solve_kappa(&t, 1e-12).unwrap().kappa.unwrap();
    let d = tail_index::stationary_drift(&t, k).unwrap();
    let dt = t0.elapsed();
    let euler_gamma = 0.577_215_664_901_532_9_f64;
    let closed = (2.0 - euler_gamma - 2f64.ln()) / 2.0;
    let fd = d.finite_difference.unwrap();
    let ok = (k - 2.0).abs() < 1e-6
        && (d.drift - closed).abs() < 1e-6
        && (d.drift - fd).abs() < 1e-6
        && within(dt, Duration::from_secs(1));
    verdict(
        2,
        "ARCH κ and drift (quadrature)",
        ok,
        format!(
            "κ = {k:.10}, drift = {:.10} (closed form {closed:.10}, finite difference {fd:.10}), {dt:?}",
            d.drift
        ),
    );
}

#[test]
fn criterion_03_gelfand() {
    let t0 = Instant::now();
    let exec = Executor::new(None, 3, 16).unwrap();
    let n = 30;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (name, spec) in [
        ("ARCH", arch()),
        ("AR-ARCH", ar1_arch(0.3, ScalarDist::standard_normal())),
    ] {
        let t = CramerTransform::new(&spec, MomentMethod::Auto);
        let logs: Vec<f64> = exec
            .map_counts(4, 100_000, |k, rng| {
                (0..k)
                    .map(|_| sim::log_lip_forward(&spec, n, rng))
                    .collect::<Vec<_>>()
            })
            .concat();
        for theta in [0.5, 1.0] {
            let rho = t.rho(theta).unwrap();
            let est = sim::gelfand_estimate(&logs, theta, n);
            let rel = (est.mean - rho).abs() / rho;
            worst = worst.max(rel);
            parts.push(format!("{name} θ={theta}: {:.4} vs ρ {:.4}", est.mean, rho));
        }
    }
    let dt = t0.elapsed();
    verdict(
        3,
        "Gelfand n=30",
        worst < 0.05 && within(dt, Duration::from_secs(30)),
        format!(
            "{}; worst relative error {worst:.4}, {dt:?}",
            parts.join("; ")
        ),
    );
}

#[test]
fn criterion_04_martingale() {
    let t0 = Instant::now();
    let spec = arch();
    let t = CramerTransform::new(&spec, MomentMethod::Auto);
    let s = spectral::eigen_pair(&t.matrix(1.0).unwrap()).unwrap();
    let exec = Executor::new(None, 4, 16).unwrap();
    let parts = exec.map_counts(3, 100_000, |k, rng| {
        let mut a = MartingaleAccumulator::new(1.0, s, 5);
        a.run(&spec, k, rng);
        a
    });
    let mut acc = MartingaleAccumulator::new(1.0, s, 5);
    for p in &parts {
        acc.merge(p);
    }
    let r = acc.finish();
    let dt = t0.elapsed();
    let worst = r
        .rows
        .iter()
        .filter(|row| row.std_error > 0.0)
        .map(|row| (row.estimate - row.target).abs() / row.std_error)
        .fold(0.0f64, f64::max);
    verdict(
        4,
        "martingale θ=1, n≤5",
        r.pass && within(dt, Duration::from_secs(30)),
        format!("{} statistics, worst {worst:.2} SE, {dt:?}", r.rows.len()),
    );
}

fn simulate(spec: ModelSpec, seed: u64, samples: usize, hill_k: Option<usize>) -> alifs::Report {
    let mut cfg = RunConfig::new(spec);
    cfg.seed = Some(seed);
    cfg.simulate.samples = samples;
    cfg.simulate.hill_k = hill_k;
    pipeline::run(Command::Simulate, &cfg, None).unwrap()
}

#[test]
fn criterion_05_symmetric_arch_tails() {
    let t0 = Instant::now();
    let r = simulate(arch(), 5, 1_000_000, Some(10_000));
    let dt = t0.elapsed();
    let e = r.empirical.as_ref().unwrap();
    let a = r.analysis.as_ref().unwrap();
    let p = a.prediction.as_ref().unwrap();
    let kappa = p.kappa.as_ref().unwrap().kappa.unwrap();
    let [hl, hr] = [e.hill[0].unwrap(), e.hill[1].unwrap()];
    let hill_ok = hl.covers(kappa) && hr.covers(kappa);
    let curve = e.tail_curve.as_ref().unwrap();
    let flat = |tail: Tail| {
        pipeline::flatness_window(curve, tail)
            .map(|w| (w.ratio.unwrap_or(f64::INFINITY), w.lo, w.hi))
    };
    let (fl, fr) = (flat(Tail::Left), flat(Tail::Right));
    let flat_ok = fl.is_some_and(|f| f.0 <= 2.0) && fr.is_some_and(|f| f.0 <= 2.0);
    let c = |label: &str| {
        e.constants
            .iter()
            .find(|c| c.label == label)
            .unwrap()
            .clone()
    };
    let (cm, cp) = (c("c_minus"), c("c_plus"));
    let overlap = cm.ci.0 <= cp.ci.1 && cp.ci.0 <= cm.ci.1;
    let (diff, se) = e.constant_relation.unwrap();
    let relation_ok = diff.abs() <= 1.96 * se + 1e-12;
    verdict(
        5,
        "symmetric ARCH tails",
        hill_ok
            && flat_ok
            && overlap
            && relation_ok
            && e.certified
            && within(dt, Duration::from_secs(120)),
        format!(
            "Hill left {:.3} [{:.3}, {:.3}], right {:.3} [{:.3}, {:.3}]; flatness {fl:?} {fr:?}; \
             C₋ = {:.4} ± {:.4}, C₊ = {:.4} ± {:.4}; relation {diff:.2e} (SE {se:.1e}); {dt:?}",
            hl.alpha,
            hl.ci_lo,
            hl.ci_hi,
            hr.alpha,
            hr.ci_lo,
            hr.ci_hi,
            cm.value,
            cm.std_error,
            cp.value,
            cp.std_error
        ),
    );
}

#[test]
fn criterion_06_distinct_tails() {
    let t0 = Instant::now();
    let km_oracle = bisect(|x| 0.5 * 1.2f64.powf(x) - 1.0, 0.1, 20.0);
    let kp_oracle = bisect(|x| 0.5 * (2f64.powf(x) + 0.1f64.powf(x)) - 1.0, 0.1, 5.0);
    let r = simulate(two_tailed(), 6, 1_000_000, None);
    let dt = t0.elapsed();
    let a = r.analysis.as_ref().unwrap();
    let p = a.prediction.as_ref().unwrap();
    let km = p.kappa_minus.as_ref().unwrap().kappa.unwrap();
    let kp = p.kappa_plus.as_ref().unwrap().kappa.unwrap();
    let e = r.empirical.as_ref().unwrap();
    let hl = e.hill[0].map(|h| h.alpha);
    let hr = e.hill[1].map(|h| h.alpha);
    let rel = |h: Option<f64>, k: f64| h.map_or(f64::INFINITY, |h| (h - k).abs() / k);
    let ok = a.case == CaseTag::UnilateralMinus
        && (km - km_oracle).abs() < 1e-9
        && (kp - kp_oracle).abs() < 1e-9
        && rel(hr, kp) <= 0.15
        && rel(hl, km) <= 0.15
        && within(dt, Duration::from_secs(180));
    verdict(
        6,
        "unilateral model with distinct tails",
        ok,
        format!(
            "κ₋ = {km:.12} (oracle {km_oracle:.12}), κ₊ = {kp:.12} (oracle {kp_oracle:.12}); \
             Hill left {hl:?} ({:.1}%), right {hr:?} ({:.1}%); {dt:?}",
            100.0 * rel(hl, km),
            100.0 * rel(hr, kp)
        ),
    );
}

#[test]
fn criterion_07_separated_right_tail() {
    let t0 = Instant::now();
    let spec = ModelSpec::Affine {
        a: ScalarDist::fair_two_point(2.0, 0.1),
        b: ScalarDist::PointMass { value: 1.0 },
    };
    let lattice = renewal::lattice_check(&spec);
    let r = simulate(spec, 7, 1_000_000, None);
    let dt = t0.elapsed();
    let a = r.analysis.as_ref().unwrap();
    let kp = a
        .prediction
        .as_ref()
        .unwrap()
        .kappa_plus
        .as_ref()
        .unwrap()
        .kappa
        .unwrap();
    let e = r.empirical.as_ref().unwrap();
    let cp = e.constants.iter().find(|c| c.label == "c_plus").unwrap();
    let hr = e.hill[1].map(|h| h.alpha);
    let rel = hr.map_or(f64::INFINITY, |h| (h - kp).abs() / kp);
    let ok = matches!(lattice, LatticeReport::Nonarithmetic { .. })
        && a.case == CaseTag::Separated
        && cp.ci.0 > 0.0
        && rel <= 0.10
        && within(dt, Duration::from_secs(120));
    verdict(
        7,
        "separated affine right tail",
        ok,
        format!(
            "lattice {lattice:?}; C₊ = {:.4} [{:.4}, {:.4}]; Hill {hr:?} vs κ₊ {kp:.6} ({:.1}%); {dt:?}",
            cp.value,
            cp.ci.0,
            cp.ci.1,
            100.0 * rel
        ),
    );
}

#[test]
fn criterion_08_case_table() {
    let specs = [
        (
            ar1_arch(1.0, ScalarDist::standard_normal()),
            CaseTag::Irreducible,
        ),
        (
            ar1_arch(0.5, ScalarDist::Uniform { lo: -0.4, hi: 2.0 }),
            CaseTag::UnilateralMinus,
        ),
        (
            ar1_arch(1.0, ScalarDist::Uniform { lo: -0.5, hi: 0.5 }),
            CaseTag::Separated,
        ),
    ];
    // warm-up
    for (s, _) in &specs {
        spectral::classify_case(&spectral::cramer_matrix(s, 0.0, MomentMethod::Auto).unwrap())
            .unwrap();
    }
    let t0 = Instant::now();
    let got: Vec<CaseTag> = specs
        .iter()
        .map(|(s, _)| {
            spectral::classify_case(&spectral::cramer_matrix(s, 0.0, MomentMethod::Auto).unwrap())
                .unwrap()
        })
        .collect();
    let dt = t0.elapsed();
    let want: Vec<CaseTag> = specs.iter().map(|s| s.1).collect();
    verdict(
        8,
        "case table",
        got == want && within(dt, Duration::from_millis(1)),
        format!("{got:?}, {dt:?}"),
    );
}

#[test]
fn criterion_09_degeneracy() {
    let spec = ModelSpec::CustomTwoSlope {
        slopes: SlopeCoupling::Independent {
            minus: ScalarDist::fair_two_point(1.0, -2.0),
            plus: ScalarDist::fair_two_point(1.0, -0.5),
        },
        b: ScalarDist::PointMass { value: 1.0 },
        perturbation: Perturbation::Shift,
    };
    let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
    spectral::degeneracy_scan(&spec, &grid, MomentMethod::Auto).unwrap();
    let t0 = Instant::now();
    let d = spectral::degeneracy_scan(&spec, &grid, MomentMethod::Auto).unwrap();
    let dt = t0.elapsed();
    let ok = d.flagged
        && d.max_residual < 1e-12
        && matches!(d.alternative, Some(DegeneracyAlternative::TwoAtom { a, product }) if (a - 0.5).abs() < 1e-15 && (product - 0.25).abs() < 1e-12)
        && within(dt, Duration::from_millis(10));
    verdict(
        9,
        "degenerate two-atom model",
        ok,
        format!(
            "residual {:.1e}, {:?}, {dt:?}",
            d.max_residual, d.alternative
        ),
    );
}

#[test]
fn criterion_10_comparison_bound() {
    let t0 = Instant::now();
    let models = [
        arch(),
        ar1_arch(0.3, ScalarDist::standard_normal()),
        two_tailed(),
    ];
    let mut violations = 0u32;
    let mut worst = f64::NEG_INFINITY;
    let mut rng = RandomStream::new(10, 0);
    for spec in &models {
        for j in 0..10_000 {
            let b = sim::backward_error_bound(spec, 1 + j % 50, &mut rng).unwrap();
            violations += b.violations;
            worst = worst.max(b.worst_excess);
        }
    }
    let dt = t0.elapsed();
    verdict(
        10,
        "pathwise comparison bound",
        violations == 0 && within(dt, Duration::from_secs(10)),
        format!("{violations} violations over 3×10⁴ draws, worst excess {worst:.3e}, {dt:?}"),
    );
}

#[test]
fn criterion_11_determinism() {
    let mut cfg = RunConfig::new(arch());
    cfg.seed = Some(11);
    cfg.simulate.samples = 20_000;
    cfg.verify.paths = 2_000;
    cfg.verify.bound_draws = 200;
    cfg.analyze.shape_samples = 2_000;
    let mut outputs = Vec::new();
    for threads in [1usize, 4, 16] {
        for _ in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            cfg.threads = Some(threads);
            pipeline::run(Command::Verify, &cfg, Some(dir.path())).unwrap();
            outputs.push((
                threads,
                std::fs::read(dir.path().join("report.json")).unwrap(),
            ));
        }
    }
    let same = outputs.iter().all(|(_, b)| *b == outputs[0].1);
    verdict(
        11,
        "byte-identical verify reports",
        same,
        format!(
            "{} runs at 1, 4, 16 threads, {} bytes",
            outputs.len(),
            outputs[0].1.len()
        ),
    );
}
