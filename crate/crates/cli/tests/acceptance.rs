//! Acceptance suite: one PASS/FAIL line per criterion, with wall time.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fractalab_cli::config::{default_rmin, ExperimentConfig, OutputFormat, Task};
use fractalab_core::content::{
    check_monotone, check_power_mean, content_calculus_check, essential_content_from_sample,
    hausdorff_content_upper, ContentInput, Region,
};
use fractalab_core::cutset::{awsc_statistic, cut_set, is_exhaustive, is_prefix_free, product_mass, CenterPlan};
use fractalab_core::targets::{
    baker_sg, compbaker_experiment, coverage_check, dyadic_ladder, limsup_box_dimension, series_upper_bound,
    target_balls, EpsLadder, GaugeSpec,
};
use fractalab_core::thermo::{conformality_dimension, gibbs_consistency, pressure, pressure_enumerated};
use fractalab_core::{attractor_sample, gallery, IfsSystem, PointCloud, ProbabilityVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    limit: Option<Duration>,
    check: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cantor_dim() -> f64 {
    2f64.ln() / 3f64.ln()
}

fn similarity_systems() -> Vec<(String, IfsSystem)> {
    gallery::all_specs()
        .into_iter()
        .map(|s| (s.name.clone().unwrap_or_default(), s.build().expect("gallery builds")))
        .collect()
}

fn similarity_dimension_exactness() -> Outcome {
    let cases = [
        (gallery::cantor(), cantor_dim(), "cantor"),
        (gallery::dyadic_twin(), 1.0, "dyadic-twin"),
        (gallery::half_quarter_quarter(), 1.0, "half-quarter-quarter"),
    ];
    let mut detail = Vec::new();
    for (sys, expected, name) in cases {
        let start = Instant::now();
        let d = conformality_dimension(&sys, 1e-10).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let err = (d.value - expected).abs();
        ensure(err <= 1e-10, || format!("{name}: {} vs {expected}", d.value))?;
        ensure(elapsed < Duration::from_secs(1), || format!("{name}: {elapsed:?}"))?;
        detail.push(format!("{name} err={err:.1e}"));
    }
    Ok(detail.join(", "))
}

fn pressure_consistency() -> Outcome {
    let mut worst = 0.0f64;
    for (name, sys) in similarity_systems() {
        let ratios = sys.ratios().expect("similarity");
        let m = ratios.len() as f64;
        let dim = conformality_dimension(&sys, 1e-12).map_err(|e| e.to_string())?.value;
        let log_k = sys.attractor_diameter().ln();
        for s in [0.0, 0.3, dim, 1.0] {
            let p = pressure_enumerated(&sys, s, 8).map_err(|e| e.to_string())?;
            let closed = ratios.iter().map(|c| c.powf(s)).sum::<f64>().ln() + s * log_k / 8.0;
            let err = (p.gk[7] / 8.0 - closed).abs();
            worst = worst.max(err);
            ensure(err <= 1e-9, || format!("{name} s={s}: g_8/8 off by {err:.2e}"))?;
        }
        let p0 = pressure(&sys, 0.0, 8).map_err(|e| e.to_string())?.value;
        ensure(p0 == m.ln(), || format!("{name}: P(0) = {p0} != log {m}"))?;
    }
    Ok(format!("max |g_8/8 - closed form| = {worst:.2e}"))
}

fn cut_set_antichain() -> Outcome {
    let systems = similarity_systems();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut words = 0usize;
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let (name, sys) = &systems[rng.gen_range(0..systems.len())];
        let r = sys.attractor_diameter() * 10f64.powf(-0.1 - 2.4 * rng.gen::<f64>());
        let raw: Vec<f64> = (0..sys.len()).map(|_| rng.gen_range(0.05..1.0)).collect();
        let weights = ProbabilityVector::normalized(&raw).map_err(|e| e.to_string())?;
        let cut = cut_set(sys, r).map_err(|e| e.to_string())?;
        ensure(is_prefix_free(&cut.words), || format!("trial {trial} ({name}, r={r}): not prefix-free"))?;
        ensure(is_exhaustive(&cut.words, sys.len()), || format!("trial {trial} ({name}, r={r}): not exhaustive"))?;
        let err = (product_mass(&cut.words, &weights) - 1.0).abs();
        worst = worst.max(err);
        ensure(err <= 1e-12, || format!("trial {trial} ({name}, r={r}): mass off by {err:.2e}"))?;
        words += cut.len();
    }
    Ok(format!("50 pairs, {words} words, max mass error {worst:.1e}"))
}

const MIN_STABLE_SCALES: usize = 5;

fn shrinking_target_law() -> Outcome {
    let sys = gallery::cantor();
    let dim = cantor_dim();
    for delta in [0.5, 1.0, 2.0, 4.0] {
        let b = series_upper_bound(&sys, delta, 1e-3).map_err(|e| e.to_string())?;
        ensure((b.value * delta - dim).abs() <= 1e-8, || format!("series bound at δ={delta}: {}", b.value))?;
    }
    let mut detail = Vec::new();
    // radii shrink like r^δ, so δ = 2 needs an ε ladder twice as deep to see as many generations
    let runs = [
        (1.0, 0.05, default_rmin(1.0), EpsLadder::default()),
        (2.0, 0.08, 0.5f64.powi(12), EpsLadder { jmin: 6, jmax: 24 }),
    ];
    for (delta, tol, rmin, eps) in runs {
        let target = dim / delta;
        let ladder = dyadic_ladder(0.5, rmin).map_err(|e| e.to_string())?;
        let exp = target_balls(&sys, &[0.0], delta, &ladder).map_err(|e| e.to_string())?;
        let est = limsup_box_dimension(&exp, eps).map_err(|e| e.to_string())?;
        ensure((est.dim_estimate - target).abs() <= tol, || {
            format!("δ={delta}: box estimate {} vs {target}", est.dim_estimate)
        })?;
        // fits left with fewer than MIN_STABLE_SCALES points are reported but not judged
        let judged: Vec<_> = est.stabilization.iter().filter(|s| s.scales >= MIN_STABLE_SCALES).collect();
        ensure(judged.len() >= 3, || format!("δ={delta}: only {} g_min fits with enough scales", judged.len()))?;
        ensure(judged.iter().all(|s| (s.estimate - target).abs() <= tol), || {
            format!("δ={delta}: stabilization drifts: {:?}", est.stabilization)
        })?;
        let spread = judged.iter().map(|s| s.estimate).fold(f64::NEG_INFINITY, f64::max)
            - judged.iter().map(|s| s.estimate).fold(f64::INFINITY, f64::min);
        detail.push(format!(
            "δ={delta}: {:.4} (spread {spread:.3} over g_min 0..={})",
            est.dim_estimate,
            judged.len() - 1
        ));
    }
    Ok(detail.join(", "))
}

fn trichotomy_endpoints() -> Outcome {
    let sys = gallery::cantor();
    let uniform = ProbabilityVector::uniform(2);
    let inside = target_balls(&sys, &[0.0], 0.9, &dyadic_ladder(0.5, 3f64.powi(-12)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let rows = coverage_check(&inside, &sys, &uniform, 50_000, 1).map_err(|e| e.to_string())?;
    let full = rows.last().expect("rows").fraction;
    ensure(full >= 0.999, || format!("δ=0.9, x0=0: coverage {full}"))?;

    let rmin = 3f64.powi(-20) * (1.0 + 1e-9);
    let outside = target_balls(&sys, &[2.0], 1.5, &dyadic_ladder(0.5, rmin).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let rows = coverage_check(&outside, &sys, &uniform, 200_000, 2).map_err(|e| e.to_string())?;
    let last = rows.last().expect("rows");
    ensure(last.fraction <= 1e-3, || format!("δ=1.5, x0=2: coverage {}", last.fraction))?;
    Ok(format!(
        "x0=0: {full}, x0=2: {} ({} balls)",
        last.fraction, last.balls
    ))
}

fn baker_complement() -> Outcome {
    let sys = gallery::dyadic_twin();
    let gauge = GaugeSpec::Exponential { a: 0.25 };
    let closed = 2f64.ln() / (0.25 + 2f64.ln());
    let b = baker_sg(&sys, gauge, 1e-15).map_err(|e| e.to_string())?;
    ensure((b.s_g - closed).abs() <= 1e-9, || format!("s_g = {} vs {closed}", b.s_g))?;
    let mut detail = vec![format!("s_g err={:.1e}", (b.s_g - closed).abs())];
    for (delta, rmin) in [(1.0, 0.5f64.powi(15)), (2.0, 0.5f64.powi(8))] {
        let ladder = dyadic_ladder(0.5, rmin).map_err(|e| e.to_string())?;
        let r = compbaker_experiment(&sys, &[0.0], gauge, delta, &ladder, EpsLadder::default())
            .map_err(|e| e.to_string())?;
        let expected = b.dim / delta.max(1.0);
        ensure((r.predicted - expected).abs() <= 1e-12, || format!("δ={delta}: prediction {}", r.predicted))?;
        ensure((r.estimate.dim_estimate - r.predicted).abs() <= 0.08, || {
            format!("δ={delta}: estimate {} vs {}", r.estimate.dim_estimate, r.predicted)
        })?;
        detail.push(format!("δ={delta}: {:.4} vs {}", r.estimate.dim_estimate, r.predicted));
    }
    Ok(detail.join(", "))
}

fn content_calculus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut estimates = Vec::new();
    for _ in 0..100 {
        let d = rng.gen_range(1..=2);
        let n = rng.gen_range(1..80);
        let coords: Vec<f64> = (0..n * d).map(|_| rng.gen::<f64>()).collect();
        let cloud = PointCloud::from_points(d, coords.chunks(d));
        let s = rng.gen_range(0.0..2.5);
        let floor = 0.5f64.powi(rng.gen_range(3..10));
        let e = hausdorff_content_upper(ContentInput::Points(&cloud), s, floor).map_err(|e| e.to_string())?;
        ensure(e.cover.max_side() <= 1.0, || format!("cover side {} > 1", e.cover.max_side()))?;
        ensure(check_power_mean(&e.cover, s).passed, || format!("power mean fails at s={s}"))?;
        ensure(check_monotone(&e.cover, 3.0).passed, || format!("monotonicity fails at s={s}"))?;
        estimates.push(e);
    }
    let ledger = content_calculus_check(&estimates, &[]);
    ensure(ledger.all_passed, || {
        format!("{:?}", ledger.checks.iter().find(|c| !c.passed))
    })?;

    let cloud = attractor_sample(&gallery::cantor(), &ProbabilityVector::uniform(2), 100_000, 11)
        .map_err(|e| e.to_string())?;
    let mut essentials = Vec::new();
    for s in [0.3, 0.5, cantor_dim(), 0.9] {
        for j in 6..=8 {
            for eta in [0.0, 0.01, 0.05, 0.1, 0.2] {
                essentials.push(
                    essential_content_from_sample(&cloud, &Region::Whole, s, eta, 3f64.powi(-j))
                        .map_err(|e| e.to_string())?,
                );
            }
        }
    }
    let ledger = content_calculus_check(&[], &essentials);
    ensure(ledger.all_passed, || format!("{:?}", ledger.checks.iter().find(|c| !c.passed)))?;

    let decay: Vec<f64> = (7..=9)
        .map(|j| essential_content_from_sample(&cloud, &Region::Whole, 0.9, 0.05, 3f64.powi(-j)).map(|e| e.value))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(decay[0] > decay[1] && decay[1] > decay[2], || format!("no decay above dimension: {decay:?}"))?;
    Ok(format!(
        "100 covers, {} (s, eta, grid) points, decay {:.3} > {:.3} > {:.3}",
        essentials.len(),
        decay[0],
        decay[1],
        decay[2]
    ))
}

fn awsc_trend() -> Outcome {
    let sys = gallery::cantor();
    let mut rows = Vec::new();
    for k in 4..=12 {
        rows.push(awsc_statistic(&sys, k, &CenterPlan::default()).map_err(|e| e.to_string())?);
    }
    for r in &rows {
        ensure(r.t_k <= 3, || format!("t_{} = {}", r.k, r.t_k))?;
    }
    for w in rows.windows(2) {
        ensure(w[1].log_t_over_k() < w[0].log_t_over_k(), || {
            format!("log(t_k)/k not decreasing at k={}: {} then {}", w[1].k, w[0].log_t_over_k(), w[1].log_t_over_k())
        })?;
    }
    let t: Vec<usize> = rows.iter().map(|r| r.t_k).collect();
    Ok(format!("t_4..t_12 = {t:?}"))
}

fn gibbs_consistency_check() -> Outcome {
    let mut systems = similarity_systems();
    systems.push(("nonlinear-cantor".into(), gallery::nonlinear_cantor()));
    let mut worst = 0.0f64;
    for (name, sys) in &systems {
        let dim = conformality_dimension(sys, 1e-10).map_err(|e| e.to_string())?.value;
        for k in 1..=5 {
            let g = gibbs_consistency(sys, dim, k).map_err(|e| e.to_string())?;
            ensure(g.within, || format!("{name} k={k}: ratios {:?} outside 1/{} .. {}", g.ratio_range, g.gamma, g.gamma))?;
            worst = worst.max(g.gamma);
        }
    }
    Ok(format!("{} systems, k ≤ 5, largest bracket constant {worst:.3}", systems.len()))
}

fn run_gallery(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for spec in gallery::every_spec() {
        let name = spec.name.clone().unwrap_or_default();
        let report = dir.join(format!("{name}.json"));
        let cfg = ExperimentConfig {
            ifs: format!("gallery:{name}"),
            seed: 42,
            format: OutputFormat::Json,
            out: Some(report.clone()),
            task: Task::FullReport { tol: 1e-10 },
        };
        fractalab_cli::run(&cfg).map_err(|e| format!("{name}: {e:#}"))?;
        out.push((name, std::fs::read(&report).map_err(|e| e.to_string())?));
    }
    Ok(out)
}

fn determinism() -> Outcome {
    let a = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let b = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let first = run_gallery(a.path())?;
    let second = run_gallery(b.path())?;
    for ((name, x), (_, y)) in first.iter().zip(&second) {
        ensure(x == y, || format!("{name}: reports differ"))?;
    }
    Ok(format!("{} full reports identical", first.len()))
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { name: "similarity-dimension-exactness", limit: secs(3), check: similarity_dimension_exactness },
        Criterion { name: "pressure-consistency", limit: secs(5), check: pressure_consistency },
        Criterion { name: "cut-set-antichain", limit: None, check: cut_set_antichain },
        Criterion { name: "shrinking-target-law", limit: secs(60), check: shrinking_target_law },
        Criterion { name: "trichotomy-endpoints", limit: secs(30), check: trichotomy_endpoints },
        Criterion { name: "baker-complement", limit: secs(90), check: baker_complement },
        Criterion { name: "content-calculus", limit: secs(30), check: content_calculus },
        Criterion { name: "awsc-trend", limit: secs(20), check: awsc_trend },
        Criterion { name: "gibbs-consistency", limit: secs(10), check: gibbs_consistency_check },
        Criterion { name: "determinism", limit: None, check: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took longer than {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {} [{:.2}s] {detail}", c.name, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {} [{:.2}s] {why}", c.name, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
