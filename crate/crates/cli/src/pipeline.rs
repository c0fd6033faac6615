use anyhow::Result;
use fractalab_core::content::{
    content_calculus_check, essential_content_from_sample, essential_csv, hausdorff_content_upper, ContentInput,
    Region,
};
use fractalab_core::cutset::{
    awsc_csv, awsc_statistic, cut_set, exact_overlap_scan, is_exhaustive, is_prefix_free, product_mass, CenterPlan,
};
use fractalab_core::numeric::{level_size, tree_size, word_budget};
use fractalab_core::targets::{
    baker_sg, compbaker_experiment, condition_flags, coverage_check, dyadic_ladder, limsup_box_dimension,
    series_upper_bound, target_balls, EpsLadder,
};
use fractalab_core::thermo::{
    affordable_depth, conformality_dimension_with, gibbs_consistency, lyapunov_exponent, pressure,
    weak_conformality_diagnostic, DimensionOptions,
};
use fractalab_core::{attractor_sample, Error, IfsSpec, IfsSystem, PointCloud, ProbabilityVector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{default_rmin, BakerParams, ContentParams, ExperimentConfig, TargetParams, Task};
use crate::manifest::BudgetUse;
use crate::validate::{validate_spec, Diagnostic, Level};

/// Depth of the exact-overlap probe in reports.
const OVERLAP_DEPTH: usize = 6;

/// Largest cut-set whose words are listed in the JSON report.
const MAX_LISTED_WORDS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Inconclusive,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

/// Everything a pipeline produces before it is written to disk.
#[derive(Debug, Clone)]
pub struct Report {
    pub result: Value,
    /// Tabular export for `--format csv`.
    pub table: Option<String>,
    /// Lines echoed to stdout.
    pub summary: Vec<String>,
    pub outcome: Outcome,
    pub warnings: Vec<String>,
    pub budgets: Vec<BudgetUse>,
    /// Extra files `(suffix, contents)` written next to the report.
    pub attachments: Vec<(String, String)>,
}

impl Report {
    fn new(result: Value) -> Self {
        Report {
            result,
            table: None,
            summary: Vec::new(),
            outcome: Outcome::Pass,
            warnings: Vec::new(),
            budgets: Vec::new(),
            attachments: Vec::new(),
        }
    }

    fn degrade(&mut self, outcome: Outcome, warning: String) {
        self.outcome = self.outcome.max(outcome);
        self.warnings.push(warning);
    }

    fn budget(&mut self, operation: &str, words: u64) {
        self.budgets.push(BudgetUse {
            operation: operation.into(),
            words,
            cap: word_budget(),
        });
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn weights_for(system: &IfsSystem, weights: &Option<Vec<f64>>) -> Result<ProbabilityVector> {
    let p = match weights {
        None => ProbabilityVector::uniform(system.len()),
        Some(v) => ProbabilityVector::new(v.clone())?,
    };
    p.check_len(system.len())?;
    Ok(p)
}

pub fn system_summary(spec: &IfsSpec, system: &IfsSystem) -> Value {
    json!({
        "name": spec.name,
        "dim": system.dim(),
        "maps": system.len(),
        "similarity": system.is_similarity(),
        "ratios": system.ratios(),
        "attractor_diameter": system.diameter(),
        "contraction_bounds": system.contraction_bounds(),
    })
}

/// Runs the configured task. Core errors propagate unchanged so the caller
/// can tell budget and inconclusive failures apart.
pub fn execute(config: &ExperimentConfig, spec: &IfsSpec) -> Result<Report> {
    if let Task::Validate { kmax } = &config.task {
        return Ok(validate_report(spec, *kmax));
    }
    let system = spec.build()?;
    match &config.task {
        Task::Dim { tol, certify_width } => dim(&system, *tol, *certify_width),
        Task::Pressure { s, kmax } => pressure_report(&system, s, *kmax),
        Task::Cutset { r, weights } => cutset_report(&system, *r, weights),
        Task::Awsc { kmin, kmax } => awsc_report(&system, *kmin, *kmax),
        Task::Target(p) => target_report(&system, p, config.seed),
        Task::Baker(p) => baker_report(&system, p),
        Task::Content(p) => content_report(&system, p, config.seed),
        Task::FullReport { tol } => full_report(&system, *tol, config.seed),
        Task::Validate { .. } => unreachable!("handled above"),
    }
}

/// Report for a pipeline that stopped early.
pub fn failure_report(outcome: Outcome, result: Value, warning: String) -> Report {
    let mut report = Report::new(result);
    report.degrade(outcome, warning);
    report
}

fn validate_report(spec: &IfsSpec, kmax: Option<usize>) -> Report {
    diagnostics_report(validate_spec(spec, kmax))
}

pub fn diagnostics_report(diagnostics: Vec<Diagnostic>) -> Report {
    let errors = diagnostics.iter().filter(|d| d.level == Level::Error).count();
    let mut report = Report::new(json!({ "errors": errors, "diagnostics": diagnostics }));
    report.summary = diagnostics.iter().map(|d| d.to_string()).collect();
    report.table = Some(crate::validate::diagnostics_csv(&diagnostics));
    if errors > 0 {
        report.outcome = Outcome::Fail;
    }
    report
}

fn dim(system: &IfsSystem, tol: f64, certify_width: f64) -> Result<Report> {
    let est = conformality_dimension_with(
        system,
        DimensionOptions {
            tol,
            certify_width,
            budget: word_budget(),
        },
    )?;
    let mut report = Report::new(to_value(&est));
    report.summary.push(format!("{}", est.value));
    report.budget("conformality_dimension", tree_size(system.len(), est.depth));
    Ok(report)
}

fn pressure_report(system: &IfsSystem, s_values: &[f64], kmax: usize) -> Result<Report> {
    let mut rows = Vec::new();
    let mut table = String::from("s,value,lower,upper,method\n");
    let mut summary = Vec::new();
    for &s in s_values {
        let p = pressure(system, s, kmax)?;
        table.push_str(&format!(
            "{},{},{},{},{}\n",
            s,
            p.value,
            p.bracket[0],
            p.bracket[1],
            to_value(&p.method).as_str().unwrap_or_default()
        ));
        summary.push(format!("{}", p.value));
        rows.push(to_value(&p));
    }
    let mut report = Report::new(json!({ "kmax": kmax, "estimates": rows }));
    report.table = Some(table);
    report.summary = summary;
    if !system.is_similarity() {
        report.budget("pressure", tree_size(system.len(), kmax));
    }
    Ok(report)
}

fn cutset_report(system: &IfsSystem, r: f64, weights: &Option<Vec<f64>>) -> Result<Report> {
    let p = weights_for(system, weights)?;
    let cut = cut_set(system, r)?;
    let prefix_free = is_prefix_free(&cut.words);
    let exhaustive = is_exhaustive(&cut.words, system.len());
    let mass = product_mass(&cut.words, &p);
    let mut table = String::from("word,length,diameter\n");
    for g in &cut.geometries {
        table.push_str(&format!("{},{},{}\n", g.word, g.word.len(), g.diameter));
    }
    let listed = cut.len() <= MAX_LISTED_WORDS;
    let mut report = Report::new(json!({
        "threshold": r,
        "size": cut.len(),
        "min_len": cut.min_len(),
        "max_len": cut.max_len(),
        "prefix_free": prefix_free,
        "exhaustive": exhaustive,
        "product_mass": mass,
        "words": if listed {
            Value::from(cut.words.iter().map(|w| w.to_string()).collect::<Vec<_>>())
        } else {
            Value::Null
        },
    }));
    if !listed {
        report.warnings.push(format!("{} words: listed in the CSV export only", cut.len()));
    }
    report.summary.push(format!("{} words, lengths {}..={}", cut.len(), cut.min_len(), cut.max_len()));
    report.table = Some(table);
    report.budget("cut_set", cut.len() as u64);
    if !(prefix_free && exhaustive && (mass - 1.0).abs() <= 1e-12) {
        report.degrade(Outcome::Fail, "cut-set is not a maximal antichain".into());
    }
    Ok(report)
}

fn awsc_rows(system: &IfsSystem, kmin: usize, kmax: usize) -> Result<Vec<fractalab_core::cutset::AwscReport>> {
    (kmin..=kmax)
        .map(|k| Ok(awsc_statistic(system, k, &CenterPlan::default())?))
        .collect()
}

fn awsc_report(system: &IfsSystem, kmin: usize, kmax: usize) -> Result<Report> {
    let rows = awsc_rows(system, kmin, kmax)?;
    let decreasing = rows.windows(2).all(|w| w[1].log_t_over_k() <= w[0].log_t_over_k());
    let max_t = rows.iter().map(|r| r.t_k).max().unwrap_or(0);
    let mut report = Report::new(json!({
        "levels": rows,
        "max_t_k": max_t,
        "log_t_over_k_non_increasing": decreasing,
    }));
    report.summary = rows
        .iter()
        .map(|r| format!("k={} t_k={} log(t_k)/k={}", r.k, r.t_k, r.log_t_over_k()))
        .collect();
    report.table = Some(awsc_csv(&rows));
    report.budget("awsc", rows.iter().map(|r| r.cut_size as u64).sum());
    Ok(report)
}

fn target_report(system: &IfsSystem, p: &TargetParams, seed: u64) -> Result<Report> {
    let weights = weights_for(system, &p.weights)?;
    let eps = EpsLadder {
        jmin: p.eps_jmin,
        jmax: p.eps_jmax,
    };
    let mut report = Report::new(Value::Null);
    let mut entries = Vec::new();
    let mut table = String::from("delta,eps,N,logN\n");
    for &delta in &p.delta {
        let mut entry = json!({ "delta": delta });
        let mut line = format!("delta={delta}");
        if delta > 0.0 {
            match series_upper_bound(system, delta, p.series_epsilon) {
                Ok(b) => {
                    line.push_str(&format!(" series_bound={}", b.value));
                    entry["series_bound"] = to_value(&b);
                }
                Err(Error::Inconclusive { reason, .. }) => {
                    report.degrade(Outcome::Inconclusive, format!("delta {delta}: series bound {reason}"));
                    entry["series_bound"] = Value::Null;
                }
                Err(e) => return Err(e.into()),
            }
        }
        let rmin = p.rmin.unwrap_or_else(|| default_rmin(delta));
        let exp = target_balls(system, &p.x0, delta, &dyadic_ladder(p.rmax, rmin)?)?;
        report.budget(&format!("target_balls(delta={delta})"), exp.ball_count() as u64);
        entry["generations"] = to_value(&exp.generations);
        match limsup_box_dimension(&exp, eps) {
            Ok(est) => {
                line.push_str(&format!(" box_estimate={} ± {}", est.dim_estimate, est.half_width));
                for b in &est.boxcount {
                    table.push_str(&format!("{},{},{},{}\n", delta, b.eps, b.n, b.log_n));
                }
                entry["boxcount"] = to_value(&est);
            }
            Err(e @ (Error::InsufficientScales { .. } | Error::InvalidParameter(_))) => {
                report.degrade(Outcome::Inconclusive, format!("delta {delta}: box count {e}"));
                entry["boxcount"] = Value::Null;
            }
            Err(e) => return Err(e.into()),
        }
        if exp.generations.len() >= 2 {
            let rows = coverage_check(&exp, system, &weights, p.coverage_points, seed)?;
            if let Some(last) = rows.last() {
                line.push_str(&format!(" coverage={}", last.fraction));
            }
            entry["coverage"] = to_value(&rows);
        }
        report.summary.push(line);
        entries.push(entry);
    }
    report.result = json!({ "x0": p.x0, "rmax": p.rmax, "eps_ladder": eps, "deltas": entries });
    report.table = Some(table);
    Ok(report)
}

fn baker_report(system: &IfsSystem, p: &BakerParams) -> Result<Report> {
    let baker = baker_sg(system, p.gauge, 1e-15)?;
    let eps = EpsLadder {
        jmin: p.eps_jmin,
        jmax: p.eps_jmax,
    };
    let mut report = Report::new(Value::Null);
    report.summary.push(format!("s_g={}", baker.s_g));
    let mut table = String::from("delta,predicted,estimate,half_width\n");
    let mut experiments = Vec::new();
    if !baker.condition_flags.satisfied {
        report.degrade(
            Outcome::Inconclusive,
            "neither the entropy condition nor equal ratios holds; experiments skipped".into(),
        );
    } else {
        for &delta in &p.delta {
            let rmin = p.rmin.unwrap_or_else(|| default_rmin(delta));
            match compbaker_experiment(system, &p.x0, p.gauge, delta, &dyadic_ladder(p.rmax, rmin)?, eps) {
                Ok(r) => {
                    table.push_str(&format!(
                        "{},{},{},{}\n",
                        delta, r.predicted, r.estimate.dim_estimate, r.estimate.half_width
                    ));
                    report.summary.push(format!(
                        "delta={delta} predicted={} estimate={}",
                        r.predicted, r.estimate.dim_estimate
                    ));
                    for a in &r.assumed {
                        report.warnings.push(format!("delta {delta}: assumed {a}"));
                    }
                    experiments.push(to_value(&r));
                }
                Err(e @ (Error::InvalidParameter(_) | Error::InsufficientScales { .. })) => {
                    report.degrade(Outcome::Inconclusive, format!("delta {delta}: {e}"));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    report.result = json!({ "baker": baker, "experiments": experiments });
    report.table = Some(table);
    Ok(report)
}

fn without_cover(v: &impl Serialize) -> Value {
    let mut v = to_value(v);
    if let Some(obj) = v.as_object_mut() {
        obj.remove("cover");
    }
    v
}

fn restrict(cloud: &PointCloud, region: &Region) -> PointCloud {
    PointCloud::from_points(cloud.dim(), cloud.iter().filter(|p| region.contains(p)))
}

fn content_report(system: &IfsSystem, p: &ContentParams, seed: u64) -> Result<Report> {
    let weights = weights_for(system, &p.weights)?;
    let cloud = attractor_sample(system, &weights, p.samples, seed)?;
    let inside = restrict(&cloud, &p.region);
    if inside.is_empty() {
        return Err(Error::ZeroMass.into());
    }
    let mut plain = Vec::new();
    let mut essentials = Vec::new();
    let mut covers = Vec::new();
    for &s in &p.s {
        for &h in &p.grid_scale {
            let c = hausdorff_content_upper(ContentInput::Points(&inside), s, h)?;
            for &eta in &p.eta {
                let e = essential_content_from_sample(&cloud, &p.region, s, eta, h)?;
                covers.push(json!({ "s": s, "eta": eta, "grid_scale": h, "cover": e.cover }));
                essentials.push(e);
            }
            plain.push(c);
        }
    }
    let ledger = content_calculus_check(&plain, &essentials);
    let mut report = Report::new(json!({
        "samples": p.samples,
        "region": p.region,
        "plain": plain.iter().map(without_cover).collect::<Vec<_>>(),
        "essential": essentials.iter().map(without_cover).collect::<Vec<_>>(),
        "calculus": ledger,
    }));
    report.summary = essentials
        .iter()
        .map(|e| format!("s={} eta={} grid={} value={}", e.s, e.eta, e.grid_scale, e.value))
        .collect();
    report.table = Some(essential_csv(&essentials));
    report
        .attachments
        .push(("covers.json".into(), serde_json::to_string(&covers)? + "\n"));
    if !ledger.all_passed {
        let failed: Vec<_> = ledger.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        report.degrade(Outcome::Fail, format!("content calculus checks failed: {failed:?}"));
    }
    Ok(report)
}

fn full_report(system: &IfsSystem, tol: f64, seed: u64) -> Result<Report> {
    let mut report = Report::new(Value::Null);
    let m = system.len();
    let budget = word_budget();
    let weights = ProbabilityVector::uniform(m);

    let (dim_value, dim_section) = match conformality_dimension_with(system, DimensionOptions::new(tol)) {
        Ok(est) => {
            report.budget("conformality_dimension", tree_size(m, est.depth));
            (est.value, to_value(&est))
        }
        Err(Error::Inconclusive { reason, ladder }) => {
            report.degrade(Outcome::Inconclusive, format!("dimension: {reason}"));
            let last = *ladder.last().unwrap_or(&0.0);
            (last, json!({ "inconclusive": reason, "ladder": ladder }))
        }
        Err(e) => return Err(e.into()),
    };
    report.summary.push(format!("dim={dim_value}"));

    let pressure_depth = affordable_depth(m, budget).min(10);
    let pressures = [0.0, dim_value, 1.0]
        .iter()
        .map(|&s| pressure(system, s, pressure_depth).map(|p| to_value(&p)))
        .collect::<Result<Vec<_>, _>>()?;

    let gibbs_depth = (1..=5).take_while(|&k| level_size(m, 2 * k) <= budget).last().unwrap_or(0);
    let mut gibbs = Vec::new();
    for k in 1..=gibbs_depth {
        let g = gibbs_consistency(system, dim_value, k)?;
        if !g.within {
            report.degrade(Outcome::Fail, format!("Gibbs weights at k={k} leave the bracket"));
        }
        gibbs.push(to_value(&g));
    }

    let ergodic = lyapunov_exponent(system, &weights, 2000, 64, seed)?;
    let conformality = weak_conformality_diagnostic(system, 8, 200, seed)?;

    let awsc_max = (4..=10).take_while(|&k| awsc_statistic_affordable(system, k)).last();
    let awsc = match awsc_max {
        Some(kmax) => to_value(&awsc_rows(system, 4, kmax)?),
        None => Value::Null,
    };

    let overlap_depth = affordable_depth(m, budget).min(OVERLAP_DEPTH);
    let overlaps = exact_overlap_scan(system, overlap_depth)?;
    let flags = system.ratios().map(|r| condition_flags(&r));

    let r = system.attractor_diameter() * 0.5f64.powi(6);
    let cut = cut_set(system, r)?;
    let cut_section = json!({
        "threshold": r,
        "size": cut.len(),
        "prefix_free": is_prefix_free(&cut.words),
        "exhaustive": is_exhaustive(&cut.words, m),
        "product_mass": product_mass(&cut.words, &weights),
    });

    let cloud = attractor_sample(system, &weights, 20_000, seed)?;
    let grid = system.attractor_diameter() * 0.5f64.powi(8);
    let content = essential_content_from_sample(&cloud, &Region::Whole, dim_value, 0.05, grid)?;

    report.result = json!({
        "dimension": dim_section,
        "pressure": pressures,
        "gibbs": gibbs,
        "ergodic": ergodic,
        "weak_conformality": conformality,
        "awsc": awsc,
        "exact_overlaps": { "depth": overlap_depth, "pairs": overlaps.len() },
        "condition_flags": flags,
        "cut_set": cut_section,
        "essential_content": without_cover(&content),
    });
    Ok(report)
}

fn awsc_statistic_affordable(system: &IfsSystem, k: usize) -> bool {
    let r = 0.5f64.powi(k as i32);
    fractalab_core::cutset::cut_set_size(system, r, word_budget()).is_ok_and(|n| n <= 200_000)
}
