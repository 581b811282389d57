use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use hypercoreset::sampling::{generate, random_point, substream, Generator, MAX_SAMPLE_RADIUS};
use hypercoreset::validation::{self, coreset_violation, SweepReport};
use hypercoreset::{
    bichromatic_farthest_approx, bichromatic_farthest_exact_capped, build_coreset, center_approx, center_exact_capped,
    diameter_approx, diameter_exact_capped, farthest_approx, mst_max_approx, mst_max_exact_capped, BallPoint, Coreset,
    CoresetRecord, PointSet, ORACLE_CAP,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::pointfile::{self, Loaded};
use crate::report::{write_stdout, CheckSummary, RunReport};
use crate::{
    BenchArgs, BichromaticArgs, BuildArgs, CliError, Common, GenArgs, QueryArgs, SolveArgs, Suite, ValidateArgs,
};

/// Random queries added to the input points by `build --check`.
const BUILD_CHECK_QUERIES: usize = 100;

/// Stored coreset: the record plus the digest of the point file it indexes.
#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    source_digest: String,
    #[serde(flatten)]
    record: CoresetRecord,
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn cap(common: &Common) -> Option<usize> {
    (!common.force).then_some(ORACLE_CAP)
}

fn describe(report: &mut RunReport, name: &str, path: &Path, loaded: &Loaded) {
    report
        .param(name, path.display().to_string())
        .param(&format!("{name}_digest"), loaded.digest.clone())
        .param("dim", loaded.points.dim())
        .param(&format!("{name}_n"), loaded.points.len());
}

/// Margin of `value` inside `[max(exact - ε, (1 - ε) exact), exact]`.
fn band_margin(value: f64, exact: f64, eps: f64) -> f64 {
    let lower = (exact - eps).max((1.0 - eps) * exact);
    (value - lower).min(exact - value)
}

pub fn gen(a: GenArgs) -> Result<(), CliError> {
    if a.dim < 2 {
        return Err(CliError::Usage("point files need dimension at least 2".into()));
    }
    let points = generate(a.generator, a.n, a.dim, a.radius, a.seed)?;
    let text = pointfile::render(&points);
    match &a.out {
        Some(path) => write_file(path, &text),
        None => write_stdout(&text),
    }
}

fn coreset_summary(c: &Coreset<'_>) -> Value {
    json!({
        "regime": c.regime(),
        "size": c.len(),
        "delta1": c.delta1(),
        "indices": c.indices(),
        "stats": c.stats(),
    })
}

fn check_queries(coreset: &Coreset<'_>, queries: &[BallPoint], common: &Common) -> Result<CheckSummary, CliError> {
    let n = coreset.source().len();
    if let Some(cap) = cap(common) {
        if n > cap {
            return Err(hypercoreset::Error::TooLarge {
                what: "farthest-point oracle",
                size: n,
                cap,
            }
            .into());
        }
    }
    let eps = coreset.epsilon();
    let margins: Vec<f64> = queries
        .par_iter()
        .map(|q| -coreset_violation(coreset, q, eps))
        .collect();
    let mut summary = CheckSummary::default();
    margins.into_iter().for_each(|m| summary.record(m));
    Ok(summary)
}

pub fn build(a: BuildArgs) -> Result<(), CliError> {
    let loaded = pointfile::read(&a.points)?;
    let mut report = RunReport::new("build");
    describe(&mut report, "points", &a.points, &loaded);
    report.param("eps", a.eps);
    let t = Instant::now();
    let coreset = build_coreset(&loaded.points, a.eps)?;
    report.time("build", t);
    report.results = coreset_summary(&coreset);
    if let Some(path) = &a.coreset {
        let sidecar = Sidecar {
            source_digest: loaded.digest.clone(),
            record: coreset.record(),
        };
        write_file(
            path,
            &(serde_json::to_string_pretty(&sidecar).expect("record serializes") + "\n"),
        )?;
    }
    if a.common.check {
        report.param("seed", a.seed);
        let dim = loaded.points.dim();
        let mut queries = loaded.points.points().to_vec();
        queries.extend(
            (0..BUILD_CHECK_QUERIES).map(|i| random_point(&mut substream(a.seed, i as u64), dim, MAX_SAMPLE_RADIUS)),
        );
        let t = Instant::now();
        report.check = Some(check_queries(&coreset, &queries, &a.common)?);
        report.time("check", t);
    }
    report.finish(a.common.out.as_deref())
}

fn load_sidecar<'a>(path: &Path, loaded: &'a Loaded) -> Result<Coreset<'a>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let sidecar: Sidecar =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if sidecar.source_digest != loaded.digest {
        return Err(CliError::Parse(format!(
            "{} was built for a different point file (digest {}, file has {})",
            path.display(),
            sidecar.source_digest,
            loaded.digest
        )));
    }
    Coreset::from_record(&loaded.points, &sidecar.record)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn query(a: QueryArgs) -> Result<(), CliError> {
    let loaded = pointfile::read(&a.points)?;
    let queries = pointfile::read(&a.queries)?;
    if queries.points.dim() != loaded.points.dim() {
        return Err(CliError::Parse(format!(
            "{} has dimension {}, {} has dimension {}",
            a.points.display(),
            loaded.points.dim(),
            a.queries.display(),
            queries.points.dim()
        )));
    }
    let mut report = RunReport::new("query");
    describe(&mut report, "points", &a.points, &loaded);
    report.param("queries", a.queries.display().to_string());
    report.param("queries_n", queries.points.len());
    let t = Instant::now();
    let coreset = match (&a.coreset, a.eps) {
        (Some(path), eps) => {
            let c = load_sidecar(path, &loaded)?;
            if eps.is_some_and(|e| e != c.epsilon()) {
                return Err(CliError::Usage(format!(
                    "--eps differs from the stored epsilon {}",
                    c.epsilon()
                )));
            }
            report.param("coreset", path.display().to_string());
            c
        }
        (None, Some(eps)) => build_coreset(&loaded.points, eps)?,
        (None, None) => return Err(CliError::Usage("either --eps or --coreset is required".into())),
    };
    report.time(if a.coreset.is_some() { "load" } else { "build" }, t);
    report.param("eps", coreset.epsilon());

    let t = Instant::now();
    let answers = queries
        .points
        .iter()
        .map(|q| farthest_approx(&coreset, q))
        .collect::<Result<Vec<_>, _>>()?;
    report.time("query", t);
    report.results = json!({
        "regime": coreset.regime(),
        "coreset_size": coreset.len(),
        "answers": answers.iter().map(|a| json!({"index": a.index, "distance": a.distance})).collect::<Vec<_>>(),
    });
    if a.common.check {
        let t = Instant::now();
        report.check = Some(check_queries(&coreset, queries.points.points(), &a.common)?);
        report.time("check", t);
    }
    report.finish(a.common.out.as_deref())
}

fn solve_setup(command: &str, a: &SolveArgs) -> Result<(Loaded, RunReport), CliError> {
    let loaded = pointfile::read(&a.points)?;
    let mut report = RunReport::new(command);
    describe(&mut report, "points", &a.points, &loaded);
    report.param("eps", a.eps);
    Ok((loaded, report))
}

pub fn diameter(a: SolveArgs) -> Result<(), CliError> {
    let (loaded, mut report) = solve_setup("diameter", &a)?;
    let t = Instant::now();
    let ans = diameter_approx(&loaded.points, a.eps)?;
    report.time("solve", t);
    report.results = json!(ans);
    if a.common.check {
        let t = Instant::now();
        let exact = diameter_exact_capped(&loaded.points, cap(&a.common))?;
        report.time("oracle", t);
        let mut c = CheckSummary::default();
        c.record(band_margin(ans.distance, exact.distance, a.eps));
        report.results["exact"] = json!(exact);
        report.check = Some(c);
    }
    report.finish(a.common.out.as_deref())
}

pub fn center(a: SolveArgs) -> Result<(), CliError> {
    let (loaded, mut report) = solve_setup("center", &a)?;
    let t = Instant::now();
    let ans = center_approx(&loaded.points, a.eps)?;
    report.time("solve", t);
    report.results = json!(ans);
    if a.common.check {
        let t = Instant::now();
        let exact = center_exact_capped(&loaded.points, cap(&a.common))?;
        report.time("oracle", t);
        let mut c = CheckSummary::default();
        c.record(band_margin(ans.radius, exact.radius, a.eps));
        report.results["exact"] = json!(exact);
        report.check = Some(c);
    }
    report.finish(a.common.out.as_deref())
}

pub fn mst(a: SolveArgs) -> Result<(), CliError> {
    let (loaded, mut report) = solve_setup("mst", &a)?;
    let t = Instant::now();
    let tree = mst_max_approx(&loaded.points, a.eps)?;
    report.time("solve", t);
    report.results = json!(tree);
    if a.common.check {
        let t = Instant::now();
        let exact = mst_max_exact_capped(&loaded.points, cap(&a.common))?;
        report.time("oracle", t);
        let mut c = CheckSummary::default();
        c.record(if tree.is_spanning_tree(loaded.points.len()) {
            0.0
        } else {
            f64::NEG_INFINITY
        });
        let w = tree.total_weight;
        let w_star = exact.total_weight;
        c.record((w - (1.0 - a.eps) * w_star).min(w_star - w));
        report.results["exact_total_weight"] = json!(w_star);
        report.check = Some(c);
    }
    report.finish(a.common.out.as_deref())
}

pub fn bichromatic(a: BichromaticArgs) -> Result<(), CliError> {
    let red = pointfile::read(&a.red)?;
    let blue = pointfile::read(&a.blue)?;
    let mut report = RunReport::new("bichromatic");
    describe(&mut report, "red", &a.red, &red);
    describe(&mut report, "blue", &a.blue, &blue);
    report.param("eps", a.eps);
    let t = Instant::now();
    let ans = bichromatic_farthest_approx(&red.points, &blue.points, a.eps)?;
    report.time("solve", t);
    report.results = json!(ans);
    if a.common.check {
        let t = Instant::now();
        let exact = bichromatic_farthest_exact_capped(&red.points, &blue.points, cap(&a.common))?;
        report.time("oracle", t);
        let mut c = CheckSummary::default();
        c.record(band_margin(ans.distance, exact.distance, a.eps));
        report.results["exact"] = json!(exact);
        report.check = Some(c);
    }
    report.finish(a.common.out.as_deref())
}

/// Instances of the `coreset` suite: generator and radius.
const SUITE_INSTANCES: [(Generator, f64); 4] = [
    (Generator::UniformBall, 2.0),
    (Generator::UniformBall, 15.0),
    (Generator::Clusters, 15.0),
    (Generator::Antipodal, 10.0),
];
const SUITE_EPS: [f64; 3] = [0.5, 0.25, 0.1];

fn coreset_suite(a: &ValidateArgs) -> Result<Vec<SweepReport>, CliError> {
    let mut out = Vec::new();
    for (k, (g, r)) in SUITE_INSTANCES.into_iter().enumerate() {
        let points = generate(g, a.n, a.dim, r, a.seed.wrapping_add(k as u64))?;
        for eps in SUITE_EPS {
            let coreset = build_coreset(&points, eps)?;
            let mut rep = validation::sweep_coreset_bounds(&coreset, a.seed, a.trials, a.radius);
            rep.check = format!("coreset bounds: {g} radius {r}, eps {eps}, size {}", coreset.len());
            out.push(rep);
        }
    }
    Ok(out)
}

pub fn validate(a: ValidateArgs) -> Result<(), CliError> {
    if a.dim < 2 {
        return Err(CliError::Usage("--dim must be at least 2".into()));
    }
    if !(0.0..=MAX_SAMPLE_RADIUS).contains(&a.radius) {
        return Err(CliError::Usage(format!(
            "--radius must lie in [0, {MAX_SAMPLE_RADIUS}]"
        )));
    }
    let mut report = RunReport::new("validate");
    report
        .param("suite", format!("{:?}", a.suite).to_lowercase())
        .param("seed", a.seed)
        .param("trials", a.trials)
        .param("dim", a.dim)
        .param("radius", a.radius);
    let (seed, trials, dim, r) = (a.seed, a.trials, a.dim, a.radius);
    let instances = trials.div_ceil(1000);
    let mut sweeps: Vec<SweepReport> = Vec::new();
    let t = Instant::now();
    if trials > 0 {
        if matches!(a.suite, Suite::Core | Suite::All) {
            sweeps.push(validation::sweep_metric(seed, trials, dim, r));
            sweeps.push(validation::sweep_formula_agreement(seed, trials, dim, 1.0 - 1e-6));
            sweeps.push(validation::sweep_isometry(
                seed,
                trials,
                dim,
                r.min(validation::ISOMETRY_RADIUS),
            ));
            sweeps.push(validation::sweep_chord_angle(seed, trials, dim));
        }
        if matches!(a.suite, Suite::Lemmas | Suite::All) {
            sweeps.push(validation::sweep_four_point(seed, trials, dim, r));
            sweeps.push(validation::sweep_thin_triangles(seed, trials, 100, dim, r));
            sweeps.push(validation::sweep_angle_slack(seed, trials, dim, r));
            sweeps.push(validation::sweep_near_geodesic_angle(seed, trials, dim, r));
            sweeps.push(validation::sweep_chepoi(seed, trials, dim, r));
            sweeps.push(validation::sweep_diametral_pair(seed, instances, 200, dim, r));
            sweeps.push(validation::sweep_midpoint(seed, instances, 20, 200, dim, r));
        }
        if matches!(a.suite, Suite::Coreset | Suite::All) {
            sweeps.extend(coreset_suite(&a)?);
        }
    }
    report.time("total", t);
    let mut summary = CheckSummary::default();
    let mut rows = Vec::new();
    for s in &sweeps {
        summary.checked += s.applicable;
        summary.violations += s.violations;
        if s.applicable > 0 {
            let m = s.margin();
            summary.worst_margin = Some(summary.worst_margin.map_or(m, |w: f64| w.min(m)));
        }
        let mut row = serde_json::to_value(s).expect("sweep serializes");
        row["margin"] = json!(s.margin());
        rows.push(row);
    }
    report.results = json!(rows);
    report.check = Some(summary);
    report.finish(a.out.as_deref())
}

#[derive(Debug, Clone, Serialize)]
struct BenchRow {
    n: usize,
    #[serde(rename = "D")]
    dim: usize,
    eps: f64,
    build_ms: f64,
    query_us: f64,
    coreset_size: usize,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn bench(a: BenchArgs) -> Result<(), CliError> {
    if a.dim.iter().any(|&d| d < 2) {
        return Err(CliError::Usage("--dim entries must be at least 2".into()));
    }
    if a.n.contains(&0) {
        return Err(CliError::Usage("--n entries must be positive".into()));
    }
    let mut report = RunReport::new("bench");
    report
        .param("n", a.n.clone())
        .param("dim", a.dim.clone())
        .param("eps", a.eps.clone())
        .param("seed", a.seed)
        .param("generator", a.generator.to_string())
        .param("radius", a.radius)
        .param("queries", a.queries)
        .param("repeat", a.repeat);
    let mut rows = Vec::new();
    for &dim in &a.dim {
        let queries: Vec<BallPoint> = (0..a.queries)
            .map(|i| random_point(&mut substream(a.seed ^ 0x9e37_79b9, i as u64), dim, a.radius))
            .collect();
        for &n in &a.n {
            let points = generate(a.generator, n, dim, a.radius, a.seed)?;
            for &eps in &a.eps {
                let (coreset, build) = timed_build(&points, eps, a.repeat.max(1))?;
                let t = Instant::now();
                for q in &queries {
                    std::hint::black_box(farthest_approx(&coreset, q)?);
                }
                let query_us = if queries.is_empty() {
                    0.0
                } else {
                    ms(t.elapsed()) * 1e3 / queries.len() as f64
                };
                rows.push(BenchRow {
                    n,
                    dim,
                    eps,
                    build_ms: ms(build),
                    query_us,
                    coreset_size: coreset.len(),
                });
            }
        }
    }
    if let Some(path) = &a.csv {
        let mut csv = String::from("n,D,eps,build_ms,query_us,coreset_size\n");
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{:.6},{:.6},{}\n",
                r.n, r.dim, r.eps, r.build_ms, r.query_us, r.coreset_size
            ));
        }
        write_file(path, &csv)?;
    }
    report.results = json!({
        "rows": rows,
        "scaling": scaling(&rows),
        "size_non_increasing_in_eps": size_monotone(&rows),
    });
    report.finish(a.out.as_deref())
}

fn timed_build(points: &PointSet, eps: f64, repeat: usize) -> Result<(Coreset<'_>, Duration), CliError> {
    let mut best = None;
    let mut fastest = Duration::MAX;
    for _ in 0..repeat {
        let t = Instant::now();
        let c = build_coreset(points, eps)?;
        fastest = fastest.min(t.elapsed());
        best = Some(c);
    }
    Ok((best.expect("repeat >= 1"), fastest))
}

/// Build-time ratios between consecutive sizes at fixed `D` and `ε`.
/// Ratios in `[1.5, 3.0]` for doubled `n` indicate linear scaling.
fn scaling(rows: &[BenchRow]) -> Vec<Value> {
    let mut groups: BTreeMap<(usize, u64), Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.dim, r.eps.to_bits())).or_default().push(r);
    }
    let mut out = Vec::new();
    for list in groups.values_mut() {
        list.sort_by_key(|r| r.n);
        for w in list.windows(2) {
            let ratio = w[1].build_ms / w[0].build_ms;
            out.push(json!({
                "D": w[0].dim,
                "eps": w[0].eps,
                "n_from": w[0].n,
                "n_to": w[1].n,
                "build_ratio": ratio,
                "in_linear_band": (1.5..=3.0).contains(&ratio),
            }));
        }
    }
    out
}

/// Whether the coreset size never grows with `ε` at each `(n, D)`.
fn size_monotone(rows: &[BenchRow]) -> bool {
    let mut groups: BTreeMap<(usize, usize), Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.n, r.dim)).or_default().push(r);
    }
    groups.values_mut().all(|list| {
        list.sort_by(|x, y| x.eps.total_cmp(&y.eps));
        list.windows(2).all(|w| w[1].coreset_size <= w[0].coreset_size)
    })
}
