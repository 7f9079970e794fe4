//! Dispatch from parsed arguments to library calls.

use std::time::Instant;

use conflab_core::boundary::{
    bk_fixed_m, bk_h_derivative, bk_of_jet, bk_umbilic, ellipticity_report, solve_h, SolveMode,
};
use conflab_core::conformal::{boundary_jet, cone_along, curvature_point};
use conflab_core::liouville::{
    certify_bubble, certify_bubble_seeded, solve_family_for_c0, theorem_constraint_report, verify_corollary_ball,
};
use conflab_core::mobius::{
    alpha_estimate, invariance_check_bk, invariance_check_sigma, lambda_bar, verify_kelvin_fixed_point,
    verify_lemma41, BallMap, MobiusInversion, DEFAULT_ALPHA_RADII,
};
use conflab_core::symfun::{cone_classify, newton_trace_check, sigma_all, SymMatrix};
use conflab_core::CheckReport;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::grid::{emit_grid, Slice};
use crate::input::*;
use crate::report::ReportDocument;

/// Checks plus command-specific values.
pub struct Outcome {
    pub checks: Vec<CheckReport>,
    pub results: Value,
}

impl Outcome {
    fn new(checks: Vec<CheckReport>, results: Value) -> Self {
        Outcome { checks, results }
    }
}

pub(crate) fn rows(m: &SymMatrix) -> Vec<Vec<f64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect()).collect()
}

/// Runs one command and assembles its report.
pub fn execute(cli: &Cli) -> CliResult<ReportDocument> {
    let start = Instant::now();
    let config = serde_json::to_value(&cli.command).map_err(|e| CliError::Serialize(e.to_string()))?;
    let out = dispatch(&cli.command)?;
    let mut doc = ReportDocument::new(config, out.checks, out.results);
    if !cli.no_timing {
        doc.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(doc)
}

pub fn dispatch(cmd: &Command) -> CliResult<Outcome> {
    match cmd {
        Command::Sigma(a) => sigma_cmd(a),
        Command::Schouten(a) => schouten_cmd(a),
        Command::Bk(a) => bk_cmd(a),
        Command::Cone(a) => cone_cmd(a),
        Command::BubbleCertify(a) => certify_cmd(a),
        Command::SolveH(a) => solve_h_cmd(a),
        Command::SolveFamily(a) => family_cmd(a),
        Command::KelvinCheck(a) => kelvin_cmd(a),
        Command::BallCheck(a) => ball_cmd(a),
        Command::LambdaBar(a) => lambda_bar_cmd(a),
        Command::Lemma41(a) => lemma41_cmd(a),
        Command::ConstraintReport(a) => constraint_cmd(a),
        Command::Suite(a) => Ok(crate::suite::run_suite(a.seed)?.into_outcome()),
        Command::EmitGrid(a) => emit_grid_cmd(a),
    }
}

fn sigma_cmd(a: &SigmaArgs) -> CliResult<Outcome> {
    let m = parse_matrix(&a.matrix, a.dim)?;
    let sig = sigma_all(&m)?;
    let label = cone_classify(&m)?;
    let checks = (1..=m.dim()).map(|s| newton_trace_check(&m, s)).collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome::new(checks, json!({ "dim": m.dim(), "sigma": sig, "cone_max_k": label.max_k })))
}

fn schouten_cmd(a: &SchoutenArgs) -> CliResult<Outcome> {
    let f = build_field(&a.field)?;
    let n = a.field.n;
    let x = parse_point(&a.x, n)?;
    let cp = curvature_point(&*f.field, &x, n)?;
    let mut results = json!({
        "schouten": rows(&cp.a),
        "sigma": cp.sigma_values,
        "cone_max_k": cp.cone.max_k,
    });
    if x[n - 1] == 0.0 {
        let bj = boundary_jet(&*f.field, &x)?;
        let bk: Vec<f64> = (1..=n / 2).map(|k| bk_of_jet(&bj, k)).collect::<Result<_, _>>()?;
        results["a_t"] = json!(rows(&bj.a_t));
        results["h"] = json!(bj.h);
        results["bk"] = json!(bk);
    }
    Ok(Outcome::new(vec![], results))
}

fn bk_cmd(a: &BkArgs) -> CliResult<Outcome> {
    require_nk(a.n, a.k)?;
    let (n, k) = (a.n, a.k);
    if let Some(at) = &a.at {
        let h = a.h.ok_or_else(|| CliError::usage("--at needs --h"))?;
        let at = parse_matrix(at, Some(n - 1))?;
        let value = bk_umbilic(n, k, &at, h)?;
        let m = at.shifted(0.5 * h * h);
        let hd = bk_h_derivative(&m, h, n, k)?;
        return Ok(Outcome::new(
            vec![hd.report],
            json!({ "bk": value, "h": h, "dbk_dh_fixed_m": hd.analytic }),
        ));
    }
    if a.h.is_some() {
        return Err(CliError::usage("--h goes with --at; a field determines h itself"));
    }
    let f = field_from_parts(n, a.expr.as_deref(), a.b, a.center.as_deref())?;
    let x = match &a.x {
        Some(s) => parse_point(s, n)?,
        None => vec![0.0; n],
    };
    let bj = boundary_jet(&*f.field, &x)?;
    let value = bk_of_jet(&bj, k)?;
    let ell = ellipticity_report(&*f.field, &x, k)?;
    Ok(Outcome::new(vec![ell], json!({ "bk": value, "h": bj.h, "a_t": rows(&bj.a_t), "x": x })))
}

fn random_halfspace_points(n: usize, count: usize, seed: u64, boundary: bool) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut x: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
            x.push(if boundary { 0.0 } else { rng.random_range(0.05..2.0) });
            x
        })
        .collect()
}

fn cone_cmd(a: &ConeArgs) -> CliResult<Outcome> {
    let n = a.field.n;
    require_k(n, a.k)?;
    let f = build_field(&a.field)?;
    let pts = match &a.points {
        Some(s) => parse_points(s, n)?,
        None => random_halfspace_points(n, a.samples, a.seed, false),
    };
    if pts.is_empty() {
        return Err(CliError::usage("cone needs at least one sample point"));
    }
    let report = cone_along(&*f.field, &pts, a.k)?;
    Ok(Outcome::new(vec![report], json!({ "points": pts.len() })))
}

fn certify_cmd(a: &CertifyArgs) -> CliResult<Outcome> {
    require_nk(a.n, a.k)?;
    let p = bubble_params(a.n, a.b, &a.center)?;
    let cert = certify_bubble_seeded(&p, a.k, a.samples, a.seed)?;
    let results = json!({ "c0": cert.c0, "certificate": cert });
    Ok(Outcome::new(cert.reports(), results))
}

fn solve_h_cmd(a: &SolveHArgs) -> CliResult<Outcome> {
    require_nk(a.n, a.k)?;
    let data = parse_matrix(&a.data, Some(a.n - 1))?;
    type Eval = fn(usize, usize, &SymMatrix, f64) -> conflab_core::Result<f64>;
    let (mode, eval): (SolveMode, Eval) = match a.mode {
        SolveModeArg::FixedAt => (SolveMode::FixedTangential, bk_umbilic),
        SolveModeArg::FixedM => (SolveMode::FixedM, bk_fixed_m),
    };
    let h = solve_h(mode, &data, a.n, a.k, a.c0)?;
    let back = eval(a.n, a.k, &data, h)?;
    let check = CheckReport::compare(
        format!("B_{}(h) = c0", a.k),
        back,
        a.c0,
        (back - a.c0).abs(),
        1e-10 * a.c0.abs().max(1.0),
    );
    Ok(Outcome::new(vec![check], json!({ "h": h })))
}

fn family_cmd(a: &FamilyArgs) -> CliResult<Outcome> {
    require_nk(a.n, a.k)?;
    let fam = solve_family_for_c0(a.n, a.k, a.c0)?;
    let member = fam.member(a.b, &vec![0.0; a.n - 1])?;
    let cert = certify_bubble(&member, a.k, a.samples)?;
    let mut checks = cert.reports();
    checks.push(CheckReport::compare(
        format!("family member B_{} = c0", a.k),
        cert.c0,
        a.c0,
        (cert.c0 - a.c0).abs(),
        1e-8 * a.c0.abs().max(1.0),
    ));
    Ok(Outcome::new(checks, json!({ "h": fam.h, "family": fam, "member": member })))
}

fn kelvin_cmd(a: &KelvinArgs) -> CliResult<Outcome> {
    let n = a.field.n;
    require_nk(n, a.k)?;
    let f = build_field(&a.field)?;
    let center = match &a.at {
        Some(s) => parse_point(s, n)?,
        None => vec![0.0; n],
    };
    let m = MobiusInversion::new(center, a.lambda)?;
    let far_from_center = |p: &Vec<f64>| p.iter().zip(&m.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() > 1e-2;
    let pts: Vec<_> = random_halfspace_points(n, 4 * a.samples, a.seed, false)
        .into_iter()
        .filter(far_from_center)
        .take(a.samples)
        .collect();
    let bpts: Vec<_> = random_halfspace_points(n, 4 * a.samples, a.seed ^ 1, true)
        .into_iter()
        .filter(far_from_center)
        .take(a.samples)
        .collect();
    let checks = vec![
        invariance_check_sigma(&f.field, &m, &pts, a.k)?,
        invariance_check_bk(&f.field, &m, &bpts, a.k)?,
    ];
    Ok(Outcome::new(checks, json!({ "center": m.center, "lambda": m.lambda })))
}

fn ball_cmd(a: &BallArgs) -> CliResult<Outcome> {
    require_nk(a.n, a.k)?;
    let p = bubble_params(a.n, a.b, &a.center)?;
    let rep = verify_corollary_ball(&p, a.k, a.d, a.samples)?;
    let map = BallMap::new(vec![0.0; a.n - 1], a.d)?;
    let mut checks = vec![map.sphere_identity(a.samples, 0)?];
    checks.extend(rep.reports());
    Ok(Outcome::new(checks, json!({ "fitted": rep.fitted, "ball_center": map.center(), "ball_radius": map.radius() })))
}

/// Relative tolerance on `lambda_bar` against the bubble closed form.
const LAMBDA_BAR_REL_TOL: f64 = 1e-3;

fn lambda_bar_cmd(a: &LambdaBarArgs) -> CliResult<Outcome> {
    let n = a.field.n;
    let f = build_field(&a.field)?;
    let x = match &a.x {
        Some(s) => parse_point(s, n)?,
        None => vec![0.0; n],
    };
    let grid = parse_grid(&a.grid, n)?;
    let res = lambda_bar(&*f.field, &x, &grid)?;
    let ux = f.field.value(&x)?;
    let name = format!("lambda_bar at {x:?}");
    let check = match f.bubble() {
        Some(p) => {
            let exact = (p.alpha() / ux).powf(1.0 / (n - 2) as f64);
            CheckReport::compare(name, res.lambda_bar, exact, (res.lambda_bar - exact).abs(), LAMBDA_BAR_REL_TOL * exact)
                .with_note("reference (alpha / u(x))^(1/(n-2)) with the closed-form bubble alpha")
        }
        None => {
            let alpha = alpha_estimate(&*f.field, &DEFAULT_ALPHA_RADII)?;
            CheckReport::info(name, res.lambda_bar, (alpha / ux).powf(1.0 / (n - 2) as f64))
                .with_note("reference from the estimated alpha; exact only for solutions")
        }
    };
    Ok(Outcome::new(vec![check], json!({ "lambda_bar": res.lambda_bar, "detail": res })))
}

fn lemma41_cmd(a: &Lemma41Args) -> CliResult<Outcome> {
    let n = a.field.n;
    let f = build_field(&a.field)?;
    let pts = match &a.points {
        Some(s) => parse_points(s, n)?,
        None => vec![vec![0.0; n]],
    };
    if pts.is_empty() {
        return Err(CliError::usage("lemma41 needs at least one boundary point"));
    }
    let grid = parse_grid(&a.grid, n)?;
    let mut checks = vec![verify_lemma41(&*f.field, &pts, &grid)?];
    for x in &pts {
        checks.push(verify_kelvin_fixed_point(&*f.field, x, &grid)?);
    }
    let alpha = alpha_estimate(&*f.field, &DEFAULT_ALPHA_RADII)?;
    Ok(Outcome::new(checks, json!({ "alpha": alpha, "points": pts })))
}

fn constraint_cmd(a: &ConstraintArgs) -> CliResult<Outcome> {
    require_nk(a.n, a.k)?;
    let hs = parse_numbers(&a.h)?;
    let mut checks = Vec::new();
    let mut recs = Vec::new();
    for h in hs {
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::usage(format!("mean curvature must be positive, got {h}")));
        }
        let r = theorem_constraint_report(a.n, a.k, h)?;
        checks.extend(r.reports());
        recs.push(r);
    }
    Ok(Outcome::new(checks, json!({ "entries": recs })))
}

fn emit_grid_cmd(a: &EmitGridArgs) -> CliResult<Outcome> {
    let n = a.field.n;
    let f = build_field(&a.field)?;
    let axes = parse_numbers(&a.axes)?;
    let range = parse_numbers(&a.range)?;
    if axes.len() != 2 || axes.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
        return Err(CliError::usage("--axes takes two 1-based coordinate indices"));
    }
    if range.len() != 2 {
        return Err(CliError::usage("--range takes lo,hi"));
    }
    let base = match &a.base {
        Some(s) => parse_point(s, n)?,
        None => vec![0.0; n],
    };
    let slice = Slice {
        axes: (axes[0] as usize - 1, axes[1] as usize - 1),
        lo: range[0],
        hi: range[1],
        resolution: a.resolution,
        base,
    };
    let summary = emit_grid(&*f.field, a.quantity, a.k, &slice, &a.csv)?;
    let spread = summary.spread();
    let check = CheckReport::info("grid value spread", spread, 0.0);
    Ok(Outcome::new(vec![check], json!({ "csv": a.csv, "summary": summary, "spread": spread })))
}
