//! The self-check suite behind `conflab suite`: ten groups of checks that
//! together exercise every library module, seeded for reproducibility.

use conflab_core::boundary::{bk_h_derivative, quadrature_convergence, verify_linearization, DEFAULT_NODES};
use conflab_core::conformal::sigma_k_curvature;
use conflab_core::fields::{bubble_field, parse_field, perturb_field, BubbleParams, Field};
use conflab_core::liouville::{
    bubble_samples, bubble_sigma, certify_bubble_seeded, solve_family_for_c0, theorem_constraint_report,
    verify_corollary_ball,
};
use conflab_core::mobius::{
    invariance_check_bk, invariance_check_sigma, lambda_bar, verify_kelvin_fixed_point, verify_lemma41, GridSpec,
    MobiusInversion,
};
use conflab_core::symfun::{newton_trace_check, sigma, sigma_all, sigma_gradient, SymMatrix};
use conflab_core::CheckReport;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::run::Outcome;

#[derive(Debug, Clone, Serialize)]
pub struct GroupOutcome {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub groups: Vec<GroupOutcome>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.groups.iter().all(|g| g.pass)
    }

    pub fn into_outcome(self) -> Outcome {
        let summary: Vec<_> = self
            .groups
            .iter()
            .map(|g| json!({ "id": g.id, "title": g.title, "pass": g.pass, "checks": g.checks.len() }))
            .collect();
        let checks = self.groups.into_iter().flat_map(|g| g.checks).collect();
        Outcome { checks, results: json!({ "seed": self.seed, "groups": summary }) }
    }
}

type GroupFn = fn(&mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>>;

const GROUPS: [(&str, GroupFn); 10] = [
    ("bubble sigma_k normalization", bubble_normalization),
    ("bubble boundary data", bubble_boundary_data),
    ("B_k value, constancy and family solve", bk_value),
    ("h-monotonicity identity", h_monotonicity),
    ("linearization coefficients", linearization),
    ("inversion invariance", invariance),
    ("moving spheres", moving_spheres),
    ("Newton tensor and trace identities", newton_checks),
    ("constraint reconciliation", reconciliation),
    ("ball pullback", ball_pullback),
];

/// Runs every group. A library error inside a group becomes a failing check
/// for that group rather than aborting the run.
pub fn run_suite(seed: u64) -> conflab_core::Result<SuiteReport> {
    let groups = GROUPS
        .iter()
        .enumerate()
        .map(|(i, (title, f))| {
            let id = i + 1;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(id as u64));
            let checks = f(&mut rng).unwrap_or_else(|e| {
                vec![CheckReport::compare(format!("{title}: error"), f64::NAN, 0.0, f64::NAN, 0.0).with_note(e.to_string())]
            });
            let pass = checks.iter().all(|c| !c.is_failure());
            GroupOutcome { id, title, pass, checks }
        })
        .collect();
    Ok(SuiteReport { seed, groups })
}

/// The report with the largest `abs_err / tol`, noted with the sample count.
fn worst_of(reports: Vec<CheckReport>, name: &str) -> CheckReport {
    let count = reports.len();
    let ratio = |r: &CheckReport| if r.abs_err.is_nan() { f64::INFINITY } else { r.abs_err / r.tol.max(f64::MIN_POSITIVE) };
    let mut worst = reports
        .into_iter()
        .max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
        .unwrap_or_else(|| CheckReport::compare(name, f64::NAN, 0.0, f64::NAN, 0.0).with_note("no samples"));
    let inner = worst.name.clone();
    worst.name = name.to_string();
    let prev = worst.note.take().map(|n| format!("; {n}")).unwrap_or_default();
    worst.with_note(format!("worst of {count}: {inner}{prev}"))
}

const CASES: [(usize, usize); 5] = [(4, 2), (5, 2), (6, 2), (6, 3), (8, 3)];
const WIDTHS: [f64; 3] = [0.3, 1.0, 4.0];

fn random_bubble(rng: &mut ChaCha8Rng, n: usize, b: f64) -> conflab_core::Result<BubbleParams> {
    let mut center: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    center[n - 1] = -rng.random_range(0.2..1.5);
    BubbleParams::new(n, b, center)
}

fn bubble_cases(rng: &mut ChaCha8Rng) -> conflab_core::Result<Vec<(usize, BubbleParams)>> {
    let mut out = Vec::new();
    for (n, k) in CASES {
        for b in WIDTHS {
            out.push((k, random_bubble(rng, n, b)?));
        }
    }
    Ok(out)
}

fn bubble_normalization(rng: &mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (k, p) in bubble_cases(rng)? {
        let u = bubble_field(&p)?;
        let target = bubble_sigma(p.n, k)?;
        let mut reports = Vec::new();
        for x in bubble_samples(&p, 100, rng.random(), false) {
            let s = sigma_k_curvature(&*u, &x, k)?;
            let rel = (s / target - 1.0).abs();
            reports.push(CheckReport::compare("", s, target, rel, 1e-8));
        }
        out.push(worst_of(reports, &format!("sigma_{k} / 2^k binom(n,k) - 1 (n={}, b={})", p.n, p.b)));
    }
    Ok(out)
}

fn bubble_boundary_data(rng: &mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (k, p) in bubble_cases(rng)? {
        let cert = certify_bubble_seeded(&p, k, 100, rng.random())?;
        let reps = cert.reports();
        out.push(reps[1].clone());
        out.push(reps[2].clone());
    }
    Ok(out)
}

fn bk_value(rng: &mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>> {
    let p = BubbleParams::new(4, 0.25, vec![0.0, 0.0, 0.0, -1.0])?;
    let cert = certify_bubble_seeded(&p, 2, 50, rng.random())?;
    let fam = solve_family_for_c0(4, 2, 7.0)?;
    Ok(vec![
        CheckReport::compare("B_2 of the h = 1 bubble (n=4)", cert.c0, 7.0, (cert.c0 - 7.0).abs(), 1e-8),
        CheckReport::compare("B_2 spread over 50 boundary points", cert.bk_spread, 0.0, cert.bk_spread, 1e-9),
        CheckReport::compare("family h for c0 = 7 (n=4, k=2)", fam.h, 1.0, (fam.h - 1.0).abs(), 1e-10),
    ])
}

/// A random symmetric matrix with `sigma_1..sigma_k > 1e-3`.
fn cone_matrix(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> conflab_core::Result<SymMatrix> {
    loop {
        let a = SymMatrix::from_fn(dim, |i, j| if i == j { rng.random_range(-0.6..2.0) } else { rng.random_range(-0.3..0.3) });
        let s = sigma_all(&a)?;
        if (1..=k).all(|j| s[j] > 1e-3) {
            return Ok(a);
        }
    }
}

fn h_monotonicity(rng: &mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for _ in 0..100 {
        let n = rng.random_range(3..=8);
        let k = rng.random_range(1..=n / 2);
        let at = cone_matrix(rng, n - 1, k - 1)?;
        let h = rng.random_range(0.1..2.0);
        reports.push(bk_h_derivative(&at.shifted(0.5 * h * h), h, n, k)?.report);
    }
    Ok(vec![worst_of(reports, "dB_k/dh at fixed M = sigma_(k-1)(A^T)")])
}

fn gaussian_arg(c: &[f64]) -> String {
    c.iter().enumerate().map(|(i, ci)| format!("(x{} - ({ci}))^2", i + 1)).collect::<Vec<_>>().join(" + ")
}

/// Perturbations whose value and tangential gradient vanish at `c`: one
/// moving only the normal derivative, one only a tangential second derivative.
fn vanishing_bumps(c: &[f64]) -> conflab_core::Result<[Field; 2]> {
    let n = c.len();
    let g = gaussian_arg(c);
    Ok([
        parse_field(&format!("x{n} * exp(-({g}))"), n)?,
        parse_field(&format!("(x1 - ({}))^2 * exp(-({g}))", c[0]), n)?,
    ])
}

fn random_positive_expr(rng: &mut ChaCha8Rng, n: usize) -> String {
    let mut coef = |s: f64| format!("({:.4})", rng.random_range(-s..s));
    let lin: Vec<String> = (1..=n).map(|i| format!("{}*x{i}", coef(0.3))).collect();
    let cross = coef(0.1);
    let i = rng.random_range(1..=n);
    let j = rng.random_range(1..=n);
    let quad: Vec<String> = (1..=n).map(|i| format!("{:.4}*x{i}^2", rng.random_range(0.05..0.4))).collect();
    let p = rng.random_range(0.2..0.8);
    let c = rng.random_range(0.5..1.5);
    match rng.random_range(0..3) {
        0 => format!("{c:.4} + exp({} + {cross}*x{i}*x{j})", lin.join(" + ")),
        1 => format!("(1 + {})^(-{p:.4}) * exp({})", quad.join(" + "), lin.join(" + ")),
        _ => format!("sqrt({c:.4} + {}) + {:.4}*exp({})", quad.join(" + "), rng.random_range(0.1..0.5), lin.join(" + ")),
    }
}

fn boundary_point(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n - 1).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
    x.push(0.0);
    x
}

fn interior_point(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    let mut x = boundary_point(rng, n, scale);
    x[n - 1] = scale * rng.random_range(0.05..1.0);
    x
}

fn linearization(rng: &mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>> {
    let mut lin = Vec::new();
    let mut quad = Vec::new();
    for trial in 0..6 {
        let n = 4 + trial % 3;
        let u0 = if trial < 3 {
            let b = rng.random_range(0.3..3.0);
            bubble_field(&random_bubble(rng, n, b)?)?
        } else {
            parse_field(&random_positive_expr(rng, n), n)?
        };
        for k in 1..=n / 2 {
            let c = boundary_point(rng, n, 1.0);
            for psi in vanishing_bumps(&c)? {
                let u1 = perturb_field(&u0, &psi, 1e-3)?;
                lin.push(verify_linearization(&*u0, &*u1, &c, k)?);
            }
        }
        let b = rng.random_range(0.3..3.0);
        let p0 = random_bubble(rng, n, b)?;
        let center: Vec<f64> = p0.center.iter().map(|c| c * rng.random_range(0.8..1.2)).collect();
        let p1 = BubbleParams::new(n, p0.b * rng.random_range(0.8..1.2), center)?;
        let x = boundary_point(rng, n, 1.0);
        quad.push(quadrature_convergence(&*bubble_field(&p0)?, &*bubble_field(&p1)?, &x, n / 2, DEFAULT_NODES)?);
    }
    Ok(vec![
        worst_of(lin, "vanishing-jet linearization residual (64 nodes)"),
        worst_of(quad, "coefficient change from 64 to 128 nodes"),
    ])
}

fn invariance(rng: &mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>> {
    let n_of = |i: usize| 3 + i % 4;
    let inversions: Vec<Vec<MobiusInversion>> = (3..=6)
        .map(|n| {
            (0..10)
                .map(|_| {
                    let lambda = rng.random_range(0.3..3.0);
                    MobiusInversion::new(boundary_point(rng, n, 2.0), lambda)
                })
                .collect()
        })
        .collect::<conflab_core::Result<_>>()?;
    let mut sig = Vec::new();
    let mut bk = Vec::new();
    for i in 0..100 {
        let n = n_of(i);
        let u = parse_field(&random_positive_expr(rng, n), n)?;
        let k = rng.random_range(1..=n / 2);
        let m = &inversions[n - 3][i % 10];
        let pts: Vec<_> = (0..2).map(|_| interior_point(rng, n, 2.0)).collect();
        let bpts: Vec<_> = (0..2).map(|_| boundary_point(rng, n, 2.0)).collect();
        sig.push(invariance_check_sigma(&u, m, &pts, k)?);
        bk.push(invariance_check_bk(&u, m, &bpts, k)?);
    }
    Ok(vec![
        worst_of(sig, "sigma_k inversion invariance, 100 fields"),
        worst_of(bk, "B_k inversion invariance, 100 fields"),
    ])
}

fn moving_spheres(rng: &mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>> {
    let p = BubbleParams::new(4, 1.0, vec![0.0, 0.0, 0.0, -1.0])?;
    let u = bubble_field(&p)?;
    let grid = GridSpec { seed: rng.random_range(0..1 << 16), ..GridSpec::default_for(4) };
    let origin = vec![0.0; 4];
    let res = lambda_bar(&*u, &origin, &grid)?;
    let exact = 2f64.sqrt();
    let pts = vec![origin.clone(), boundary_point(rng, 4, 1.0), boundary_point(rng, 4, 1.0)];
    Ok(vec![
        CheckReport::compare("lambda_bar(0) of the unit bubble", res.lambda_bar, exact, (res.lambda_bar - exact).abs(), 1e-3 * exact),
        verify_lemma41(&*u, &pts, &grid)?,
        verify_kelvin_fixed_point(&*u, &origin, &grid)?,
    ])
}

fn newton_checks(rng: &mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>> {
    let step = 1e-5;
    let mut grad = Vec::new();
    let mut trace = Vec::new();
    for _ in 0..100 {
        let m = rng.random_range(3..=6);
        let a = SymMatrix::from_fn(m, |_, _| rng.random_range(-2.0..2.0));
        let s = rng.random_range(1..=m);
        let g = sigma_gradient(&a, s)?;
        for i in 0..m {
            for j in i..m {
                let at = |t: f64| {
                    let mut b = a.clone();
                    b.set(i, j, a.get(i, j) + t);
                    sigma(&b, s)
                };
                // a symmetric perturbation moves both (i,j) and (j,i)
                let fd = (at(step)? - at(-step)?) / (2.0 * step);
                let exact = if i == j { g.get(i, j) } else { 2.0 * g.get(i, j) };
                grad.push(CheckReport::compare("", fd, exact, (fd - exact).abs(), 1e-7 * (1.0 + exact.abs())));
            }
        }
        trace.push(newton_trace_check(&a, s)?);
    }
    Ok(vec![
        worst_of(grad, "sigma_k gradient against central differences"),
        worst_of(trace, "Newton tensor trace identity"),
    ])
}

fn reconciliation(_: &mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>> {
    let first = theorem_constraint_report(4, 2, 1.0)?;
    let again = theorem_constraint_report(4, 2, 1.0)?;
    let same = [
        (first.lhs_printed, again.lhs_printed),
        (first.c0_direct, again.c0_direct),
        (first.rhs_printed, again.rhs_printed),
    ]
    .iter()
    .all(|(a, b)| a.to_bits() == b.to_bits());
    let mut out = first.reports();
    out.push(
        CheckReport::info("constraint report bit-identical on repeat", if same { 1.0 } else { 0.0 }, 1.0),
    );
    Ok(out)
}

fn ball_pullback(rng: &mut ChaCha8Rng) -> conflab_core::Result<Vec<CheckReport>> {
    let center = vec![rng.random_range(-0.5..0.5), 0.0, 0.0, -1.0];
    let p = BubbleParams::new(4, 0.25, center)?;
    Ok(verify_corollary_ball(&p, 2, 0.5, 100)?.reports())
}
