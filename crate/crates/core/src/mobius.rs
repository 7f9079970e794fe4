//! Inversions of the half-space, conformal invariance checks, the
//! half-space to ball map, and the moving-spheres radius.
//!
//! For a boundary point `x` and `lambda > 0` the inversion
//! `phi(y) = x + lambda^2 (y - x) / |y - x|^2` preserves the half-space and
//! fixes the sphere `|y - x| = lambda`. The Kelvin transform
//! `u_{x,lambda}(y) = (lambda / |y - x|)^{n-2} u(phi(y))` pulls `g_u` back
//! along `phi`, so `sigma_k` and `B_k` of `u_{x,lambda}` at `y` equal those
//! of `u` at `phi(y)`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::boundary::{bk_of_field, check_nk};
use crate::conformal;
use crate::error::{domain, Error, Result};
use crate::fields::{kelvin_field, Field, InversionField, Region, ScalarField, SINGULAR_EPS};
use crate::math;
use crate::report::CheckReport;

/// `y -> x + lambda^2 (y - x) / |y - x|^2` with `x` on the boundary.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MobiusInversion {
    pub center: Vec<f64>,
    pub lambda: f64,
}

impl MobiusInversion {
    pub fn new(center: Vec<f64>, lambda: f64) -> Result<Self> {
        let m = MobiusInversion { center, lambda };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(domain(format!("inversion radius must be positive, got {}", self.lambda)));
        }
        match self.center.last() {
            Some(&xn) if xn == 0.0 => {}
            Some(&xn) => return Err(domain(format!("inversion center must lie on x_n = 0, got x_n = {xn}"))),
            None => return Err(domain("inversion center is empty")),
        }
        if !self.center.iter().all(|c| c.is_finite()) {
            return Err(domain("inversion center must be finite"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        apply_inversion(self, y)
    }

    pub fn kelvin(&self, u: &Field) -> Result<Field> {
        kelvin_field(u, &self.center, self.lambda)
    }
}

pub fn apply_inversion(m: &MobiusInversion, y: &[f64]) -> Result<Vec<f64>> {
    invert_about(&m.center, m.lambda, y)
}

fn invert_about(c: &[f64], lambda: f64, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != c.len() {
        return Err(Error::Precondition("point dimension does not match the inversion".into()));
    }
    let r2: f64 = y.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
    if math::sqrt(r2) <= SINGULAR_EPS {
        return Err(domain("point coincides with the inversion center"));
    }
    let s = lambda * lambda / r2;
    Ok(y.iter().zip(c).map(|(a, b)| b + s * (a - b)).collect())
}

/// Running worst case of a relative pointwise comparison.
struct Worst {
    name: String,
    report: Option<CheckReport>,
    ratio: f64,
    points: usize,
}

impl Worst {
    fn new(name: String) -> Self {
        Worst { name, report: None, ratio: -1.0, points: 0 }
    }

    fn push(&mut self, value: f64, reference: f64, tol: f64, at: &[f64]) {
        self.points += 1;
        let err = math::abs(value - reference);
        let ratio = if err.is_nan() { f64::INFINITY } else { err / tol };
        if ratio > self.ratio {
            self.ratio = ratio;
            self.report = Some(
                CheckReport::compare(self.name.clone(), value, reference, err, tol).with_note(format!("worst at {at:?}")),
            );
        }
    }

    fn finish(self) -> Result<CheckReport> {
        let points = self.points;
        self.report
            .map(|r| {
                let note = r.note.clone().unwrap_or_default();
                r.with_note(format!("{note} over {points} points"))
            })
            .ok_or_else(|| Error::Precondition("no sample points given".into()))
    }
}

pub const INVARIANCE_TOL: f64 = 1e-6;

/// `sigma_k(A^{u_{x,lambda}})(y)` against `sigma_k(A^u)(phi(y))`.
pub fn invariance_check_sigma(u: &Field, m: &MobiusInversion, pts: &[Vec<f64>], k: usize) -> Result<CheckReport> {
    m.validate()?;
    let v = m.kelvin(u)?;
    let mut worst = Worst::new(format!("sigma_{k} inversion invariance (lambda={})", m.lambda));
    for y in pts {
        let lhs = conformal::sigma_k_curvature(&*v, y, k)?;
        let rhs = conformal::sigma_k_curvature(&**u, &m.apply(y)?, k)?;
        worst.push(lhs, rhs, INVARIANCE_TOL * (1.0 + math::abs(rhs)), y);
    }
    worst.finish()
}

/// `B_k(u_{x,lambda})(y)` against `B_k(u)(phi(y))` on the boundary.
pub fn invariance_check_bk(u: &Field, m: &MobiusInversion, pts: &[Vec<f64>], k: usize) -> Result<CheckReport> {
    m.validate()?;
    check_nk(u.dim(), k)?;
    let v = m.kelvin(u)?;
    let mut worst = Worst::new(format!("B_{k} inversion invariance (lambda={})", m.lambda));
    for y in pts {
        let lhs = bk_of_field(&*v, y, k)?;
        let rhs = bk_of_field(&**u, &m.apply(y)?, k)?;
        worst.push(lhs, rhs, INVARIANCE_TOL * (1.0 + math::abs(rhs)), y);
    }
    worst.finish()
}

/// Inversion about `p = (x0', -d)` with radius `2d`, which carries the ball
/// `B_{2d}(q)`, `q = (x0', d)`, onto the upper half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct BallMap {
    pub x0p: Vec<f64>,
    pub d: f64,
}

impl BallMap {
    pub fn new(x0p: Vec<f64>, d: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(domain(format!("ball parameter d must be positive, got {d}")));
        }
        if x0p.is_empty() || !x0p.iter().all(|v| v.is_finite()) {
            return Err(domain("ball offset x0' must be a finite point of R^(n-1)"));
        }
        Ok(BallMap { x0p, d })
    }

    pub fn dim(&self) -> usize {
        self.x0p.len() + 1
    }

    pub fn pole(&self) -> Vec<f64> {
        let mut p = self.x0p.clone();
        p.push(-self.d);
        p
    }

    pub fn center(&self) -> Vec<f64> {
        let mut q = self.x0p.clone();
        q.push(self.d);
        q
    }

    pub fn radius(&self) -> f64 {
        2.0 * self.d
    }

    /// Ball point to half-space point (the map is an involution).
    pub fn to_halfspace(&self, z: &[f64]) -> Result<Vec<f64>> {
        invert_about(&self.pole(), self.radius(), z)
    }

    pub fn to_ball(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.to_halfspace(y)
    }

    /// Point of the boundary sphere in direction `omega` (unit) from the center.
    pub fn sphere_point(&self, omega: &[f64]) -> Vec<f64> {
        self.center().iter().zip(omega).map(|(c, w)| c + self.radius() * w).collect()
    }

    /// `|phi(z) - p| |z - p| - 4 d^2` at boundary samples in seeded random
    /// directions, skipping the pole itself.
    pub fn sphere_identity(&self, samples: usize, seed: u64) -> Result<CheckReport> {
        let n = self.dim();
        let p = self.pole();
        let target = 4.0 * self.d * self.d;
        let mut worst = Worst::new(format!("sphere identity |phi(z)-p||z-p| = 4d^2 (d={})", self.d));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while worst.points < samples {
            let omega = random_unit(&mut rng, n);
            let z = self.sphere_point(&omega);
            if math::dist(&z, &p) < 1e-6 * self.radius() {
                continue;
            }
            let y = self.to_halfspace(&z)?;
            let lhs = math::dist(&y, &p) * math::dist(&z, &p);
            worst.push(lhs, target, 1e-10 * target.max(1.0), &z);
        }
        worst.finish()
    }
}

/// `v(z) = (2d / |z - p|)^{n-2} u(p + 4 d^2 (z - p) / |z - p|^2)` on the
/// closed ball `B_{2d}(q)` minus the pole.
pub fn halfspace_to_ball(u: &Field, d: f64, x0p: &[f64]) -> Result<Field> {
    let map = BallMap::new(x0p.to_vec(), d)?;
    if map.dim() != u.dim() {
        return Err(Error::Precondition(format!(
            "x0' has {} coordinates, expected {}",
            x0p.len(),
            u.dim() - 1
        )));
    }
    let region = Region::Ball { center: map.center(), radius: map.radius() };
    Ok(Arc::new(InversionField::new(u.clone(), map.pole(), map.radius(), region)?))
}

/// Sampling grid for the moving-spheres sweep: `shells` log-spaced radii from
/// `lambda` to `r_far_factor * lambda` times `angular` hemisphere directions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct GridSpec {
    pub shells: usize,
    pub r_far_factor: f64,
    pub angular: usize,
    pub seed: u64,
}

impl GridSpec {
    pub fn default_for(n: usize) -> Self {
        GridSpec { shells: 64, r_far_factor: 1e3, angular: 2 * n * 32, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shells < 2 {
            return Err(domain("grid needs at least 2 shells"));
        }
        if !(self.r_far_factor > 1.0 && self.r_far_factor.is_finite()) {
            return Err(domain(format!("r_far_factor must exceed 1, got {}", self.r_far_factor)));
        }
        if self.angular == 0 {
            return Err(domain("grid needs at least one angular sample"));
        }
        Ok(())
    }

    /// Radii relative to `lambda`, from 1 to `r_far_factor`.
    pub fn shell_factors(&self) -> Vec<f64> {
        let last = (self.shells - 1) as f64;
        (0..self.shells)
            .map(|i| if i == 0 { 1.0 } else { math::powf(self.r_far_factor, i as f64 / last) })
            .collect()
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = math::norm(&v);
        if r > 1e-8 {
            return v.into_iter().map(|c| c / r).collect();
        }
    }
}

/// Unit vectors with `omega_n >= 0`: a hyperspherical product grid for
/// `n <= 4`, seeded random directions plus the coordinate axes above.
pub fn hemisphere_directions(n: usize, angular: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(n >= 2, "hemisphere directions need n >= 2");
    if n > 4 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(angular + 2 * n);
        let mut pole = vec![0.0; n];
        pole[n - 1] = 1.0;
        out.push(pole);
        for i in 0..n - 1 {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = s;
                out.push(e);
            }
        }
        for _ in 0..angular {
            let mut w = random_unit(&mut rng, n);
            w[n - 1] = math::abs(w[n - 1]);
            out.push(w);
        }
        return out;
    }
    let axes = n - 1;
    let mut m = 2usize;
    while m.pow(axes as u32) < angular {
        m += 1;
    }
    let half_pi = core::f64::consts::FRAC_PI_2;
    let pi = core::f64::consts::PI;
    let mut out = Vec::with_capacity(m.pow(axes as u32));
    let mut idx = vec![0usize; axes];
    loop {
        let angles: Vec<f64> = (0..axes)
            .map(|a| {
                let j = idx[a] as f64;
                let mm = (m - 1) as f64;
                if a == 0 {
                    if axes == 1 {
                        // half circle: from -pi/2 to pi/2 around e_n
                        -half_pi + pi * j / mm
                    } else {
                        half_pi * j / mm
                    }
                } else if a == axes - 1 {
                    2.0 * pi * j / m as f64
                } else {
                    pi * j / mm
                }
            })
            .collect();
        let mut w = vec![0.0; n];
        if axes == 1 {
            w[1] = math::cos(angles[0]);
            w[0] = math::sin(angles[0]);
        } else {
            let mut s = 1.0;
            for a in 0..axes {
                w[n - 1 - a] = s * math::cos(angles[a]);
                s *= math::sin(angles[a]);
            }
            w[0] = s;
        }
        w[n - 1] = math::abs(w[n - 1]);
        out.push(w);
        let mut a = 0;
        loop {
            if a == axes {
                return out;
            }
            idx[a] += 1;
            if idx[a] < m {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

pub const DEFAULT_ALPHA_RADII: [f64; 3] = [1e2, 1e3, 1e4];

fn shell_min(u: &dyn ScalarField, center: &[f64], r: f64, dirs: &[Vec<f64>]) -> Result<f64> {
    let n = u.dim();
    let mut best = f64::INFINITY;
    for w in dirs {
        let y: Vec<f64> = center.iter().zip(w).map(|(c, wi)| c + r * wi).collect();
        best = best.min(math::powi(r, (n - 2) as i32) * u.value(&y)?);
    }
    Ok(best)
}

/// `liminf |x|^{n-2} u(x)` over the upper half-space: the minimum of
/// `R^{n-2} u` over hemisphere samples at each radius, extrapolated in
/// `1/R` from the two largest radii. A tail that grows by more than a
/// factor of 2 between the two largest radii is reported as `+inf`.
pub fn alpha_estimate(u: &dyn ScalarField, radii: &[f64]) -> Result<f64> {
    let n = u.dim();
    if n < 3 {
        return Err(domain("alpha needs n >= 3"));
    }
    if radii.is_empty() {
        return Err(domain("alpha_estimate needs at least one radius"));
    }
    if radii.iter().any(|r| !(*r >= 1.0 && r.is_finite())) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("radii must be increasing and >= 1"));
    }
    let dirs = hemisphere_directions(n, 2 * n * 32, 0);
    let origin = vec![0.0; n];
    let mins: Vec<f64> = radii.iter().map(|&r| shell_min(u, &origin, r, &dirs)).collect::<Result<_>>()?;
    let last = mins.len() - 1;
    if last == 0 {
        return Ok(mins[0]);
    }
    let (r1, r2) = (radii[last - 1], radii[last]);
    let (m1, m2) = (mins[last - 1], mins[last]);
    if m2 > 2.0 * m1 {
        return Ok(f64::INFINITY);
    }
    Ok(((r2 * m2 - r1 * m1) / (r2 - r1)).max(0.0))
}

/// Evidence for `lambda_bar`: the largest radius shown feasible and the
/// smallest shown infeasible, with the worst margins on each side.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LambdaBarCertificate {
    pub lambda_feasible: f64,
    /// `min(u - u_{x,lambda})` over the grid at `lambda_feasible`.
    pub feasible_margin: f64,
    pub lambda_infeasible: f64,
    /// Most negative grid margin at `lambda_infeasible`.
    pub infeasible_margin: f64,
    /// Where the infeasible radius fails; `None` when only the tail
    /// certificate failed.
    pub failure_point: Option<Vec<f64>>,
    pub tail_failed: bool,
    /// `lambda_infeasible / lambda_feasible - 1`.
    pub relative_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LambdaBarResult {
    pub x: Vec<f64>,
    pub lambda_bar: f64,
    pub grid: GridSpec,
    pub certificate: LambdaBarCertificate,
    pub feasibility_tests: usize,
}

/// Target relative width of the final bisection bracket.
pub const LAMBDA_BAR_BRACKET: f64 = 1e-5;
/// Slack in `u_{x,lambda} <= u` (equality holds on the sphere itself).
pub const FEASIBILITY_SLACK: f64 = 1e-12;
const BRACKET_STEPS: usize = 60;

#[derive(Debug, Clone)]
struct Feasibility {
    feasible: bool,
    margin: f64,
    worst_point: Vec<f64>,
    tail_ok: bool,
}

struct ShellOutcome {
    margin: f64,
    point: Vec<f64>,
}

fn sweep_shell(u: &dyn ScalarField, x: &[f64], lambda: f64, r: f64, dirs: &[Vec<f64>]) -> Result<ShellOutcome> {
    let n = u.dim();
    let scale = math::powi(lambda / r, (n - 2) as i32);
    let image_r = lambda * lambda / r;
    let mut out = ShellOutcome { margin: f64::INFINITY, point: Vec::new() };
    for w in dirs {
        let y: Vec<f64> = x.iter().zip(w).map(|(c, wi)| c + r * wi).collect();
        let z: Vec<f64> = x.iter().zip(w).map(|(c, wi)| c + image_r * wi).collect();
        let margin = u.value(&y)? - scale * u.value(&z)?;
        if margin < out.margin {
            out.margin = margin;
            out.point = y;
        }
    }
    Ok(out)
}

#[cfg(feature = "parallel")]
fn sweep_all(u: &dyn ScalarField, x: &[f64], lambda: f64, radii: &[f64], dirs: &[Vec<f64>]) -> Result<Vec<ShellOutcome>> {
    use rayon::prelude::*;
    radii.par_iter().map(|&r| sweep_shell(u, x, lambda, r, dirs)).collect()
}

#[cfg(not(feature = "parallel"))]
fn sweep_all(u: &dyn ScalarField, x: &[f64], lambda: f64, radii: &[f64], dirs: &[Vec<f64>]) -> Result<Vec<ShellOutcome>> {
    radii.iter().map(|&r| sweep_shell(u, x, lambda, r, dirs)).collect()
}

struct Sweep<'a> {
    u: &'a dyn ScalarField,
    x: &'a [f64],
    grid: &'a GridSpec,
    dirs: Vec<Vec<f64>>,
    alpha: f64,
    tests: usize,
    history: Vec<(f64, bool)>,
}

impl Sweep<'_> {
    /// `u_{x,lambda} <= u + slack` on the grid outside `B_lambda(x)`, and
    /// beyond `R_far` the Kelvin tail `lambda^{n-2} max_{small half-ball} u`
    /// stays below the barrier `min(min_{|y-x|=R_far} |y-x|^{n-2} u, alpha)`.
    fn test(&mut self, lambda: f64) -> Result<Feasibility> {
        self.tests += 1;
        let n = self.u.dim();
        let radii: Vec<f64> = self.grid.shell_factors().iter().map(|f| f * lambda).collect();
        let shells = sweep_all(self.u, self.x, lambda, &radii, &self.dirs)?;
        let mut margin = f64::INFINITY;
        let mut worst_point = Vec::new();
        for s in shells {
            if s.margin < margin {
                margin = s.margin;
                worst_point = s.point;
            }
        }
        let r_far = *radii.last().expect("at least two shells");
        let mut barrier = shell_min(self.u, self.x, r_far, &self.dirs)?;
        if self.alpha.is_finite() && self.alpha > 0.0 {
            barrier = barrier.min(self.alpha);
        }
        let rho = lambda * lambda / r_far;
        let mut small_max = self.u.value(self.x)?;
        for w in &self.dirs {
            for s in [0.5, 1.0] {
                let z: Vec<f64> = self.x.iter().zip(w).map(|(c, wi)| c + s * rho * wi).collect();
                small_max = small_max.max(self.u.value(&z)?);
            }
        }
        let tail_ok = math::powi(lambda, (n - 2) as i32) * small_max <= barrier * (1.0 + FEASIBILITY_SLACK);
        let feasible = margin >= -FEASIBILITY_SLACK && tail_ok;
        self.history.push((lambda, feasible));
        Ok(Feasibility { feasible, margin, worst_point, tail_ok })
    }
}

/// `sup { mu : u_{x,lambda} <= u outside B_lambda(x) for all lambda < mu }`
/// by bracketing and bisection on the sampling grid.
pub fn lambda_bar(u: &dyn ScalarField, x: &[f64], grid: &GridSpec) -> Result<LambdaBarResult> {
    conformal::check_boundary_point(u, x)?;
    grid.validate()?;
    let n = u.dim();
    let alpha = alpha_estimate(u, &DEFAULT_ALPHA_RADII).unwrap_or(f64::INFINITY);
    let mut sweep = Sweep {
        u,
        x,
        grid,
        dirs: hemisphere_directions(n, grid.angular, grid.seed),
        alpha,
        tests: 0,
        history: Vec::new(),
    };
    let ux = u.value(x)?;
    let guess = math::powf(alpha / ux, 1.0 / (n - 2) as f64);
    let start = if guess.is_finite() && guess > 1e-8 && guess < 1e8 { guess } else { 1.0 };

    let mut lo;
    let mut hi;
    let mut lo_f;
    let mut hi_f;
    let first = sweep.test(start)?;
    if first.feasible {
        lo = start;
        lo_f = first;
        let mut cand = start;
        loop {
            if sweep.tests > BRACKET_STEPS {
                return Err(Error::Unbounded { lambda_max: cand });
            }
            cand *= 2.0;
            let f = sweep.test(cand)?;
            if !f.feasible {
                hi = cand;
                hi_f = f;
                break;
            }
            lo = cand;
            lo_f = f;
        }
    } else {
        hi = start;
        hi_f = first;
        let mut cand = start;
        loop {
            if sweep.tests > BRACKET_STEPS {
                return Err(Error::Resolution(format!("no feasible radius found down to {cand}")));
            }
            cand *= 0.5;
            let f = sweep.test(cand)?;
            if f.feasible {
                lo = cand;
                lo_f = f;
                break;
            }
            hi = cand;
            hi_f = f;
        }
    }
    while hi - lo > LAMBDA_BAR_BRACKET * lo {
        let mid = 0.5 * (lo + hi);
        let f = sweep.test(mid)?;
        if f.feasible {
            lo = mid;
            lo_f = f;
        } else {
            hi = mid;
            hi_f = f;
        }
    }
    // every radius below a feasible one must be feasible too
    for frac in [0.25, 0.5, 0.75, 0.9, 0.99] {
        sweep.test(frac * lo)?;
    }
    let min_infeasible = sweep.history.iter().filter(|(_, ok)| !ok).map(|(l, _)| *l).fold(f64::INFINITY, f64::min);
    if let Some((l, _)) = sweep.history.iter().find(|(l, ok)| *ok && *l > min_infeasible) {
        return Err(Error::Resolution(format!(
            "feasibility is not monotone: lambda = {l} is feasible above infeasible lambda = {min_infeasible}"
        )));
    }
    let certificate = LambdaBarCertificate {
        lambda_feasible: lo,
        feasible_margin: lo_f.margin,
        lambda_infeasible: hi,
        infeasible_margin: hi_f.margin,
        failure_point: if hi_f.margin < -FEASIBILITY_SLACK { Some(hi_f.worst_point) } else { None },
        tail_failed: !hi_f.tail_ok,
        relative_gap: hi / lo - 1.0,
    };
    Ok(LambdaBarResult { x: x.to_vec(), lambda_bar: lo, grid: grid.clone(), certificate, feasibility_tests: sweep.tests })
}

pub const LEMMA41_TOL: f64 = 5e-3;

/// `lambda_bar(x)^{n-2} u(x)` against `alpha` at each boundary point.
pub fn verify_lemma41(u: &dyn ScalarField, pts: &[Vec<f64>], grid: &GridSpec) -> Result<CheckReport> {
    let n = u.dim();
    let name = format!("lambda_bar^(n-2) u = alpha (n={n})");
    let alpha = alpha_estimate(u, &DEFAULT_ALPHA_RADII)?;
    let mut worst = Worst::new(name.clone());
    for x in pts {
        match lambda_bar(u, x, grid) {
            Ok(res) => {
                let lhs = math::powi(res.lambda_bar, (n - 2) as i32) * u.value(x)?;
                worst.push(lhs, alpha, LEMMA41_TOL * alpha, x);
            }
            Err(Error::Unbounded { lambda_max }) => {
                return Ok(CheckReport::info(name, f64::INFINITY, alpha).not_applicable(format!(
                    "lambda_bar is unbounded at {x:?} (feasible up to {lambda_max}); alpha = {alpha} \
                     violates the hypothesis 0 < alpha < infinity"
                )));
            }
            Err(e) => return Err(e),
        }
    }
    worst.finish()
}

pub const KELVIN_FIXED_POINT_TOL: f64 = 1e-6;

/// `max |u_{x,lambda} - u| <= 1e-6 max u` on the grid (inside and outside
/// the sphere) at the critical radius.
///
/// The radius is `(alpha / u(x))^{1/(n-2)}` when that agrees with the grid
/// `lambda_bar` to within the bisection tolerance; otherwise the grid value.
pub fn verify_kelvin_fixed_point(u: &dyn ScalarField, x: &[f64], grid: &GridSpec) -> Result<CheckReport> {
    let n = u.dim();
    let name = format!("Kelvin fixed point u_(x,lambda_bar) = u at {x:?}");
    let (lambda, mut note) = match lambda_bar(u, x, grid) {
        Ok(res) => {
            let ux = u.value(x)?;
            let from_alpha = alpha_estimate(u, &DEFAULT_ALPHA_RADII)
                .map(|a| math::powf(a / ux, 1.0 / (n - 2) as f64))
                .unwrap_or(f64::NAN);
            if math::abs(from_alpha / res.lambda_bar - 1.0) <= 2e-3 {
                (from_alpha, format!("lambda from alpha identity {from_alpha}, grid lambda_bar {}", res.lambda_bar))
            } else {
                (res.lambda_bar, format!("grid lambda_bar {} (alpha identity gives {from_alpha})", res.lambda_bar))
            }
        }
        Err(Error::Unbounded { lambda_max }) => (
            1.0,
            format!("hypothesis violated: lambda_bar unbounded (feasible up to {lambda_max}); compared at lambda = 1"),
        ),
        Err(e) => return Err(e),
    };
    let dirs = hemisphere_directions(n, grid.angular, grid.seed);
    let mut worst_diff: f64 = 0.0;
    let mut max_u: f64 = 0.0;
    for f in grid.shell_factors() {
        for r in [lambda * f, lambda / f] {
            let scale = math::powi(lambda / r, (n - 2) as i32);
            let image_r = lambda * lambda / r;
            for w in &dirs {
                let y: Vec<f64> = x.iter().zip(w).map(|(c, wi)| c + r * wi).collect();
                let z: Vec<f64> = x.iter().zip(w).map(|(c, wi)| c + image_r * wi).collect();
                let uy = u.value(&y)?;
                max_u = max_u.max(uy);
                worst_diff = worst_diff.max(math::abs(scale * u.value(&z)? - uy));
            }
        }
    }
    let report = CheckReport::compare(name, worst_diff, 0.0, worst_diff, KELVIN_FIXED_POINT_TOL * max_u);
    if !report.pass && note.starts_with("hypothesis") {
        note.push_str("; u is not a solution");
    }
    Ok(report.with_note(note))
}
