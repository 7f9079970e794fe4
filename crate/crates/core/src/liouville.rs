//! Bubble certificates, the `c0 -> h` family solver, the reconciliation of
//! the printed constraint with the operator, and the ball version.
//!
//! Every bubble `(sqrt(b) / (1 + b |x - xbar|^2))^{(n-2)/2}` has Schouten
//! tensor `2 I`, so `sigma_k = 2^k binom(n, k)`; on `x_n = 0` it has
//! `A^T = 2 I_{n-1}` and constant `h = -2 sqrt(b) xbar_n`, hence constant
//! `B_k`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundary::{self, bk_umbilic, check_nk, SolveMode};
use crate::conformal::{self, BoundaryJet};
use crate::error::{domain, Error, Result};
use crate::fields::{bubble_field, BubbleParams};
use crate::math;
use crate::mobius::{halfspace_to_ball, BallMap};
use crate::report::CheckReport;
use crate::symfun::{binomial, boundary_coefficient, double_factorial, factorial, to_f64, Rational, SymMatrix};

pub const SIGMA_TOL: f64 = 1e-8;
pub const TANGENTIAL_TOL: f64 = 1e-8;
pub const MEAN_CURVATURE_TOL: f64 = 1e-10;
pub const SPREAD_TOL: f64 = 1e-9;
pub const C0_TOL: f64 = 1e-8;

/// `2^k binom(n, k)`.
pub fn bubble_sigma(n: usize, k: usize) -> Result<f64> {
    Ok(math::powi(2.0, k as i32) * binomial(n as u64, k as u64)? as f64)
}

/// `B_k(2 I_{n-1}, h)`.
pub fn bubble_bk(n: usize, k: usize, h: f64) -> Result<f64> {
    bk_umbilic(n, k, &SymMatrix::scaled_identity(n - 1, 2.0), h)
}

/// Length scale of a bubble: its width plus the distance of its center.
fn bubble_scale(p: &BubbleParams) -> f64 {
    1.0 / math::sqrt(p.b) + math::norm(&p.center)
}

/// Seeded points in a box of half-width `2 * scale` around the bubble center's
/// projection: interior points have `0 < x_n <= 2 * scale`, boundary points
/// `x_n = 0`.
pub fn bubble_samples(p: &BubbleParams, count: usize, seed: u64, on_boundary: bool) -> Vec<Vec<f64>> {
    let n = p.n;
    let scale = bubble_scale(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut x: Vec<f64> = (0..n - 1).map(|i| p.center[i] + scale * rng.random_range(-2.0..2.0)).collect();
            x.push(if on_boundary { 0.0 } else { scale * rng.random_range(1e-3..2.0) });
            x
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BubbleCertificate {
    pub params: BubbleParams,
    pub k: usize,
    /// Max relative error of `sigma_k` against `2^k binom(n,k)`.
    pub sigma_err: f64,
    /// Max of `|A^T - 2 I|_max` over boundary samples.
    pub at_err: f64,
    /// Max of `|h + 2 sqrt(b) xbar_n|` over boundary samples.
    pub h_err: f64,
    /// Mean of `B_k` over boundary samples.
    pub c0: f64,
    /// `B_k(2 I, -2 sqrt(b) xbar_n)`.
    pub c0_reference: f64,
    /// `max - min` of `B_k` over boundary samples.
    pub bk_spread: f64,
    pub samples: usize,
}

impl BubbleCertificate {
    pub fn c0_err(&self) -> f64 {
        math::abs(self.c0 - self.c0_reference)
    }

    pub fn reports(&self) -> Vec<CheckReport> {
        let n = self.params.n;
        let k = self.k;
        let scale = math::abs(self.c0_reference).max(1.0);
        vec![
            CheckReport::compare(format!("bubble sigma_{k} relative error (n={n})"), self.sigma_err, 0.0, self.sigma_err, SIGMA_TOL),
            CheckReport::compare(format!("bubble |A^T - 2I|_max (n={n})"), self.at_err, 0.0, self.at_err, TANGENTIAL_TOL),
            CheckReport::compare(format!("bubble |h + 2 sqrt(b) xbar_n| (n={n})"), self.h_err, 0.0, self.h_err, MEAN_CURVATURE_TOL),
            CheckReport::compare(format!("bubble B_{k} value (n={n})"), self.c0, self.c0_reference, self.c0_err(), C0_TOL * scale),
            CheckReport::compare(format!("bubble B_{k} spread (n={n})"), self.bk_spread, 0.0, self.bk_spread, SPREAD_TOL * scale),
        ]
    }

    pub fn pass(&self) -> bool {
        self.reports().iter().all(|r| r.pass)
    }
}

/// Evaluates `sigma_k` at interior samples and `A^T`, `h`, `B_k` at boundary
/// samples of a bubble with `xbar_n < 0`.
pub fn certify_bubble(p: &BubbleParams, k: usize, samples: usize) -> Result<BubbleCertificate> {
    certify_bubble_seeded(p, k, samples, 0)
}

pub fn certify_bubble_seeded(p: &BubbleParams, k: usize, samples: usize, seed: u64) -> Result<BubbleCertificate> {
    p.validate()?;
    check_nk(p.n, k)?;
    let n = p.n;
    if !(p.center[n - 1] < 0.0) {
        return Err(domain(format!(
            "bubble center must satisfy xbar_n < 0 for positive mean curvature, got {}",
            p.center[n - 1]
        )));
    }
    if samples == 0 {
        return Err(domain("certify_bubble needs at least one sample"));
    }
    let u = bubble_field(p)?;
    let target_sigma = bubble_sigma(n, k)?;
    let h_ref = p.mean_curvature();
    let two = SymMatrix::scaled_identity(n - 1, 2.0);

    let mut sigma_err: f64 = 0.0;
    for x in bubble_samples(p, samples, seed, false) {
        let s = conformal::sigma_k_curvature(&*u, &x, k)?;
        sigma_err = sigma_err.max(math::abs(s - target_sigma) / target_sigma);
    }
    let mut at_err: f64 = 0.0;
    let mut h_err: f64 = 0.0;
    let mut bks = Vec::with_capacity(samples);
    for x in bubble_samples(p, samples, seed ^ 0x9e37_79b9, true) {
        let bj = BoundaryJet::from_field(&*u, &x)?;
        at_err = at_err.max(bj.a_t.max_abs_diff(&two));
        h_err = h_err.max(math::abs(bj.h - h_ref));
        bks.push(boundary::bk_of_jet(&bj, k)?);
    }
    let lo = bks.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = bks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c0 = math::compensated_sum(bks.iter().copied()) / bks.len() as f64;
    Ok(BubbleCertificate {
        params: p.clone(),
        k,
        sigma_err,
        at_err,
        h_err,
        c0,
        c0_reference: bubble_bk(n, k, h_ref)?,
        bk_spread: hi - lo,
        samples,
    })
}

/// Bubbles with `B_k = c0`: every `(b, xbar)` with `-2 sqrt(b) xbar_n = h`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BubbleFamily {
    pub n: usize,
    pub k: usize,
    pub c0: f64,
    pub h: f64,
}

impl BubbleFamily {
    /// Member with width parameter `b` and tangential center `center_t`.
    pub fn member(&self, b: f64, center_t: &[f64]) -> Result<BubbleParams> {
        if center_t.len() != self.n - 1 {
            return Err(domain(format!("tangential center needs {} coordinates", self.n - 1)));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(domain(format!("b must be positive, got {b}")));
        }
        let mut center = center_t.to_vec();
        center.push(-self.h / (2.0 * math::sqrt(b)));
        BubbleParams::new(self.n, b, center)
    }

    pub fn contains(&self, p: &BubbleParams, tol: f64) -> bool {
        p.n == self.n && math::abs(p.mean_curvature() - self.h) <= tol * (1.0 + self.h)
    }
}

pub fn solve_family_for_c0(n: usize, k: usize, c0: f64) -> Result<BubbleFamily> {
    let h = boundary::solve_h(SolveMode::FixedTangential, &SymMatrix::scaled_identity(n - 1, 2.0), n, k, c0)?;
    Ok(BubbleFamily { n, k, c0, h })
}

/// The printed constraint next to direct evaluation of `B_k(2 I_{n-1}, h)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstraintReconciliation {
    pub n: usize,
    pub k: usize,
    pub h: f64,
    /// The printed left side with `sigma_s(2 I_{n-1})`.
    pub lhs_printed: f64,
    /// `B_k(2 I_{n-1}, h)`.
    pub c0_direct: f64,
    /// `(n + 1 - k) / n * c0_direct`.
    pub rhs_printed: f64,
    pub ratio: f64,
    /// The printed left side with `sigma_s(2 I_n)` instead.
    pub lhs_full_dim: f64,
}

impl ConstraintReconciliation {
    /// All entries are informational.
    pub fn reports(&self) -> Vec<CheckReport> {
        let (n, k, h) = (self.n, self.k, self.h);
        let tag = format!("n={n}, k={k}, h={h}");
        vec![
            CheckReport::info(format!("constraint lhs printed ({tag})"), self.lhs_printed, self.rhs_printed)
                .with_note("reference is the printed right side (n+1-k)/n * c0"),
            CheckReport::info(format!("constraint c0 direct ({tag})"), self.c0_direct, self.lhs_printed)
                .with_note("B_k(2I_(n-1), h); reference is the printed left side"),
            CheckReport::info(format!("constraint rhs printed ({tag})"), self.rhs_printed, self.c0_direct),
            CheckReport::info(format!("constraint ratio lhs/rhs ({tag})"), self.ratio, 1.0),
            CheckReport::info(format!("constraint lhs with sigma_s(2I_n) ({tag})"), self.lhs_full_dim, self.c0_direct)
                .with_note("reference is c0 direct"),
        ]
    }
}

/// `sigma_s(2 I_m) = 2^s binom(m, s)`.
fn sigma_two_identity(m: usize, s: usize) -> Result<f64> {
    Ok(math::powi(2.0, s as i32) * binomial(m as u64, s as u64)? as f64)
}

/// Evaluates the printed constraint
/// `sum_{s=1}^{k-1} (n-s)! / ((n-k)! (2k-2s-1)!! n) sigma_s(2I) h^{2k-2s-1}
///  + (n-1)! / ((n-k)! (2k-1)!!) h^{2k-1} = (n+1-k)/n c0`
/// with the bracketed mean curvature read as `h > 0`.
pub fn theorem_constraint_report(n: usize, k: usize, h: f64) -> Result<ConstraintReconciliation> {
    check_nk(n, k)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(domain(format!("h must be positive, got {h}")));
    }
    let (nu, ku) = (n as u64, k as u64);
    let lead = to_f64(boundary_coefficient(n, k, 0)?) * math::powi(h, (2 * k - 1) as i32);
    let mut printed = lead;
    let mut full = lead;
    for s in 1..k {
        let su = s as u64;
        let num = factorial(nu - su)?;
        let den = factorial(nu - ku)?
            .checked_mul(double_factorial((2 * k - 2 * s) as i64 - 1)?)
            .and_then(|v| v.checked_mul(nu))
            .ok_or_else(|| domain("integer overflow in constraint coefficient"))?;
        let coeff = to_f64(Rational::new(num, den)) * math::powi(h, (2 * k - 2 * s - 1) as i32);
        printed += coeff * sigma_two_identity(n - 1, s)?;
        full += coeff * sigma_two_identity(n, s)?;
    }
    let c0_direct = bubble_bk(n, k, h)?;
    let rhs = (n + 1 - k) as f64 / n as f64 * c0_direct;
    Ok(ConstraintReconciliation {
        n,
        k,
        h,
        lhs_printed: printed,
        c0_direct,
        rhs_printed: rhs,
        ratio: printed / rhs,
        lhs_full_dim: full,
    })
}

pub const BALL_SIGMA_TOL: f64 = 1e-6;
pub const BALL_SPREAD_TOL: f64 = 1e-8;
pub const BALL_FIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct BallCorollaryReport {
    pub interior_sigma: CheckReport,
    pub boundary_constancy: CheckReport,
    pub bubble_fit: CheckReport,
    /// Bubble parameters recovered from the ball field.
    pub fitted: Option<BubbleParams>,
}

impl BallCorollaryReport {
    pub fn reports(&self) -> Vec<CheckReport> {
        vec![self.interior_sigma.clone(), self.boundary_constancy.clone(), self.bubble_fit.clone()]
    }
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = center.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        if math::norm(&v) <= 1.0 {
            return center.iter().zip(&v).map(|(c, w)| c + radius * w).collect();
        }
    }
}

/// Pulls a half-space bubble back to the ball `B_{2d}(q)`, `q = (0, d)`,
/// and checks `sigma_k` inside, constancy of `B_k` at the preimages of
/// boundary samples, and that the ball field is again a bubble.
pub fn verify_corollary_ball(p: &BubbleParams, k: usize, d: f64, samples: usize) -> Result<BallCorollaryReport> {
    p.validate()?;
    let n = p.n;
    check_nk(n, k)?;
    if samples < n + 2 {
        return Err(domain(format!("ball check needs at least {} samples", n + 2)));
    }
    let u = bubble_field(p)?;
    let map = BallMap::new(vec![0.0; n - 1], d)?;
    let v = halfspace_to_ball(&u, d, &map.x0p)?;
    let q = map.center();
    let radius = map.radius();
    let conditioning = if d < 1e-3 { format!("; small ball (d = {d}) scales derivatives by 1/d") } else { alloc::string::String::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ba11);
    let interior: Vec<Vec<f64>> = (0..samples).map(|_| uniform_in_ball(&mut rng, &q, 0.9 * radius)).collect();

    let target = bubble_sigma(n, k)?;
    let mut worst_sigma = (0.0f64, target);
    for z in &interior {
        let s = conformal::sigma_k_curvature(&*v, z, k)?;
        if math::abs(s - target) >= worst_sigma.0 {
            worst_sigma = (math::abs(s - target), s);
        }
    }
    let interior_sigma = CheckReport::compare(
        format!("ball sigma_{k} = 2^k binom(n,k) (n={n}, d={d})"),
        worst_sigma.1,
        target,
        worst_sigma.0,
        BALL_SIGMA_TOL * target,
    )
    .with_note(format!("{samples} interior samples{conditioning}"));

    let pole = map.pole();
    let mut bks = Vec::with_capacity(samples);
    while bks.len() < samples {
        let omega: Vec<f64> = {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r = math::norm(&v);
            if !(r > 1e-3 && r <= 1.0) {
                continue;
            }
            v.into_iter().map(|c| c / r).collect()
        };
        let z = map.sphere_point(&omega);
        if math::dist(&z, &pole) < 1e-3 * radius {
            continue;
        }
        let mut y = map.to_halfspace(&z)?;
        if math::abs(y[n - 1]) > 1e-9 * (1.0 + math::norm(&y)) {
            return Err(Error::Resolution(format!("sphere point maps off the boundary: y_n = {}", y[n - 1])));
        }
        y[n - 1] = 0.0;
        bks.push(boundary::bk_of_field(&*u, &y, k)?);
    }
    let lo = bks.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = bks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let boundary_constancy = CheckReport::compare(
        format!("ball boundary B_{k} spread (n={n}, d={d})"),
        hi - lo,
        0.0,
        hi - lo,
        BALL_SPREAD_TOL * math::abs(hi).max(1.0),
    )
    .with_note(format!("B_k in [{lo}, {hi}] at {samples} pulled-back boundary samples{conditioning}"));

    let (bubble_fit, fitted) = fit_bubble(&*v, &interior, &q, radius)?;
    Ok(BallCorollaryReport { interior_sigma, boundary_constancy, bubble_fit, fitted })
}

/// Fits `v^{-2/(n-2)} = A |z|^2 + B.z + C` by least squares in coordinates
/// centered at `q` and scaled by `radius`, converts to bubble parameters, and
/// reports the max relative residual of the fitted bubble.
fn fit_bubble(
    v: &dyn crate::fields::ScalarField,
    pts: &[Vec<f64>],
    q: &[f64],
    radius: f64,
) -> Result<(CheckReport, Option<BubbleParams>)> {
    let n = v.dim();
    let expo = -2.0 / (n - 2) as f64;
    let mut rows = Vec::with_capacity(pts.len());
    let mut rhs = Vec::with_capacity(pts.len());
    let mut values = Vec::with_capacity(pts.len());
    for z in pts {
        let zeta: Vec<f64> = z.iter().zip(q).map(|(a, c)| (a - c) / radius).collect();
        let val = v.value(z)?;
        let mut row = Vec::with_capacity(n + 2);
        row.push(zeta.iter().map(|t| t * t).sum::<f64>());
        row.extend_from_slice(&zeta);
        row.push(1.0);
        rows.push(row);
        rhs.push(math::powf(val, expo));
        values.push(val);
    }
    let coef = least_squares(&rows, &rhs)?;
    let name = format!("ball field is a bubble (n={n})");
    let a = coef[0];
    if !(a > 0.0) {
        let r = CheckReport::compare(name, f64::NAN, 0.0, f64::INFINITY, BALL_FIT_TOL)
            .with_note(format!("fitted quadratic coefficient {a} is not positive"));
        return Ok((r, None));
    }
    // w = sqrt(b')|z - c|^2 + 1/sqrt(b') in scaled coordinates
    let b_scaled = a * a;
    let center_scaled: Vec<f64> = coef[1..=n].iter().map(|bi| -bi / (2.0 * a)).collect();
    let b_fit = b_scaled / (radius * radius);
    let center: Vec<f64> = center_scaled.iter().zip(q).map(|(c, qi)| qi + radius * c).collect();
    let fitted = BubbleParams::new(n, b_fit, center)?;
    let mut worst: f64 = 0.0;
    let vmax = values.iter().copied().fold(0.0, f64::max);
    for (z, val) in pts.iter().zip(&values) {
        worst = worst.max(math::abs(fitted.value_at(z) - val));
    }
    let rel = worst / vmax;
    let r = CheckReport::compare(name, rel, 0.0, rel, BALL_FIT_TOL)
        .with_note(format!("fitted b = {}, center = {:?}", fitted.b, fitted.center));
    Ok((r, Some(fitted)))
}

/// Least squares by Householder QR on a small dense system.
fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = rows.len();
    let p = rows[0].len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut b = rhs.to_vec();
    for j in 0..p {
        let norm = math::sqrt((j..m).map(|i| a[i][j] * a[i][j]).sum());
        if norm == 0.0 {
            return Err(Error::Resolution("rank-deficient fit".into()));
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..m).map(|i| a[i][j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 > 0.0 {
            for c in j..p {
                let dot: f64 = (j..m).map(|i| v[i - j] * a[i][c]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in j..m {
                    a[i][c] -= f * v[i - j];
                }
            }
            let dot: f64 = (j..m).map(|i| v[i - j] * b[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..m {
                b[i] -= f * v[i - j];
            }
        }
    }
    let mut x = vec![0.0; p];
    for j in (0..p).rev() {
        let s: f64 = (j + 1..p).map(|c| a[j][c] * x[c]).sum();
        if math::abs(a[j][j]) < 1e-300 {
            return Err(Error::Resolution("rank-deficient fit".into()));
        }
        x[j] = (b[j] - s) / a[j][j];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certify_examples() {
        let p = BubbleParams::new(4, 0.25, vec![0.0, 0.0, 0.0, -1.0]).unwrap();
        let c = certify_bubble(&p, 2, 50).unwrap();
        assert!(c.pass(), "{c:?}");
        assert!((c.c0 - 7.0).abs() < 1e-8);
        let p = BubbleParams::new(4, 1.0, vec![0.3, 0.0, -0.2, -1.0]).unwrap();
        let c = certify_bubble(&p, 2, 20).unwrap();
        assert!(c.pass() && (c.c0 - 20.0).abs() < 1e-8, "{c:?}");
        let p = BubbleParams::new(6, 2.0, vec![0.0, 1.0, 0.0, 0.0, 0.0, -0.4]).unwrap();
        let c = certify_bubble(&p, 3, 20).unwrap();
        assert!(c.pass(), "{c:?}");
        assert_eq!(bubble_sigma(6, 3).unwrap(), 160.0);
        let up = BubbleParams::new(4, 1.0, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(certify_bubble(&up, 2, 5).is_err());
    }

    #[test]
    fn family_examples() {
        let f = solve_family_for_c0(4, 2, 7.0).unwrap();
        assert!((f.h - 1.0).abs() < 1e-10);
        let m = f.member(0.25, &[0.0; 3]).unwrap();
        assert!((m.center[3] + 1.0).abs() < 1e-10);
        assert!((certify_bubble(&m, 2, 10).unwrap().c0 - 7.0).abs() < 1e-8);
        assert!((solve_family_for_c0(4, 2, 20.0).unwrap().h - 2.0).abs() < 1e-10);
        let tiny = solve_family_for_c0(4, 2, 1e-9).unwrap().h;
        assert!((tiny * 6.0 / 1e-9 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn constraint_examples() {
        let r = theorem_constraint_report(4, 2, 1.0).unwrap();
        assert_eq!(r.lhs_printed, 5.5);
        assert_eq!(r.c0_direct, 7.0);
        assert_eq!(r.rhs_printed, 5.25);
        assert!((r.ratio - 5.5 / 5.25).abs() < 1e-15);
        assert_eq!(r.lhs_full_dim, 7.0);
        assert!(r.reports().iter().all(|c| c.informational && !c.is_failure()));
        let r1 = theorem_constraint_report(5, 1, 0.7).unwrap();
        assert_eq!(r1.lhs_printed, 0.7);
        assert_eq!(r1.c0_direct, 0.7);
        assert_eq!(r1.rhs_printed, 0.7);
    }

    #[test]
    fn ball_corollary() {
        let f = solve_family_for_c0(4, 2, 7.0).unwrap();
        let p = f.member(0.25, &[0.0; 3]).unwrap();
        let r = verify_corollary_ball(&p, 2, 0.5, 100).unwrap();
        for c in r.reports() {
            assert!(c.pass, "{c:?}");
        }
        let tiny = verify_corollary_ball(&p, 2, 1e-6, 20).unwrap();
        assert!(tiny.interior_sigma.note.as_deref().unwrap().contains("small ball"));
    }

    #[test]
    fn least_squares_recovers_plane() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 1.0]).collect();
        let rhs: Vec<f64> = (0..10).map(|i| 2.0 * i as f64 - 3.0).collect();
        let x = least_squares(&rows, &rhs).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] + 3.0).abs() < 1e-12);
    }
}
