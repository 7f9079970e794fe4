//! The boundary curvature `B_k` of the umbilic boundary `x_n = 0`:
//!
//! ```text
//! B_k = sum_{s=0}^{k-1} (n-1-s)! / ((n-k)! (2k-2s-1)!!) sigma_s(A^T) h^{2k-2s-1}
//! ```
//!
//! an odd polynomial in the mean curvature `h`. Writing `A^T = M - h^2/2 I`
//! with `M` fixed, `dB_k/dh = sigma_{k-1}(A^T)`, so `B_k` is monotone in `h`
//! while `A^T` stays in `Gamma_{k-1}^+`.
//!
//! The linearization coefficients `a_{ab}` and `b_n` come from
//! `B_k(u_1) - B_k(u_0) = int_0^1 d/dt B_k(t u_1 + (1-t) u_0) dt` and are
//! integrated with Gauss-Legendre in `t`.

use alloc::format;
use alloc::vec::Vec;

use crate::conformal::{self, check_boundary_point, BoundaryJet};
use crate::error::{domain, Error, Result};
use crate::fields::{Jet, ScalarField};
use crate::math;
use crate::quadrature::{self, GaussLegendre};
use crate::report::CheckReport;
use crate::symfun::{self, boundary_coefficient, to_f64, SymMatrix};

pub const DEFAULT_NODES: usize = 64;

/// Arguments of the umbilic `B_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BkInput {
    pub n: usize,
    pub k: usize,
    pub a_t: SymMatrix,
    pub h: f64,
}

impl BkInput {
    pub fn new(n: usize, k: usize, a_t: SymMatrix, h: f64) -> Result<Self> {
        check_nk(n, k)?;
        if a_t.dim() != n - 1 {
            return Err(domain(format!("A^T must be {0}x{0}, got {1}x{1}", n - 1, a_t.dim())));
        }
        Ok(BkInput { n, k, a_t, h })
    }

    pub fn value(&self) -> Result<f64> {
        bk_umbilic(self.n, self.k, &self.a_t, self.h)
    }
}

/// Coefficients of `B_k` along the boundary segment between two fields.
#[derive(Debug, Clone, PartialEq)]
pub struct LinCoeffs {
    /// Coefficient matrix of `-psi_{ab}`, dimension `n-1`.
    pub a: SymMatrix,
    /// Coefficient of `-psi_n`.
    pub b_n: f64,
    pub quadrature_nodes: usize,
}

impl LinCoeffs {
    pub fn max_abs_diff(&self, other: &LinCoeffs) -> f64 {
        self.a.max_abs_diff(&other.a).max(math::abs(self.b_n - other.b_n))
    }
}

pub(crate) fn check_nk(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(domain("B_k needs k >= 1"));
    }
    if n < 2 * k {
        return Err(domain(format!("B_k is defined for n >= 2k, got n={n}, k={k}")));
    }
    Ok(())
}

/// `(n-1-s)! / ((n-k)! (2k-2s-1)!!)` for `s = 0..k`, as floats.
pub fn bk_coefficients(n: usize, k: usize) -> Result<Vec<f64>> {
    check_nk(n, k)?;
    (0..k).map(|s| Ok(to_f64(boundary_coefficient(n, k, s)?))).collect()
}

fn bk_from_sigmas(coeffs: &[f64], sig: &[f64], h: f64) -> f64 {
    let k = coeffs.len();
    let mut acc = 0.0;
    for s in 0..k {
        acc += coeffs[s] * sig[s] * math::powi(h, (2 * k - 2 * s - 1) as i32);
    }
    acc
}

fn sigmas_upto(a: &SymMatrix, k: usize) -> Result<Vec<f64>> {
    let mut s = symfun::sigma_all(a)?;
    s.truncate(k);
    Ok(s)
}

/// `B_k` from `(A^T, h)`.
pub fn bk_umbilic(n: usize, k: usize, a_t: &SymMatrix, h: f64) -> Result<f64> {
    check_nk(n, k)?;
    if a_t.dim() != n - 1 {
        return Err(domain(format!("A^T must be {0}x{0}, got {1}x{1}", n - 1, a_t.dim())));
    }
    if !h.is_finite() {
        return Err(domain("mean curvature must be finite"));
    }
    let coeffs = bk_coefficients(n, k)?;
    Ok(bk_from_sigmas(&coeffs, &sigmas_upto(a_t, k)?, h))
}

pub fn bk_of_jet(bj: &BoundaryJet, k: usize) -> Result<f64> {
    bk_umbilic(bj.dim(), k, &bj.a_t, bj.h)
}

/// `B_k` of `g_u` at a boundary point.
pub fn bk_of_field(u: &dyn ScalarField, x: &[f64], k: usize) -> Result<f64> {
    check_nk(u.dim(), k)?;
    bk_of_jet(&BoundaryJet::from_field(u, x)?, k)
}

/// `h -> B_k(M - h^2/2 I, h)`.
pub fn bk_fixed_m(n: usize, k: usize, m: &SymMatrix, h: f64) -> Result<f64> {
    bk_umbilic(n, k, &m.shifted(-0.5 * h * h), h)
}

/// Analytic and finite-difference `dB_k/dh` at fixed `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct HDerivative {
    /// `sigma_{k-1}(M - h^2/2 I)`.
    pub analytic: f64,
    pub finite_difference: f64,
    pub report: CheckReport,
}

pub const H_DERIVATIVE_STEP: f64 = 1e-5;

pub fn bk_h_derivative(m: &SymMatrix, h: f64, n: usize, k: usize) -> Result<HDerivative> {
    check_nk(n, k)?;
    if m.dim() != n - 1 {
        return Err(domain(format!("M must be {0}x{0}, got {1}x{1}", n - 1, m.dim())));
    }
    let analytic = symfun::sigma(&m.shifted(-0.5 * h * h), k - 1)?;
    let s = H_DERIVATIVE_STEP;
    let fd = (bk_fixed_m(n, k, m, h + s)? - bk_fixed_m(n, k, m, h - s)?) / (2.0 * s);
    let report = CheckReport::compare(
        format!("dB_k/dh(n={n}, k={k}, h={h})"),
        fd,
        analytic,
        math::abs(fd - analytic),
        1e-6 * math::abs(analytic).max(1e-6),
    );
    Ok(HDerivative { analytic, finite_difference: fd, report })
}

/// What `solve_h` holds fixed while `h` varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SolveMode {
    /// `A^T` fixed: `B_k` is a polynomial in `h` with nonnegative coefficients.
    FixedTangential,
    /// `M` fixed, `A^T = M - h^2/2 I`.
    FixedM,
}

/// The unique `h > 0` with `B_k = c0` on the admissible range.
pub fn solve_h(mode: SolveMode, data: &SymMatrix, n: usize, k: usize, c0: f64) -> Result<f64> {
    check_nk(n, k)?;
    if data.dim() != n - 1 {
        return Err(domain(format!("data matrix must be {0}x{0}, got {1}x{1}", n - 1, data.dim())));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(domain(format!("target c0 must be positive, got {c0}")));
    }
    let coeffs = bk_coefficients(n, k)?;
    let tol = 1e-12 * (1.0 + c0);
    match mode {
        SolveMode::FixedTangential => {
            let sig = sigmas_upto(data, k)?;
            if let Some(s) = (1..k).find(|&s| sig[s] < 0.0) {
                return Err(domain(format!(
                    "fixed A^T must lie in the closure of Gamma_(k-1)^+; sigma_{s} = {}",
                    sig[s]
                )));
            }
            let b = |h: f64| bk_from_sigmas(&coeffs, &sig, h);
            let db = |h: f64| -> f64 {
                (0..k)
                    .map(|s| {
                        let p = 2 * k - 2 * s - 1;
                        coeffs[s] * sig[s] * p as f64 * math::powi(h, p as i32 - 1)
                    })
                    .sum()
            };
            let h_max = 1f64.max(math::powf(c0 / coeffs[0], 1.0 / (2 * k - 1) as f64) + 1.0);
            Ok(bracket_and_polish(b, db, 0.0, h_max, c0, tol))
        }
        SolveMode::FixedM => {
            let h_adm = admissible_h(data, k)?;
            let b = |h: f64| bk_from_sigmas(&coeffs, &sigmas_upto(&data.shifted(-0.5 * h * h), k).unwrap_or_default(), h);
            let db = |h: f64| symfun::sigma(&data.shifted(-0.5 * h * h), k - 1).unwrap_or(0.0);
            let hi = match h_adm {
                Some(h) => {
                    let sup = b(h);
                    if sup <= c0 {
                        return Err(Error::NoRoot { sup });
                    }
                    h
                }
                None => {
                    // k = 1: B_1 = h
                    c0 + 1.0
                }
            };
            Ok(bracket_and_polish(b, db, 0.0, hi, c0, tol))
        }
    }
}

/// First `h > 0` where `sigma_{k-1}(M - h^2/2 I)` reaches zero, or `None`
/// when there is no constraint (`k = 1`).
fn admissible_h(m: &SymMatrix, k: usize) -> Result<Option<f64>> {
    if k == 1 {
        return Ok(None);
    }
    let at0 = symfun::cone_classify(m)?;
    if !at0.contains(k - 1) {
        return Err(Error::NoRoot { sup: 0.0 });
    }
    let lam_max = *m.eigenvalues().last().expect("non-empty");
    // M - t I leaves Gamma_1^+ (hence Gamma_{k-1}^+) before t = lambda_max + 0
    let t_end = lam_max.max(0.0) + 1e-12;
    let in_cone = |t: f64| symfun::cone_classify(&m.shifted(-t)).map(|c| c.contains(k - 1)).unwrap_or(false);
    let samples = 4096;
    let mut lo = 0.0;
    let mut hi = t_end;
    for j in 1..=samples {
        let t = t_end * j as f64 / samples as f64;
        if !in_cone(t) {
            hi = t;
            break;
        }
        lo = t;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if in_cone(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(math::sqrt(2.0 * lo)))
}

/// Root of an increasing `b` on `[lo, hi]` with `b(lo) <= c0 < b(hi)`.
fn bracket_and_polish(b: impl Fn(f64) -> f64, db: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, c0: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = b(mid) - c0;
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi && math::abs(v) <= tol {
            break;
        }
    }
    let mut h = 0.5 * (lo + hi);
    for _ in 0..8 {
        let d = db(h);
        if !(d > 0.0) {
            break;
        }
        let next = h - (b(h) - c0) / d;
        if !(next >= lo && next <= hi) || next == h {
            break;
        }
        h = next;
    }
    h
}

fn blend(j0: &Jet, j1: &Jet, t: f64) -> Jet {
    &j1.scale(t) + &j0.scale(1.0 - t)
}

/// `a_{ab}` and `b_n` at a boundary point for the path
/// `u_t = t u1 + (1-t) u0`, by `nodes`-point Gauss-Legendre in `t`.
pub fn linearization_coeffs(u0: &dyn ScalarField, u1: &dyn ScalarField, x: &[f64], k: usize, nodes: usize) -> Result<LinCoeffs> {
    check_boundary_point(u0, x)?;
    if u1.dim() != u0.dim() {
        return Err(Error::Precondition("u0 and u1 have different dimensions".into()));
    }
    let n = u0.dim();
    check_nk(n, k)?;
    quadrature::check_nodes(nodes)?;
    let j0 = u0.jet(x)?;
    let j1 = u1.jet(x)?;
    let rule = GaussLegendre::new(nodes)?;
    let coeffs = bk_coefficients(n, k)?;
    let nf = n as f64;
    let m = n - 1;
    let mut a_terms: Vec<Vec<f64>> = (0..m * (m + 1) / 2).map(|_| Vec::with_capacity(nodes)).collect();
    let mut b_terms = Vec::with_capacity(nodes);
    for (t, w) in rule.unit_interval() {
        let jt = blend(&j0, &j1, t);
        if !(jt.value > 0.0) {
            return Err(domain(format!("blended field is non-positive at t = {t}")));
        }
        let bj = BoundaryJet::from_jet(x, &jt);
        let u = jt.value;
        let b_star = 2.0 / (nf - 2.0) * math::powf(u, -nf / (nf - 2.0)) * symfun::sigma(&bj.a_t, k - 1)?;
        b_terms.push(w * b_star);
        let pref = 2.0 / (nf - 2.0) * math::powf(u, -(nf + 2.0) / (nf - 2.0));
        let mut a_star = SymMatrix::zeros(m);
        for s in 1..k {
            let g = symfun::sigma_gradient(&bj.a_t, s)?;
            let c = coeffs[s] * math::powi(bj.h, (2 * k - 2 * s - 1) as i32);
            a_star = &a_star + &g.scaled(c);
        }
        for (slot, v) in a_terms.iter_mut().zip(a_star.upper()) {
            slot.push(w * pref * v);
        }
    }
    let a_upper = a_terms.into_iter().map(math::compensated_sum).collect();
    Ok(LinCoeffs {
        a: SymMatrix::from_upper(m, a_upper)?,
        b_n: math::compensated_sum(b_terms),
        quadrature_nodes: nodes,
    })
}

/// Tolerance on the jet of `psi = u1 - u0` at the check point.
pub const JET_PRECONDITION_TOL: f64 = 1e-12;

/// Checks `B_k(u1) - B_k(u0) = -b_n psi_n - a_{ab} psi_{ab}` at a boundary
/// point where `psi`, and its tangential gradient vanish, which removes the
/// `b_a psi_a` and `c psi` terms exactly.
pub fn verify_linearization(u0: &dyn ScalarField, u1: &dyn ScalarField, x: &[f64], k: usize) -> Result<CheckReport> {
    verify_linearization_with(u0, u1, x, k, DEFAULT_NODES)
}

pub fn verify_linearization_with(u0: &dyn ScalarField, u1: &dyn ScalarField, x: &[f64], k: usize, nodes: usize) -> Result<CheckReport> {
    check_boundary_point(u0, x)?;
    let n = u0.dim();
    check_nk(n, k)?;
    let psi = &u1.jet(x)? - &u0.jet(x)?;
    if math::abs(psi.value) > JET_PRECONDITION_TOL {
        return Err(Error::Precondition(format!("psi(x') = {} does not vanish", psi.value)));
    }
    if let Some(a) = (0..n - 1).find(|&a| math::abs(psi.grad[a]) > JET_PRECONDITION_TOL) {
        return Err(Error::Precondition(format!(
            "tangential derivative psi_{} = {} does not vanish",
            a + 1,
            psi.grad[a]
        )));
    }
    let coeffs = linearization_coeffs(u0, u1, x, k, nodes)?;
    let psi_n = psi.grad[n - 1];
    let normal_part = coeffs.b_n * psi_n;
    let tangential_part = coeffs.a.contract(&psi.hess.leading_block(n - 1));
    let delta = bk_of_field(u1, x, k)? - bk_of_field(u0, x, k)?;
    let predicted = -normal_part - tangential_part;
    let channels = match (psi_n != 0.0, psi.hess.leading_block(n - 1).max_abs() > 0.0) {
        (true, true) => "b_n+a",
        (true, false) => "b_n",
        (false, true) => "a",
        (false, false) => "zero",
    };
    Ok(CheckReport::compare(
        format!("linearization[{channels}](n={n}, k={k}, nodes={nodes})"),
        delta,
        predicted,
        math::abs(delta - predicted),
        1e-8 * (1.0 + math::abs(normal_part) + math::abs(tangential_part)),
    ))
}

/// Max coefficient change between `nodes` and `2 nodes` quadrature,
/// relative to the coefficient size.
pub fn quadrature_convergence(u0: &dyn ScalarField, u1: &dyn ScalarField, x: &[f64], k: usize, nodes: usize) -> Result<CheckReport> {
    let c1 = linearization_coeffs(u0, u1, x, k, nodes)?;
    let c2 = linearization_coeffs(u0, u1, x, k, 2 * nodes)?;
    let diff = c1.max_abs_diff(&c2);
    let scale = 1.0 + c2.a.max_abs().max(math::abs(c2.b_n));
    Ok(CheckReport::compare(
        format!("quadrature_convergence(nodes={nodes} vs {})", 2 * nodes),
        c1.b_n,
        c2.b_n,
        diff,
        1e-12 * scale,
    ))
}

/// Ellipticity of the `B_k` linearization at a single field (`u0 = u1 = u`).
///
/// Inside `Gamma_k^+` the sign of `B_k` must follow `h`; when `B_k > 0` the
/// tangential coefficient matrix must be positive-definite and `b_n > 0`.
pub fn ellipticity_report(u: &dyn ScalarField, x: &[f64], k: usize) -> Result<CheckReport> {
    check_boundary_point(u, x)?;
    let n = u.dim();
    check_nk(n, k)?;
    let name = format!("ellipticity(n={n}, k={k})");
    let cone = symfun::cone_classify(&conformal::schouten(u, x)?)?;
    if !cone.contains(k) {
        return Ok(CheckReport::info(name, 0.0, 0.0).not_applicable(format!(
            "g_u is not in Gamma_{k}^+ at the point (max_k = {})",
            cone.max_k
        )));
    }
    let bj = BoundaryJet::from_field(u, x)?;
    let bk = bk_of_jet(&bj, k)?;
    let coeffs = linearization_coeffs(u, u, x, k, 1)?;
    let min_eig = coeffs.a.min_eigenvalue();
    let sign_ok = bk.signum() == bj.h.signum() || (bk == 0.0 && bj.h == 0.0);
    let summary = format!("h = {}, B_k = {bk}, b_n = {}, min eig(a) = {min_eig}", bj.h, coeffs.b_n);
    let mut report = CheckReport {
        name,
        value: min_eig,
        reference: 0.0,
        abs_err: 0.0,
        tol: 0.0,
        pass: sign_ok,
        informational: false,
        note: None,
    };
    if bk > 0.0 {
        // k = 1 has no tangential second-order term
        let a_ok = k == 1 || coeffs.a.is_positive_definite();
        report.pass &= a_ok && coeffs.b_n > 0.0;
        report.note = Some(summary);
    } else {
        report.note = Some(format!("{summary}; B_k <= 0, only sign consistency is asserted"));
    }
    if !report.pass {
        report.abs_err = if min_eig < 0.0 { -min_eig } else { 1.0 };
    }
    Ok(report)
}
