//! Pointwise curvature of `g_u = u^{4/(n-2)} |dx|^2`.
//!
//! All tensors are (1,1)-tensors `g_u^{-1} A_{g_u}`:
//!
//! ```text
//! A = -2/(n-2) u^{-(n+2)/(n-2)} D^2 u
//!     + 2n/(n-2)^2 u^{-2n/(n-2)} Du (x) Du
//!     - 2/(n-2)^2 u^{-2n/(n-2)} |Du|^2 I
//! ```
//!
//! On `x_n = 0` the tangential block `A^T` keeps the full `|Du|^2` in its
//! trace term, and the mean curvature is `h = -2/(n-2) u^{-n/(n-2)} u_n`, so
//! that `A^T = M - h^2/2 I` with `M` built from tangential data only.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::fields::{Jet, ScalarField};
use crate::math;
use crate::report::CheckReport;
use crate::symfun::{self, ConeLabel, SymMatrix};

/// Curvature data at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePoint {
    pub location: Vec<f64>,
    pub a: SymMatrix,
    /// `sigma_1..=sigma_k` of `a`.
    pub sigma_values: Vec<f64>,
    pub cone: ConeLabel,
}

/// Everything `B_k` needs at a boundary point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryJet {
    pub location: Vec<f64>,
    pub u_val: f64,
    pub grad: Vec<f64>,
    pub tangential_hessian: SymMatrix,
    pub a_t: SymMatrix,
    pub h: f64,
}

impl BoundaryJet {
    pub fn from_field(u: &dyn ScalarField, x: &[f64]) -> Result<Self> {
        check_boundary_point(u, x)?;
        let jet = u.jet(x)?;
        Ok(Self::from_jet(x, &jet))
    }

    pub(crate) fn from_jet(x: &[f64], jet: &Jet) -> Self {
        let n = jet.dim();
        BoundaryJet {
            location: x.to_vec(),
            u_val: jet.value,
            grad: jet.grad.clone(),
            tangential_hessian: jet.hess.leading_block(n - 1),
            a_t: tangential_from_jet(jet),
            h: mean_curvature_from_jet(jet),
        }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// `h` recomputed from `u` and `u_n`.
    pub fn recompute_h(&self) -> f64 {
        let n = self.dim() as f64;
        -2.0 / (n - 2.0) * math::powf(self.u_val, -n / (n - 2.0)) * self.grad[self.dim() - 1]
    }

    /// `M = A^T + h^2/2 I`, which depends only on tangential data.
    pub fn m_matrix(&self) -> SymMatrix {
        self.a_t.shifted(0.5 * self.h * self.h)
    }
}

fn dimension_of(u: &dyn ScalarField) -> Result<usize> {
    let n = u.dim();
    if n < 3 {
        return Err(domain(format!("conformal curvature needs n >= 3, got {n}")));
    }
    Ok(n)
}

pub(crate) fn check_boundary_point(u: &dyn ScalarField, x: &[f64]) -> Result<()> {
    let n = dimension_of(u)?;
    if x.len() != n {
        return Err(Error::Precondition(format!("boundary point needs {n} coordinates, got {}", x.len())));
    }
    if math::abs(x[n - 1]) > 1e-12 {
        return Err(Error::Precondition(format!("boundary point must have x_n = 0, got {}", x[n - 1])));
    }
    Ok(())
}

/// `u^p` for `u > 0` through `exp(p ln u)`.
#[inline]
fn upow(u: f64, p: f64) -> f64 {
    math::exp(p * math::ln(u))
}

pub fn schouten_from_jet(jet: &Jet) -> SymMatrix {
    let n = jet.dim();
    let nf = n as f64;
    let u = jet.value;
    let c_hess = -2.0 / (nf - 2.0) * upow(u, -(nf + 2.0) / (nf - 2.0));
    let w = upow(u, -2.0 * nf / (nf - 2.0)) / ((nf - 2.0) * (nf - 2.0));
    let grad2: f64 = jet.grad.iter().map(|g| g * g).sum();
    SymMatrix::from_fn(n, |i, j| {
        let mut v = c_hess * jet.hess.get(i, j) + 2.0 * nf * w * jet.grad[i] * jet.grad[j];
        if i == j {
            v -= 2.0 * w * grad2;
        }
        v
    })
}

pub(crate) fn tangential_from_jet(jet: &Jet) -> SymMatrix {
    let n = jet.dim();
    let nf = n as f64;
    let u = jet.value;
    let c_hess = -2.0 / (nf - 2.0) * upow(u, -(nf + 2.0) / (nf - 2.0));
    let w = upow(u, -2.0 * nf / (nf - 2.0)) / ((nf - 2.0) * (nf - 2.0));
    let grad2: f64 = jet.grad.iter().map(|g| g * g).sum();
    let trace_term = -2.0 * w * grad2;
    let mut bracket = SymMatrix::from_fn(n - 1, |a, b| {
        c_hess * jet.hess.get(a, b) + 2.0 * nf * w * jet.grad[a] * jet.grad[b]
    });
    bracket = bracket.shifted(trace_term);
    bracket
}

pub(crate) fn mean_curvature_from_jet(jet: &Jet) -> f64 {
    let nf = jet.dim() as f64;
    -2.0 / (nf - 2.0) * upow(jet.value, -nf / (nf - 2.0)) * jet.grad[jet.dim() - 1]
}

/// `g_u^{-1} A_{g_u}` at `x`.
pub fn schouten(u: &dyn ScalarField, x: &[f64]) -> Result<SymMatrix> {
    dimension_of(u)?;
    Ok(schouten_from_jet(&u.jet(x)?))
}

/// Tangential block `A^T` (dimension `n-1`) at a boundary point.
pub fn tangential_schouten(u: &dyn ScalarField, x: &[f64]) -> Result<SymMatrix> {
    check_boundary_point(u, x)?;
    Ok(tangential_from_jet(&u.jet(x)?))
}

/// Mean curvature of `x_n = 0` under `g_u`; positive for the bubbles
/// centred below the boundary.
pub fn mean_curvature(u: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    check_boundary_point(u, x)?;
    Ok(mean_curvature_from_jet(&u.jet(x)?))
}

pub fn boundary_jet(u: &dyn ScalarField, x: &[f64]) -> Result<BoundaryJet> {
    BoundaryJet::from_field(u, x)
}

pub fn sigma_k_curvature(u: &dyn ScalarField, x: &[f64], k: usize) -> Result<f64> {
    let n = dimension_of(u)?;
    if k == 0 || k > n {
        return Err(domain(format!("sigma_k curvature needs 1 <= k <= {n}, got {k}")));
    }
    symfun::sigma(&schouten(u, x)?, k)
}

pub fn curvature_point(u: &dyn ScalarField, x: &[f64], k: usize) -> Result<CurvaturePoint> {
    let n = dimension_of(u)?;
    if k == 0 || k > n {
        return Err(domain(format!("curvature_point needs 1 <= k <= {n}, got {k}")));
    }
    let a = schouten(u, x)?;
    let all = symfun::sigma_all(&a)?;
    let max_k = all[1..].iter().take_while(|&&s| s > 0.0).count();
    Ok(CurvaturePoint {
        location: x.to_vec(),
        sigma_values: all[1..=k].to_vec(),
        cone: ConeLabel { max_k, dim: n },
        a,
    })
}

/// `A[W] = -D^2 W + DW (x) DW - |DW|^2/2 I` with `W = 2/(n-2) ln u`, the
/// Schouten form of `e^{2W} |dx|^2` before raising the index.
pub fn log_schouten(u: &dyn ScalarField, x: &[f64]) -> Result<SymMatrix> {
    let n = dimension_of(u)?;
    let w = u.jet(x)?.ln()?.scale(2.0 / (n as f64 - 2.0));
    let grad2: f64 = w.grad.iter().map(|g| g * g).sum();
    Ok(SymMatrix::from_fn(n, |i, j| {
        let mut v = -w.hess.get(i, j) + w.grad[i] * w.grad[j];
        if i == j {
            v -= 0.5 * grad2;
        }
        v
    }))
}

/// Passes iff `g_u` is in `Gamma_k^+` at every point. The reported value is
/// the smallest `sigma_j` (`j <= k`) seen.
pub fn cone_along(u: &dyn ScalarField, points: &[Vec<f64>], k: usize) -> Result<CheckReport> {
    let mut worst = f64::INFINITY;
    let mut worst_at = 0usize;
    let mut all_in = true;
    for (idx, p) in points.iter().enumerate() {
        let cp = curvature_point(u, p, k)?;
        let margin = cp.sigma_values.iter().copied().fold(f64::INFINITY, f64::min);
        if margin < worst {
            worst = margin;
            worst_at = idx;
        }
        all_in &= cp.cone.contains(k);
    }
    let abs_err = if all_in { 0.0 } else { math::abs(worst) };
    let report = CheckReport {
        name: format!("cone_along(k={k})"),
        value: worst,
        reference: 0.0,
        abs_err,
        tol: 0.0,
        pass: all_in && !points.is_empty(),
        informational: false,
        note: None,
    };
    Ok(if all_in {
        report
    } else {
        report.with_note(format!("smallest sigma_j at sample {worst_at}: {:?}", points[worst_at]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{bubble_field, constant_field, parse_field, BubbleParams};
    use alloc::vec;

    #[test]
    fn flat_metric_has_zero_curvature() {
        let one = constant_field(4, 1.0);
        let x = [0.3, 0.1, -0.2, 0.0];
        assert_eq!(schouten(&*one, &x).unwrap().max_abs(), 0.0);
        assert_eq!(tangential_schouten(&*one, &x).unwrap().max_abs(), 0.0);
        assert_eq!(mean_curvature(&*one, &x).unwrap(), 0.0);
        assert_eq!(sigma_k_curvature(&*one, &x, 2).unwrap(), 0.0);
        assert_eq!(log_schouten(&*one, &x).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn bubble_schouten_is_twice_identity() {
        let u = bubble_field(&BubbleParams::new(5, 0.7, vec![0.2, -0.1, 0.4, 0.0, -0.8]).unwrap()).unwrap();
        let a = schouten(&*u, &[1.0, 2.0, -0.5, 0.3, 0.9]).unwrap();
        assert!(a.max_abs_diff(&SymMatrix::scaled_identity(5, 2.0)) < 1e-9);
        let at = tangential_schouten(&*u, &[1.0, 2.0, -0.5, 0.3, 0.0]).unwrap();
        assert!(at.max_abs_diff(&SymMatrix::scaled_identity(4, 2.0)) < 1e-9);
    }

    #[test]
    fn mean_curvature_by_substitution() {
        // u(x',0) = 1, u_n = -1 at the origin, n = 4: h = -(2/2) * 1 * (-1) = 1
        let u = parse_field("1 - x4", 4).unwrap();
        assert!((mean_curvature(&*u, &[0.0; 4]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_point_validation() {
        let u = constant_field(3, 1.0);
        assert!(matches!(mean_curvature(&*u, &[0.0, 0.0, 0.5]), Err(Error::Precondition(_))));
        assert!(matches!(tangential_schouten(&*u, &[0.0, 0.0]), Err(Error::Precondition(_))));
        assert!(sigma_k_curvature(&*u, &[0.0; 3], 4).is_err());
    }

    #[test]
    fn boundary_jet_decomposition() {
        let u = parse_field("exp(0.3*x1 - 0.2*x3 + 0.1*x2*x3) + x1^2", 3).unwrap();
        let bj = boundary_jet(&*u, &[0.4, -0.3, 0.0]).unwrap();
        assert!((bj.h - bj.recompute_h()).abs() < 1e-15);
        // M must not see u_n: rebuild from a field with the normal slope removed
        let tangential_only = parse_field("exp(0.3*x1 + 0.1*x2*x3) + x1^2", 3).unwrap();
        let bj2 = boundary_jet(&*tangential_only, &[0.4, -0.3, 0.0]).unwrap();
        assert!(bj.m_matrix().max_abs_diff(&bj2.m_matrix()) < 1e-12);
    }
}
