//! Elementary symmetric functions of symmetric matrices.
//!
//! `sigma_k(A)` is the k-th elementary symmetric polynomial of the
//! eigenvalues of `A`. Everything here is computed from the trace
//! (Faddeev-LeVerrier) recursion
//!
//! ```text
//! T_0 = I,   sigma_j = tr(A T_{j-1}) / j,   T_j = sigma_j I - A T_{j-1}
//! ```
//!
//! which yields `sigma_k` and its matrix gradient `d sigma_k / dA = T_{k-1}`
//! (the Newton tensor) without any eigendecomposition.

mod combinatorics;
mod matrix;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use combinatorics::{
    binomial, boundary_coefficient, coefficient_c, double_factorial, factorial, to_f64, Rational,
};
pub(crate) use matrix::dense_mul;
pub use matrix::SymMatrix;

use crate::error::{domain, Result};
use crate::math;
use crate::report::CheckReport;

/// Largest `k` such that `sigma_1, .., sigma_k` are all strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConeLabel {
    pub max_k: usize,
    pub dim: usize,
}

impl ConeLabel {
    /// Membership in the open cone `Gamma_k^+`.
    pub fn contains(&self, k: usize) -> bool {
        k <= self.max_k
    }
}

fn check_finite(a: &SymMatrix) -> Result<()> {
    if a.is_finite() {
        Ok(())
    } else {
        Err(domain("matrix has non-finite entries"))
    }
}

/// Runs the recursion up to `upto`, returning `sigma_0..=sigma_upto` and the
/// dense Newton tensors `T_0..T_{upto-1}` when `keep_tensors`.
fn trace_recursion(a: &SymMatrix, upto: usize, keep_tensors: bool) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.dim();
    let ad = a.to_dense();
    let mut sig = Vec::with_capacity(upto + 1);
    sig.push(1.0);
    let mut tensors = Vec::new();
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        t[i * n + i] = 1.0;
    }
    for j in 1..=upto {
        let at = dense_mul(n, &ad, &t);
        let tr: f64 = (0..n).map(|i| at[i * n + i]).sum();
        let s = tr / j as f64;
        sig.push(s);
        if keep_tensors {
            tensors.push(core::mem::take(&mut t));
        }
        if j < upto {
            let mut next = at;
            for x in next.iter_mut() {
                *x = -*x;
            }
            for i in 0..n {
                next[i * n + i] += s;
            }
            t = next;
        }
    }
    (sig, tensors)
}

/// `sigma_0(A), .., sigma_dim(A)`.
pub fn sigma_all(a: &SymMatrix) -> Result<Vec<f64>> {
    check_finite(a)?;
    Ok(trace_recursion(a, a.dim(), false).0)
}

/// `sigma_k(A)`, with `sigma_0 = 1` and `sigma_dim = det A`.
pub fn sigma(a: &SymMatrix, k: usize) -> Result<f64> {
    check_finite(a)?;
    if k > a.dim() {
        return Err(domain(format!("sigma_k needs 0 <= k <= {}, got k={k}", a.dim())));
    }
    Ok(trace_recursion(a, k, false).0[k])
}

/// Matrix gradient `d sigma_k / d A_ij` treating all `dim^2` entries as
/// independent; equals the Newton tensor `T_{k-1}` and is symmetric.
pub fn sigma_gradient(a: &SymMatrix, k: usize) -> Result<SymMatrix> {
    check_finite(a)?;
    if k == 0 || k > a.dim() {
        return Err(domain(format!("sigma_gradient needs 1 <= k <= {}, got k={k}", a.dim())));
    }
    let (_, tensors) = trace_recursion(a, k, true);
    Ok(SymMatrix::from_dense_symmetrized(a.dim(), &tensors[k - 1]))
}

/// Checks `tr(d sigma_s / dA) = (m - s + 1) sigma_{s-1}(A)` for an `m x m`
/// matrix.
pub fn newton_trace_check(a: &SymMatrix, s: usize) -> Result<CheckReport> {
    let grad = sigma_gradient(a, s)?;
    let prev = sigma(a, s - 1)?;
    let lhs = grad.trace();
    let rhs = (a.dim() - s + 1) as f64 * prev;
    Ok(CheckReport::compare(
        format!("newton_trace(m={}, s={s})", a.dim()),
        lhs,
        rhs,
        math::abs(lhs - rhs),
        1e-10 * (1.0 + math::abs(prev)),
    ))
}

/// Strict sign test on the computed `sigma_j`; no tolerance, the cone is open.
pub fn cone_classify(a: &SymMatrix) -> Result<ConeLabel> {
    let sig = sigma_all(a)?;
    let max_k = sig[1..].iter().take_while(|&&s| s > 0.0).count();
    Ok(ConeLabel { max_k, dim: a.dim() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn sigma_examples() {
        assert_close(sigma(&SymMatrix::from_diag(&[1.0, 2.0, 3.0]), 2).unwrap(), 11.0, 1e-13);
        assert_close(sigma(&SymMatrix::scaled_identity(4, 2.0), 2).unwrap(), 24.0, 1e-13);
        assert_close(sigma(&SymMatrix::identity(3), 3).unwrap(), 1.0, 1e-14);
        assert_close(sigma(&SymMatrix::from_diag(&[-1.0, 3.0, 3.0]), 3).unwrap(), -9.0, 1e-13);
        assert_eq!(sigma(&SymMatrix::from_diag(&[5.0, 7.0]), 0).unwrap(), 1.0);
    }

    #[test]
    fn sigma_rejects_bad_input() {
        let a = SymMatrix::identity(3);
        assert!(sigma(&a, 4).is_err());
        assert!(sigma_gradient(&a, 0).is_err());
        let mut bad = SymMatrix::identity(2);
        bad.set(0, 1, f64::NAN);
        assert!(sigma(&bad, 1).is_err());
        assert!(cone_classify(&bad).is_err());
    }

    #[test]
    fn gradient_examples() {
        let a = SymMatrix::from_upper(3, vec![0.3, -1.2, 2.0, 4.0, 0.5, -0.7]).unwrap();
        assert!(sigma_gradient(&a, 1).unwrap().max_abs_diff(&SymMatrix::identity(3)) < 1e-15);
        let i3 = SymMatrix::identity(3);
        assert!(sigma_gradient(&i3, 3).unwrap().max_abs_diff(&i3) < 1e-15);
        // 2I_3, k=2 -> 4 I_3 (frozen from central differences of sigma, h=1e-5)
        let g = sigma_gradient(&SymMatrix::scaled_identity(3, 2.0), 2).unwrap();
        assert!(g.max_abs_diff(&SymMatrix::scaled_identity(3, 4.0)) < 1e-13);
    }

    #[test]
    fn newton_trace_examples() {
        let r = newton_trace_check(&SymMatrix::identity(3), 1).unwrap();
        assert!(r.pass && r.value == 3.0);
        let r = newton_trace_check(&SymMatrix::scaled_identity(3, 2.0), 2).unwrap();
        assert!(r.pass);
        assert_close(r.value, 12.0, 1e-13);
    }

    #[test]
    fn cone_examples() {
        assert_eq!(cone_classify(&SymMatrix::scaled_identity(5, 2.0)).unwrap().max_k, 5);
        assert_eq!(cone_classify(&SymMatrix::zeros(4)).unwrap().max_k, 0);
        let lbl = cone_classify(&SymMatrix::from_diag(&[-1.0, 3.0, 3.0])).unwrap();
        assert_eq!(lbl.max_k, 2);
        assert!(lbl.contains(2) && !lbl.contains(3));
    }
}
