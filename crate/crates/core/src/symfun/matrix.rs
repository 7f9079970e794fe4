use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{domain, Result};
use crate::math;

/// Dense real symmetric matrix with packed upper-triangle storage.
///
/// Symmetry is structural: `get(i, j)` and `get(j, i)` read the same slot.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

#[inline]
fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "SymMatrix dimension must be at least 1");
        SymMatrix { dim, data: vec![0.0; packed_len(dim)] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from a row-major upper triangle `a00, a01, .., a0m, a11, ..`.
    pub fn from_upper(dim: usize, upper: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(domain("matrix dimension must be at least 1"));
        }
        if upper.len() != packed_len(dim) {
            return Err(domain(alloc::format!(
                "upper triangle of a {dim}x{dim} matrix needs {} entries, got {}",
                packed_len(dim),
                upper.len()
            )));
        }
        Ok(SymMatrix { dim, data: upper })
    }

    /// Symmetric part of a dense row-major `dim x dim` array.
    pub fn from_dense_symmetrized(dim: usize, dense: &[f64]) -> Self {
        debug_assert_eq!(dense.len(), dim * dim);
        Self::from_fn(dim, |i, j| 0.5 * (dense[i * dim + j] + dense[j * dim + i]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.dim - i * (i + 1) / 2 + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.index(i, j);
        self.data[idx] = v;
    }

    /// Packed upper triangle, row-major.
    pub fn upper(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn upper_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymMatrix { dim: self.dim, data: self.data.iter().map(|x| c * x).collect() }
    }

    /// `self + c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            let v = m.get(i, i) + c;
            m.set(i, i, v);
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(math::abs(*x)))
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max(math::abs(a - b)))
    }

    /// Full contraction `sum_{i,j} A_ij B_ij` (off-diagonal pairs counted twice).
    pub fn contract(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    /// Top-left `m x m` block.
    pub fn leading_block(&self, m: usize) -> SymMatrix {
        assert!(m >= 1 && m <= self.dim);
        SymMatrix::from_fn(m, |i, j| self.get(i, j))
    }

    /// `true` iff an unpivoted Cholesky factorization succeeds with strictly
    /// positive pivots.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.dim;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for p in 0..j {
                d -= l[j * n + p] * l[j * n + p];
            }
            if !(d > 0.0) {
                return false;
            }
            let djj = math::sqrt(d);
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for p in 0..j {
                    s -= l[i * n + p] * l[j * n + p];
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }

    /// Eigenvalues in ascending order (cyclic Jacobi rotations).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = self.to_dense();
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[i * n + j] * a[i * n + j];
                }
            }
            if off <= 1e-30 * (1.0 + self.max_abs() * self.max_abs()) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (math::abs(theta) + math::sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / math::sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        ev.sort_by(|x, y| x.total_cmp(y));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `P A P^T` for a dense row-major `P`.
    pub fn congruence(&self, p: &[f64]) -> SymMatrix {
        let n = self.dim;
        let a = self.to_dense();
        let pa = dense_mul(n, p, &a);
        let mut pt = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                pt[i * n + j] = p[j * n + i];
            }
        }
        SymMatrix::from_dense_symmetrized(n, &dense_mul(n, &pa, &pt))
    }
}

/// Row-major dense product of two `n x n` arrays.
pub(crate) fn dense_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, rhs.dim);
        SymMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, rhs.dim);
        SymMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, c: f64) -> SymMatrix {
        self.scaled(c)
    }
}

impl Neg for &SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        self.scaled(-1.0)
    }
}
