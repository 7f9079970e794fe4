//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use conflab_core::fields::{parse_field, Field};
use conflab_core::symfun::SymMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let m = a.len();
    let mut d = 1.0;
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..m {
            let f = a[r][c] / a[c][c];
            for cc in c..m {
                a[r][cc] -= f * a[c][cc];
            }
        }
    }
    d
}

/// `sigma_k` as the sum of all `k x k` principal minors.
pub fn sigma_by_minors(a: &SymMatrix, k: usize) -> f64 {
    let n = a.dim();
    if k == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub = idx.iter().map(|&i| idx.iter().map(|&j| a.get(i, j)).collect()).collect();
        total += det(sub);
    }
    total
}

pub fn random_sym(r: &mut ChaCha8Rng, dim: usize, scale: f64) -> SymMatrix {
    SymMatrix::from_fn(dim, |_, _| scale * r.random_range(-1.0..1.0))
}

/// Orthogonal matrix (row-major) from Gram-Schmidt on a random matrix.
pub fn random_orthogonal(r: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..1.0)).collect();
        for q in &rows {
            let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= d * qi;
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            rows.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    rows.concat()
}

/// `P diag(d) P^T` with `P` random orthogonal.
pub fn rotate_diag(r: &mut ChaCha8Rng, diag: &[f64]) -> SymMatrix {
    let p = random_orthogonal(r, diag.len());
    SymMatrix::from_diag(diag).congruence(&p)
}

/// Diagonally dominant matrix with positive diagonal: in every cone.
pub fn dominant_matrix(r: &mut ChaCha8Rng, dim: usize) -> SymMatrix {
    let off = 0.4 / dim as f64;
    SymMatrix::from_fn(dim, |i, j| if i == j { r.random_range(0.5..2.0) } else { off * r.random_range(-1.0..1.0) })
}

/// Matrix in `Gamma_k^+` that need not be positive-definite: random
/// eigenvalues in `[-0.6, 2]` rejected until the cone condition holds.
pub fn cone_matrix(r: &mut ChaCha8Rng, dim: usize, k: usize) -> SymMatrix {
    loop {
        let diag: Vec<f64> = (0..dim).map(|_| r.random_range(-0.6..2.0)).collect();
        let a = rotate_diag(r, &diag);
        let sig = conflab_core::symfun::sigma_all(&a).unwrap();
        if (1..=k).all(|s| sig[s] > 1e-3) {
            return a;
        }
    }
}

/// Five-point central difference.
pub fn fd1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Central-difference gradient and Hessian of a value function, Richardson
/// extrapolated from steps `h` and `h/2`.
pub fn fd_jet(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = x.len();
    let at = |d: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, s) in d {
            y[i] += s;
        }
        f(&y)
    };
    let grad_step = |s: f64| -> Vec<f64> { (0..n).map(|i| (at(&[(i, s)]) - at(&[(i, -s)])) / (2.0 * s)).collect() };
    let hess_step = |s: f64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            (at(&[(i, s)]) - 2.0 * f(x) + at(&[(i, -s)])) / (s * s)
                        } else {
                            (at(&[(i, s), (j, s)]) - at(&[(i, s), (j, -s)]) - at(&[(i, -s), (j, s)])
                                + at(&[(i, -s), (j, -s)]))
                                / (4.0 * s * s)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let (g1, g2) = (grad_step(h), grad_step(h / 2.0));
    let (h1, h2) = (hess_step(h), hess_step(h / 2.0));
    let g = g1.iter().zip(&g2).map(|(a, b)| (4.0 * b - a) / 3.0).collect();
    let hs = h1
        .iter()
        .zip(&h2)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| (4.0 * b - a) / 3.0).collect())
        .collect();
    (g, hs)
}

fn coef(r: &mut ChaCha8Rng, s: f64) -> String {
    format!("{:.4}", s * r.random_range(-1.0..1.0))
}

/// Random smooth field, positive on all of `R^n`.
pub fn random_positive_expr(r: &mut ChaCha8Rng, n: usize) -> String {
    let lin: Vec<String> = (1..=n).map(|i| format!("{}*x{i}", coef(r, 0.3))).collect();
    let i = r.random_range(1..=n);
    let j = r.random_range(1..=n);
    let quad: Vec<String> = (1..=n).map(|i| format!("{:.4}*x{i}^2", r.random_range(0.05..0.4))).collect();
    let p = r.random_range(0.2..0.8);
    let c = r.random_range(0.5..1.5);
    match r.random_range(0..3) {
        0 => format!("{c:.4} + exp({} + {}*x{i}*x{j})", lin.join(" + "), coef(r, 0.1)),
        1 => format!("(1 + {})^(-{p:.4}) * exp({})", quad.join(" + "), lin.join(" + ")),
        _ => format!("sqrt({c:.4} + {}) + {:.4}*exp({})", quad.join(" + "), r.random_range(0.1..0.5), lin.join(" + ")),
    }
}

pub fn random_positive_field(r: &mut ChaCha8Rng, n: usize) -> (String, Field) {
    let src = random_positive_expr(r, n);
    let f = parse_field(&src, n).unwrap_or_else(|e| panic!("{src}: {e}"));
    (src, f)
}

pub fn random_point(r: &mut ChaCha8Rng, n: usize, scale: f64, boundary: bool) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n - 1).map(|_| scale * r.random_range(-1.0..1.0)).collect();
    x.push(if boundary { 0.0 } else { scale * r.random_range(0.05..1.0) });
    x
}

pub fn value_fn(u: &Field) -> impl Fn(&[f64]) -> f64 + '_ {
    move |x: &[f64]| u.value(x).unwrap()
}
