//! Central finite differences with one Richardson step.
//!
//! Used as the derivative fallback for value-only fields and for checks that
//! compare an analytic derivative against a difference quotient.

use alloc::vec::Vec;

use crate::error::Result;
use crate::symfun::SymMatrix;

/// `(4 D(h/2) - D(h)) / 3` with `D` the central difference; error `O(h^4)`.
pub fn derivative(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let d = |s: f64| -> Result<f64> { Ok((f(x + s)? - f(x - s)?) / (2.0 * s)) };
    let coarse = d(h)?;
    let fine = d(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(i, s) in moves {
        y[i] += s;
    }
    y
}

fn gradient_at(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], h: f64) -> Result<Vec<f64>> {
    (0..x.len())
        .map(|i| Ok((f(&shifted(x, &[(i, h)]))? - f(&shifted(x, &[(i, -h)]))?) / (2.0 * h)))
        .collect()
}

fn hessian_at(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], h: f64) -> Result<SymMatrix> {
    let n = x.len();
    let f0 = f(x)?;
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        let v = (f(&shifted(x, &[(i, h)]))? - 2.0 * f0 + f(&shifted(x, &[(i, -h)]))?) / (h * h);
        m.set(i, i, v);
        for j in (i + 1)..n {
            let pp = f(&shifted(x, &[(i, h), (j, h)]))?;
            let pm = f(&shifted(x, &[(i, h), (j, -h)]))?;
            let mp = f(&shifted(x, &[(i, -h), (j, h)]))?;
            let mm = f(&shifted(x, &[(i, -h), (j, -h)]))?;
            m.set(i, j, (pp - pm - mp + mm) / (4.0 * h * h));
        }
    }
    Ok(m)
}

pub fn gradient(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let coarse = gradient_at(f, x, h)?;
    let fine = gradient_at(f, x, 0.5 * h)?;
    Ok(fine.iter().zip(&coarse).map(|(a, b)| (4.0 * a - b) / 3.0).collect())
}

pub fn hessian(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], h: f64) -> Result<SymMatrix> {
    let coarse = hessian_at(f, x, h)?;
    let fine = hessian_at(f, x, 0.5 * h)?;
    Ok(&fine.scaled(4.0 / 3.0) - &coarse.scaled(1.0 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_is_fourth_order() {
        let d = derivative(|x| Ok(libm::sin(x)), 0.7, 1e-2).unwrap();
        assert!((d - libm::cos(0.7)).abs() < 1e-10);
    }

    #[test]
    fn polynomial_hessian() {
        let f = |x: &[f64]| -> Result<f64> { Ok(x[0] * x[0] * x[1] + 3.0 * x[1] * x[1]) };
        let h = hessian(&f, &[1.0, 2.0], 1e-3).unwrap();
        assert!((h.get(0, 0) - 4.0).abs() < 1e-7);
        assert!((h.get(0, 1) - 2.0).abs() < 1e-7);
        assert!((h.get(1, 1) - 6.0).abs() < 1e-7);
    }
}
