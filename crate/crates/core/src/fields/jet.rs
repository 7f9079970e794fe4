//! Second-order forward-mode automatic differentiation.
//!
//! A [`Jet`] carries a value together with its full gradient and Hessian
//! with respect to `n` seed variables. Arithmetic propagates both levels
//! exactly, so a scalar field written in terms of jets yields exact
//! derivatives at a point in `O(n^2)` work per operation.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{domain, Result};
use crate::math;
use crate::symfun::SymMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: SymMatrix,
}

impl Jet {
    pub fn constant(n: usize, c: f64) -> Self {
        Jet { value: c, grad: vec![0.0; n], hess: SymMatrix::zeros(n) }
    }

    /// The coordinate function `x_i` at a point where it equals `x`.
    pub fn variable(n: usize, i: usize, x: f64) -> Self {
        let mut j = Jet::constant(n, x);
        j.grad[i] = 1.0;
        j
    }

    /// Seeds all `n` coordinates of `x`.
    pub fn variables(x: &[f64]) -> Vec<Jet> {
        (0..x.len()).map(|i| Jet::variable(x.len(), i, x[i])).collect()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite()) && self.hess.is_finite()
    }

    /// `f(self)` given `f`, `f'`, `f''` evaluated at `self.value`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let n = self.dim();
        let grad: Vec<f64> = self.grad.iter().map(|g| f1 * g).collect();
        let mut hess = self.hess.scaled(f1);
        if f2 != 0.0 {
            for i in 0..n {
                for j in i..n {
                    let v = hess.get(i, j) + f2 * self.grad[i] * self.grad[j];
                    hess.set(i, j, v);
                }
            }
        }
        Jet { value: f0, grad, hess }
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            value: c * self.value,
            grad: self.grad.iter().map(|g| c * g).collect(),
            hess: self.hess.scaled(c),
        }
    }

    pub fn add_const(&self, c: f64) -> Jet {
        let mut j = self.clone();
        j.value += c;
        j
    }

    pub fn exp(&self) -> Jet {
        let e = math::exp(self.value);
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Result<Jet> {
        let a = self.value;
        if !(a > 0.0) {
            return Err(domain(alloc::format!("ln of non-positive value {a}")));
        }
        Ok(self.chain(math::ln(a), 1.0 / a, -1.0 / (a * a)))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a = self.value;
        if !(a > 0.0) {
            return Err(domain(alloc::format!("sqrt of non-positive value {a}")));
        }
        let s = math::sqrt(a);
        Ok(self.chain(s, 0.5 / s, -0.25 / (s * a)))
    }

    pub fn abs(&self) -> Result<Jet> {
        let a = self.value;
        if a == 0.0 || !a.is_finite() {
            return Err(domain("abs is not differentiable at 0"));
        }
        let sgn = a.signum();
        Ok(self.chain(math::abs(a), sgn, 0.0))
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.value;
        if a == 0.0 {
            return Err(domain("division by zero"));
        }
        let r = 1.0 / a;
        Ok(self.chain(r, -r * r, 2.0 * r * r * r))
    }

    /// `self^p` for an integer `p`; any sign of base, base 0 only for `p >= 0`.
    pub fn powi(&self, p: i32) -> Result<Jet> {
        let a = self.value;
        if p == 0 {
            return Ok(Jet::constant(self.dim(), 1.0));
        }
        if a == 0.0 && p < 0 {
            return Err(domain("zero raised to a negative power"));
        }
        let pf = p as f64;
        let f1 = if p == 1 { 1.0 } else { pf * math::powi(a, p - 1) };
        let f2 = match p {
            1 => 0.0,
            2 => 2.0,
            _ => pf * (pf - 1.0) * math::powi(a, p - 2),
        };
        Ok(self.chain(math::powi(a, p), f1, f2))
    }

    /// `self^p` for a real `p`; requires a positive base.
    pub fn powf(&self, p: f64) -> Result<Jet> {
        let a = self.value;
        if !(a > 0.0) {
            return Err(domain(alloc::format!("non-integer power of non-positive base {a}")));
        }
        let v = math::powf(a, p);
        Ok(self.chain(v, p * v / a, p * (p - 1.0) * v / (a * a)))
    }

    /// `self^e = exp(e ln self)` for a jet exponent; requires a positive base.
    pub fn pow(&self, e: &Jet) -> Result<Jet> {
        Ok((&self.ln()? * e).exp())
    }

    /// Chain rule through a map: `outer` is the jet of `f` at `z0 = z(y0)` in
    /// the `z` variables, `inner[i]` is the jet of `z_i` in the `y` variables.
    /// Returns the jet of `f(z(y))` at `y0`.
    pub fn compose(outer: &Jet, inner: &[Jet]) -> Jet {
        let m = outer.dim();
        assert_eq!(m, inner.len(), "compose: outer dimension must match inner count");
        let n = inner.first().map_or(0, Jet::dim);
        let mut grad = vec![0.0; n];
        let mut hess = SymMatrix::zeros(n);
        for (i, zi) in inner.iter().enumerate() {
            let gi = outer.grad[i];
            for j in 0..n {
                grad[j] += gi * zi.grad[j];
            }
            if gi != 0.0 {
                for (h, z) in hess.upper_mut().iter_mut().zip(zi.hess.upper()) {
                    *h += gi * z;
                }
            }
        }
        // sum_{i,l} H_il dz_i/dy_j dz_l/dy_k
        let mut w = vec![0.0; m * n];
        for i in 0..m {
            for l in 0..m {
                let hil = outer.hess.get(i, l);
                if hil == 0.0 {
                    continue;
                }
                for k in 0..n {
                    w[i * n + k] += hil * inner[l].grad[k];
                }
            }
        }
        for j in 0..n {
            for k in j..n {
                let mut s = 0.0;
                for i in 0..m {
                    s += inner[i].grad[j] * w[i * n + k];
                }
                let v = hess.get(j, k) + s;
                hess.set(j, k, v);
            }
        }
        Jet { value: outer.value, grad, hess }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet {
            value: self.value + rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a + b).collect(),
            hess: &self.hess + &rhs.hess,
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet {
            value: self.value - rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a - b).collect(),
            hess: &self.hess - &rhs.hess,
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.dim();
        let (a, b) = (self.value, rhs.value);
        let grad = self.grad.iter().zip(&rhs.grad).map(|(ga, gb)| a * gb + b * ga).collect();
        let mut hess = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = a * rhs.hess.get(i, j)
                    + b * self.hess.get(i, j)
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
                hess.set(i, j, v);
            }
        }
        Jet { value: a * b, grad, hess }
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Div for &Jet {
    type Output = Result<Jet>;
    fn div(self, rhs: &Jet) -> Result<Jet> {
        Ok(self * &rhs.recip()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        // f = x*y^2 / (1 + x) at (2, 3)
        let v = Jet::variables(&[2.0, 3.0]);
        let num = &v[0] * &(&v[1] * &v[1]);
        let f = (&num / &v[0].add_const(1.0)).unwrap();
        assert!((f.value - 6.0).abs() < 1e-14);
        // df/dx = y^2/(1+x)^2 = 1, df/dy = 2xy/(1+x) = 4
        assert!((f.grad[0] - 1.0).abs() < 1e-14);
        assert!((f.grad[1] - 4.0).abs() < 1e-14);
        // d2f/dx2 = -2y^2/(1+x)^3 = -2/3, d2f/dxdy = 2y/(1+x)^2 = 2/3, d2f/dy2 = 2x/(1+x) = 4/3
        assert!((f.hess.get(0, 0) + 2.0 / 3.0).abs() < 1e-14);
        assert!((f.hess.get(0, 1) - 2.0 / 3.0).abs() < 1e-14);
        assert!((f.hess.get(1, 1) - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn powi_handles_zero_and_negative_bases() {
        let x = Jet::variable(1, 0, 0.0);
        let sq = x.powi(2).unwrap();
        assert_eq!((sq.value, sq.grad[0], sq.hess.get(0, 0)), (0.0, 0.0, 2.0));
        let lin = x.powi(1).unwrap();
        assert_eq!((lin.value, lin.grad[0], lin.hess.get(0, 0)), (0.0, 1.0, 0.0));
        assert!(x.powi(-1).is_err());
        let y = Jet::variable(1, 0, -2.0).powi(3).unwrap();
        assert_eq!((y.value, y.grad[0], y.hess.get(0, 0)), (-8.0, 12.0, -12.0));
    }

    #[test]
    fn compose_matches_direct_evaluation() {
        // f(z) = z0 * z1 composed with z = (y0 + y1, y0 * y1) equals y0^2 y1 + y0 y1^2
        let y = Jet::variables(&[1.5, -0.5]);
        let z = [&y[0] + &y[1], &y[0] * &y[1]];
        let zv = Jet::variables(&[z[0].value, z[1].value]);
        let outer = &zv[0] * &zv[1];
        let composed = Jet::compose(&outer, &z);
        let direct = &z[0] * &z[1];
        assert!((composed.value - direct.value).abs() < 1e-15);
        for i in 0..2 {
            assert!((composed.grad[i] - direct.grad[i]).abs() < 1e-14);
        }
        assert!(composed.hess.max_abs_diff(&direct.hess) < 1e-14);
    }

    #[test]
    fn ln_and_sqrt_domain() {
        let x = Jet::variable(1, 0, -1.0);
        assert!(x.ln().is_err());
        assert!(x.sqrt().is_err());
        assert!(Jet::variable(1, 0, 0.0).abs().is_err());
    }
}
