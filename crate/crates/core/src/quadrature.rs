//! Gauss-Legendre quadrature.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on `[-1, 1]`, nodes ascending. Exact for polynomials
    /// of degree `2n - 1`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("Gauss-Legendre rule needs at least one node"));
        }
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 0..n {
            // Tricomi initial guess, descending in i
            let mut x = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if math::abs(dx) <= 1e-16 * (1.0 + math::abs(x)) {
                    dp = legendre(n, x).1;
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        nodes.reverse();
        weights.reverse();
        // enforce exact symmetry
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            let w = 0.5 * (weights[i] + weights[j]);
            nodes[i] = -x;
            nodes[j] = x;
            weights[i] = w;
            weights[j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(t, w)` pairs mapped to `[0, 1]`.
    pub fn unit_interval(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * math::compensated_sum(self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mid + half * x)))
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub(crate) fn check_nodes(nodes: usize) -> Result<()> {
    if nodes == 0 || nodes > 4096 {
        return Err(domain(format!("quadrature node count must be in 1..=4096, got {nodes}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_rule_is_exact() {
        for n in [1, 2, 5, 16, 64, 128] {
            let g = GaussLegendre::new(n).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
            // degree 2n-1 monomial integral on [0,1] is 1/(2n)
            let deg = 2 * n - 1;
            let val = g.integrate(0.0, 1.0, |t| math::powi(t, deg as i32));
            assert!((val - 1.0 / (2 * n) as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn three_point_nodes() {
        let g = GaussLegendre::new(3).unwrap();
        let r = (0.6f64).sqrt();
        assert!((g.nodes()[0] + r).abs() < 1e-15 && (g.nodes()[2] - r).abs() < 1e-15);
        assert!((g.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_integrand_converges() {
        let g = GaussLegendre::new(64).unwrap();
        let v = g.integrate(0.0, 1.0, libm::exp);
        assert!((v - (core::f64::consts::E - 1.0)).abs() < 1e-14);
    }
}
