//! Positive scalar fields `u` on regions of `R^n`, queried for value,
//! gradient and Hessian at a point.
//!
//! Every production field supplies exact derivatives: closed forms for
//! bubbles, second-order forward AD ([`Jet`]) for parsed expressions, and
//! exact chain rule for inversions. [`FiniteDifferenceField`] is the
//! fallback for value-only sources.

pub mod expr;
pub mod fd;
mod jet;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use expr::ExprAst;
pub use jet::Jet;

use crate::error::{domain, Error, Result};
use crate::math;
use crate::symfun::SymMatrix;

/// Shared handle to an immutable field.
pub type Field = Arc<dyn ScalarField>;

/// Exclusion radius around inversion singularities.
pub const SINGULAR_EPS: f64 = 1e-9;

/// Slack for closed-region membership tests.
const REGION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Whole,
    /// Closed upper half-space `x_n >= 0`.
    HalfSpace,
    /// Closed ball.
    Ball { center: Vec<f64>, radius: f64 },
}

/// Where a field may be evaluated: a region minus punctured points.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub region: Region,
    pub punctures: Vec<Vec<f64>>,
    pub exclusion: f64,
}

impl Domain {
    pub fn whole() -> Self {
        Domain { region: Region::Whole, punctures: Vec::new(), exclusion: SINGULAR_EPS }
    }

    pub fn half_space() -> Self {
        Domain { region: Region::HalfSpace, ..Domain::whole() }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Domain { region: Region::Ball { center, radius }, ..Domain::whole() }
    }

    pub fn punctured(mut self, point: Vec<f64>) -> Self {
        self.punctures.push(point);
        self
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        match &self.region {
            Region::Whole => {}
            Region::HalfSpace => {
                let xn = x[x.len() - 1];
                if xn < -REGION_SLACK * (1.0 + math::norm(x)) {
                    return Err(domain(format!("point with x_n = {xn} is outside the closed half-space")));
                }
            }
            Region::Ball { center, radius } => {
                let d = math::dist(x, center);
                if d > radius * (1.0 + REGION_SLACK) {
                    return Err(domain(format!("point at distance {d} is outside the ball of radius {radius}")));
                }
            }
        }
        for p in &self.punctures {
            if math::dist(x, p) <= self.exclusion {
                return Err(domain("point lies within the exclusion radius of a singularity"));
            }
        }
        Ok(())
    }
}

/// A scalar field with exact (or fallback) first and second derivatives.
///
/// Implementors provide `eval_jet` (and optionally a faster `eval_value`)
/// assuming the point has already been validated; the provided `jet`/`value`
/// methods perform dimension, domain and positivity checks.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn domain(&self) -> &Domain;

    fn eval_jet(&self, x: &[f64]) -> Result<Jet>;

    fn eval_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval_jet(x)?.value)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Precondition(format!(
                "point has {} coordinates, field dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(domain("non-finite coordinates"));
        }
        self.domain().check(x)
    }

    /// Jet with domain checks but no sign requirement (perturbation
    /// directions may vanish or change sign).
    fn raw_jet(&self, x: &[f64]) -> Result<Jet> {
        self.check_point(x)?;
        let j = self.eval_jet(x)?;
        if !j.is_finite() {
            return Err(domain("field evaluation produced non-finite derivatives"));
        }
        Ok(j)
    }

    /// Jet of a conformal factor: requires `u(x) > 0`.
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let j = self.raw_jet(x)?;
        require_positive(j.value)?;
        Ok(j)
    }

    fn raw_value(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.eval_value(x)
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let v = self.raw_value(x)?;
        require_positive(v)?;
        Ok(v)
    }
}

fn require_positive(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("conformal factor must be positive, got {v}")))
    }
}

#[derive(Debug, Clone)]
pub struct ConstantField {
    n: usize,
    c: f64,
    domain: Domain,
}

impl ScalarField for ConstantField {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn eval_jet(&self, _x: &[f64]) -> Result<Jet> {
        Ok(Jet::constant(self.n, self.c))
    }
    fn eval_value(&self, _x: &[f64]) -> Result<f64> {
        Ok(self.c)
    }
}

pub fn constant_field(n: usize, c: f64) -> Field {
    Arc::new(ConstantField { n, c, domain: Domain::whole() })
}

/// Parameters of `u(x) = (sqrt(b) / (1 + b |x - center|^2))^{(n-2)/2}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BubbleParams {
    pub n: usize,
    pub b: f64,
    pub center: Vec<f64>,
}

impl BubbleParams {
    pub fn new(n: usize, b: f64, center: Vec<f64>) -> Result<Self> {
        let p = BubbleParams { n, b, center };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(domain(format!("bubble dimension must be >= 3, got {}", self.n)));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(domain(format!("bubble parameter b must be positive, got {}", self.b)));
        }
        if self.center.len() != self.n || !self.center.iter().all(|c| c.is_finite()) {
            return Err(domain("bubble center must be a finite point of R^n"));
        }
        Ok(())
    }

    /// Boundary mean curvature `-2 sqrt(b) center_n`, constant along `x_n = 0`.
    pub fn mean_curvature(&self) -> f64 {
        -2.0 * math::sqrt(self.b) * self.center[self.n - 1]
    }

    /// `lim |x|^{n-2} u(x) = b^{-(n-2)/4}`.
    pub fn alpha(&self) -> f64 {
        math::powf(self.b, -((self.n - 2) as f64) / 4.0)
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        let d2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        let q = 1.0 + self.b * d2;
        let p = (self.n - 2) as f64 / 2.0;
        math::powf(math::sqrt(self.b) / q, p)
    }
}

#[derive(Debug, Clone)]
pub struct BubbleField {
    params: BubbleParams,
    domain: Domain,
}

impl BubbleField {
    pub fn params(&self) -> &BubbleParams {
        &self.params
    }
}

impl ScalarField for BubbleField {
    fn dim(&self) -> usize {
        self.params.n
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn eval_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.params.value_at(x))
    }
    fn eval_jet(&self, x: &[f64]) -> Result<Jet> {
        let BubbleParams { n, b, ref center } = self.params;
        let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
        let q = 1.0 + b * d.iter().map(|v| v * v).sum::<f64>();
        let p = (n - 2) as f64 / 2.0;
        let u = math::powf(math::sqrt(b) / q, p);
        // grad u = -2bp u d / q,
        // hess u = u (-2bp I / q + 4 b^2 p (p + 1) d d^T / q^2)
        let grad = d.iter().map(|di| -2.0 * b * p * u * di / q).collect();
        let outer = 4.0 * b * b * p * (p + 1.0) * u / (q * q);
        let hess = SymMatrix::from_fn(n, |i, j| {
            let diag = if i == j { -2.0 * b * p * u / q } else { 0.0 };
            diag + outer * d[i] * d[j]
        });
        Ok(Jet { value: u, grad, hess })
    }
}

pub fn bubble_field(params: &BubbleParams) -> Result<Field> {
    params.validate()?;
    Ok(Arc::new(BubbleField { params: params.clone(), domain: Domain::whole() }))
}

/// A field given by a parsed expression in `x1..xn`.
#[derive(Debug, Clone)]
pub struct ExprField {
    n: usize,
    src: String,
    ast: ExprAst,
    domain: Domain,
}

impl ExprField {
    pub fn source(&self) -> &str {
        &self.src
    }
}

impl ScalarField for ExprField {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn eval_jet(&self, x: &[f64]) -> Result<Jet> {
        self.ast.eval_jet(x)
    }
    fn eval_value(&self, x: &[f64]) -> Result<f64> {
        self.ast.eval_value(x)
    }
}

pub fn parse_field(src: &str, n: usize) -> Result<Field> {
    parse_field_on(src, n, Domain::whole())
}

pub fn parse_field_on(src: &str, n: usize, domain: Domain) -> Result<Field> {
    let ast = expr::parse(src, n)?;
    Ok(Arc::new(ExprField { n, src: src.into(), ast, domain }))
}

/// `y -> (lambda / |y - c|)^{n-2} u(c + lambda^2 (y - c) / |y - c|^2)`: the
/// conformal reflection of `u` across the sphere `|y - c| = lambda`.
#[derive(Debug, Clone)]
pub struct InversionField {
    inner: Field,
    center: Vec<f64>,
    lambda: f64,
    domain: Domain,
}

impl InversionField {
    pub fn new(inner: Field, center: Vec<f64>, lambda: f64, region: Region) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(domain(format!("inversion radius must be positive, got {lambda}")));
        }
        if center.len() != inner.dim() {
            return Err(Error::Precondition("inversion center dimension mismatch".into()));
        }
        let domain = Domain { region, punctures: vec![center.clone()], exclusion: SINGULAR_EPS };
        Ok(InversionField { inner, center, lambda, domain })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn inner(&self) -> &Field {
        &self.inner
    }

    fn factor_exponent(&self) -> f64 {
        (self.inner.dim() - 2) as f64 / 2.0
    }
}

impl ScalarField for InversionField {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn eval_value(&self, y: &[f64]) -> Result<f64> {
        let l2 = self.lambda * self.lambda;
        let r2: f64 = y.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        if math::sqrt(r2) <= SINGULAR_EPS {
            return Err(domain("evaluation at the inversion center"));
        }
        let z: Vec<f64> = y.iter().zip(&self.center).map(|(a, c)| c + l2 * (a - c) / r2).collect();
        let factor = math::powf(l2 / r2, self.factor_exponent());
        Ok(factor * self.inner.value(&z)?)
    }

    fn eval_jet(&self, y: &[f64]) -> Result<Jet> {
        let n = y.len();
        let l2 = self.lambda * self.lambda;
        let ys = Jet::variables(y);
        let diff: Vec<Jet> = ys.iter().zip(&self.center).map(|(yi, c)| yi.add_const(-c)).collect();
        let mut r2 = Jet::constant(n, 0.0);
        for d in &diff {
            r2 = &r2 + &(d * d);
        }
        if math::sqrt(r2.value) <= SINGULAR_EPS {
            return Err(domain("evaluation at the inversion center"));
        }
        let inv_r2 = r2.recip()?;
        let z: Vec<Jet> = diff
            .iter()
            .zip(&self.center)
            .map(|(d, c)| (&(d * &inv_r2) * l2).add_const(*c))
            .collect();
        let zv: Vec<f64> = z.iter().map(|j| j.value).collect();
        let outer = self.inner.jet(&zv)?;
        let composed = Jet::compose(&outer, &z);
        let ratio = inv_r2.scale(l2);
        let factor = if (n - 2) % 2 == 0 {
            ratio.powi(((n - 2) / 2) as i32)?
        } else {
            ratio.powf(self.factor_exponent())?
        };
        Ok(&factor * &composed)
    }
}

/// Kelvin transform `u_{x,lambda}` about a point `x` of the boundary
/// hyperplane `x_n = 0`.
pub fn kelvin_field(u: &Field, x: &[f64], lambda: f64) -> Result<Field> {
    if x.len() != u.dim() {
        return Err(Error::Precondition("Kelvin center dimension mismatch".into()));
    }
    if math::abs(x[x.len() - 1]) > 1e-12 {
        return Err(Error::Precondition(format!(
            "Kelvin center must lie on x_n = 0, got x_n = {}",
            x[x.len() - 1]
        )));
    }
    let region = match u.domain().region {
        Region::HalfSpace => Region::HalfSpace,
        _ => Region::Whole,
    };
    Ok(Arc::new(InversionField::new(u.clone(), x.to_vec(), lambda, region)?))
}

/// `u + eps * phi`.
#[derive(Debug, Clone)]
pub struct PerturbedField {
    base: Field,
    phi: Field,
    eps: f64,
}

impl ScalarField for PerturbedField {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn domain(&self) -> &Domain {
        self.base.domain()
    }
    fn eval_jet(&self, x: &[f64]) -> Result<Jet> {
        let b = self.base.raw_jet(x)?;
        if self.eps == 0.0 {
            return Ok(b);
        }
        Ok(&b + &self.phi.raw_jet(x)?.scale(self.eps))
    }
    fn eval_value(&self, x: &[f64]) -> Result<f64> {
        let b = self.base.raw_value(x)?;
        if self.eps == 0.0 {
            return Ok(b);
        }
        Ok(b + self.eps * self.phi.raw_value(x)?)
    }
}

pub fn perturb_field(u: &Field, phi: &Field, eps: f64) -> Result<Field> {
    if u.dim() != phi.dim() {
        return Err(Error::Precondition(format!(
            "perturbation dimension {} does not match field dimension {}",
            phi.dim(),
            u.dim()
        )));
    }
    if !eps.is_finite() {
        return Err(domain("perturbation size must be finite"));
    }
    Ok(Arc::new(PerturbedField { base: u.clone(), phi: phi.clone(), eps }))
}

pub type ValueFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;

/// Value-only field; derivatives by Richardson-extrapolated central
/// differences with step `h`.
pub struct FiniteDifferenceField {
    n: usize,
    f: ValueFn,
    h: f64,
    domain: Domain,
}

impl fmt::Debug for FiniteDifferenceField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteDifferenceField").field("n", &self.n).field("h", &self.h).finish()
    }
}

impl FiniteDifferenceField {
    pub fn new(n: usize, f: ValueFn, h: f64, domain: Domain) -> Field {
        Arc::new(FiniteDifferenceField { n, f, h, domain })
    }
}

impl ScalarField for FiniteDifferenceField {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn eval_value(&self, x: &[f64]) -> Result<f64> {
        (self.f)(x)
    }
    fn eval_jet(&self, x: &[f64]) -> Result<Jet> {
        let f = |p: &[f64]| (self.f)(p);
        Ok(Jet { value: f(x)?, grad: fd::gradient(&f, x, self.h)?, hess: fd::hessian(&f, x, self.h)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin(n: usize) -> Vec<f64> {
        vec![0.0; n]
    }

    #[test]
    fn bubble_values() {
        let u = bubble_field(&BubbleParams::new(4, 1.0, origin(4)).unwrap()).unwrap();
        assert_eq!(u.value(&origin(4)).unwrap(), 1.0);
        let u = bubble_field(&BubbleParams::new(4, 1.0, vec![0.0, 0.0, 0.0, -1.0]).unwrap()).unwrap();
        assert!((u.value(&origin(4)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bubble_params_validation() {
        assert!(BubbleParams::new(2, 1.0, origin(2)).is_err());
        assert!(BubbleParams::new(4, 0.0, origin(4)).is_err());
        assert!(BubbleParams::new(4, 1.0, origin(3)).is_err());
        let p = BubbleParams::new(4, 0.25, vec![0.0, 0.0, 0.0, -1.0]).unwrap();
        assert!((p.mean_curvature() - 1.0).abs() < 1e-15);
        assert!((BubbleParams::new(4, 4.0, origin(4)).unwrap().alpha() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kelvin_of_one_is_fundamental_solution() {
        let u = constant_field(4, 1.0);
        let k = kelvin_field(&u, &origin(4), 1.0).unwrap();
        let y = [0.3, -1.0, 0.5, 2.0];
        let r2: f64 = y.iter().map(|v| v * v).sum();
        assert!((k.value(&y).unwrap() - 1.0 / r2).abs() < 1e-15);
        assert!(k.value(&origin(4)).is_err());
    }

    #[test]
    fn kelvin_fixes_its_sphere() {
        let u = parse_field("1 + 0.1*x1^2 + exp(-x2^2)", 3).unwrap();
        let x = [0.5, -0.2, 0.0];
        let k = kelvin_field(&u, &x, 2.0).unwrap();
        let y = [0.5 + 2.0 * 0.6, -0.2 + 2.0 * 0.8, 0.0];
        assert!((k.value(&y).unwrap() - u.value(&y).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn kelvin_center_must_be_on_boundary() {
        let u = constant_field(3, 1.0);
        assert!(kelvin_field(&u, &[0.0, 0.0, 1.0], 1.0).is_err());
        assert!(kelvin_field(&u, &[0.0, 0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn parsed_constant_and_domain_error() {
        let u = parse_field("exp(0)", 3).unwrap();
        let j = u.jet(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(j.value, 1.0);
        assert!(j.grad.iter().all(|g| *g == 0.0));
        assert_eq!(j.hess.max_abs(), 0.0);
        let bad = parse_field("ln(x1 - 10)", 2).unwrap();
        assert!(matches!(bad.value(&[0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn perturbation_basics() {
        let one = constant_field(3, 1.0);
        let sum = perturb_field(&one, &one, 0.5).unwrap();
        assert_eq!(sum.value(&[1.0, 2.0, 3.0]).unwrap(), 1.5);
        let same = perturb_field(&one, &one, 0.0).unwrap();
        assert_eq!(same.value(&[1.0, 2.0, 3.0]).unwrap(), 1.0);
        let neg = perturb_field(&one, &one, -2.0).unwrap();
        assert!(neg.value(&[0.0; 3]).is_err());
        assert!(neg.raw_value(&[0.0; 3]).is_ok());
        assert!(perturb_field(&one, &constant_field(4, 1.0), 1.0).is_err());
    }

    #[test]
    fn half_space_and_ball_domains() {
        let d = Domain::half_space();
        assert!(d.check(&[1.0, 0.0]).is_ok());
        assert!(d.check(&[1.0, -1e-3]).is_err());
        let b = Domain::ball(vec![0.0, 1.0], 1.0);
        assert!(b.check(&[0.0, 2.0]).is_ok());
        assert!(b.check(&[0.0, 2.1]).is_err());
    }
}
