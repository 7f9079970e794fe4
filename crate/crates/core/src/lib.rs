//! Fully nonlinear conformal curvature operators on the upper half-space and
//! the numerics to certify them.
//!
//! For a conformally flat metric `g_u = u^{4/(n-2)} |dx|^2` this crate
//! evaluates the Schouten tensor `A_{g_u}` (as the (1,1)-tensor
//! `g_u^{-1} A_{g_u}`), its elementary symmetric functions `sigma_k`, the
//! mean curvature `h` of the flat boundary `x_n = 0`, and the umbilic
//! boundary curvature `B_k`, an odd polynomial in `h` whose coefficients are
//! `sigma_s` of the tangential Schouten block.
//!
//! On top of that sit the checks: bubbles
//! `(sqrt(b) / (1 + b |x - c|^2))^{(n-2)/2}` solve the constant
//! `sigma_k` / constant `B_k` problem, both operators commute with Kelvin
//! inversions about boundary points, the linearization of `B_k` is elliptic
//! in the positive cone, and the moving-spheres radius satisfies
//! `lambda_bar(x)^{n-2} u(x) = alpha`.
//!
//! The crate is `no_std` + `alloc` with the default `std` feature turned off.
//! `parallel` enables rayon for grid sweeps; `serde` derives serialization
//! for the report types.
//!
//! Modules:
//!
//! - [`symfun`]: `SymMatrix`, `sigma_k` by trace recursion, Newton tensors,
//!   cone labels, exact combinatorial constants.
//! - [`fields`]: scalar fields with exact value/gradient/Hessian
//!   (closed-form bubbles, parsed expressions with second-order forward AD,
//!   Kelvin images, perturbations).
//! - [`conformal`]: pointwise curvature of `g_u`.
//! - [`boundary`]: `B_k`, its `h`-monotonicity, the `h` solver, and the
//!   linearization coefficients.
//! - [`mobius`]: inversions, invariance checks, the half-space to ball map,
//!   `alpha`, and `lambda_bar`.
//! - [`liouville`]: end-to-end bubble certification and the `c_0` solver.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod boundary;
pub mod conformal;
mod error;
pub mod fields;
pub mod liouville;
pub(crate) mod math;
pub mod mobius;
pub mod quadrature;
mod report;
pub mod symfun;

pub use error::{Error, Result};
pub use report::CheckReport;
