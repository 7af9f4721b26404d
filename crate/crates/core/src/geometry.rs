//! Directional derivatives, tension field and conformality operator.
//!
//! All derivatives are taken along one-parameter subgroups: for a direction
//! X in the Lie algebra, `X(phi)(x) = d/ds phi(x exp(sX)) |_{s=0}`. For the
//! term shapes of the catalog these have closed forms; a finite-difference
//! engine provides an independent route for cross-checking.
//!
//! With an orthonormal left-invariant frame B of the total group,
//!
//! ```text
//! tau(phi)        = sum_{X in B} X(X(phi))
//! kappa(phi, psi) = sum_{X in B} X(phi) X(psi)
//! ```
//!
//! The connection term of the bi-invariant metric drops out of the tension
//! field, so the plain second derivatives suffice; this is validated against
//! the expected eigenvalues rather than assumed silently.

use crate::catalog::{CatalogError, EigenfunctionSpec, TermShape};
use crate::groups::{algebra_basis, haar_sample_rng, retract_unchecked, stream_rng, TangentBasis};
use crate::matrix::{matrix_exp, ComplexMatrix, C64};
use rayon::prelude::*;
use std::sync::atomic::{AtomicBool, Ordering};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("specs live on different spaces: {0} vs {1}")]
    SpaceMismatch(String, String),
    #[error("fd step {0:.3e} outside [1e-8, 1e-2]")]
    BadStep(f64),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineMode {
    Exact,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    Two,
    Four,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivOrder {
    First,
    Second,
}

/// Derivative engine: closed forms or central differences on the retraction
/// curve, optionally cross-checked against each other.
#[derive(Debug)]
pub struct DerivativeEngine {
    pub mode: EngineMode,
    pub fd_step: f64,
    pub fd_order: FdOrder,
    pub richardson: bool,
    cross_check: bool,
    disagreement: AtomicBool,
}

impl Clone for DerivativeEngine {
    fn clone(&self) -> Self {
        Self {
            mode: self.mode,
            fd_step: self.fd_step,
            fd_order: self.fd_order,
            richardson: self.richardson,
            cross_check: self.cross_check,
            disagreement: AtomicBool::new(self.disagreement.load(Ordering::Relaxed)),
        }
    }
}

impl DerivativeEngine {
    pub fn exact() -> Self {
        Self {
            mode: EngineMode::Exact,
            fd_step: 2e-4,
            fd_order: FdOrder::Four,
            richardson: true,
            cross_check: false,
            disagreement: AtomicBool::new(false),
        }
    }

    pub fn finite_difference() -> Self {
        Self {
            mode: EngineMode::FiniteDifference,
            ..Self::exact()
        }
    }

    pub fn with_step(mut self, step: f64) -> Result<Self, GeometryError> {
        if !(1e-8..=1e-2).contains(&step) {
            return Err(GeometryError::BadStep(step));
        }
        self.fd_step = step;
        Ok(self)
    }

    pub fn with_order(mut self, order: FdOrder) -> Self {
        self.fd_order = order;
        self
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    /// Every derivative is computed by both routes; a discrepancy beyond
    /// 1e-5 relative sets the diagnostics flag instead of failing.
    pub fn with_cross_check(mut self) -> Self {
        self.cross_check = true;
        self
    }

    pub fn diagnostics_flagged(&self) -> bool {
        self.disagreement.load(Ordering::Relaxed)
    }

    pub fn name(&self) -> &'static str {
        match self.mode {
            EngineMode::Exact => "exact",
            EngineMode::FiniteDifference => "fd",
        }
    }
}

fn exact_derivative(
    spec: &EigenfunctionSpec,
    x: &ComplexMatrix,
    dir: &ComplexMatrix,
    order: DerivOrder,
) -> C64 {
    let two = C64::new(2.0, 0.0);
    spec.terms
        .iter()
        .map(|term| match term {
            TermShape::Linear { c } => {
                let arg = match order {
                    DerivOrder::First => x * dir,
                    DerivOrder::Second => &(x * dir) * dir,
                };
                (c * &arg.transpose()).trace()
            }
            TermShape::Bilinear { a, b } => {
                let xt = x.transpose();
                let dt = dir.transpose();
                let inner = match order {
                    DerivOrder::First => &(dir * b) + &(b * &dt),
                    DerivOrder::Second => {
                        let d2 = dir * dir;
                        let mixed = (&(dir * b) * &dt).scale(two);
                        &(&(&d2 * b) + &mixed) + &(b * &(&dt * &dt))
                    }
                };
                (&(&(a * x) * &inner) * &xt).trace()
            }
            TermShape::Sesquilinear { a, b } => {
                let xs = x.adjoint();
                let ds = dir.adjoint();
                let inner = match order {
                    DerivOrder::First => &(dir * b) + &(b * &ds),
                    DerivOrder::Second => {
                        let d2 = dir * dir;
                        let mixed = (&(dir * b) * &ds).scale(two);
                        &(&(&d2 * b) + &mixed) + &(b * &(&ds * &ds))
                    }
                };
                (&(&(a * x) * &inner) * &xs).trace()
            }
        })
        .sum()
}

/// phi(x exp(s X)) sampled at the stencil offsets.
fn curve_value(spec: &EigenfunctionSpec, x: &ComplexMatrix, dir: &ComplexMatrix, s: f64) -> C64 {
    if s == 0.0 {
        return spec.evaluate_unchecked(x);
    }
    let step = matrix_exp(&dir.scale(C64::new(s, 0.0))).expect("finite direction");
    spec.evaluate_unchecked(&(x * &step))
}

fn fd_once<F: Fn(f64) -> C64>(f: &F, h: f64, order: FdOrder, deriv: DerivOrder) -> C64 {
    let c = |v: f64| C64::new(v, 0.0);
    match (order, deriv) {
        (FdOrder::Two, DerivOrder::First) => (f(h) - f(-h)) / c(2.0 * h),
        (FdOrder::Two, DerivOrder::Second) => (f(h) - f(0.0) * c(2.0) + f(-h)) / c(h * h),
        (FdOrder::Four, DerivOrder::First) => {
            (-f(2.0 * h) + f(h) * c(8.0) - f(-h) * c(8.0) + f(-2.0 * h)) / c(12.0 * h)
        }
        (FdOrder::Four, DerivOrder::Second) => {
            (-f(2.0 * h) + f(h) * c(16.0) - f(0.0) * c(30.0) + f(-h) * c(16.0) - f(-2.0 * h))
                / c(12.0 * h * h)
        }
    }
}

fn fd_derivative<F: Fn(f64) -> C64>(f: F, engine: &DerivativeEngine, deriv: DerivOrder) -> C64 {
    let h = engine.fd_step;
    let fine = fd_once(&f, h, engine.fd_order, deriv);
    if !engine.richardson {
        return fine;
    }
    // Extrapolate from the (h, 2h) pair: the fine level stays at the base
    // step, so Richardson removes the leading truncation term without
    // paying the 4x rounding amplification a step of h/2 would cost on
    // second derivatives.
    let coarse = fd_once(&f, 2.0 * h, engine.fd_order, deriv);
    let p = match engine.fd_order {
        FdOrder::Two => 4.0,
        FdOrder::Four => 16.0,
    };
    (fine * C64::new(p, 0.0) - coarse) / C64::new(p - 1.0, 0.0)
}

/// Directional derivative of order one or two along `dir`.
pub fn dir_derivative(
    spec: &EigenfunctionSpec,
    x: &ComplexMatrix,
    dir: &ComplexMatrix,
    order: DerivOrder,
    engine: &DerivativeEngine,
) -> C64 {
    let exact = || exact_derivative(spec, x, dir, order);
    let fd = || fd_derivative(|s| curve_value(spec, x, dir, s), engine, order);
    let primary = match engine.mode {
        EngineMode::Exact => exact(),
        EngineMode::FiniteDifference => fd(),
    };
    if engine.cross_check {
        let other = match engine.mode {
            EngineMode::Exact => fd(),
            EngineMode::FiniteDifference => exact(),
        };
        if (primary - other).norm() > 1e-5 * (1.0 + primary.norm()) {
            engine.disagreement.store(true, Ordering::Relaxed);
        }
    }
    primary
}

/// First-derivative components along an orthonormal basis.
pub fn gradient_components(
    spec: &EigenfunctionSpec,
    x: &ComplexMatrix,
    basis: &TangentBasis,
    engine: &DerivativeEngine,
) -> Vec<C64> {
    basis
        .elements
        .iter()
        .map(|b| dir_derivative(spec, x, b, DerivOrder::First, engine))
        .collect()
}

/// Norm of the complexified gradient, sqrt(sum |c_i|^2).
pub fn gradient_norm(components: &[C64]) -> f64 {
    components.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Tension field over an explicit orthonormal frame.
pub fn tension_field_with_frame(
    spec: &EigenfunctionSpec,
    x: &ComplexMatrix,
    frame: &[ComplexMatrix],
    engine: &DerivativeEngine,
) -> C64 {
    frame
        .iter()
        .map(|b| dir_derivative(spec, x, b, DerivOrder::Second, engine))
        .sum()
}

/// Tension field over the full orthonormal algebra basis of the total group.
pub fn tension_field(
    spec: &EigenfunctionSpec,
    x: &ComplexMatrix,
    engine: &DerivativeEngine,
) -> C64 {
    let basis = algebra_basis(spec.space.total_group);
    tension_field_with_frame(spec, x, &basis.elements, engine)
}

/// Conformality operator kappa(phi, psi) over the full algebra basis.
pub fn conformality(
    spec_a: &EigenfunctionSpec,
    spec_b: &EigenfunctionSpec,
    x: &ComplexMatrix,
    engine: &DerivativeEngine,
) -> Result<C64, GeometryError> {
    if spec_a.space.space != spec_b.space.space {
        return Err(GeometryError::SpaceMismatch(
            spec_a.space.space.to_string(),
            spec_b.space.space.to_string(),
        ));
    }
    let basis = algebra_basis(spec_a.space.total_group);
    Ok(conformality_with_frame(spec_a, spec_b, x, &basis.elements, engine))
}

pub fn conformality_with_frame(
    spec_a: &EigenfunctionSpec,
    spec_b: &EigenfunctionSpec,
    x: &ComplexMatrix,
    frame: &[ComplexMatrix],
    engine: &DerivativeEngine,
) -> C64 {
    frame
        .iter()
        .map(|b| {
            dir_derivative(spec_a, x, b, DerivOrder::First, engine)
                * dir_derivative(spec_b, x, b, DerivOrder::First, engine)
        })
        .sum()
}

/// Scale-free eigen-identity residuals at one point.
pub fn eigen_residuals_at(
    spec: &EigenfunctionSpec,
    x: &ComplexMatrix,
    frame: &[ComplexMatrix],
    engine: &DerivativeEngine,
) -> (f64, f64) {
    let phi = spec.evaluate_unchecked(x);
    let tau = tension_field_with_frame(spec, x, frame, engine);
    let kappa = conformality_with_frame(spec, spec, x, frame, engine);
    let lambda = C64::new(spec.lambda_f64(), 0.0);
    let mu = C64::new(spec.mu_f64(), 0.0);
    let tau_res = (tau - lambda * phi).norm() / (1.0 + phi.norm());
    let kappa_res = (kappa - mu * phi * phi).norm() / (1.0 + phi.norm_sqr());
    (tau_res, kappa_res)
}

/// Result of a Monte-Carlo eigen-identity run.
#[derive(Debug, Clone)]
pub struct EigenResidualReport {
    pub max_tau_residual: f64,
    pub max_kappa_residual: f64,
    pub samples: usize,
    pub engine: DerivativeEngine,
    /// Set when the run had no samples, so zero residuals mean "untested".
    pub no_samples: bool,
}

/// Max residuals of tau(phi) = lambda phi and kappa(phi,phi) = mu phi^2
/// over Haar samples of the total group. Samples are seeded per index, so
/// the result does not depend on the parallel schedule.
pub fn eigen_residuals(
    spec: &EigenfunctionSpec,
    samples: usize,
    seed: u64,
    engine: &DerivativeEngine,
) -> EigenResidualReport {
    if samples == 0 {
        return EigenResidualReport {
            max_tau_residual: 0.0,
            max_kappa_residual: 0.0,
            samples: 0,
            engine: engine.clone(),
            no_samples: true,
        };
    }
    let frame = algebra_basis(spec.space.total_group).elements;
    let group = spec.space.total_group;
    let pairs: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = haar_sample_rng(group, &mut stream_rng(seed, i));
            eigen_residuals_at(spec, &x, &frame, engine)
        })
        .collect();
    let max_tau = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let max_kappa = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
    EigenResidualReport {
        max_tau_residual: max_tau,
        max_kappa_residual: max_kappa,
        samples,
        engine: engine.clone(),
        no_samples: false,
    }
}

/// Product rule residual |tau(phi psi) - phi tau(psi) - 2 kappa(phi,psi) - psi tau(phi)|.
///
/// The left side always goes through finite differences on the pointwise
/// product; the right side uses the given engine.
pub fn product_rule_residual(
    spec_a: &EigenfunctionSpec,
    spec_b: &EigenfunctionSpec,
    x: &ComplexMatrix,
    engine: &DerivativeEngine,
) -> Result<f64, GeometryError> {
    if spec_a.space.space != spec_b.space.space {
        return Err(GeometryError::SpaceMismatch(
            spec_a.space.space.to_string(),
            spec_b.space.space.to_string(),
        ));
    }
    let frame = algebra_basis(spec_a.space.total_group).elements;
    let fd = DerivativeEngine {
        mode: EngineMode::FiniteDifference,
        ..engine.clone()
    };
    let lhs: C64 = frame
        .iter()
        .map(|dir| {
            fd_derivative(
                |s| {
                    let point = if s == 0.0 {
                        x.clone()
                    } else {
                        retract_unchecked(x, &dir.scale(C64::new(s, 0.0)))
                    };
                    spec_a.evaluate_unchecked(&point) * spec_b.evaluate_unchecked(&point)
                },
                &fd,
                DerivOrder::Second,
            )
        })
        .sum();
    let phi = spec_a.evaluate_unchecked(x);
    let psi = spec_b.evaluate_unchecked(x);
    let tau_a = tension_field_with_frame(spec_a, x, &frame, engine);
    let tau_b = tension_field_with_frame(spec_b, x, &frame, engine);
    let kappa = conformality_with_frame(spec_a, spec_b, x, &frame, engine);
    let rhs = phi * tau_b + C64::new(2.0, 0.0) * kappa + psi * tau_a;
    Ok((lhs - rhs).norm())
}
