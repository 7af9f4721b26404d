//! Zero fibres: locating them, certifying regularity, and witnessing
//! minimality.
//!
//! Everything happens in the total group G. A lifted quotient eigenfunction
//! is itself an eigenfunction on G, so the fibre upstairs is compact and
//! minimal whenever 0 is a regular value; regularity and curvature are
//! therefore tested upstairs, with no charts on G/K.
//!
//! The fibre finder runs Riemannian descent on f(x) = |phi(x) - level|^2
//! with Armijo backtracking along one-parameter subgroup retractions,
//! stepping in the Gauss-Newton least-squares direction built from the
//! frame components of the gradient. The
//! mean-curvature witness differentiates the unit normal frame
//! {N1 = grad u / |grad u|, N2 orthonormalized} along fibre-tangent
//! retraction curves: in the left-invariant frame of a bi-invariant metric
//! the bracket correction to <∇_E N, E> vanishes, so a plain central
//! difference of the frame components is enough.

use crate::catalog::{compile_terms, CatalogError, EigenfunctionSpec, Params};
use crate::geometry::{
    gradient_components, gradient_norm, DerivativeEngine,
};
use crate::groups::{
    algebra_basis, complex_in_sp, haar_sample_rng, membership_residual, retract_unchecked,
    stream_rng, Space,
};
use crate::matrix::{ComplexMatrix, C64};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FiberError {
    #[error("lambda = mu for this member, the zero fibre may be empty")]
    DegenerateEigenvalues,
    #[error("fibre point has not converged")]
    NotConverged,
    #[error("operation needs a regular point, classification was {0:?}")]
    NotRegular(Regularity),
    #[error("unknown gallery case '{0}'")]
    UnknownCase(String),
    #[error("curvature step {0:.3e} outside [1e-6, 1e-2]")]
    BadCurvatureStep(f64),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// A located point of the fibre, with convergence diagnostics.
#[derive(Debug, Clone)]
pub struct FiberPoint {
    pub x: ComplexMatrix,
    pub abs_phi: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Descent parameters: Armijo backtracking from step 1, shrink 1/2,
/// slope 1e-4; stop at |phi| < 1e-12 or 500 iterations.
#[derive(Debug, Clone, Copy)]
pub struct DescentConfig {
    pub max_iter: usize,
    pub initial_step: f64,
    pub shrink: f64,
    pub slope: f64,
    pub tolerance: f64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            max_iter: 500,
            initial_step: 1.0,
            shrink: 0.5,
            slope: 1e-4,
            tolerance: 1e-12,
        }
    }
}

fn descend(
    spec: &EigenfunctionSpec,
    level: C64,
    start: ComplexMatrix,
    cfg: &DescentConfig,
) -> FiberPoint {
    let engine = DerivativeEngine::exact();
    let basis = algebra_basis(spec.space.total_group);
    let mut x = start;
    let mut iterations = 0;
    let mut components = gradient_components(spec, &x, &basis, &engine);
    loop {
        let offset = spec.evaluate_unchecked(&x) - level;
        let f = offset.norm_sqr();
        if offset.norm() < cfg.tolerance {
            break;
        }
        if iterations >= cfg.max_iter {
            break;
        }
        // grad f components 2 Re(conj(phi - level) dphi) in the frame; the
        // step direction is the Gauss-Newton least-squares direction
        // -(alpha du + beta dv) with G (alpha, beta) = (u, v), assembled
        // from the same components. Plain steepest descent crawls along the
        // curved valleys of |phi|^2 on some of the quotient families.
        let du: Vec<f64> = components.iter().map(|c| c.re).collect();
        let dv: Vec<f64> = components.iter().map(|c| c.im).collect();
        let guu: f64 = du.iter().map(|a| a * a).sum();
        let gvv: f64 = dv.iter().map(|a| a * a).sum();
        let guv: f64 = du.iter().zip(&dv).map(|(a, b)| a * b).sum();
        let det = guu * gvv - guv * guv;
        let scale = (guu + gvv).max(1e-300);
        let (alpha, beta) = if det > 1e-12 * scale * scale {
            (
                (gvv * offset.re - guv * offset.im) / det,
                (guu * offset.im - guv * offset.re) / det,
            )
        } else {
            // Near-singular Jacobian: fall back to steepest descent.
            (offset.re / scale, offset.im / scale)
        };
        let coeffs: Vec<f64> = du
            .iter()
            .zip(&dv)
            .map(|(u_i, v_i)| -(alpha * u_i + beta * v_i))
            .collect();
        // directional derivative of f along the step direction
        let slope_term: f64 = coeffs
            .iter()
            .zip(components.iter())
            .map(|(d, c)| 2.0 * d * (offset.conj() * c).re)
            .sum();
        if slope_term >= 0.0 || !slope_term.is_finite() {
            break; // stationary for f, not necessarily on the fibre
        }
        let mut direction = ComplexMatrix::zeros(x.rows(), x.cols());
        for (d, b) in coeffs.iter().zip(&basis.elements) {
            direction = &direction + &b.scale(Complex64::new(*d, 0.0));
        }
        let mut t = cfg.initial_step;
        let mut accepted = false;
        while t > 1e-18 {
            let candidate = retract_unchecked(&x, &direction.scale(Complex64::new(t, 0.0)));
            let f_new = (spec.evaluate_unchecked(&candidate) - level).norm_sqr();
            if f_new <= f + cfg.slope * t * slope_term {
                x = candidate;
                accepted = true;
                break;
            }
            t *= cfg.shrink;
        }
        iterations += 1;
        if !accepted {
            break;
        }
        components = gradient_components(spec, &x, &basis, &engine);
    }
    let abs_phi = (spec.evaluate_unchecked(&x) - level).norm();
    let grad_norm = gradient_norm(&components);
    let membership = membership_residual(spec.space.total_group, &x).unwrap_or(f64::INFINITY);
    // The convergence contract caps abs_phi at 1e-10 even under a looser
    // caller-supplied tolerance.
    FiberPoint {
        x,
        abs_phi,
        grad_norm,
        iterations,
        converged: abs_phi < cfg.tolerance.min(1e-10) && membership < 1e-9,
    }
}

/// Riemannian descent to a zero of phi from a Haar-random start.
///
/// Rejected when lambda = mu: the zero set of such a member can be empty.
pub fn find_fiber_point(
    spec: &EigenfunctionSpec,
    seed: u64,
    max_iter: usize,
    step: f64,
) -> Result<FiberPoint, FiberError> {
    if spec.lambda == spec.mu {
        return Err(FiberError::DegenerateEigenvalues);
    }
    let cfg = DescentConfig {
        max_iter,
        initial_step: step,
        ..DescentConfig::default()
    };
    let start = haar_sample_rng(spec.space.total_group, &mut stream_rng(seed, 0));
    Ok(descend(spec, Complex64::new(0.0, 0.0), start, &cfg))
}

/// Descent to the level set phi = level (no existence guarantee; the
/// converged flag reports the outcome). Used for non-eigen control levels.
pub fn find_level_point(
    spec: &EigenfunctionSpec,
    level: C64,
    seed: u64,
    cfg: &DescentConfig,
) -> FiberPoint {
    let start = haar_sample_rng(spec.space.total_group, &mut stream_rng(seed, 0));
    descend(spec, level, start, cfg)
}

/// Independent restarts with per-restart seeding; order is deterministic.
pub fn fiber_point_batch(
    spec: &EigenfunctionSpec,
    seed: u64,
    restarts: usize,
    cfg: &DescentConfig,
) -> Result<Vec<FiberPoint>, FiberError> {
    if spec.lambda == spec.mu {
        return Err(FiberError::DegenerateEigenvalues);
    }
    Ok((0..restarts as u64)
        .into_par_iter()
        .map(|i| {
            let start = haar_sample_rng(spec.space.total_group, &mut stream_rng(seed, i));
            descend(spec, Complex64::new(0.0, 0.0), start, cfg)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    Critical,
    Undecided,
}

/// Classifies a converged fibre point by its gradient norm:
/// regular above 1e-3, critical below 1e-8, undecided between.
pub fn regularity_check(
    _spec: &EigenfunctionSpec,
    fp: &FiberPoint,
) -> Result<(Regularity, f64), FiberError> {
    if !fp.converged {
        return Err(FiberError::NotConverged);
    }
    let class = if fp.grad_norm > 1e-3 {
        Regularity::Regular
    } else if fp.grad_norm < 1e-8 {
        Regularity::Critical
    } else {
        Regularity::Undecided
    };
    Ok((class, fp.grad_norm))
}

// ---------------------------------------------------------------------------
// Critical gallery
// ---------------------------------------------------------------------------

/// A named critical-point construction.
#[derive(Debug, Clone, Copy)]
pub struct GalleryCase {
    pub id: &'static str,
    pub description: &'static str,
}

pub const GALLERY_CASES: &[GalleryCase] = &[
    GalleryCase {
        id: "so3-isotropic-p",
        description: "SO(3), a = p = (1, i, 0): rotation about the third axis \
                      lies on the fibre with vanishing gradient",
    },
    GalleryCase {
        id: "grassR-2-2",
        description: "real Grassmannian (m, n) = (2, 2), a = (1, i, 0, 0): \
                      two-angle family of critical points on the zero fibre",
    },
    GalleryCase {
        id: "so4-u2-old-family",
        description: "SO(4)/U(2), a = (1, i, 0, 0), b = (0, 0, 1, i): \
                      signed permutation matrix where the isotropic-pair \
                      family fails to be regular",
    },
    GalleryCase {
        id: "grassC-generic",
        description: "complex Grassmannian (m, n) = (2, 2), a = e1, b = e2: \
                      columns assembled from conj(a), b and an orthonormal \
                      completion give a critical zero",
    },
    GalleryCase {
        id: "grassH-2-2",
        description: "quaternionic Grassmannian (m, n) = (2, 2), coordinate \
                      pair function phi_{12}: z = (e3, e4, e1, e2), w = 0 is \
                      a critical zero",
    },
];

/// A constructed critical point together with the function it belongs to.
#[derive(Debug, Clone)]
pub struct GalleryResult {
    pub case_id: String,
    pub spec: EigenfunctionSpec,
    pub x: ComplexMatrix,
    pub phi: C64,
    pub grad_norm: f64,
}

/// Builds a catalog-shaped spec without the admissibility gate; the gallery
/// deliberately uses parameter choices that the regularity theorems exclude.
fn spec_unchecked(space: Space, params: Params) -> EigenfunctionSpec {
    let terms = compile_terms(space, &params);
    let (lambda, mu) = space.eigenvalues();
    EigenfunctionSpec::from_term_shapes(space.descriptor(), params, terms, C64::new(0.0, 0.0), lambda, mu)
}

fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

fn rotation2(theta: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![theta.cos(), theta.sin()],
        vec![-theta.sin(), theta.cos()],
    ])
}

/// Gram-Schmidt completion of `seeds` to an orthonormal set of C^n, using
/// standard basis vectors for the remaining directions.
fn complete_orthonormal(seeds: &[Vec<C64>], n: usize) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    let push = |cand: &[C64], out: &mut Vec<Vec<C64>>| {
        let mut v = cand.to_vec();
        for _ in 0..2 {
            for q in out.iter() {
                let coeff: C64 = q.iter().zip(&v).map(|(qi, vi)| qi.conj() * vi).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= qi * coeff;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-10 {
            for z in &mut v {
                *z /= norm;
            }
            out.push(v);
        }
    };
    for s in seeds {
        push(s, &mut out);
    }
    for k in 0..n {
        if out.len() == n {
            break;
        }
        let mut e = vec![c(0.0, 0.0); n];
        e[k] = c(1.0, 0.0);
        push(&e, &mut out);
    }
    out
}

fn matrix_from_columns(cols: &[Vec<C64>]) -> ComplexMatrix {
    let n = cols.len();
    ComplexMatrix::from_fn(cols[0].len(), n, |i, j| cols[j][i])
}

/// Reconstructs the known critical points with default angles
/// theta = 0.7, alpha = 0.3.
pub fn critical_gallery(case_id: &str) -> Result<GalleryResult, FiberError> {
    critical_gallery_with_angles(case_id, 0.7, 0.3)
}

pub fn critical_gallery_with_angles(
    case_id: &str,
    theta: f64,
    alpha: f64,
) -> Result<GalleryResult, FiberError> {
    let (spec, x) = match case_id {
        "so3-isotropic-p" => {
            let a = vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)];
            let spec = spec_unchecked(
                Space::So { n: 3 },
                Params::default().with_a(a.clone()).with_p(a),
            );
            let x = ComplexMatrix::from_real_rows(&[
                vec![theta.cos(), theta.sin(), 0.0],
                vec![-theta.sin(), theta.cos(), 0.0],
                vec![0.0, 0.0, 1.0],
            ]);
            (spec, x)
        }
        "grassR-2-2" => {
            let spec = spec_unchecked(
                Space::GrassmannR { m: 2, n: 2 },
                Params::default().with_a(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]),
            );
            // [[0, B(theta)], [C(alpha), 0]] with rotation blocks has
            // determinant det(B) det(C) = 1, and its first two columns are
            // supported away from the first two rows, so they annihilate a.
            let b = rotation2(theta);
            let cc = rotation2(alpha);
            let z = ComplexMatrix::zeros(2, 2);
            let x = ComplexMatrix::from_blocks(&z, &b, &cc, &z);
            (spec, x)
        }
        "so4-u2-old-family" => {
            let a = vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)];
            let b = vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)];
            let spec = spec_unchecked(
                Space::So2nModUn { n: 2 },
                Params::default().with_a(a).with_b(b),
            );
            let x = ComplexMatrix::from_real_rows(&[
                vec![0.0, 0.0, 0.0, -1.0],
                vec![0.0, 0.0, 1.0, 0.0],
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
            ]);
            (spec, x)
        }
        "grassC-generic" => {
            let (m, n) = (2usize, 2usize);
            let a = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
            let b = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
            let spec = spec_unchecked(
                Space::GrassmannC { m, n },
                Params::default().with_a(a.clone()).with_b(b.clone()),
            );
            // Columns (v_1, .., v_{m+n-2}, conj(a)/|a|, b/|b|): the first m
            // columns are orthogonal to conj(a) and b, so all horizontal
            // derivatives contain a vanishing factor.
            let a_bar: Vec<C64> = a.iter().map(|z| z.conj()).collect();
            let seeded = complete_orthonormal(&[a_bar.clone(), b.clone()], m + n);
            let mut cols: Vec<Vec<C64>> = seeded[2..].to_vec();
            cols.push(seeded[0].clone());
            cols.push(seeded[1].clone());
            (spec, matrix_from_columns(&cols))
        }
        "grassH-2-2" => {
            let (m, n) = (2usize, 2usize);
            let (j, alpha_idx) = (1usize, 2usize);
            let spec = quaternionic_pair_function(m, n, j, alpha_idx);
            // z = (v_1, .., v_{m+n-2}, e_j, e_alpha), w = 0.
            let mut cols: Vec<Vec<C64>> = Vec::new();
            for k in 1..=m + n {
                if k != j && k != alpha_idx {
                    cols.push(crate::catalog::unit_vector(m + n, k));
                }
            }
            cols.push(crate::catalog::unit_vector(m + n, j));
            cols.push(crate::catalog::unit_vector(m + n, alpha_idx));
            let z = matrix_from_columns(&cols);
            (spec, complex_in_sp(&z))
        }
        other => return Err(FiberError::UnknownCase(other.to_string())),
    };
    let phi = spec.evaluate(&x)?;
    let basis = algebra_basis(spec.space.total_group);
    let comps = gradient_components(&spec, &x, &basis, &DerivativeEngine::exact());
    let grad_norm = gradient_norm(&comps);
    Ok(GalleryResult {
        case_id: case_id.to_string(),
        spec,
        x,
        phi,
        grad_norm,
    })
}

/// The coordinate-pair function phi_{j,alpha} on the quaternionic
/// Grassmannian: an eigenfunction with the same (lambda, mu) table row,
/// known to be non-regular over zero.
pub fn quaternionic_pair_function(
    m: usize,
    n: usize,
    j: usize,
    alpha: usize,
) -> EigenfunctionSpec {
    use crate::catalog::TermShape;
    use crate::matrix::p_matrix;
    let space = Space::GrassmannH { m, n };
    let nn = m + n;
    let mut a_mat = ComplexMatrix::zeros(2 * nn, 2 * nn);
    a_mat[(alpha - 1, j - 1)] = c(1.0, 0.0);
    let pm = p_matrix(m, nn);
    let params = Params::default()
        .with_a(crate::catalog::unit_vector(nn, j))
        .with_b(crate::catalog::unit_vector(nn, alpha));
    let (lambda, mu) = space.eigenvalues();
    EigenfunctionSpec::from_term_shapes(
        space.descriptor(),
        params,
        vec![TermShape::Sesquilinear {
            a: a_mat,
            b: ComplexMatrix::block_diag(&pm, &pm),
        }],
        c(0.0, 0.0),
        lambda,
        mu,
    )
}

// ---------------------------------------------------------------------------
// Tangent frame, Jacobian rank, mean curvature
// ---------------------------------------------------------------------------

fn real_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn real_norm(a: &[f64]) -> f64 {
    real_dot(a, a).sqrt()
}

/// Real 2 x dim Jacobian rows (du, dv) of phi in the left-invariant frame.
fn jacobian_rows(
    spec: &EigenfunctionSpec,
    x: &ComplexMatrix,
    basis: &crate::groups::TangentBasis,
) -> (Vec<f64>, Vec<f64>) {
    let comps = gradient_components(spec, x, basis, &DerivativeEngine::exact());
    let du: Vec<f64> = comps.iter().map(|c| c.re).collect();
    let dv: Vec<f64> = comps.iter().map(|c| c.im).collect();
    (du, dv)
}

/// Singular values (sigma1 >= sigma2) of the real 2 x dim Jacobian.
/// The map has rank at most two, so there is no third singular value.
pub fn jacobian_singular_values(spec: &EigenfunctionSpec, x: &ComplexMatrix) -> (f64, f64) {
    let basis = algebra_basis(spec.space.total_group);
    let (du, dv) = jacobian_rows(spec, x, &basis);
    let a = real_dot(&du, &du);
    let b = real_dot(&du, &dv);
    let d = real_dot(&dv, &dv);
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    let l1 = 0.5 * (tr + disc);
    let l2 = 0.5 * (tr - disc).max(0.0);
    (l1.sqrt(), l2.sqrt())
}

/// Orthonormal coefficient vectors spanning ker(du) ∩ ker(dv) in R^dim.
fn kernel_coefficients(du: &[f64], dv: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let mut frame: Vec<Vec<f64>> = Vec::new();
    let push = |cand: &[f64], frame: &mut Vec<Vec<f64>>, tol: f64| {
        let mut v = cand.to_vec();
        for _ in 0..2 {
            for q in frame.iter() {
                let coeff = real_dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= qi * coeff;
                }
            }
        }
        let norm = real_norm(&v);
        if norm > tol {
            for z in &mut v {
                *z /= norm;
            }
            frame.push(v);
        }
    };
    // Seed with the two gradient rows, then sweep the coordinate directions;
    // the first two slots are dropped afterwards.
    push(du, &mut frame, 1e-12);
    push(dv, &mut frame, 1e-12);
    let normal_count = frame.len();
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        push(&e, &mut frame, 1e-8);
    }
    frame.split_off(normal_count)
}

/// Orthonormal basis of the fibre tangent space at a regular fibre point,
/// as Lie-algebra matrices. Size dim(G) - 2; every element annihilates both
/// du and dv.
pub fn fiber_tangent_basis(
    spec: &EigenfunctionSpec,
    fp: &FiberPoint,
) -> Result<Vec<ComplexMatrix>, FiberError> {
    let (class, _) = regularity_check(spec, fp)?;
    if class != Regularity::Regular {
        return Err(FiberError::NotRegular(class));
    }
    let basis = algebra_basis(spec.space.total_group);
    let (du, dv) = jacobian_rows(spec, &fp.x, &basis);
    let coeffs = kernel_coefficients(&du, &dv, basis.len());
    Ok(coeffs
        .iter()
        .map(|t| {
            let mut m = ComplexMatrix::zeros(fp.x.rows(), fp.x.cols());
            for (ti, b) in t.iter().zip(&basis.elements) {
                m = &m + &b.scale(Complex64::new(*ti, 0.0));
            }
            m
        })
        .collect())
}

/// Unit normal frame components (n1, n2) at a point, in the left-invariant
/// frame: n1 = du/|du|, n2 = Gram-Schmidt of dv against n1.
fn normal_frame(
    spec: &EigenfunctionSpec,
    x: &ComplexMatrix,
    basis: &crate::groups::TangentBasis,
) -> (Vec<f64>, Vec<f64>) {
    let (du, dv) = jacobian_rows(spec, x, basis);
    let nu = real_norm(&du);
    let n1: Vec<f64> = du.iter().map(|v| v / nu).collect();
    let proj = real_dot(&n1, &dv);
    let mut n2: Vec<f64> = dv.iter().zip(&n1).map(|(v, q)| v - proj * q).collect();
    let nv = real_norm(&n2);
    for v in &mut n2 {
        *v /= nv;
    }
    (n1, n2)
}

/// Relative gap between the two real gradient norms at a point,
/// |grad u| vs |grad v|. On fibre points of mu != 0 members the gradients
/// are conformal, so a gap above 1e-3 is a diagnostic that the point (or
/// the member) is not what the caller thinks; see
/// [`conformality_violation`].
pub fn gradient_norm_gap(spec: &EigenfunctionSpec, x: &ComplexMatrix) -> f64 {
    let basis = algebra_basis(spec.space.total_group);
    let (du, dv) = jacobian_rows(spec, x, &basis);
    let nu = real_norm(&du);
    let nv = real_norm(&dv);
    (nu - nv).abs() / nu.max(nv).max(f64::MIN_POSITIVE)
}

/// Diagnostic flag for the normal frame: true when the gradient norms at
/// the point differ by more than 1e-3 relative.
pub fn conformality_violation(spec: &EigenfunctionSpec, x: &ComplexMatrix) -> bool {
    gradient_norm_gap(spec, x) > 1e-3
}

/// Norm of the mean curvature vector of the level set through `fp.x`,
/// estimated with central step `h` on the normal frame.
pub fn mean_curvature_estimate(
    spec: &EigenfunctionSpec,
    fp: &FiberPoint,
    h: f64,
) -> Result<f64, FiberError> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(FiberError::BadCurvatureStep(h));
    }
    if fp.grad_norm <= 1e-3 {
        return Err(FiberError::NotRegular(if fp.grad_norm < 1e-8 {
            Regularity::Critical
        } else {
            Regularity::Undecided
        }));
    }
    let basis = algebra_basis(spec.space.total_group);
    let (du, dv) = jacobian_rows(spec, &fp.x, &basis);
    let tangent_coeffs = kernel_coefficients(&du, &dv, basis.len());
    let mut h1 = 0.0;
    let mut h2 = 0.0;
    for t in &tangent_coeffs {
        let mut dir = ComplexMatrix::zeros(fp.x.rows(), fp.x.cols());
        for (ti, b) in t.iter().zip(&basis.elements) {
            dir = &dir + &b.scale(Complex64::new(*ti, 0.0));
        }
        let fwd = retract_unchecked(&fp.x, &dir.scale(Complex64::new(h, 0.0)));
        let bwd = retract_unchecked(&fp.x, &dir.scale(Complex64::new(-h, 0.0)));
        let (n1f, n2f) = normal_frame(spec, &fwd, &basis);
        let (n1b, n2b) = normal_frame(spec, &bwd, &basis);
        // <B(E,E), N_a> = -<d/ds N_a(s)|_0, E>; the bracket term of the
        // bi-invariant connection is <[E, N], E> = 0.
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for i in 0..t.len() {
            b1 -= (n1f[i] - n1b[i]) / (2.0 * h) * t[i];
            b2 -= (n2f[i] - n2b[i]) / (2.0 * h) * t[i];
        }
        h1 += b1;
        h2 += b2;
    }
    Ok((h1 * h1 + h2 * h2).sqrt())
}

/// Success statistics of a restart batch.
#[derive(Debug, Clone, Copy)]
pub struct BatchStats {
    pub restarts: usize,
    pub converged: usize,
    pub min_grad_norm: f64,
    pub max_grad_norm: f64,
}

pub fn batch_stats(points: &[FiberPoint]) -> BatchStats {
    let converged: Vec<&FiberPoint> = points.iter().filter(|p| p.converged).collect();
    BatchStats {
        restarts: points.len(),
        converged: converged.len(),
        min_grad_norm: converged
            .iter()
            .map(|p| p.grad_norm)
            .fold(f64::INFINITY, f64::min),
        max_grad_norm: converged.iter().map(|p| p.grad_norm).fold(0.0, f64::max),
    }
}
