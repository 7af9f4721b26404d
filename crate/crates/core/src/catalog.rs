//! The ten eigenfunction families.
//!
//! Every family is compiled into a sum of *term shapes* over the total
//! group, so that derivatives along one-parameter subgroups have closed
//! forms:
//!
//! ```text
//! L(C)    x -> tr(C xᵗ)          SO(n), SU(n), Sp(n)
//! Q(A,B)  x -> tr(A x B xᵗ)      SU(n)/SO(n), Sp(n)/U(n)   (B = I)
//!                                SO(2n)/U(n), SU(2n)/Sp(n) (B = J_n)
//!                                real Grassmannian          (B = P_m)
//! S(A,B)  x -> tr(A x B x*)      complex Grassmannian       (B = P_m)
//!                                quaternionic Grassmannian  (B = diag(P_m, P_m))
//! ```
//!
//! Quotient-space functions are represented by their lift to the total
//! group; K-invariance is checked numerically, never assumed.

use crate::groups::{membership_residual, ratio_to_f64, GroupError, Space, SpaceDescriptor};
use crate::matrix::{j_matrix, p_matrix, ComplexMatrix, C64};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("parameter constraints violated: {}", list_violations(.0))]
    Constraints(Vec<Violation>),
    #[error("point not in {group} (membership residual {residual:.3e})")]
    Membership { group: String, residual: f64 },
    #[error("{space} is not a quotient family")]
    NotAQuotient { space: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn list_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.constraint.clone())
        .collect::<Vec<_>>()
        .join("; ")
}

/// One violated parameter constraint, in the notation of the family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.constraint)
    }
}

fn violation(s: impl Into<String>) -> Violation {
    Violation {
        constraint: s.into(),
    }
}

mod c64vec {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<C64>>, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Option<Vec<[f64; 2]>> =
            v.as_ref().map(|v| v.iter().map(|z| [z.re, z.im]).collect());
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<C64>>, D::Error> {
        let pairs: Option<Vec<[f64; 2]>> = Option::deserialize(d)?;
        Ok(pairs.map(|v| v.iter().map(|p| C64::new(p[0], p[1])).collect()))
    }
}

/// Named parameter vectors. Which ones are required depends on the family.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "c64vec")]
    pub a: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "c64vec")]
    pub b: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "c64vec")]
    pub p: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "c64vec")]
    pub u: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "c64vec")]
    pub v: Option<Vec<C64>>,
}

impl Params {
    pub fn with_a(mut self, a: Vec<C64>) -> Self {
        self.a = Some(a);
        self
    }
    pub fn with_b(mut self, b: Vec<C64>) -> Self {
        self.b = Some(b);
        self
    }
    pub fn with_p(mut self, p: Vec<C64>) -> Self {
        self.p = Some(p);
        self
    }
    pub fn with_u(mut self, u: Vec<C64>) -> Self {
        self.u = Some(u);
        self
    }
    pub fn with_v(mut self, v: Vec<C64>) -> Self {
        self.v = Some(v);
        self
    }
}

/// Standard unit vector e_k (1-based) in C^n.
pub fn unit_vector(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[k - 1] = C64::new(1.0, 0.0);
    v
}

/// The isotropic vector e_1 + i e_2 in C^n (n >= 2).
pub fn isotropic_vector(n: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[0] = C64::new(1.0, 0.0);
    v[1] = C64::new(0.0, 1.0);
    v
}

/// Complex bilinear form (x, y) = sum x_k y_k.
pub fn bilinear(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Hermitian inner product <x, y> = sum x_k conj(y_k).
pub fn hermitian(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

fn is_zero(x: &[C64]) -> bool {
    norm2(x) == 0.0
}

fn linearly_independent(a: &[C64], b: &[C64]) -> bool {
    // Cauchy-Schwarz is an equality exactly on dependent pairs.
    let gram = norm2(a) * norm2(b) - hermitian(a, b).norm_sqr();
    let scale = norm2(a) * norm2(b);
    scale > 0.0 && gram > 1e-20 * scale
}

/// Whether b = z * b̃ for some complex z and real vector b̃.
///
/// Equivalent to all pairwise products b_j conj(b_k) being real.
pub fn is_complex_multiple_of_real(b: &[C64]) -> bool {
    let scale = norm2(b);
    if scale == 0.0 {
        return false;
    }
    for j in 0..b.len() {
        for k in 0..b.len() {
            if (b[j] * b[k].conj()).im.abs() > 1e-12 * scale {
                return false;
            }
        }
    }
    true
}

/// Whether the SO(2n)/U(n) parameters fall in the sub-family proven regular:
/// (a,a) = (a,b) = 0 and b a complex multiple of a real vector.
pub fn so2n_restricted_subfamily(params: &Params) -> bool {
    match (&params.a, &params.b) {
        (Some(a), Some(b)) => {
            let tol = 1e-12 * (1.0 + norm2(a).max(norm2(b)));
            bilinear(a, a).norm() < tol
                && bilinear(a, b).norm() < tol
                && is_complex_multiple_of_real(b)
        }
        _ => false,
    }
}

/// One closed-form trace term.
#[derive(Debug, Clone)]
pub enum TermShape {
    /// `x -> tr(C xᵗ)`
    Linear { c: ComplexMatrix },
    /// `x -> tr(A x B xᵗ)`
    Bilinear { a: ComplexMatrix, b: ComplexMatrix },
    /// `x -> tr(A x B x*)`
    Sesquilinear { a: ComplexMatrix, b: ComplexMatrix },
}

impl TermShape {
    pub fn evaluate(&self, x: &ComplexMatrix) -> C64 {
        match self {
            TermShape::Linear { c } => (c * &x.transpose()).trace(),
            TermShape::Bilinear { a, b } => (&(&(a * x) * b) * &x.transpose()).trace(),
            TermShape::Sesquilinear { a, b } => (&(&(a * x) * b) * &x.adjoint()).trace(),
        }
    }
}

/// An eigenfunction, carried as its lift to the total group.
#[derive(Debug, Clone)]
pub struct EigenfunctionSpec {
    pub space: SpaceDescriptor,
    pub params: Params,
    pub terms: Vec<TermShape>,
    /// Constant offset; zero for all catalog members, nonzero only for
    /// synthetic functions used in product-rule identities.
    pub constant: C64,
    pub lambda: Ratio<i64>,
    pub mu: Ratio<i64>,
}

impl EigenfunctionSpec {
    /// Low-level constructor for synthetic term sums (tests, gallery
    /// functions, product-rule identities). Catalog members come from
    /// [`build`].
    pub fn from_term_shapes(
        space: SpaceDescriptor,
        params: Params,
        terms: Vec<TermShape>,
        constant: C64,
        lambda: Ratio<i64>,
        mu: Ratio<i64>,
    ) -> Self {
        Self {
            space,
            params,
            terms,
            constant,
            lambda,
            mu,
        }
    }

    /// A constant function on the given space, eigen with (0, 0).
    pub fn constant_function(space: Space, value: C64) -> Self {
        Self::from_term_shapes(
            space.descriptor(),
            Params::default(),
            Vec::new(),
            value,
            Ratio::new(0, 1),
            Ratio::new(0, 1),
        )
    }

    pub fn lambda_f64(&self) -> f64 {
        ratio_to_f64(self.lambda)
    }

    pub fn mu_f64(&self) -> f64 {
        ratio_to_f64(self.mu)
    }

    /// Value at a group point; the point must satisfy membership at 1e-9.
    pub fn evaluate(&self, x: &ComplexMatrix) -> Result<C64, CatalogError> {
        let r = membership_residual(self.space.total_group, x)?;
        if r >= 1e-9 {
            return Err(CatalogError::Membership {
                group: self.space.total_group.to_string(),
                residual: r,
            });
        }
        Ok(self.evaluate_unchecked(x))
    }

    /// Value without the membership check; inner loops keep points in the
    /// group by construction.
    pub fn evaluate_unchecked(&self, x: &ComplexMatrix) -> C64 {
        self.terms
            .iter()
            .map(|t| t.evaluate(x))
            .fold(self.constant, |acc, v| acc + v)
    }

    /// Max over Haar-sampled k in K of |phi(x k) - phi(x)|.
    pub fn invariance_residual(
        &self,
        x: &ComplexMatrix,
        k_samples: usize,
        seed: u64,
    ) -> Result<f64, CatalogError> {
        if !self.space.space.is_quotient() {
            return Err(CatalogError::NotAQuotient {
                space: self.space.space.to_string(),
            });
        }
        let base = self.evaluate(x)?;
        let mut rng = crate::groups::stream_rng(seed, 0);
        let mut worst = 0.0f64;
        for _ in 0..k_samples {
            let k = self.space.subgroup_sample(&mut rng)?;
            let moved = x * &k;
            worst = worst.max((self.evaluate_unchecked(&moved) - base).norm());
        }
        Ok(worst)
    }

    /// Evaluates the pair (phi_{scaled}(x), c·d·phi(x)); the two agree
    /// exactly because every family is bilinear in its parameter sets.
    ///
    /// Two-parameter families scale the first set by `c` and the second by
    /// `d`; one-parameter (quadratic) families scale a by sqrt(c d).
    pub fn scaling_identity(
        &self,
        c: C64,
        d: C64,
        x: &ComplexMatrix,
    ) -> Result<(C64, C64), CatalogError> {
        let scaled_params = scale_params(self.space.space, &self.params, c, d);
        let scaled = build(self.space.space, scaled_params)?;
        Ok((scaled.evaluate(x)?, c * d * self.evaluate(x)?))
    }
}

fn scale_vec(v: &Option<Vec<C64>>, f: C64) -> Option<Vec<C64>> {
    v.as_ref().map(|v| v.iter().map(|z| z * f).collect())
}

fn scale_params(space: Space, params: &Params, c: C64, d: C64) -> Params {
    let mut out = params.clone();
    match space {
        Space::So { .. } => {
            out.a = scale_vec(&params.a, c);
            out.p = scale_vec(&params.p, d);
        }
        Space::Su { .. } => {
            out.a = scale_vec(&params.a, c);
            out.v = scale_vec(&params.v, d);
        }
        Space::Sp { .. } => {
            out.a = scale_vec(&params.a, c);
            out.u = scale_vec(&params.u, d);
            out.v = scale_vec(&params.v, d);
        }
        Space::So2nModUn { .. } | Space::Su2nModSpn { .. } | Space::GrassmannC { .. } => {
            out.a = scale_vec(&params.a, c);
            out.b = scale_vec(&params.b, d);
        }
        Space::SuModSo { .. }
        | Space::SpModU { .. }
        | Space::GrassmannR { .. }
        | Space::GrassmannH { .. } => {
            out.a = scale_vec(&params.a, (c * d).sqrt());
        }
    }
    out
}

struct ParamView<'a> {
    params: &'a Params,
    violations: Vec<Violation>,
}

impl<'a> ParamView<'a> {
    fn new(params: &'a Params) -> Self {
        Self {
            params,
            violations: Vec::new(),
        }
    }

    /// Fetches a named vector, recording missing/length/zero violations.
    fn require(&mut self, name: &str, len: usize, nonzero: bool) -> Option<&'a [C64]> {
        let slot = match name {
            "a" => &self.params.a,
            "b" => &self.params.b,
            "p" => &self.params.p,
            "u" => &self.params.u,
            "v" => &self.params.v,
            _ => unreachable!(),
        };
        match slot {
            None => {
                self.violations
                    .push(violation(format!("parameter {name} is required")));
                None
            }
            Some(v) if v.len() != len => {
                self.violations.push(violation(format!(
                    "parameter {name} must have length {len}, got {}",
                    v.len()
                )));
                None
            }
            Some(v) => {
                if nonzero && is_zero(v) {
                    self.violations.push(violation(format!("{name} != 0")));
                }
                Some(v)
            }
        }
    }

    fn optional(&mut self, name: &str, len: usize) -> Option<&'a [C64]> {
        let slot = match name {
            "u" => &self.params.u,
            "v" => &self.params.v,
            _ => unreachable!(),
        };
        match slot {
            None => None,
            Some(v) if v.len() != len => {
                self.violations.push(violation(format!(
                    "parameter {name} must have length {len}, got {}",
                    v.len()
                )));
                None
            }
            Some(v) => Some(v),
        }
    }
}

/// Checks the family constraints; returns every violation, not only the
/// first. Empty means the parameters are admissible.
pub fn validate(space: Space, params: &Params) -> Vec<Violation> {
    let mut view = ParamView::new(params);
    let tol_of = |v: &[C64]| 1e-12 * (1.0 + norm2(v));
    match space {
        Space::So { n } => {
            if let Some(a) = view.require("a", n, true) {
                if bilinear(a, a).norm() > tol_of(a) {
                    view.violations.push(violation("(a,a) = 0"));
                }
            }
            if let Some(p) = view.require("p", n, true) {
                if bilinear(p, p).norm() <= tol_of(p) {
                    view.violations.push(violation("(p,p) != 0"));
                }
            }
        }
        Space::Su { n } => {
            view.require("a", n, true);
            view.require("v", n, true);
        }
        Space::Sp { n } => {
            view.require("a", n, true);
            let u = view.optional("u", n);
            let v = view.optional("v", n);
            let u_zero = u.is_none_or(is_zero);
            let v_zero = v.is_none_or(is_zero);
            if u_zero && v_zero {
                view.violations
                    .push(violation("at least one of u, v must be nonzero"));
            }
        }
        Space::SuModSo { n } => {
            view.require("a", n, true);
        }
        Space::SpModU { n } => {
            view.require("a", 2 * n, true);
        }
        Space::So2nModUn { n } => {
            let a = view.require("a", 2 * n, true);
            let b = view.require("b", 2 * n, true);
            if let (Some(a), Some(b)) = (a, b) {
                if !linearly_independent(a, b) {
                    view.violations
                        .push(violation("a, b linearly independent"));
                }
                let rel = bilinear(a, a) * bilinear(b, b) - bilinear(a, b) * bilinear(a, b);
                if rel.norm() > 1e-12 * (1.0 + norm2(a) * norm2(b)) {
                    view.violations
                        .push(violation("(a,a)(b,b) - (a,b)^2 = 0"));
                }
            }
        }
        Space::Su2nModSpn { n } => {
            let a = view.require("a", 2 * n, true);
            let b = view.require("b", 2 * n, true);
            if let (Some(a), Some(b)) = (a, b) {
                if !linearly_independent(a, b) {
                    view.violations
                        .push(violation("a, b linearly independent"));
                }
            }
        }
        Space::GrassmannR { m, n } | Space::GrassmannH { m, n } => {
            if let Some(a) = view.require("a", m + n, true) {
                if bilinear(a, a).norm() > tol_of(a) {
                    view.violations.push(violation("(a,a) = 0"));
                }
            }
        }
        Space::GrassmannC { m, n } => {
            let a = view.require("a", m + n, true);
            let b = view.require("b", m + n, true);
            if let (Some(a), Some(b)) = (a, b) {
                if bilinear(a, b).norm() > 1e-12 * (1.0 + norm2(a).max(norm2(b))) {
                    view.violations.push(violation("<a, b̄> = 0"));
                }
            }
        }
    }
    view.violations
}

fn outer(a: &[C64], b: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j])
}

/// Zero-padded copy of `v` of length `len`.
fn pad(v: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); len];
    out[..v.len()].copy_from_slice(v);
    out
}

/// The skew matrix sum a_j b_k Y_jk = (a bᵗ - b aᵗ)/sqrt(2).
fn skew_pair(a: &[C64], b: &[C64]) -> ComplexMatrix {
    (&outer(a, b) - &outer(b, a)).scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
}

pub(crate) fn compile_terms(space: Space, params: &Params) -> Vec<TermShape> {
    match space {
        Space::So { .. } => {
            let (a, p) = (params.a.as_ref().unwrap(), params.p.as_ref().unwrap());
            vec![TermShape::Linear { c: outer(p, a) }]
        }
        Space::Su { .. } => {
            let (a, v) = (params.a.as_ref().unwrap(), params.v.as_ref().unwrap());
            vec![TermShape::Linear { c: outer(a, v) }]
        }
        Space::Sp { n } => {
            let a = params.a.as_ref().unwrap();
            let zero = vec![C64::new(0.0, 0.0); n];
            let v = params.v.as_deref().unwrap_or(&zero);
            let u = params.u.as_deref().unwrap_or(&zero);
            let mut vu = v.to_vec();
            vu.extend_from_slice(u);
            vec![TermShape::Linear {
                c: outer(&pad(a, 2 * n), &vu),
            }]
        }
        Space::SuModSo { n } => {
            let a = params.a.as_ref().unwrap();
            vec![TermShape::Bilinear {
                a: outer(a, a),
                b: ComplexMatrix::identity(n),
            }]
        }
        Space::SpModU { n } => {
            let a = params.a.as_ref().unwrap();
            vec![TermShape::Bilinear {
                a: outer(a, a),
                b: ComplexMatrix::identity(2 * n),
            }]
        }
        Space::So2nModUn { n } | Space::Su2nModSpn { n } => {
            let (a, b) = (params.a.as_ref().unwrap(), params.b.as_ref().unwrap());
            vec![TermShape::Bilinear {
                a: skew_pair(a, b),
                b: j_matrix(n),
            }]
        }
        Space::GrassmannR { m, n } => {
            let a = params.a.as_ref().unwrap();
            vec![TermShape::Bilinear {
                a: outer(a, a),
                b: p_matrix(m, m + n),
            }]
        }
        Space::GrassmannC { m, n } => {
            let (a, b) = (params.a.as_ref().unwrap(), params.b.as_ref().unwrap());
            vec![TermShape::Sesquilinear {
                a: outer(b, a),
                b: p_matrix(m, m + n),
            }]
        }
        Space::GrassmannH { m, n } => {
            let a = params.a.as_ref().unwrap();
            let nn = m + n;
            let padded = pad(a, 2 * nn);
            let pm = p_matrix(m, nn);
            vec![TermShape::Sesquilinear {
                a: outer(&padded, &padded),
                b: ComplexMatrix::block_diag(&pm, &pm),
            }]
        }
    }
}

/// Builds a catalog eigenfunction; fails with the full violation list when
/// the parameters do not satisfy the family constraints.
pub fn build(space: Space, params: Params) -> Result<EigenfunctionSpec, CatalogError> {
    space.validate_size()?;
    let violations = validate(space, &params);
    if !violations.is_empty() {
        return Err(CatalogError::Constraints(violations));
    }
    let terms = compile_terms(space, &params);
    let (lambda, mu) = space.eigenvalues();
    Ok(EigenfunctionSpec {
        space: space.descriptor(),
        params,
        terms,
        constant: C64::new(0.0, 0.0),
        lambda,
        mu,
    })
}

/// Canonical parameters used by the verification table.
pub fn default_params(space: Space) -> Params {
    match space {
        Space::So { n } => Params::default()
            .with_a(isotropic_vector(n))
            .with_p(unit_vector(n, 1)),
        Space::Su { n } => Params::default()
            .with_a(unit_vector(n, 1))
            .with_v(unit_vector(n, 2)),
        Space::Sp { n } => Params::default()
            .with_a(unit_vector(n, 1))
            .with_v(unit_vector(n, 1)),
        Space::SuModSo { n } => Params::default().with_a(unit_vector(n, 1)),
        Space::SpModU { n } => Params::default().with_a(unit_vector(2 * n, 1)),
        Space::So2nModUn { n } => Params::default()
            .with_a(isotropic_vector(2 * n))
            .with_b(unit_vector(2 * n, 3)),
        Space::Su2nModSpn { n } => Params::default()
            .with_a(unit_vector(2 * n, 1))
            .with_b(unit_vector(2 * n, 2)),
        Space::GrassmannR { m, n } | Space::GrassmannH { m, n } => {
            Params::default().with_a(isotropic_vector(m + n))
        }
        Space::GrassmannC { m, n } => Params::default()
            .with_a(unit_vector(m + n, 1))
            .with_b(unit_vector(m + n, 2)),
    }
}

/// Builds the canonical catalog member for a space.
pub fn default_member(space: Space) -> Result<EigenfunctionSpec, CatalogError> {
    build(space, default_params(space))
}
