//! The classical compact matrix groups SO(n), SU(n), U(n), Sp(n) and the
//! quotient spaces built from them.
//!
//! All computations happen inside the total group: a point of a quotient
//! space is represented by a group element, quotient semantics come from
//! invariance under the subgroup. Sp(n) points use the complex 2n x 2n
//! representation
//!
//! ```text
//! q = z + w j  ->  [[ z,  w ],
//!                   [-w̄,  z̄ ]]
//! ```
//!
//! which is the convention used everywhere except inside `Su2nModSpn`: the
//! subgroup Sp(n) of SU(2n) is embedded as `[[z, -w̄], [w, z̄]]`, obtained
//! from the standard form by swapping the off-diagonal blocks.
//!
//! Haar sampling of SO/SU/U is QR of a Gaussian matrix (Gram-Schmidt with
//! positive real diagonal of R, which already fixes the phase/sign gauge),
//! with the determinant corrected into SO/SU on the last column. Sp(n) is
//! sampled by quaternionic Gram-Schmidt of a quaternionic Gaussian matrix.

use crate::matrix::{basis_matrix, trace_metric, BasisKind, ComplexMatrix, C64};
use num_rational::Ratio;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("dimension mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("point is not in {group} (membership residual {residual:.3e})")]
    NotInGroup { group: String, residual: f64 },
    #[error("direction is not in the Lie algebra of {group} (residual {residual:.3e})")]
    NotInAlgebra { group: String, residual: f64 },
    #[error("{space} is not a quotient space")]
    NotAQuotient { space: String },
    #[error("unsupported size for {space}: {reason}")]
    UnsupportedSize { space: String, reason: String },
}

/// Deterministic per-index RNG: `seed` selects the run, `stream` the sample.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gauss(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

// ---------------------------------------------------------------------------
// Groups
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroupFamily {
    SO,
    SU,
    U,
    Sp,
}

/// A total group: family plus size parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupId {
    pub family: GroupFamily,
    pub n: usize,
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            GroupFamily::SO => write!(f, "SO({})", self.n),
            GroupFamily::SU => write!(f, "SU({})", self.n),
            GroupFamily::U => write!(f, "U({})", self.n),
            GroupFamily::Sp => write!(f, "Sp({})", self.n),
        }
    }
}

impl GroupId {
    pub fn so(n: usize) -> Self {
        Self { family: GroupFamily::SO, n }
    }
    pub fn su(n: usize) -> Self {
        Self { family: GroupFamily::SU, n }
    }
    pub fn u(n: usize) -> Self {
        Self { family: GroupFamily::U, n }
    }
    pub fn sp(n: usize) -> Self {
        Self { family: GroupFamily::Sp, n }
    }

    /// Size of the complex matrices carrying group elements.
    pub fn embedding_dim(&self) -> usize {
        match self.family {
            GroupFamily::Sp => 2 * self.n,
            _ => self.n,
        }
    }

    /// Real dimension of the group manifold.
    pub fn real_dim(&self) -> usize {
        let n = self.n;
        match self.family {
            GroupFamily::SO => n * (n - 1) / 2,
            GroupFamily::SU => n * n - 1,
            GroupFamily::U => n * n,
            GroupFamily::Sp => n * (2 * n + 1),
        }
    }
}

fn check_dims(group: GroupId, x: &ComplexMatrix) -> Result<(), GroupError> {
    let d = group.embedding_dim();
    if x.rows() != d || x.cols() != d {
        return Err(GroupError::DimensionMismatch {
            expected: d,
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    Ok(())
}

/// Max-entry deviation of `x x* - I`.
fn unitarity_residual(x: &ComplexMatrix) -> f64 {
    let prod = x * &x.adjoint();
    (&prod - &ComplexMatrix::identity(x.rows())).max_abs()
}

fn imag_residual(x: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            worst = worst.max(x[(i, j)].im.abs());
        }
    }
    worst
}

fn block(x: &ComplexMatrix, bi: usize, bj: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| x[(bi * n + i, bj * n + j)])
}

/// Deviation of `x` from the defining relations of `group`.
///
/// Zero exactly on members: unitarity for all families, realness and
/// `det = 1` for SO, `det = 1` for SU, and the quaternionic block structure
/// for Sp.
pub fn membership_residual(group: GroupId, x: &ComplexMatrix) -> Result<f64, GroupError> {
    check_dims(group, x)?;
    let mut r = unitarity_residual(x);
    match group.family {
        GroupFamily::SO => {
            r = r.max(imag_residual(x));
            r = r.max((x.det() - C64::new(1.0, 0.0)).norm());
        }
        GroupFamily::SU => {
            r = r.max((x.det() - C64::new(1.0, 0.0)).norm());
        }
        GroupFamily::U => {}
        GroupFamily::Sp => {
            let n = group.n;
            let z = block(x, 0, 0, n);
            let w = block(x, 0, 1, n);
            let bl = block(x, 1, 0, n);
            let br = block(x, 1, 1, n);
            r = r.max((&bl + &w.conj()).max_abs());
            r = r.max((&br - &z.conj()).max_abs());
        }
    }
    Ok(r)
}

/// Deviation of `z` from the Lie algebra of `group`.
pub fn algebra_residual(group: GroupId, z: &ComplexMatrix) -> Result<f64, GroupError> {
    check_dims(group, z)?;
    let mut r = 0.0f64;
    match group.family {
        GroupFamily::SO => {
            r = r.max((&z.transpose() + z).max_abs());
            r = r.max(imag_residual(z));
        }
        GroupFamily::SU => {
            r = r.max((&z.adjoint() + z).max_abs());
            r = r.max(z.trace().norm());
        }
        GroupFamily::U => {
            r = r.max((&z.adjoint() + z).max_abs());
        }
        GroupFamily::Sp => {
            let n = group.n;
            let a = block(z, 0, 0, n);
            let w = block(z, 0, 1, n);
            let bl = block(z, 1, 0, n);
            let br = block(z, 1, 1, n);
            r = r.max((&a.adjoint() + &a).max_abs());
            r = r.max((&w.transpose() - &w).max_abs());
            r = r.max((&bl + &w.conj()).max_abs());
            r = r.max((&br - &a.conj()).max_abs());
        }
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Haar sampling
// ---------------------------------------------------------------------------

/// Modified Gram-Schmidt on the columns, one reorthogonalization pass.
/// R has positive real diagonal, so Q is the canonical QR factor.
fn gram_schmidt_columns(a: &mut ComplexMatrix) {
    let n = a.cols();
    for k in 0..n {
        let mut v = a.col(k);
        for _ in 0..2 {
            for j in 0..k {
                let q = a.col(j);
                let c: C64 = q.iter().zip(&v).map(|(qi, vi)| qi.conj() * vi).sum();
                for i in 0..v.len() {
                    v[i] -= q[i] * c;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= norm;
        }
        a.set_col(k, &v);
    }
}

/// Quaternion `q = z + w j`, stored as the complex pair (z, w).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Quaternion {
    pub z: C64,
    pub w: C64,
}

impl Quaternion {
    pub fn zero() -> Self {
        Self {
            z: C64::new(0.0, 0.0),
            w: C64::new(0.0, 0.0),
        }
    }

    pub fn mul(self, rhs: Self) -> Self {
        Self {
            z: self.z * rhs.z - self.w * rhs.w.conj(),
            w: self.z * rhs.w + self.w * rhs.z.conj(),
        }
    }

    pub fn conj(self) -> Self {
        Self {
            z: self.z.conj(),
            w: -self.w,
        }
    }

    pub fn norm_sqr(self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn scale(self, f: f64) -> Self {
        Self {
            z: self.z * f,
            w: self.w * f,
        }
    }

    fn sub(self, rhs: Self) -> Self {
        Self {
            z: self.z - rhs.z,
            w: self.w - rhs.w,
        }
    }
}

/// Square quaternionic matrix, row-major.
pub(crate) struct QuaternionMatrix {
    pub n: usize,
    pub data: Vec<Quaternion>,
}

impl QuaternionMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Quaternion::zero(); n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        self.data[i * self.n + j] = q;
    }

    /// Right-module Gram-Schmidt on the columns with the quaternionic
    /// inner product sum conj(u_i) v_i.
    pub fn gram_schmidt_columns(&mut self) {
        let n = self.n;
        for k in 0..n {
            let mut v: Vec<Quaternion> = (0..n).map(|i| self.get(i, k)).collect();
            for _ in 0..2 {
                for j in 0..k {
                    let mut c = Quaternion::zero();
                    for (i, vi) in v.iter().enumerate() {
                        let t = self.get(i, j).conj().mul(*vi);
                        c.z += t.z;
                        c.w += t.w;
                    }
                    for (i, vi) in v.iter_mut().enumerate() {
                        let sub = self.get(i, j).mul(c);
                        *vi = vi.sub(sub);
                    }
                }
            }
            let norm = v.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
            for (i, q) in v.into_iter().enumerate() {
                self.set(i, k, q.scale(1.0 / norm));
            }
        }
    }

    /// Standard complex representation `[[z, w], [-w̄, z̄]]`.
    pub fn embed(&self) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let q = self.get(i, j);
                out[(i, j)] = q.z;
                out[(i, n + j)] = q.w;
                out[(n + i, j)] = -q.w.conj();
                out[(n + i, n + j)] = q.z.conj();
            }
        }
        out
    }
}

fn haar_sp_quaternion(n: usize, rng: &mut impl Rng) -> QuaternionMatrix {
    let mut m = QuaternionMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(
                i,
                j,
                Quaternion {
                    z: C64::new(gauss(rng), gauss(rng)),
                    w: C64::new(gauss(rng), gauss(rng)),
                },
            );
        }
    }
    m.gram_schmidt_columns();
    m
}

fn haar_u(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut a = ComplexMatrix::from_fn(n, n, |_, _| C64::new(gauss(rng), gauss(rng)));
    gram_schmidt_columns(&mut a);
    a
}

fn haar_su(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut q = haar_u(n, rng);
    let phase = q.det().conj();
    let last: Vec<C64> = q.col(n - 1).iter().map(|z| z * phase).collect();
    q.set_col(n - 1, &last);
    q
}

fn haar_so(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut a = ComplexMatrix::from_fn(n, n, |_, _| C64::new(gauss(rng), 0.0));
    gram_schmidt_columns(&mut a);
    if a.det().re < 0.0 {
        let last: Vec<C64> = a.col(n - 1).iter().map(|z| -z).collect();
        a.set_col(n - 1, &last);
    }
    a
}

/// Haar-distributed group element, deterministic in the seed.
pub fn haar_sample(group: GroupId, rng_seed: u64) -> ComplexMatrix {
    haar_sample_rng(group, &mut stream_rng(rng_seed, 0))
}

pub fn haar_sample_rng(group: GroupId, rng: &mut impl Rng) -> ComplexMatrix {
    match group.family {
        GroupFamily::SO => haar_so(group.n, rng),
        GroupFamily::SU => haar_su(group.n, rng),
        GroupFamily::U => haar_u(group.n, rng),
        GroupFamily::Sp => haar_sp_quaternion(group.n, rng).embed(),
    }
}

/// One-parameter subgroup step `x exp(V)`.
///
/// Both residual preconditions are checked at 1e-9; the result stays in the
/// group up to rounding because `exp` of an algebra element is a member.
pub fn retract(
    group: GroupId,
    x: &ComplexMatrix,
    v: &ComplexMatrix,
) -> Result<ComplexMatrix, GroupError> {
    let rx = membership_residual(group, x)?;
    if rx >= 1e-9 {
        return Err(GroupError::NotInGroup {
            group: group.to_string(),
            residual: rx,
        });
    }
    let rv = algebra_residual(group, v)?;
    if rv >= 1e-9 {
        return Err(GroupError::NotInAlgebra {
            group: group.to_string(),
            residual: rv,
        });
    }
    Ok(retract_unchecked(x, v))
}

/// `x exp(V)` without precondition checks; used in inner loops where the
/// inputs are group elements by construction.
pub fn retract_unchecked(x: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
    x * &crate::matrix::matrix_exp(v).expect("finite algebra element")
}

// ---------------------------------------------------------------------------
// Lie algebra bases
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    FullAlgebra,
    HorizontalM,
}

/// Orthonormal list of Lie-algebra matrices under the trace metric.
#[derive(Debug, Clone)]
pub struct TangentBasis {
    pub elements: Vec<ComplexMatrix>,
    pub kind: BasisTag,
}

impl TangentBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn i_times(m: &ComplexMatrix) -> ComplexMatrix {
    m.scale(C64::new(0.0, 1.0))
}

fn y(r: usize, s: usize, n: usize) -> ComplexMatrix {
    basis_matrix(BasisKind::Y { r, s }, n).unwrap()
}

fn x_sym(r: usize, s: usize, n: usize) -> ComplexMatrix {
    basis_matrix(BasisKind::X { r, s }, n).unwrap()
}

fn e_tt(t: usize, n: usize) -> ComplexMatrix {
    basis_matrix(BasisKind::DSingle { t }, n).unwrap()
}

fn so_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    for r in 1..=n {
        for s in r + 1..=n {
            out.push(y(r, s, n));
        }
    }
    out
}

/// Orthonormal diagonal part of su(n): i * diag(1,..,1,-k,0,..) / sqrt(k(k+1)).
fn su_diag_basis(n: usize) -> Vec<ComplexMatrix> {
    (1..n)
        .map(|k| {
            let norm = (k as f64 * (k + 1) as f64).sqrt();
            ComplexMatrix::from_fn(n, n, |i, j| {
                if i != j {
                    C64::new(0.0, 0.0)
                } else if i < k {
                    C64::new(0.0, 1.0 / norm)
                } else if i == k {
                    C64::new(0.0, -(k as f64) / norm)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect()
}

fn su_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = so_basis(n);
    for r in 1..=n {
        for s in r + 1..=n {
            out.push(i_times(&x_sym(r, s, n)));
        }
    }
    out.extend(su_diag_basis(n));
    out
}

fn u_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = so_basis(n);
    for r in 1..=n {
        for s in r + 1..=n {
            out.push(i_times(&x_sym(r, s, n)));
        }
    }
    for t in 1..=n {
        out.push(i_times(&e_tt(t, n)));
    }
    out
}

fn scaled_diag(a: &ComplexMatrix, b: &ComplexMatrix, f: f64) -> ComplexMatrix {
    ComplexMatrix::block_diag(a, b).scale(C64::new(f, 0.0))
}

fn scaled_off(a: &ComplexMatrix, b: &ComplexMatrix, f: f64) -> ComplexMatrix {
    let n = a.rows();
    let z = ComplexMatrix::zeros(n, n);
    ComplexMatrix::from_blocks(&z, a, b, &z).scale(C64::new(f, 0.0))
}

const SQRT1_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The seven-part orthonormal basis of sp(n) in the 2n x 2n representation.
fn sp_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    for r in 1..=n {
        for s in r + 1..=n {
            let yr = y(r, s, n);
            let ix = i_times(&x_sym(r, s, n));
            let xr = x_sym(r, s, n);
            out.push(scaled_diag(&yr, &yr, SQRT1_2)); // Y^a
            out.push(scaled_diag(&ix, &(-&ix), SQRT1_2)); // X^a
            out.push(scaled_off(&ix, &ix, SQRT1_2)); // X^b
            out.push(scaled_off(&xr, &(-&xr), SQRT1_2)); // X^c
        }
    }
    for t in 1..=n {
        let d = e_tt(t, n);
        let id = i_times(&d);
        out.push(scaled_diag(&id, &(-&id), SQRT1_2)); // D^a
        out.push(scaled_off(&id, &id, SQRT1_2)); // D^b
        out.push(scaled_off(&d, &(-&d), SQRT1_2)); // D^c
    }
    out
}

/// Orthonormal basis of the full Lie algebra of `group`.
pub fn algebra_basis(group: GroupId) -> TangentBasis {
    let elements = match group.family {
        GroupFamily::SO => so_basis(group.n),
        GroupFamily::SU => su_basis(group.n),
        GroupFamily::U => u_basis(group.n),
        GroupFamily::Sp => sp_basis(group.n),
    };
    TangentBasis {
        elements,
        kind: BasisTag::FullAlgebra,
    }
}

/// Gram-Schmidt under the trace metric; directions whose residual norm
/// falls below `tol` are dropped as dependent.
fn orthonormalize(vecs: Vec<ComplexMatrix>, tol: f64) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> = Vec::new();
    for mut v in vecs {
        for _ in 0..2 {
            for q in &out {
                let c = trace_metric(q, &v).unwrap();
                v = &v - &q.scale(C64::new(c, 0.0));
            }
        }
        let norm = trace_metric(&v, &v).unwrap().sqrt();
        if norm > tol {
            out.push(v.scale(C64::new(1.0 / norm, 0.0)));
        }
    }
    out
}

/// Conjugation by diag(I_n, -I_n): negates the off-diagonal n x n blocks.
///
/// This is the equivalence between the two Sp(n) pictures
/// `[[z, w], [-w̄, z̄]]` and `[[z, -w], [w̄, z̄]]`; being an inner
/// conjugation of U(2n), it carries groups to groups and algebras to
/// algebras, and preserves the trace metric.
pub fn conjugate_by_parity(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows() / 2;
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        if (i < n) != (j < n) {
            -m[(i, j)]
        } else {
            m[(i, j)]
        }
    })
}

/// Embeds u ∈ u(n) (or U(n)) as a real 2n x 2n matrix `[[x, y], [-y, x]]`
/// with u = x + i y. This is the unitary subgroup picture inside Sp(n).
fn embed_u_in_sp(u: &ComplexMatrix) -> ComplexMatrix {
    let n = u.rows();
    ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let z = u[(i % n, j % n)];
        match (bi, bj) {
            (0, 0) | (1, 1) => C64::new(z.re, 0.0),
            (0, 1) => C64::new(z.im, 0.0),
            _ => C64::new(-z.im, 0.0),
        }
    })
}

/// Embeds u = x + i y as `[[x, -y], [y, x]]`, the unitary subgroup picture
/// inside SO(2n).
fn embed_u_in_so2n(u: &ComplexMatrix) -> ComplexMatrix {
    let n = u.rows();
    ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let z = u[(i % n, j % n)];
        match (bi, bj) {
            (0, 0) | (1, 1) => C64::new(z.re, 0.0),
            (0, 1) => C64::new(-z.im, 0.0),
            _ => C64::new(z.im, 0.0),
        }
    })
}

// ---------------------------------------------------------------------------
// Spaces
// ---------------------------------------------------------------------------

/// The ten families of classical compact symmetric spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Space {
    So { n: usize },
    Su { n: usize },
    Sp { n: usize },
    SuModSo { n: usize },
    SpModU { n: usize },
    So2nModUn { n: usize },
    Su2nModSpn { n: usize },
    GrassmannR { m: usize, n: usize },
    GrassmannC { m: usize, n: usize },
    GrassmannH { m: usize, n: usize },
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Space::So { n } => write!(f, "SO({n})"),
            Space::Su { n } => write!(f, "SU({n})"),
            Space::Sp { n } => write!(f, "Sp({n})"),
            Space::SuModSo { n } => write!(f, "SU({n})/SO({n})"),
            Space::SpModU { n } => write!(f, "Sp({n})/U({n})"),
            Space::So2nModUn { n } => write!(f, "SO({})/U({n})", 2 * n),
            Space::Su2nModSpn { n } => write!(f, "SU({})/Sp({n})", 2 * n),
            Space::GrassmannR { m, n } => write!(f, "SO({})/SO({m})xSO({n})", m + n),
            Space::GrassmannC { m, n } => write!(f, "U({})/U({m})xU({n})", m + n),
            Space::GrassmannH { m, n } => write!(f, "Sp({})/Sp({m})xSp({n})", m + n),
        }
    }
}

impl Space {
    /// Checks the size parameters make the family non-degenerate.
    pub fn validate_size(&self) -> Result<(), GroupError> {
        let bad = |reason: &str| {
            Err(GroupError::UnsupportedSize {
                space: self.to_string(),
                reason: reason.to_string(),
            })
        };
        match *self {
            Space::So { n } if n < 2 => bad("SO(n) needs n >= 2"),
            Space::Su { n } if n < 2 => bad("SU(n) needs n >= 2"),
            Space::Sp { n } if n < 1 => bad("Sp(n) needs n >= 1"),
            Space::SuModSo { n } if n < 2 => bad("SU(n)/SO(n) needs n >= 2"),
            Space::SpModU { n } if n < 1 => bad("Sp(n)/U(n) needs n >= 1"),
            Space::So2nModUn { n } if n < 2 => bad("SO(2n)/U(n) needs n >= 2"),
            Space::Su2nModSpn { n } if n < 1 => bad("SU(2n)/Sp(n) needs n >= 1"),
            Space::GrassmannR { m, n } if m < 1 || n < 1 || m + n < 3 => {
                bad("real Grassmannian needs m, n >= 1 and m + n >= 3")
            }
            Space::GrassmannC { m, n } if m < 1 || n < 1 => {
                bad("complex Grassmannian needs m, n >= 1")
            }
            Space::GrassmannH { m, n } if m < 1 || n < 1 => {
                bad("quaternionic Grassmannian needs m, n >= 1")
            }
            _ => Ok(()),
        }
    }

    pub fn total_group(&self) -> GroupId {
        match *self {
            Space::So { n } => GroupId::so(n),
            Space::Su { n } => GroupId::su(n),
            Space::Sp { n } => GroupId::sp(n),
            Space::SuModSo { n } => GroupId::su(n),
            Space::SpModU { n } => GroupId::sp(n),
            Space::So2nModUn { n } => GroupId::so(2 * n),
            Space::Su2nModSpn { n } => GroupId::su(2 * n),
            Space::GrassmannR { m, n } => GroupId::so(m + n),
            Space::GrassmannC { m, n } => GroupId::u(m + n),
            Space::GrassmannH { m, n } => GroupId::sp(m + n),
        }
    }

    pub fn is_quotient(&self) -> bool {
        !matches!(self, Space::So { .. } | Space::Su { .. } | Space::Sp { .. })
    }

    /// Expected (lambda, mu) as exact rationals.
    pub fn eigenvalues(&self) -> (Ratio<i64>, Ratio<i64>) {
        let r = |num: i64, den: i64| Ratio::new(num, den);
        match *self {
            Space::So { n } => (r(-((n as i64) - 1), 2), r(-1, 2)),
            Space::Su { n } => {
                let n = n as i64;
                (r(-(n * n - 1), n), r(-(n - 1), n))
            }
            Space::Sp { n } => (r(-(2 * n as i64 + 1), 2), r(-1, 2)),
            Space::SuModSo { n } => {
                let n = n as i64;
                (r(-2 * (n * n + n - 2), n), r(-4 * (n - 1), n))
            }
            Space::SpModU { n } => (r(-2 * (n as i64 + 1), 1), r(-2, 1)),
            Space::So2nModUn { n } => (r(-2 * (n as i64 - 1), 1), r(-1, 1)),
            Space::Su2nModSpn { n } => {
                let n = n as i64;
                (r(-2 * (2 * n * n - n - 1), n), r(-2 * (n - 1), n))
            }
            Space::GrassmannR { m, n } => (r(-((m + n) as i64), 1), r(-2, 1)),
            Space::GrassmannC { m, n } => (r(-2 * (m + n) as i64, 1), r(-2, 1)),
            Space::GrassmannH { m, n } => (r(-2 * (m + n) as i64, 1), r(-1, 1)),
        }
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        let (lambda, mu) = self.eigenvalues();
        SpaceDescriptor {
            space: *self,
            total_group: self.total_group(),
            lambda,
            mu,
        }
    }

    /// Dimension of the subgroup K (zero for the group families).
    pub fn subgroup_dim(&self) -> usize {
        match *self {
            Space::So { .. } | Space::Su { .. } | Space::Sp { .. } => 0,
            Space::SuModSo { n } => n * (n - 1) / 2,
            Space::SpModU { n } => n * n,
            Space::So2nModUn { n } => n * n,
            Space::Su2nModSpn { n } => n * (2 * n + 1),
            Space::GrassmannR { m, n } => m * (m - 1) / 2 + n * (n - 1) / 2,
            Space::GrassmannC { m, n } => m * m + n * n,
            Space::GrassmannH { m, n } => m * (2 * m + 1) + n * (2 * n + 1),
        }
    }
}

/// A space together with its total group and expected eigenvalues.
#[derive(Debug, Clone, Serialize)]
pub struct SpaceDescriptor {
    pub space: Space,
    pub total_group: GroupId,
    #[serde(serialize_with = "ser_ratio")]
    pub lambda: Ratio<i64>,
    #[serde(serialize_with = "ser_ratio")]
    pub mu: Ratio<i64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    seq.serialize_element(r.numer())?;
    seq.serialize_element(r.denom())?;
    seq.end()
}

pub fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl SpaceDescriptor {
    pub fn lambda_f64(&self) -> f64 {
        ratio_to_f64(self.lambda)
    }

    pub fn mu_f64(&self) -> f64 {
        ratio_to_f64(self.mu)
    }

    /// Orthonormal basis of the horizontal space m inside the total algebra.
    ///
    /// Families whose listed generators only span m are orthonormalized with
    /// dependent directions dropped at 1e-10.
    pub fn horizontal_basis(&self) -> Result<TangentBasis, GroupError> {
        let raw = self.horizontal_generators()?;
        let elements = orthonormalize(raw, 1e-10);
        debug_assert_eq!(
            elements.len(),
            self.total_group.real_dim() - self.space.subgroup_dim()
        );
        Ok(TangentBasis {
            elements,
            kind: BasisTag::HorizontalM,
        })
    }

    fn horizontal_generators(&self) -> Result<Vec<ComplexMatrix>, GroupError> {
        let mut out = Vec::new();
        match self.space {
            Space::So { .. } | Space::Su { .. } | Space::Sp { .. } => {
                return Err(GroupError::NotAQuotient {
                    space: self.space.to_string(),
                })
            }
            // i m with m the symmetric traceless matrices; spanning set.
            Space::SuModSo { n } => {
                for r in 1..=n {
                    for s in r + 1..=n {
                        out.push(i_times(&x_sym(r, s, n)));
                        out.push(i_times(
                            &basis_matrix(BasisKind::DPair { r, s }, n).unwrap(),
                        ));
                    }
                }
            }
            Space::SpModU { n } => {
                for r in 1..=n {
                    for s in r + 1..=n {
                        let ix = i_times(&x_sym(r, s, n));
                        out.push(scaled_diag(&ix, &(-&ix), SQRT1_2)); // X^a
                        out.push(scaled_off(&ix, &ix, SQRT1_2)); // X^b
                    }
                }
                for t in 1..=n {
                    let id = i_times(&e_tt(t, n));
                    out.push(scaled_diag(&id, &(-&id), SQRT1_2)); // D^a
                    out.push(scaled_off(&id, &id, SQRT1_2)); // D^b
                }
            }
            Space::So2nModUn { n } => {
                for r in 1..=n {
                    for s in r + 1..=n {
                        let yr = y(r, s, n);
                        out.push(scaled_diag(&yr, &(-&yr), SQRT1_2)); // Y^a
                        out.push(scaled_off(&yr, &yr, SQRT1_2)); // Y^b
                    }
                }
            }
            // Spanning set in the [[Z, W], [-W̄, Zᵗ]] picture.
            Space::Su2nModSpn { n } => {
                for r in 1..=n {
                    for s in r + 1..=n {
                        let yr = y(r, s, n);
                        let ix = i_times(&x_sym(r, s, n));
                        let iy = i_times(&yr);
                        out.push(scaled_diag(&yr, &(-&yr), 0.5)); // Y^a
                        out.push(scaled_diag(&ix, &ix, 0.5)); // X^a
                        out.push(scaled_off(&yr, &yr, 0.5)); // Y^b
                        out.push(scaled_off(&iy, &(-&iy), 0.5)); // Y^c
                        let idp = i_times(&basis_matrix(BasisKind::DPair { r, s }, n).unwrap());
                        out.push(scaled_diag(&idp, &idp, 0.5)); // D^a
                    }
                }
            }
            Space::GrassmannR { m, n } => {
                for r in 1..=m {
                    for s in m + 1..=m + n {
                        out.push(y(r, s, m + n));
                    }
                }
            }
            Space::GrassmannC { m, n } => {
                for r in 1..=m {
                    for s in m + 1..=m + n {
                        out.push(y(r, s, m + n));
                        out.push(i_times(&x_sym(r, s, m + n)));
                    }
                }
            }
            Space::GrassmannH { m, n } => {
                let nn = m + n;
                for r in 1..=m {
                    for s in m + 1..=nn {
                        let yr = y(r, s, nn);
                        let ix = i_times(&x_sym(r, s, nn));
                        let xr = x_sym(r, s, nn);
                        out.push(scaled_diag(&yr, &yr, SQRT1_2)); // Y^a
                        out.push(scaled_diag(&ix, &(-&ix), SQRT1_2)); // X^a
                        out.push(scaled_off(&ix, &ix, SQRT1_2)); // X^b
                        out.push(scaled_off(&xr, &(-&xr), SQRT1_2)); // X^c
                    }
                }
            }
        }
        Ok(out)
    }

    /// Orthonormal generators of the subgroup algebra k, embedded in the
    /// total algebra. Empty for the group families.
    pub fn subgroup_generators(&self) -> Vec<ComplexMatrix> {
        match self.space {
            Space::So { .. } | Space::Su { .. } | Space::Sp { .. } => Vec::new(),
            Space::SuModSo { n } => so_basis(n),
            Space::SpModU { n } => u_basis(n)
                .iter()
                .map(|b| embed_u_in_sp(b).scale(C64::new(SQRT1_2, 0.0)))
                .collect(),
            Space::So2nModUn { n } => u_basis(n)
                .iter()
                .map(|b| embed_u_in_so2n(b).scale(C64::new(SQRT1_2, 0.0)))
                .collect(),
            Space::Su2nModSpn { n } => sp_basis(n).iter().map(conjugate_by_parity).collect(),
            Space::GrassmannR { m, n } => {
                let nn = m + n;
                let mut out = Vec::new();
                for r in 1..=m {
                    for s in r + 1..=m {
                        out.push(y(r, s, nn));
                    }
                }
                for r in m + 1..=nn {
                    for s in r + 1..=nn {
                        out.push(y(r, s, nn));
                    }
                }
                out
            }
            Space::GrassmannC { m, n } => {
                let nn = m + n;
                let mut out = Vec::new();
                let push_pair = |out: &mut Vec<ComplexMatrix>, r: usize, s: usize| {
                    out.push(y(r, s, nn));
                    out.push(i_times(&x_sym(r, s, nn)));
                };
                for r in 1..=m {
                    for s in r + 1..=m {
                        push_pair(&mut out, r, s);
                    }
                }
                for r in m + 1..=nn {
                    for s in r + 1..=nn {
                        push_pair(&mut out, r, s);
                    }
                }
                for t in 1..=nn {
                    out.push(i_times(&e_tt(t, nn)));
                }
                out
            }
            Space::GrassmannH { m, n } => {
                let nn = m + n;
                let mut out = Vec::new();
                let push_quad = |out: &mut Vec<ComplexMatrix>, r: usize, s: usize| {
                    let yr = y(r, s, nn);
                    let ix = i_times(&x_sym(r, s, nn));
                    let xr = x_sym(r, s, nn);
                    out.push(scaled_diag(&yr, &yr, SQRT1_2));
                    out.push(scaled_diag(&ix, &(-&ix), SQRT1_2));
                    out.push(scaled_off(&ix, &ix, SQRT1_2));
                    out.push(scaled_off(&xr, &(-&xr), SQRT1_2));
                };
                for r in 1..=m {
                    for s in r + 1..=m {
                        push_quad(&mut out, r, s);
                    }
                }
                for r in m + 1..=nn {
                    for s in r + 1..=nn {
                        push_quad(&mut out, r, s);
                    }
                }
                for t in 1..=nn {
                    let d = e_tt(t, nn);
                    let id = i_times(&d);
                    out.push(scaled_diag(&id, &(-&id), SQRT1_2));
                    out.push(scaled_off(&id, &id, SQRT1_2));
                    out.push(scaled_off(&d, &(-&d), SQRT1_2));
                }
                out
            }
        }
    }

    /// Haar sample of the subgroup K, embedded into the total group.
    pub fn subgroup_sample(&self, rng: &mut impl Rng) -> Result<ComplexMatrix, GroupError> {
        let k = match self.space {
            Space::So { .. } | Space::Su { .. } | Space::Sp { .. } => {
                return Err(GroupError::NotAQuotient {
                    space: self.space.to_string(),
                })
            }
            Space::SuModSo { n } => haar_so(n, rng),
            Space::SpModU { n } => embed_u_in_sp(&haar_u(n, rng)),
            Space::So2nModUn { n } => embed_u_in_so2n(&haar_u(n, rng)),
            Space::Su2nModSpn { n } => conjugate_by_parity(&haar_sp_quaternion(n, rng).embed()),
            Space::GrassmannR { m, n } => {
                let a = haar_so(m, rng);
                let b = haar_so(n, rng);
                ComplexMatrix::block_diag(&a, &b)
            }
            Space::GrassmannC { m, n } => {
                let a = haar_u(m, rng);
                let b = haar_u(n, rng);
                ComplexMatrix::block_diag(&a, &b)
            }
            Space::GrassmannH { m, n } => {
                let qa = haar_sp_quaternion(m, rng);
                let qb = haar_sp_quaternion(n, rng);
                let nn = m + n;
                let mut q = QuaternionMatrix::zeros(nn);
                for i in 0..m {
                    for j in 0..m {
                        q.set(i, j, qa.get(i, j));
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        q.set(m + i, m + j, qb.get(i, j));
                    }
                }
                q.embed()
            }
        };
        Ok(k)
    }
}

/// Embeds a unitary matrix u = x + i y into Sp(n) as `[[x, y], [-y, x]]`.
/// Exposed for membership tests of the embedded subgroup.
pub fn unitary_in_sp(u: &ComplexMatrix) -> ComplexMatrix {
    embed_u_in_sp(u)
}

/// The `[[z, 0], [0, z̄]]` embedding of a complex point as a quaternionic one
/// (w = 0), used by the quaternionic Grassmannian gallery construction.
pub fn complex_in_sp(z: &ComplexMatrix) -> ComplexMatrix {
    let n = z.rows();
    let zero = ComplexMatrix::zeros(n, n);
    ComplexMatrix::from_blocks(z, &zero, &zero, &z.conj())
}
