//! Dense complex matrix kernel.
//!
//! Everything downstream (group points, Lie-algebra directions, constant
//! matrices) is carried by [`ComplexMatrix`], a small row-major dense matrix
//! of `Complex64` entries. The module also provides the canonical basis
//! matrices
//!
//! ```text
//! E_rs               single 1 at (r, s)
//! X_rs = (E_rs + E_sr) / √2
//! Y_rs = (E_rs - E_sr) / √2
//! D_rs = (E_rr - E_ss) / √2
//! D_t  = E_tt
//! ```
//!
//! the trace metric `g(Z, W) = Re tr(Z* W)`, a scaling-and-squaring matrix
//! exponential, and the constant matrices `J_n`, `I_{m,n}`, `P_m`.
//!
//! Indices in the public API are 1-based; storage is 0-based row-major.

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Shorthand for the scalar type used everywhere.
pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("index ({r}, {s}) out of range for size {n}")]
    IndexOutOfRange { r: usize, s: usize, n: usize },
    #[error("basis indices must satisfy {requirement}, got ({r}, {s})")]
    BadBasisIndices {
        requirement: &'static str,
        r: usize,
        s: usize,
    },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from real entries, row by row.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    /// Conjugate transpose `A*`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum (operator 1-norm).
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Block matrix `[[a, b], [c, d]]`; all blocks must share dimensions.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let n = a.rows;
        let m = a.cols;
        debug_assert!(b.rows == n && c.cols == m && d.rows == c.rows && d.cols == b.cols);
        let mut out = Self::zeros(n + c.rows, m + b.cols);
        for i in 0..n {
            for j in 0..m {
                out[(i, j)] = a[(i, j)];
            }
            for j in 0..b.cols {
                out[(i, m + j)] = b[(i, j)];
            }
        }
        for i in 0..c.rows {
            for j in 0..m {
                out[(n + i, j)] = c[(i, j)];
            }
            for j in 0..d.cols {
                out[(n + i, m + j)] = d[(i, j)];
            }
        }
        out
    }

    /// Block-diagonal matrix `diag(a, b)` with zero off-diagonal blocks.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let za = Self::zeros(a.rows, b.cols);
        let zb = Self::zeros(b.rows, a.cols);
        Self::from_blocks(a, &za, &zb, b)
    }

    /// Real part of the Frobenius inner product with `other`, no checks.
    fn frobenius_re(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> C64 {
        assert!(self.is_square(), "det of non-square matrix");
        let n = self.rows;
        let mut lu = self.clone();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if piv != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = t;
                }
                det = -det;
            }
            det *= lu[(k, k)];
            let inv = C64::new(1.0, 0.0) / lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] * inv;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let sub = f * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        det
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = a * rhs[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }
}

/// Canonical basis matrix kinds. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `E_rs`: single 1 at position (r, s); any `1 <= r, s <= n`.
    E { r: usize, s: usize },
    /// `X_rs = (E_rs + E_sr) / √2`, `r < s`.
    X { r: usize, s: usize },
    /// `Y_rs = (E_rs - E_sr) / √2`, `r < s`.
    Y { r: usize, s: usize },
    /// `D_rs = (E_rr - E_ss) / √2`, `r < s`.
    DPair { r: usize, s: usize },
    /// `D_t = E_tt`, the single-diagonal unit used in the sp(n) basis.
    DSingle { t: usize },
}

/// Builds one of the canonical n x n basis matrices.
pub fn basis_matrix(kind: BasisKind, n: usize) -> Result<ComplexMatrix, MatrixError> {
    let one = C64::new(1.0, 0.0);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match kind {
        BasisKind::E { r, s } => {
            if r == 0 || s == 0 || r > n || s > n {
                return Err(MatrixError::IndexOutOfRange { r, s, n });
            }
            let mut m = ComplexMatrix::zeros(n, n);
            m[(r - 1, s - 1)] = one;
            Ok(m)
        }
        BasisKind::X { r, s } | BasisKind::Y { r, s } | BasisKind::DPair { r, s } => {
            if r == 0 || s == 0 || r > n || s > n {
                return Err(MatrixError::IndexOutOfRange { r, s, n });
            }
            if r >= s {
                return Err(MatrixError::BadBasisIndices {
                    requirement: "r < s",
                    r,
                    s,
                });
            }
            let mut m = ComplexMatrix::zeros(n, n);
            match kind {
                BasisKind::X { .. } => {
                    m[(r - 1, s - 1)] = h;
                    m[(s - 1, r - 1)] = h;
                }
                BasisKind::Y { .. } => {
                    m[(r - 1, s - 1)] = h;
                    m[(s - 1, r - 1)] = -h;
                }
                _ => {
                    m[(r - 1, r - 1)] = h;
                    m[(s - 1, s - 1)] = -h;
                }
            }
            Ok(m)
        }
        BasisKind::DSingle { t } => {
            if t == 0 || t > n {
                return Err(MatrixError::IndexOutOfRange { r: t, s: t, n });
            }
            let mut m = ComplexMatrix::zeros(n, n);
            m[(t - 1, t - 1)] = one;
            Ok(m)
        }
    }
}

/// Trace metric `g(Z, W) = Re tr(Z* W)`.
pub fn trace_metric(z: &ComplexMatrix, w: &ComplexMatrix) -> Result<f64, MatrixError> {
    if (z.rows, z.cols) != (w.rows, w.cols) {
        return Err(MatrixError::DimensionMismatch(z.rows, z.cols, w.rows, w.cols));
    }
    Ok(z.frobenius_re(w))
}

/// Matrix exponential by scaling and squaring with a truncated Taylor core.
///
/// The argument is scaled to 1-norm <= 0.5, the series is summed until the
/// term norm drops below 1e-18 relative, and the result is squared back.
pub fn matrix_exp(x: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    if !x.is_square() {
        return Err(MatrixError::NotSquare(x.rows, x.cols));
    }
    if !x.all_finite() {
        for i in 0..x.rows {
            for j in 0..x.cols {
                let z = x[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(MatrixError::NonFinite(i, j));
                }
            }
        }
    }
    let n = x.rows;
    let norm = x.one_norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = x.scale(C64::new(2f64.powi(-(squarings as i32)), 0.0));
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=40u32 {
        term = &term * &scaled;
        term = term.scale(C64::new(1.0 / k as f64, 0.0));
        result = &result + &term;
        if term.one_norm() < 1e-18 * result.one_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// `J_n = [[0, I_n], [-I_n, 0]]`, size 2n x 2n.
pub fn j_matrix(n: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(n);
    let z = ComplexMatrix::zeros(n, n);
    ComplexMatrix::from_blocks(&z, &id, &(-&id), &z)
}

/// `I_{m,n} = diag(I_m, -I_n)`, size (m+n) x (m+n).
pub fn i_mn_matrix(m: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m + n, m + n, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i < m {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    })
}

/// `P_m = diag(I_m, 0)`: projector onto the first m of `size` coordinates.
pub fn p_matrix(m: usize, size: usize) -> ComplexMatrix {
    assert!(m <= size);
    ComplexMatrix::from_fn(size, size, |i, j| {
        if i == j && i < m {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(n: usize, scale: f64, seed: u64) -> ComplexMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(n, n, |_, _| {
            c(rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale)
        })
    }

    #[test]
    fn basis_examples() {
        let e = basis_matrix(BasisKind::E { r: 1, s: 2 }, 2).unwrap();
        assert_eq!(e[(0, 1)], c(1.0, 0.0));
        assert_eq!(e[(0, 0)], c(0.0, 0.0));

        let y = basis_matrix(BasisKind::Y { r: 1, s: 2 }, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(y[(0, 1)], c(h, 0.0));
        assert_eq!(y[(1, 0)], c(-h, 0.0));

        let d = basis_matrix(BasisKind::DPair { r: 1, s: 2 }, 3).unwrap();
        assert_eq!(d[(0, 0)], c(h, 0.0));
        assert_eq!(d[(1, 1)], c(-h, 0.0));
        assert_eq!(d[(2, 2)], c(0.0, 0.0));
    }

    #[test]
    fn basis_index_errors() {
        assert!(basis_matrix(BasisKind::E { r: 0, s: 1 }, 2).is_err());
        assert!(basis_matrix(BasisKind::E { r: 1, s: 3 }, 2).is_err());
        assert!(basis_matrix(BasisKind::Y { r: 2, s: 2 }, 3).is_err());
        assert!(basis_matrix(BasisKind::X { r: 3, s: 1 }, 3).is_err());
        assert!(basis_matrix(BasisKind::DSingle { t: 4 }, 3).is_err());
    }

    #[test]
    fn trace_metric_examples() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(trace_metric(&id, &id).unwrap(), 2.0);

        let y = basis_matrix(BasisKind::Y { r: 1, s: 2 }, 2).unwrap();
        assert!((trace_metric(&y, &y).unwrap() - 1.0).abs() < 1e-15);

        let x = basis_matrix(BasisKind::X { r: 1, s: 2 }, 2).unwrap();
        assert!(trace_metric(&x, &y).unwrap().abs() < 1e-15);

        let rect = ComplexMatrix::zeros(2, 3);
        assert!(trace_metric(&id, &rect).is_err());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(3, 3);
        let e = matrix_exp(&z).unwrap();
        assert!((&e - &ComplexMatrix::identity(3)).max_abs() < 1e-16);
    }

    #[test]
    fn exp_rotation_closed_form() {
        // exp(theta * sqrt(2) * Y_12) is the planar rotation by theta.
        let y = basis_matrix(BasisKind::Y { r: 1, s: 2 }, 2).unwrap();
        // theta = 10 exercises the scaling-and-squaring path at the top of
        // the advertised accuracy range (argument norm ~10).
        for &theta in &[0.1, 0.7, 2.5, -1.3, 10.0] {
            let gen = y.scale(c(theta * std::f64::consts::SQRT_2, 0.0));
            let e = matrix_exp(&gen).unwrap();
            let rot = ComplexMatrix::from_real_rows(&[
                vec![theta.cos(), theta.sin()],
                vec![-theta.sin(), theta.cos()],
            ]);
            assert!((&e - &rot).max_abs() < 1e-13, "theta = {theta}");
        }
    }

    #[test]
    fn exp_det_vs_trace() {
        for seed in 0..10u64 {
            let x = random_matrix(4, 1.0, seed);
            let e = matrix_exp(&x).unwrap();
            let lhs = e.det();
            let rhs = x.trace().exp();
            assert!(
                (lhs - rhs).norm() < 1e-12 * rhs.norm(),
                "seed {seed}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn exp_rejects_non_finite() {
        let mut x = ComplexMatrix::zeros(2, 2);
        x[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matrix_exp(&x).is_err());
    }

    #[test]
    fn constants() {
        let j = j_matrix(1);
        assert_eq!(j[(0, 1)], c(1.0, 0.0));
        assert_eq!(j[(1, 0)], c(-1.0, 0.0));

        let imn = i_mn_matrix(2, 1);
        assert_eq!(imn[(0, 0)], c(1.0, 0.0));
        assert_eq!(imn[(1, 1)], c(1.0, 0.0));
        assert_eq!(imn[(2, 2)], c(-1.0, 0.0));

        let p = p_matrix(2, 3);
        assert_eq!(p[(0, 0)], c(1.0, 0.0));
        assert_eq!(p[(1, 1)], c(1.0, 0.0));
        assert_eq!(p[(2, 2)], c(0.0, 0.0));
    }

    #[test]
    fn det_small_cases() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(1.0, 1.0),
            (0, 1) => c(2.0, 0.0),
            (1, 0) => c(0.0, -1.0),
            _ => c(3.0, 0.0),
        });
        // det = (1+i)*3 - 2*(-i) = 3 + 5i
        assert!((m.det() - c(3.0, 5.0)).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn exp_inverse_law(seed in 0u64..200) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2usize..=5);
            let scale = rng.gen_range(0.1..1.2);
            let x = random_matrix(n, scale, seed.wrapping_add(1));
            prop_assume!(x.one_norm() <= 5.0);
            let e = matrix_exp(&x).unwrap();
            let einv = matrix_exp(&(-&x)).unwrap();
            let prod = &e * &einv;
            prop_assert!((&prod - &ComplexMatrix::identity(n)).max_abs() < 1e-12);
        }

        #[test]
        fn exp_transpose_and_conjugate_laws(seed in 0u64..100) {
            let x = random_matrix(4, 0.8, seed.wrapping_mul(7919));
            let et = matrix_exp(&x.transpose()).unwrap();
            let te = matrix_exp(&x).unwrap().transpose();
            prop_assert!((&et - &te).max_abs() < 1e-12);
            let ec = matrix_exp(&x.conj()).unwrap();
            let ce = matrix_exp(&x).unwrap().conj();
            prop_assert!((&ec - &ce).max_abs() < 1e-12);
        }
    }
}
