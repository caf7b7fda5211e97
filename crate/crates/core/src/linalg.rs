//! Dense complex matrices and the two spectral factorizations used everywhere
//! else: Hermitian eigendecomposition and singular value decomposition.
//!
//! Storage is row-major. Tensor products follow the A-major joint-index
//! convention `k = i * d_b + mu`, so `diag(a, b) ⊗ I_2 = diag(a, a, b, b)`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest operator side accepted by [`kronecker_product`] and the other
/// dimension-growing constructors.
pub const MAX_OPERATOR_DIM: usize = 4096;

/// Largest number of amplitudes a bipartite pure state may hold (`d_a * d_b`).
pub const MAX_JOINT_AMPLITUDES: usize = 1 << 22;

/// Relative Hermiticity tolerance: `||H - H^H||_F <= 1e-9 * max(1, ||H||_F)`.
pub const HERMITIAN_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A dense complex matrix stored row-major. All entries are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixFile", try_from = "MatrixFile")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix shape {rows}x{cols} has an empty side"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix sides must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; n])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// A single column vector.
    pub fn column_vector(v: &[Complex64]) -> Result<Self> {
        Self::new(v.len(), 1, v.to_vec())
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `||self - other||_F`. Panics on shape mismatch.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        self.assert_same_shape(other);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `||A - A^H||_F`; zero shape requirement beyond squareness.
    pub fn hermiticity_residual(&self) -> f64 {
        assert!(
            self.is_square(),
            "Hermiticity is defined for square matrices"
        );
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn mat_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            v.len(),
            self.cols,
            "vector length does not match column count"
        );
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Tensor product with the A-major index convention. No capacity check.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    let dst = (i * other.rows + k) * cols + j * other.cols;
                    for (l, b) in other.row(k).iter().enumerate() {
                        out.data[dst + l] = a * b;
                    }
                }
            }
        }
        out
    }

    fn assert_same_shape(&self, other: &Self) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.assert_same_shape(rhs);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.assert_same_shape(rhs);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "inner dimensions differ: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                for (d, b) in dst.iter_mut().zip(rhs.row(k)) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

/// On-disk matrix layout: `{"rows": R, "cols": C, "re": [...], "im": [...]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<ComplexMatrix> for MatrixFile {
    fn from(m: ComplexMatrix) -> Self {
        Self {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re).collect(),
            im: m.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        if f.re.len() != f.im.len() {
            return Err(Error::Format(format!(
                "re has {} entries but im has {}",
                f.re.len(),
                f.im.len()
            )));
        }
        let data =
            f.re.iter()
                .zip(&f.im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect();
        ComplexMatrix::new(f.rows, f.cols, data)
    }
}

/// A square matrix acting on a `dim`-dimensional space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct Operator {
    matrix: ComplexMatrix,
}

impl Operator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                matrix.rows, matrix.cols
            )));
        }
        if matrix.rows > MAX_OPERATOR_DIM {
            return Err(Error::Capacity {
                what: "operator dimension",
                requested: matrix.rows,
                limit: MAX_OPERATOR_DIM,
            });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    /// Convenience constructor from a row-major list of real entries.
    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let data = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(ComplexMatrix::new(dim, dim, data)?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.matrix.hermiticity_residual()
    }

    /// Fails unless `||H - H^H||_F <= 1e-9 * max(1, ||H||_F)`.
    pub fn ensure_hermitian(&self) -> Result<()> {
        let residual = self.hermiticity_residual();
        let tolerance = HERMITIAN_TOL * self.matrix.frobenius_norm().max(1.0);
        if residual > tolerance {
            return Err(Error::NotHermitian {
                residual,
                tolerance,
            });
        }
        Ok(())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(Complex64::new(factor, 0.0)),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `<u| A |v>`.
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let av = self.matrix.mat_vec(v);
        u.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operators of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

impl TryFrom<ComplexMatrix> for Operator {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<Operator> for ComplexMatrix {
    fn from(op: Operator) -> Self {
        op.matrix
    }
}

/// Spectral decomposition `H = V diag(eigenvalues) V^H`, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    /// Column `n` is the unit eigenvector for `eigenvalues[n]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigResult {
    pub fn eigenvector(&self, n: usize) -> Vec<Complex64> {
        self.eigenvectors.column(n)
    }

    /// `V diag(weights) V^H` for an arbitrary real weight per eigenvector.
    pub fn recompose_with(&self, weights: &[f64]) -> ComplexMatrix {
        assert_eq!(weights.len(), self.eigenvalues.len());
        let v = &self.eigenvectors;
        let n = v.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for (k, &w) in weights.iter().enumerate() {
                    if w != 0.0 {
                        acc += v.get(i, k) * v.get(j, k).conj() * w;
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Tensor product `a ⊗ b` (A-major), capped at [`MAX_OPERATOR_DIM`].
pub fn kronecker_product(a: &Operator, b: &Operator) -> Result<Operator> {
    kronecker_product_with_limit(a, b, MAX_OPERATOR_DIM)
}

pub fn kronecker_product_with_limit(a: &Operator, b: &Operator, limit: usize) -> Result<Operator> {
    let dim = a.dim().saturating_mul(b.dim());
    if dim > limit {
        return Err(Error::Capacity {
            what: "operator dimension",
            requested: dim,
            limit,
        });
    }
    Ok(Operator {
        matrix: a.matrix.kron(&b.matrix),
    })
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
pub fn hermitian_eig(h: &Operator) -> Result<EigResult> {
    h.ensure_hermitian()?;
    let n = h.dim();
    // Exact Hermitian part; the solver only reads one triangle.
    let sym = ComplexMatrix::from_fn(n, n, |i, j| {
        (h.matrix.get(i, j) + h.matrix.get(j, i).conj()) * 0.5
    });
    let eig = SymmetricEigen::try_new(sym.to_nalgebra(), f64::EPSILON, 0)
        .ok_or(Error::NoConvergence("Hermitian eigensolver"))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Thin singular value decomposition `M = U diag(s) V^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    /// `rows x k` with orthonormal columns, `k = min(rows, cols)`.
    pub left: ComplexMatrix,
    /// Nonnegative, descending.
    pub singular_values: Vec<f64>,
    /// `cols x k` with orthonormal columns.
    pub right: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let scaled = ComplexMatrix::from_fn(self.left.rows(), k, |i, j| {
            self.left.get(i, j) * self.singular_values[j]
        });
        &scaled * &self.right.adjoint()
    }
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    let decomposition = SVD::try_new_unordered(m.to_nalgebra(), true, true, f64::EPSILON, 0)
        .ok_or(Error::NoConvergence("SVD"))?;
    let u = decomposition.u.as_ref().expect("U requested");
    let v_t = decomposition.v_t.as_ref().expect("V^H requested");
    let s = &decomposition.singular_values;

    let k = s.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));

    let left = ComplexMatrix::from_fn(m.rows(), k, |i, j| u[(i, order[j])]);
    let right = ComplexMatrix::from_fn(m.cols(), k, |i, j| v_t[(order[j], i)].conj());
    let singular_values = order.iter().map(|&j| s[j].max(0.0)).collect();
    Ok(Svd {
        left,
        singular_values,
        right,
    })
}

pub fn trace(a: &Operator) -> Complex64 {
    (0..a.dim()).map(|i| a.matrix.get(i, i)).sum()
}

/// `||V^H V - I||_F` over the given columns.
pub fn orthonormality_residual(v: &ComplexMatrix, columns: usize) -> f64 {
    let mut acc = 0.0;
    for a in 0..columns {
        for b in 0..columns {
            let dot: Complex64 = (0..v.rows())
                .map(|i| v.get(i, a).conj() * v.get(i, b))
                .sum();
            let target = if a == b { ONE } else { ZERO };
            acc += (dot - target).norm_sqr();
        }
    }
    acc.sqrt()
}
