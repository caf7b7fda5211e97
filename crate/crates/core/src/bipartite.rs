//! Pure states of a two-part system A+B.
//!
//! A state is stored as its `d_a x d_b` amplitude matrix `a[i][mu]`, i.e. the
//! coefficients of `|psi> = sum a[i][mu] |i>|mu>` in the coordinate bases of
//! the two factors. Joint vectors use the index `k = i * d_b + mu`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, svd, trace, ComplexMatrix, Operator, MAX_JOINT_AMPLITUDES, MAX_OPERATOR_DIM,
};

/// Allowed deviation of `<psi|psi>` from one.
pub const NORM_TOL: f64 = 1e-9;

/// Tolerance for the density-matrix axioms (Hermiticity, unit trace, PSD).
pub const DENSITY_TOL: f64 = 1e-9;

/// Schmidt coefficients below `RANK_RTOL * largest` do not count towards the rank.
pub const RANK_RTOL: f64 = 1e-12;

/// Probabilities at or below this are skipped in the entropy sum.
const ENTROPY_CUTOFF: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "StateFile", try_from = "StateFile")]
pub struct BipartitePureState {
    amplitudes: ComplexMatrix,
}

impl BipartitePureState {
    /// Wraps an amplitude matrix, rejecting states whose norm is off by more than 1e-9.
    pub fn new(amplitudes: ComplexMatrix) -> Result<Self> {
        let count = amplitudes.rows() * amplitudes.cols();
        if count > MAX_JOINT_AMPLITUDES {
            return Err(Error::Capacity {
                what: "joint amplitude count",
                requested: count,
                limit: MAX_JOINT_AMPLITUDES,
            });
        }
        check_unit_norm(amplitudes.norm_sqr())?;
        Ok(Self { amplitudes })
    }

    /// From a joint vector indexed `k = i * dim_b + mu`.
    pub fn from_joint_vector(dim_a: usize, dim_b: usize, joint: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::new(dim_a, dim_b, joint.to_vec())?)
    }

    /// `|a> ⊗ |b>`, both factors must be unit vectors.
    pub fn from_product(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        check_unit_norm(a.iter().map(|z| z.norm_sqr()).sum())?;
        check_unit_norm(b.iter().map(|z| z.norm_sqr()).sum())?;
        let a = ComplexMatrix::column_vector(a)?;
        let b = ComplexMatrix::column_vector(b)?;
        Self::new(&a * &b.transpose())
    }

    pub fn dim_a(&self) -> usize {
        self.amplitudes.rows()
    }

    pub fn dim_b(&self) -> usize {
        self.amplitudes.cols()
    }

    pub fn amplitudes(&self) -> &ComplexMatrix {
        &self.amplitudes
    }

    /// Amplitudes flattened to the joint index `k = i * d_b + mu`.
    pub fn joint_vector(&self) -> Vec<Complex64> {
        self.amplitudes.as_slice().to_vec()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.dim_a(), self.dim_b()),
            (other.dim_a(), other.dim_b()),
            "states live on different spaces"
        );
        let overlap: Complex64 = self
            .amplitudes
            .as_slice()
            .iter()
            .zip(other.amplitudes.as_slice())
            .map(|(x, y)| x.conj() * y)
            .sum();
        overlap.norm_sqr()
    }
}

fn check_unit_norm(norm_sqr: f64) -> Result<()> {
    let deviation = (norm_sqr - 1.0).abs();
    if deviation > NORM_TOL {
        return Err(Error::NotNormalized {
            norm_sqr,
            deviation,
        });
    }
    Ok(())
}

/// On-disk state layout: `{"dim_a": dA, "dim_b": dB, "re": [...], "im": [...]}`, row-major over `(i, mu)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<BipartitePureState> for StateFile {
    fn from(s: BipartitePureState) -> Self {
        let dim_a = s.dim_a();
        let dim_b = s.dim_b();
        let data = s.amplitudes.into_vec();
        Self {
            dim_a,
            dim_b,
            re: data.iter().map(|z| z.re).collect(),
            im: data.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<StateFile> for BipartitePureState {
    type Error = Error;

    fn try_from(f: StateFile) -> Result<Self> {
        if f.re.len() != f.im.len() {
            return Err(Error::Format(format!(
                "re has {} entries but im has {}",
                f.re.len(),
                f.im.len()
            )));
        }
        let joint: Vec<_> =
            f.re.iter()
                .zip(&f.im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect();
        Self::from_joint_vector(f.dim_a, f.dim_b, &joint)
    }
}

/// Residuals of the three density-matrix axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDiagnostics {
    /// `||rho - rho^H||_F`
    pub hermiticity_residual: f64,
    /// `|tr rho - 1|`
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
}

impl DensityDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.hermiticity_residual <= DENSITY_TOL
            && self.trace_deviation <= DENSITY_TOL
            && self.min_eigenvalue >= -DENSITY_TOL
    }
}

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ComplexMatrix", try_from = "ComplexMatrix")]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let residual = op.hermiticity_residual();
        if residual > DENSITY_TOL {
            return Err(Error::NotHermitian {
                residual,
                tolerance: DENSITY_TOL,
            });
        }
        let tr = trace(&op);
        let deviation = (tr - Complex64::new(1.0, 0.0)).norm();
        if deviation > DENSITY_TOL {
            return Err(Error::TraceNotOne {
                trace: tr.re,
                deviation,
            });
        }
        if !shifted_cholesky_succeeds(&op) {
            let min_eigenvalue = min_eigenvalue(&op)?;
            if min_eigenvalue < -DENSITY_TOL {
                return Err(Error::NotPositive { min_eigenvalue });
            }
        }
        Ok(Self { op })
    }

    /// For constructions that satisfy the axioms exactly, e.g. `|psi><psi|`.
    fn new_unchecked(op: Operator) -> Self {
        debug_assert!((trace(&op).re - 1.0).abs() <= DENSITY_TOL);
        Self { op }
    }

    /// Recomputes all three axiom residuals from scratch.
    pub fn diagnostics(&self) -> Result<DensityDiagnostics> {
        Ok(DensityDiagnostics {
            hermiticity_residual: self.op.hermiticity_residual(),
            trace_deviation: (trace(&self.op) - Complex64::new(1.0, 0.0)).norm(),
            min_eigenvalue: min_eigenvalue(&self.op)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    /// `||self - other||_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.matrix().frobenius_distance(other.matrix())
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(Operator::new(m)?)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(rho: DensityMatrix) -> Self {
        rho.op.into_matrix()
    }
}

/// Cheap PSD test: a Cholesky factorization of `rho + tol * I` exists whenever
/// `lambda_min > -tol`. Returns false as soon as a pivot is not positive.
fn shifted_cholesky_succeeds(op: &Operator) -> bool {
    let n = op.dim();
    let m = op.matrix();
    // Lower triangle of the Hermitian part, overwritten in place by L.
    let mut l = ComplexMatrix::from_fn(n, n, |i, j| {
        if j > i {
            Complex64::new(0.0, 0.0)
        } else if i == j {
            Complex64::new(m.get(i, i).re + DENSITY_TOL, 0.0)
        } else {
            (m.get(i, j) + m.get(j, i).conj()) * 0.5
        }
    });
    for j in 0..n {
        let mut pivot = l.get(j, j).re;
        for k in 0..j {
            pivot -= l.get(j, k).norm_sqr();
        }
        if pivot.is_nan() || pivot <= 0.0 {
            return false;
        }
        let root = pivot.sqrt();
        l.set(j, j, Complex64::new(root, 0.0));
        for i in j + 1..n {
            let mut v = l.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, v / root);
        }
    }
    true
}

fn min_eigenvalue(op: &Operator) -> Result<f64> {
    Ok(hermitian_eig(op)?.eigenvalues[0])
}

/// Schmidt form `|psi> = sum_i c_i |u_i>|v_i>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtResult {
    /// Nonnegative, descending; `min(d_a, d_b)` entries.
    pub coefficients: Vec<f64>,
    /// `d_a x k`, orthonormal columns.
    pub basis_a: ComplexMatrix,
    /// `d_b x k`; columns at or beyond `rank` are zero placeholders.
    pub basis_b: ComplexMatrix,
    pub rank: usize,
}

impl SchmidtResult {
    /// Squared coefficients, the eigenvalues of the reduced density matrix.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    /// `sum_i c_i u_i v_i^T` as a `d_a x d_b` amplitude matrix.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.coefficients.len();
        let scaled = ComplexMatrix::from_fn(self.basis_a.rows(), k, |i, j| {
            self.basis_a.get(i, j) * self.coefficients[j]
        });
        &scaled * &self.basis_b.transpose()
    }

    /// `-sum P ln P` over the squared coefficients, in nats.
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.probabilities())
    }
}

pub(crate) fn shannon_entropy(probabilities: &[f64]) -> f64 {
    let s: f64 = probabilities
        .iter()
        .filter(|&&p| p > ENTROPY_CUTOFF)
        .map(|&p| -p * p.ln())
        .sum();
    s.max(0.0)
}

/// `<psi| F ⊗ I |psi> = sum_{i,j,mu} conj(a[j][mu]) a[i][mu] <j|F|i>`.
pub fn expectation(state: &BipartitePureState, f_a: &Operator) -> Result<f64> {
    if f_a.dim() != state.dim_a() {
        return Err(Error::DimensionMismatch(format!(
            "observable acts on dimension {}, system A has dimension {}",
            f_a.dim(),
            state.dim_a()
        )));
    }
    f_a.ensure_hermitian()?;
    let a = state.amplitudes();
    let f = f_a.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for mu in 0..state.dim_b() {
        for j in 0..state.dim_a() {
            let bra = a.get(j, mu).conj();
            if bra == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..state.dim_a() {
                acc += bra * a.get(i, mu) * f.get(j, i);
            }
        }
    }
    real_part_checked(acc)
}

pub(crate) fn real_part_checked(z: Complex64) -> Result<f64> {
    if z.im.abs() > 1e-10 {
        return Err(Error::NonRealExpectation(z.im));
    }
    Ok(z.re)
}

/// `rho_A = Tr_B |psi><psi|`, `(rho_A)_{ij} = sum_mu a[i][mu] conj(a[j][mu])`.
pub fn reduced_density(state: &BipartitePureState) -> Result<DensityMatrix> {
    let a = state.amplitudes();
    DensityMatrix::new(Operator::new(a * &a.adjoint())?)
}

/// `rho_B = Tr_A |psi><psi|`, `(rho_B)_{mu nu} = sum_i a[i][mu] conj(a[i][nu])`.
pub fn reduced_density_b(state: &BipartitePureState) -> Result<DensityMatrix> {
    let a = state.amplitudes();
    DensityMatrix::new(Operator::new(&a.transpose() * &a.conj())?)
}

/// Schmidt decomposition via the SVD of the amplitude matrix.
///
/// Each `basis_a` column is rephased so that its first entry of largest modulus
/// is real and nonnegative; `basis_b` absorbs the conjugate phase.
pub fn schmidt_decompose(state: &BipartitePureState) -> Result<SchmidtResult> {
    let decomposition = svd(state.amplitudes())?;
    let coefficients = decomposition.singular_values;
    let mut basis_a = decomposition.left;
    // a = U S V^H, so the B-side vectors are the conjugated right singular vectors.
    let mut basis_b = decomposition.right.conj();

    let largest = coefficients.first().copied().unwrap_or(0.0);
    let rank = coefficients
        .iter()
        .filter(|&&c| c > RANK_RTOL * largest)
        .count();

    for col in 0..coefficients.len() {
        let phase = pivot_phase(&basis_a, col);
        for i in 0..basis_a.rows() {
            basis_a.set(i, col, basis_a.get(i, col) * phase.conj());
        }
        for mu in 0..basis_b.rows() {
            let v = if col < rank {
                basis_b.get(mu, col) * phase
            } else {
                Complex64::new(0.0, 0.0)
            };
            basis_b.set(mu, col, v);
        }
    }

    Ok(SchmidtResult {
        coefficients,
        basis_a,
        basis_b,
        rank,
    })
}

/// Unit phase of the first entry whose modulus is within 1e-12 of the column maximum.
fn pivot_phase(m: &ComplexMatrix, col: usize) -> Complex64 {
    let column = m.column(col);
    let max = column.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match column.iter().find(|z| z.norm() >= max - 1e-12) {
        Some(z) if z.norm() > 0.0 => z / z.norm(),
        _ => Complex64::new(1.0, 0.0),
    }
}

/// Minimal purification `sum_k sqrt(p_k) |k> ⊗ |e_k>` with `d_b = d_a`.
///
/// The environment coordinate `e_k` labels rho's eigenvectors in order of
/// decreasing eigenvalue, so a pure `|0><0|` maps to `|0, 0>`.
pub fn purify(rho: &DensityMatrix) -> Result<BipartitePureState> {
    let eig = hermitian_eig(rho.operator())?;
    let d = rho.dim();
    let amplitudes = ComplexMatrix::from_fn(d, d, |i, k| {
        let source = d - 1 - k;
        eig.eigenvectors.get(i, source) * eig.eigenvalues[source].max(0.0).sqrt()
    });
    BipartitePureState::new(amplitudes)
}

/// Entanglement entropy in nats.
pub fn entanglement_entropy(state: &BipartitePureState) -> Result<f64> {
    Ok(schmidt_decompose(state)?.entropy())
}

/// `|psi><psi|` on the joint space, A-major.
pub fn joint_density(state: &BipartitePureState) -> Result<DensityMatrix> {
    let d = state.dim_a() * state.dim_b();
    if d > MAX_OPERATOR_DIM {
        return Err(Error::Capacity {
            what: "joint operator dimension",
            requested: d,
            limit: MAX_OPERATOR_DIM,
        });
    }
    let psi = state.amplitudes().as_slice();
    let m = ComplexMatrix::from_fn(d, d, |k, l| psi[k] * psi[l].conj());
    Ok(DensityMatrix::new_unchecked(Operator::new(m)?))
}
