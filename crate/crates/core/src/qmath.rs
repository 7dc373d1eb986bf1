//! Dense complex linear algebra for the 2-, 4- and 16-dimensional objects
//! used throughout the crate.
//!
//! Density matrices are vectorized row-major: `vec(rho)[i * d + j] = rho[(i, j)]`.
//! Under this convention `vec(X rho Y) = (X ⊗ Yᵀ) vec(rho)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// Embed a single-qubit operator on `qubit` (0 = leftmost factor) of an
/// `n_qubits` register.
pub fn on_qubit(op: &ComplexMatrix, qubit: usize, n_qubits: usize) -> ComplexMatrix {
    (0..n_qubits).fold(identity(1), |acc, k| {
        if k == qubit {
            kron(&acc, op)
        } else {
            kron(&acc, &identity(2))
        }
    })
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && max_abs_diff(a, b) <= tol
}

pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn require_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidInput(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub fn require_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    require_square(m)?;
    let deviation = hermiticity_deviation(m);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Phase-insensitive distance `min_χ ‖u − e^{iχ} v‖_F`.
///
/// The minimizing phase is `arg Tr(v† u)`. The difference is formed
/// explicitly; the expanded form loses half the digits near zero.
pub fn phase_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    let overlap = (v.adjoint() * u).trace();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    (u - v.map(|z| z * phase)).norm()
}

pub fn vectorize(rho: &ComplexMatrix) -> DVector<Complex64> {
    let d = rho.nrows();
    DVector::from_iterator(d * d, (0..d).flat_map(|i| (0..d).map(move |j| rho[(i, j)])))
}

pub fn devectorize(v: &DVector<Complex64>) -> ComplexMatrix {
    let d = (v.len() as f64).sqrt().round() as usize;
    assert_eq!(d * d, v.len(), "vector length is not a perfect square");
    ComplexMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

/// Superoperator of `rho -> left * rho * right` in the row-major convention.
pub fn sandwich(left: &ComplexMatrix, right: &ComplexMatrix) -> ComplexMatrix {
    kron(left, &right.transpose())
}

/// Superoperator of the unitary conjugation `rho -> u rho u†`.
pub fn conjugation(u: &ComplexMatrix) -> ComplexMatrix {
    kron(u, &u.map(|z| z.conj()))
}

pub fn apply_superoperator(sup: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    devectorize(&(sup * vectorize(rho)))
}

fn one_norm(m: &ComplexMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

// Padé degrees with their backward-error thresholds on the 1-norm
// (Higham 2005, Table 10.2 in double precision).
#[allow(clippy::excessive_precision)]
const PADE_THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_230e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
    (13, 5.371_920_351_148_152e0),
];

fn pade_coefficients(degree: usize) -> &'static [f64] {
    match degree {
        3 => &[120., 60., 12., 1.],
        5 => &[30240., 15120., 3360., 420., 30., 1.],
        7 => &[17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.],
        9 => &[
            17643225600.,
            8821612800.,
            2075673600.,
            302702400.,
            30270240.,
            2162160.,
            110880.,
            3960.,
            90.,
            1.,
        ],
        13 => &[
            64764752532480000.,
            32382376266240000.,
            7771770303897600.,
            1187353796428800.,
            129060195264000.,
            10559470521600.,
            670442572800.,
            33522128640.,
            1323241920.,
            40840800.,
            960960.,
            16380.,
            182.,
            1.,
        ],
        _ => unreachable!("unsupported Padé degree {degree}"),
    }
}

/// Numerator/denominator halves `(U, V)` of the diagonal Padé approximant,
/// `r(A) = (V − U)⁻¹ (V + U)`.
fn pade_uv(a: &ComplexMatrix, degree: usize) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.nrows();
    let b = pade_coefficients(degree);
    let id = identity(n);
    let scale = |m: &ComplexMatrix, s: f64| m.map(|z| z * s);
    let a2 = a * a;
    if degree == 13 {
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let u_inner = &a6 * (scale(&a6, b[13]) + scale(&a4, b[11]) + scale(&a2, b[9]))
            + scale(&a6, b[7])
            + scale(&a4, b[5])
            + scale(&a2, b[3])
            + scale(&id, b[1]);
        let u = a * u_inner;
        let v = &a6 * (scale(&a6, b[12]) + scale(&a4, b[10]) + scale(&a2, b[8]))
            + scale(&a6, b[6])
            + scale(&a4, b[4])
            + scale(&a2, b[2])
            + scale(&id, b[0]);
        return (u, v);
    }
    // Low degrees: accumulate even powers directly.
    let mut u_inner = scale(&id, b[1]);
    let mut v = scale(&id, b[0]);
    let mut power = id.clone();
    for k in 1..=degree / 2 {
        power = &power * &a2;
        u_inner += scale(&power, b[2 * k + 1]);
        v += scale(&power, b[2 * k]);
    }
    (a * u_inner, v)
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant. Valid for non-normal and defective inputs.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = require_square(m)?;
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(m.clone());
    }
    let norm = one_norm(m);
    let (degree, squarings) = match PADE_THETA.iter().find(|(_, theta)| norm <= *theta) {
        Some(&(degree, _)) => (degree, 0u32),
        None => {
            let theta13 = PADE_THETA[4].1;
            (13, (norm / theta13).log2().ceil().max(0.0) as u32)
        }
    };
    let scaled = m.map(|z| z / 2f64.powi(squarings as i32));
    let (u, v) = pade_uv(&scaled, degree);
    let numer = &v + &u;
    let denom = &v - &u;
    let mut result = denom
        .lu()
        .solve(&numer)
        .ok_or_else(|| Error::InvalidInput("singular Padé denominator".into()))?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if !is_finite(&result) {
        return Err(Error::NonFinite);
    }
    Ok(result)
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
/// Columns of the returned matrix are the matching eigenvectors.
pub fn eigh_descending(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let herm = (m + m.adjoint()).map(|z| z * 0.5);
    let mut values: Vec<f64> = nalgebra::SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<Complex64>);

impl StateVector {
    /// Normalizes `amplitudes`; fails for a zero or non-finite vector.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if norm == 0.0 {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        Ok(Self(amplitudes / Complex64::from(norm)))
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        &self.0 * self.0.adjoint()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector(self.0.kronecker(&other.0))
    }

    pub fn evolve(&self, u: &ComplexMatrix) -> StateVector {
        StateVector(u * &self.0)
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.0.dotc(&other.0)
    }
}
