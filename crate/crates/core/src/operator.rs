//! Dense operators with role-specific invariants.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::kernel;
use crate::TOL;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Real row-major matrix literal.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(
        rows,
        cols,
        &data
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect::<Vec<_>>(),
    )
}

/// `|v⟩⟨v|`
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(QError::Invalid(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Embeds an operator acting on `qubits` (global positions) into `n` qubits.
pub fn embed_on_qubits(op: &CMatrix, n: usize, qubits: &[usize]) -> Result<CMatrix> {
    if op.nrows() != 1 << qubits.len() || op.ncols() != op.nrows() {
        return Err(QError::DimensionMismatch {
            expected: 1 << qubits.len(),
            got: op.nrows(),
        });
    }
    if qubits.iter().any(|&q| q >= n) {
        return Err(QError::Invalid(
            "qubit index outside the register space".into(),
        ));
    }
    Ok(kernel::embed(op, n, qubits))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        qubit_count(matrix.nrows())?;
        if matrix.nrows() != matrix.ncols() {
            return Err(QError::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let dev = max_abs_diff(&(matrix.adjoint() * &matrix), &identity(matrix.nrows()));
        if dev > TOL {
            return Err(QError::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    /// For matrices that are unitary by construction (products of unitaries, gate formulas).
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        // the check is cubic; skip it on large composites
        debug_assert!(
            matrix.nrows() > 64
                || max_abs_diff(&(matrix.adjoint() * &matrix), &identity(matrix.nrows())) < 1e-7
        );
        Self { matrix }
    }

    pub fn identity(qubits: usize) -> Self {
        Self {
            matrix: identity(1 << qubits),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.matrix.nrows().trailing_zeros() as usize
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &UnitaryOperator) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(QError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn tensor(&self, other: &UnitaryOperator) -> Self {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// A unitary whose first column is the unit vector `v` (a phased
    /// Householder reflection), so it prepares `v` from `|0…0⟩`.
    pub fn preparing(v: &CVector) -> Result<Self> {
        qubit_count(v.len())?;
        let norm = v.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(QError::NotNormalized(norm));
        }
        let phase = if v[0].norm() > 1e-15 {
            v[0] / v[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let w = v.unscale(1.0).map(|z| z * phase.conj());
        let mut u = -w.clone();
        u[0] += Complex64::new(1.0, 0.0);
        let d = v.len();
        let reflect = if u.norm() < 1e-15 {
            identity(d)
        } else {
            identity(d) - (&u * u.adjoint()).scale(2.0 / u.norm_squared())
        };
        Ok(Self {
            matrix: reflect.map(|z| z * phase),
        })
    }

    /// Lifts to `n` qubits acting on the given global positions.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> Result<Self> {
        Ok(Self {
            matrix: embed_on_qubits(&self.matrix, n, qubits)?,
        })
    }
}

/// `P ⊗ U + (I − P) ⊗ I`: applies `u` to the trailing qubits when the
/// leading ones lie in the range of `p`.
pub fn controlled_on(p: &Projector, u: &UnitaryOperator) -> UnitaryOperator {
    let rest = identity(p.dim()) - p.matrix();
    let m = kron(p.matrix(), u.matrix()) + kron(&rest, &identity(u.dim()));
    UnitaryOperator::from_trusted(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QError::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let dev = max_abs_diff(&matrix, &matrix.adjoint());
        if dev > TOL {
            return Err(QError::NotHermitian(dev));
        }
        // Symmetrize away round-off.
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `⟨v|H|v⟩` (real part).
    pub fn expectation(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.matrix * v)).re
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    op: HermitianOperator,
}

impl Projector {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let op = HermitianOperator::new(matrix)?;
        let m = op.matrix();
        let dev = max_abs_diff(&(m * m), m);
        if dev > TOL {
            return Err(QError::NotProjector(dev));
        }
        Ok(Self { op })
    }

    /// Diagonal projector onto the listed computational basis states.
    pub fn from_basis(dim: usize, basis: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut m = CMatrix::zeros(dim, dim);
        for i in basis {
            if i >= dim {
                return Err(QError::OutOfRange(format!("basis index {i} >= {dim}")));
            }
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self {
            op: HermitianOperator { matrix: m },
        })
    }

    /// Projector onto the span of orthonormal vectors.
    pub fn from_orthonormal(vectors: &[CVector]) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| QError::Invalid("no vectors".into()))?;
        let mut m = CMatrix::zeros(dim, dim);
        for v in vectors {
            if v.len() != dim {
                return Err(QError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            m += outer(v);
        }
        Self::new(m)
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self {
            op: HermitianOperator { matrix },
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn hermitian(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `I - P`
    pub fn complement(&self) -> Self {
        Self {
            op: HermitianOperator {
                matrix: identity(self.dim()) - self.matrix(),
            },
        }
    }

    pub fn tensor(&self, other: &Projector) -> Self {
        Self {
            op: HermitianOperator {
                matrix: kron(self.matrix(), other.matrix()),
            },
        }
    }

    /// Rank, i.e. the trace.
    pub fn rank(&self) -> usize {
        self.matrix().trace().re.round() as usize
    }

    /// `-P + (I - P)`: the phase flip on the range of `P`.
    pub fn phase_flip(&self) -> UnitaryOperator {
        UnitaryOperator::from_trusted(identity(self.dim()) - self.matrix().scale(2.0))
    }

    /// Orthonormal basis of the range.
    pub fn range_basis(&self) -> Vec<CVector> {
        let m = self.matrix();
        let d = self.dim();
        let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)].norm() < TOL));
        if diagonal {
            return (0..d)
                .filter(|&i| m[(i, i)].re > 0.5)
                .map(|i| {
                    CVector::from_fn(d, |k, _| {
                        if k == i {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                })
                .collect();
        }
        let eig = crate::eig::eig_hermitian_matrix(m);
        eig.pairs()
            .filter(|(val, _)| *val > 0.5)
            .map(|(_, v)| v)
            .collect()
    }
}
