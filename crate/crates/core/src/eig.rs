//! Hermitian eigendecomposition, backed by nalgebra's symmetric eigensolver
//! (Householder tridiagonalization + implicit QR), sorted descending.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::Result;
use crate::operator::{CMatrix, CVector, HermitianOperator};

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, aligned with `values`.
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn top(&self) -> (f64, CVector) {
        (self.values[0], self.vectors.column(0).into_owned())
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, CVector)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, self.vector(i)))
    }

    /// `Σ λ v v†`
    pub fn reconstruct(&self) -> CMatrix {
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        &self.vectors * diag * self.vectors.adjoint()
    }

    /// `Σ f(λ) v v†`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| Complex64::new(f(v), 0.0)),
        ));
        &self.vectors * diag * self.vectors.adjoint()
    }
}

/// Full spectrum of a Hermitian operator, descending, with orthonormal eigenvectors.
pub fn eig_hermitian(m: &HermitianOperator) -> EigenDecomposition {
    eig_hermitian_matrix(m.matrix())
}

/// Validates Hermiticity (tolerance 1e-9) before decomposing.
pub fn eig_hermitian_checked(m: &CMatrix) -> Result<EigenDecomposition> {
    let h = HermitianOperator::new(m.clone())?;
    Ok(eig_hermitian(&h))
}

pub(crate) fn eig_hermitian_matrix(m: &CMatrix) -> EigenDecomposition {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i))
            .collect::<Vec<_>>(),
    );
    EigenDecomposition { values, vectors }
}

/// Largest eigenvalue and a corresponding unit eigenvector.
pub fn top_eigen(m: &CMatrix) -> (f64, CVector) {
    eig_hermitian_matrix(m).top()
}
