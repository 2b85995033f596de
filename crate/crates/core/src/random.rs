//! Random states and operators for property checks and cheating-prover sweeps.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::layout::RegisterLayout;
use crate::operator::{CMatrix, CVector, Projector, UnitaryOperator};
use crate::state::{DensityOperator, StateVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unitary on `qubits` qubits (QR of a Ginibre matrix with the
/// phases of R's diagonal divided out).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, qubits: usize) -> UnitaryOperator {
    let d = 1 << qubits;
    let qr = ginibre(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    UnitaryOperator::from_trusted(q)
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, layout: &RegisterLayout) -> StateVector {
    StateVector::from_trusted(layout.clone(), random_vector(rng, layout.dim()))
}

/// Random mixed state `G G† / tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(
    rng: &mut R,
    layout: &RegisterLayout,
    rank: usize,
) -> DensityOperator {
    let g = ginibre(rng, layout.dim(), rank.max(1));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_trusted(layout.clone(), m.unscale(tr))
}

/// Projector onto a Haar-random subspace of the given rank.
pub fn random_projector<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Projector {
    let qubits = dim.trailing_zeros() as usize;
    let u = haar_unitary(rng, qubits);
    let cols = u.matrix().columns(0, rank.min(dim)).into_owned();
    Projector::from_trusted(&cols * cols.adjoint())
}
