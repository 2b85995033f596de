//! Index-level kernels over dense amplitude buffers.
//!
//! `n` is the total qubit count and qubit `g` lives at bit `n - 1 - g`
//! of a basis index. Local indices over a target list are big-endian in
//! the list order.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub(crate) type C = Complex64;

/// Basis-index offset contributed by each local index over `qubits`.
pub(crate) fn offsets(n: usize, qubits: &[usize]) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|l| {
            let mut off = 0;
            for (t, &q) in qubits.iter().enumerate() {
                if (l >> (k - 1 - t)) & 1 == 1 {
                    off |= 1 << (n - 1 - q);
                }
            }
            off
        })
        .collect()
}

/// The qubits of `0..n` not listed in `qubits`, ascending.
pub(crate) fn complement(n: usize, qubits: &[usize]) -> Vec<usize> {
    (0..n).filter(|q| !qubits.contains(q)).collect()
}

/// Applies `mat` (dimension `2^k`) to the listed qubits in place.
pub(crate) fn apply_matrix(amps: &mut [C], n: usize, qubits: &[usize], mat: &DMatrix<C>) {
    let loc = offsets(n, qubits);
    let rest = offsets(n, &complement(n, qubits));
    let d = loc.len();
    debug_assert_eq!(mat.nrows(), d);
    let mut buf = vec![C::new(0.0, 0.0); d];
    for &base in &rest {
        for (l, off) in loc.iter().enumerate() {
            buf[l] = amps[base + off];
        }
        for (r, off) in loc.iter().enumerate() {
            let mut acc = C::new(0.0, 0.0);
            for (c, b) in buf.iter().enumerate() {
                acc += mat[(r, c)] * b;
            }
            amps[base + off] = acc;
        }
    }
}

/// Applies `mat` to the listed qubits of every column of a square matrix.
pub(crate) fn apply_matrix_columns(
    m: &mut DMatrix<C>,
    n: usize,
    qubits: &[usize],
    mat: &DMatrix<C>,
) {
    let d = m.nrows();
    for col in m.as_mut_slice().chunks_mut(d) {
        apply_matrix(col, n, qubits, mat);
    }
}

/// `rho -> U rho U†` with `U` acting on the listed qubits.
pub(crate) fn conjugate_density(
    rho: &DMatrix<C>,
    n: usize,
    qubits: &[usize],
    mat: &DMatrix<C>,
) -> DMatrix<C> {
    let mut left = rho.clone();
    apply_matrix_columns(&mut left, n, qubits, mat);
    // (U rho)† = rho U†, and U (rho U†) is the result.
    let mut out = left.adjoint();
    apply_matrix_columns(&mut out, n, qubits, mat);
    out
}

/// Exchanges qubits `a[i]` and `b[i]` pairwise, optionally only where `control` is set.
pub(crate) fn swap_qubits(
    amps: &mut [C],
    n: usize,
    a: &[usize],
    b: &[usize],
    control: Option<usize>,
) {
    debug_assert_eq!(a.len(), b.len());
    let ctrl_mask = control.map(|c| 1usize << (n - 1 - c));
    for idx in 0..amps.len() {
        if let Some(m) = ctrl_mask {
            if idx & m == 0 {
                continue;
            }
        }
        let mut j = idx;
        for (&qa, &qb) in a.iter().zip(b) {
            let ba = (idx >> (n - 1 - qa)) & 1;
            let bb = (idx >> (n - 1 - qb)) & 1;
            if ba != bb {
                j ^= (1 << (n - 1 - qa)) | (1 << (n - 1 - qb));
            }
        }
        if j > idx {
            amps.swap(idx, j);
        }
    }
}

/// `(⟨bra| ⊗ I) amps`: contracts the listed qubits against `bra` and returns
/// the amplitudes over the remaining qubits (order preserved).
pub(crate) fn contract(amps: &[C], n: usize, qubits: &[usize], bra: &[C]) -> Vec<C> {
    let loc = offsets(n, qubits);
    let rest = offsets(n, &complement(n, qubits));
    rest.iter()
        .map(|&base| {
            loc.iter()
                .zip(bra)
                .map(|(off, b)| b.conj() * amps[base + off])
                .sum()
        })
        .collect()
}

/// Reduced density matrix over `keep` from a (possibly unnormalized) pure vector.
pub(crate) fn reduced_from_pure(amps: &[C], n: usize, keep: &[usize]) -> DMatrix<C> {
    let loc = offsets(n, keep);
    let traced = offsets(n, &complement(n, keep));
    let d = loc.len();
    let mut out = DMatrix::zeros(d, d);
    for &t in &traced {
        for (i, oi) in loc.iter().enumerate() {
            let a = amps[t + oi];
            if a == C::new(0.0, 0.0) {
                continue;
            }
            for (j, oj) in loc.iter().enumerate() {
                out[(i, j)] += a * amps[t + oj].conj();
            }
        }
    }
    out
}

/// Partial trace keeping `keep` (order as listed).
pub(crate) fn partial_trace(rho: &DMatrix<C>, n: usize, keep: &[usize]) -> DMatrix<C> {
    let loc = offsets(n, keep);
    let traced = offsets(n, &complement(n, keep));
    let d = loc.len();
    DMatrix::from_fn(d, d, |i, j| {
        traced.iter().map(|t| rho[(t + loc[i], t + loc[j])]).sum()
    })
}

/// Embeds an operator on the listed qubits into the full `2^n` space by
/// direct index mapping (no kernel involvement).
pub(crate) fn embed(mat: &DMatrix<C>, n: usize, qubits: &[usize]) -> DMatrix<C> {
    let loc = offsets(n, qubits);
    let rest = offsets(n, &complement(n, qubits));
    let d = 1usize << n;
    let mut out = DMatrix::zeros(d, d);
    for &base in &rest {
        for (r, or) in loc.iter().enumerate() {
            for (c, oc) in loc.iter().enumerate() {
                out[(base + or, base + oc)] = mat[(r, c)];
            }
        }
    }
    out
}
