//! Rescaling acceptance to a gap around 1/2 and making a system perfectly rewindable.

use crate::error::{QError, Result};
use crate::gates;
use crate::operator::{embed_on_qubits, CMatrix, Projector, UnitaryOperator};
use crate::qip::system::{composite_unitary, QIPProverSpec, QIPSystemSpec};
use crate::TOL;

/// Maps an operator on `(V, M)` into `(V ⊕ ev, M ⊕ em)`, new qubits appended to each register.
fn widen(op: &CMatrix, v: usize, m: usize, ev: usize, em: usize) -> CMatrix {
    let qubits: Vec<usize> = (0..v).chain(v + ev..v + ev + m).collect();
    embed_on_qubits(op, v + ev + m + em, &qubits).expect("dimensions checked")
}

fn single(op: &CMatrix, n: usize, q: usize) -> CMatrix {
    embed_on_qubits(op, n, &[q]).expect("dimensions checked")
}

fn ket_bra(bit: usize) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(bit, bit)] = 1.0.into();
    m
}

/// Rescaled bounds `(1/2 + (c−s)/4, 1/2 − (c−s)/4)`.
pub fn rescaled_bounds(c: f64, s: f64) -> (f64, f64) {
    (0.5 + (c - s) / 4.0, 0.5 - (c - s) / 4.0)
}

/// Adds a damping qubit `D` to the end of `V`, rotated by `W_a` with the last
/// verifier unitary.
///
/// With `c + s ≥ 1`, `a = 1/(c+s)` and acceptance additionally needs `D = 1`.
/// Otherwise `a = 1/(2−c−s)` and a rejecting outcome turns into acceptance
/// when `D = 0`.
pub fn error_rescale(spec: &QIPSystemSpec) -> Result<QIPSystemSpec> {
    let (c, s) = (spec.c, spec.s);
    if c <= s {
        return Err(QError::OutOfRange(format!("c = {c} must exceed s = {s}")));
    }
    let (v, m) = (spec.v_qubits, spec.m_qubits);
    let n = v + 1 + m;
    let accept_side = c + s >= 1.0;
    let a = if accept_side {
        1.0 / (c + s)
    } else {
        1.0 / (2.0 - c - s)
    };
    let damp = single(gates::w(a.min(1.0))?.matrix(), n, v);
    let last = spec.verifier.len() - 1;
    let verifier = spec
        .verifier
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let wide = widen(u.matrix(), v, m, 1, 0);
            UnitaryOperator::from_trusted(if j == last { &damp * wide } else { wide })
        })
        .collect();
    let acc = widen(spec.accept.matrix(), v, m, 1, 0);
    let accept = if accept_side {
        &acc * single(&ket_bra(1), n, v)
    } else {
        let rej = CMatrix::identity(1 << n, 1 << n) - &acc;
        acc + rej * single(&ket_bra(0), n, v)
    };
    let (c2, s2) = rescaled_bounds(c, s);
    QIPSystemSpec::new(
        spec.messages,
        v + 1,
        m,
        verifier,
        Projector::from_trusted(accept),
        c2,
        s2,
    )
}

/// A perfectly rewindable system: `V` gains a private qubit `B`, `M` a
/// padding qubit `B'`. `B` travels to the prover with the last verifier
/// message and comes back with the last prover message; acceptance also
/// needs `B = 1`.
#[derive(Debug, Clone)]
pub struct RewindableSystem {
    pub spec: QIPSystemSpec,
    /// Honest maximum acceptance before the transformation.
    pub p_max: f64,
    /// Honest rotation on `B'`: `|0⟩ ↦ √(1 − 1/(2p_max))|0⟩ + √(1/(2p_max))|1⟩`.
    pub b_rotation: UnitaryOperator,
}

/// The verifier side of the rewindable transformation. It does not depend on
/// any prover, so it applies to no-instances as well.
pub fn rewindable_spec(spec: &QIPSystemSpec) -> Result<QIPSystemSpec> {
    let r = spec.rounds();
    if r == 0 {
        return Err(QError::Inapplicable(
            "a verifier message is needed to carry B".into(),
        ));
    }
    let (v, m) = (spec.v_qubits, spec.m_qubits);
    let n = v + m + 2;
    let b = v;
    let b_msg = v + 1 + m;
    let swap = embed_on_qubits(gates::swap().matrix(), n, &[b, b_msg])?;
    let verifier = spec
        .verifier
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let wide = widen(u.matrix(), v, m, 1, 1);
            UnitaryOperator::from_trusted(if j + 1 == r {
                &swap * wide
            } else if j == r {
                wide * &swap
            } else {
                wide
            })
        })
        .collect();
    let accept = widen(spec.accept.matrix(), v, m, 1, 1) * single(&ket_bra(1), n, b);
    QIPSystemSpec::new(
        spec.messages,
        v + 1,
        m + 1,
        verifier,
        Projector::from_trusted(accept),
        spec.c,
        spec.s,
    )
}

/// The rewindable system together with the honest prover augmented by the
/// rotation on `B'` that brings its maximum acceptance to exactly 1/2.
pub fn make_rewindable(
    spec: &QIPSystemSpec,
    honest: &QIPProverSpec,
) -> Result<(RewindableSystem, QIPProverSpec)> {
    let new_spec = rewindable_spec(spec)?;
    let p_max = composite_unitary(spec, honest)?.max_accept();
    if p_max < 0.5 - TOL {
        return Err(QError::OutOfRange(format!(
            "honest maximum {p_max} is below 1/2"
        )));
    }
    let (m, p) = (spec.m_qubits, honest.p_qubits);
    let b_rotation = gates::w((1.0 / (2.0 * p_max)).min(1.0))?;
    let rot = single(b_rotation.matrix(), m + 1 + p, m);
    let last = honest.unitaries.len() - 1;
    let unitaries = honest
        .unitaries
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let wide = widen(u.matrix(), m, p, 1, 0);
            UnitaryOperator::from_trusted(if j == last { &rot * wide } else { wide })
        })
        .collect();
    let prover = QIPProverSpec::new(p, unitaries)?;
    Ok((
        RewindableSystem {
            spec: new_spec,
            p_max,
            b_rotation,
        },
        prover,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qip::toys;

    #[test]
    fn bounds() {
        assert_eq!(rescaled_bounds(1.0, 0.0), (0.75, 0.25));
    }

    #[test]
    fn accept_side_damping_keeps_balanced_gap() {
        let (spec, honest) = toys::relay(3, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0).unwrap();
        let out = error_rescale(&spec).unwrap();
        let p = composite_unitary(&out, &honest).unwrap().max_accept();
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
        assert!(p >= 7.0 / 12.0 - 1e-9);
    }

    #[test]
    fn rewindable_honest_is_half() {
        for a in [1.0, 0.75, 0.5] {
            let (spec, honest) = toys::relay(3, a, a, 0.0).unwrap();
            let (rw, aug) = make_rewindable(&spec, &honest).unwrap();
            let p = composite_unitary(&rw.spec, &aug).unwrap().max_accept();
            assert!((p - 0.5).abs() < 1e-12, "a = {a}: {p}");
        }
    }

    #[test]
    fn rewindable_never_raises_acceptance() {
        let (spec, honest) = toys::twist(3, 0.25, 0.8, 0.75, 0.25).unwrap();
        let rw = rewindable_spec(&spec).unwrap();
        let widened: Vec<UnitaryOperator> = honest
            .unitaries
            .iter()
            .map(|u| UnitaryOperator::from_trusted(widen(u.matrix(), 1, 1, 1, 0)))
            .collect();
        let widened = QIPProverSpec::new(1, widened).unwrap();
        assert!(composite_unitary(&rw, &widened).unwrap().max_accept() <= 0.25 + 1e-12);
    }

    #[test]
    fn rewindable_needs_half() {
        let (spec, honest) = toys::relay(3, 0.25, 0.3, 0.2).unwrap();
        assert!(make_rewindable(&spec, &honest).is_err());
    }
}
