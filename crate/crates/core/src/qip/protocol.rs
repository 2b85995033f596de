//! The perfect-completeness protocol: a coin between the reflection test and
//! the invertibility test, both ending in a backward run of the original system.

use crate::error::{QError, Result};
use crate::kernel;
use crate::operator::{CMatrix, CVector, Projector, UnitaryOperator};
use crate::outcome::{ProtocolOutcome, Verdict};
use crate::qip::system::{
    composite_unitary, full_layout, CompositeSystem, QIPProverSpec, QIPSystemSpec,
};
use crate::reflection::ReflectionSpec;
use crate::state::StateVector;
use crate::TOL;

/// A prover in the new protocol: the `(V, M, P)` state it sends first and its
/// `r` replies over `(M, P)`, in the order they are used.
#[derive(Debug, Clone)]
pub struct QIPProtocolProver {
    pub p_qubits: usize,
    pub initial: StateVector,
    pub replies: Vec<UnitaryOperator>,
}

impl QIPProtocolProver {
    fn check(&self, spec: &QIPSystemSpec) -> Result<()> {
        let layout = full_layout(spec, self.p_qubits);
        if self.initial.dim() != layout.dim() {
            return Err(QError::DimensionMismatch {
                expected: layout.dim(),
                got: self.initial.dim(),
            });
        }
        if self.replies.len() != spec.rounds() {
            return Err(QError::Invalid(format!(
                "expected {} replies, got {}",
                spec.rounds(),
                self.replies.len()
            )));
        }
        let d = 1usize << (spec.m_qubits + self.p_qubits);
        for u in &self.replies {
            if u.dim() != d {
                return Err(QError::DimensionMismatch {
                    expected: d,
                    got: u.dim(),
                });
            }
        }
        Ok(())
    }
}

/// The original-system prover whose forward run the protocol's backward run
/// undoes: the replies reversed and inverted, preceded by an identity when
/// the prover spoke first.
pub fn backward_prover(spec: &QIPSystemSpec, prover: &QIPProtocolProver) -> Result<QIPProverSpec> {
    prover.check(spec)?;
    let mut unitaries = Vec::new();
    if spec.prover_first() {
        unitaries.push(UnitaryOperator::identity(spec.m_qubits + prover.p_qubits));
    }
    unitaries.extend(prover.replies.iter().rev().map(UnitaryOperator::adjoint));
    QIPProverSpec::new(prover.p_qubits, unitaries)
}

/// `V_{r+1}† X`, applied column by column.
fn undo_last(spec: &QIPSystemSpec, p: usize, x: &CMatrix) -> CMatrix {
    let mut out = x.clone();
    let qubits: Vec<usize> = (0..spec.v_qubits + spec.m_qubits).collect();
    let last = spec.verifier[spec.rounds()].matrix().adjoint();
    kernel::apply_matrix_columns(&mut out, spec.v_qubits + spec.m_qubits + p, &qubits, &last);
    out
}

/// Honest play: start from `U|φ*⟩` with `U = V_{r+1}† Q_x` and `φ*` optimal
/// for the honest forward prover, then reply with the inverses of the honest
/// unitaries in reverse order.
pub fn honest_protocol_prover(
    spec: &QIPSystemSpec,
    honest: &QIPProverSpec,
) -> Result<QIPProtocolProver> {
    let comp = composite_unitary(spec, honest)?;
    let phi = comp.optimal_initial();
    let u = undo_last(spec, honest.p_qubits, comp.q.matrix());
    let initial = StateVector::normalized(comp.layout.clone(), u * phi.amplitudes())?;
    let skip = usize::from(spec.prover_first());
    let replies = honest.unitaries[skip..]
        .iter()
        .rev()
        .map(UnitaryOperator::adjoint)
        .collect();
    Ok(QIPProtocolProver {
        p_qubits: honest.p_qubits,
        initial,
        replies,
    })
}

/// Composite system of the backward prover.
pub fn protocol_composite(
    spec: &QIPSystemSpec,
    prover: &QIPProtocolProver,
) -> Result<CompositeSystem> {
    composite_unitary(spec, &backward_prover(spec, prover)?)
}

/// `U = V_{r+1}† Q_x`, `Δ₀ = Π_init`, `Π₀ = V_{r+1}† Π_acc V_{r+1}` for the backward prover.
pub fn protocol_reflection_spec(
    spec: &QIPSystemSpec,
    prover: &QIPProtocolProver,
) -> Result<ReflectionSpec> {
    let comp = protocol_composite(spec, prover)?;
    let p = prover.p_qubits;
    let u = UnitaryOperator::from_trusted(undo_last(spec, p, comp.q.matrix()));
    // V† Π V = V† (V† Π)†, Π Hermitian
    let half = undo_last(spec, p, comp.accept.matrix());
    let pi0 = Projector::from_trusted(undo_last(spec, p, &half.adjoint()));
    ReflectionSpec::new(u, comp.init, pi0)
}

fn apply_vm(spec: &QIPSystemSpec, p: usize, op: &CMatrix, psi: &mut CVector) {
    let qubits: Vec<usize> = (0..spec.v_qubits + spec.m_qubits).collect();
    kernel::apply_matrix(
        psi.as_mut_slice(),
        spec.v_qubits + spec.m_qubits + p,
        &qubits,
        op,
    );
}

fn apply_mp(spec: &QIPSystemSpec, p: usize, op: &CMatrix, psi: &mut CVector) {
    let n = spec.v_qubits + spec.m_qubits + p;
    let qubits: Vec<usize> = (spec.v_qubits..n).collect();
    kernel::apply_matrix(psi.as_mut_slice(), n, &qubits, op);
}

fn backward_run(spec: &QIPSystemSpec, prover: &QIPProtocolProver, mut psi: CVector) -> CVector {
    let p = prover.p_qubits;
    let r = spec.rounds();
    for (k, reply) in prover.replies.iter().enumerate() {
        apply_mp(spec, p, reply.matrix(), &mut psi);
        apply_vm(
            spec,
            p,
            &spec.verifier[r - 1 - k].matrix().adjoint(),
            &mut psi,
        );
    }
    psi
}

fn legal_weight(spec: &QIPSystemSpec, p: usize, psi: &CVector) -> f64 {
    (crate::qip::system::init_projector(spec, p).matrix() * psi).norm_squared()
}

/// Phase-flips accepting states of `V_{r+1}`, runs backward, and rejects on a
/// legal initial state.
pub fn reflection_test(
    spec: &QIPSystemSpec,
    prover: &QIPProtocolProver,
) -> Result<ProtocolOutcome> {
    prover.check(spec)?;
    let p = prover.p_qubits;
    let last = spec.verifier[spec.rounds()].matrix();
    let mut psi = prover.initial.amplitudes().clone();
    apply_vm(spec, p, last, &mut psi);
    apply_vm(spec, p, spec.accept.phase_flip().matrix(), &mut psi);
    apply_vm(spec, p, &last.adjoint(), &mut psi);
    let psi = backward_run(spec, prover, psi);
    let legal = legal_weight(spec, p, &psi);
    let mut out = ProtocolOutcome::new();
    out.record(
        Verdict::Reject,
        "reflection test: legal initial state",
        legal,
    );
    out.record(
        Verdict::Accept,
        "reflection test: not a legal initial state",
        (1.0 - legal).max(0.0),
    );
    Ok(out)
}

/// Runs backward directly and accepts on a legal initial state.
pub fn invertibility_test(
    spec: &QIPSystemSpec,
    prover: &QIPProtocolProver,
) -> Result<ProtocolOutcome> {
    prover.check(spec)?;
    let psi = backward_run(spec, prover, prover.initial.amplitudes().clone());
    let legal = legal_weight(spec, prover.p_qubits, &psi);
    let mut out = ProtocolOutcome::new();
    out.record(
        Verdict::Accept,
        "invertibility test: legal initial state",
        legal,
    );
    out.record(
        Verdict::Reject,
        "invertibility test: not a legal initial state",
        (1.0 - legal).max(0.0),
    );
    Ok(out)
}

/// Exact outcome of the protocol against `prover`. Legal initial states are
/// `V = 0` with an odd message count and `(V, M) = 0` with an even one.
pub fn perfect_completeness_protocol(
    spec: &QIPSystemSpec,
    prover: &QIPProtocolProver,
) -> Result<ProtocolOutcome> {
    let mut out = ProtocolOutcome::new();
    out.absorb(reflection_test(spec, prover)?, 0.5);
    out.absorb(invertibility_test(spec, prover)?, 0.5);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoundnessBoundReport {
    /// Top eigenvalue of `M_x` for the backward prover.
    pub top_eigenvalue: f64,
    pub reject: f64,
    /// `(1/2 − s)²`, which is `(c−s)²/16` in terms of the system before rescaling.
    pub bound: f64,
    /// `(1/2 − top_eigenvalue)²`
    pub eigen_bound: f64,
    pub holds: bool,
}

/// Checks the rejection guarantee for one prover. `spec` is a rescaled,
/// rewindable system whose declared soundness `s` is below 1/2; the check is
/// inapplicable unless the backward prover's maximum acceptance respects `s`.
pub fn perfect_completeness_soundness_bound(
    spec: &QIPSystemSpec,
    prover: &QIPProtocolProver,
) -> Result<SoundnessBoundReport> {
    if spec.s >= 0.5 {
        return Err(QError::Inapplicable(format!(
            "declared soundness {} is not below 1/2",
            spec.s
        )));
    }
    let top = protocol_composite(spec, prover)?.max_accept();
    if top > spec.s + TOL {
        return Err(QError::Inapplicable(format!(
            "maximum acceptance {top} exceeds the declared soundness {}",
            spec.s
        )));
    }
    let reject = perfect_completeness_protocol(spec, prover)?.reject;
    let bound = (0.5 - spec.s).powi(2);
    Ok(SoundnessBoundReport {
        top_eigenvalue: top,
        reject,
        bound,
        eigen_bound: (0.5 - top).powi(2),
        holds: reject >= bound - TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qip::{error_rescale, make_rewindable, toys};
    use crate::reflection::modified_reflection_procedure;

    fn pipeline(messages: usize, a: f64, c: f64, s: f64) -> (QIPSystemSpec, QIPProverSpec) {
        let (spec, honest) = toys::twist(messages, a, 0.6, c, s).unwrap();
        let rescaled = error_rescale(&spec).unwrap();
        let (rw, aug) = make_rewindable(&rescaled, &honest).unwrap();
        (rw.spec, aug)
    }

    #[test]
    fn honest_accepts_with_certainty() {
        for messages in [2, 3, 4, 5] {
            let (spec, aug) = pipeline(messages, 0.75, 0.75, 0.25);
            let prover = honest_protocol_prover(&spec, &aug).unwrap();
            let out = perfect_completeness_protocol(&spec, &prover).unwrap();
            assert!(
                (out.acceptance() - 1.0).abs() < 1e-9,
                "m = {messages}: {out}"
            );
        }
    }

    #[test]
    fn matches_modified_reflection_procedure() {
        let (spec, aug) = pipeline(3, 0.75, 0.75, 0.25);
        let mut prover = honest_protocol_prover(&spec, &aug).unwrap();
        prover.replies[0] = UnitaryOperator::identity(spec.m_qubits + prover.p_qubits);
        let direct = perfect_completeness_protocol(&spec, &prover).unwrap();
        let mrp = modified_reflection_procedure(
            &protocol_reflection_spec(&spec, &prover).unwrap(),
            &prover.initial,
        )
        .unwrap();
        assert!((direct.acceptance() - mrp.acceptance()).abs() < 1e-9);
    }

    #[test]
    fn malformed_replies() {
        let (spec, aug) = pipeline(3, 0.75, 0.75, 0.25);
        let mut prover = honest_protocol_prover(&spec, &aug).unwrap();
        prover.replies.push(prover.replies[0].clone());
        assert!(perfect_completeness_protocol(&spec, &prover).is_err());
    }
}
