//! QMA verifiers, the acceptance operator, honest witness parameters,
//! the distillation step and teleported application of a unitary.

use crate::circuit::{circuit_unitary, GateOp};
use crate::eig::eig_hermitian_matrix;
use crate::error::{QError, Result};
use crate::gates::{self, Bell, BellBranch};
use crate::layout::RegisterLayout;
use crate::measure::basis_projector;
use crate::operator::{
    controlled_on, CMatrix, CVector, HermitianOperator, Projector, UnitaryOperator,
};
use crate::state::{DensityOperator, StateVector, SubState};
use crate::TOL;

/// Register names a verifier acts on.
pub const PRIVATE: &str = "A";
pub const WITNESS: &str = "M";

/// A verifier unitary over `(A, M)` with an accept projector. The private
/// register `A` starts in `|0…0⟩`; the witness arrives in `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifierCircuit {
    layout: RegisterLayout,
    unitary: UnitaryOperator,
    accept: Projector,
}

impl VerifierCircuit {
    pub fn new(
        v_qubits: usize,
        m_qubits: usize,
        unitary: UnitaryOperator,
        accept: Projector,
    ) -> Result<Self> {
        let layout = RegisterLayout::new(&[(PRIVATE, v_qubits), (WITNESS, m_qubits)])?;
        if unitary.dim() != layout.dim() {
            return Err(QError::DimensionMismatch {
                expected: layout.dim(),
                got: unitary.dim(),
            });
        }
        if accept.dim() != layout.dim() {
            return Err(QError::DimensionMismatch {
                expected: layout.dim(),
                got: accept.dim(),
            });
        }
        Ok(Self {
            layout,
            unitary,
            accept,
        })
    }

    /// Builds the unitary from a gate list over registers `A` and `M`.
    pub fn from_gates(
        v_qubits: usize,
        m_qubits: usize,
        ops: &[GateOp],
        accept: Projector,
    ) -> Result<Self> {
        let layout = RegisterLayout::new(&[(PRIVATE, v_qubits), (WITNESS, m_qubits)])?;
        let u = circuit_unitary(&layout, ops)?;
        Self::new(v_qubits, m_qubits, u, accept)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn v_qubits(&self) -> usize {
        self.layout.registers()[0].1
    }

    pub fn m_qubits(&self) -> usize {
        self.layout.registers()[1].1
    }

    pub fn unitary(&self) -> &UnitaryOperator {
        &self.unitary
    }

    pub fn accept(&self) -> &Projector {
        &self.accept
    }

    pub fn reject(&self) -> Projector {
        self.accept.complement()
    }

    /// `|0…0⟩⟨0…0|_A ⊗ I_M`
    pub fn init(&self) -> Projector {
        basis_projector(&self.layout, &[PRIVATE], 0).expect("A exists")
    }

    /// `⟨0_A| V† Π_acc V |0_A⟩`, the acceptance operator restricted to `M`.
    pub fn witness_block(&self) -> CMatrix {
        let k = self.unitary.matrix().adjoint() * self.accept.matrix() * self.unitary.matrix();
        let dm = 1 << self.m_qubits();
        k.view((0, 0), (dm, dm)).into_owned()
    }
}

/// Accept projector over `(A, M)` onto the computational-basis patterns of
/// the listed registers (big-endian over the listing).
pub fn accept_patterns<S: AsRef<str>>(
    v_qubits: usize,
    m_qubits: usize,
    regs: &[S],
    patterns: &[usize],
) -> Result<Projector> {
    let layout = RegisterLayout::new(&[(PRIVATE, v_qubits), (WITNESS, m_qubits)])?;
    let mut m = CMatrix::zeros(layout.dim(), layout.dim());
    for &p in patterns {
        m += basis_projector(&layout, regs, p)?.matrix();
    }
    Projector::new(m)
}

/// `Π_init V† Π_acc V Π_init`
pub fn accept_operator(v: &VerifierCircuit) -> HermitianOperator {
    let init = v.init();
    let u = v.unitary().matrix();
    let m = init.matrix() * u.adjoint() * v.accept().matrix() * u * init.matrix();
    HermitianOperator::new(m).expect("Hermitian by construction")
}

/// Optimal acceptance and the parameters the honest prover derives from it.
#[derive(Debug, Clone)]
pub struct HonestWitnessParams {
    pub p_x: f64,
    /// `p_x² / (2p_x² − 2p_x + 1)`
    pub p: f64,
    /// `1 / (2p)`; `None` when `p_x < 1/2`, where no `q ∈ [0, 1]` gives `pq = 1/2`.
    pub q: Option<f64>,
    /// Top eigenvector of the acceptance operator, on `M`.
    pub witness: StateVector,
}

impl HonestWitnessParams {
    pub fn require_q(&self) -> Result<f64> {
        self.q
            .ok_or_else(|| QError::Inapplicable(format!("p_x = {} < 1/2 admits no q", self.p_x)))
    }
}

/// `p = p_x² / (2p_x² − 2p_x + 1)`
pub fn distilled_p(p_x: f64) -> f64 {
    p_x * p_x / (2.0 * p_x * p_x - 2.0 * p_x + 1.0)
}

/// `q = 1/(2p)` when it lies in `[0, 1]`.
pub fn honest_q(p_x: f64) -> Option<f64> {
    if p_x < 0.5 - TOL {
        return None;
    }
    Some((1.0 / (2.0 * distilled_p(p_x))).min(1.0))
}

pub fn max_accept(v: &VerifierCircuit) -> HonestWitnessParams {
    let (p_x, w) = eig_hermitian_matrix(&v.witness_block()).top();
    let p_x = p_x.clamp(0.0, 1.0);
    let layout = RegisterLayout::new(&[(WITNESS, v.m_qubits())]).expect("M has width");
    let witness = StateVector::from_trusted(layout, w.normalize());
    HonestWitnessParams {
        p_x,
        p: distilled_p(p_x),
        q: honest_q(p_x),
        witness,
    }
}

/// Result of one distillation run.
#[derive(Debug, Clone)]
pub struct DistillationOutcome {
    pub success_probability: f64,
    /// Normalized post-state over the input layout; `None` if success is impossible.
    pub state: Option<StateVector>,
    /// Probability of the `⊥` output.
    pub failure_probability: f64,
}

impl DistillationOutcome {
    /// Reduced state of the output register.
    pub fn output(&self, r: &str) -> Result<Option<DensityOperator>> {
        self.state.as_ref().map(|s| s.reduced(&[r])).transpose()
    }
}

/// The distillation step on a branch vector holding registers `A`, `M` and `r`:
/// apply V, flip `r` on the accepting subspace, apply V†, project `A` onto
/// all-zero. Returns the unnormalized success branch; the lost weight is the
/// `⊥` probability.
pub fn distill_in(v: &VerifierCircuit, state: &SubState, r: &str) -> Result<SubState> {
    if state.layout().width(r)? != 1 {
        return Err(QError::DimensionMismatch {
            expected: 1,
            got: state.layout().width(r)?,
        });
    }
    for (name, w) in [(PRIVATE, v.v_qubits()), (WITNESS, v.m_qubits())] {
        let got = state.layout().width(name)?;
        if got != w {
            return Err(QError::DimensionMismatch { expected: w, got });
        }
    }
    let flip = controlled_on(v.accept(), &gates::pauli_x());
    let mut s = state.clone();
    s.apply(v.unitary(), &[PRIVATE, WITNESS])?;
    s.apply(&flip, &[PRIVATE, WITNESS, r])?;
    s.apply(&v.unitary().adjoint(), &[PRIVATE, WITNESS])?;
    let zero = Projector::from_basis(1 << v.v_qubits(), [0])?;
    s.apply_matrix(zero.matrix(), &[PRIVATE])?;
    Ok(s)
}

/// Runs the distillation step on a state over registers `R`, `A`, `M`.
pub fn distillation(v: &VerifierCircuit, input: &StateVector) -> Result<DistillationOutcome> {
    let out = distill_in(v, &input.as_sub(), "R")?;
    let success_probability = out.weight().clamp(0.0, 1.0);
    Ok(DistillationOutcome {
        success_probability,
        state: out.normalize(),
        failure_probability: (1.0 - success_probability).max(0.0),
    })
}

/// Teleported application of the unitary encoded in a CJ pair.
#[derive(Debug, Clone)]
pub struct TeleportOutcome {
    pub success_probability: f64,
    /// Remaining registers after the `Φ+` outcome; the second CJ register
    /// holds the transformed state.
    pub success_state: Option<StateVector>,
    pub branches: Vec<BellBranch>,
}

/// Bell-measures `(target, cj.0)`; the `Φ+` branch applies the encoded
/// unitary to the content of `target`, now found in `cj.1`.
pub fn teleport_apply(
    state: &StateVector,
    target: &str,
    cj: (&str, &str),
) -> Result<TeleportOutcome> {
    state.layout().width(cj.1)?;
    let branches = gates::bell_measurement(state, target, cj.0)?;
    let success = branches
        .iter()
        .find(|b| b.outcome == Bell::PhiPlus)
        .expect("all outcomes listed");
    Ok(TeleportOutcome {
        success_probability: success.probability,
        success_state: success.state.clone(),
        branches,
    })
}

/// Verifiers with known optimal acceptance.
pub mod toys {
    use super::*;

    /// CNOT from `M` into `A`, accept on `A = 1`. `p_x = 1` with witness `|1⟩`.
    pub fn cnot_check() -> VerifierCircuit {
        let ops = [GateOp::new(gates::cnot(), &[WITNESS, PRIVATE])];
        VerifierCircuit::from_gates(1, 1, &ops, accept_patterns(1, 1, &[PRIVATE], &[1]).unwrap())
            .unwrap()
    }

    /// Hadamard on `A`, accept on `A = 1`. `p_x = 1/2`.
    pub fn hadamard_coin() -> VerifierCircuit {
        let ops = [GateOp::new(gates::hadamard(), &[PRIVATE])];
        VerifierCircuit::from_gates(1, 1, &ops, accept_patterns(1, 1, &[PRIVATE], &[1]).unwrap())
            .unwrap()
    }

    /// `W_θ` on `A`, accept on `A = 1`. `p_x = θ`.
    pub fn rotation(theta: f64) -> Result<VerifierCircuit> {
        let ops = [GateOp::new(gates::w(theta)?, &[PRIVATE])];
        VerifierCircuit::from_gates(1, 1, &ops, accept_patterns(1, 1, &[PRIVATE], &[1])?)
    }

    /// `W_a ⊗ W_b` on a two-qubit `A`, accept when `A = 11` and `M = 1`.
    /// `p_x = ab` with witness `|1⟩`.
    pub fn product(a: f64, b: f64) -> Result<VerifierCircuit> {
        let u = gates::w(a)?
            .tensor(&gates::w(b)?)
            .tensor(&UnitaryOperator::identity(1));
        VerifierCircuit::new(
            2,
            1,
            u,
            accept_patterns(2, 1, &[PRIVATE, WITNESS], &[0b111])?,
        )
    }

    /// The catalog with its analytic `p_x`.
    pub fn catalog() -> Vec<(String, VerifierCircuit, f64)> {
        vec![
            ("cnot-check".into(), cnot_check(), 1.0),
            ("hadamard-coin".into(), hadamard_coin(), 0.5),
            ("rotation-0.75".into(), rotation(0.75).unwrap(), 0.75),
            (
                "rotation-0.333".into(),
                rotation(1.0 / 3.0).unwrap(),
                1.0 / 3.0,
            ),
            ("rotation-0".into(), rotation(0.0).unwrap(), 0.0),
            ("product-0.9-0.8".into(), product(0.9, 0.8).unwrap(), 0.72),
        ]
    }
}

/// `|0…0⟩_A ⊗ witness` followed by a fresh output register `R` in `|0⟩`,
/// ordered `(R, A, M)`.
pub fn distillation_input(v: &VerifierCircuit, witness: &StateVector) -> Result<StateVector> {
    let r = StateVector::zero(RegisterLayout::qubits(&["R"])?);
    let a = StateVector::zero(RegisterLayout::new(&[(PRIVATE, v.v_qubits())])?);
    let w = witness.with_layout(RegisterLayout::new(&[(WITNESS, v.m_qubits())])?)?;
    r.tensor(&a)?.tensor(&w)
}

/// `Π_init V† Π V (|0⟩ ⊗ w)` for an arbitrary full-space projector `Π`.
pub fn apply_acceptance_map(
    v: &VerifierCircuit,
    pi: &Projector,
    witness: &StateVector,
) -> Result<CVector> {
    let a = StateVector::zero(RegisterLayout::new(&[(PRIVATE, v.v_qubits())])?);
    let input =
        a.tensor(&witness.with_layout(RegisterLayout::new(&[(WITNESS, v.m_qubits())])?)?)?;
    let u = v.unitary().matrix();
    Ok(v.init().matrix() * u.adjoint() * pi.matrix() * u * input.amplitudes())
}
