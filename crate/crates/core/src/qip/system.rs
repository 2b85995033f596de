//! Multi-message systems and the composite unitary `Q_x`.

use crate::eig::eig_hermitian_matrix;
use crate::error::{QError, Result};
use crate::kernel;
use crate::layout::RegisterLayout;
use crate::measure::basis_projector;
use crate::operator::{embed_on_qubits, CMatrix, HermitianOperator, Projector, UnitaryOperator};
use crate::qma::VerifierCircuit;
use crate::state::StateVector;

pub const VERIFIER: &str = "V";
pub const MESSAGE: &str = "M";
pub const PROVER: &str = "P";

/// An `m`-message verifier. With `m = 2r + 1` the prover speaks first and
/// sends the initial message; with `m = 2r` the verifier does. Either way
/// there are `r + 1` verifier unitaries over `(V, M)`, `V` first.
#[derive(Debug, Clone)]
pub struct QIPSystemSpec {
    pub messages: usize,
    pub v_qubits: usize,
    pub m_qubits: usize,
    pub verifier: Vec<UnitaryOperator>,
    pub accept: Projector,
    /// Declared completeness.
    pub c: f64,
    /// Declared soundness.
    pub s: f64,
}

impl QIPSystemSpec {
    pub fn new(
        messages: usize,
        v_qubits: usize,
        m_qubits: usize,
        verifier: Vec<UnitaryOperator>,
        accept: Projector,
        c: f64,
        s: f64,
    ) -> Result<Self> {
        if messages == 0 {
            return Err(QError::OutOfRange("at least one message".into()));
        }
        if v_qubits == 0 || m_qubits == 0 {
            return Err(QError::Invalid("V and M need at least one qubit".into()));
        }
        if !(0.0..=1.0).contains(&c) || !(0.0..=1.0).contains(&s) || c <= s {
            return Err(QError::OutOfRange(format!(
                "need 0 ≤ s < c ≤ 1, got c = {c}, s = {s}"
            )));
        }
        let spec = Self {
            messages,
            v_qubits,
            m_qubits,
            verifier,
            accept,
            c,
            s,
        };
        if spec.verifier.len() != spec.rounds() + 1 {
            return Err(QError::Invalid(format!(
                "{} messages need {} verifier unitaries, got {}",
                messages,
                spec.rounds() + 1,
                spec.verifier.len()
            )));
        }
        let d = spec.layout().dim();
        for u in &spec.verifier {
            if u.dim() != d {
                return Err(QError::DimensionMismatch {
                    expected: d,
                    got: u.dim(),
                });
            }
        }
        if spec.accept.dim() != d {
            return Err(QError::DimensionMismatch {
                expected: d,
                got: spec.accept.dim(),
            });
        }
        Ok(spec)
    }

    /// The one-message case: a single QMA verifier, with `V` playing `A`.
    pub fn from_qma(v: &VerifierCircuit, c: f64, s: f64) -> Result<Self> {
        Self::new(
            1,
            v.v_qubits(),
            v.m_qubits(),
            vec![v.unitary().clone()],
            v.accept().clone(),
            c,
            s,
        )
    }

    /// `r` with `m = 2r + 1` or `m = 2r`.
    pub fn rounds(&self) -> usize {
        self.messages / 2
    }

    /// The prover speaks first (odd message count).
    pub fn prover_first(&self) -> bool {
        self.messages % 2 == 1
    }

    pub fn prover_unitaries(&self) -> usize {
        self.messages.div_ceil(2)
    }

    pub fn layout(&self) -> RegisterLayout {
        RegisterLayout::new(&[(VERIFIER, self.v_qubits), (MESSAGE, self.m_qubits)])
            .expect("nonzero widths")
    }

    /// Legal initial states: `V` all zero, and `M` too when the verifier speaks first.
    pub fn init_registers(&self) -> Vec<&'static str> {
        if self.prover_first() {
            vec![VERIFIER]
        } else {
            vec![VERIFIER, MESSAGE]
        }
    }
}

/// An honest-style prover for the original system: unitaries over `(M, P)`.
#[derive(Debug, Clone)]
pub struct QIPProverSpec {
    pub p_qubits: usize,
    pub unitaries: Vec<UnitaryOperator>,
    /// Optional initial state over `(M, P)` (prover first) or `P`.
    pub initial: Option<StateVector>,
}

impl QIPProverSpec {
    pub fn new(p_qubits: usize, unitaries: Vec<UnitaryOperator>) -> Result<Self> {
        if p_qubits == 0 {
            return Err(QError::Invalid("P needs at least one qubit".into()));
        }
        Ok(Self {
            p_qubits,
            unitaries,
            initial: None,
        })
    }

    pub fn with_initial(mut self, state: StateVector) -> Self {
        self.initial = Some(state);
        self
    }

    /// Identity on every round.
    pub fn identity(spec: &QIPSystemSpec, p_qubits: usize) -> Result<Self> {
        let u = UnitaryOperator::identity(spec.m_qubits + p_qubits);
        Self::new(p_qubits, vec![u; spec.prover_unitaries()])
    }

    fn check(&self, spec: &QIPSystemSpec) -> Result<()> {
        if self.unitaries.len() != spec.prover_unitaries() {
            return Err(QError::Invalid(format!(
                "{} messages need {} prover unitaries, got {}",
                spec.messages,
                spec.prover_unitaries(),
                self.unitaries.len()
            )));
        }
        let d = 1usize << (spec.m_qubits + self.p_qubits);
        for u in &self.unitaries {
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

/// `Q_x` over `(V, M, P)` and `M_x = Π_init Q_x† Π_acc Q_x Π_init`.
#[derive(Debug, Clone)]
pub struct CompositeSystem {
    pub layout: RegisterLayout,
    pub q: UnitaryOperator,
    pub init: Projector,
    /// `Π_acc ⊗ I_P`
    pub accept: Projector,
    pub m_x: HermitianOperator,
}

impl CompositeSystem {
    /// `M_x` compressed to the legal initial subspace, with that subspace's basis.
    fn compressed(&self) -> (CMatrix, CMatrix) {
        let basis = CMatrix::from_columns(&self.init.range_basis());
        let reach = self.accept.matrix() * (self.q.matrix() * &basis);
        (reach.adjoint() * reach, basis)
    }

    /// Maximum acceptance over legal initial states.
    pub fn max_accept(&self) -> f64 {
        eig_hermitian_matrix(&self.compressed().0).values[0].clamp(0.0, 1.0)
    }

    /// A legal initial state reaching the maximum.
    pub fn optimal_initial(&self) -> StateVector {
        let (m, basis) = self.compressed();
        let v = basis * eig_hermitian_matrix(&m).vector(0);
        StateVector::normalized(self.layout.clone(), v).expect("nonzero top eigenvector")
    }

    /// Acceptance when starting from `state`.
    pub fn acceptance(&self, state: &StateVector) -> Result<f64> {
        if state.dim() != self.q.dim() {
            return Err(QError::DimensionMismatch {
                expected: self.q.dim(),
                got: state.dim(),
            });
        }
        Ok((self.accept.matrix() * (self.q.matrix() * state.amplitudes())).norm_squared())
    }
}

/// Embeds a `(V, M)` operator into `(V, M, P)`.
pub(crate) fn on_vm(op: &CMatrix, spec: &QIPSystemSpec, p_qubits: usize) -> CMatrix {
    let n = spec.v_qubits + spec.m_qubits + p_qubits;
    let qubits: Vec<usize> = (0..spec.v_qubits + spec.m_qubits).collect();
    embed_on_qubits(op, n, &qubits).expect("dimensions checked")
}

pub(crate) fn full_layout(spec: &QIPSystemSpec, p_qubits: usize) -> RegisterLayout {
    spec.layout()
        .push(PROVER, p_qubits)
        .expect("distinct names")
}

/// Legal-initial projector over `(V, M, P)`.
pub(crate) fn init_projector(spec: &QIPSystemSpec, p_qubits: usize) -> Projector {
    basis_projector(&full_layout(spec, p_qubits), &spec.init_registers(), 0)
        .expect("registers exist")
}

/// Interleaves the unitaries in message order: `P_1, V_1, P_2, …, V_{r+1}`
/// when the prover speaks first, `V_1, P_1, …, P_r, V_{r+1}` otherwise.
pub fn composite_unitary(spec: &QIPSystemSpec, prover: &QIPProverSpec) -> Result<CompositeSystem> {
    prover.check(spec)?;
    let p = prover.p_qubits;
    let layout = full_layout(spec, p);
    let n = layout.num_qubits();
    let vm: Vec<usize> = (0..spec.v_qubits + spec.m_qubits).collect();
    let mp: Vec<usize> = (spec.v_qubits..n).collect();
    let mut q = CMatrix::identity(layout.dim(), layout.dim());
    let mut provers = prover.unitaries.iter();
    if spec.prover_first() {
        let first = provers.next().expect("checked count");
        kernel::apply_matrix_columns(&mut q, n, &mp, first.matrix());
    }
    for (j, v) in spec.verifier.iter().enumerate() {
        kernel::apply_matrix_columns(&mut q, n, &vm, v.matrix());
        if j < spec.rounds() {
            let pj = provers.next().expect("checked count");
            kernel::apply_matrix_columns(&mut q, n, &mp, pj.matrix());
        }
    }
    let init = init_projector(spec, p);
    let accept = Projector::from_trusted(on_vm(spec.accept.matrix(), spec, p));
    let basis = CMatrix::from_columns(&init.range_basis());
    let reach = accept.matrix() * (&q * &basis);
    let m_x = &basis * (reach.adjoint() * reach) * basis.adjoint();
    Ok(CompositeSystem {
        layout,
        q: UnitaryOperator::from_trusted(q),
        init,
        accept,
        m_x: HermitianOperator::new(m_x)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{kron, max_abs_diff};
    use crate::qma::{accept_operator, toys};

    #[test]
    fn qma_case_matches_accept_operator() {
        let v = toys::rotation(0.3).unwrap();
        let spec = QIPSystemSpec::from_qma(&v, 0.3, 0.0).unwrap();
        let prover = QIPProverSpec::identity(&spec, 1).unwrap();
        let comp = composite_unitary(&spec, &prover).unwrap();
        let expected = kron(accept_operator(&v).matrix(), &CMatrix::identity(2, 2));
        assert!(max_abs_diff(comp.m_x.matrix(), &expected) < 1e-12);
        assert!((comp.max_accept() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn counts_are_checked() {
        let v = toys::rotation(0.3).unwrap();
        let spec = QIPSystemSpec::from_qma(&v, 0.3, 0.0).unwrap();
        assert!(composite_unitary(&spec, &QIPProverSpec::new(1, vec![]).unwrap()).is_err());
        assert!(QIPSystemSpec::from_qma(&v, 0.2, 0.3).is_err());
    }
}
