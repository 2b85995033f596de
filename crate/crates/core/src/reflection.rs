//! The Reflection Procedure, its CJ-teleportation simulation, and the
//! one-sided variant with an Invertibility Test.
//!
//! The phase flip `−Π₀ + Π₁` is applied as a matrix. A gate-level verifier
//! would realize it with a CNOT into an ancilla prepared in `|−⟩`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eig::{eig_hermitian_matrix, EigenDecomposition};
use crate::error::{QError, Result};
use crate::gates::{self, Bell};
use crate::layout::RegisterLayout;
use crate::operator::{identity, real_matrix, CMatrix, CVector, Projector, UnitaryOperator};
use crate::outcome::{ProtocolOutcome, Verdict};
use crate::random::random_vector;
use crate::state::{DensityOperator, StateVector, SubState};
use crate::TOL;

/// The triple `(U, Δ₀, Π₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSpec {
    u: UnitaryOperator,
    delta0: Projector,
    pi0: Projector,
}

impl ReflectionSpec {
    pub fn new(u: UnitaryOperator, delta0: Projector, pi0: Projector) -> Result<Self> {
        for d in [delta0.dim(), pi0.dim()] {
            if d != u.dim() {
                return Err(QError::DimensionMismatch {
                    expected: u.dim(),
                    got: d,
                });
            }
        }
        Ok(Self { u, delta0, pi0 })
    }

    /// `U = W_p ⊗ W_q`, `Δ₀ = |00⟩⟨00|`, `Π₀ = |11⟩⟨11|`; `M` has top eigenvalue `pq`.
    pub fn product_w(p: f64, q: f64) -> Result<Self> {
        let u = gates::w(p)?.tensor(&gates::w(q)?);
        Self::new(
            u,
            Projector::from_basis(4, [0])?,
            Projector::from_basis(4, [3])?,
        )
    }

    pub fn u(&self) -> &UnitaryOperator {
        &self.u
    }

    pub fn delta0(&self) -> &Projector {
        &self.delta0
    }

    pub fn delta1(&self) -> Projector {
        self.delta0.complement()
    }

    pub fn pi0(&self) -> &Projector {
        &self.pi0
    }

    pub fn pi1(&self) -> Projector {
        self.pi0.complement()
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// `Δ₀ U† Π₀ U Δ₀`
    pub fn m_operator(&self) -> CMatrix {
        let u = self.u.matrix();
        self.delta0.matrix() * u.adjoint() * self.pi0.matrix() * u * self.delta0.matrix()
    }

    /// Spectrum of `M` on the range of `Δ₀`, eigenvectors in the full space.
    pub fn spectrum(&self) -> EigenDecomposition {
        let basis = self.delta0.range_basis();
        let b = CMatrix::from_columns(&basis);
        let compressed = b.adjoint() * self.m_operator() * &b;
        let eig = eig_hermitian_matrix(&compressed);
        EigenDecomposition {
            values: eig.values.clone(),
            vectors: &b * &eig.vectors,
        }
    }

    /// Smallest `|λ − 1/2|` over the spectrum of `M` on `Δ₀`.
    pub fn gap(&self) -> f64 {
        self.spectrum()
            .values
            .iter()
            .map(|l| (l - 0.5).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// A unit eigenvector of `M` with eigenvalue `1/2`, if one exists.
    pub fn half_eigenvector(&self) -> Option<CVector> {
        let eig = self.spectrum();
        let found = eig
            .pairs()
            .find(|(l, _)| (l - 0.5).abs() < 1e-9)
            .map(|(_, v)| v);
        found
    }

    fn check_input(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(QError::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        Ok(())
    }
}

fn full_layout(dim: usize) -> RegisterLayout {
    RegisterLayout::new(&[("Q", dim.trailing_zeros() as usize)]).expect("positive width")
}

fn snap(out: &mut ProtocolOutcome, label: &str, v: &CVector) {
    let sub = SubState::new(full_layout(v.len()), v.clone()).expect("matching dimension");
    out.snapshot(label, &sub);
}

/// Reject on `Δ₁`; apply `U`, the phase flip on `Π₀`, `U†`; reject on `Δ₀`.
pub fn reflection_procedure(spec: &ReflectionSpec, input: &StateVector) -> Result<ProtocolOutcome> {
    spec.check_input(input.dim())?;
    let mut out = ProtocolOutcome::new();
    let psi = input.amplitudes();
    let legal = spec.delta0.matrix() * psi;
    out.record(
        Verdict::Reject,
        "step1: illegal initial state",
        (psi - &legal).norm_squared(),
    );
    snap(&mut out, "step1: projected on Δ₀", &legal);
    let forward = spec.u.matrix() * &legal;
    snap(&mut out, "step2: after U", &forward);
    let flipped = spec.pi0.phase_flip().matrix() * forward;
    let back = spec.u.matrix().adjoint() * flipped;
    snap(&mut out, "step3: after U†", &back);
    let stay = spec.delta0.matrix() * &back;
    out.record(
        Verdict::Reject,
        "step4: returned to Δ₀",
        stay.norm_squared(),
    );
    out.record(
        Verdict::Accept,
        "step4: left Δ₀",
        (back - stay).norm_squared(),
    );
    Ok(out)
}

/// Minimum rejection found by [`check_reflection_soundness`].
#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub epsilon: f64,
    /// `4ε²`
    pub bound: f64,
    pub min_eigenbasis_reject: f64,
    pub min_random_reject: f64,
    pub holds: bool,
}

/// Checks that every `Δ₀`-supported input is rejected with probability at
/// least `4ε²` when no eigenvalue of `M` lies in `(1/2 − ε, 1/2 + ε)`.
/// Scans the eigenbasis and 100 random `Δ₀` states.
pub fn check_reflection_soundness(spec: &ReflectionSpec, epsilon: f64) -> Result<SoundnessReport> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(QError::OutOfRange(format!(
            "ε = {epsilon} outside (0, 1/2]"
        )));
    }
    let eig = spec.spectrum();
    if let Some(l) = eig
        .values
        .iter()
        .find(|l| (*l - 0.5).abs() < epsilon - 1e-12)
    {
        return Err(QError::Inapplicable(format!(
            "eigenvalue {l} lies within ε of 1/2"
        )));
    }
    let layout = full_layout(spec.dim());
    let reject_of = |v: CVector| -> Result<f64> {
        let s = StateVector::normalized(layout.clone(), v)?;
        Ok(reflection_procedure(spec, &s)?.reject)
    };
    let mut min_eig = f64::INFINITY;
    for (_, v) in eig.pairs() {
        min_eig = min_eig.min(reject_of(v)?);
    }
    let basis = CMatrix::from_columns(&spec.delta0.range_basis());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut min_rand = f64::INFINITY;
    for _ in 0..100 {
        let c = random_vector(&mut rng, basis.ncols());
        min_rand = min_rand.min(reject_of(&basis * c)?);
    }
    let bound = 4.0 * epsilon * epsilon;
    Ok(SoundnessReport {
        epsilon,
        bound,
        min_eigenbasis_reject: min_eig,
        min_random_reject: min_rand,
        holds: min_eig.min(min_rand) >= bound - TOL,
    })
}

/// Pure or mixed inputs, decomposed into weighted branch vectors.
pub trait BranchInput {
    fn layout(&self) -> &RegisterLayout;
    fn branches(&self) -> Vec<(f64, SubState)>;
}

impl BranchInput for StateVector {
    fn layout(&self) -> &RegisterLayout {
        StateVector::layout(self)
    }

    fn branches(&self) -> Vec<(f64, SubState)> {
        vec![(1.0, self.as_sub())]
    }
}

impl BranchInput for DensityOperator {
    fn layout(&self) -> &RegisterLayout {
        DensityOperator::layout(self)
    }

    fn branches(&self) -> Vec<(f64, SubState)> {
        self.ensemble()
            .into_iter()
            .map(|(w, s)| (w, s.into_sub()))
            .collect()
    }
}

/// Register roles of the simulation test, in input order.
pub const RST_REGISTERS: [&str; 6] = ["R1", "R2", "S1", "S1'", "S2", "S2'"];

/// The fresh register the test adds.
pub const RST_FRESH: &str = "R2'";

fn zero_zero() -> CVector {
    CVector::from_iterator(
        4,
        [1.0, 0.0, 0.0, 0.0].iter().map(|&x| Complex64::new(x, 0.0)),
    )
}

/// The simulation test on a branch vector whose registers `regs` play the
/// roles `R1, R2, S1, S1', S2, S2'`. Probabilities are scaled by the branch
/// weight. `fresh` names the register added for `R2'`.
pub fn rst_in(state: &SubState, regs: [&str; 6], fresh: &str) -> Result<ProtocolOutcome> {
    let [r1, r2, s1, s1p, s2, s2p] = regs;
    for r in regs {
        if state.layout().width(r)? != 1 {
            return Err(QError::DimensionMismatch {
                expected: 1,
                got: state.layout().width(r)?,
            });
        }
    }
    let t = gates::t_transform();
    let mut s = state.clone();
    s.apply(&t, &[s1, s1p])?;
    let mut s = s.tensor(&StateVector::zero(RegisterLayout::qubits(&[fresh])?))?;
    let flip = UnitaryOperator::from_trusted(real_matrix(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0,
        ],
    ));
    s.apply(&flip, &[r1, s1])?;
    s.apply(&t.adjoint(), &[r2, fresh])?;

    let mut out = ProtocolOutcome::new();
    let mut success = None;
    for (b1, after_r) in gates::bell_branches(&s, r1, r2)? {
        for (b2, after_s) in gates::bell_branches(&after_r, s1, s2)? {
            if b1 == Bell::PhiPlus && b2 == Bell::PhiPlus {
                success = Some(after_s);
            } else {
                out.record(
                    Verdict::GiveUp,
                    format!("rst: bell ({b1}, {b2}) give-up"),
                    after_s.weight(),
                );
            }
        }
    }
    let success = success.expect("Φ+Φ+ branch enumerated");
    out.note("rst: simulation succeeded", success.weight());
    out.snapshot("rst: after simulation", &success);
    let stay = success.contract(&[fresh, s2p], &zero_zero())?.weight();
    out.record(Verdict::Reject, "rst: (R2', S2') = 00", stay);
    out.record(
        Verdict::Accept,
        "rst: (R2', S2') ≠ 00",
        success.weight() - stay,
    );
    Ok(out)
}

/// The simulation test on six single-qubit registers, taken positionally as
/// `R1, R2, S1, S1', S2, S2'`.
pub fn reflection_simulation_test<I: BranchInput>(input: &I) -> Result<ProtocolOutcome> {
    let layout = input.layout();
    if layout.registers().len() != 6 || layout.num_qubits() != 6 {
        return Err(QError::Invalid(format!(
            "simulation test expects six single-qubit registers, got {layout}"
        )));
    }
    let mut out = ProtocolOutcome::new();
    for (w, branch) in input.branches() {
        let canon = SubState::new(
            RegisterLayout::qubits(&RST_REGISTERS)?,
            branch.amplitudes().clone(),
        )?;
        out.absorb(rst_in(&canon, RST_REGISTERS, RST_FRESH)?, w);
    }
    Ok(out)
}

/// `χ_p ⊗ χ_p ⊗ J(W_q) ⊗ J(W_q)` over the six test registers.
pub fn rst_honest_input(p: f64, q: f64) -> Result<StateVector> {
    let chi = gates::chi(p)?;
    let cj = gates::cj_state(&gates::w(q)?)?;
    chi.tensor(&chi.renamed(&["q'"])?)?
        .tensor(&cj)?
        .tensor(&cj.renamed(&["p0", "p1"])?)?
        .with_layout(RegisterLayout::qubits(&RST_REGISTERS)?)
}

/// `|0⟩ ⊗ |0⟩ ⊗ J(W^±_q) ⊗ J(W^±_q)` over the six test registers.
pub fn rst_cheat_input(q: gates::WGateParam) -> Result<StateVector> {
    let zero = StateVector::zero(RegisterLayout::qubits(&["a", "b"])?);
    let cj = gates::cj_state(&gates::w_gate(q))?;
    zero.tensor(&cj)?
        .tensor(&cj.renamed(&["p0", "p1"])?)?
        .with_layout(RegisterLayout::qubits(&RST_REGISTERS)?)
}

/// Fair coin between the Reflection Test (flip, `U†`, reject on `Δ₀`) and
/// the Invertibility Test (`U†`, accept on `Δ₀`).
pub fn modified_reflection_procedure(
    spec: &ReflectionSpec,
    input: &StateVector,
) -> Result<ProtocolOutcome> {
    spec.check_input(input.dim())?;
    let psi = input.amplitudes();
    let ud = spec.u.matrix().adjoint();
    let mut out = ProtocolOutcome::new();

    let reflected = &ud * (spec.pi0.phase_flip().matrix() * psi);
    let stay = (spec.delta0.matrix() * &reflected).norm_squared();
    out.record(
        Verdict::Reject,
        "reflection test: returned to Δ₀",
        0.5 * stay,
    );
    out.record(
        Verdict::Accept,
        "reflection test: left Δ₀",
        0.5 * (reflected.norm_squared() - stay),
    );

    let back = &ud * psi;
    let legal = (spec.delta0.matrix() * &back).norm_squared();
    out.record(Verdict::Accept, "invertibility test: legal", 0.5 * legal);
    out.record(
        Verdict::Reject,
        "invertibility test: illegal",
        0.5 * (back.norm_squared() - legal),
    );
    Ok(out)
}

/// `½(V†Δ₁V + UΔ₀U†)` with `V = U†(−Π₀ + Π₁)`; its quadratic form is the
/// acceptance of the modified procedure.
pub fn mrp_acceptance_operator(spec: &ReflectionSpec) -> CMatrix {
    let u = spec.u.matrix();
    let v = u.adjoint() * spec.pi0.phase_flip().matrix();
    let d1 = identity(spec.dim()) - spec.delta0.matrix();
    (v.adjoint() * d1 * &v + u * spec.delta0.matrix() * u.adjoint()).scale(0.5)
}

/// Supremum of the modified procedure's acceptance over all inputs.
pub fn mrp_max_accept(spec: &ReflectionSpec) -> f64 {
    eig_hermitian_matrix(&mrp_acceptance_operator(spec)).values[0].clamp(0.0, 1.0)
}
