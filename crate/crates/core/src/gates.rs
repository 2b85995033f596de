//! Named gates and states: standard gates, the `W_a` family, Bell states,
//! Choi-Jamiołkowski states, the Bell-basis transform `T`, Bell measurement
//! and the swap test.
//!
//! Everything here is exact. A physical verifier would realize `W_a` and the
//! phase flips over a finite gate set only approximately; the simulation
//! works with the ideal matrices directly.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::layout::RegisterLayout;
use crate::operator::{real_matrix, CVector, UnitaryOperator};
use crate::state::{StateVector, SubState};
use crate::TOL;

fn unitary(rows: usize, data: &[f64]) -> UnitaryOperator {
    UnitaryOperator::from_trusted(real_matrix(rows, rows, data))
}

pub fn pauli_x() -> UnitaryOperator {
    unitary(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_z() -> UnitaryOperator {
    unitary(2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn pauli_y() -> UnitaryOperator {
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    UnitaryOperator::from_trusted(crate::operator::CMatrix::from_row_slice(
        2,
        2,
        &[z, -i, i, z],
    ))
}

pub fn hadamard() -> UnitaryOperator {
    let h = FRAC_1_SQRT_2;
    unitary(2, &[h, h, h, -h])
}

/// Control is the first qubit.
pub fn cnot() -> UnitaryOperator {
    unitary(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
}

pub fn swap() -> UnitaryOperator {
    unitary(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

/// Single-qubit rotation `[[cos t, -sin t], [sin t, cos t]]`.
pub fn rotation_y(theta: f64) -> UnitaryOperator {
    let (s, c) = theta.sin_cos();
    unitary(2, &[c, -s, s, c])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WSign {
    Plus,
    Minus,
}

/// Parameter of `W⁺_a = W_a` or `W⁻_a = Z W_a Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WGateParam {
    a: f64,
    sign: WSign,
}

impl WGateParam {
    pub fn new(a: f64, sign: WSign) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || a.is_nan() {
            return Err(QError::OutOfRange(format!(
                "W parameter {a} outside [0, 1]"
            )));
        }
        Ok(Self { a, sign })
    }

    pub fn plus(a: f64) -> Result<Self> {
        Self::new(a, WSign::Plus)
    }

    pub fn minus(a: f64) -> Result<Self> {
        Self::new(a, WSign::Minus)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn sign(&self) -> WSign {
        self.sign
    }
}

/// `[[√(1−a), ±√a], [±√a, −√(1−a)]]`, self-inverse.
pub fn w_gate(p: WGateParam) -> UnitaryOperator {
    let c = (1.0 - p.a).sqrt();
    let s = match p.sign {
        WSign::Plus => p.a.sqrt(),
        WSign::Minus => -p.a.sqrt(),
    };
    unitary(2, &[c, s, s, -c])
}

/// `W⁺_a`, validating the parameter.
pub fn w(a: f64) -> Result<UnitaryOperator> {
    Ok(w_gate(WGateParam::plus(a)?))
}

/// `χ_a = W_a|0⟩ = √(1−a)|0⟩ + √a|1⟩` on a single qubit named `q`.
pub fn chi(a: f64) -> Result<StateVector> {
    WGateParam::plus(a)?;
    StateVector::from_real(
        RegisterLayout::qubits(&["q"])?,
        &[(1.0 - a).sqrt(), a.sqrt()],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn vector(self) -> CVector {
        let h = FRAC_1_SQRT_2;
        let amps = match self {
            Bell::PhiPlus => [h, 0.0, 0.0, h],
            Bell::PhiMinus => [h, 0.0, 0.0, -h],
            Bell::PsiPlus => [0.0, h, h, 0.0],
            Bell::PsiMinus => [0.0, h, -h, 0.0],
        };
        CVector::from_iterator(4, amps.iter().map(|&x| Complex64::new(x, 0.0)))
    }
}

impl fmt::Display for Bell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Bell::PhiPlus => "Φ+",
            Bell::PhiMinus => "Φ−",
            Bell::PsiPlus => "Ψ+",
            Bell::PsiMinus => "Ψ−",
        };
        f.write_str(s)
    }
}

fn pair_layout() -> RegisterLayout {
    RegisterLayout::qubits(&["q0", "q1"]).expect("static layout")
}

/// Bell state over registers `q0, q1`.
pub fn bell_state(b: Bell) -> StateVector {
    StateVector::from_trusted(pair_layout(), b.vector())
}

/// `(I ⊗ u)|Φ+⟩` over registers `q0, q1`.
pub fn cj_state(u: &UnitaryOperator) -> Result<StateVector> {
    if u.dim() != 2 {
        return Err(QError::DimensionMismatch {
            expected: 2,
            got: u.dim(),
        });
    }
    let v =
        crate::operator::kron(&crate::operator::identity(2), u.matrix()) * Bell::PhiPlus.vector();
    Ok(StateVector::from_trusted(pair_layout(), v))
}

/// `|Φ−⟩↦|00⟩, |Ψ−⟩↦|01⟩, |Ψ+⟩↦|10⟩, |Φ+⟩↦|11⟩`.
pub fn t_transform() -> UnitaryOperator {
    let h = FRAC_1_SQRT_2;
    unitary(
        4,
        &[
            h, 0.0, 0.0, -h, //
            0.0, h, -h, 0.0, //
            0.0, h, h, 0.0, //
            h, 0.0, 0.0, h,
        ],
    )
}

/// One outcome of a two-qubit Bell measurement.
#[derive(Debug, Clone)]
pub struct BellBranch {
    pub outcome: Bell,
    pub probability: f64,
    /// Normalized state of the remaining registers; `None` for a zero-probability outcome.
    pub state: Option<StateVector>,
}

fn single_qubit(layout: &RegisterLayout, name: &str) -> Result<()> {
    let w = layout.width(name)?;
    if w != 1 {
        return Err(QError::DimensionMismatch {
            expected: 1,
            got: w,
        });
    }
    Ok(())
}

/// Unnormalized Bell-measurement branches, in `Bell::ALL` order.
pub fn bell_branches(state: &SubState, a: &str, b: &str) -> Result<Vec<(Bell, SubState)>> {
    if a == b {
        return Err(QError::RegistersNotDistinct(a.to_string()));
    }
    single_qubit(state.layout(), a)?;
    single_qubit(state.layout(), b)?;
    Bell::ALL
        .iter()
        .map(|&bell| Ok((bell, state.contract(&[a, b], &bell.vector())?)))
        .collect()
}

/// Measures two single-qubit registers in the Bell basis. When nothing
/// remains after the measurement the branch states are `None`.
pub fn bell_measurement(state: &StateVector, a: &str, b: &str) -> Result<Vec<BellBranch>> {
    Ok(bell_branches(&state.as_sub(), a, b)?
        .into_iter()
        .map(|(outcome, s)| {
            let rest = if s.layout().num_qubits() == 0 {
                None
            } else {
                s.normalize()
            };
            BellBranch {
                outcome,
                probability: s.weight(),
                state: rest,
            }
        })
        .collect())
}

/// Result of a swap test.
#[derive(Debug, Clone)]
pub struct SwapTestResult {
    pub pass_probability: f64,
    /// Post-measurement states with the ancilla removed.
    pub pass_state: Option<StateVector>,
    pub fail_state: Option<StateVector>,
}

/// Swap-test branches `(pass, fail)` as unnormalized vectors over the input
/// registers. The ancilla must be absent from the layout (a fresh `|0⟩` is
/// used) or present and in `|0⟩`; it is removed from the outputs.
pub fn swap_test_branches(
    state: &SubState,
    a: &[&str],
    b: &[&str],
    ancilla: &str,
) -> Result<(SubState, SubState)> {
    let wa: usize = a
        .iter()
        .map(|r| state.layout().width(r))
        .sum::<Result<usize>>()?;
    let wb: usize = b
        .iter()
        .map(|r| state.layout().width(r))
        .sum::<Result<usize>>()?;
    if wa != wb {
        return Err(QError::DimensionMismatch {
            expected: wa,
            got: wb,
        });
    }
    let mut s = if state.layout().contains(ancilla) {
        single_qubit(state.layout(), ancilla)?;
        let one = CVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let stray = state.contract(&[ancilla], &one)?.weight();
        if stray > TOL {
            return Err(QError::Invalid(format!(
                "swap-test ancilla `{ancilla}` is not in |0⟩"
            )));
        }
        state.clone()
    } else {
        state.tensor(&StateVector::zero(RegisterLayout::qubits(&[ancilla])?))?
    };
    let h = hadamard();
    s.apply(&h, &[ancilla])?;
    s.swap(a, b, Some(ancilla))?;
    s.apply(&h, &[ancilla])?;
    let zero = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let one = CVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
    Ok((
        s.contract(&[ancilla], &zero)?,
        s.contract(&[ancilla], &one)?,
    ))
}

/// H on the ancilla, controlled swaps of `a` and `b` qubitwise, H, measure;
/// passing means the ancilla reads 0.
pub fn swap_test(
    state: &StateVector,
    a: &[&str],
    b: &[&str],
    ancilla: &str,
) -> Result<SwapTestResult> {
    let (pass, fail) = swap_test_branches(&state.as_sub(), a, b, ancilla)?;
    Ok(SwapTestResult {
        pass_probability: pass.weight(),
        pass_state: pass.normalize(),
        fail_state: fail.normalize(),
    })
}
