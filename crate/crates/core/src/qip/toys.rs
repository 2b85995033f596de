//! Small multi-message systems with closed-form maximum acceptance.
//!
//! `V = (c, t, g)`, one message qubit, one prover qubit. The verifier first
//! stashes whatever message it holds in `g`, then tosses `c` with bias `a`,
//! copies it into the message and rotates the message by `R_y(φ)`. The final
//! verifier unitary copies the message into `t`; acceptance needs `c = t = 1`.
//! The honest prover undoes the rotation, so the maximum over all provers is
//! exactly `a`.

use crate::circuit::{circuit_unitary, GateOp};
use crate::error::{QError, Result};
use crate::gates;
use crate::layout::RegisterLayout;
use crate::measure::basis_projector;
use crate::operator::UnitaryOperator;
use crate::qip::system::{QIPProverSpec, QIPSystemSpec};

fn named() -> RegisterLayout {
    RegisterLayout::qubits(&["c", "t", "g", "M"]).expect("static layout")
}

/// `m`-message toy with coin bias `a` and rotation angle `phi`, declared `(c, s)`.
pub fn twist(
    messages: usize,
    a: f64,
    phi: f64,
    c: f64,
    s: f64,
) -> Result<(QIPSystemSpec, QIPProverSpec)> {
    if messages < 2 {
        return Err(QError::OutOfRange("toys need at least two messages".into()));
    }
    let l = named();
    let first = circuit_unitary(
        &l,
        &[
            GateOp::new(gates::swap(), &["g", "M"]),
            GateOp::new(gates::w(a)?, &["c"]),
            GateOp::new(gates::cnot(), &["c", "M"]),
            GateOp::new(gates::rotation_y(phi), &["M"]),
        ],
    )?;
    let last = circuit_unitary(&l, &[GateOp::new(gates::cnot(), &["M", "t"])])?;
    let r = messages / 2;
    let mut verifier = vec![first];
    verifier.extend(std::iter::repeat_n(UnitaryOperator::identity(4), r - 1));
    verifier.push(last);
    let accept = basis_projector(&l, &["c", "t"], 0b11)?;
    let spec = QIPSystemSpec::new(messages, 3, 1, verifier, accept, c, s)?;

    // The prover's reply right after V_1 undoes the rotation.
    let undo = gates::rotation_y(-phi).tensor(&UnitaryOperator::identity(1));
    let mut unitaries = vec![UnitaryOperator::identity(2); spec.prover_unitaries()];
    let reply = if spec.prover_first() { 1 } else { 0 };
    unitaries[reply] = undo;
    Ok((spec, QIPProverSpec::new(1, unitaries)?))
}

/// `twist` without the rotation.
pub fn relay(messages: usize, a: f64, c: f64, s: f64) -> Result<(QIPSystemSpec, QIPProverSpec)> {
    twist(messages, a, 0.0, c, s)
}

/// Named presets: yes-instances (maximum `c`) and no-instances (maximum `s`).
pub fn catalog() -> Vec<(String, QIPSystemSpec, QIPProverSpec)> {
    let mut out = Vec::new();
    for (name, messages, a, phi, c, s) in [
        ("relay3-yes", 3, 1.0, 0.0, 1.0, 0.0),
        ("twist3-yes", 3, 2.0 / 3.0, 0.7, 2.0 / 3.0, 1.0 / 3.0),
        ("twist3-no", 3, 1.0 / 3.0, 0.7, 2.0 / 3.0, 1.0 / 3.0),
        ("twist2-yes", 2, 0.75, 1.1, 0.75, 0.25),
        ("twist2-no", 2, 0.25, 1.1, 0.75, 0.25),
        ("twist5-yes", 5, 0.9, 0.4, 0.9, 0.2),
    ] {
        let (spec, prover) = twist(messages, a, phi, c, s).expect("valid preset");
        out.push((name.to_string(), spec, prover));
    }
    out
}
