//! Gate lists over named registers.

use crate::error::Result;
use crate::kernel;
use crate::layout::RegisterLayout;
use crate::operator::{identity, UnitaryOperator};

/// A gate applied to a list of registers (concatenated in order).
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub gate: UnitaryOperator,
    pub targets: Vec<String>,
}

impl GateOp {
    pub fn new<S: AsRef<str>>(gate: UnitaryOperator, targets: &[S]) -> Self {
        Self {
            gate,
            targets: targets.iter().map(|t| t.as_ref().to_string()).collect(),
        }
    }
}

/// The product of the gates over the whole layout, first gate applied first.
pub fn circuit_unitary(layout: &RegisterLayout, ops: &[GateOp]) -> Result<UnitaryOperator> {
    let n = layout.num_qubits();
    let mut m = identity(layout.dim());
    for op in ops {
        let qubits = layout.positions(&op.targets)?;
        if op.gate.dim() != 1 << qubits.len() {
            return Err(crate::QError::DimensionMismatch {
                expected: 1 << qubits.len(),
                got: op.gate.dim(),
            });
        }
        kernel::apply_matrix_columns(&mut m, n, &qubits, op.gate.matrix());
    }
    Ok(UnitaryOperator::from_trusted(m))
}
