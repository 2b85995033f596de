//! Two-outcome projective measurements.

use crate::error::{QError, Result};
use crate::layout::RegisterLayout;
use crate::operator::{embed_on_qubits, identity, CMatrix, Projector};
use crate::state::{DensityOperator, StateVector};

/// Outcome of measuring `{P, I − P}`. Post-states are renormalized and
/// absent when their branch has zero probability.
#[derive(Debug, Clone)]
pub struct Measurement<T> {
    pub probability: f64,
    pub in_range: Option<T>,
    pub in_complement: Option<T>,
}

/// Branches below this probability count as impossible.
pub const ZERO_BRANCH: f64 = 1e-20;

pub trait ProjectiveMeasure: Sized {
    fn measure(&self, p: &Projector) -> Result<Measurement<Self>>;
}

/// Measures `{P, I − P}` where `P` acts on the state's full space.
pub fn projective_measure<T: ProjectiveMeasure>(
    state: &T,
    p: &Projector,
) -> Result<Measurement<T>> {
    state.measure(p)
}

fn check(dim: usize, p: &Projector) -> Result<()> {
    if p.dim() != dim {
        return Err(QError::DimensionMismatch {
            expected: dim,
            got: p.dim(),
        });
    }
    Ok(())
}

impl ProjectiveMeasure for StateVector {
    fn measure(&self, p: &Projector) -> Result<Measurement<Self>> {
        check(self.dim(), p)?;
        let inside = p.matrix() * self.amplitudes();
        let outside = self.amplitudes() - &inside;
        let probability = inside.norm_squared().clamp(0.0, 1.0);
        let post = |v: crate::operator::CVector| {
            let n = v.norm();
            (n * n > ZERO_BRANCH)
                .then(|| StateVector::from_trusted(self.layout().clone(), v.unscale(n)))
        };
        Ok(Measurement {
            probability,
            in_range: post(inside),
            in_complement: post(outside),
        })
    }
}

impl ProjectiveMeasure for DensityOperator {
    fn measure(&self, p: &Projector) -> Result<Measurement<Self>> {
        check(self.dim(), p)?;
        let q = p.complement();
        let branch = |proj: &CMatrix| {
            let m = proj * self.matrix() * proj;
            let tr = m.trace().re;
            (
                tr,
                (tr > ZERO_BRANCH)
                    .then(|| DensityOperator::from_trusted(self.layout().clone(), m.unscale(tr))),
            )
        };
        let (probability, in_range) = branch(p.matrix());
        let (_, in_complement) = branch(q.matrix());
        Ok(Measurement {
            probability: probability.clamp(0.0, 1.0),
            in_range,
            in_complement,
        })
    }
}

/// Embeds a projector on `targets` into the full space of `layout`.
pub fn local_projector<S: AsRef<str>>(
    layout: &RegisterLayout,
    p: &Projector,
    targets: &[S],
) -> Result<Projector> {
    let qubits = layout.positions(targets)?;
    Ok(Projector::from_trusted(embed_on_qubits(
        p.matrix(),
        layout.num_qubits(),
        &qubits,
    )?))
}

/// Projector onto the computational basis states of `targets` matching `pattern`
/// (big-endian over the targets), embedded in the full space.
pub fn basis_projector<S: AsRef<str>>(
    layout: &RegisterLayout,
    targets: &[S],
    pattern: usize,
) -> Result<Projector> {
    let width: usize = targets
        .iter()
        .map(|t| layout.width(t.as_ref()))
        .sum::<Result<usize>>()?;
    let local = Projector::from_basis(1 << width, [pattern])?;
    local_projector(layout, &local, targets)
}

/// The identity as a projector.
pub fn full_projector(dim: usize) -> Projector {
    Projector::from_trusted(identity(dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{self, Bell};
    use crate::state::Evolve;

    #[test]
    fn plus_against_zero() {
        let l = RegisterLayout::qubits(&["q"]).unwrap();
        let plus = StateVector::zero(l)
            .apply_unitary(&gates::hadamard(), &["q"])
            .unwrap();
        let m = projective_measure(&plus, &Projector::from_basis(2, [0]).unwrap()).unwrap();
        assert!((m.probability - 0.5).abs() < 1e-12);
        assert!((m.in_range.unwrap().amplitudes()[0].re - 1.0).abs() < 1e-12);
        let md = projective_measure(&plus.to_density(), &Projector::from_basis(2, [0]).unwrap())
            .unwrap();
        assert!((md.probability - 0.5).abs() < 1e-12);
    }

    #[test]
    fn certain_outcome_has_no_complement() {
        let phi = gates::bell_state(Bell::PhiPlus);
        let p = Projector::from_orthonormal(&[Bell::PhiPlus.vector()]).unwrap();
        let m = projective_measure(&phi, &p).unwrap();
        assert!((m.probability - 1.0).abs() < 1e-12);
        assert!(m.in_complement.is_none());
    }

    #[test]
    fn basis_projector_picks_pattern() {
        let l = RegisterLayout::new(&[("a", 1), ("b", 2)]).unwrap();
        let p = basis_projector(&l, &["b"], 0b10).unwrap();
        assert_eq!(p.rank(), 2);
        assert!((p.matrix()[(0b010, 0b010)].re - 1.0).abs() < 1e-15);
        assert!((p.matrix()[(0b110, 0b110)].re - 1.0).abs() < 1e-15);
    }
}
