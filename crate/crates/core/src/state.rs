//! Pure and mixed states over named register layouts.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::eig::eig_hermitian_matrix;
use crate::error::{QError, Result};
use crate::kernel;
use crate::layout::RegisterLayout;
use crate::operator::{max_abs_diff, outer, CMatrix, CVector, UnitaryOperator};
use crate::TOL;

fn check_dim(layout: &RegisterLayout, got: usize) -> Result<()> {
    if layout.dim() != got {
        return Err(QError::DimensionMismatch {
            expected: layout.dim(),
            got,
        });
    }
    Ok(())
}

fn target_positions<S: AsRef<str>>(
    layout: &RegisterLayout,
    targets: &[S],
    op_dim: usize,
) -> Result<Vec<usize>> {
    let qubits = layout.positions(targets)?;
    if op_dim != 1 << qubits.len() {
        return Err(QError::DimensionMismatch {
            expected: 1 << qubits.len(),
            got: op_dim,
        });
    }
    Ok(qubits)
}

/// Anything a unitary can act on through register names.
pub trait Evolve: Sized {
    /// Applies `u` to the concatenation of `targets` (identity elsewhere).
    fn apply_unitary<S: AsRef<str>>(&self, u: &UnitaryOperator, targets: &[S]) -> Result<Self>;
}

/// `(I ⊗ u ⊗ I)` applied in the layout's qubit ordering.
pub fn apply_unitary<T: Evolve, S: AsRef<str>>(
    state: &T,
    u: &UnitaryOperator,
    targets: &[S],
) -> Result<T> {
    state.apply_unitary(u, targets)
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: CVector,
}

impl StateVector {
    pub fn new(layout: RegisterLayout, amps: CVector) -> Result<Self> {
        check_dim(&layout, amps.len())?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(QError::NotNormalized(norm));
        }
        Ok(Self { layout, amps })
    }

    /// Normalizes the given amplitudes; fails on a zero vector.
    pub fn normalized(layout: RegisterLayout, amps: CVector) -> Result<Self> {
        check_dim(&layout, amps.len())?;
        let norm = amps.norm();
        if norm < 1e-300 {
            return Err(QError::NotNormalized(norm));
        }
        Ok(Self {
            layout,
            amps: amps.unscale(norm),
        })
    }

    pub fn from_real(layout: RegisterLayout, amps: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(amps.len(), amps.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::new(layout, v)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(QError::OutOfRange(format!(
                "basis index {index} >= {}",
                layout.dim()
            )));
        }
        let mut v = CVector::zeros(layout.dim());
        v[index] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amps: v })
    }

    pub fn zero(layout: RegisterLayout) -> Self {
        Self::basis(layout, 0).expect("index 0 always exists")
    }

    pub(crate) fn from_trusted(layout: RegisterLayout, amps: CVector) -> Self {
        debug_assert!((amps.norm() - 1.0).abs() < 1e-7);
        Self { layout, amps }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(QError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `self ⊗ other` with concatenated layouts.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self {
            layout,
            amps: self.amps.kronecker(&other.amps),
        })
    }

    pub fn renamed<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        Ok(Self {
            layout: self.layout.renamed(names)?,
            amps: self.amps.clone(),
        })
    }

    /// Same amplitudes over a layout of equal dimension.
    pub fn with_layout(&self, layout: RegisterLayout) -> Result<Self> {
        check_dim(&layout, self.dim())?;
        Ok(Self {
            layout,
            amps: self.amps.clone(),
        })
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            layout: self.layout.clone(),
            rho: outer(&self.amps),
        }
    }

    /// Reduced state on the kept registers (in layout order).
    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        self.clone().into_sub().reduced(keep)
    }

    pub fn into_sub(self) -> SubState {
        SubState {
            layout: self.layout,
            amps: self.amps,
        }
    }

    pub fn as_sub(&self) -> SubState {
        self.clone().into_sub()
    }
}

impl Evolve for StateVector {
    fn apply_unitary<S: AsRef<str>>(&self, u: &UnitaryOperator, targets: &[S]) -> Result<Self> {
        let mut out = self.as_sub();
        out.apply(u, targets)?;
        Ok(Self {
            layout: out.layout,
            amps: out.amps,
        })
    }
}

/// An unnormalized branch vector: its squared norm is the probability mass
/// of the branch it represents.
#[derive(Debug, Clone, PartialEq)]
pub struct SubState {
    layout: RegisterLayout,
    amps: CVector,
}

impl SubState {
    pub fn new(layout: RegisterLayout, amps: CVector) -> Result<Self> {
        check_dim(&layout, amps.len())?;
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn weight(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.amps.scale_mut(factor);
        self
    }

    /// Rescaled to unit weight; callers check the weight first.
    pub fn renormalized(mut self) -> Self {
        let n = self.amps.norm();
        self.amps.unscale_mut(n);
        self
    }

    /// Renormalized state, or `None` for a zero-probability branch.
    pub fn normalize(&self) -> Option<StateVector> {
        let norm = self.amps.norm();
        if norm * norm < crate::measure::ZERO_BRANCH {
            return None;
        }
        Some(StateVector {
            layout: self.layout.clone(),
            amps: self.amps.unscale(norm),
        })
    }

    pub fn apply<S: AsRef<str>>(&mut self, u: &UnitaryOperator, targets: &[S]) -> Result<()> {
        self.apply_matrix(u.matrix(), targets)
    }

    /// Applies any operator of matching dimension (projectors, Kraus operators).
    pub fn apply_matrix<S: AsRef<str>>(&mut self, m: &CMatrix, targets: &[S]) -> Result<()> {
        let qubits = target_positions(&self.layout, targets, m.nrows())?;
        let n = self.layout.num_qubits();
        kernel::apply_matrix(self.amps.as_mut_slice(), n, &qubits, m);
        Ok(())
    }

    /// Returns `P ψ` for a register-local operator `P`.
    pub fn project<S: AsRef<str>>(&self, p: &CMatrix, targets: &[S]) -> Result<SubState> {
        let mut out = self.clone();
        out.apply_matrix(p, targets)?;
        Ok(out)
    }

    /// Projects the listed registers onto `bra` and drops them from the layout.
    pub fn contract<S: AsRef<str>>(&self, targets: &[S], bra: &CVector) -> Result<SubState> {
        let qubits = target_positions(&self.layout, targets, bra.len())?;
        let n = self.layout.num_qubits();
        let rest = kernel::contract(self.amps.as_slice(), n, &qubits, bra.as_slice());
        Ok(SubState {
            layout: self.layout.without(targets)?,
            amps: DVector::from_vec(rest),
        })
    }

    /// Exchanges the contents of equal-width register groups, optionally
    /// controlled on a single-qubit register being `|1⟩`.
    pub fn swap<S: AsRef<str>>(&mut self, a: &[S], b: &[S], control: Option<&str>) -> Result<()> {
        let qa = self.layout.positions(a)?;
        let qb = self.layout.positions(b)?;
        if qa.len() != qb.len() {
            return Err(QError::DimensionMismatch {
                expected: qa.len(),
                got: qb.len(),
            });
        }
        if qa.iter().any(|q| qb.contains(q)) {
            return Err(QError::RegistersNotDistinct("swap groups overlap".into()));
        }
        let ctrl = match control {
            Some(c) => {
                let r = self.layout.range(c)?;
                if r.len() != 1 {
                    return Err(QError::DimensionMismatch {
                        expected: 1,
                        got: r.len(),
                    });
                }
                if qa.contains(&r.start) || qb.contains(&r.start) {
                    return Err(QError::RegistersNotDistinct(c.to_string()));
                }
                Some(r.start)
            }
            None => None,
        };
        let n = self.layout.num_qubits();
        kernel::swap_qubits(self.amps.as_mut_slice(), n, &qa, &qb, ctrl);
        Ok(())
    }

    /// Appends fresh registers holding `state`.
    pub fn tensor(&self, state: &StateVector) -> Result<SubState> {
        let layout = self.layout.concat(state.layout())?;
        Ok(SubState {
            layout,
            amps: self.amps.kronecker(state.amplitudes()),
        })
    }

    /// Unnormalized reduced operator on the kept registers (trace = weight).
    pub fn reduced_unnormalized<S: AsRef<str>>(&self, keep: &[S]) -> Result<CMatrix> {
        let qubits = self.layout.positions(keep)?;
        Ok(kernel::reduced_from_pure(
            self.amps.as_slice(),
            self.layout.num_qubits(),
            &qubits,
        ))
    }

    /// Normalized reduced state on the kept registers, listed in layout order.
    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        let ordered: Vec<String> = self
            .layout
            .names()
            .filter(|n| keep.iter().any(|k| k.as_ref() == *n))
            .map(str::to_string)
            .collect();
        for k in keep {
            if !self.layout.contains(k.as_ref()) {
                return Err(QError::UnknownRegister(k.as_ref().to_string()));
            }
        }
        let m = self.reduced_unnormalized(&ordered)?;
        let w = self.weight();
        if w < 1e-300 {
            return Err(QError::InvalidDensity("zero-weight branch".into()));
        }
        let layout = self.layout.without(
            &self
                .layout
                .names()
                .filter(|n| !ordered.iter().any(|k| k == n))
                .collect::<Vec<_>>(),
        )?;
        Ok(DensityOperator {
            layout,
            rho: m.unscale(w),
        })
    }
}

/// A mixed state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: RegisterLayout,
    rho: CMatrix,
}

impl DensityOperator {
    pub fn new(layout: RegisterLayout, rho: CMatrix) -> Result<Self> {
        check_dim(&layout, rho.nrows())?;
        if rho.nrows() != rho.ncols() {
            return Err(QError::DimensionMismatch {
                expected: rho.nrows(),
                got: rho.ncols(),
            });
        }
        let herm = max_abs_diff(&rho, &rho.adjoint());
        if herm > TOL {
            return Err(QError::NotHermitian(herm));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(QError::InvalidDensity(format!("trace {tr}")));
        }
        let rho = (&rho + rho.adjoint()).scale(0.5);
        let min = eig_hermitian_matrix(&rho)
            .values
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -TOL {
            return Err(QError::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { layout, rho })
    }

    pub(crate) fn from_trusted(layout: RegisterLayout, rho: CMatrix) -> Self {
        Self { layout, rho }
    }

    pub fn pure(state: &StateVector) -> Self {
        state.to_density()
    }

    /// `I / d`
    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let d = layout.dim();
        Self {
            layout,
            rho: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    /// Convex combination; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, DensityOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| QError::Invalid("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < -TOL) || (total - 1.0).abs() > TOL {
            return Err(QError::InvalidDensity(format!(
                "mixture weights sum to {total}"
            )));
        }
        let mut rho = CMatrix::zeros(first.1.dim(), first.1.dim());
        for (w, d) in parts {
            if d.dim() != rho.nrows() {
                return Err(QError::DimensionMismatch {
                    expected: rho.nrows(),
                    got: d.dim(),
                });
            }
            rho += d.rho.scale(*w);
        }
        Ok(Self {
            layout: first.1.layout.clone(),
            rho,
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        Ok(Self {
            layout: self.layout.concat(&other.layout)?,
            rho: self.rho.kronecker(&other.rho),
        })
    }

    pub fn renamed<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        Ok(Self {
            layout: self.layout.renamed(names)?,
            rho: self.rho.clone(),
        })
    }

    pub fn with_layout(&self, layout: RegisterLayout) -> Result<Self> {
        check_dim(&layout, self.dim())?;
        Ok(Self {
            layout,
            rho: self.rho.clone(),
        })
    }

    /// Traces out the named registers. Tracing everything yields the 1×1 trace.
    pub fn partial_trace<S: AsRef<str>>(&self, traced: &[S]) -> Result<DensityOperator> {
        let remaining = self.layout.without(traced)?;
        let keep_names: Vec<&str> = remaining.names().collect();
        let keep = self.layout.positions(&keep_names)?;
        let rho = kernel::partial_trace(&self.rho, self.layout.num_qubits(), &keep);
        Ok(Self {
            layout: remaining,
            rho,
        })
    }

    /// `tr(P ρ)` for a full-space operator.
    pub fn expectation(&self, op: &CMatrix) -> Result<f64> {
        if op.nrows() != self.dim() {
            return Err(QError::DimensionMismatch {
                expected: self.dim(),
                got: op.nrows(),
            });
        }
        Ok((op * &self.rho).trace().re)
    }

    /// Spectral decomposition into a pure-state ensemble (weights > 1e-15).
    pub fn ensemble(&self) -> Vec<(f64, StateVector)> {
        let eig = eig_hermitian_matrix(&self.rho);
        eig.pairs()
            .filter(|(w, _)| *w > 1e-15)
            .map(|(w, v)| {
                (
                    w,
                    StateVector::from_trusted(self.layout.clone(), v.normalize()),
                )
            })
            .collect()
    }
}

impl Evolve for DensityOperator {
    fn apply_unitary<S: AsRef<str>>(&self, u: &UnitaryOperator, targets: &[S]) -> Result<Self> {
        let qubits = target_positions(&self.layout, targets, u.dim())?;
        let rho =
            kernel::conjugate_density(&self.rho, self.layout.num_qubits(), &qubits, u.matrix());
        Ok(Self {
            layout: self.layout.clone(),
            rho,
        })
    }
}
