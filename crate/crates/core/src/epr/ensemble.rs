//! Ensembles of pair states in `span{|Φ−⟩, |Ψ+⟩}` and the inequalities
//! relating their two-fold products to CJ states of `W^±_a`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{QError, Result};
use crate::gates::{self, Bell, WGateParam, WSign};
use crate::layout::RegisterLayout;
use crate::metrics::trace_distance;
use crate::operator::{kron, outer, CMatrix, CVector};
use crate::state::DensityOperator;
use crate::TOL;

/// `ζ = α|Φ−⟩ + β e^{iθ}|Ψ+⟩` with weight `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WElement {
    pub weight: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
}

impl WElement {
    pub fn zeta(&self) -> CVector {
        Bell::PhiMinus.vector().scale(self.alpha)
            + Bell::PsiPlus
                .vector()
                .map(|z| z * Complex64::from_polar(self.beta, self.theta))
    }

    /// `a = β²`
    pub fn a(&self) -> f64 {
        self.beta * self.beta
    }

    /// `+` when `θ ∈ [0, π/2] ∪ [3π/2, 2π)` (mod 2π), `−` otherwise.
    pub fn sign(&self) -> WSign {
        let t = self.theta.rem_euclid(TAU);
        if t <= PI / 2.0 || t >= 1.5 * PI {
            WSign::Plus
        } else {
            WSign::Minus
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WEnsemble {
    elements: Vec<WElement>,
}

/// Layout of two pairs, verifier share first in each.
pub fn two_pair_layout() -> RegisterLayout {
    RegisterLayout::qubits(&["S1", "S'1", "S2", "S'2"]).expect("static layout")
}

impl WEnsemble {
    /// Weights nonnegative summing to one, `α, β ≥ 0` with `α² + β² = 1`.
    pub fn new(elements: Vec<WElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(QError::InvalidEnsemble("no elements".into()));
        }
        let total: f64 = elements.iter().map(|e| e.weight).sum();
        if (total - 1.0).abs() > TOL || elements.iter().any(|e| e.weight < -TOL) {
            return Err(QError::InvalidEnsemble(format!("weights sum to {total}")));
        }
        for e in &elements {
            if e.alpha < -TOL
                || e.beta < -TOL
                || (e.alpha * e.alpha + e.beta * e.beta - 1.0).abs() > TOL
            {
                return Err(QError::InvalidEnsemble(format!(
                    "amplitudes ({}, {}) are not a unit pair",
                    e.alpha, e.beta
                )));
            }
            if !e.theta.is_finite() {
                return Err(QError::InvalidEnsemble("non-finite phase".into()));
            }
        }
        Ok(Self { elements })
    }

    /// Random ensemble with `size` elements: Dirichlet-like weights, uniform
    /// angle for `(α, β)` and uniform phase.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Self {
        let raw: Vec<f64> = (0..size.max(1))
            .map(|_| -rng.gen::<f64>().max(1e-300).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let elements = raw
            .iter()
            .map(|w| {
                let phi = rng.gen_range(0.0..PI / 2.0);
                WElement {
                    weight: w / total,
                    alpha: phi.cos(),
                    beta: phi.sin(),
                    theta: rng.gen_range(0.0..TAU),
                }
            })
            .collect();
        Self { elements }
    }

    pub fn elements(&self) -> &[WElement] {
        &self.elements
    }

    /// `Σ μ_j |ζ_j⟩⟨ζ_j|^{⊗2}` over `(S1, S'1, S2, S'2)`.
    pub fn rho(&self) -> DensityOperator {
        let mut m = CMatrix::zeros(16, 16);
        for e in &self.elements {
            let z = outer(&e.zeta());
            m += kron(&z, &z).scale(e.weight);
        }
        DensityOperator::from_trusted(two_pair_layout(), m)
    }

    /// `Σ μ_j |J(W^±_{a_j})⟩⟨·|^{⊗2}` with signs from the phase rule.
    pub fn rounded(&self) -> DensityOperator {
        let mut m = CMatrix::zeros(16, 16);
        for e in &self.elements {
            let w =
                gates::w_gate(WGateParam::new(e.a().clamp(0.0, 1.0), e.sign()).expect("clamped"));
            let j = outer(gates::cj_state(&w).expect("single qubit").amplitudes());
            m += kron(&j, &j).scale(e.weight);
        }
        DensityOperator::from_trusted(two_pair_layout(), m)
    }

    /// `D(tr_{S'1 S'2} ρ, I/4)`
    pub fn delta(&self) -> f64 {
        let reduced = self
            .rho()
            .partial_trace(&["S'1", "S'2"])
            .expect("registers exist");
        let mixed = DensityOperator::maximally_mixed(reduced.layout().clone());
        trace_distance(&reduced, &mixed).expect("same dimension")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `lhs = D(tr_{S'} ρ, I/4)` against `rhs = 2 Σ μ α² β² sin²θ`.
pub fn claim_lower_bound_check(e: &WEnsemble) -> ClaimCheck {
    let lhs = e.delta();
    let rhs: f64 = e
        .elements
        .iter()
        .map(|x| 2.0 * x.weight * x.alpha.powi(2) * x.beta.powi(2) * x.theta.sin().powi(2))
        .sum();
    ClaimCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - TOL,
    }
}

#[derive(Debug, Clone)]
pub struct RoundingCheck {
    pub sigma: DensityOperator,
    pub distance: f64,
    pub delta: f64,
    /// `(π/2)√δ`
    pub bound: f64,
    pub bound_holds: bool,
}

/// Rounds every `ζ_j` to `J(W^±_{a_j})` and checks `D(ρ, σ) ≤ (π/2)√δ`.
pub fn cj_mixture_rounding(e: &WEnsemble) -> RoundingCheck {
    let sigma = e.rounded();
    let distance = trace_distance(&e.rho(), &sigma).expect("same dimension");
    let delta = e.delta();
    let bound = PI / 2.0 * delta.sqrt();
    RoundingCheck {
        sigma,
        distance,
        delta,
        bound,
        bound_holds: distance <= bound + TOL,
    }
}
