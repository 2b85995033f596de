//! Pair-permutation symmetrization and mixtures of i.i.d. pair states.

use crate::error::{QError, Result};
use crate::layout::RegisterLayout;
use crate::operator::CMatrix;
use crate::state::DensityOperator;

/// Largest pair count averaged over all permutations.
pub const EXACT_LIMIT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetrizeMode {
    /// Uniform average over all `N!` pair permutations.
    AllPermutations,
    /// Average over the step-3 swap family: `r1 ∈ 1..=N`, `r2 ∈ 2..=N`,
    /// swapping pair 1 with `r1` (if `r1 ≥ 2`) and then pair 2 with `r2` (if `r2 ≥ 3`).
    SwapFamily,
}

fn pair_count(rho: &DensityOperator) -> Result<usize> {
    let n = rho.layout().num_qubits();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(QError::Invalid(format!(
            "{n} qubits do not split into pairs"
        )));
    }
    Ok(n / 2)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Basis-index map sending pair `j` to position `perm[j]`.
fn index_map(pairs: usize, perm: &[usize]) -> Vec<usize> {
    let n = 2 * pairs;
    (0..1usize << n)
        .map(|idx| {
            let mut out = 0;
            for (j, &target) in perm.iter().enumerate() {
                let bits = (idx >> (n - 2 - 2 * j)) & 0b11;
                out |= bits << (n - 2 - 2 * target);
            }
            out
        })
        .collect()
}

/// `P_π ρ P_π†` where pair `j` moves to position `perm[j]`.
pub fn permute_pairs(rho: &DensityOperator, perm: &[usize]) -> Result<DensityOperator> {
    let pairs = pair_count(rho)?;
    if perm.len() != pairs {
        return Err(QError::DimensionMismatch {
            expected: pairs,
            got: perm.len(),
        });
    }
    let mut seen = vec![false; pairs];
    for &p in perm {
        if p >= pairs || std::mem::replace(&mut seen[p], true) {
            return Err(QError::Invalid(format!("{perm:?} is not a permutation")));
        }
    }
    let f = index_map(pairs, perm);
    let d = rho.dim();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        for k in 0..d {
            m[(f[i], f[k])] = rho.matrix()[(i, k)];
        }
    }
    Ok(DensityOperator::from_trusted(rho.layout().clone(), m))
}

fn swap_family(pairs: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for r1 in 1..=pairs {
        for r2 in 2..=pairs {
            // Track where each original pair ends up after the two swaps.
            let mut slots: Vec<usize> = (0..pairs).collect();
            if r1 >= 2 {
                slots.swap(0, r1 - 1);
            }
            if r2 >= 3 {
                slots.swap(1, r2 - 1);
            }
            let mut perm = vec![0; pairs];
            for (pos, &orig) in slots.iter().enumerate() {
                perm[orig] = pos;
            }
            out.push(perm);
        }
    }
    out
}

/// Averages `ρ` over pair permutations. Qubits are grouped into consecutive pairs.
pub fn symmetrize(rho: &DensityOperator, mode: SymmetrizeMode) -> Result<DensityOperator> {
    let pairs = pair_count(rho)?;
    let perms = match mode {
        SymmetrizeMode::AllPermutations => {
            if pairs > EXACT_LIMIT {
                return Err(QError::OutOfRange(format!(
                    "{pairs} pairs exceed the exact limit {EXACT_LIMIT}; use the swap family"
                )));
            }
            permutations(pairs)
        }
        SymmetrizeMode::SwapFamily => {
            if pairs < 2 {
                return Err(QError::OutOfRange("swap family needs two pairs".into()));
            }
            swap_family(pairs)
        }
    };
    let w = 1.0 / perms.len() as f64;
    let mut m = CMatrix::zeros(rho.dim(), rho.dim());
    for p in &perms {
        m += permute_pairs(rho, p)?.matrix().scale(w);
    }
    Ok(DensityOperator::from_trusted(rho.layout().clone(), m))
}

/// `Σ μ_j ξ_j^{⊗m}` over single-pair states `ξ_j`.
#[derive(Debug, Clone)]
pub struct IIDMixture {
    pub components: Vec<(f64, DensityOperator)>,
    pub folds: usize,
}

impl IIDMixture {
    pub fn new(components: Vec<(f64, DensityOperator)>, folds: usize) -> Result<Self> {
        if components.is_empty() || folds == 0 {
            return Err(QError::InvalidEnsemble("empty mixture".into()));
        }
        let total: f64 = components.iter().map(|c| c.0).sum();
        if (total - 1.0).abs() > crate::TOL || components.iter().any(|c| c.0 < -crate::TOL) {
            return Err(QError::InvalidEnsemble(format!("weights sum to {total}")));
        }
        for (_, xi) in &components {
            if xi.dim() != 4 {
                return Err(QError::DimensionMismatch {
                    expected: 4,
                    got: xi.dim(),
                });
            }
        }
        Ok(Self { components, folds })
    }

    pub fn state(&self) -> DensityOperator {
        let names: Vec<String> = (1..=self.folds)
            .flat_map(|j| [format!("S{j}"), format!("S'{j}")])
            .collect();
        let layout = RegisterLayout::qubits(&names).expect("distinct names");
        let d = layout.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, xi) in &self.components {
            let mut t = xi.matrix().clone();
            for _ in 1..self.folds {
                t = t.kronecker(xi.matrix());
            }
            m += t.scale(*w);
        }
        DensityOperator::from_trusted(layout, m)
    }
}
