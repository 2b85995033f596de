//! Upper-bounding the distance from an m-pair state to mixtures of i.i.d. pair states.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eig::eig_hermitian_matrix;
use crate::epr::symmetric::IIDMixture;
use crate::error::{QError, Result};
use crate::gates::Bell;
use crate::metrics::trace_distance;
use crate::operator::{kron, CMatrix, CVector};
use crate::state::DensityOperator;

/// Default Bloch-grid spacing.
pub const DEFAULT_RESOLUTION: f64 = 0.05;
const SUBGRADIENT_STEPS: usize = 500;
const WARM_START: usize = 8;
const FW_ITERATIONS: usize = 400;

/// Candidate single-pair states.
#[derive(Debug, Clone)]
pub enum PairFamily {
    /// Bloch-ball grid over states supported on `span{|Φ−⟩, |Ψ+⟩}`.
    BlochSpan { resolution: f64 },
    /// An explicit list of 4×4 pair density operators.
    Custom(Vec<DensityOperator>),
}

impl Default for PairFamily {
    fn default() -> Self {
        PairFamily::BlochSpan {
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

fn pauli_combo(r: [f64; 3]) -> CMatrix {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + r[2]), 0.0),
            c(0.5 * r[0], -0.5 * r[1]),
            c(0.5 * r[0], 0.5 * r[1]),
            c(0.5 * (1.0 - r[2]), 0.0),
        ],
    )
}

/// Grid points `r` with `|r| ≤ 1` and coordinates on multiples of `resolution`.
pub fn bloch_grid(resolution: f64) -> Vec<[f64; 3]> {
    if resolution.is_nan() || resolution <= 0.0 {
        return Vec::new();
    }
    let k = (1.0 / resolution).floor() as i64;
    let mut out = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            for l in -k..=k {
                let r = [
                    i as f64 * resolution,
                    j as f64 * resolution,
                    l as f64 * resolution,
                ];
                if r.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12 {
                    out.push(r);
                }
            }
        }
    }
    out
}

/// `span{|Φ−⟩, |Ψ+⟩}` isometry, columns in that order.
fn span_isometry() -> CMatrix {
    CMatrix::from_columns(&[Bell::PhiMinus.vector(), Bell::PsiPlus.vector()])
}

/// Pair state with Bloch vector `r` relative to the basis `(|Φ−⟩, |Ψ+⟩)`.
pub fn bloch_pair_state(r: [f64; 3]) -> Result<DensityOperator> {
    if r.iter().map(|x| x * x).sum::<f64>() > 1.0 + 1e-12 {
        return Err(QError::OutOfRange(format!(
            "Bloch vector {r:?} outside the ball"
        )));
    }
    let e = span_isometry();
    let m = &e * pauli_combo(r) * e.adjoint();
    DensityOperator::new(pair_layout(), m)
}

fn pair_layout() -> crate::layout::RegisterLayout {
    crate::layout::RegisterLayout::qubits(&["S1", "S'1"]).expect("static layout")
}

fn kron_power(m: &CMatrix, n: usize) -> CMatrix {
    let mut out = m.clone();
    for _ in 1..n {
        out = kron(&out, m);
    }
    out
}

#[derive(Debug, Clone)]
pub struct DefinettiEstimate {
    /// `D(ρ, σ)` at the returned mixture; an upper bound on the minimum.
    pub distance: f64,
    pub mixture: IIDMixture,
    pub grid_size: usize,
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - tau).max(0.0);
    }
}

/// Atoms in compressed coordinates: only the leading `b^m` block is nonzero.
struct Problem {
    rho: CMatrix,
    atoms: Vec<CMatrix>,
    block: usize,
}

impl Problem {
    fn mix(&self, w: &[f64]) -> CMatrix {
        let k = self.rho.nrows();
        let mut s = CMatrix::zeros(k, k);
        for (a, &x) in self.atoms.iter().zip(w) {
            if x > 0.0 {
                let mut view = s.view_mut((0, 0), (self.block, self.block));
                view += a.scale(x);
            }
        }
        s
    }

    /// `Re tr(G a_j)` for every atom.
    fn pairing(&self, g: &CMatrix) -> Vec<f64> {
        let gb = g.view((0, 0), (self.block, self.block));
        self.atoms
            .iter()
            .map(|a| {
                gb.iter()
                    .zip(a.transpose().iter())
                    .map(|(x, y)| (x * y).re)
                    .sum()
            })
            .collect()
    }

    fn trace_distance(&self, s: &CMatrix) -> (f64, CMatrix) {
        let diff = &self.rho - s;
        let e = eig_hermitian_matrix(&diff);
        let sign = e.map(|x| {
            if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            }
        });
        (0.5 * e.values.iter().map(|x| x.abs()).sum::<f64>(), sign)
    }
}

/// Lawson–Hanson nonnegative least squares: `min ‖A x − b‖` with `x ≥ 0`.
fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Vec<f64> {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-13 * a.norm().max(1.0) * b.norm().max(1.0);
    let solve = |passive: &[bool]| -> DVector<f64> {
        let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
        let sub = a.select_columns(&idx);
        let z = sub
            .svd(true, true)
            .solve(b, 1e-14)
            .expect("SVD has both factors");
        let mut full = DVector::zeros(n);
        for (k, &i) in idx.iter().enumerate() {
            full[i] = z[k];
        }
        full
    };
    // columns whose entry stalled at zero; cleared whenever the fit improves
    let mut blocked = vec![false; n];
    for _ in 0..3 * n + 10 {
        let w = a.transpose() * (b - a * &x);
        let Some((j, &wj)) = w
            .iter()
            .enumerate()
            .filter(|(i, _)| !passive[*i] && !blocked[*i])
            .max_by(|p, q| p.1.total_cmp(q.1))
        else {
            break;
        };
        if wj <= tol {
            break;
        }
        passive[j] = true;
        let before = (b - a * &x).norm_squared();
        loop {
            let z = solve(&passive);
            if (0..n).filter(|&i| passive[i]).all(|i| z[i] > 0.0) {
                x = z;
                break;
            }
            let alpha = (0..n)
                .filter(|&i| passive[i] && z[i] <= 0.0)
                .map(|i| x[i] / (x[i] - z[i]))
                .fold(f64::INFINITY, f64::min);
            x += (z - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= 1e-15 {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
        if (b - a * &x).norm_squared() < before * (1.0 - 1e-12) {
            blocked.iter_mut().for_each(|f| *f = false);
        } else {
            blocked[j] = true;
        }
    }
    x.iter().map(|v| v.max(0.0)).collect()
}

/// Minimizes `‖ρ − Σ w a‖_F²` over the simplex restricted to `active`: an
/// exact NNLS solve with the normalization added as an extra row.
fn corrective_weights(p: &Problem, active: &[usize]) -> Vec<f64> {
    let b2 = p.block * p.block;
    let rows = 2 * b2 + 1;
    let rb = p.rho.view((0, 0), (p.block, p.block));
    // atoms and ρ have unit trace, so the row only nudges the normalization
    let scale = 1.0;
    let mut a = DMatrix::<f64>::zeros(rows, active.len());
    for (k, &i) in active.iter().enumerate() {
        for (r, z) in p.atoms[i].iter().enumerate() {
            a[(r, k)] = z.re;
            a[(b2 + r, k)] = z.im;
        }
        a[(2 * b2, k)] = scale;
    }
    let mut b = DVector::<f64>::zeros(rows);
    for (r, z) in rb.iter().enumerate() {
        b[r] = z.re;
        b[b2 + r] = z.im;
    }
    b[2 * b2] = scale;
    let w = nnls(&a, &b);
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Orthonormal basis for `range(E^{⊗m}) + range(ρ)`, span block first.
fn compression(rho: &CMatrix, span: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    let proj = span * span.adjoint();
    let rest = CMatrix::identity(d, d) - proj;
    let leak = &rest * rho * &rest;
    let e = eig_hermitian_matrix(&leak);
    let scale = e.values.first().copied().unwrap_or(0.0).max(1.0);
    let mut cols: Vec<CVector> = span.column_iter().map(|c| c.into_owned()).collect();
    for (v, x) in e.pairs() {
        if v > 1e-14 * scale {
            cols.push(x);
        }
    }
    CMatrix::from_columns(&cols)
}

/// Estimates `min D(ρ, Σ μ_j ξ_j^{⊗m})` over mixtures of family members.
///
/// Fully corrective Frank–Wolfe on the Frobenius distance picks a sparse
/// mixture, then projected subgradient steps refine it on trace distance.
/// The reported distance is evaluated in the full space at the best weights
/// seen, so it bounds the true minimum from above.
pub fn definetti_distance_estimate(
    rho: &DensityOperator,
    family: &PairFamily,
) -> Result<DefinettiEstimate> {
    let d = rho.dim();
    let folds = (d as f64).log(4.0).round() as usize;
    if folds == 0 || 1usize << (2 * folds) != d {
        return Err(QError::Invalid(format!(
            "dimension {d} is not a number of pairs"
        )));
    }
    let (local, pair_states): (CMatrix, Vec<(CMatrix, DensityOperator)>) = match family {
        PairFamily::BlochSpan { resolution } => {
            let grid = bloch_grid(*resolution);
            let e = span_isometry();
            let states = grid
                .into_iter()
                .map(|r| {
                    let small = pauli_combo(r);
                    let full =
                        DensityOperator::from_trusted(pair_layout(), &e * &small * e.adjoint());
                    (small, full)
                })
                .collect();
            (e, states)
        }
        PairFamily::Custom(list) => {
            for x in list {
                if x.dim() != 4 {
                    return Err(QError::DimensionMismatch {
                        expected: 4,
                        got: x.dim(),
                    });
                }
            }
            (
                CMatrix::identity(4, 4),
                list.iter()
                    .map(|x| (x.matrix().clone(), x.clone()))
                    .collect(),
            )
        }
    };
    if pair_states.is_empty() {
        return Err(QError::InvalidEnsemble("empty grid".into()));
    }

    let span = kron_power(&local, folds);
    let q = compression(rho.matrix(), &span);
    let problem = Problem {
        rho: q.adjoint() * rho.matrix() * &q,
        atoms: pair_states
            .iter()
            .map(|(m, _)| kron_power(m, folds))
            .collect(),
        block: span.ncols(),
    };
    let n = problem.atoms.len();

    // Frank-Wolfe with full correction over the active set, warm-started
    // from the atoms nearest to ρ.
    let mut weights = vec![0.0; n];
    let rb = problem
        .rho
        .view((0, 0), (problem.block, problem.block))
        .into_owned();
    let mut near: Vec<(f64, usize)> = problem
        .atoms
        .iter()
        .map(|a| (a - &rb).norm_squared())
        .zip(0..)
        .collect();
    near.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut active: Vec<usize> = near.iter().take(WARM_START).map(|x| x.1).collect();
    for (&i, &x) in active.iter().zip(&corrective_weights(&problem, &active)) {
        weights[i] = x;
    }
    active.retain(|&i| weights[i] > 0.0);
    for _ in 0..FW_ITERATIONS {
        let residual = problem.mix(&weights) - &problem.rho;
        let grad = problem.pairing(&residual);
        let (best, gmin) =
            grad.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (i, &g)| if g < acc.1 { (i, g) } else { acc },
            );
        let current: f64 = active.iter().map(|&i| weights[i] * grad[i]).sum();
        if !active.is_empty() && current - gmin < 1e-15 {
            break;
        }
        if !active.contains(&best) {
            active.push(best);
        }
        let w = corrective_weights(&problem, &active);
        for (&i, &x) in active.iter().zip(&w) {
            weights[i] = x;
        }
        active.retain(|&i| weights[i] > 0.0);
        let residual = problem.mix(&weights) - &problem.rho;
        if residual.norm_squared() < 1e-26 {
            break;
        }
    }

    // Projected subgradient on trace distance, keeping the best iterate.
    let (mut best_d, mut sign) = problem.trace_distance(&problem.mix(&weights));
    let mut best_w = weights.clone();
    let mut w = weights;
    for step in 0..SUBGRADIENT_STEPS {
        if best_d < 1e-12 {
            break;
        }
        let g: Vec<f64> = problem.pairing(&sign).iter().map(|x| -0.5 * x).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-15 {
            break;
        }
        let eta = best_d / (norm * norm) / (1.0 + step as f64).sqrt();
        for (x, gi) in w.iter_mut().zip(&g) {
            *x -= eta * gi;
        }
        project_simplex(&mut w);
        let (dist, s) = problem.trace_distance(&problem.mix(&w));
        sign = s;
        if dist < best_d {
            best_d = dist;
            best_w.clone_from(&w);
        }
    }

    let components: Vec<(f64, DensityOperator)> = best_w
        .iter()
        .zip(&pair_states)
        .filter(|(x, _)| **x > 0.0)
        .map(|(x, (_, s))| (*x, s.clone()))
        .collect();
    let total: f64 = components.iter().map(|c| c.0).sum();
    let components = components
        .into_iter()
        .map(|(x, s)| (x / total, s))
        .collect();
    let mixture = IIDMixture::new(components, folds)?;
    let sigma = mixture.state().with_layout(rho.layout().clone())?;
    let distance = trace_distance(rho, &sigma)?;
    Ok(DefinettiEstimate {
        distance,
        mixture,
        grid_size: n,
    })
}

/// `2^{2k+1} m / N` for registers of `k` qubits.
pub fn definetti_bound(k: usize, m: usize, n: usize) -> f64 {
    2f64.powi(2 * k as i32 + 1) * m as f64 / n as f64
}
