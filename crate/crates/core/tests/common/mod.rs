//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use qproof_core::epr::protocol::{initial_state, ProtocolConfig};
use qproof_core::epr::EPRProverStrategy;
use qproof_core::operator::{kron, CMatrix, CVector};
use qproof_core::qma::toys;
use qproof_core::{gates, Projector, StateVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Dense density matrix over named single qubits, manipulated with plain loops.
#[derive(Clone)]
pub struct DensitySim {
    pub names: Vec<String>,
    pub rho: Vec<Complex64>,
}

impl DensitySim {
    pub fn dim(&self) -> usize {
        1 << self.names.len()
    }

    fn pos(&self, name: &str) -> usize {
        self.names
            .iter()
            .position(|n| n == name)
            .unwrap_or_else(|| panic!("no qubit {name}"))
    }

    fn bit(&self, name: &str) -> usize {
        self.names.len() - 1 - self.pos(name)
    }

    /// `|ψ⟩⟨ψ|` with the listed qubits traced out.
    pub fn from_pure(names: Vec<String>, amps: &CVector, traced: &[String]) -> Self {
        let n = names.len();
        let keep: Vec<usize> = (0..n).filter(|&i| !traced.contains(&names[i])).collect();
        let gone: Vec<usize> = (0..n).filter(|&i| traced.contains(&names[i])).collect();
        let k = keep.len();
        let d = 1 << k;
        let index = |kept: usize, env: usize| {
            let mut idx = 0;
            for (j, &q) in keep.iter().enumerate() {
                idx |= ((kept >> (k - 1 - j)) & 1) << (n - 1 - q);
            }
            for (j, &q) in gone.iter().enumerate() {
                idx |= ((env >> (gone.len() - 1 - j)) & 1) << (n - 1 - q);
            }
            idx
        };
        let mut rho = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for e in 0..1usize << gone.len() {
                    s += amps[index(i, e)] * amps[index(j, e)].conj();
                }
                rho[i * d + j] = s;
            }
        }
        Self {
            names: keep.iter().map(|&i| names[i].clone()).collect(),
            rho,
        }
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.rho[i * d + i].re).sum()
    }

    /// `ρ ↦ G ρ G†` for a gate on the listed qubits (first listed = most significant).
    pub fn apply(&mut self, g: &CMatrix, targets: &[&str]) {
        let d = self.dim();
        let bits: Vec<usize> = targets.iter().map(|t| self.bit(t)).collect();
        let k = bits.len();
        let mask: usize = bits.iter().map(|b| 1 << b).sum();
        let local = |idx: usize| -> usize {
            let mut l = 0;
            for (j, &b) in bits.iter().enumerate() {
                l |= ((idx >> b) & 1) << (k - 1 - j);
            }
            l
        };
        let global = |base: usize, l: usize| -> usize {
            let mut idx = base;
            for (j, &b) in bits.iter().enumerate() {
                idx |= ((l >> (k - 1 - j)) & 1) << b;
            }
            idx
        };
        // rows: G ρ
        let mut tmp = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            let base = i & !mask;
            let li = local(i);
            for lj in 0..1 << k {
                let g_ij = g[(li, lj)];
                if g_ij == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = global(base, lj);
                for col in 0..d {
                    tmp[i * d + col] += g_ij * self.rho[src * d + col];
                }
            }
        }
        // columns: (G ρ) G†
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for col in 0..d {
            let base = col & !mask;
            let lc = local(col);
            for lj in 0..1 << k {
                let g_cj = g[(lc, lj)].conj();
                if g_cj == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = global(base, lj);
                for row in 0..d {
                    out[row * d + col] += tmp[row * d + src] * g_cj;
                }
            }
        }
        self.rho = out;
    }

    /// Keeps only the part where the listed qubits read `pattern`; returns the removed trace.
    pub fn project(&mut self, targets: &[&str], pattern: usize) -> f64 {
        let before = self.trace();
        let d = self.dim();
        let bits: Vec<usize> = targets.iter().map(|t| self.bit(t)).collect();
        let k = bits.len();
        let ok = |idx: usize| {
            bits.iter()
                .enumerate()
                .all(|(j, &b)| ((idx >> b) & 1) == ((pattern >> (k - 1 - j)) & 1))
        };
        for i in 0..d {
            for j in 0..d {
                if !ok(i) || !ok(j) {
                    self.rho[i * d + j] = Complex64::new(0.0, 0.0);
                }
            }
        }
        before - self.trace()
    }

    /// Appends a fresh `|0⟩` qubit.
    pub fn add_zero(&mut self, name: &str) {
        let d = self.dim();
        let mut rho = vec![Complex64::new(0.0, 0.0); 4 * d * d];
        for i in 0..d {
            for j in 0..d {
                rho[(2 * i) * (2 * d) + 2 * j] = self.rho[i * d + j];
            }
        }
        self.names.push(name.to_string());
        self.rho = rho;
    }

    pub fn trace_out(&mut self, name: &str) {
        let d = self.dim();
        let b = self.bit(name);
        let p = self.pos(name);
        let nd = d / 2;
        let squeeze = |idx: usize| ((idx >> (b + 1)) << b) | (idx & ((1 << b) - 1));
        let mut rho = vec![Complex64::new(0.0, 0.0); nd * nd];
        for i in 0..d {
            for j in 0..d {
                if (i >> b) & 1 == (j >> b) & 1 {
                    rho[squeeze(i) * nd + squeeze(j)] += self.rho[i * d + j];
                }
            }
        }
        self.names.remove(p);
        self.rho = rho;
    }

    /// Reduced matrix on the listed qubits, in the listed order.
    pub fn reduced(&self, keep: &[&str]) -> CMatrix {
        let mut s = self.clone();
        let gone: Vec<String> = s
            .names
            .iter()
            .filter(|n| !keep.contains(&n.as_str()))
            .cloned()
            .collect();
        for g in gone {
            s.trace_out(&g);
        }
        // reorder by applying nothing: build the matrix directly in `keep` order
        let k = keep.len();
        let d = 1 << k;
        let perm: Vec<usize> = keep.iter().map(|n| s.pos(n)).collect();
        let idx = |l: usize| -> usize {
            let mut g = 0;
            for (j, &p) in perm.iter().enumerate() {
                g |= ((l >> (k - 1 - j)) & 1) << (k - 1 - p);
            }
            g
        };
        CMatrix::from_fn(d, d, |i, j| s.rho[idx(i) * d + idx(j)])
    }
}

/// Per-qubit names of a core layout, `reg[i]` for wide registers.
pub fn qubit_names(layout: &qproof_core::RegisterLayout) -> Vec<String> {
    layout
        .registers()
        .iter()
        .flat_map(|(n, w)| {
            let w = *w;
            (0..w).map(move |i| {
                if w == 1 {
                    n.clone()
                } else {
                    format!("{n}[{i}]")
                }
            })
        })
        .collect()
}

fn reg_qubits(names: &[String], reg: &str) -> Vec<String> {
    names
        .iter()
        .filter(|n| *n == reg || n.starts_with(&format!("{reg}[")))
        .cloned()
        .collect()
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

fn fredkin() -> CMatrix {
    let mut m = CMatrix::identity(8, 8);
    m[(5, 5)] = c(0.0);
    m[(6, 6)] = c(0.0);
    m[(5, 6)] = c(1.0);
    m[(6, 5)] = c(1.0);
    m
}

fn cz() -> CMatrix {
    let mut m = CMatrix::identity(4, 4);
    m[(3, 3)] = c(-1.0);
    m
}

fn swap2() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(i, j)] = c(1.0);
    }
    m
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOutcome {
    pub accept: f64,
    pub give_up: f64,
    pub reject: f64,
}

/// Whole-protocol density-matrix simulation: every random choice is a
/// weighted copy of ρ and every measurement a projection.
pub fn epr_oracle(config: &ProtocolConfig, prover: &EPRProverStrategy) -> OracleOutcome {
    let init = initial_state(config, prover).expect("initial state");
    let names = qubit_names(init.layout());
    let ancillas: Vec<String> = names
        .iter()
        .filter(|n| n.starts_with('P'))
        .cloned()
        .collect();
    let mut sim = DensitySim::from_pure(names.clone(), init.amplitudes(), &ancillas);
    let n = config.n;
    let mut out = OracleOutcome {
        accept: 0.0,
        give_up: 0.0,
        reject: 0.0,
    };

    let v = config.verifier.unitary().matrix().clone();
    let acc = config.verifier.accept().matrix().clone();
    let a_q = reg_qubits(&names, "A");
    let m_q = reg_qubits(&names, "M");
    let am: Vec<&str> = a_q.iter().chain(m_q.iter()).map(String::as_str).collect();
    let dim_am = v.nrows();
    let flip = kron(
        &CMatrix::identity(2, 2),
        &(CMatrix::identity(dim_am, dim_am) - &acc),
    ) + kron(&pauli_x(), &acc);
    let a_refs: Vec<&str> = a_q.iter().map(String::as_str).collect();
    for r in ["R1", "R2"] {
        sim.apply(&v, &am);
        let mut ram = vec![r];
        ram.extend(am.iter().copied());
        sim.apply(&flip, &ram);
        sim.apply(&v.adjoint(), &am);
        out.give_up += sim.project(&a_refs, 0);
    }

    let t = gates::t_transform().matrix().clone();
    let h = gates::hadamard().matrix().clone();
    let cnot = gates::cnot().matrix().clone();
    let reach = sim.trace();
    for r1 in 1..=n {
        for r2 in 1..=n {
            let w = 1.0 / (n * n) as f64;
            if r2 == 1 {
                out.give_up += w * reach;
                continue;
            }
            let mut s = sim.clone();
            let (sj, spj) = (|j: usize| format!("S{j}"), |j: usize| format!("S'{j}"));
            if r1 >= 2 {
                s.apply(&swap2(), &[&sj(1), &sj(r1)]);
                s.apply(&swap2(), &[&spj(1), &spj(r1)]);
            }
            if r2 >= 3 {
                s.apply(&swap2(), &[&sj(2), &sj(r2)]);
                s.apply(&swap2(), &[&spj(2), &spj(r2)]);
            }
            let mut rej = 0.0;
            let mut gu = 0.0;
            for j in [1, 2] {
                s.apply(&t, &[&sj(j), &spj(j)]);
                rej += s.project(&[&spj(j)], 0);
                s.apply(&t.adjoint(), &[&sj(j), &spj(j)]);
            }
            s.add_zero("B");
            s.apply(&h, &["B"]);
            s.apply(&fredkin(), &["B", "S1", "S2"]);
            s.apply(&fredkin(), &["B", "S'1", "S'2"]);
            s.apply(&h, &["B"]);
            rej += s.project(&["B"], 0);
            s.trace_out("B");
            s.apply(&t, &["S1", "S'1"]);
            s.add_zero("R2'");
            s.apply(&cz(), &["R1", "S1"]);
            s.apply(&t.adjoint(), &["R2", "R2'"]);
            for (x, y) in [("R1", "R2"), ("S1", "S2")] {
                s.apply(&cnot, &[x, y]);
                s.apply(&h, &[x]);
            }
            gu += s.project(&["R1", "R2", "S1", "S2"], 0);
            let surviving = s.trace();
            let mut zz = s.clone();
            zz.project(&["R2'", "S'2"], 0);
            let stay = zz.trace();
            rej += stay;
            out.reject += w * rej;
            out.give_up += w * gu;
            out.accept += w * (surviving - stay);
        }
    }
    out
}

/// Cross term `Re⟨a|F|b⟩ + i·Im⟨a|F|b⟩` of a quadratic form `f`, for
/// orthonormal `a` and `b`, from two evaluations plus the known diagonal.
fn cross_term(
    f: &impl Fn(&CVector) -> f64,
    a: &CVector,
    fa: f64,
    b: &CVector,
    fb: f64,
) -> Complex64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mean = (fa + fb) / 2.0;
    let re = f(&((a + b) * c(h))) - mean;
    let im = mean - f(&((a + b * Complex64::new(0.0, 1.0)) * c(h)));
    Complex64::new(re, im)
}

/// Maximizes a quadratic form `f` over unit vectors of dimension `dim`
/// using evaluations only. Random restarts pick a start; each later step
/// estimates the residual direction `F b − f(b) b` from `3(dim − 1)`
/// evaluations, rebuilds the form on span{b, residual, previous move},
/// and moves to that span's top direction (a derivative-free LOBPCG).
/// Uses at most `evals` evaluations.
pub fn maximize_over_states(
    dim: usize,
    evals: usize,
    seed: u64,
    f: impl Fn(&CVector) -> f64,
) -> f64 {
    let mut r = rng(seed);
    let random_unit = |r: &mut ChaCha8Rng| {
        let v = CVector::from_fn(dim, |_, _| Complex64::new(gauss(r), gauss(r)));
        let n = v.norm();
        v / c(n)
    };
    let restarts = (evals / 10).max(1);
    let mut best = random_unit(&mut r);
    let mut best_f = f(&best);
    for _ in 1..restarts {
        let v = random_unit(&mut r);
        let fv = f(&v);
        if fv > best_f {
            best = v;
            best_f = fv;
        }
    }
    let mut used = restarts;
    let mut prev: Option<CVector> = None;
    let step_cost = 3 * (dim - 1) + 9;
    while used + step_cost <= evals {
        // orthonormal completion of the incumbent
        let mut frame: Vec<CVector> = vec![best.clone()];
        for k in 0..dim {
            let mut v = CVector::from_fn(dim, |i, _| c(if i == k { 1.0 } else { 0.0 }));
            for b in &frame {
                v -= b * b.dotc(&v);
            }
            let n = v.norm();
            if n > 1e-6 && frame.len() < dim {
                frame.push(v / c(n));
            }
        }
        let mut residual = CVector::zeros(dim);
        for u in &frame[1..] {
            let fu = f(u);
            residual += u * cross_term(&f, u, fu, &best, best_f);
        }
        used += 3 * (dim - 1);
        let mut basis = vec![best.clone()];
        let extra = [Some(residual), prev.clone(), Some(random_unit(&mut r))];
        for v in extra.into_iter().flatten() {
            if basis.len() == 3 {
                break;
            }
            let mut v = v;
            for b in &basis {
                v -= b * b.dotc(&v);
            }
            let n = v.norm();
            if n > 1e-12 {
                basis.push(v / c(n));
            }
        }
        let k = basis.len();
        let mut form = CMatrix::zeros(k, k);
        let diag: Vec<f64> = (0..k)
            .map(|j| if j == 0 { best_f } else { f(&basis[j]) })
            .collect();
        for a in 0..k {
            form[(a, a)] = c(diag[a]);
            for b in a + 1..k {
                let x = cross_term(&f, &basis[a], diag[a], &basis[b], diag[b]);
                form[(a, b)] = x;
                form[(b, a)] = x.conj();
            }
        }
        used += 9;
        let eig = form.symmetric_eigen();
        let top = (0..k)
            .max_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap())
            .unwrap();
        let coef = eig.eigenvectors.column(top);
        let mut cand = CVector::zeros(dim);
        for j in 0..k {
            cand += &basis[j] * coef[j];
        }
        let cand = &cand / c(cand.norm());
        let fc = f(&cand);
        if fc > best_f {
            prev = Some(&cand - &best * best.dotc(&cand));
            best = cand;
            best_f = fc;
        } else {
            prev = None;
        }
    }
    best_f
}

pub fn gauss<R: Rng>(r: &mut R) -> f64 {
    let u1: f64 = r.gen::<f64>().max(1e-300);
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// `⟨ψ|A|ψ⟩` for Hermitian `A`.
pub fn quad(a: &CMatrix, v: &CVector) -> f64 {
    v.dotc(&(a * v)).re
}

/// Pass probability of the swap test by expanding the three-step circuit
/// on a product `|a⟩|b⟩|0⟩` directly.
pub fn swap_test_oracle(a: &CVector, b: &CVector) -> f64 {
    let d = a.len();
    // amplitude after H, c-SWAP, H on the ancilla-0 branch: (|ab⟩ + |ba⟩)/2
    let mut pass = 0.0;
    for i in 0..d {
        for j in 0..d {
            let amp = (a[i] * b[j] + a[j] * b[i]) * 0.5;
            pass += amp.norm_sqr();
        }
    }
    pass
}

pub fn state(layout: qproof_core::RegisterLayout, v: CVector) -> StateVector {
    StateVector::normalized(layout, v).unwrap()
}

pub fn proj(dim: usize, basis: &[usize]) -> Projector {
    Projector::from_basis(dim, basis.iter().copied()).unwrap()
}

/// `W_p ⊗ W_q` specs with `pq = 1/2`, `p` from 1/2 to 1.
pub fn half_specs() -> Vec<qproof_core::ReflectionSpec> {
    (0..10)
        .map(|k| {
            let p = 0.5 + 0.5 * k as f64 / 9.0;
            qproof_core::ReflectionSpec::product_w(p, 1.0 / (2.0 * p)).unwrap()
        })
        .collect()
}

/// A flag qubit followed by two work qubits. `U = C (I ⊗ R)` with
/// `C = Σ_k W_{a_k} ⊗ |k⟩⟨k|` and Haar `R`, `Δ₀ = |0⟩⟨0| ⊗ I`,
/// `Π₀ = |1⟩⟨1| ⊗ I`, so the spectrum of `M` on `Δ₀` is exactly `{a_k}`.
pub fn spec_with_spectrum(a: [f64; 4], seed: u64) -> qproof_core::ReflectionSpec {
    let mut r = rng(seed);
    let rot = qproof_core::random::haar_unitary(&mut r, 2);
    let mut ctrl = CMatrix::zeros(8, 8);
    for (k, &ak) in a.iter().enumerate() {
        let w = gates::w(ak).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                ctrl[(4 * i + k, 4 * j + k)] = w.matrix()[(i, j)];
            }
        }
    }
    let u = ctrl * kron(&CMatrix::identity(2, 2), rot.matrix());
    qproof_core::ReflectionSpec::new(
        qproof_core::UnitaryOperator::new(u).unwrap(),
        proj(8, &[0, 1, 2, 3]),
        proj(8, &[4, 5, 6, 7]),
    )
    .unwrap()
}

/// Ten specs whose spectra avoid `(1/2 − ε, 1/2 + ε)`, with one eigenvalue on the edge.
pub fn gapped_specs() -> Vec<(f64, qproof_core::ReflectionSpec)> {
    let mut r = rng(77);
    let eps = [0.1, 0.25, 0.5];
    (0..10)
        .map(|i| {
            let e = eps[i % 3];
            let mut a = [0.0; 4];
            for (k, x) in a.iter_mut().enumerate() {
                let side = r.gen::<bool>();
                let depth = if k == 0 {
                    0.0
                } else {
                    r.gen::<f64>() * (0.5 - e)
                };
                *x = if side {
                    0.5 + e + depth
                } else {
                    0.5 - e - depth
                };
            }
            (e, spec_with_spectrum(a, 1000 + i as u64))
        })
        .collect()
}

/// Acceptance of the modified procedure written out directly:
/// `½‖Δ₁ U† (Π₁ − Π₀) ψ‖² + ½‖Δ₀ U† ψ‖²`.
pub fn mrp_acceptance_oracle(spec: &qproof_core::ReflectionSpec, psi: &CVector) -> f64 {
    let d = spec.dim();
    let ud = spec.u().matrix().adjoint();
    let p0 = spec.pi0().matrix();
    let flip = CMatrix::identity(d, d) - p0 * c(2.0);
    let d0 = spec.delta0().matrix();
    let d1 = CMatrix::identity(d, d) - d0;
    let n = psi.norm_squared();
    0.5 * ((&d1 * &ud * &flip * psi).norm_squared() + (d0 * &ud * psi).norm_squared()) / n
}

pub fn config(n: usize, v: qproof_core::VerifierCircuit) -> ProtocolConfig {
    ProtocolConfig::new(n, v).unwrap()
}

pub fn oracle_scenarios() -> Vec<(&'static str, ProtocolConfig, EPRProverStrategy)> {
    let mut r = rng(11);
    let haar = qproof_core::random::haar_unitary(&mut r, 4);
    vec![
        (
            "honest cnot-check",
            config(2, toys::cnot_check()),
            EPRProverStrategy::Honest,
        ),
        (
            "honest rotation-0.75",
            config(2, toys::rotation(0.75).unwrap()),
            EPRProverStrategy::Honest,
        ),
        (
            "wrong-q 0.3 on a no-instance",
            config(2, toys::rotation(1e-7).unwrap()),
            EPRProverStrategy::WrongQ(0.3),
        ),
        (
            "raw-zero on a no-instance",
            config(2, toys::rotation(1e-7).unwrap()),
            EPRProverStrategy::RawZero,
        ),
        (
            "haar prover on hadamard-coin",
            config(2, toys::hadamard_coin()),
            EPRProverStrategy::Explicit {
                unitary: haar,
                ancilla_qubits: 1,
            },
        ),
    ]
}
