//! The EPR-assisted QMA verifier with perfect completeness.
//!
//! Registers: the witness `M`, the prover-side shares `S'1..S'N`, prover
//! ancillas `P1..Pk`, the verifier-side shares `S1..SN`, the verifier's
//! private register `A` and the distillation outputs `R1`, `R2`. The swap
//! test control `B` and the simulation test's `R2'` are added when needed.

use rand::Rng;
use rayon::prelude::*;

use crate::circuit::GateOp;
use crate::error::{QError, Result};
use crate::gates::{self, WGateParam};
use crate::layout::RegisterLayout;
use crate::measure::ZERO_BRANCH;
use crate::operator::{CVector, UnitaryOperator};
use crate::outcome::{ProtocolOutcome, Verdict};
use crate::qma::{self, VerifierCircuit, PRIVATE, WITNESS};
use crate::reflection::rst_in;
use crate::state::{StateVector, SubState};
use crate::DEFAULT_QUBIT_BUDGET;

pub fn share(j: usize) -> String {
    format!("S{j}")
}

pub fn prover_share(j: usize) -> String {
    format!("S'{j}")
}

pub fn ancilla(j: usize) -> String {
    format!("P{j}")
}

pub const SWAP_CONTROL: &str = "B";
pub const OUTPUT_1: &str = "R1";
pub const OUTPUT_2: &str = "R2";
pub const FRESH: &str = "R2'";

#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub n: usize,
    pub verifier: VerifierCircuit,
    /// Ancilla width granted to explicit prover unitaries.
    pub ancilla_qubits: usize,
    pub qubit_budget: usize,
}

impl ProtocolConfig {
    pub fn new(n: usize, verifier: VerifierCircuit) -> Result<Self> {
        if n < 2 {
            return Err(QError::OutOfRange(format!(
                "N = {n}; at least two pairs are needed"
            )));
        }
        let ancilla_qubits = verifier.m_qubits() + n;
        Ok(Self {
            n,
            verifier,
            ancilla_qubits,
            qubit_budget: DEFAULT_QUBIT_BUDGET,
        })
    }

    pub fn with_ancilla(mut self, k: usize) -> Self {
        self.ancilla_qubits = k;
        self
    }

    pub fn with_budget(mut self, qubits: usize) -> Self {
        self.qubit_budget = qubits;
        self
    }

    /// Register layout for a prover using `k` ancilla qubits.
    pub fn layout(&self, k: usize) -> Result<RegisterLayout> {
        let mut regs: Vec<(String, usize)> = vec![(WITNESS.into(), self.verifier.m_qubits())];
        regs.extend((1..=self.n).map(|j| (prover_share(j), 1)));
        regs.extend((1..=k).map(|j| (ancilla(j), 1)));
        regs.extend((1..=self.n).map(|j| (share(j), 1)));
        regs.push((PRIVATE.into(), self.verifier.v_qubits()));
        regs.push((OUTPUT_1.into(), 1));
        regs.push((OUTPUT_2.into(), 1));
        RegisterLayout::new(&regs)
    }

    /// Peak simulated width: the base layout plus one transient register.
    pub fn peak_qubits(&self, k: usize) -> usize {
        self.verifier.m_qubits() + 2 * self.n + k + self.verifier.v_qubits() + 3
    }
}

/// How the prover prepares `(M, S'1..S'N)`.
#[derive(Debug, Clone)]
pub enum EPRProverStrategy {
    /// Top eigenvector of the acceptance operator in `M`, `W_q` on every
    /// share with `pq = 1/2`.
    Honest,
    /// Honest witness, `W_q` with the given (wrong) `q`.
    WrongQ(f64),
    /// The given witness, `W_q` on every share.
    ProductWitness { witness: StateVector, q: f64 },
    /// Sends `|0…0⟩` in `(M, S'1..S'N)`, keeping its EPR halves in ancillas.
    RawZero,
    /// An arbitrary unitary over `(M, S'1..S'N, P1..Pk)`.
    Explicit {
        unitary: UnitaryOperator,
        ancilla_qubits: usize,
    },
}

impl EPRProverStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Honest => "honest",
            Self::WrongQ(_) => "wrong-q",
            Self::ProductWitness { .. } => "product-witness",
            Self::RawZero => "raw-zero",
            Self::Explicit { .. } => "explicit",
        }
    }

    pub fn ancilla_qubits(&self, config: &ProtocolConfig) -> usize {
        match self {
            Self::RawZero => config.n,
            Self::Explicit { ancilla_qubits, .. } => *ancilla_qubits,
            _ => 0,
        }
    }

    /// The prover's action as a gate list.
    pub fn ops(&self, config: &ProtocolConfig) -> Result<Vec<GateOp>> {
        let shares = |q: f64| -> Result<Vec<GateOp>> {
            let w = gates::w_gate(WGateParam::plus(q)?);
            Ok((1..=config.n)
                .map(|j| GateOp::new(w.clone(), &[prover_share(j)]))
                .collect())
        };
        let prep = |witness: &StateVector| -> Result<GateOp> {
            if witness.dim() != 1 << config.verifier.m_qubits() {
                return Err(QError::DimensionMismatch {
                    expected: 1 << config.verifier.m_qubits(),
                    got: witness.dim(),
                });
            }
            Ok(GateOp::new(
                UnitaryOperator::preparing(witness.amplitudes())?,
                &[WITNESS],
            ))
        };
        match self {
            Self::Honest => {
                let params = qma::max_accept(&config.verifier);
                let q = params.require_q()?;
                let mut ops = vec![prep(&params.witness)?];
                ops.extend(shares(q)?);
                Ok(ops)
            }
            Self::WrongQ(q) => {
                let params = qma::max_accept(&config.verifier);
                let mut ops = vec![prep(&params.witness)?];
                ops.extend(shares(*q)?);
                Ok(ops)
            }
            Self::ProductWitness { witness, q } => {
                let mut ops = vec![prep(witness)?];
                ops.extend(shares(*q)?);
                Ok(ops)
            }
            Self::RawZero => Ok((1..=config.n)
                .map(|j| GateOp::new(gates::swap(), &[prover_share(j), ancilla(j)]))
                .collect()),
            Self::Explicit {
                unitary,
                ancilla_qubits,
            } => {
                let mut targets = vec![WITNESS.to_string()];
                targets.extend((1..=config.n).map(prover_share));
                targets.extend((1..=*ancilla_qubits).map(ancilla));
                Ok(vec![GateOp::new(unitary.clone(), &targets)])
            }
        }
    }
}

/// The joint state after the prover's move: EPR pairs on `(Sj, S'j)`, then
/// the prover's gates; everything else `|0⟩`.
pub fn initial_state(config: &ProtocolConfig, prover: &EPRProverStrategy) -> Result<SubState> {
    let k = prover.ancilla_qubits(config);
    let peak = config.peak_qubits(k);
    if peak > config.qubit_budget {
        return Err(QError::BudgetExceeded {
            needed: peak,
            limit: config.qubit_budget,
        });
    }
    let layout = config.layout(k)?;
    let mut s = StateVector::zero(layout).into_sub();
    for j in 1..=config.n {
        s.apply(&gates::hadamard(), &[share(j)])?;
        s.apply(&gates::cnot(), &[share(j), prover_share(j)])?;
    }
    for op in prover.ops(config)? {
        s.apply(&op.gate, &op.targets)?;
    }
    Ok(s)
}

/// A measurement step: terminal outcomes with probabilities conditional on
/// reaching the step; the remainder continues.
#[derive(Debug, Clone)]
pub struct Stage {
    pub stops: Vec<(Verdict, String, f64)>,
}

impl Stage {
    fn continuing(&self) -> f64 {
        (1.0 - self.stops.iter().map(|s| s.2).sum::<f64>()).max(0.0)
    }
}

fn ket(bit: usize) -> CVector {
    let mut v = CVector::zeros(2);
    v[bit] = num_complex::Complex64::new(1.0, 0.0);
    v
}

/// The swaps of step 3 for the choice `(r1, r2)`, 1-based.
fn permute_pairs(s: &mut SubState, r1: usize, r2: usize) -> Result<()> {
    if r1 >= 2 {
        s.swap(
            &[share(1), prover_share(1)],
            &[share(r1), prover_share(r1)],
            None,
        )?;
    }
    if r2 >= 3 {
        s.swap(
            &[share(2), prover_share(2)],
            &[share(r2), prover_share(r2)],
            None,
        )?;
    }
    Ok(())
}

/// Steps 4–6 on a branch for the choice `(r1, r2)`, `r2 ≥ 2`. The input is
/// normalized; stage probabilities are conditional. Also returns the
/// normalized state entering step 6, if reachable.
pub fn branch_stages(
    after_distill: &SubState,
    r1: usize,
    r2: usize,
) -> Result<(Vec<Stage>, Option<StateVector>)> {
    let mut s = after_distill.clone();
    permute_pairs(&mut s, r1, r2)?;
    let t = gates::t_transform();
    let mut stages = Vec::new();
    for j in [1, 2] {
        let (sj, spj) = (share(j), prover_share(j));
        s.apply(&t, &[sj.as_str(), spj.as_str()])?;
        let before = s.weight();
        let bad = s.contract(&[spj.as_str()], &ket(1))?.weight();
        s.apply_matrix(&(ket(0) * ket(0).adjoint()), &[spj.as_str()])?;
        s.apply(&t.adjoint(), &[sj.as_str(), spj.as_str()])?;
        stages.push(Stage {
            stops: vec![(
                Verdict::Reject,
                format!("step4: space restriction on pair {j}"),
                bad / before,
            )],
        });
        if s.weight() < ZERO_BRANCH {
            return Ok((stages, None));
        }
        s = s.renormalized();
    }
    let a = [share(1), prover_share(1)];
    let b = [share(2), prover_share(2)];
    let a: Vec<&str> = a.iter().map(String::as_str).collect();
    let b: Vec<&str> = b.iter().map(String::as_str).collect();
    let (pass, fail) = gates::swap_test_branches(&s, &a, &b, SWAP_CONTROL)?;
    stages.push(Stage {
        stops: vec![(
            Verdict::Reject,
            "step5: swap test failed".into(),
            fail.weight(),
        )],
    });
    if pass.weight() < ZERO_BRANCH {
        return Ok((stages, None));
    }
    let entering = pass.renormalized();
    let (s1, sp1, s2, sp2) = (share(1), prover_share(1), share(2), prover_share(2));
    let rst = rst_in(&entering, [OUTPUT_1, OUTPUT_2, &s1, &sp1, &s2, &sp2], FRESH)?;
    let stops = rst
        .trace
        .iter()
        .filter_map(|e| {
            e.verdict.map(|v| {
                (
                    v,
                    format!("step6: {}", e.label.trim_start_matches("rst: ")),
                    e.probability,
                )
            })
        })
        .collect();
    stages.push(Stage { stops });
    Ok((stages, entering.normalize()))
}

/// The deterministic part of a run: prefix stages (distillations) and the
/// state after them.
struct Prepared {
    prefix: Vec<Stage>,
    after: Option<SubState>,
}

fn prepare(config: &ProtocolConfig, prover: &EPRProverStrategy) -> Result<Prepared> {
    let s0 = initial_state(config, prover)?;
    let s1 = qma::distill_in(&config.verifier, &s0, OUTPUT_1)?;
    let mut prefix = vec![Stage {
        stops: vec![(
            Verdict::GiveUp,
            "step2: first distillation output ⊥".into(),
            (1.0 - s1.weight()).max(0.0),
        )],
    }];
    if s1.weight() < ZERO_BRANCH {
        return Ok(Prepared {
            prefix,
            after: None,
        });
    }
    let s1 = s1.renormalized();
    let s2 = qma::distill_in(&config.verifier, &s1, OUTPUT_2)?;
    prefix.push(Stage {
        stops: vec![(
            Verdict::GiveUp,
            "step2: second distillation output ⊥".into(),
            (1.0 - s2.weight()).max(0.0),
        )],
    });
    if s2.weight() < ZERO_BRANCH {
        return Ok(Prepared {
            prefix,
            after: None,
        });
    }
    let s2 = s2.renormalized();
    Ok(Prepared {
        prefix,
        after: Some(s2),
    })
}

fn walk(out: &mut ProtocolOutcome, stages: &[Stage], mut reach: f64) -> f64 {
    for st in stages {
        for (v, label, p) in &st.stops {
            out.record(*v, label.clone(), reach * p);
        }
        reach *= st.continuing();
    }
    reach
}

/// Exact run: every measurement and random choice is enumerated with its
/// probability. `(r1, r2)` branches are evaluated in parallel and merged in
/// a fixed order.
pub fn run_protocol(
    config: &ProtocolConfig,
    prover: &EPRProverStrategy,
) -> Result<ProtocolOutcome> {
    let prepared = prepare(config, prover)?;
    let mut out = ProtocolOutcome::new();
    let reach = walk(&mut out, &prepared.prefix, 1.0);
    let Some(after) = prepared.after else {
        return Ok(out);
    };
    let n = config.n;
    out.record(Verdict::GiveUp, "step3: r2 = 1", reach / n as f64);
    let choices: Vec<(usize, usize)> = (1..=n)
        .flat_map(|r1| (2..=n).map(move |r2| (r1, r2)))
        .collect();
    let branches: Vec<Result<(Vec<Stage>, Option<StateVector>)>> = choices
        .par_iter()
        .map(|&(r1, r2)| branch_stages(&after, r1, r2))
        .collect();
    let each = reach / (n * n) as f64;
    for (&(r1, r2), res) in choices.iter().zip(branches) {
        let (stages, entering) = res?;
        let mut sub = ProtocolOutcome::new();
        walk(&mut sub, &stages, 1.0);
        for e in &mut sub.trace {
            e.label = format!("(r1={r1}, r2={r2}) {}", e.label);
        }
        if let Some(state) = entering {
            sub.snapshots.push(crate::outcome::Snapshot {
                label: format!("(r1={r1}, r2={r2}) entering step6"),
                weight: 1.0,
                state,
            });
        }
        out.absorb(sub, each);
    }
    Ok(out)
}

/// Monte Carlo tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct McTally {
    pub shots: u64,
    pub accept: u64,
    pub give_up: u64,
    pub reject: u64,
}

impl McTally {
    pub fn acceptance(&self) -> f64 {
        (self.accept + self.give_up) as f64 / self.shots.max(1) as f64
    }

    pub fn reject_rate(&self) -> f64 {
        self.reject as f64 / self.shots.max(1) as f64
    }

    pub fn add(&mut self, v: Verdict) {
        self.shots += 1;
        match v {
            Verdict::Accept => self.accept += 1,
            Verdict::GiveUp => self.give_up += 1,
            Verdict::Reject => self.reject += 1,
        }
    }
}

/// Samples measurement outcomes stage by stage.
pub fn sample_stages<R: Rng + ?Sized>(rng: &mut R, stages: &[Stage]) -> Option<Verdict> {
    for st in stages {
        let mut u: f64 = rng.gen();
        for (v, _, p) in &st.stops {
            if u < *p {
                return Some(*v);
            }
            u -= p;
        }
    }
    None
}

/// Seeded Monte Carlo run: each shot samples the distillation outcomes, the
/// random choice `(r1, r2)` and every later measurement in order. Quantum
/// states per branch are computed once and reused across shots.
pub fn run_protocol_mc<R: Rng + ?Sized>(
    config: &ProtocolConfig,
    prover: &EPRProverStrategy,
    shots: u64,
    rng: &mut R,
) -> Result<McTally> {
    let prepared = prepare(config, prover)?;
    let n = config.n;
    let mut cache: Vec<Option<Vec<Stage>>> = vec![None; n * n];
    let mut tally = McTally::default();
    for _ in 0..shots {
        if let Some(v) = sample_stages(rng, &prepared.prefix) {
            tally.add(v);
            continue;
        }
        let after = prepared
            .after
            .as_ref()
            .expect("continuing mass implies a state");
        let r1 = rng.gen_range(1..=n);
        let r2 = rng.gen_range(1..=n);
        if r2 == 1 {
            tally.add(Verdict::GiveUp);
            continue;
        }
        let slot = &mut cache[(r1 - 1) * n + (r2 - 1)];
        if slot.is_none() {
            *slot = Some(branch_stages(after, r1, r2)?.0);
        }
        let v = sample_stages(rng, slot.as_ref().expect("filled")).unwrap_or(Verdict::Accept);
        tally.add(v);
    }
    Ok(tally)
}

/// `t` independent instances; acceptance requires every instance to accept.
/// A single prover is reused for every instance.
pub fn parallel_repeat(
    config: &ProtocolConfig,
    provers: &[EPRProverStrategy],
    t: usize,
) -> Result<ProtocolOutcome> {
    if t == 0 {
        return Err(QError::OutOfRange("t must be at least 1".into()));
    }
    if provers.len() != 1 && provers.len() != t {
        return Err(QError::Invalid(format!(
            "{} provers for {t} instances",
            provers.len()
        )));
    }
    let runs = (0..t)
        .map(|i| run_protocol(config, &provers[if provers.len() == 1 { 0 } else { i }]))
        .collect::<Result<Vec<_>>>()?;
    if t == 1 {
        return Ok(runs.into_iter().next().expect("one run"));
    }
    let genuine: f64 = runs.iter().map(|r| r.accept).product();
    let accepting: f64 = runs.iter().map(|r| r.acceptance()).product();
    let mut out = ProtocolOutcome::new();
    for (i, r) in runs.iter().enumerate() {
        out.note(
            format!("instance {}: acceptance {:.12}", i + 1, r.acceptance()),
            r.acceptance(),
        );
    }
    out.record(Verdict::Accept, "all instances accepted genuinely", genuine);
    out.record(
        Verdict::GiveUp,
        "all instances accepted, some gave up",
        accepting - genuine,
    );
    out.record(Verdict::Reject, "some instance rejected", 1.0 - accepting);
    Ok(out)
}

/// Continuation branch of the space-restriction check on one pair.
#[derive(Debug, Clone)]
pub struct SpaceRestrictionOutcome {
    pub reject_probability: f64,
    /// Normalized state after `T†` on the continuing branch.
    pub state: Option<StateVector>,
}

/// Applies `T` to `(S, S')`, rejects on `S' = 1`, applies `T†` otherwise;
/// pairs are checked in order.
pub fn space_restriction_test(
    state: &StateVector,
    pairs: &[(&str, &str)],
) -> Result<SpaceRestrictionOutcome> {
    let t = gates::t_transform();
    let mut s = state.as_sub();
    for (a, b) in pairs {
        s.apply(&t, &[*a, *b])?;
        s.apply_matrix(&(ket(0) * ket(0).adjoint()), &[*b])?;
        s.apply(&t.adjoint(), &[*a, *b])?;
    }
    Ok(SpaceRestrictionOutcome {
        reject_probability: (1.0 - s.weight()).max(0.0),
        state: s.normalize(),
    })
}
