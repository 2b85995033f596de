//! Runs one scenario against the core library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qproof_core::epr::{
    cj_mixture_rounding, claim_lower_bound_check, parallel_repeat, run_protocol, run_protocol_mc,
    ProtocolConfig, WEnsemble,
};
use qproof_core::qip::{
    composite_unitary, error_rescale, honest_protocol_prover, make_rewindable,
    perfect_completeness_protocol, perfect_completeness_soundness_bound, rewindable_spec,
    QIPProtocolProver,
};
use qproof_core::reflection::{
    check_reflection_soundness, modified_reflection_procedure, mrp_max_accept,
    reflection_procedure, reflection_simulation_test, rst_cheat_input, rst_honest_input,
};
use qproof_core::{
    fidelity, gates, qma, random, CVector, DensityOperator, ProtocolOutcome, QError,
    ReflectionSpec, RegisterLayout, StateVector, Verdict, WGateParam, TOL,
};

use crate::presets::{self, num};
use crate::scenario::{Kind, Mode, Scenario};

/// Name of the generator behind every seeded draw.
pub const RNG_NAME: &str = "ChaCha8";

#[derive(Debug, Clone)]
pub struct Quantity {
    pub name: &'static str,
    pub value: f64,
    /// Counts print as integers.
    pub count: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Measured {
    pub setup: String,
    pub outcome: Option<String>,
    pub trace: Vec<String>,
    pub notes: Vec<String>,
    pub quantities: Vec<Quantity>,
}

impl Measured {
    fn prob(&mut self, name: &'static str, value: f64) {
        self.quantities.push(Quantity {
            name,
            value,
            count: false,
        });
    }

    fn count(&mut self, name: &'static str, value: usize) {
        self.quantities.push(Quantity {
            name,
            value: value as f64,
            count: true,
        });
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities
            .iter()
            .find(|q| q.name == name)
            .map(|q| q.value)
    }

    fn outcome(&mut self, out: &ProtocolOutcome) {
        self.outcome = Some(out.to_string());
        self.trace = summarize(out);
    }
}

#[derive(Debug)]
pub enum RunError {
    Budget(String),
    Invalid(String),
}

impl From<QError> for RunError {
    fn from(e: QError) -> Self {
        match e {
            QError::BudgetExceeded { .. } => RunError::Budget(e.to_string()),
            _ => RunError::Invalid(e.to_string()),
        }
    }
}

impl From<String> for RunError {
    fn from(e: String) -> Self {
        RunError::Invalid(e)
    }
}

type Run<T> = std::result::Result<T, RunError>;

/// Fixed-point rendering used for every probability in a report.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Terminal mass grouped by step, in first-appearance order. Branch prefixes
/// such as `(r1=1, r2=2)` are folded together.
pub fn summarize(out: &ProtocolOutcome) -> Vec<String> {
    let mut groups: Vec<(String, Verdict, f64)> = Vec::new();
    for e in &out.trace {
        let Some(v) = e.verdict else { continue };
        let mut label = e.label.as_str();
        while label.starts_with('(') {
            match label.find(") ") {
                Some(i) => label = &label[i + 2..],
                None => break,
            }
        }
        let stem = label.split(':').next().unwrap_or(label).trim().to_string();
        match groups.iter_mut().find(|(s, w, _)| *s == stem && *w == v) {
            Some(g) => g.2 += e.probability,
            None => groups.push((stem, v, e.probability)),
        }
    }
    groups
        .into_iter()
        .map(|(s, v, p)| format!("{s} -> {v} {}", fixed(p)))
        .collect()
}

fn check_budget(s: &Scenario, needed: usize) -> Run<()> {
    if needed > s.budget() {
        return Err(QError::BudgetExceeded {
            needed,
            limit: s.budget(),
        }
        .into());
    }
    Ok(())
}

pub fn run(s: &Scenario) -> Run<Measured> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed());
    match s.kind {
        Kind::Reflection => reflection(s),
        Kind::Mrp => mrp(s),
        Kind::Rst => rst(s),
        Kind::EprQma => epr(s, &mut rng),
        Kind::QipTransform => qip(s, &mut rng),
        Kind::Checker => checker(s, &mut rng),
    }
}

/// Human-readable setup line; also used by `describe`.
pub fn setup(s: &Scenario) -> std::result::Result<String, String> {
    let p = &s.params;
    let r = |x: Option<crate::scenario::Real>| x.map_or("?".to_string(), |v| num(v.0));
    Ok(match s.kind {
        Kind::Reflection | Kind::Mrp => {
            let mut line = format!("W_p (x) W_q with p = {}, q = {}", r(p.p), r(p.q));
            match p.input.as_deref() {
                Some("half") => line.push_str(", input on the eigenvalue-1/2 eigenvector"),
                _ => line.push_str(&format!(", basis input {}", p.index.unwrap_or(0))),
            }
            if let Some(e) = p.epsilon {
                line.push_str(&format!(", epsilon = {}", num(e.0)));
            }
            line
        }
        Kind::Rst => match p.input.as_deref() {
            Some("honest") => format!("honest input, p = {}, q = {}", r(p.p), r(p.q)),
            _ => format!(
                "cheat input J(W^{}_q)^2, q = {}",
                if p.sign.as_deref() == Some("minus") {
                    "-"
                } else {
                    "+"
                },
                r(p.q)
            ),
        },
        Kind::EprQma => {
            let (_, vdesc) = presets::verifier(s.verifier.as_ref().ok_or("no verifier")?)?;
            let prover = s.prover.as_ref().ok_or("no prover")?;
            let mut line = format!(
                "verifier {vdesc}, prover {}, N = {}",
                prover.preset,
                p.n.unwrap_or(0)
            );
            if let Some(q) = prover.q {
                line.push_str(&format!(", q = {}", num(q.0)));
            }
            if let Some(t) = p.t {
                line.push_str(&format!(", t = {t}"));
            }
            line
        }
        Kind::QipTransform => {
            let (_, _, sdesc) = presets::system(s.system.as_ref().ok_or("no system")?)?;
            let prover = s.prover.as_ref().ok_or("no prover")?;
            match prover.preset.as_str() {
                "random" => format!(
                    "system {sdesc}, {} random provers",
                    prover.count.unwrap_or(0)
                ),
                _ => format!("system {sdesc}, honest prover"),
            }
        }
        Kind::Checker => {
            let check = p.check.as_deref().unwrap_or("?");
            match check {
                "distillation" => {
                    let (_, vdesc) = presets::verifier(s.verifier.as_ref().ok_or("no verifier")?)?;
                    format!("distillation on {vdesc}")
                }
                "teleport" => format!("teleport W_a with a = {}", r(p.a)),
                _ => format!(
                    "{check} on {} random ensembles of size {}",
                    p.count.unwrap_or(0),
                    p.size.unwrap_or(0)
                ),
            }
        }
    })
}

fn product_spec(s: &Scenario) -> Run<ReflectionSpec> {
    let p = &s.params;
    Ok(ReflectionSpec::product_w(
        p.p.map_or(0.0, |x| x.0),
        p.q.map_or(0.0, |x| x.0),
    )?)
}

fn spec_layout(spec: &ReflectionSpec) -> Run<RegisterLayout> {
    Ok(RegisterLayout::new(&[(
        "Q",
        spec.dim().trailing_zeros() as usize,
    )])?)
}

/// The basis state `params.index`, or `map` applied to the eigenvalue-1/2 eigenvector.
fn spec_input(
    s: &Scenario,
    spec: &ReflectionSpec,
    map: impl Fn(CVector) -> CVector,
) -> Run<StateVector> {
    let layout = spec_layout(spec)?;
    Ok(match s.params.input.as_deref() {
        Some("half") => StateVector::normalized(layout, map(half_vector(spec)?))?,
        _ => StateVector::basis(layout, s.params.index.unwrap_or(0))?,
    })
}

fn half_vector(spec: &ReflectionSpec) -> Run<CVector> {
    spec.half_eigenvector()
        .ok_or_else(|| RunError::Invalid("`input = \"half\"` needs pq = 1/2".into()))
}

fn reflection(s: &Scenario) -> Run<Measured> {
    let spec = product_spec(s)?;
    let mut m = Measured {
        setup: setup(s)?,
        ..Default::default()
    };
    let out = reflection_procedure(&spec, &spec_input(s, &spec, |v| v)?)?;
    m.outcome(&out);
    m.prob("accept", out.acceptance());
    m.prob("reject", out.reject);
    m.prob("gap", spec.gap());
    if let Some(e) = s.params.epsilon {
        match check_reflection_soundness(&spec, e.0) {
            Ok(rep) => {
                m.prob("min_eigenbasis_reject", rep.min_eigenbasis_reject);
                m.prob("min_random_reject", rep.min_random_reject);
                m.prob("soundness_bound", rep.bound);
            }
            Err(QError::Inapplicable(why)) => m.notes.push(format!("soundness scan: {why}")),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(m)
}

fn mrp(s: &Scenario) -> Run<Measured> {
    let spec = product_spec(s)?;
    let mut m = Measured {
        setup: setup(s)?,
        ..Default::default()
    };
    let u = spec.u().matrix().clone();
    let out = modified_reflection_procedure(&spec, &spec_input(s, &spec, |v| &u * v)?)?;
    m.outcome(&out);
    m.prob("accept", out.acceptance());
    m.prob("reject", out.reject);
    m.prob("max_accept", mrp_max_accept(&spec));
    Ok(m)
}

fn rst(s: &Scenario) -> Run<Measured> {
    let p = &s.params;
    let input = match p.input.as_deref() {
        Some("honest") => rst_honest_input(p.p.map_or(0.0, |x| x.0), p.q.map_or(0.0, |x| x.0))?,
        _ => {
            let q = p.q.map_or(0.0, |x| x.0);
            let param = if p.sign.as_deref() == Some("minus") {
                WGateParam::minus(q)?
            } else {
                WGateParam::plus(q)?
            };
            rst_cheat_input(param)?
        }
    };
    let out = reflection_simulation_test(&input)?;
    let mut m = Measured {
        setup: setup(s)?,
        ..Default::default()
    };
    m.outcome(&out);
    m.prob("accept", out.acceptance());
    m.prob("genuine_accept", out.accept);
    m.prob("give_up", out.give_up);
    m.prob("reject", out.reject);
    Ok(m)
}

fn epr(s: &Scenario, rng: &mut ChaCha8Rng) -> Run<Measured> {
    let (v, _) = presets::verifier(s.verifier.as_ref().expect("validated"))?;
    let n = s.params.n.unwrap_or(2);
    let prover_spec = s.prover.as_ref().expect("validated");
    let prover = presets::epr_prover(prover_spec, &v, n, rng)?;
    let p_x = qma::max_accept(&v).p_x;
    let config = ProtocolConfig::new(n, v)?.with_budget(s.budget());
    let peak = config.peak_qubits(prover.ancilla_qubits(&config));
    let mut m = Measured {
        setup: setup(s)?,
        ..Default::default()
    };
    match s.mode() {
        Mode::Exact => {
            let t = s.params.t.unwrap_or(1);
            let out = if t == 1 {
                run_protocol(&config, &prover)?
            } else {
                parallel_repeat(&config, &[prover], t)?
            };
            m.outcome(&out);
            m.prob("accept", out.acceptance());
            m.prob("genuine_accept", out.accept);
            m.prob("give_up", out.give_up);
            m.prob("reject", out.reject);
        }
        Mode::Mc => {
            let shots = s.shots.unwrap_or(0);
            let tally = run_protocol_mc(&config, &prover, shots, rng)?;
            m.outcome = Some(format!(
                "{} shots: accept {}, give-up {}, reject {}",
                tally.shots, tally.accept, tally.give_up, tally.reject
            ));
            let f = |k: u64| k as f64 / tally.shots.max(1) as f64;
            m.prob("accept", tally.acceptance());
            m.prob("genuine_accept", f(tally.accept));
            m.prob("give_up", f(tally.give_up));
            m.prob("reject", tally.reject_rate());
        }
    }
    m.prob("p_x", p_x);
    m.count("peak_qubits", peak);
    Ok(m)
}

fn qip(s: &Scenario, rng: &mut ChaCha8Rng) -> Run<Measured> {
    let (sys, honest, _) = presets::system(s.system.as_ref().expect("validated"))?;
    let prover = s.prover.as_ref().expect("validated");
    let mut m = Measured {
        setup: setup(s)?,
        ..Default::default()
    };
    // rescaling adds a qubit to V, the rewindable step one to V and one to M
    let base = sys.v_qubits + sys.m_qubits + 3;
    if prover.preset == "random" {
        check_budget(s, base + 2)?;
        let spec = rewindable_spec(&error_rescale(&sys)?)?;
        let count = prover.count.unwrap_or(0);
        let (mut checked, mut violations) = (0, 0);
        let mut min_reject = f64::INFINITY;
        for i in 0..count {
            let p = 1 + rng.gen_range(0..2);
            let layout = spec.layout().push("P", p)?;
            let cheat = QIPProtocolProver {
                p_qubits: p,
                initial: random::random_state(rng, &layout),
                replies: (0..spec.rounds())
                    .map(|_| random::haar_unitary(rng, spec.m_qubits + p))
                    .collect(),
            };
            match perfect_completeness_soundness_bound(&spec, &cheat) {
                Ok(rep) => {
                    checked += 1;
                    min_reject = min_reject.min(rep.reject);
                    if !rep.holds {
                        violations += 1;
                        m.notes.push(format!(
                            "prover {i}: reject {} below {}",
                            fixed(rep.reject),
                            fixed(rep.bound)
                        ));
                    }
                }
                Err(QError::Inapplicable(why)) => m
                    .notes
                    .push(format!("prover {i}: precondition fails: {why}")),
                Err(e) => return Err(e.into()),
            }
        }
        m.count("provers", count);
        m.count("checked", checked);
        if checked > 0 {
            m.prob("min_reject", min_reject);
        }
        m.prob("bound", (0.5 - spec.s).powi(2));
        m.count("violations", violations);
        return Ok(m);
    }
    check_budget(s, base + honest.p_qubits)?;
    m.prob("max_accept", composite_unitary(&sys, &honest)?.max_accept());
    let rescaled = error_rescale(&sys)?;
    let p_rescaled = composite_unitary(&rescaled, &honest)?.max_accept();
    m.prob("rescaled_max_accept", p_rescaled);
    if p_rescaled < 0.5 - TOL {
        m.notes.push(format!(
            "rewindable transform: honest maximum {} is below 1/2",
            fixed(p_rescaled)
        ));
        return Ok(m);
    }
    let (rw, aug) = make_rewindable(&rescaled, &honest)?;
    m.prob(
        "rewindable_max_accept",
        composite_unitary(&rw.spec, &aug)?.max_accept(),
    );
    let out = perfect_completeness_protocol(&rw.spec, &honest_protocol_prover(&rw.spec, &aug)?)?;
    m.outcome(&out);
    m.prob("protocol_accept", out.acceptance());
    m.prob("protocol_reject", out.reject);
    Ok(m)
}

fn checker(s: &Scenario, rng: &mut ChaCha8Rng) -> Run<Measured> {
    let p = &s.params;
    let mut m = Measured {
        setup: setup(s)?,
        ..Default::default()
    };
    let r_layout = |names: &[&str]| RegisterLayout::qubits(names);
    match p.check.as_deref().unwrap_or("") {
        "distillation" => {
            let (v, _) = presets::verifier(s.verifier.as_ref().expect("validated"))?;
            let params = qma::max_accept(&v);
            let out = qma::distillation(&v, &qma::distillation_input(&v, &params.witness)?)?;
            m.prob("success_probability", out.success_probability);
            if let Some(rho) = out.output("R")? {
                let chi = gates::chi(params.p)?.with_layout(r_layout(&["R"])?)?;
                m.prob("fidelity", fidelity(&rho, &DensityOperator::pure(&chi))?);
            } else {
                m.notes.push("distillation never succeeds".into());
            }
            m.prob("p_x", params.p_x);
            m.prob("p", params.p);
        }
        "teleport" => {
            let a = p.a.map_or(0.0, |x| x.0);
            let psi = random::random_state(rng, &r_layout(&["t"])?);
            let w = gates::w(a)?;
            let cj = gates::cj_state(&w)?.with_layout(r_layout(&["c0", "c1"])?)?;
            let out = qma::teleport_apply(&psi.tensor(&cj)?, "t", ("c0", "c1"))?;
            m.prob("success_probability", out.success_probability);
            if let Some(st) = out.success_state {
                let want = w.matrix() * psi.amplitudes();
                m.prob("fidelity", st.amplitudes().dotc(&want).norm_sqr());
            }
        }
        check => {
            let (count, size) = (p.count.unwrap_or(0), p.size.unwrap_or(1));
            let mut min_slack = f64::INFINITY;
            let mut violations = 0;
            for _ in 0..count {
                let e = WEnsemble::random(rng, size);
                let (slack, holds) = if check == "claim-lower-bound" {
                    let c = claim_lower_bound_check(&e);
                    (c.lhs - c.rhs, c.holds)
                } else {
                    let r = cj_mixture_rounding(&e);
                    (r.bound - r.distance, r.bound_holds)
                };
                min_slack = min_slack.min(slack);
                violations += usize::from(!holds);
            }
            m.prob("min_slack", min_slack);
            m.count("violations", violations);
        }
    }
    Ok(m)
}
