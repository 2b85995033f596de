//! Named verifiers, systems and provers, and their construction from scenario sections.

use qproof_core::circuit::{circuit_unitary, GateOp};
use qproof_core::epr::EPRProverStrategy;
use qproof_core::gates;
use qproof_core::measure::basis_projector;
use qproof_core::qip::{toys as qip_toys, QIPProverSpec, QIPSystemSpec};
use qproof_core::qma::toys;
use qproof_core::{CMatrix, Projector, RegisterLayout, StateVector, VerifierCircuit};

use crate::scenario::{ProverSpec, Real, SystemSpec, VerifierSpec};

pub const CHECKS: &[&str] = &[
    "distillation",
    "claim-lower-bound",
    "cj-rounding",
    "teleport",
];

pub const EPR_PROVERS: &[&str] = &["honest", "wrong-q", "product-witness", "raw-zero", "random"];

const GATES: &[(&str, usize, usize, &str)] = &[
    ("x", 1, 0, "Pauli X"),
    ("y", 1, 0, "Pauli Y"),
    ("z", 1, 0, "Pauli Z"),
    ("h", 1, 0, "Hadamard"),
    ("cnot", 2, 0, "controlled NOT, control first"),
    ("swap", 2, 0, "swap"),
    ("ry", 1, 1, "R_y(theta), theta in radians"),
    (
        "w",
        1,
        1,
        "W_a, a in [0, 1]: |0> -> sqrt(1-a)|0> + sqrt(a)|1>",
    ),
];

/// Resolves a verifier section. Returns the circuit and a one-line description.
pub fn verifier(spec: &VerifierSpec) -> Result<(VerifierCircuit, String), String> {
    let real = |v: Option<Real>, field: &str| -> Result<f64, String> {
        v.map(|r| r.0)
            .ok_or_else(|| format!("field `verifier.{field}`: missing"))
    };
    if let Some(name) = &spec.preset {
        if spec.v_qubits.is_some() || !spec.gates.is_empty() || spec.accept.is_some() {
            return Err("section `verifier`: give either a preset or a circuit, not both".into());
        }
        let v = match name.as_str() {
            "cnot-check" => Ok(toys::cnot_check()),
            "hadamard-coin" => Ok(toys::hadamard_coin()),
            "rotation" => toys::rotation(real(spec.theta, "theta")?),
            "product" => toys::product(real(spec.a, "a")?, real(spec.b, "b")?),
            other => {
                return Err(format!(
                    "field `verifier.preset`: unknown verifier `{other}`"
                ))
            }
        }
        .map_err(|e| format!("section `verifier`: {e}"))?;
        let desc = match name.as_str() {
            "rotation" => format!("rotation(theta = {})", num(real(spec.theta, "theta")?)),
            "product" => format!(
                "product(a = {}, b = {})",
                num(real(spec.a, "a")?),
                num(real(spec.b, "b")?)
            ),
            _ => name.clone(),
        };
        return Ok((v, desc));
    }
    let v_qubits = spec.v_qubits.ok_or("field `verifier.v_qubits`: missing")?;
    let m_qubits = spec.m_qubits.ok_or("field `verifier.m_qubits`: missing")?;
    if v_qubits == 0 || m_qubits == 0 {
        return Err("section `verifier`: both registers need at least one qubit".into());
    }
    if v_qubits + m_qubits > 12 {
        return Err("section `verifier`: at most 12 qubits".into());
    }
    let names: Vec<String> = (0..v_qubits)
        .map(|i| format!("A{i}"))
        .chain((0..m_qubits).map(|i| format!("M{i}")))
        .collect();
    let layout = RegisterLayout::qubits(&names).map_err(|e| e.to_string())?;
    let mut ops = Vec::new();
    for (i, g) in spec.gates.iter().enumerate() {
        let field = format!("verifier.gates[{i}]");
        let &(_, arity, nparams, _) = GATES
            .iter()
            .find(|x| x.0 == g.gate)
            .ok_or_else(|| format!("field `{field}.gate`: unknown gate `{}`", g.gate))?;
        if g.on.len() != arity {
            return Err(format!(
                "field `{field}.on`: `{}` acts on {arity} qubit(s), got {}",
                g.gate,
                g.on.len()
            ));
        }
        if g.params.len() != nparams {
            return Err(format!(
                "field `{field}.params`: `{}` takes {nparams} parameter(s), got {}",
                g.gate,
                g.params.len()
            ));
        }
        let gate = match g.gate.as_str() {
            "x" => gates::pauli_x(),
            "y" => gates::pauli_y(),
            "z" => gates::pauli_z(),
            "h" => gates::hadamard(),
            "cnot" => gates::cnot(),
            "swap" => gates::swap(),
            "ry" => gates::rotation_y(g.params[0].0),
            _ => gates::w(g.params[0].0).map_err(|e| format!("field `{field}.params`: {e}"))?,
        };
        for q in &g.on {
            if !names.contains(q) {
                return Err(format!("field `{field}.on`: unknown qubit `{q}`"));
            }
        }
        ops.push(GateOp::new(gate, &g.on));
    }
    let u = circuit_unitary(&layout, &ops).map_err(|e| format!("section `verifier`: {e}"))?;
    let acc = spec
        .accept
        .as_ref()
        .ok_or("section `verifier.accept`: missing")?;
    let mut m = CMatrix::zeros(layout.dim(), layout.dim());
    for (i, pat) in acc.patterns.iter().enumerate() {
        let field = format!("verifier.accept.patterns[{i}]");
        if pat.len() != acc.on.len() || !pat.chars().all(|c| c == '0' || c == '1') {
            return Err(format!(
                "field `{field}`: `{pat}` is not a {}-bit string",
                acc.on.len()
            ));
        }
        let bits = usize::from_str_radix(pat, 2).map_err(|e| e.to_string())?;
        m += basis_projector(&layout, &acc.on, bits)
            .map_err(|e| format!("field `verifier.accept.on`: {e}"))?
            .matrix();
    }
    let accept = Projector::new(m).map_err(|e| format!("field `verifier.accept`: {e}"))?;
    let v = VerifierCircuit::new(v_qubits, m_qubits, u, accept)
        .map_err(|e| format!("section `verifier`: {e}"))?;
    let desc = format!(
        "circuit over {v_qubits}+{m_qubits} qubits, {} gate(s), {} accept pattern(s)",
        spec.gates.len(),
        acc.patterns.len()
    );
    Ok((v, desc))
}

/// Resolves a system section to the system and its honest prover.
pub fn system(spec: &SystemSpec) -> Result<(QIPSystemSpec, QIPProverSpec, String), String> {
    if let Some(name) = &spec.preset {
        if spec.messages.is_some() || spec.a.is_some() {
            return Err("section `system`: give either a preset or twist parameters".into());
        }
        return qip_toys::catalog()
            .into_iter()
            .find(|(n, _, _)| n == name)
            .map(|(n, s, p)| (s, p, n))
            .ok_or_else(|| format!("field `system.preset`: unknown system `{name}`"));
    }
    let messages = spec.messages.ok_or("field `system.messages`: missing")?;
    let get = |v: Option<Real>, field: &str| -> Result<f64, String> {
        v.map(|r| r.0)
            .ok_or_else(|| format!("field `system.{field}`: missing"))
    };
    let (a, c, s) = (get(spec.a, "a")?, get(spec.c, "c")?, get(spec.s, "s")?);
    let phi = spec.phi.map_or(0.0, |r| r.0);
    let (sys, prover) =
        qip_toys::twist(messages, a, phi, c, s).map_err(|e| format!("section `system`: {e}"))?;
    let desc = format!(
        "twist(m = {messages}, a = {}, phi = {}, c = {}, s = {})",
        num(a),
        num(phi),
        num(c),
        num(s)
    );
    Ok((sys, prover, desc))
}

pub fn check_epr_prover(p: &ProverSpec) -> Result<(), String> {
    if !EPR_PROVERS.contains(&p.preset.as_str()) {
        return Err(format!(
            "field `prover.preset`: `{}` is not one of {}",
            p.preset,
            EPR_PROVERS.join(", ")
        ));
    }
    if matches!(p.preset.as_str(), "wrong-q" | "product-witness") {
        let q = p.q.ok_or("field `prover.q`: missing")?.0;
        if !(0.0..=1.0).contains(&q) {
            return Err(format!("field `prover.q`: {q} outside [0, 1]"));
        }
    }
    if p.preset == "product-witness" {
        let w = p
            .witness
            .as_deref()
            .ok_or("field `prover.witness`: missing")?;
        if w.is_empty() || !w.chars().all(|c| c == '0' || c == '1') {
            return Err(format!("field `prover.witness`: `{w}` is not a bit string"));
        }
    }
    Ok(())
}

/// Builds an EPR prover. `random` draws a Haar unitary over the witness,
/// the prover's shares and `ancilla` private qubits.
pub fn epr_prover<R: rand::Rng + ?Sized>(
    p: &ProverSpec,
    v: &VerifierCircuit,
    n: usize,
    rng: &mut R,
) -> Result<EPRProverStrategy, String> {
    Ok(match p.preset.as_str() {
        "honest" => EPRProverStrategy::Honest,
        "wrong-q" => EPRProverStrategy::WrongQ(p.q.map_or(0.0, |r| r.0)),
        "product-witness" => {
            let bits = p.witness.as_deref().unwrap_or("0");
            if bits.len() != v.m_qubits() {
                return Err(format!(
                    "field `prover.witness`: needs {} bit(s), got `{bits}`",
                    v.m_qubits()
                ));
            }
            let layout = RegisterLayout::new(&[("M", v.m_qubits())]).map_err(|e| e.to_string())?;
            let index = usize::from_str_radix(bits, 2).map_err(|e| e.to_string())?;
            EPRProverStrategy::ProductWitness {
                witness: StateVector::basis(layout, index).map_err(|e| e.to_string())?,
                q: p.q.map_or(0.0, |r| r.0),
            }
        }
        "raw-zero" => EPRProverStrategy::RawZero,
        _ => {
            let k = p.ancilla.unwrap_or(0);
            EPRProverStrategy::Explicit {
                unitary: qproof_core::random::haar_unitary(rng, v.m_qubits() + n + k),
                ancilla_qubits: k,
            }
        }
    })
}

/// Decimal rendering that round-trips small rationals in reports.
pub fn num(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub fn listing() -> String {
    let mut out = String::new();
    out.push_str("kinds:\n");
    for (k, what) in [
        (
            "reflection",
            "reflection procedure on W_p (x) W_q; optional epsilon soundness scan",
        ),
        (
            "rst",
            "reflection simulation test on honest or cheat inputs",
        ),
        (
            "mrp",
            "modified reflection procedure and its maximum acceptance",
        ),
        (
            "epr-qma",
            "EPR-assisted QMA protocol, exact or Monte Carlo, t-fold repetition",
        ),
        (
            "qip-transform",
            "rescaling, rewindable transform and the perfect-completeness protocol",
        ),
        ("checker", "proposition checkers"),
    ] {
        out.push_str(&format!("  {k:<14} {what}\n"));
    }
    out.push_str("verifier presets:\n");
    for (name, _, p) in toys::catalog() {
        out.push_str(&format!("  {name:<18} p_x = {}\n", num(p)));
    }
    out.push_str("  rotation           theta = p_x\n");
    out.push_str("  product            a, b; p_x = ab\n");
    out.push_str("verifier gates (qubits A0.. and M0..):\n");
    for (g, arity, params, what) in GATES {
        out.push_str(&format!(
            "  {g:<6} {arity} qubit(s), {params} param(s): {what}\n"
        ));
    }
    out.push_str("epr-qma provers:\n");
    for (name, what) in [
        ("honest", "top witness, W_q shares with pq = 1/2"),
        ("wrong-q", "top witness, W_q shares with the given q"),
        ("product-witness", "basis witness and W_q shares"),
        ("raw-zero", "sends |0...0>, keeps the EPR halves"),
        (
            "random",
            "seeded Haar unitary with `ancilla` private qubits",
        ),
    ] {
        out.push_str(&format!("  {name:<16} {what}\n"));
    }
    out.push_str("qip-transform systems:\n");
    for (name, s, _) in qip_toys::catalog() {
        out.push_str(&format!(
            "  {name:<12} m = {}, c = {}, s = {}\n",
            s.messages,
            num(s.c),
            num(s.s)
        ));
    }
    out.push_str("qip-transform provers:\n");
    out.push_str("  honest       the system's honest prover through the whole pipeline\n");
    out.push_str("  random       `count` seeded Haar provers against the transformed system\n");
    out.push_str("checkers:\n");
    for (name, what) in [
        (
            "distillation",
            "success probability and output fidelity on the top witness",
        ),
        (
            "claim-lower-bound",
            "trace-distance lower bound on random W ensembles",
        ),
        (
            "cj-rounding",
            "rounding distance bound on random W ensembles",
        ),
        ("teleport", "teleported W_a on a seeded random input"),
    ] {
        out.push_str(&format!("  {name:<18} {what}\n"));
    }
    out
}
