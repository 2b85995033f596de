//! Headline acceptance criteria. Run with `cargo test --test acceptance`;
//! prints one PASS/FAIL line per criterion and exits nonzero on any failure.

mod common;

use common::*;
use qproof_core::epr::{
    cj_mixture_rounding, claim_lower_bound_check, run_protocol, EPRProverStrategy, WEnsemble,
};
use qproof_core::gates::{self, WGateParam};
use qproof_core::qip::{self, protocol::QIPProtocolProver};
use qproof_core::qma::{self, toys};
use qproof_core::reflection::*;
use qproof_core::*;
use rand::Rng;
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(got: f64, want: f64, tol: f64, what: &str) -> std::result::Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{what}: got {got}, want {want} ± {tol:e}")
    })
}

fn err(e: QError) -> String {
    e.to_string()
}

fn state_on(spec: &ReflectionSpec, v: CVector) -> std::result::Result<StateVector, String> {
    let layout =
        RegisterLayout::new(&[("Q", spec.dim().trailing_zeros() as usize)]).map_err(err)?;
    StateVector::normalized(layout, v).map_err(err)
}

fn rp_completeness() -> Check {
    let specs = half_specs();
    for (i, spec) in specs.iter().enumerate() {
        let psi = spec
            .half_eigenvector()
            .ok_or_else(|| format!("spec {i}: no eigenvalue 1/2"))?;
        let out = reflection_procedure(spec, &state_on(spec, psi)?).map_err(err)?;
        within(out.acceptance(), 1.0, 1e-9, &format!("spec {i} acceptance"))?;
    }
    Ok(format!("{} specs accept with probability 1", specs.len()))
}

fn rp_soundness() -> Check {
    let specs = gapped_specs();
    let mut worst = f64::INFINITY;
    for (i, (eps, spec)) in specs.iter().enumerate() {
        let rep = check_reflection_soundness(spec, *eps).map_err(err)?;
        let bound = 4.0 * eps * eps;
        ensure(rep.min_eigenbasis_reject >= bound - 1e-9, || {
            format!(
                "spec {i}: eigenbasis reject {} < 4ε² = {bound}",
                rep.min_eigenbasis_reject
            )
        })?;
        worst = worst.min(rep.min_eigenbasis_reject - bound);
    }
    Ok(format!(
        "{} specs, smallest margin over 4ε² is {worst:.2e}",
        specs.len()
    ))
}

fn rst() -> Check {
    for k in 0..9 {
        let p = 0.5 + 0.5 * k as f64 / 8.0;
        let out = reflection_simulation_test(&rst_honest_input(p, 1.0 / (2.0 * p)).map_err(err)?)
            .map_err(err)?;
        within(out.acceptance(), 1.0, 1e-9, &format!("honest p = {p}"))?;
        within(
            out.give_up,
            15.0 / 16.0,
            1e-9,
            &format!("give-up at p = {p}"),
        )?;
    }
    for k in 0..9 {
        let q = k as f64 / 8.0;
        for param in [
            WGateParam::plus(q).map_err(err)?,
            WGateParam::minus(q).map_err(err)?,
        ] {
            let out =
                reflection_simulation_test(&rst_cheat_input(param).map_err(err)?).map_err(err)?;
            within(out.reject, 1.0 / 16.0, 1e-9, &format!("cheat {param:?}"))?;
        }
    }
    Ok("9 honest inputs accepted with give-up 15/16; 18 cheat inputs rejected at 1/16".into())
}

fn distillation() -> Check {
    let cases = [
        (toys::rotation(1.0 / 3.0).map_err(err)?, 1.0 / 3.0),
        (toys::hadamard_coin(), 0.5),
        (toys::rotation(0.75).map_err(err)?, 0.75),
        (toys::cnot_check(), 1.0),
    ];
    let mut worst_f = 1.0f64;
    for (v, p_x) in &cases {
        let params = qma::max_accept(v);
        let input = qma::distillation_input(v, &params.witness).map_err(err)?;
        let out = qma::distillation(v, &input).map_err(err)?;
        within(
            out.success_probability,
            2.0 * p_x * p_x - 2.0 * p_x + 1.0,
            1e-9,
            &format!("success at p_x = {p_x}"),
        )?;
        let p = p_x * p_x / (2.0 * p_x * p_x - 2.0 * p_x + 1.0);
        let chi = gates::chi(p)
            .map_err(err)?
            .with_layout(RegisterLayout::qubits(&["R"]).map_err(err)?)
            .map_err(err)?;
        let rho = out.output("R").map_err(err)?.ok_or("no surviving branch")?;
        let f = fidelity(&rho, &DensityOperator::pure(&chi)).map_err(err)?;
        ensure(f >= 1.0 - 1e-9, || format!("fidelity {f} at p_x = {p_x}"))?;
        worst_f = worst_f.min(f);
    }
    Ok(format!("4 verifiers, worst fidelity {worst_f:.12}"))
}

fn epr_completeness() -> Check {
    let mut peak = 0;
    for n in [2, 3, 4] {
        for v in [
            toys::hadamard_coin(),
            toys::rotation(0.75).map_err(err)?,
            toys::cnot_check(),
        ] {
            let cfg = config(n, v);
            let width = cfg.peak_qubits(0);
            ensure(width <= 14, || format!("N = {n}: {width} qubits"))?;
            peak = peak.max(width);
            let out = run_protocol(&cfg, &EPRProverStrategy::Honest).map_err(err)?;
            within(out.acceptance(), 1.0, 1e-9, &format!("N = {n}"))?;
        }
    }
    Ok(format!(
        "9 runs accept with probability 1, peak width {peak} qubits"
    ))
}

fn sub_lemmas() -> Check {
    let mut r = rng(6);
    for i in 0..100 {
        let size = 1 + r.gen_range(0..4);
        let e = WEnsemble::random(&mut r, size);
        let claim = claim_lower_bound_check(&e);
        ensure(claim.holds, || {
            format!("ensemble {i}: claim {} < {}", claim.lhs, claim.rhs)
        })?;
        let e = WEnsemble::random(&mut r, size);
        let round = cj_mixture_rounding(&e);
        ensure(round.bound_holds, || {
            format!(
                "ensemble {i}: rounding {} > {}",
                round.distance, round.bound
            )
        })?;
    }
    Ok("100 ensembles for each check".into())
}

fn mrp() -> Check {
    for (i, spec) in half_specs().iter().enumerate() {
        let psi = spec
            .half_eigenvector()
            .ok_or_else(|| format!("spec {i}: no eigenvalue 1/2"))?;
        let out = modified_reflection_procedure(spec, &state_on(spec, spec.u().matrix() * psi)?)
            .map_err(err)?;
        within(
            out.acceptance(),
            1.0,
            1e-9,
            &format!("completeness on spec {i}"),
        )?;
    }
    for (i, (eps, spec)) in gapped_specs().iter().enumerate() {
        let top = mrp_max_accept(spec);
        ensure(top <= 1.0 - eps * eps + 1e-9, || {
            format!("spec {i}: max {top} > 1 − ε²")
        })?;
    }
    let trivial = ReflectionSpec::new(UnitaryOperator::identity(1), proj(2, &[0]), proj(2, &[0]))
        .map_err(err)?;
    let mut specs = vec![trivial];
    specs.extend(gapped_specs().into_iter().map(|(_, s)| s));
    specs.extend(half_specs());
    let mut worst = 0.0f64;
    for (i, spec) in specs.iter().enumerate() {
        let found = maximize_over_states(spec.dim(), 10_000, 40 + i as u64, |v| {
            mrp_acceptance_oracle(spec, v)
        });
        let claimed = mrp_max_accept(spec);
        within(found, claimed, 1e-6, &format!("random search on spec {i}"))?;
        worst = worst.max((found - claimed).abs());
    }
    Ok(format!(
        "{} specs searched, largest gap {worst:.1e}",
        specs.len()
    ))
}

fn rescale_exact(c: f64, s: f64, messages: usize) -> std::result::Result<(), String> {
    let (hi, lo) = qip::rescaled_bounds(c, s);
    let (yes, yes_p) = qip::toys::twist(messages, c, 0.5, c, s).map_err(err)?;
    let (no, no_p) = qip::toys::twist(messages, s, 0.5, c, s).map_err(err)?;
    within(
        qip::composite_unitary(&yes, &yes_p)
            .map_err(err)?
            .max_accept(),
        c,
        1e-12,
        "raw yes",
    )?;
    within(
        qip::composite_unitary(&no, &no_p)
            .map_err(err)?
            .max_accept(),
        s,
        1e-12,
        "raw no",
    )?;
    let y = qip::composite_unitary(&qip::error_rescale(&yes).map_err(err)?, &yes_p)
        .map_err(err)?
        .max_accept();
    let n = qip::composite_unitary(&qip::error_rescale(&no).map_err(err)?, &no_p)
        .map_err(err)?
        .max_accept();
    ensure(y >= hi - 1e-9, || {
        format!("(c, s) = ({c}, {s}): rescaled yes {y} < {hi}")
    })?;
    ensure(n <= lo + 1e-9, || {
        format!("(c, s) = ({c}, {s}): rescaled no {n} > {lo}")
    })
}

fn rewindable() -> Check {
    for (a, phi) in [
        (1.0, 0.0),
        (0.9, 0.3),
        (0.75, 0.7),
        (2.0 / 3.0, 1.2),
        (0.5, 0.4),
    ] {
        let (spec, honest) = qip::toys::twist(3, a, phi, a, 0.0).map_err(err)?;
        let (rw, aug) = qip::make_rewindable(&spec, &honest).map_err(err)?;
        let p = qip::composite_unitary(&rw.spec, &aug)
            .map_err(err)?
            .max_accept();
        within(
            p,
            0.5,
            1e-9,
            &format!("rewindable honest maximum at a = {a}"),
        )?;
    }
    for (c, s) in [(1.0, 0.0), (2.0 / 3.0, 1.0 / 3.0), (0.9, 0.4), (0.5, 0.1)] {
        for m in [2, 3] {
            rescale_exact(c, s, m)?;
        }
    }
    Ok("5 systems at exactly 1/2; rescaled bounds hold on 8 exact toys".into())
}

fn pipeline(
    messages: usize,
    a: f64,
    c: f64,
    s: f64,
) -> std::result::Result<(qip::QIPSystemSpec, qip::QIPProverSpec), String> {
    let (spec, honest) = qip::toys::twist(messages, a, 0.9, c, s).map_err(err)?;
    let (rw, aug) =
        qip::make_rewindable(&qip::error_rescale(&spec).map_err(err)?, &honest).map_err(err)?;
    Ok((rw.spec, aug))
}

fn perfect_completeness() -> Check {
    for m in [3, 2] {
        let (spec, aug) = pipeline(m, 0.75, 0.75, 0.25)?;
        let prover = qip::honest_protocol_prover(&spec, &aug).map_err(err)?;
        let out = qip::perfect_completeness_protocol(&spec, &prover).map_err(err)?;
        within(out.acceptance(), 1.0, 1e-9, &format!("honest m = {m}"))?;
    }
    let mut r = rng(15);
    let (raw, _) = qip::toys::twist(3, 1.0 / 3.0, 0.7, 2.0 / 3.0, 1.0 / 3.0).map_err(err)?;
    let spec = qip::rewindable_spec(&qip::error_rescale(&raw).map_err(err)?).map_err(err)?;
    let (mut checked, mut least) = (0, f64::INFINITY);
    for i in 0..20 {
        let p = 1 + r.gen_range(0..2);
        let layout = spec.layout().push("P", p).map_err(err)?;
        let prover = QIPProtocolProver {
            p_qubits: p,
            initial: random::random_state(&mut r, &layout),
            replies: (0..spec.rounds())
                .map(|_| random::haar_unitary(&mut r, spec.m_qubits + p))
                .collect(),
        };
        match qip::perfect_completeness_soundness_bound(&spec, &prover) {
            Ok(rep) => {
                ensure(rep.reject >= 1.0 / 144.0 - 1e-9, || {
                    format!("prover {i}: reject {} < 1/144", rep.reject)
                })?;
                checked += 1;
                least = least.min(rep.reject);
            }
            Err(QError::Inapplicable(_)) => {}
            Err(e) => return Err(err(e)),
        }
    }
    Ok(format!(
        "honest m = 2, 3 accept; {checked}/20 cheats in scope, least reject {least:.4} ≥ 1/144"
    ))
}

fn oracle_equivalence() -> Check {
    let scenarios = oracle_scenarios();
    let mut worst = 0.0f64;
    for (name, cfg, prover) in &scenarios {
        let out = run_protocol(cfg, prover).map_err(err)?;
        let o = epr_oracle(cfg, prover);
        for (got, want, what) in [
            (out.acceptance(), o.accept + o.give_up, "acceptance"),
            (out.give_up, o.give_up, "give-up"),
            (out.reject, o.reject, "reject"),
        ] {
            within(got, want, 1e-9, &format!("{name} {what}"))?;
            worst = worst.max((got - want).abs());
        }
    }
    Ok(format!(
        "{} scenarios, largest difference {worst:.1e}",
        scenarios.len()
    ))
}

fn core_properties() -> Check {
    let mut r = rng(8);
    let pair = RegisterLayout::qubits(&["a", "b"]).map_err(err)?;
    for i in 0..200 {
        let rho = random::random_density(&mut r, &pair, 1 + i % 4);
        let sigma = random::random_density(&mut r, &pair, 1 + (i / 4) % 4);
        let p = random::random_projector(&mut r, 4, 1 + i % 3);
        let gap = (rho.expectation(p.matrix()).map_err(err)?
            - sigma.expectation(p.matrix()).map_err(err)?)
        .abs();
        let d = trace_distance(&rho, &sigma).map_err(err)?;
        ensure(gap <= d + 1e-9, || {
            format!("sample {i}: measured gap {gap} > distance {d}")
        })?;
    }
    for i in 0..200 {
        let a = random::random_density(&mut r, &pair, 1 + i % 4);
        let b = random::random_density(&mut r, &pair, 1 + (i / 2) % 4);
        let x = random::random_density(&mut r, &pair, 1 + (i / 3) % 4);
        let f = |p: &DensityOperator, q: &DensityOperator| fidelity(p, q).map_err(err);
        let (ab, bx, ax) = (f(&a, &b)?, f(&b, &x)?, f(&a, &x)?);
        ensure(ab * ab + bx * bx <= 1.0 + ax + 1e-9, || {
            format!("triple {i}: {ab}² + {bx}² > 1 + {ax}")
        })?;
    }
    let one = RegisterLayout::qubits(&["t"]).map_err(err)?;
    let ports = RegisterLayout::qubits(&["c0", "c1"]).map_err(err)?;
    for k in 0..=10 {
        let a = k as f64 / 10.0;
        let psi = random::random_state(&mut r, &one);
        let cj = gates::cj_state(&gates::w(a).map_err(err)?)
            .map_err(err)?
            .with_layout(ports.clone())
            .map_err(err)?;
        let out =
            qma::teleport_apply(&psi.tensor(&cj).map_err(err)?, "t", ("c0", "c1")).map_err(err)?;
        within(
            out.success_probability,
            0.25,
            1e-9,
            &format!("teleport at a = {a}"),
        )?;
    }
    let ab = RegisterLayout::new(&[("a", 2), ("b", 2)]).map_err(err)?;
    for i in 0..50 {
        let x = random::random_vector(&mut r, 4);
        let y = random::random_vector(&mut r, 4);
        let s = state(ab.clone(), x.kronecker(&y));
        let pass = gates::swap_test(&s, &["a"], &["b"], "anc")
            .map_err(err)?
            .pass_probability;
        within(
            pass,
            swap_test_oracle(&x, &y),
            1e-9,
            &format!("swap test {i}"),
        )?;
    }
    Ok("200 + 200 lemma samples, 11 teleports, 50 swap tests".into())
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "reflection procedure completeness",
            limit: secs(1),
            run: rp_completeness,
        },
        Criterion {
            id: 2,
            name: "reflection procedure soundness",
            limit: secs(1),
            run: rp_soundness,
        },
        Criterion {
            id: 3,
            name: "reflection simulation test",
            limit: secs(5),
            run: rst,
        },
        Criterion {
            id: 4,
            name: "distillation",
            limit: secs(5),
            run: distillation,
        },
        Criterion {
            id: 5,
            name: "EPR protocol perfect completeness",
            limit: secs(60),
            run: epr_completeness,
        },
        Criterion {
            id: 6,
            name: "soundness sub-lemmas",
            limit: secs(30),
            run: sub_lemmas,
        },
        Criterion {
            id: 7,
            name: "modified reflection procedure",
            limit: secs(30),
            run: mrp,
        },
        Criterion {
            id: 8,
            name: "rewindable transform and rescaling",
            limit: secs(30),
            run: rewindable,
        },
        Criterion {
            id: 9,
            name: "perfect-completeness protocol",
            limit: secs(120),
            run: perfect_completeness,
        },
        Criterion {
            id: 10,
            name: "oracle equivalence",
            limit: secs(120),
            run: oracle_equivalence,
        },
        Criterion {
            id: 11,
            name: "core property suites",
            limit: secs(30),
            run: core_properties,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let (verdict, detail) = match result {
            Ok(d) if took <= c.limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {took:.2?}, limit {:?}", c.limit)),
            Err(e) => ("FAIL", e),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {verdict} {}: {detail}", c.id, c.name);
        eprintln!(
            "criterion {:>2} wall clock {took:.2?} (limit {:?})",
            c.id, c.limit
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
