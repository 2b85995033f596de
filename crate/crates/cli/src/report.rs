//! Text and CSV reports. Everything printed here is deterministic; timing goes to stderr.

use std::fmt::Write as _;

use crate::exec::{self, fixed, Measured, RunError, RNG_NAME};
use crate::scenario::{Mode, Relation, Scenario};

#[derive(Debug, Clone)]
pub struct Check {
    pub quantity: String,
    pub relation: Relation,
    pub claimed: f64,
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// Integer-valued quantity.
    pub count: bool,
}

#[derive(Debug)]
pub enum Status {
    Done(Measured, Vec<Check>),
    Failed(RunError),
}

#[derive(Debug)]
pub struct Entry {
    pub name: String,
    pub kind: &'static str,
    pub mode: Mode,
    pub seed: u64,
    pub shots: Option<u64>,
    pub description: Option<String>,
    pub status: Status,
}

impl Entry {
    pub fn evaluate(s: &Scenario) -> Entry {
        let status = match exec::run(s) {
            Ok(m) => {
                let checks = s
                    .expect
                    .iter()
                    .map(|e| {
                        let measured = m.get(&e.quantity);
                        let count = m.quantities.iter().any(|q| q.name == e.quantity && q.count);
                        Check {
                            count,
                            quantity: e.quantity.clone(),
                            relation: e.relation,
                            claimed: e.value.0,
                            measured,
                            tolerance: e.tolerance,
                            pass: measured
                                .is_some_and(|x| e.relation.holds(x, e.value.0, e.tolerance)),
                        }
                    })
                    .collect();
                Status::Done(m, checks)
            }
            Err(e) => Status::Failed(e),
        };
        Entry {
            name: s.name().to_string(),
            kind: s.kind.name(),
            mode: s.mode(),
            seed: s.seed(),
            shots: s.shots,
            description: s.description.clone(),
            status,
        }
    }

    pub fn passed(&self) -> bool {
        matches!(&self.status, Status::Done(_, checks) if checks.iter().all(|c| c.pass))
    }
}

/// Exit status: 0 pass, 1 assertion failure, 2 validation error, 3 budget exceeded.
pub fn exit_code(entries: &[Entry]) -> u8 {
    let mut code = 0;
    for e in entries {
        let c = match &e.status {
            Status::Failed(RunError::Invalid(_)) => 2,
            Status::Failed(RunError::Budget(_)) => 3,
            Status::Done(..) if !e.passed() => 1,
            Status::Done(..) => 0,
        };
        // a validation error outranks a budget error, which outranks a failed check
        code = match (code, c) {
            (2, _) | (_, 2) => 2,
            (3, _) | (_, 3) => 3,
            (a, b) => a.max(b),
        };
    }
    code
}

fn tol(x: f64) -> String {
    format!("{x:e}")
}

fn value(x: f64, count: bool) -> String {
    if count && x.fract() == 0.0 {
        format!("{}", x as i64)
    } else {
        fixed(x)
    }
}

fn claimed(c: &Check) -> String {
    value(c.claimed, c.count)
}

fn measured(c: &Check, missing: &str) -> String {
    c.measured
        .map_or(missing.to_string(), |x| value(x, c.count))
}

pub fn text(entries: &[Entry]) -> String {
    let mut out = String::new();
    let (mut checks, mut failed_checks) = (0, 0);
    for e in entries {
        let _ = writeln!(out, "scenario {}", e.name);
        let _ = writeln!(out, "  kind      {}", e.kind);
        match (e.mode, e.shots) {
            (Mode::Mc, Some(shots)) => {
                let _ = writeln!(out, "  mode      mc, {shots} shots");
            }
            _ => {
                let _ = writeln!(out, "  mode      {}", e.mode.name());
            }
        }
        let _ = writeln!(out, "  seed      {} ({RNG_NAME})", e.seed);
        if let Some(d) = &e.description {
            let _ = writeln!(out, "  about     {}", d.trim());
        }
        match &e.status {
            Status::Failed(err) => {
                let (what, msg) = match err {
                    RunError::Budget(m) => ("budget exceeded", m),
                    RunError::Invalid(m) => ("validation error", m),
                };
                let _ = writeln!(out, "  error     {what}: {msg}");
                let _ = writeln!(out, "  result    ERROR");
            }
            Status::Done(m, cs) => {
                let _ = writeln!(out, "  setup     {}", m.setup);
                if let Some(o) = &m.outcome {
                    let _ = writeln!(out, "  outcome   {o}");
                }
                for t in &m.trace {
                    let _ = writeln!(out, "  trace     {t}");
                }
                for n in &m.notes {
                    let _ = writeln!(out, "  note      {n}");
                }
                for q in &m.quantities {
                    let judged: Vec<&Check> = cs.iter().filter(|c| c.quantity == q.name).collect();
                    if judged.is_empty() {
                        let _ = writeln!(
                            out,
                            "  value     {} = {} (unchecked)",
                            q.name,
                            value(q.value, q.count)
                        );
                    }
                }
                for c in cs {
                    checks += 1;
                    if !c.pass {
                        failed_checks += 1;
                    }
                    let _ = writeln!(
                        out,
                        "  check     {} {} {} +/- {}: measured {} {}",
                        c.quantity,
                        c.relation.symbol(),
                        claimed(c),
                        tol(c.tolerance),
                        measured(c, "not measured"),
                        if c.pass { "PASS" } else { "FAIL" }
                    );
                }
                let _ = writeln!(
                    out,
                    "  result    {}",
                    if e.passed() { "PASS" } else { "FAIL" }
                );
            }
        }
        out.push('\n');
    }
    let passed = entries.iter().filter(|e| e.passed()).count();
    let errors = entries
        .iter()
        .filter(|e| matches!(e.status, Status::Failed(_)))
        .count();
    let _ = writeln!(
        out,
        "summary: {} scenario(s), {passed} passed, {} failed, {errors} error(s); {checks} check(s), {failed_checks} failed",
        entries.len(),
        entries.len() - passed - errors,
    );
    let failures: Vec<String> = entries
        .iter()
        .filter(|e| !e.passed())
        .flat_map(|e| match &e.status {
            Status::Failed(err) => vec![format!(
                "{}: {}",
                e.name,
                match err {
                    RunError::Budget(m) | RunError::Invalid(m) => m,
                }
            )],
            Status::Done(_, cs) => cs
                .iter()
                .filter(|c| !c.pass)
                .map(|c| {
                    format!(
                        "{}: {} {} {} +/- {}, measured {}",
                        e.name,
                        c.quantity,
                        c.relation.symbol(),
                        claimed(c),
                        tol(c.tolerance),
                        measured(c, "not measured")
                    )
                })
                .collect(),
        })
        .collect();
    for f in failures {
        let _ = writeln!(out, "failed: {f}");
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per check: `scenario,quantity,relation,claimed,measured,tolerance,pass`.
/// Scenarios that could not run get a single `error` row.
pub fn csv(entries: &[Entry]) -> String {
    let mut out = String::from("scenario,quantity,relation,claimed,measured,tolerance,pass\n");
    for e in entries {
        let name = csv_field(&e.name);
        match &e.status {
            Status::Failed(_) => {
                let _ = writeln!(out, "{name},error,,,,,error");
            }
            Status::Done(_, cs) => {
                for c in cs {
                    let _ = writeln!(
                        out,
                        "{name},{},{},{},{},{},{}",
                        csv_field(&c.quantity),
                        c.relation.symbol(),
                        claimed(c),
                        measured(c, ""),
                        tol(c.tolerance),
                        c.pass
                    );
                }
            }
        }
    }
    out
}
