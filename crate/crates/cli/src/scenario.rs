//! Scenario files: TOML with real parameters written as decimals or exact
//! `"num/den"` fractions.

use std::fmt;
use std::path::Path;

use num_rational::Rational64;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::presets;

/// A real parameter. Fractions are parsed as rationals and converted once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Real {
    pub fn parse(s: &str) -> Result<f64, String> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in `{s}`"))?;
            let d: i64 = d
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in `{s}`"))?;
            if d == 0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            let r = Rational64::new(n, d);
            // both parts are small integers, so this rounds once
            Ok(*r.numer() as f64 / *r.denom() as f64)
        } else {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{s}` is not a number or a fraction"))
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a fraction string \"num/den\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                Real::parse(v).map(Real).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Reflection,
    Rst,
    Mrp,
    EprQma,
    QipTransform,
    Checker,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Reflection => "reflection",
            Kind::Rst => "rst",
            Kind::Mrp => "mrp",
            Kind::EprQma => "epr-qma",
            Kind::QipTransform => "qip-transform",
            Kind::Checker => "checker",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    #[serde(alias = "monte-carlo")]
    Mc,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Mc => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    #[default]
    Eq,
    Ge,
    Le,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "==",
            Relation::Ge => ">=",
            Relation::Le => "<=",
        }
    }

    pub fn holds(self, measured: f64, claimed: f64, tol: f64) -> bool {
        match self {
            Relation::Eq => (measured - claimed).abs() <= tol,
            Relation::Ge => measured >= claimed - tol,
            Relation::Le => measured <= claimed + tol,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    pub quantity: String,
    pub value: Real,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub relation: Relation,
}

fn default_tolerance() -> f64 {
    qproof_core::TOL
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub gate: String,
    #[serde(default)]
    pub params: Vec<Real>,
    pub on: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptSpec {
    pub on: Vec<String>,
    /// Bit strings over `on`, most significant first.
    pub patterns: Vec<String>,
}

/// A QMA verifier: a preset, or qubit widths with a gate list. Qubits are
/// labelled `A0, A1, …` (private) and `M0, M1, …` (witness).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifierSpec {
    pub preset: Option<String>,
    pub theta: Option<Real>,
    pub a: Option<Real>,
    pub b: Option<Real>,
    pub v_qubits: Option<usize>,
    pub m_qubits: Option<usize>,
    #[serde(default)]
    pub gates: Vec<GateSpec>,
    pub accept: Option<AcceptSpec>,
}

/// A multi-message system: a catalog preset or the parameters of a twist toy.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub preset: Option<String>,
    pub messages: Option<usize>,
    pub a: Option<Real>,
    pub phi: Option<Real>,
    pub c: Option<Real>,
    pub s: Option<Real>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProverSpec {
    pub preset: String,
    pub q: Option<Real>,
    /// Witness basis state as a bit string over `M`.
    pub witness: Option<String>,
    pub ancilla: Option<usize>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub p: Option<Real>,
    pub q: Option<Real>,
    pub a: Option<Real>,
    pub epsilon: Option<Real>,
    pub input: Option<String>,
    pub index: Option<usize>,
    pub sign: Option<String>,
    pub n: Option<usize>,
    pub t: Option<usize>,
    pub check: Option<String>,
    pub count: Option<usize>,
    pub size: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: Option<String>,
    pub kind: Kind,
    pub description: Option<String>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub budget: Option<usize>,
    pub verifier: Option<VerifierSpec>,
    pub system: Option<SystemSpec>,
    pub prover: Option<ProverSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub expect: Vec<Expect>,
}

/// Why a scenario could not be loaded.
#[derive(Debug)]
pub enum LoadError {
    Io(String),
    Parse(String),
    Invalid(String),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(m) => write!(f, "io error: {m}"),
            LoadError::Parse(m) => write!(f, "parse error: {m}"),
            LoadError::Invalid(m) => write!(f, "validation error: {m}"),
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
        let mut s: Scenario = toml::from_str(&text)
            .map_err(|e| LoadError::Parse(format!("{}: {e}", path.display())))?;
        if s.name.is_none() {
            s.name = path.file_stem().map(|x| x.to_string_lossy().into_owned());
        }
        s.validate()
            .map_err(|e| LoadError::Invalid(format!("{}: {e}", path.display())))?;
        Ok(s)
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("unnamed")
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Exact)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn budget(&self) -> usize {
        self.budget.unwrap_or(qproof_core::DEFAULT_QUBIT_BUDGET)
    }

    /// Command-line overrides. Monte Carlo only applies to `epr-qma`; other
    /// kinds are exact computations and keep their mode.
    pub fn apply_overrides(&mut self, mode: Option<Mode>, seed: Option<u64>, shots: Option<u64>) {
        if let Some(m) = mode {
            if self.kind == Kind::EprQma {
                self.mode = Some(m);
            }
        }
        if seed.is_some() {
            self.seed = seed;
        }
        if shots.is_some() {
            self.shots = shots;
        }
    }

    /// Checks references, parameter ranges and quantity names.
    pub fn validate(&self) -> Result<(), String> {
        if self.name().is_empty() {
            return Err("field `name`: empty".into());
        }
        if self.mode() == Mode::Mc {
            if self.kind != Kind::EprQma {
                return Err(format!(
                    "field `mode`: Monte Carlo is only available for epr-qma, not {}",
                    self.kind.name()
                ));
            }
            if self.shots.unwrap_or(0) == 0 {
                return Err("field `shots`: Monte Carlo mode needs a positive shot count".into());
            }
        }
        let p = &self.params;
        for (field, v) in [("p", p.p), ("q", p.q), ("a", p.a)] {
            if let Some(Real(x)) = v {
                unit(&format!("params.{field}"), x)?;
            }
        }
        if let Some(Real(e)) = p.epsilon {
            if !(e > 0.0 && e <= 0.5) {
                return Err(format!("field `params.epsilon`: {e} outside (0, 1/2]"));
            }
        }
        match self.kind {
            Kind::Reflection | Kind::Mrp => {
                need(p.p.is_some(), "params.p")?;
                need(p.q.is_some(), "params.q")?;
                if let Some(i) = p.index {
                    if i >= 4 {
                        return Err(format!("field `params.index`: {i} outside 0..4"));
                    }
                }
                one_of("params.input", p.input.as_deref(), &["basis", "half"])?;
            }
            Kind::Rst => match p.input.as_deref() {
                Some("honest") => {
                    need(p.p.is_some(), "params.p")?;
                    need(p.q.is_some(), "params.q")?;
                }
                Some("cheat") => {
                    need(p.q.is_some(), "params.q")?;
                    one_of("params.sign", p.sign.as_deref(), &["plus", "minus"])?;
                }
                _ => return Err("field `params.input`: expected `honest` or `cheat`".into()),
            },
            Kind::EprQma => {
                let n = p.n.ok_or("field `params.n`: missing")?;
                if n < 2 {
                    return Err(format!(
                        "field `params.n`: {n}; at least two pairs are needed"
                    ));
                }
                if p.t == Some(0) {
                    return Err("field `params.t`: must be at least 1".into());
                }
                if self.mode() == Mode::Mc && p.t.unwrap_or(1) != 1 {
                    return Err("field `params.t`: Monte Carlo runs a single instance".into());
                }
                presets::verifier(
                    self.verifier
                        .as_ref()
                        .ok_or("section `verifier`: missing")?,
                )?;
                let prover = self.prover.as_ref().ok_or("section `prover`: missing")?;
                presets::check_epr_prover(prover)?;
            }
            Kind::QipTransform => {
                presets::system(self.system.as_ref().ok_or("section `system`: missing")?)?;
                let prover = self.prover.as_ref().ok_or("section `prover`: missing")?;
                one_of("prover.preset", Some(&prover.preset), &["honest", "random"])?;
                if prover.preset == "random" && prover.count.unwrap_or(0) == 0 {
                    return Err("field `prover.count`: random provers need a positive count".into());
                }
            }
            Kind::Checker => {
                let check = p.check.as_deref().ok_or("field `params.check`: missing")?;
                one_of("params.check", Some(check), presets::CHECKS)?;
                match check {
                    "distillation" => {
                        presets::verifier(
                            self.verifier
                                .as_ref()
                                .ok_or("section `verifier`: missing")?,
                        )?;
                    }
                    "claim-lower-bound" | "cj-rounding" => {
                        need(p.count.unwrap_or(0) > 0, "params.count")?;
                        need(p.size.unwrap_or(0) > 0, "params.size")?;
                    }
                    _ => need(p.a.is_some(), "params.a")?,
                }
            }
        }
        let known = self.quantities();
        for (i, e) in self.expect.iter().enumerate() {
            if !known.contains(&e.quantity.as_str()) {
                return Err(format!(
                    "field `expect[{i}].quantity`: `{}` is not produced by {} (known: {})",
                    e.quantity,
                    self.kind.name(),
                    known.join(", ")
                ));
            }
            if !(e.tolerance >= 0.0 && e.tolerance.is_finite()) {
                return Err(format!(
                    "field `expect[{i}].tolerance`: {} is not a finite non-negative number",
                    e.tolerance
                ));
            }
        }
        Ok(())
    }

    /// Quantity names this scenario can report.
    pub fn quantities(&self) -> &'static [&'static str] {
        match self.kind {
            Kind::Reflection => &[
                "accept",
                "reject",
                "gap",
                "min_eigenbasis_reject",
                "min_random_reject",
                "soundness_bound",
            ],
            Kind::Rst => &["accept", "genuine_accept", "give_up", "reject"],
            Kind::Mrp => &["accept", "reject", "max_accept"],
            Kind::EprQma => &[
                "accept",
                "genuine_accept",
                "give_up",
                "reject",
                "p_x",
                "peak_qubits",
            ],
            Kind::QipTransform => &[
                "max_accept",
                "rescaled_max_accept",
                "rewindable_max_accept",
                "protocol_accept",
                "protocol_reject",
                "provers",
                "checked",
                "min_reject",
                "bound",
                "violations",
            ],
            Kind::Checker => &[
                "success_probability",
                "fidelity",
                "p_x",
                "p",
                "min_slack",
                "violations",
            ],
        }
    }
}

fn unit(field: &str, x: f64) -> Result<(), String> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(format!("field `{field}`: {x} outside [0, 1]"))
    }
}

fn need(ok: bool, field: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(format!("field `{field}`: missing or zero"))
    }
}

fn one_of(field: &str, v: Option<&str>, allowed: &[&str]) -> Result<(), String> {
    match v {
        None => Ok(()),
        Some(x) if allowed.contains(&x) => Ok(()),
        Some(x) => Err(format!(
            "field `{field}`: `{x}` is not one of {}",
            allowed.join(", ")
        )),
    }
}
