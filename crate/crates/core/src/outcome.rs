//! Exact outcome distributions of verifier procedures.

use std::fmt;

use crate::error::{QError, Result};
use crate::state::{StateVector, SubState};

/// Terminal verdicts. Giving up counts as acceptance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    GiveUp,
    Reject,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::GiveUp => "give-up-accept",
            Verdict::Reject => "reject",
        })
    }
}

/// One line of a branch trace: a step label, the probability mass that
/// reached (or, for terminal entries, ended at) it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub label: String,
    pub verdict: Option<Verdict>,
    pub probability: f64,
}

/// A normalized intermediate state on a surviving branch.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub label: String,
    pub weight: f64,
    pub state: StateVector,
}

#[derive(Debug, Clone, Default)]
pub struct ProtocolOutcome {
    pub accept: f64,
    pub give_up: f64,
    pub reject: f64,
    pub trace: Vec<TraceEntry>,
    pub snapshots: Vec<Snapshot>,
}

impl ProtocolOutcome {
    pub fn new() -> Self {
        Self::default()
    }

    /// Headline acceptance: genuine plus give-up.
    pub fn acceptance(&self) -> f64 {
        self.accept + self.give_up
    }

    pub fn total(&self) -> f64 {
        self.accept + self.give_up + self.reject
    }

    pub fn probability(&self, v: Verdict) -> f64 {
        match v {
            Verdict::Accept => self.accept,
            Verdict::GiveUp => self.give_up,
            Verdict::Reject => self.reject,
        }
    }

    /// Adds terminal mass.
    pub fn record(&mut self, verdict: Verdict, label: impl Into<String>, probability: f64) {
        match verdict {
            Verdict::Accept => self.accept += probability,
            Verdict::GiveUp => self.give_up += probability,
            Verdict::Reject => self.reject += probability,
        }
        self.trace.push(TraceEntry {
            label: label.into(),
            verdict: Some(verdict),
            probability,
        });
    }

    /// Notes non-terminal mass passing a step.
    pub fn note(&mut self, label: impl Into<String>, probability: f64) {
        self.trace.push(TraceEntry {
            label: label.into(),
            verdict: None,
            probability,
        });
    }

    pub fn snapshot(&mut self, label: impl Into<String>, branch: &SubState) {
        if let Some(state) = branch.normalize() {
            self.snapshots.push(Snapshot {
                label: label.into(),
                weight: branch.weight(),
                state,
            });
        }
    }

    /// Merges another outcome into this one, scaling its probabilities by `weight`.
    pub fn absorb(&mut self, other: ProtocolOutcome, weight: f64) {
        self.accept += weight * other.accept;
        self.give_up += weight * other.give_up;
        self.reject += weight * other.reject;
        self.trace.extend(other.trace.into_iter().map(|mut e| {
            e.probability *= weight;
            e
        }));
        self.snapshots
            .extend(other.snapshots.into_iter().map(|mut s| {
                s.weight *= weight;
                s
            }));
    }

    /// Fails when the terminal probabilities do not sum to one within `tol`.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let t = self.total();
        if (t - 1.0).abs() > tol {
            return Err(QError::Invalid(format!("outcome probabilities sum to {t}")));
        }
        Ok(())
    }

    /// Sum of terminal trace entries with the given label prefix and verdict.
    pub fn mass(&self, prefix: &str, verdict: Verdict) -> f64 {
        self.trace
            .iter()
            .filter(|e| e.verdict == Some(verdict) && e.label.starts_with(prefix))
            .map(|e| e.probability)
            .sum()
    }
}

impl fmt::Display for ProtocolOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "accept {:.12} (genuine {:.12}, give-up {:.12}), reject {:.12}",
            self.acceptance(),
            self.accept,
            self.give_up,
            self.reject
        )
    }
}
