//! Named register layouts.
//!
//! Qubits are ordered big-endian over the declaration order: the first
//! qubit of the first register is the most significant bit of a basis index.

use std::fmt;
use std::ops::Range;

use crate::error::{QError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    regs: Vec<(String, usize)>,
}

impl RegisterLayout {
    /// Builds a layout from `(name, qubit count)` pairs. Names must be unique,
    /// every register must hold at least one qubit, and the layout must not be empty.
    pub fn new<S: AsRef<str>>(regs: &[(S, usize)]) -> Result<Self> {
        if regs.is_empty() {
            return Err(QError::Invalid(
                "layout must declare at least one register".into(),
            ));
        }
        let mut out = Self::scalar();
        for (name, width) in regs {
            out = out.push(name.as_ref(), *width)?;
        }
        Ok(out)
    }

    /// Single-qubit registers with the given names.
    pub fn qubits<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let regs: Vec<(&str, usize)> = names.iter().map(|n| (n.as_ref(), 1)).collect();
        Self::new(&regs)
    }

    /// The zero-qubit layout (dimension 1). Only produced by tracing out everything.
    pub fn scalar() -> Self {
        Self { regs: Vec::new() }
    }

    pub fn push(&self, name: &str, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(QError::Invalid(format!("register `{name}` has zero width")));
        }
        if self.contains(name) {
            return Err(QError::DuplicateRegister(name.to_string()));
        }
        let mut regs = self.regs.clone();
        regs.push((name.to_string(), width));
        Ok(Self { regs })
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        let mut out = self.clone();
        for (name, width) in &other.regs {
            out = out.push(name, *width)?;
        }
        Ok(out)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.regs.iter().any(|(n, _)| n == name)
    }

    pub fn num_qubits(&self) -> usize {
        self.regs.iter().map(|(_, w)| w).sum()
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits()
    }

    pub fn registers(&self) -> &[(String, usize)] {
        &self.regs
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.regs.iter().map(|(n, _)| n.as_str())
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        self.regs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, w)| *w)
            .ok_or_else(|| QError::UnknownRegister(name.to_string()))
    }

    /// Global qubit positions held by a register.
    pub fn range(&self, name: &str) -> Result<Range<usize>> {
        let mut offset = 0;
        for (n, w) in &self.regs {
            if n == name {
                return Ok(offset..offset + w);
            }
            offset += w;
        }
        Err(QError::UnknownRegister(name.to_string()))
    }

    /// Global qubit positions of several registers, concatenated in the given order.
    pub fn positions<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if names[..i].iter().any(|n| n.as_ref() == name) {
                return Err(QError::RegistersNotDistinct(name.to_string()));
            }
            out.extend(self.range(name)?);
        }
        Ok(out)
    }

    /// The layout left after removing the named registers (order preserved).
    pub fn without<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        for n in names {
            if !self.contains(n.as_ref()) {
                return Err(QError::UnknownRegister(n.as_ref().to_string()));
            }
        }
        Ok(Self {
            regs: self
                .regs
                .iter()
                .filter(|(n, _)| !names.iter().any(|m| m.as_ref() == n))
                .cloned()
                .collect(),
        })
    }

    /// Same widths, new names.
    pub fn renamed<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        if names.len() != self.regs.len() {
            return Err(QError::DimensionMismatch {
                expected: self.regs.len(),
                got: names.len(),
            });
        }
        let regs: Vec<(&str, usize)> = names
            .iter()
            .zip(&self.regs)
            .map(|(n, (_, w))| (n.as_ref(), *w))
            .collect();
        if regs.is_empty() {
            return Ok(Self::scalar());
        }
        Self::new(&regs)
    }
}

impl fmt::Display for RegisterLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.regs.iter().map(|(n, w)| format!("{n}[{w}]")).collect();
        write!(f, "({})", parts.join(", "))
    }
}
