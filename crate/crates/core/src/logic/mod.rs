//! Quantified intuitionistic linear logic with a resource-bound existential.
//!
//! Sequents have two zones, `Γ; Δ ⊢ M :: α`: `Γ` holds unrestricted
//! hypotheses (individual variables among them), `Δ` holds linear resources
//! each of which must be consumed exactly once. The checker reconstructs the
//! context splits from the term; the prover searches for terms in the
//! multiplicative and quantifier fragment and hands every result back to the
//! checker.

mod check;
mod formula;
mod search;
mod term;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use check::{check, check_term, infer_term};
pub use formula::{alpha_eq, fresh_var, freshness, Formula};
pub use search::{bounded_search, prove, SearchConfig, SearchError};
pub use term::ProofTerm;

/// `Γ; Δ`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Context {
    pub gamma: Vec<(String, Formula)>,
    pub delta: Vec<(String, Formula)>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_gamma(mut self, name: impl Into<String>, ty: Formula) -> Self {
        self.gamma.push((name.into(), ty));
        self
    }

    pub fn with_delta(mut self, name: impl Into<String>, ty: Formula) -> Self {
        self.delta.push((name.into(), ty));
        self
    }

    /// Individual variable `x :: A` in `Γ`.
    pub fn individual(self, name: impl Into<String>, node_type: impl Into<String>) -> Self {
        self.with_gamma(name, Formula::Atom(node_type.into()))
    }

    pub fn names(&self) -> BTreeSet<&str> {
        self.gamma
            .iter()
            .chain(self.delta.iter())
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// Checks that names are unique across both zones and that no
    /// individual variable is referred to twice in `Δ`.
    pub fn well_formed(&self) -> Result<(), KernelError> {
        let mut seen = BTreeSet::new();
        for (n, _) in self.gamma.iter().chain(self.delta.iter()) {
            if !seen.insert(n.as_str()) {
                return Err(KernelError::IllFormedContext(format!("`{n}` is declared twice")));
            }
        }
        let mut referred = BTreeSet::new();
        for (n, ty) in &self.delta {
            if let Formula::RefTo(_, x) = ty {
                if !referred.insert(x.as_str()) {
                    return Err(KernelError::Uniqueness {
                        var: n.clone(),
                        referring: x.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zone = |f: &mut fmt::Formatter<'_>, z: &[(String, Formula)]| -> fmt::Result {
            if z.is_empty() {
                return f.write_str(".");
            }
            for (i, (n, ty)) in z.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{n}:{ty}")?;
            }
            Ok(())
        };
        zone(f, &self.gamma)?;
        f.write_str("; ")?;
        zone(f, &self.delta)
    }
}

/// `Γ; Δ ⊢ M :: α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub ctx: Context,
    pub term: ProofTerm,
    pub ty: Formula,
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {} :: {}", self.ctx, self.term, self.ty)
    }
}

/// Coarse grouping of kernel errors, stable across message wording.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticClass {
    Unbound,
    LinearReuse,
    LinearUnused,
    Uniqueness,
    Freshness,
    WitnessReuse,
    NotAReference,
    Annotation,
    Mismatch,
    NotSynthesizable,
    Shadowing,
    Escape,
    AdditiveMismatch,
    NonlinearConsumes,
    IllFormedContext,
}

impl fmt::Display for DiagnosticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant serializes");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("linear variable `{var}` is used more than once ({rule})")]
    LinearReuse { var: String, rule: &'static str },
    #[error("linear variable `{0}` is never used")]
    LinearUnused(String),
    #[error("`{var}` would make `{referring}` a referring variable twice in the linear context")]
    Uniqueness { var: String, referring: String },
    #[error("freshness condition fails: `{y}` still occurs in `{formula}` once `{x}` is abstracted")]
    Freshness { formula: String, x: String, y: String },
    #[error("reference `{0}` is consumed again inside the body of its own restriction")]
    WitnessReuse(String),
    #[error("`{var}` is not a reference to `{to}`: {reason}")]
    NotAReference { var: String, to: String, reason: String },
    #[error("annotation `{annotation}` does not agree with `{expected}`")]
    Annotation { annotation: String, expected: String },
    #[error("type mismatch: expected `{expected}`, found `{found}`")]
    Mismatch { expected: String, found: String },
    #[error("cannot synthesize a type for `{0}`; add an annotation")]
    NotSynthesizable(String),
    #[error("`{0}` is already bound in this scope")]
    Shadowing(String),
    #[error("eigenvariable `{0}` escapes its scope")]
    Escape(String),
    #[error("additive branches consume different resources: {left:?} vs {right:?}")]
    AdditiveMismatch { left: Vec<String>, right: Vec<String> },
    #[error("`{construct}` must not consume linear resources, but uses {used:?}")]
    NonlinearConsumes { construct: &'static str, used: Vec<String> },
    #[error("ill-formed context: {0}")]
    IllFormedContext(String),
}

impl KernelError {
    pub fn class(&self) -> DiagnosticClass {
        match self {
            KernelError::Unbound(_) => DiagnosticClass::Unbound,
            KernelError::LinearReuse { .. } => DiagnosticClass::LinearReuse,
            KernelError::LinearUnused(_) => DiagnosticClass::LinearUnused,
            KernelError::Uniqueness { .. } => DiagnosticClass::Uniqueness,
            KernelError::Freshness { .. } => DiagnosticClass::Freshness,
            KernelError::WitnessReuse(_) => DiagnosticClass::WitnessReuse,
            KernelError::NotAReference { .. } => DiagnosticClass::NotAReference,
            KernelError::Annotation { .. } => DiagnosticClass::Annotation,
            KernelError::Mismatch { .. } => DiagnosticClass::Mismatch,
            KernelError::NotSynthesizable(_) => DiagnosticClass::NotSynthesizable,
            KernelError::Shadowing(_) => DiagnosticClass::Shadowing,
            KernelError::Escape(_) => DiagnosticClass::Escape,
            KernelError::AdditiveMismatch { .. } => DiagnosticClass::AdditiveMismatch,
            KernelError::NonlinearConsumes { .. } => DiagnosticClass::NonlinearConsumes,
            KernelError::IllFormedContext(_) => DiagnosticClass::IllFormedContext,
        }
    }
}
