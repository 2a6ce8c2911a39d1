//! Double-pushout rewriting on graph expressions.

mod apply;
mod matching;
mod reach;
mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{Constituent, EdgeId, GraphError, GraphExpression, Node, NormalGraph, TypeGraph};

pub use apply::{apply, apply_detailed, Application};
pub use matching::find_matches;
pub use reach::{
    reachable, reachable_states, DerivationSeq, ReachMode, ReachOptions, ReachOutcome, ReachedState, Step, TraceEntry,
};
pub use verify::{verify_dpo_conditions, Condition, ConditionCheck, DpoReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpoError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("rule `{rule}`: interface variable `{var}` listed twice")]
    DuplicateVariable { rule: String, var: String },
    #[error("rule `{0}` declared twice")]
    DuplicateRule(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("match is not valid for this graph: {0}")]
    StaleMatch(String),
    #[error("state cap of {0} reached before the step bound was covered")]
    CapReached(usize),
    #[error("step {index} of the trace does not replay: {reason}")]
    Replay { index: usize, reason: String },
}

/// `Λ x̄. L ⇒p R`: a rule with a discrete interface of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleExpr {
    name: String,
    iface_vars: Vec<Node>,
    lhs: GraphExpression,
    rhs: GraphExpression,
}

impl RuleExpr {
    pub fn new(
        tg: &TypeGraph,
        name: impl Into<String>,
        iface_vars: Vec<Node>,
        lhs: Constituent,
        rhs: Constituent,
    ) -> Result<Self, DpoError> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for v in &iface_vars {
            if !seen.insert(v.name.as_str()) {
                return Err(DpoError::DuplicateVariable {
                    rule: name,
                    var: v.name.clone(),
                });
            }
        }
        let lhs = GraphExpression::new(tg, iface_vars.iter().cloned(), lhs)?;
        let rhs = GraphExpression::new(tg, iface_vars.iter().cloned(), rhs)?;
        Ok(RuleExpr {
            name,
            iface_vars,
            lhs,
            rhs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn iface_vars(&self) -> &[Node] {
        &self.iface_vars
    }

    pub fn lhs(&self) -> &GraphExpression {
        &self.lhs
    }

    pub fn rhs(&self) -> &GraphExpression {
        &self.rhs
    }
}

impl fmt::Display for RuleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} {{ bind ", self.name)?;
        for (i, v) in self.iface_vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "; lhs {}; rhs {}; }}", self.lhs.body(), self.rhs.body())
    }
}

/// A graph transformation system: type graph, named rules and a closed
/// initial graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gts {
    pub type_graph: TypeGraph,
    pub rules: BTreeMap<String, RuleExpr>,
    pub initial: GraphExpression,
}

impl Gts {
    pub fn new(
        type_graph: TypeGraph,
        rules: impl IntoIterator<Item = RuleExpr>,
        initial: GraphExpression,
    ) -> Result<Self, DpoError> {
        initial.require_closed()?;
        initial.validate(&type_graph)?;
        let mut map = BTreeMap::new();
        for r in rules {
            r.lhs.validate(&type_graph)?;
            r.rhs.validate(&type_graph)?;
            if map.contains_key(&r.name) {
                return Err(DpoError::DuplicateRule(r.name));
            }
            map.insert(r.name.clone(), r);
        }
        Ok(Gts {
            type_graph,
            rules: map,
            initial,
        })
    }

    pub fn rule(&self, name: &str) -> Result<&RuleExpr, DpoError> {
        self.rules
            .get(name)
            .ok_or_else(|| DpoError::UnknownRule(name.to_string()))
    }
}

/// A match of a rule's left-hand side in a closed graph.
///
/// `d` instantiates the interface variables, `bound_map` sends the
/// restricted nodes of the left-hand side (the deleted nodes) to nodes of the
/// graph, and `edge_map` sends left-hand edges to graph edges by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub rule: String,
    pub d: BTreeMap<String, Node>,
    pub bound_map: BTreeMap<String, Node>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
    pub residual: NormalGraph,
}

impl Match {
    /// The node a left-hand name is sent to, through `d` or `bound_map`.
    pub fn node_image(&self, name: &str) -> Option<&Node> {
        self.d.get(name).or_else(|| self.bound_map.get(name))
    }

    /// Ordering-independent identity of the match, without the residual.
    pub fn triple(&self) -> (BTreeMap<String, Node>, BTreeMap<String, Node>, BTreeMap<EdgeId, EdgeId>) {
        (self.d.clone(), self.bound_map.clone(), self.edge_map.clone())
    }
}

impl fmt::Display for Match {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: d = {{", self.rule)?;
        for (i, (k, v)) in self.d.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} -> {}", v.name)?;
        }
        f.write_str("}, m_v = {")?;
        for (i, (k, v)) in self.bound_map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} -> {}", v.name)?;
        }
        f.write_str("}, m_e = {")?;
        for (i, (k, v)) in self.edge_map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} -> {v}")?;
        }
        f.write_str("}")
    }
}

/// Residual context of a match: the graph minus consumed edges and deleted
/// nodes. Interface is empty because the graph is closed.
pub(crate) fn residual_of(
    g: &NormalGraph,
    bound_map: &BTreeMap<String, Node>,
    edge_map: &BTreeMap<EdgeId, EdgeId>,
) -> NormalGraph {
    let deleted: BTreeSet<&Node> = bound_map.values().collect();
    let consumed: BTreeSet<&EdgeId> = edge_map.values().collect();
    NormalGraph {
        interface: g.interface.clone(),
        prefix: g.prefix.iter().filter(|n| !deleted.contains(n)).cloned().collect(),
        components: g
            .components
            .iter()
            .filter(|e| !consumed.contains(&e.id))
            .cloned()
            .collect(),
    }
}
