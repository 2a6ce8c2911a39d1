use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{Constituent, EdgeComp, GraphExpression, Node};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct NodeClassification {
    pub free: BTreeSet<Node>,
    pub bound: BTreeSet<Node>,
    pub connected: BTreeSet<Node>,
    pub isolated_bound: BTreeSet<Node>,
    pub isolated_free: BTreeSet<Node>,
}

pub fn classify(e: &GraphExpression) -> NodeClassification {
    let free = e.interface().clone();
    let bound: BTreeSet<Node> = e.body().bound_nodes().into_iter().collect();
    let connected: BTreeSet<Node> = e
        .body()
        .edges()
        .into_iter()
        .flat_map(|edge| edge.args.iter().cloned())
        .collect();
    let isolated_bound = bound.difference(&connected).cloned().collect();
    let isolated_free = free.difference(&connected).cloned().collect();
    NodeClassification {
        free,
        bound,
        connected,
        isolated_bound,
        isolated_free,
    }
}

/// `X ⊨ ν n̄. G` with `G` either `Nil` or a Nil-free composition of edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalGraph {
    pub interface: BTreeSet<Node>,
    pub prefix: Vec<Node>,
    pub components: Vec<EdgeComp>,
}

/// Pulls every restriction to the front (scope extrusion is sound because
/// bound names are already apart) and drops `Nil` leaves. Bound names and
/// edge order are kept as written.
pub fn normalize(e: &GraphExpression) -> NormalGraph {
    NormalGraph {
        interface: e.interface().clone(),
        prefix: e.body().bound_nodes(),
        components: e.body().edges().into_iter().cloned().collect(),
    }
}

pub fn ground_components(e: &GraphExpression) -> (BTreeSet<Node>, Vec<EdgeComp>) {
    let nodes = e.nodes().into_iter().collect();
    let edges = e.body().edges().into_iter().cloned().collect();
    (nodes, edges)
}

impl NormalGraph {
    pub fn to_expression(&self) -> GraphExpression {
        let body = Constituent::nu_all(
            &self.prefix,
            Constituent::par_all(self.components.iter().cloned().map(Constituent::Edge)),
        );
        GraphExpression::from_parts(self.interface.iter().cloned(), body)
            .expect("normal graph built from a well-formed expression")
    }

    pub fn isolated_prefix(&self) -> Vec<&Node> {
        self.prefix
            .iter()
            .filter(|n| !self.components.iter().any(|c| c.args.contains(n)))
            .collect()
    }
}

impl fmt::Display for NormalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expression())
    }
}
