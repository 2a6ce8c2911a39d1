//! Typed hypergraph expressions.
//!
//! A graph expression `X ⊨ C` pairs an interface `X` (the free, gluable
//! nodes) with a constituent `C` built from edge components, `Nil`, parallel
//! composition and node restriction. Expressions are kept under the
//! Barendregt convention: every restricted name is distinct from every other
//! name in the expression, which is re-established on construction by
//! α-renaming.

mod canon;
mod congruence;
mod normal;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canon::canonical_key;
pub use congruence::{congruent, heating, heating_witness, Renaming};
pub use normal::{classify, ground_components, normalize, NodeClassification, NormalGraph};
pub use subst::substitute;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node type `{0}` declared twice")]
    DuplicateNodeType(String),
    #[error("edge type `{0}` declared twice")]
    DuplicateEdgeType(String),
    #[error("unknown node type `{0}`")]
    UnknownNodeType(String),
    #[error("unknown edge type `{0}`")]
    UnknownEdgeType(String),
    #[error("edge `{label}` expects {expected} arguments, found {found}")]
    ArityMismatch {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("argument {position} of `{label}` must have type `{expected}`, found `{found}`")]
    ArgumentType {
        label: String,
        position: usize,
        expected: String,
        found: String,
    },
    #[error("node `{0}` is used with two different types")]
    NodeTypeConflict(String),
    #[error("free node `{0}` is not part of the interface")]
    NotInInterface(String),
    #[error("edge identifier {0} occurs twice")]
    DuplicateEdgeId(EdgeId),
    #[error("expression is not closed: interface is {0}")]
    NotClosed(String),
    #[error("`{0}` is not a free node of the expression")]
    NotFree(String),
    #[error("cannot substitute `{to}` for `{from}`: types differ")]
    SubstitutionType { from: String, to: String },
}

/// Node types and edge types with their arities.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeGraph {
    node_types: BTreeSet<String>,
    edge_types: BTreeMap<String, Vec<String>>,
}

impl TypeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node_type(&mut self, name: impl Into<String>) -> Result<(), GraphError> {
        let name = name.into();
        if self.node_types.contains(&name) {
            return Err(GraphError::DuplicateNodeType(name));
        }
        self.node_types.insert(name);
        Ok(())
    }

    pub fn add_edge_type(&mut self, name: impl Into<String>, arity: Vec<String>) -> Result<(), GraphError> {
        let name = name.into();
        if self.edge_types.contains_key(&name) {
            return Err(GraphError::DuplicateEdgeType(name));
        }
        if let Some(bad) = arity.iter().find(|ty| !self.node_types.contains(*ty)) {
            return Err(GraphError::UnknownNodeType(bad.clone()));
        }
        self.edge_types.insert(name, arity);
        Ok(())
    }

    pub fn has_node_type(&self, name: &str) -> bool {
        self.node_types.contains(name)
    }

    pub fn arity(&self, label: &str) -> Option<&[String]> {
        self.edge_types.get(label).map(Vec::as_slice)
    }

    pub fn node_types(&self) -> impl Iterator<Item = &str> {
        self.node_types.iter().map(String::as_str)
    }

    pub fn edge_types(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.edge_types.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn is_empty(&self) -> bool {
        self.node_types.is_empty() && self.edge_types.is_empty()
    }
}

/// A node name together with its node type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Node {
    pub name: String,
    pub ty: String,
}

impl Node {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        Node {
            name: name.into(),
            ty: ty.into(),
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.ty)
    }
}

/// Identity of an edge component. Ignored by congruence, used by matching
/// to report which concrete edge a rule consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeComp {
    pub id: EdgeId,
    pub label: String,
    pub args: Vec<Node>,
}

impl fmt::Display for EdgeComp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.label)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&a.name)?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constituent {
    Edge(EdgeComp),
    Nil,
    Par(Box<Constituent>, Box<Constituent>),
    Nu(Node, Box<Constituent>),
}

impl Constituent {
    pub fn edge(id: u32, label: impl Into<String>, args: Vec<Node>) -> Self {
        Constituent::Edge(EdgeComp {
            id: EdgeId(id),
            label: label.into(),
            args,
        })
    }

    pub fn par(left: Constituent, right: Constituent) -> Self {
        Constituent::Par(Box::new(left), Box::new(right))
    }

    pub fn nu(node: Node, body: Constituent) -> Self {
        Constituent::Nu(node, Box::new(body))
    }

    /// Left-nested parallel composition of `parts`, `Nil` when empty.
    pub fn par_all(parts: impl IntoIterator<Item = Constituent>) -> Self {
        parts.into_iter().reduce(Constituent::par).unwrap_or(Constituent::Nil)
    }

    /// Restricts `nodes` around `body`, the first node outermost.
    pub fn nu_all(nodes: &[Node], body: Constituent) -> Self {
        nodes.iter().rev().fold(body, |acc, n| Constituent::nu(n.clone(), acc))
    }

    pub fn free_nodes(&self) -> BTreeSet<Node> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Node>) {
        match self {
            Constituent::Edge(e) => {
                for a in &e.args {
                    if !bound.contains(&a.name.as_str()) {
                        out.insert(a.clone());
                    }
                }
            }
            Constituent::Nil => {}
            Constituent::Par(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Constituent::Nu(n, body) => {
                bound.push(&n.name);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Restricted nodes in binder (pre-)order.
    pub fn bound_nodes(&self) -> Vec<Node> {
        let mut out = Vec::new();
        self.visit(&mut |c| {
            if let Constituent::Nu(n, _) = c {
                out.push(n.clone());
            }
        });
        out
    }

    /// Edge components, left to right.
    pub fn edges(&self) -> Vec<&EdgeComp> {
        let mut out = Vec::new();
        fn go<'a>(c: &'a Constituent, out: &mut Vec<&'a EdgeComp>) {
            match c {
                Constituent::Edge(e) => out.push(e),
                Constituent::Nil => {}
                Constituent::Par(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                Constituent::Nu(_, b) => go(b, out),
            }
        }
        go(self, &mut out);
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Constituent)) {
        f(self);
        match self {
            Constituent::Par(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Constituent::Nu(_, b) => b.visit(f),
            Constituent::Edge(_) | Constituent::Nil => {}
        }
    }

    /// Renames free occurrences according to `map`, stopping under binders
    /// of the same name. Callers guarantee no capture.
    pub(crate) fn rename_free(&self, map: &BTreeMap<String, Node>) -> Constituent {
        match self {
            Constituent::Edge(e) => Constituent::Edge(EdgeComp {
                id: e.id,
                label: e.label.clone(),
                args: e
                    .args
                    .iter()
                    .map(|a| map.get(&a.name).cloned().unwrap_or_else(|| a.clone()))
                    .collect(),
            }),
            Constituent::Nil => Constituent::Nil,
            Constituent::Par(l, r) => Constituent::par(l.rename_free(map), r.rename_free(map)),
            Constituent::Nu(n, b) => {
                if map.contains_key(&n.name) {
                    let mut inner = map.clone();
                    inner.remove(&n.name);
                    Constituent::nu(n.clone(), b.rename_free(&inner))
                } else {
                    Constituent::nu(n.clone(), b.rename_free(map))
                }
            }
        }
    }

    /// Every node name occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| match c {
            Constituent::Edge(e) => out.extend(e.args.iter().map(|a| a.name.clone())),
            Constituent::Nu(n, _) => {
                out.insert(n.name.clone());
            }
            _ => {}
        });
        out
    }

    pub fn max_edge_id(&self) -> Option<EdgeId> {
        self.edges().iter().map(|e| e.id).max()
    }
}

/// Picks `base`, or `base'`, `base''`, … until the name is not in `taken`.
pub(crate) fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Re-establishes the Barendregt convention: every binder gets a name that
/// differs from all free names and from every other binder.
fn rename_apart(body: &Constituent, taken: &mut BTreeSet<String>) -> Constituent {
    fn go(c: &Constituent, env: &mut Vec<(String, Node)>, taken: &mut BTreeSet<String>) -> Constituent {
        match c {
            Constituent::Edge(e) => Constituent::Edge(EdgeComp {
                id: e.id,
                label: e.label.clone(),
                args: e
                    .args
                    .iter()
                    .map(|a| {
                        env.iter()
                            .rev()
                            .find(|(old, _)| *old == a.name)
                            .map(|(_, new)| new.clone())
                            .unwrap_or_else(|| a.clone())
                    })
                    .collect(),
            }),
            Constituent::Nil => Constituent::Nil,
            Constituent::Par(l, r) => {
                let l = go(l, env, taken);
                let r = go(r, env, taken);
                Constituent::par(l, r)
            }
            Constituent::Nu(n, b) => {
                let name = if taken.contains(&n.name) {
                    fresh_name(&n.name, taken)
                } else {
                    n.name.clone()
                };
                taken.insert(name.clone());
                let node = Node::new(name, n.ty.clone());
                env.push((n.name.clone(), node.clone()));
                let b = go(b, env, taken);
                env.pop();
                Constituent::nu(node, b)
            }
        }
    }
    go(body, &mut Vec::new(), taken)
}

/// A graph expression `X ⊨ C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphExpression {
    interface: BTreeSet<Node>,
    body: Constituent,
}

impl GraphExpression {
    /// Validates `body` against `tg` and the interface, then renames bound
    /// nodes apart.
    pub fn new(
        tg: &TypeGraph,
        interface: impl IntoIterator<Item = Node>,
        body: Constituent,
    ) -> Result<Self, GraphError> {
        let e = Self::from_parts(interface, body)?;
        e.validate(tg)?;
        Ok(e)
    }

    pub fn closed(tg: &TypeGraph, body: Constituent) -> Result<Self, GraphError> {
        Self::new(tg, [], body)
    }

    pub fn empty() -> Self {
        GraphExpression {
            interface: BTreeSet::new(),
            body: Constituent::Nil,
        }
    }

    /// Structural checks only (no type graph): names used consistently,
    /// `fn(C) ⊆ X`, unique edge ids. Bound names are renamed apart.
    pub fn from_parts(interface: impl IntoIterator<Item = Node>, body: Constituent) -> Result<Self, GraphError> {
        let interface: BTreeSet<Node> = interface.into_iter().collect();
        let mut types: BTreeMap<&str, &str> = BTreeMap::new();
        for n in &interface {
            if types.insert(&n.name, &n.ty).is_some() {
                return Err(GraphError::NodeTypeConflict(n.name.clone()));
            }
        }
        let free = body.free_nodes();
        for n in &free {
            match types.get(n.name.as_str()) {
                Some(ty) if *ty == n.ty => {}
                Some(_) => return Err(GraphError::NodeTypeConflict(n.name.clone())),
                None => return Err(GraphError::NotInInterface(n.name.clone())),
            }
        }
        let mut taken: BTreeSet<String> = interface.iter().map(|n| n.name.clone()).collect();
        let body = rename_apart(&body, &mut taken);
        // A bound name shared by occurrences of different types is a conflict
        // too; after renaming apart each binder owns its occurrences.
        check_bound_types(&body)?;
        let mut ids = BTreeSet::new();
        for e in body.edges() {
            if !ids.insert(e.id) {
                return Err(GraphError::DuplicateEdgeId(e.id));
            }
        }
        Ok(GraphExpression { interface, body })
    }

    pub fn validate(&self, tg: &TypeGraph) -> Result<(), GraphError> {
        for n in self.interface.iter().chain(self.body.bound_nodes().iter()) {
            if !tg.has_node_type(&n.ty) {
                return Err(GraphError::UnknownNodeType(n.ty.clone()));
            }
        }
        for e in self.body.edges() {
            validate_edge(tg, e)?;
        }
        Ok(())
    }

    pub fn interface(&self) -> &BTreeSet<Node> {
        &self.interface
    }

    pub fn body(&self) -> &Constituent {
        &self.body
    }

    pub fn is_closed(&self) -> bool {
        self.interface.is_empty()
    }

    pub fn require_closed(&self) -> Result<(), GraphError> {
        if self.is_closed() {
            Ok(())
        } else {
            let names: Vec<String> = self.interface.iter().map(|n| n.to_string()).collect();
            Err(GraphError::NotClosed(names.join(", ")))
        }
    }

    /// `n(E)`: interface nodes followed by bound nodes in binder order.
    pub fn nodes(&self) -> Vec<Node> {
        self.interface.iter().cloned().chain(self.body.bound_nodes()).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.body.edges().len()
    }
}

fn check_bound_types(body: &Constituent) -> Result<(), GraphError> {
    fn go(c: &Constituent, env: &mut Vec<Node>) -> Result<(), GraphError> {
        match c {
            Constituent::Edge(e) => {
                for a in &e.args {
                    if let Some(b) = env.iter().rev().find(|b| b.name == a.name) {
                        if b.ty != a.ty {
                            return Err(GraphError::NodeTypeConflict(a.name.clone()));
                        }
                    }
                }
                Ok(())
            }
            Constituent::Nil => Ok(()),
            Constituent::Par(l, r) => {
                go(l, env)?;
                go(r, env)
            }
            Constituent::Nu(n, b) => {
                env.push(n.clone());
                let r = go(b, env);
                env.pop();
                r
            }
        }
    }
    go(body, &mut Vec::new())
}

pub(crate) fn validate_edge(tg: &TypeGraph, e: &EdgeComp) -> Result<(), GraphError> {
    let arity = tg
        .arity(&e.label)
        .ok_or_else(|| GraphError::UnknownEdgeType(e.label.clone()))?;
    if arity.len() != e.args.len() {
        return Err(GraphError::ArityMismatch {
            label: e.label.clone(),
            expected: arity.len(),
            found: e.args.len(),
        });
    }
    for (i, (want, arg)) in arity.iter().zip(&e.args).enumerate() {
        if *want != arg.ty {
            return Err(GraphError::ArgumentType {
                label: e.label.clone(),
                position: i,
                expected: want.clone(),
                found: arg.ty.clone(),
            });
        }
    }
    Ok(())
}

impl fmt::Display for Constituent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `nu` takes the nearest primary to its right, `||` is left-associative.
        fn go(c: &Constituent, f: &mut fmt::Formatter<'_>, operand: bool) -> fmt::Result {
            match c {
                Constituent::Edge(e) => write!(f, "{e}"),
                Constituent::Nil => f.write_str("Nil"),
                Constituent::Nu(n, b) => {
                    write!(f, "nu {n} . ")?;
                    go(b, f, true)
                }
                Constituent::Par(l, r) => {
                    if operand {
                        f.write_str("(")?;
                    }
                    go(l, f, false)?;
                    f.write_str(" || ")?;
                    go(r, f, true)?;
                    if operand {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, f, false)
    }
}

impl fmt::Display for GraphExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, n) in self.interface.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}} |= {}", self.body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tg() -> TypeGraph {
        let mut tg = TypeGraph::new();
        tg.add_node_type("A").unwrap();
        tg.add_edge_type("b", vec!["A".into(), "A".into()]).unwrap();
        tg
    }

    fn a(name: &str) -> Node {
        Node::new(name, "A")
    }

    #[test]
    fn type_graph_rejects_duplicates_and_unknown_types() {
        let mut tg = tg();
        assert_eq!(tg.add_node_type("A"), Err(GraphError::DuplicateNodeType("A".into())));
        assert_eq!(
            tg.add_edge_type("c", vec!["B".into()]),
            Err(GraphError::UnknownNodeType("B".into()))
        );
    }

    #[test]
    fn arity_is_checked() {
        let body = Constituent::edge(0, "b", vec![a("x")]);
        let err = GraphExpression::new(&tg(), [a("x")], body).unwrap_err();
        assert!(matches!(err, GraphError::ArityMismatch { .. }));
    }

    #[test]
    fn free_nodes_must_be_in_interface() {
        let body = Constituent::edge(0, "b", vec![a("x"), a("y")]);
        let err = GraphExpression::new(&tg(), [a("x")], body).unwrap_err();
        assert_eq!(err, GraphError::NotInInterface("y".into()));
    }

    #[test]
    fn bound_names_are_renamed_apart() {
        // {x} ⊨ (ν x. b(x,x)) ∥ ν x. Nil
        let body = Constituent::par(
            Constituent::nu(a("x"), Constituent::edge(0, "b", vec![a("x"), a("x")])),
            Constituent::nu(a("x"), Constituent::Nil),
        );
        let e = GraphExpression::new(&tg(), [a("x")], body).unwrap();
        let bound: Vec<String> = e.body().bound_nodes().into_iter().map(|n| n.name).collect();
        assert_eq!(bound, vec!["x'", "x''"]);
        assert_eq!(e.body().edges()[0].args, vec![a("x'"), a("x'")]);
    }

    #[test]
    fn duplicate_edge_ids_rejected() {
        let body = Constituent::par(
            Constituent::edge(3, "b", vec![a("x"), a("x")]),
            Constituent::edge(3, "b", vec![a("x"), a("x")]),
        );
        assert_eq!(
            GraphExpression::new(&tg(), [a("x")], body).unwrap_err(),
            GraphError::DuplicateEdgeId(EdgeId(3))
        );
    }

    #[test]
    fn display_parenthesises_par_under_nu() {
        let body = Constituent::nu(
            a("z"),
            Constituent::par(Constituent::edge(0, "b", vec![a("z"), a("x")]), Constituent::Nil),
        );
        assert_eq!(body.to_string(), "nu z:A . (b(z,x) || Nil)");
    }
}
