//! Translation of graph expressions into linear-logic derivations, the
//! inverse decoding, and proof certificates for rewrite steps and traces.

mod certify;
mod decode;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::dpo::{DpoError, RuleExpr};
use crate::graph::{Constituent, EdgeComp, GraphError, GraphExpression, Node};
use crate::logic::{fresh_var, Context, Formula, KernelError, ProofTerm, SearchError, Sequent};

pub use certify::{
    certify_step, certify_trace, constraint_violation, encode_gts, heating_implication, Certificate, GtsEncoding,
    InitialForm, RuleStyle,
};
pub use decode::{decode, formula_equiv, formula_to_expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("not a graph formula: {0}")]
    NotGraphFormula(String),
    #[error("formula and context disagree: {0}")]
    ContextMismatch(String),
    #[error("certificate rejected by the kernel: {0}")]
    Kernel(KernelError),
    #[error("inconsistent certificate construction: {0}")]
    Inconsistent(String),
    #[error("rule `{rule}` is applied {needed} times but only {available} instances are provided")]
    UnderProvisioned {
        rule: String,
        needed: usize,
        available: usize,
    },
    #[error("{unused} instance(s) of rule `{rule}` would be left unused")]
    UnusedInstances { rule: String, unused: usize },
    #[error(transparent)]
    Dpo(#[from] DpoError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// The individual variable standing for node `n`.
pub fn individual_var(n: &str) -> String {
    format!("x_{n}")
}

/// The linear reference variable for node `n`.
pub fn reference_var(n: &str) -> String {
    format!("n_{n}")
}

/// The linear variable for an edge component.
pub fn edge_var(e: &EdgeComp) -> String {
    format!("c_{}", e.id.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivRule {
    Id,
    NId,
    OneI,
    TensorI,
    DynExI,
}

impl DerivRule {
    pub fn name(self) -> &'static str {
        match self {
            DerivRule::Id => "Id",
            DerivRule::NId => "NId",
            DerivRule::OneI => "1I",
            DerivRule::TensorI => "⊗I",
            DerivRule::DynExI => "∃̂I",
        }
    }
}

/// One rule instance of a graph derivation, concluding
/// `Γ; delta ⊢ term :: ty`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivNode {
    pub rule: DerivRule,
    pub term: ProofTerm,
    pub ty: Formula,
    pub delta: Vec<(String, Formula)>,
    /// For `∃̂I`, the freshness side premise as an equation discharged by
    /// `nil_eq` in `Γ; ·`.
    pub side: Option<Formula>,
    pub premises: Vec<DerivNode>,
}

/// A derivation built from axioms and `1I`, `⊗I`, `∃̂I` only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDerivation {
    pub gamma: Vec<(String, Formula)>,
    pub root: DerivNode,
}

impl GraphDerivation {
    pub fn main_type(&self) -> &Formula {
        &self.root.ty
    }

    pub fn main_term(&self) -> &ProofTerm {
        &self.root.term
    }

    pub fn linear_context(&self) -> &[(String, Formula)] {
        &self.root.delta
    }

    pub fn context(&self) -> Context {
        Context {
            gamma: self.gamma.clone(),
            delta: self.root.delta.clone(),
        }
    }

    pub fn sequent(&self) -> Sequent {
        Sequent {
            ctx: self.context(),
            term: self.root.term.clone(),
            ty: self.root.ty.clone(),
        }
    }

    pub fn size(&self) -> usize {
        fn go(n: &DerivNode) -> usize {
            1 + n.premises.iter().map(go).sum::<usize>()
        }
        go(&self.root)
    }
}

/// Where the pieces of a graph come from when it is rebuilt as a term.
pub(crate) trait Resources {
    fn individual(&self, n: &Node) -> Result<String, EncodeError>;
    fn reference(&mut self, n: &Node) -> Result<String, EncodeError>;
    fn edge(&mut self, e: &EdgeComp, ty: &Formula) -> Result<String, EncodeError>;
}

/// The naming used by the translation itself.
struct Standard;

impl Resources for Standard {
    fn individual(&self, n: &Node) -> Result<String, EncodeError> {
        Ok(individual_var(&n.name))
    }
    fn reference(&mut self, n: &Node) -> Result<String, EncodeError> {
        Ok(reference_var(&n.name))
    }
    fn edge(&mut self, e: &EdgeComp, _: &Formula) -> Result<String, EncodeError> {
        Ok(edge_var(e))
    }
}

/// Rule sides: nodes are their own variables and nothing is referenced.
struct RuleSide;

impl Resources for RuleSide {
    fn individual(&self, n: &Node) -> Result<String, EncodeError> {
        Ok(n.name.clone())
    }
    fn reference(&mut self, n: &Node) -> Result<String, EncodeError> {
        Ok(reference_var(&n.name))
    }
    fn edge(&mut self, e: &EdgeComp, _: &Formula) -> Result<String, EncodeError> {
        Ok(edge_var(e))
    }
}

fn leaf(rule: DerivRule, term: ProofTerm, ty: Formula, delta: Vec<(String, Formula)>) -> DerivNode {
    DerivNode {
        rule,
        term,
        ty,
        delta,
        side: None,
        premises: Vec::new(),
    }
}

fn tensor_node(a: DerivNode, b: DerivNode) -> DerivNode {
    let mut delta = a.delta.clone();
    delta.extend(b.delta.iter().cloned());
    DerivNode {
        rule: DerivRule::TensorI,
        term: ProofTerm::tensor(a.term.clone(), b.term.clone()),
        ty: Formula::tensor(a.ty.clone(), b.ty.clone()),
        delta,
        side: None,
        premises: vec![a, b],
    }
}

pub(crate) fn derive_constituent(c: &Constituent, res: &mut dyn Resources) -> Result<DerivNode, EncodeError> {
    match c {
        Constituent::Edge(e) => {
            let args = e
                .args
                .iter()
                .map(|a| res.individual(a))
                .collect::<Result<Vec<_>, _>>()?;
            let ty = Formula::Pred(e.label.clone(), args);
            let var = res.edge(e, &ty)?;
            Ok(leaf(
                DerivRule::Id,
                ProofTerm::var(var.clone()),
                ty.clone(),
                vec![(var, ty)],
            ))
        }
        Constituent::Nil => Ok(leaf(DerivRule::OneI, ProofTerm::Nil, Formula::One, Vec::new())),
        Constituent::Par(a, b) => {
            let a = derive_constituent(a, res)?;
            let b = derive_constituent(b, res)?;
            Ok(tensor_node(a, b))
        }
        Constituent::Nu(n, body) => {
            let x = res.individual(n)?;
            let r = res.reference(n)?;
            let inner = derive_constituent(body, res)?;
            let free = inner.ty.free_vars();
            let binder = if x != n.name && free.contains(&n.name) {
                fresh_var(&n.name, &inner.ty.all_vars())
            } else {
                n.name.clone()
            };
            let alpha = inner.ty.subst(&x, &binder);
            let ty = Formula::dynex(binder.clone(), n.ty.clone(), alpha.clone());
            let refty = Formula::refto(n.ty.clone(), x.clone());
            let nid = leaf(
                DerivRule::NId,
                ProofTerm::var(r.clone()),
                refty.clone(),
                vec![(r.clone(), refty.clone())],
            );
            let side = Formula::eq(alpha.subst(&binder, &x).subst(&x, &binder), alpha);
            let mut delta = vec![(r.clone(), refty)];
            delta.extend(inner.delta.iter().cloned());
            Ok(DerivNode {
                rule: DerivRule::DynExI,
                term: ProofTerm::eps(r, x, inner.term.clone()),
                ty,
                delta,
                side: Some(side),
                premises: vec![inner, nid],
            })
        }
    }
}

/// `⟦X ⊨ C⟧`: the interface references tensored to the left of the
/// constituent, or the constituent alone for a closed expression.
pub(crate) fn derive_expression(
    iface: &BTreeSet<Node>,
    body: &Constituent,
    res: &mut dyn Resources,
) -> Result<DerivNode, EncodeError> {
    let c = derive_constituent(body, res)?;
    let mut refs = Vec::new();
    for n in iface {
        let x = res.individual(n)?;
        let r = res.reference(n)?;
        let ty = Formula::refto(n.ty.clone(), x);
        refs.push(leaf(
            DerivRule::NId,
            ProofTerm::var(r.clone()),
            ty.clone(),
            vec![(r, ty)],
        ));
    }
    let Some(mut acc) = refs.pop() else {
        return Ok(c);
    };
    while let Some(r) = refs.pop() {
        acc = tensor_node(r, acc);
    }
    Ok(tensor_node(acc, c))
}

/// `⟦E⟧`: individual variable `x_n` in `Γ` for every node, reference
/// `n_n :: A ↓↦ x_n` and edge resources `c_i :: L(…)` in `Δ`.
pub fn encode_expr(e: &GraphExpression) -> GraphDerivation {
    let root = derive_expression(e.interface(), e.body(), &mut Standard).expect("standard naming never fails");
    let gamma = e
        .nodes()
        .iter()
        .map(|n| (individual_var(&n.name), Formula::Atom(n.ty.clone())))
        .collect();
    GraphDerivation { gamma, root }
}

/// `⟦E⟧^T`
pub fn encode_type(e: &GraphExpression) -> Formula {
    encode_expr(e).root.ty
}

/// A ground component of a graph expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundComponent {
    Node(Node),
    Edge(EdgeComp),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextEntry {
    pub var: String,
    pub ty: Formula,
    pub component: GroundComponent,
}

/// `⟦E⟧^C` together with the ground component each entry stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphContext {
    pub gamma: Vec<(String, Formula)>,
    pub entries: Vec<ContextEntry>,
}

impl GraphContext {
    pub fn delta(&self) -> Vec<(String, Formula)> {
        self.entries.iter().map(|e| (e.var.clone(), e.ty.clone())).collect()
    }

    pub fn context(&self) -> Context {
        Context {
            gamma: self.gamma.clone(),
            delta: self.delta(),
        }
    }
}

/// Nodes first (interface, then restricted in binder order), then edges
/// left to right.
pub fn encode_context(e: &GraphExpression) -> GraphContext {
    let mut entries = Vec::new();
    for n in e.nodes() {
        entries.push(ContextEntry {
            var: reference_var(&n.name),
            ty: Formula::refto(n.ty.clone(), individual_var(&n.name)),
            component: GroundComponent::Node(n),
        });
    }
    for edge in e.body().edges() {
        entries.push(ContextEntry {
            var: edge_var(edge),
            ty: Formula::Pred(
                edge.label.clone(),
                edge.args.iter().map(|a| individual_var(&a.name)).collect(),
            ),
            component: GroundComponent::Edge(edge.clone()),
        });
    }
    GraphContext {
        gamma: encode_expr(e).gamma,
        entries,
    }
}

/// `⟦L⟧^T` for a rule side: interface nodes are free variables named as
/// in the rule and carry no reference.
pub fn encode_rule_side(side: &GraphExpression) -> Formula {
    derive_constituent(side.body(), &mut RuleSide)
        .expect("rule-side naming never fails")
        .ty
}

/// `∀x̄:Ā. ⟦L⟧^T ⊸ ⟦R⟧^T`
pub fn encode_rule(r: &RuleExpr) -> Formula {
    let binders: Vec<(String, String)> = r.iface_vars().iter().map(|v| (v.name.clone(), v.ty.clone())).collect();
    Formula::forall_all(
        &binders,
        Formula::lolli(encode_rule_side(r.lhs()), encode_rule_side(r.rhs())),
    )
}

/// Strips `n` leading universals of `f`, instantiating them with `args`.
pub(crate) fn instantiate(f: &Formula, args: &[String]) -> Result<Formula, EncodeError> {
    let mut f = f.clone();
    for a in args {
        f = match f {
            Formula::Forall(x, _, body) => body.subst(&x, a),
            other => {
                return Err(EncodeError::Inconsistent(format!(
                    "`{other}` has fewer universals than the rule interface"
                )))
            }
        };
    }
    Ok(f)
}
