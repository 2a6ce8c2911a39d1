use std::collections::{BTreeMap, BTreeSet};

use super::{residual_of, verify_dpo_conditions, DpoError, Match, RuleExpr};
use crate::graph::{normalize, Constituent, EdgeComp, EdgeId, GraphExpression, Node};

/// The result of a rewrite step together with where the right-hand side's
/// own nodes and edges ended up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Application {
    pub result: GraphExpression,
    /// Bound node of the right-hand side ↦ the fresh node created for it.
    pub created_nodes: BTreeMap<String, Node>,
    /// Right-hand edge id ↦ the id it carries in the result.
    pub created_edges: BTreeMap<EdgeId, EdgeId>,
}

fn fresh(base: &str, taken: &mut BTreeSet<String>) -> String {
    let stem = base.trim_end_matches('\'');
    let mut name = stem.to_string();
    let mut k = 1;
    while taken.contains(&name) {
        name = format!("{stem}{k}");
        k += 1;
    }
    taken.insert(name.clone());
    name
}

/// Builds `H ≡ ν n̄. C ∥ R[d]`: the residual context of the match in parallel
/// with the instantiated right-hand side, whose restricted nodes and edges
/// get names and ids not used in `g`.
pub fn apply_detailed(g: &GraphExpression, rule: &RuleExpr, m: &Match) -> Result<Application, DpoError> {
    if m.rule != rule.name() {
        return Err(DpoError::StaleMatch(format!(
            "match is for rule `{}`, not `{}`",
            m.rule,
            rule.name()
        )));
    }
    let report = verify_dpo_conditions(g, rule, m);
    if let Some(fail) = report.failures().next() {
        return Err(DpoError::StaleMatch(format!(
            "{} violated{}",
            fail.condition,
            fail.detail.as_ref().map(|d| format!(": {d}")).unwrap_or_default()
        )));
    }

    let mut taken: BTreeSet<String> = g.body().all_names();
    let mut next_id = g.body().max_edge_id().map_or(0, |e| e.0 + 1);
    let mut created_nodes = BTreeMap::new();
    let mut created_edges = BTreeMap::new();

    fn instantiate(
        c: &Constituent,
        env: &BTreeMap<String, Node>,
        taken: &mut BTreeSet<String>,
        next_id: &mut u32,
        nodes: &mut BTreeMap<String, Node>,
        edges: &mut BTreeMap<EdgeId, EdgeId>,
    ) -> Constituent {
        match c {
            Constituent::Edge(e) => {
                let id = EdgeId(*next_id);
                *next_id += 1;
                edges.insert(e.id, id);
                Constituent::Edge(EdgeComp {
                    id,
                    label: e.label.clone(),
                    args: e
                        .args
                        .iter()
                        .map(|a| env.get(&a.name).cloned().unwrap_or_else(|| a.clone()))
                        .collect(),
                })
            }
            Constituent::Nil => Constituent::Nil,
            Constituent::Par(l, r) => {
                let l = instantiate(l, env, taken, next_id, nodes, edges);
                let r = instantiate(r, env, taken, next_id, nodes, edges);
                Constituent::par(l, r)
            }
            Constituent::Nu(n, body) => {
                let node = Node::new(fresh(&n.name, taken), n.ty.clone());
                nodes.insert(n.name.clone(), node.clone());
                let mut inner = env.clone();
                inner.insert(n.name.clone(), node.clone());
                let body = instantiate(body, &inner, taken, next_id, nodes, edges);
                Constituent::nu(node, body)
            }
        }
    }

    let rhs = instantiate(
        rule.rhs().body(),
        &m.d,
        &mut taken,
        &mut next_id,
        &mut created_nodes,
        &mut created_edges,
    );
    // Recomputed rather than trusted: the match may have been built by hand.
    let residual = residual_of(&normalize(g), &m.bound_map, &m.edge_map);
    let context = Constituent::par_all(residual.components.iter().cloned().map(Constituent::Edge));
    let body = match (&context, &rhs) {
        (Constituent::Nil, _) => rhs,
        (_, Constituent::Nil) => context,
        _ => Constituent::par(context, rhs),
    };
    let body = Constituent::nu_all(&residual.prefix, body);
    let result = GraphExpression::from_parts([], body)?;
    Ok(Application {
        result,
        created_nodes,
        created_edges,
    })
}

pub fn apply(g: &GraphExpression, rule: &RuleExpr, m: &Match) -> Result<GraphExpression, DpoError> {
    apply_detailed(g, rule, m).map(|a| a.result)
}
