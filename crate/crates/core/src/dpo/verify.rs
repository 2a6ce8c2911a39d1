use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{Match, RuleExpr};
use crate::graph::{normalize, EdgeComp, EdgeId, GraphExpression, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Every variable, deleted node and left-hand edge is mapped into the graph.
    Totality,
    /// Images have the type of their source.
    TypePreservation,
    /// Every left-hand edge is sent to an edge with the image arguments.
    StructurePreservation,
    NodeInjectivity,
    EdgeInjectivity,
    /// Deleted and preserved images do not overlap.
    Disjointness,
    Dangling,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Totality => "totality",
            Condition::TypePreservation => "type preservation",
            Condition::StructurePreservation => "structure preservation",
            Condition::NodeInjectivity => "node injectivity",
            Condition::EdgeInjectivity => "edge injectivity",
            Condition::Disjointness => "identification (disjointness)",
            Condition::Dangling => "dangling",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpoReport {
    pub checks: Vec<ConditionCheck>,
}

impl DpoReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self, condition: Condition) -> bool {
        self.checks
            .iter()
            .filter(|c| c.condition == condition)
            .all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for DpoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{}: {}", c.condition, if c.passed { "ok" } else { "FAILED" })?;
            if let Some(d) = &c.detail {
                write!(f, " ({d})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn check(condition: Condition, failure: Option<String>) -> ConditionCheck {
    ConditionCheck {
        condition,
        passed: failure.is_none(),
        detail: failure,
    }
}

/// Re-checks a candidate match from scratch, condition by condition. Works on
/// arbitrary (possibly invalid) candidates and never fails itself.
pub fn verify_dpo_conditions(g: &GraphExpression, rule: &RuleExpr, m: &Match) -> DpoReport {
    let graph = normalize(g);
    let g_nodes: BTreeSet<&Node> = graph.prefix.iter().chain(graph.interface.iter()).collect();
    let g_edges: BTreeMap<EdgeId, &EdgeComp> = graph.components.iter().map(|e| (e.id, e)).collect();
    let lhs_edges = rule.lhs().body().edges();
    let lhs_bound = rule.lhs().body().bound_nodes();

    let mut totality = None;
    let var_names: BTreeSet<&str> = rule.iface_vars().iter().map(|v| v.name.as_str()).collect();
    let d_names: BTreeSet<&str> = m.d.keys().map(String::as_str).collect();
    if var_names != d_names {
        totality = Some("d is not defined exactly on the interface variables".to_string());
    }
    let bound_names: BTreeSet<&str> = lhs_bound.iter().map(|n| n.name.as_str()).collect();
    let mv_names: BTreeSet<&str> = m.bound_map.keys().map(String::as_str).collect();
    if totality.is_none() && bound_names != mv_names {
        totality = Some("m_v is not defined exactly on the deleted nodes".to_string());
    }
    let lhs_ids: BTreeSet<EdgeId> = lhs_edges.iter().map(|e| e.id).collect();
    let me_ids: BTreeSet<EdgeId> = m.edge_map.keys().copied().collect();
    if totality.is_none() && lhs_ids != me_ids {
        totality = Some("m_e is not defined exactly on the left-hand edges".to_string());
    }
    if totality.is_none() {
        if let Some(n) = m.d.values().chain(m.bound_map.values()).find(|n| !g_nodes.contains(n)) {
            totality = Some(format!("{n} is not a node of the graph"));
        }
    }
    if totality.is_none() {
        if let Some(id) = m.edge_map.values().find(|id| !g_edges.contains_key(id)) {
            totality = Some(format!("{id} is not an edge of the graph"));
        }
    }

    let mut types = None;
    for v in rule.iface_vars().iter().chain(lhs_bound.iter()) {
        if let Some(img) = m.d.get(&v.name).or_else(|| m.bound_map.get(&v.name)) {
            if img.ty != v.ty {
                types = Some(format!("{} sent to {img}", v));
                break;
            }
        }
    }
    if types.is_none() {
        for l in &lhs_edges {
            if let Some(g) = m.edge_map.get(&l.id).and_then(|id| g_edges.get(id)) {
                if g.label != l.label {
                    types = Some(format!("{} sent to {}", l, g));
                    break;
                }
            }
        }
    }

    let mut structure = None;
    for l in &lhs_edges {
        let Some(g) = m.edge_map.get(&l.id).and_then(|id| g_edges.get(id)) else {
            continue;
        };
        let images: Option<Vec<&Node>> = l
            .args
            .iter()
            .map(|a| m.d.get(&a.name).or_else(|| m.bound_map.get(&a.name)))
            .collect();
        let matches =
            images.is_some_and(|imgs| imgs.len() == g.args.len() && imgs.iter().zip(&g.args).all(|(i, a)| *i == a));
        if !matches {
            structure = Some(format!("{l} ({}) is not sent along its arguments to {g}", l.id));
            break;
        }
    }

    let mut node_inj = None;
    let mut seen: BTreeMap<&Node, &str> = BTreeMap::new();
    for (k, v) in &m.bound_map {
        if let Some(prev) = seen.insert(v, k) {
            node_inj = Some(format!("{prev} and {k} both sent to {}", v.name));
            break;
        }
    }

    let mut edge_inj = None;
    let mut seen: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for (k, v) in &m.edge_map {
        if let Some(prev) = seen.insert(*v, *k) {
            edge_inj = Some(format!("{prev} and {k} both sent to {v}"));
            break;
        }
    }

    let preserved: BTreeSet<&Node> = m.d.values().collect();
    let deleted: BTreeSet<&Node> = m.bound_map.values().collect();
    let disjoint = preserved
        .intersection(&deleted)
        .next()
        .map(|n| format!("{} is both preserved and deleted", n.name));

    let consumed: BTreeSet<EdgeId> = m.edge_map.values().copied().collect();
    let dangling = graph
        .components
        .iter()
        .find(|e| !consumed.contains(&e.id) && e.args.iter().any(|a| deleted.contains(a)))
        .map(|e| format!("{e} ({}) would dangle", e.id));

    DpoReport {
        checks: vec![
            check(Condition::Totality, totality),
            check(Condition::TypePreservation, types),
            check(Condition::StructurePreservation, structure),
            check(Condition::NodeInjectivity, node_inj),
            check(Condition::EdgeInjectivity, edge_inj),
            check(Condition::Disjointness, disjoint),
            check(Condition::Dangling, dangling),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpo::residual_of;
    use crate::graph::{Constituent, TypeGraph};

    fn tg() -> TypeGraph {
        let mut tg = TypeGraph::new();
        tg.add_node_type("A").unwrap();
        tg.add_edge_type("b", vec!["A".into(), "A".into()]).unwrap();
        tg
    }

    fn a(name: &str) -> Node {
        Node::new(name, "A")
    }

    fn forced(g: &GraphExpression, rule: &str, bound: &[(&str, &str)]) -> Match {
        let bound_map: BTreeMap<String, Node> = bound.iter().map(|(k, v)| (k.to_string(), a(v))).collect();
        Match {
            rule: rule.into(),
            d: BTreeMap::new(),
            residual: residual_of(&normalize(g), &bound_map, &BTreeMap::new()),
            bound_map,
            edge_map: BTreeMap::new(),
        }
    }

    #[test]
    fn non_injective_deletion_reported() {
        let g = GraphExpression::closed(&tg(), Constituent::nu(a("m"), Constituent::Nil)).unwrap();
        let r = RuleExpr::new(
            &tg(),
            "del2",
            vec![],
            Constituent::nu_all(&[a("n1"), a("n2")], Constituent::Nil),
            Constituent::Nil,
        )
        .unwrap();
        let report = verify_dpo_conditions(&g, &r, &forced(&g, "del2", &[("n1", "m"), ("n2", "m")]));
        assert!(!report.passed(Condition::NodeInjectivity));
        assert!(report.passed(Condition::Dangling));
    }

    #[test]
    fn forced_dangling_reported() {
        let g = GraphExpression::closed(
            &tg(),
            Constituent::nu_all(&[a("m"), a("k")], Constituent::edge(0, "b", vec![a("m"), a("k")])),
        )
        .unwrap();
        let q = RuleExpr::new(
            &tg(),
            "q",
            vec![],
            Constituent::nu(a("n"), Constituent::Nil),
            Constituent::Nil,
        )
        .unwrap();
        let report = verify_dpo_conditions(&g, &q, &forced(&g, "q", &[("n", "m")]));
        assert!(!report.passed(Condition::Dangling));
        assert_eq!(report.failures().count(), 1);
    }
}
