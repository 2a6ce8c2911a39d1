use std::collections::{BTreeMap, BTreeSet};

use super::{residual_of, DpoError, Match, RuleExpr};
use crate::graph::{normalize, EdgeComp, EdgeId, GraphExpression, Node, NormalGraph};

struct Matcher<'a> {
    rule: &'a RuleExpr,
    graph: &'a NormalGraph,
    lhs_edges: Vec<&'a EdgeComp>,
    vars: BTreeSet<&'a str>,
    isolated: Vec<Node>,
    /// Left-hand name ↦ graph node.
    assign: BTreeMap<String, Node>,
    edge_map: BTreeMap<EdgeId, EdgeId>,
    used_edges: BTreeSet<EdgeId>,
    out: Vec<Match>,
}

impl Matcher<'_> {
    fn is_var(&self, name: &str) -> bool {
        self.vars.contains(name)
    }

    fn deleted(&self) -> BTreeSet<&str> {
        self.assign
            .iter()
            .filter(|(k, _)| !self.is_var(k))
            .map(|(_, v)| v.name.as_str())
            .collect()
    }

    fn preserved(&self) -> BTreeSet<&str> {
        self.assign
            .iter()
            .filter(|(k, _)| self.is_var(k))
            .map(|(_, v)| v.name.as_str())
            .collect()
    }

    /// Binds `from` to `to` respecting injectivity on deleted nodes and the
    /// disjointness of deleted and preserved images. Returns whether a new
    /// binding was made.
    fn bind(&mut self, from: &Node, to: &Node) -> Option<bool> {
        if let Some(cur) = self.assign.get(&from.name) {
            return (cur == to).then_some(false);
        }
        if from.ty != to.ty {
            return None;
        }
        let from = from.name.as_str();
        if self.deleted().contains(to.name.as_str()) {
            return None;
        }
        if !self.is_var(from) && self.preserved().contains(to.name.as_str()) {
            return None;
        }
        self.assign.insert(from.to_string(), to.clone());
        Some(true)
    }

    fn edges(&mut self, k: usize) {
        if k == self.lhs_edges.len() {
            self.free_vars();
            return;
        }
        let l = self.lhs_edges[k];
        let graph = self.graph;
        for g in &graph.components {
            if self.used_edges.contains(&g.id) || g.label != l.label || g.args.len() != l.args.len() {
                continue;
            }
            let mut added = Vec::new();
            let mut ok = true;
            for (la, ga) in l.args.iter().zip(&g.args) {
                match self.bind(la, ga) {
                    Some(true) => added.push(la.name.clone()),
                    Some(false) => {}
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.used_edges.insert(g.id);
                self.edge_map.insert(l.id, g.id);
                self.edges(k + 1);
                self.edge_map.remove(&l.id);
                self.used_edges.remove(&g.id);
            }
            for a in added {
                self.assign.remove(&a);
            }
        }
    }

    fn next_pending(&self) -> Option<Node> {
        self.rule
            .iface_vars()
            .iter()
            .chain(self.isolated.iter())
            .find(|n| !self.assign.contains_key(&n.name))
            .cloned()
    }

    /// Interface variables not fixed by an edge, then isolated deleted nodes.
    fn free_vars(&mut self) {
        let Some(next) = self.next_pending() else {
            self.finish();
            return;
        };
        let graph = self.graph;
        for n in &graph.prefix {
            if self.bind(&next, n) == Some(true) {
                self.free_vars();
                self.assign.remove(&next.name);
            }
        }
    }

    fn finish(&mut self) {
        let deleted = self.deleted();
        let dangling = self
            .graph
            .components
            .iter()
            .any(|e| !self.used_edges.contains(&e.id) && e.args.iter().any(|a| deleted.contains(a.name.as_str())));
        if dangling {
            return;
        }
        let mut d = BTreeMap::new();
        let mut bound_map = BTreeMap::new();
        for (k, v) in &self.assign {
            if self.is_var(k) {
                d.insert(k.clone(), v.clone());
            } else {
                bound_map.insert(k.clone(), v.clone());
            }
        }
        let residual = residual_of(self.graph, &bound_map, &self.edge_map);
        self.out.push(Match {
            rule: self.rule.name().to_string(),
            d,
            bound_map,
            edge_map: self.edge_map.clone(),
            residual,
        });
    }
}

/// Every match of `rule` in the closed graph `g`: left-hand edges are tried
/// in id order against the graph's edges in normal-form order, then the
/// remaining variables and isolated deleted nodes over the node prefix.
pub fn find_matches(g: &GraphExpression, rule: &RuleExpr) -> Result<Vec<Match>, DpoError> {
    g.require_closed()?;
    let graph = normalize(g);
    let mut lhs_edges = rule.lhs().body().edges();
    lhs_edges.sort_by_key(|e| e.id);
    let connected: BTreeSet<&str> = lhs_edges
        .iter()
        .flat_map(|e| e.args.iter().map(|a| a.name.as_str()))
        .collect();
    let isolated: Vec<Node> = rule
        .lhs()
        .body()
        .bound_nodes()
        .into_iter()
        .filter(|n| !connected.contains(n.name.as_str()))
        .collect();
    let mut m = Matcher {
        rule,
        graph: &graph,
        lhs_edges,
        vars: rule.iface_vars().iter().map(|v| v.name.as_str()).collect(),
        isolated,
        assign: BTreeMap::new(),
        edge_map: BTreeMap::new(),
        used_edges: BTreeSet::new(),
        out: Vec::new(),
    };
    m.edges(0);
    Ok(m.out)
}
