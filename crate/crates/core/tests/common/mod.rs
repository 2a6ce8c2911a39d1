//! Seeded generators and brute-force oracles shared by the integration
//! tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use gts_core::dpo::{verify_dpo_conditions, Gts, Match, RuleExpr};
use gts_core::graph::{normalize, Constituent, EdgeId, GraphExpression, Node, TypeGraph};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Node types `A`, `B`; edge types `b(A,A)`, `c(A,B)`, `d(B)`.
pub fn type_graph() -> TypeGraph {
    let mut tg = TypeGraph::new();
    tg.add_node_type("A").unwrap();
    tg.add_node_type("B").unwrap();
    tg.add_edge_type("b", vec!["A".into(), "A".into()]).unwrap();
    tg.add_edge_type("c", vec!["A".into(), "B".into()]).unwrap();
    tg.add_edge_type("d", vec!["B".into()]).unwrap();
    tg
}

/// The running example's system: one rule adding a `b` edge between any
/// two nodes, starting from three nodes and one edge.
pub fn example_gts() -> Gts {
    let mut tg = TypeGraph::new();
    tg.add_node_type("A").unwrap();
    tg.add_edge_type("b", vec!["A".into(), "A".into()]).unwrap();
    let a = |n: &str| Node::new(n, "A");
    let p = RuleExpr::new(
        &tg,
        "p",
        vec![a("x1"), a("x2")],
        Constituent::Nil,
        Constituent::edge(0, "b", vec![a("x1"), a("x2")]),
    )
    .unwrap();
    let g0 = GraphExpression::closed(
        &tg,
        Constituent::nu_all(
            &[a("x"), a("y"), a("z")],
            Constituent::edge(0, "b", vec![a("z"), a("x")]),
        ),
    )
    .unwrap();
    Gts::new(tg, [p], g0).unwrap()
}

fn arity(label: &str) -> &'static [&'static str] {
    match label {
        "b" => &["A", "A"],
        "c" => &["A", "B"],
        _ => &["B"],
    }
}

/// Random edges over `nodes`, using only the first `kinds` edge types.
/// Edge types whose argument types are unavailable are skipped.
fn random_edges(rng: &mut ChaCha8Rng, nodes: &[Node], count: usize, kinds: usize) -> Vec<(String, Vec<Node>)> {
    let labels: Vec<&str> = ["b", "c", "d"][..kinds]
        .iter()
        .copied()
        .filter(|l| arity(l).iter().all(|t| nodes.iter().any(|n| n.ty == *t)))
        .collect();
    if labels.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let label = *labels.choose(rng).unwrap();
            let args = arity(label)
                .iter()
                .map(|t| {
                    let pool: Vec<&Node> = nodes.iter().filter(|n| n.ty == *t).collect();
                    (*pool.choose(rng).unwrap()).clone()
                })
                .collect();
            (label.to_string(), args)
        })
        .collect()
}

fn random_nodes(rng: &mut ChaCha8Rng, prefix: &str, count: usize) -> Vec<Node> {
    (0..count)
        .map(|i| Node::new(format!("{prefix}{i}"), if rng.gen_bool(0.7) { "A" } else { "B" }))
        .collect()
}

fn mentions(c: &Constituent, name: &str) -> bool {
    match c {
        Constituent::Edge(e) => e.args.iter().any(|a| a.name == name),
        Constituent::Nil => false,
        Constituent::Par(a, b) => mentions(a, name) || mentions(b, name),
        Constituent::Nu(_, b) => mentions(b, name),
    }
}

/// Random binary tree of `Par` over `leaves` (with occasional `Nil`s).
fn random_tree(rng: &mut ChaCha8Rng, mut leaves: Vec<Constituent>) -> Constituent {
    leaves.shuffle(rng);
    if rng.gen_bool(0.25) {
        let at = rng.gen_range(0..=leaves.len());
        leaves.insert(at, Constituent::Nil);
    }
    if leaves.is_empty() {
        return Constituent::Nil;
    }
    while leaves.len() > 1 {
        let i = rng.gen_range(0..leaves.len() - 1);
        let a = leaves.remove(i);
        let b = leaves.remove(i);
        leaves.insert(i, Constituent::par(a, b));
    }
    leaves.pop().unwrap()
}

/// Wraps `ν node` somewhere above every occurrence of `node`.
fn place_nu(rng: &mut ChaCha8Rng, c: Constituent, node: &Node) -> Constituent {
    if let Constituent::Par(a, b) = c {
        let (ia, ib) = (mentions(&a, &node.name), mentions(&b, &node.name));
        let descend = rng.gen_bool(0.6);
        match (ia, ib) {
            (true, false) if descend => return Constituent::par(place_nu(rng, *a, node), *b),
            (false, true) if descend => return Constituent::par(*a, place_nu(rng, *b, node)),
            (false, false) if descend => {
                return if rng.gen_bool(0.5) {
                    Constituent::par(place_nu(rng, *a, node), *b)
                } else {
                    Constituent::par(*a, place_nu(rng, *b, node))
                };
            }
            _ => return Constituent::nu(node.clone(), Constituent::par(*a, *b)),
        }
    }
    if let Constituent::Nu(m, body) = c {
        if rng.gen_bool(0.5) {
            return Constituent::nu(m, place_nu(rng, *body, node));
        }
        return Constituent::nu(node.clone(), Constituent::nu(m, *body));
    }
    Constituent::nu(node.clone(), c)
}

/// Builds a constituent with the given bound nodes and edges, nesting
/// restrictions and parallel compositions at random.
fn assemble(rng: &mut ChaCha8Rng, bound: &[Node], edges: &[(String, Vec<Node>)]) -> Constituent {
    let leaves = edges
        .iter()
        .enumerate()
        .map(|(i, (l, args))| Constituent::edge(i as u32, l.clone(), args.clone()))
        .collect();
    let mut c = random_tree(rng, leaves);
    let mut order: Vec<&Node> = bound.iter().collect();
    order.shuffle(rng);
    for n in order {
        c = place_nu(rng, c, n);
    }
    c
}

/// Size bounds for random expressions.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub max_nodes: usize,
    pub max_edges: usize,
    pub edge_types: usize,
    pub closed: bool,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_nodes: 8,
            max_edges: 6,
            edge_types: 3,
            closed: false,
        }
    }
}

pub fn random_expression(rng: &mut ChaCha8Rng, bounds: Bounds) -> GraphExpression {
    let n = rng.gen_range(1..=bounds.max_nodes);
    let nodes = random_nodes(rng, "n", n);
    let kinds = rng.gen_range(1..=bounds.edge_types);
    let m = rng.gen_range(0..=bounds.max_edges);
    let edges = random_edges(rng, &nodes, m, kinds);
    let (free, bound): (Vec<Node>, Vec<Node>) = if bounds.closed {
        (Vec::new(), nodes)
    } else {
        nodes.into_iter().partition(|_| rng.gen_bool(0.3))
    };
    let body = assemble(rng, &bound, &edges);
    GraphExpression::new(&type_graph(), free, body).unwrap()
}

/// A congruent copy of `e`: bound names renamed, restrictions moved and
/// nested differently, parallel components reordered and reassociated,
/// `Nil`s added or dropped.
pub fn shuffle_congruent(rng: &mut ChaCha8Rng, e: &GraphExpression) -> GraphExpression {
    let nf = normalize(e);
    let mut rename = BTreeMap::new();
    let mut fresh: Vec<usize> = (0..nf.prefix.len()).collect();
    fresh.shuffle(rng);
    for (n, k) in nf.prefix.iter().zip(fresh) {
        rename.insert(n.name.clone(), Node::new(format!("r{k}"), n.ty.clone()));
    }
    let map = |n: &Node| rename.get(&n.name).cloned().unwrap_or_else(|| n.clone());
    let bound: Vec<Node> = nf.prefix.iter().map(map).collect();
    let edges: Vec<(String, Vec<Node>)> = nf
        .components
        .iter()
        .map(|c| (c.label.clone(), c.args.iter().map(map).collect()))
        .collect();
    let body = assemble(rng, &bound, &edges);
    GraphExpression::new(&type_graph(), nf.interface.iter().cloned(), body).unwrap()
}

/// A pair `(E1, E2)` where `E2` restricts some free nodes of `E1` and is
/// then shuffled, so that `E1 << E2` holds.
pub fn heated_pair(rng: &mut ChaCha8Rng) -> (GraphExpression, GraphExpression) {
    let e1 = random_expression(rng, Bounds::default());
    let free: Vec<Node> = e1.interface().iter().cloned().collect();
    let hide: Vec<Node> = free.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    let keep: Vec<Node> = free.iter().filter(|n| !hide.contains(n)).cloned().collect();
    let lifted = GraphExpression::new(&type_graph(), keep, Constituent::nu_all(&hide, e1.body().clone())).unwrap();
    let e2 = shuffle_congruent(rng, &lifted);
    (e1, e2)
}

/// Congruence by exhaustive search over type-preserving bijections of the
/// bound nodes of the two normal forms.
pub fn brute_congruent(e1: &GraphExpression, e2: &GraphExpression) -> bool {
    let (n1, n2) = (normalize(e1), normalize(e2));
    if n1.interface != n2.interface || n1.prefix.len() != n2.prefix.len() || n1.components.len() != n2.components.len()
    {
        return false;
    }
    let target: Vec<(String, Vec<Node>)> =
        sorted_edges(n2.components.iter().map(|c| (c.label.clone(), c.args.clone())));
    let mut used = vec![false; n2.prefix.len()];
    let mut image: BTreeMap<String, Node> = BTreeMap::new();
    fn go(
        i: usize,
        n1: &gts_core::graph::NormalGraph,
        n2: &gts_core::graph::NormalGraph,
        used: &mut Vec<bool>,
        image: &mut BTreeMap<String, Node>,
        target: &[(String, Vec<Node>)],
    ) -> bool {
        if i == n1.prefix.len() {
            let mapped = sorted_edges(n1.components.iter().map(|c| {
                let args = c
                    .args
                    .iter()
                    .map(|a| image.get(&a.name).cloned().unwrap_or_else(|| a.clone()))
                    .collect();
                (c.label.clone(), args)
            }));
            return mapped == target;
        }
        for j in 0..n2.prefix.len() {
            if !used[j] && n2.prefix[j].ty == n1.prefix[i].ty {
                used[j] = true;
                image.insert(n1.prefix[i].name.clone(), n2.prefix[j].clone());
                if go(i + 1, n1, n2, used, image, target) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(0, &n1, &n2, &mut used, &mut image, &target)
}

fn sorted_edges(it: impl Iterator<Item = (String, Vec<Node>)>) -> Vec<(String, Vec<Node>)> {
    let mut v: Vec<_> = it.collect();
    v.sort();
    v
}

/// A random closed graph and a random rule over the same type graph, small
/// enough for [`brute_force_matches`].
pub fn random_instance(rng: &mut ChaCha8Rng) -> (GraphExpression, RuleExpr) {
    let g = random_expression(
        rng,
        Bounds {
            max_nodes: 5,
            max_edges: 6,
            edge_types: 3,
            closed: true,
        },
    );
    let tg = type_graph();
    loop {
        let (nv, nk) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let vars = random_nodes(rng, "v", nv);
        let deleted = random_nodes(rng, "k", nk);
        let all: Vec<Node> = vars.iter().chain(&deleted).cloned().collect();
        if all.is_empty() && rng.gen_bool(0.5) {
            continue;
        }
        let nl = rng.gen_range(0..=2);
        let (vars, deleted, lhs_edges) = if rng.gen_bool(0.6) {
            pattern_from(rng, &g, nl.max(1))
        } else {
            (vars, deleted.clone(), random_edges(rng, &all, nl, 3))
        };
        let lhs = assemble(rng, &deleted, &lhs_edges);
        let nc = rng.gen_range(0..=1);
        let created = random_nodes(rng, "w", nc);
        let rhs_nodes: Vec<Node> = vars.iter().chain(&created).cloned().collect();
        let rhs_edges = if rhs_nodes.is_empty() {
            Vec::new()
        } else {
            let nr = rng.gen_range(0..=2);
            random_edges(rng, &rhs_nodes, nr, 3)
        };
        let rhs = assemble(rng, &created, &rhs_edges);
        if let Ok(rule) = RuleExpr::new(&tg, "r", vars, lhs, rhs) {
            return (g, rule);
        }
    }
}

/// A left-hand side copied from up to `count` edges of `g`, each graph node
/// becoming either an interface variable or a deleted node. Such patterns
/// match at least once unless the dangling condition intervenes.
type Pattern = (Vec<Node>, Vec<Node>, Vec<(String, Vec<Node>)>);

fn pattern_from(rng: &mut ChaCha8Rng, g: &GraphExpression, count: usize) -> Pattern {
    let nf = normalize(g);
    let mut comps = nf.components.clone();
    comps.shuffle(rng);
    comps.truncate(count);
    let mut image: BTreeMap<String, Node> = BTreeMap::new();
    let (mut vars, mut deleted) = (Vec::new(), Vec::new());
    let mut edges = Vec::new();
    for c in &comps {
        let mut args = Vec::new();
        for a in &c.args {
            if !image.contains_key(&a.name) {
                let n = if rng.gen_bool(0.75) {
                    let n = Node::new(format!("v{}", vars.len()), a.ty.clone());
                    vars.push(n.clone());
                    n
                } else {
                    let n = Node::new(format!("k{}", deleted.len()), a.ty.clone());
                    deleted.push(n.clone());
                    n
                };
                image.insert(a.name.clone(), n);
            }
            args.push(image[&a.name].clone());
        }
        edges.push((c.label.clone(), args));
    }
    (vars, deleted, edges)
}

/// Every total, type-respecting assignment of left-hand nodes and edges
/// into `g`, kept when it satisfies the gluing conditions.
pub fn brute_force_matches(g: &GraphExpression, rule: &RuleExpr) -> BTreeSet<MatchKey> {
    let nf = normalize(g);
    let vars: Vec<Node> = rule.iface_vars().to_vec();
    let deleted: Vec<Node> = rule.lhs().body().bound_nodes();
    let sources: Vec<Node> = vars.iter().chain(&deleted).cloned().collect();
    let lhs_edges: Vec<EdgeId> = rule.lhs().body().edges().iter().map(|e| e.id).collect();
    let targets: Vec<EdgeId> = nf.components.iter().map(|e| e.id).collect();
    let empty = normalize(&GraphExpression::empty());
    let mut out = BTreeSet::new();
    for nodes in assignments(sources.len(), nf.prefix.len()) {
        for edges in assignments(lhs_edges.len(), targets.len()) {
            let mut m = Match {
                rule: rule.name().to_string(),
                d: BTreeMap::new(),
                bound_map: BTreeMap::new(),
                edge_map: lhs_edges.iter().zip(&edges).map(|(l, k)| (*l, targets[*k])).collect(),
                residual: empty.clone(),
            };
            for (i, src) in sources.iter().enumerate() {
                let img = nf.prefix[nodes[i]].clone();
                if i < vars.len() {
                    m.d.insert(src.name.clone(), img);
                } else {
                    m.bound_map.insert(src.name.clone(), img);
                }
            }
            if verify_dpo_conditions(g, rule, &m).ok() {
                out.insert(key(&m));
            }
        }
    }
    out
}

pub type MatchKey = (BTreeMap<String, String>, BTreeMap<String, String>, BTreeMap<u32, u32>);

pub fn key(m: &Match) -> MatchKey {
    (
        m.d.iter().map(|(k, v)| (k.clone(), v.name.clone())).collect(),
        m.bound_map.iter().map(|(k, v)| (k.clone(), v.name.clone())).collect(),
        m.edge_map.iter().map(|(k, v)| (k.0, v.0)).collect(),
    )
}

/// All functions `{0..k} → {0..n}` as vectors.
fn assignments(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n).map(move |i| {
                    let mut w = v.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}
