use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::{Constituent, GraphExpression, Node};

/// A bijection between the bound names of two congruent expressions.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct Renaming(pub BTreeMap<String, String>);

impl Renaming {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    /// Applies the renaming to a name, leaving names outside its domain alone.
    pub fn apply<'a>(&'a self, name: &'a str) -> &'a str {
        self.get(name).unwrap_or(name)
    }

    pub fn inverse(&self) -> Renaming {
        Renaming(self.0.iter().map(|(k, v)| (v.clone(), k.clone())).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|(k, v)| k == v)
    }
}

impl fmt::Display for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} -> {v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Arg {
    Free(String),
    Bound(usize),
}

/// Label, position and free-neighbour pattern of one edge around a node.
type Incidence = (String, usize, Vec<Option<String>>);

/// Edges and bound nodes with bound occurrences replaced by indices.
struct Indexed {
    bound: Vec<Node>,
    edges: Vec<(String, Vec<Arg>)>,
    /// For each bound node, the edges touching it.
    incident: Vec<Vec<usize>>,
    /// Per bound node: (type, sorted incidence signature).
    signature: Vec<(String, Vec<Incidence>)>,
}

impl Indexed {
    fn new(e: &GraphExpression) -> Self {
        let bound = e.body().bound_nodes();
        let index: HashMap<&str, usize> = bound.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
        let edges: Vec<(String, Vec<Arg>)> = e
            .body()
            .edges()
            .into_iter()
            .map(|edge| {
                let args = edge
                    .args
                    .iter()
                    .map(|a| match index.get(a.name.as_str()) {
                        Some(i) => Arg::Bound(*i),
                        None => Arg::Free(a.name.clone()),
                    })
                    .collect();
                (edge.label.clone(), args)
            })
            .collect();
        let mut incident = vec![Vec::new(); bound.len()];
        let mut sigs: Vec<Vec<Incidence>> = vec![Vec::new(); bound.len()];
        for (k, (label, args)) in edges.iter().enumerate() {
            // Free neighbours are part of the signature; bound ones are not,
            // since their names are arbitrary.
            let pattern: Vec<Option<String>> = args
                .iter()
                .map(|a| match a {
                    Arg::Free(n) => Some(n.clone()),
                    Arg::Bound(_) => None,
                })
                .collect();
            for (pos, a) in args.iter().enumerate() {
                if let Arg::Bound(i) = a {
                    if incident[*i].last() != Some(&k) {
                        incident[*i].push(k);
                    }
                    sigs[*i].push((label.clone(), pos, pattern.clone()));
                }
            }
        }
        let signature = bound
            .iter()
            .zip(sigs)
            .map(|(n, mut s)| {
                s.sort();
                (n.ty.clone(), s)
            })
            .collect();
        Indexed {
            bound,
            edges,
            incident,
            signature,
        }
    }
}

type Tuple = (String, Vec<Arg>);

struct Search<'a> {
    left: &'a Indexed,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    assign: Vec<Option<usize>>,
    used: Vec<bool>,
    target: HashMap<Tuple, usize>,
    produced: HashMap<Tuple, usize>,
}

impl Search<'_> {
    fn image(&self, edge: usize) -> Option<Tuple> {
        let (label, args) = &self.left.edges[edge];
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            out.push(match a {
                Arg::Free(n) => Arg::Free(n.clone()),
                Arg::Bound(i) => Arg::Bound(self.assign[*i]?),
            });
        }
        Some((label.clone(), out))
    }

    /// Edges incident to `node` that became fully mapped with its assignment.
    fn completed_by(&self, node: usize) -> Vec<usize> {
        self.left.incident[node]
            .iter()
            .copied()
            .filter(|k| {
                self.left.edges[*k].1.iter().all(|a| match a {
                    Arg::Bound(i) => self.assign[*i].is_some(),
                    Arg::Free(_) => true,
                })
            })
            .collect()
    }

    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let node = self.order[depth];
        for c in self.candidates[node].clone() {
            if self.used[c] {
                continue;
            }
            self.assign[node] = Some(c);
            self.used[c] = true;
            let done = self.completed_by(node);
            let mut added = Vec::new();
            let mut ok = true;
            for k in done {
                let t = self.image(k).expect("edge fully mapped");
                let n = self.produced.entry(t.clone()).or_insert(0);
                *n += 1;
                let over = *n > self.target.get(&t).copied().unwrap_or(0);
                added.push(t);
                if over {
                    ok = false;
                    break;
                }
            }
            if ok && self.run(depth + 1) {
                return true;
            }
            for t in added {
                if let Some(n) = self.produced.get_mut(&t) {
                    *n -= 1;
                }
            }
            self.assign[node] = None;
            self.used[c] = false;
        }
        false
    }
}

fn count_tuples(edges: &[(String, Vec<Arg>)]) -> HashMap<Tuple, usize> {
    let mut m = HashMap::new();
    for e in edges {
        *m.entry(e.clone()).or_insert(0) += 1;
    }
    m
}

/// Decides `E1 ≡ E2` and returns the bound-name bijection `σ` with
/// `gc(E1)σ = gc(E2)`. Edge identifiers play no role.
pub fn congruent(e1: &GraphExpression, e2: &GraphExpression) -> Option<Renaming> {
    if e1.interface() != e2.interface() {
        return None;
    }
    let left = Indexed::new(e1);
    let right = Indexed::new(e2);
    if left.bound.len() != right.bound.len() || left.edges.len() != right.edges.len() {
        return None;
    }
    // Edge multisets must agree on labels and free-argument patterns.
    fn shape(ix: &Indexed) -> Vec<(String, Vec<Option<&String>>)> {
        let mut v: Vec<_> = ix
            .edges
            .iter()
            .map(|(l, args)| {
                let p: Vec<Option<&String>> = args
                    .iter()
                    .map(|a| match a {
                        Arg::Free(n) => Some(n),
                        Arg::Bound(_) => None,
                    })
                    .collect();
                (l.clone(), p)
            })
            .collect();
        v.sort();
        v
    }
    if shape(&left) != shape(&right) {
        return None;
    }
    let mut sig_l = left.signature.clone();
    let mut sig_r = right.signature.clone();
    sig_l.sort();
    sig_r.sort();
    if sig_l != sig_r {
        return None;
    }

    let candidates: Vec<Vec<usize>> = left
        .signature
        .iter()
        .map(|s| {
            right
                .signature
                .iter()
                .enumerate()
                .filter(|(_, r)| *r == s)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    // Most constrained first; then prefer nodes adjacent to already ordered
    // ones so that edge checks fire early.
    let mut order: Vec<usize> = Vec::with_capacity(left.bound.len());
    let mut placed = vec![false; left.bound.len()];
    while order.len() < left.bound.len() {
        let mut best: Option<(bool, usize, usize)> = None;
        for i in 0..left.bound.len() {
            if placed[i] {
                continue;
            }
            let adjacent = left.incident[i].iter().any(|k| {
                left.edges[*k]
                    .1
                    .iter()
                    .any(|a| matches!(a, Arg::Bound(j) if placed[*j]))
            });
            let key = (!adjacent, candidates[i].len(), i);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        let i = best.expect("unplaced node exists").2;
        placed[i] = true;
        order.push(i);
    }

    let mut search = Search {
        left: &left,
        order,
        candidates,
        assign: vec![None; left.bound.len()],
        used: vec![false; right.bound.len()],
        target: count_tuples(&right.edges),
        produced: HashMap::new(),
    };
    // Edges without bound arguments are never checked during the search.
    for k in 0..left.edges.len() {
        if left.edges[k].1.iter().all(|a| matches!(a, Arg::Free(_))) {
            let t = left.edges[k].clone();
            let n = search.produced.entry(t.clone()).or_insert(0);
            *n += 1;
            if *n > search.target.get(&t).copied().unwrap_or(0) {
                return None;
            }
        }
    }
    if !search.run(0) {
        return None;
    }
    let map = search
        .assign
        .iter()
        .enumerate()
        .map(|(i, j)| {
            (
                left.bound[i].name.clone(),
                right.bound[j.expect("complete assignment")].name.clone(),
            )
        })
        .collect();
    Some(Renaming(map))
}

/// Decides `E1 << E2`: `E2` is obtained from `E1` by restricting the names
/// `n̄ = X1 ∖ X2` and rearranging up to congruence. Returns `n̄` together with
/// the renaming from `bn(E1) ∪ n̄` to `bn(E2)`.
pub fn heating_witness(e1: &GraphExpression, e2: &GraphExpression) -> Option<(BTreeSet<Node>, Renaming)> {
    if !e2.interface().is_subset(e1.interface()) {
        return None;
    }
    let restricted: BTreeSet<Node> = e1.interface().difference(e2.interface()).cloned().collect();
    let hidden: Vec<Node> = restricted.iter().cloned().collect();
    let body = Constituent::nu_all(&hidden, e1.body().clone());
    let lifted = GraphExpression::from_parts(e2.interface().iter().cloned(), body).ok()?;
    let sigma = congruent(&lifted, e2)?;
    Some((restricted, sigma))
}

pub fn heating(e1: &GraphExpression, e2: &GraphExpression) -> Option<BTreeSet<Node>> {
    heating_witness(e1, e2).map(|(n, _)| n)
}
