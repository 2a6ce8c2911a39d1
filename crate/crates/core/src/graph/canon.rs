use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::GraphExpression;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Free(String),
    Bound(usize),
}

/// One connected piece of the edge set, linked through bound nodes.
struct Piece {
    types: Vec<String>,
    edges: Vec<(String, Vec<Slot>)>,
}

/// A string that is equal for two expressions exactly when they are
/// congruent. Bound nodes are labelled canonically per connected piece by
/// colour refinement, with ties broken by trying every candidate and keeping
/// the least serialization.
pub fn canonical_key(e: &GraphExpression) -> String {
    let bound = e.body().bound_nodes();
    let index: HashMap<&str, usize> = bound.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
    let edges: Vec<(String, Vec<Slot>)> = e
        .body()
        .edges()
        .into_iter()
        .map(|edge| {
            let args = edge
                .args
                .iter()
                .map(|a| match index.get(a.name.as_str()) {
                    Some(i) => Slot::Bound(*i),
                    None => Slot::Free(a.name.clone()),
                })
                .collect();
            (edge.label.clone(), args)
        })
        .collect();

    // Union-find over bound nodes joined by edges.
    let mut parent: Vec<usize> = (0..bound.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut connected = vec![false; bound.len()];
    for (_, args) in &edges {
        let mut first = None;
        for a in args {
            if let Slot::Bound(i) = a {
                connected[*i] = true;
                match first {
                    None => first = Some(*i),
                    Some(f) => {
                        let (ra, rb) = (find(&mut parent, f), find(&mut parent, *i));
                        parent[ra] = rb;
                    }
                }
            }
        }
    }

    let mut isolated: Vec<&str> = bound
        .iter()
        .zip(&connected)
        .filter(|(_, c)| !**c)
        .map(|(n, _)| n.ty.as_str())
        .collect();
    isolated.sort();

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut ground: Vec<String> = Vec::new();
    for (k, (label, args)) in edges.iter().enumerate() {
        match args.iter().find_map(|a| match a {
            Slot::Bound(i) => Some(*i),
            Slot::Free(_) => None,
        }) {
            Some(i) => groups.entry(find(&mut parent, i)).or_default().push(k),
            None => ground.push(render_edge(label, args, &[])),
        }
    }

    let mut pieces: Vec<String> = ground;
    for ks in groups.values() {
        let mut local: BTreeMap<usize, usize> = BTreeMap::new();
        for k in ks {
            for a in &edges[*k].1 {
                if let Slot::Bound(i) = a {
                    let next = local.len();
                    local.entry(*i).or_insert(next);
                }
            }
        }
        let mut types = vec![String::new(); local.len()];
        for (g, l) in &local {
            types[*l] = bound[*g].ty.clone();
        }
        let piece = Piece {
            types,
            edges: ks
                .iter()
                .map(|k| {
                    let (label, args) = &edges[*k];
                    let args = args
                        .iter()
                        .map(|a| match a {
                            Slot::Bound(i) => Slot::Bound(local[i]),
                            Slot::Free(n) => Slot::Free(n.clone()),
                        })
                        .collect();
                    (label.clone(), args)
                })
                .collect(),
        };
        pieces.push(canonical_piece(&piece));
    }
    pieces.sort();

    let iface: Vec<String> = e.interface().iter().map(|n| n.to_string()).collect();
    format!("[{}]|{}|{}", iface.join(","), isolated.join(","), pieces.join(";"))
}

fn render_edge(label: &str, args: &[Slot], labelling: &[usize]) -> String {
    let args: Vec<String> = args
        .iter()
        .map(|a| match a {
            Slot::Free(n) => n.clone(),
            Slot::Bound(i) => format!("#{}", labelling[*i]),
        })
        .collect();
    format!("{label}({})", args.join(","))
}

/// An edge seen from one of its nodes: label, position, coloured arguments.
type Incidence = (String, usize, Vec<Slot>);

fn refine(piece: &Piece, incident: &[Vec<(usize, usize)>], colours: &mut Vec<usize>) {
    loop {
        let keys: Vec<(usize, Vec<Incidence>)> = (0..colours.len())
            .map(|v| {
                let mut sig: Vec<Incidence> = incident[v]
                    .iter()
                    .map(|(k, pos)| {
                        let (label, args) = &piece.edges[*k];
                        let coloured = args
                            .iter()
                            .map(|a| match a {
                                Slot::Bound(i) => Slot::Bound(colours[*i]),
                                Slot::Free(n) => Slot::Free(n.clone()),
                            })
                            .collect();
                        (label.clone(), *pos, coloured)
                    })
                    .collect();
                sig.sort();
                (colours[v], sig)
            })
            .collect();
        let distinct: BTreeSet<&(usize, Vec<Incidence>)> = keys.iter().collect();
        let rank: BTreeMap<_, usize> = distinct.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
        let next: Vec<usize> = keys.iter().map(|k| rank[k]).collect();
        let before = colours.iter().collect::<BTreeSet<_>>().len();
        let after = rank.len();
        *colours = next;
        if after == before {
            return;
        }
    }
}

fn canonical_piece(piece: &Piece) -> String {
    let n = piece.types.len();
    let mut incident = vec![Vec::new(); n];
    for (k, (_, args)) in piece.edges.iter().enumerate() {
        for (pos, a) in args.iter().enumerate() {
            if let Slot::Bound(i) = a {
                incident[*i].push((k, pos));
            }
        }
    }
    let distinct: BTreeSet<&String> = piece.types.iter().collect();
    let rank: BTreeMap<&String, usize> = distinct.into_iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut colours: Vec<usize> = piece.types.iter().map(|t| rank[t]).collect();
    refine(piece, &incident, &mut colours);
    let mut best: Option<String> = None;
    search(piece, &incident, colours, &mut best);
    best.expect("at least one labelling")
}

fn search(piece: &Piece, incident: &[Vec<(usize, usize)>], colours: Vec<usize>, best: &mut Option<String>) {
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, c) in colours.iter().enumerate() {
        cells.entry(*c).or_default().push(v);
    }
    match cells.values().find(|c| c.len() > 1) {
        None => {
            let types: Vec<String> = (0..colours.len())
                .map(|c| {
                    let v = colours.iter().position(|x| *x == c).expect("discrete");
                    piece.types[v].clone()
                })
                .collect();
            let mut rendered: Vec<String> = piece.edges.iter().map(|(l, a)| render_edge(l, a, &colours)).collect();
            rendered.sort();
            let s = format!("<{}>{}", types.join(","), rendered.join(","));
            if best.as_ref().is_none_or(|b| s < *b) {
                *best = Some(s);
            }
        }
        Some(cell) => {
            for &v in cell {
                // Individualize v: it keeps its colour, the rest of its cell
                // moves strictly after it.
                let mut next: Vec<usize> = colours.iter().map(|c| c * 2 + 1).collect();
                next[v] -= 1;
                refine(piece, incident, &mut next);
                search(piece, incident, next, best);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{congruent, Constituent, Node, TypeGraph};
    use super::*;

    fn tg() -> TypeGraph {
        let mut tg = TypeGraph::new();
        tg.add_node_type("A").unwrap();
        tg.add_edge_type("b", vec!["A".into(), "A".into()]).unwrap();
        tg
    }

    fn a(name: &str) -> Node {
        Node::new(name, "A")
    }

    fn b(id: u32, x: &str, y: &str) -> Constituent {
        Constituent::edge(id, "b", vec![a(x), a(y)])
    }

    fn closed(c: Constituent) -> GraphExpression {
        GraphExpression::closed(&tg(), c).unwrap()
    }

    #[test]
    fn empty_graph_key_is_fixed() {
        assert_eq!(canonical_key(&GraphExpression::empty()), "[]||");
    }

    #[test]
    fn congruent_graphs_share_key() {
        let e1 = closed(Constituent::nu(
            a("n"),
            Constituent::nu(a("m"), Constituent::par(b(0, "n", "m"), Constituent::Nil)),
        ));
        let e2 = closed(Constituent::nu(a("p"), Constituent::nu(a("q"), b(7, "q", "p"))));
        assert_eq!(canonical_key(&e1), canonical_key(&e2));
    }

    #[test]
    fn loop_and_link_differ() {
        let e1 = closed(Constituent::nu(a("n"), b(0, "n", "n")));
        let e2 = closed(Constituent::nu(a("n"), Constituent::nu(a("m"), b(0, "n", "m"))));
        assert_ne!(canonical_key(&e1), canonical_key(&e2));
    }

    #[test]
    fn symmetric_cycle() {
        // Directed 4-cycle written in two different orders.
        let cyc = |names: [&str; 4]| {
            let body = Constituent::par_all((0..4).map(|i| b(i as u32, names[i], names[(i + 1) % 4])));
            closed(Constituent::nu_all(&names.map(a), body))
        };
        let e1 = cyc(["p", "q", "r", "s"]);
        let e2 = cyc(["s", "r", "q", "p"]);
        assert!(congruent(&e1, &e2).is_some());
        assert_eq!(canonical_key(&e1), canonical_key(&e2));
    }
}
