use std::collections::{BTreeMap, BTreeSet};

use super::{rename_apart, GraphError, GraphExpression, Node};

/// `E[m/x]`: replaces free names by nodes of the same type. Bound names that
/// would capture an image are α-renamed beforehand. The map need not be
/// injective; merged interface nodes simply coincide.
pub fn substitute(e: &GraphExpression, map: &BTreeMap<String, Node>) -> Result<GraphExpression, GraphError> {
    if map.is_empty() {
        return Ok(e.clone());
    }
    for (from, to) in map {
        let source = e
            .interface()
            .iter()
            .find(|n| n.name == *from)
            .ok_or_else(|| GraphError::NotFree(from.clone()))?;
        if source.ty != to.ty {
            return Err(GraphError::SubstitutionType {
                from: source.to_string(),
                to: to.to_string(),
            });
        }
    }
    let mut taken: BTreeSet<String> = e.interface().iter().map(|n| n.name.clone()).collect();
    taken.extend(map.values().map(|n| n.name.clone()));
    let body = rename_apart(e.body(), &mut taken);
    let body = body.rename_free(map);
    let interface = e
        .interface()
        .iter()
        .map(|n| map.get(&n.name).cloned().unwrap_or_else(|| n.clone()));
    GraphExpression::from_parts(interface, body)
}

#[cfg(test)]
mod tests {
    use super::super::{Constituent, TypeGraph};
    use super::*;

    fn tg() -> TypeGraph {
        let mut tg = TypeGraph::new();
        tg.add_node_type("A").unwrap();
        tg.add_node_type("B").unwrap();
        tg.add_edge_type("b", vec!["A".into(), "A".into()]).unwrap();
        tg
    }

    fn a(name: &str) -> Node {
        Node::new(name, "A")
    }

    #[test]
    fn instantiates_rule_side() {
        let e = GraphExpression::new(
            &tg(),
            [a("x1"), a("x2")],
            Constituent::edge(0, "b", vec![a("x1"), a("x2")]),
        )
        .unwrap();
        let map = [("x1".to_string(), a("x")), ("x2".to_string(), a("y"))]
            .into_iter()
            .collect();
        let r = substitute(&e, &map).unwrap();
        assert_eq!(r.interface(), &[a("x"), a("y")].into_iter().collect());
        assert_eq!(r.body().edges()[0].args, vec![a("x"), a("y")]);
    }

    #[test]
    fn empty_map_is_identity() {
        let e = GraphExpression::new(&tg(), [a("x")], Constituent::Nil).unwrap();
        assert_eq!(substitute(&e, &BTreeMap::new()).unwrap(), e);
    }

    #[test]
    fn avoids_capture() {
        let e = GraphExpression::new(
            &tg(),
            [a("x")],
            Constituent::nu(a("n"), Constituent::edge(0, "b", vec![a("x"), a("n")])),
        )
        .unwrap();
        let map = [("x".to_string(), a("n"))].into_iter().collect();
        let r = substitute(&e, &map).unwrap();
        assert_eq!(r.interface(), &[a("n")].into_iter().collect());
        assert_eq!(r.body().bound_nodes(), vec![a("n'")]);
        assert_eq!(r.body().edges()[0].args, vec![a("n"), a("n'")]);
    }

    #[test]
    fn type_mismatch_and_domain_errors() {
        let e = GraphExpression::new(&tg(), [a("x")], Constituent::Nil).unwrap();
        let bad = [("x".to_string(), Node::new("y", "B"))].into_iter().collect();
        assert!(matches!(substitute(&e, &bad), Err(GraphError::SubstitutionType { .. })));
        let out = [("z".to_string(), a("y"))].into_iter().collect();
        assert_eq!(substitute(&e, &out), Err(GraphError::NotFree("z".into())));
    }
}
