use std::collections::{BTreeMap, BTreeSet};

use super::EncodeError;
use crate::graph::{congruent, heating_witness, Constituent, EdgeComp, EdgeId, GraphExpression, Node};
use crate::logic::{fresh_var, Formula};

/// Reads a graph formula back as a graph expression. Free referring
/// variables become interface nodes named after the variable; a free
/// variable that is never referred to becomes an interface node of the
/// empty type, so that it can only match another such occurrence.
pub fn formula_to_expr(f: &Formula) -> Result<GraphExpression, EncodeError> {
    let mut iface: BTreeMap<String, Node> = BTreeMap::new();
    collect_refs(f, &mut Vec::new(), &mut iface)?;
    let mut used: BTreeSet<String> = f.free_vars();
    let mut next = 0;
    let body = to_constituent(f, &mut Vec::new(), &mut iface, &mut used, &mut next)?;
    Ok(GraphExpression::from_parts(iface.into_values(), body)?)
}

fn collect_refs<'a>(
    f: &'a Formula,
    bound: &mut Vec<&'a str>,
    iface: &mut BTreeMap<String, Node>,
) -> Result<(), EncodeError> {
    match f {
        Formula::RefTo(ty, x) => {
            if bound.contains(&x.as_str()) {
                return Err(EncodeError::NotGraphFormula(format!(
                    "`{f}` refers to a restricted variable"
                )));
            }
            if iface.insert(x.clone(), Node::new(x.clone(), ty.clone())).is_some() {
                return Err(EncodeError::NotGraphFormula(format!("`{x}` is referred to twice")));
            }
            Ok(())
        }
        Formula::Tensor(a, b) => {
            collect_refs(a, bound, iface)?;
            collect_refs(b, bound, iface)
        }
        Formula::DynEx(x, _, body) => {
            bound.push(x);
            let r = collect_refs(body, bound, iface);
            bound.pop();
            r
        }
        Formula::One | Formula::Pred(..) => Ok(()),
        other => Err(EncodeError::NotGraphFormula(other.to_string())),
    }
}

fn to_constituent(
    f: &Formula,
    env: &mut Vec<(String, Node)>,
    iface: &mut BTreeMap<String, Node>,
    used: &mut BTreeSet<String>,
    next: &mut u32,
) -> Result<Constituent, EncodeError> {
    match f {
        Formula::One | Formula::RefTo(..) => Ok(Constituent::Nil),
        Formula::Pred(label, args) => {
            let args = args
                .iter()
                .map(|a| {
                    if let Some((_, n)) = env.iter().rev().find(|(v, _)| v == a) {
                        return n.clone();
                    }
                    iface
                        .entry(a.clone())
                        .or_insert_with(|| Node::new(a.clone(), ""))
                        .clone()
                })
                .collect();
            let id = *next;
            *next += 1;
            Ok(Constituent::edge(id, label.clone(), args))
        }
        Formula::Tensor(a, b) if refs_only(a) => to_constituent(b, env, iface, used, next),
        Formula::Tensor(a, b) => {
            let a = to_constituent(a, env, iface, used, next)?;
            let b = to_constituent(b, env, iface, used, next)?;
            Ok(Constituent::par(a, b))
        }
        Formula::DynEx(x, ty, body) => {
            let name = fresh_var(x, used);
            used.insert(name.clone());
            let node = Node::new(name, ty.clone());
            env.push((x.clone(), node.clone()));
            let body = to_constituent(body, env, iface, used, next);
            env.pop();
            Ok(Constituent::nu(node, body?))
        }
        other => Err(EncodeError::NotGraphFormula(other.to_string())),
    }
}

/// The interface part of an open graph formula.
fn refs_only(f: &Formula) -> bool {
    match f {
        Formula::RefTo(..) => true,
        Formula::Tensor(a, b) => refs_only(a) && refs_only(b),
        _ => false,
    }
}

fn rebuild(
    c: &Constituent,
    names: &dyn Fn(&str) -> String,
    edge_id: &mut dyn FnMut(&EdgeComp) -> Result<EdgeId, EncodeError>,
) -> Result<Constituent, EncodeError> {
    let node = |n: &Node| Node::new(names(&n.name), n.ty.clone());
    Ok(match c {
        Constituent::Edge(e) => {
            let renamed = EdgeComp {
                id: e.id,
                label: e.label.clone(),
                args: e.args.iter().map(node).collect(),
            };
            let id = edge_id(&renamed)?;
            Constituent::Edge(EdgeComp { id, ..renamed })
        }
        Constituent::Nil => Constituent::Nil,
        Constituent::Par(a, b) => Constituent::par(rebuild(a, names, edge_id)?, rebuild(b, names, edge_id)?),
        Constituent::Nu(n, body) => Constituent::nu(node(n), rebuild(body, names, edge_id)?),
    })
}

/// Decodes `γ` against the linear context `Δ` it was derived from. Node
/// identities come from the references in `Δ` (an individual `x_n` stands
/// for node `n`) and edge identities from the edge resources (`c_i` is edge
/// `i`); `γ` supplies the structure.
pub fn decode(gamma: &Formula, delta: &[(String, Formula)]) -> Result<GraphExpression, EncodeError> {
    let shape = formula_to_expr(gamma)?;

    let mut nodes: BTreeMap<String, Node> = BTreeMap::new();
    let mut edges: Vec<(Option<u32>, EdgeComp)> = Vec::new();
    for (var, ty) in delta {
        match ty {
            Formula::RefTo(a, x) => {
                if nodes.insert(x.clone(), Node::new(x.clone(), a.clone())).is_some() {
                    return Err(EncodeError::ContextMismatch(format!("`{x}` is referred to twice")));
                }
            }
            Formula::Pred(..) => {}
            other => {
                return Err(EncodeError::ContextMismatch(format!(
                    "`{var} :: {other}` is neither a node nor an edge resource"
                )))
            }
        }
    }
    let mut taken_ids = BTreeSet::new();
    for (var, ty) in delta {
        let Formula::Pred(label, args) = ty else { continue };
        let args = args
            .iter()
            .map(|a| {
                nodes.get(a).cloned().ok_or_else(|| {
                    EncodeError::ContextMismatch(format!("edge `{var}` uses `{a}`, which no resource refers to"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let id = var
            .strip_prefix("c_")
            .and_then(|s| s.parse::<u32>().ok())
            .filter(|i| taken_ids.insert(*i));
        edges.push((
            id,
            EdgeComp {
                id: EdgeId(0),
                label: label.clone(),
                args,
            },
        ));
    }
    let mut next = taken_ids.iter().next_back().map_or(0, |m| m + 1);
    for (id, e) in &mut edges {
        let i = id.unwrap_or_else(|| {
            next += 1;
            next - 1
        });
        e.id = EdgeId(i);
    }
    let edges: Vec<EdgeComp> = edges.into_iter().map(|(_, e)| e).collect();
    let ground = GraphExpression::from_parts(
        nodes.values().cloned(),
        Constituent::par_all(edges.iter().cloned().map(Constituent::Edge)),
    )?;

    let (_, sigma) = heating_witness(&ground, &shape)
        .ok_or_else(|| EncodeError::ContextMismatch(format!("`{gamma}` does not describe the given resources")))?;
    let back = sigma.inverse();

    // Display names: drop the `x_` prefix when that stays injective.
    let stripped: BTreeMap<&str, &str> = nodes
        .keys()
        .map(|v| (v.as_str(), v.strip_prefix("x_").unwrap_or(v)))
        .collect();
    let distinct: BTreeSet<&str> = stripped.values().copied().collect();
    let strip = distinct.len() == stripped.len();
    let display = |v: &str| -> String {
        if strip {
            stripped.get(v).map_or(v, |s| *s).to_string()
        } else {
            v.to_string()
        }
    };

    let mut pool = edges;
    let mut take = |e: &EdgeComp| -> Result<EdgeId, EncodeError> {
        let pos = pool
            .iter()
            .position(|p| {
                p.label == e.label
                    && p.args
                        .iter()
                        .map(|a| a.name.as_str())
                        .eq(e.args.iter().map(|a| a.name.as_str()))
            })
            .ok_or_else(|| EncodeError::ContextMismatch(format!("no resource for edge `{e}`")))?;
        Ok(pool.remove(pos).id)
    };
    // Map bound names back first so that edge arguments line up with the
    // context, then switch to display names.
    let aligned = rebuild(shape.body(), &|v| back.apply(v).to_string(), &mut take)?;
    let body = rebuild(&aligned, &display, &mut |e| Ok(e.id))?;
    let iface = shape
        .interface()
        .iter()
        .map(|n| Node::new(display(&n.name), n.ty.clone()));
    Ok(GraphExpression::from_parts(iface, body)?)
}

/// Linear equivalence of two graph formulas, decided on their graphs.
pub fn formula_equiv(a: &Formula, b: &Formula) -> Result<bool, EncodeError> {
    let ea = formula_to_expr(a)?;
    let eb = formula_to_expr(b)?;
    Ok(congruent(&ea, &eb).is_some())
}
