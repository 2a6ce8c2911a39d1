use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use super::{alpha_eq, check_term, fresh_var, freshness, Context, Formula, KernelError, ProofTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("`{0}` is outside the searchable fragment")]
    OutsideFragment(String),
    #[error("search produced a term the checker rejects: {0}")]
    Unsound(KernelError),
    #[error(transparent)]
    Context(KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of rule applications on any branch.
    pub depth: usize,
    /// Also use `&`, `⊤`, `∨` and `⊥`.
    pub additive: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            depth: 12,
            additive: false,
        }
    }
}

fn in_fragment(f: &Formula) -> bool {
    match f {
        Formula::One | Formula::Atom(_) | Formula::Pred(..) | Formula::RefTo(..) => true,
        Formula::Tensor(a, b) | Formula::Lolli(a, b) => in_fragment(a) && in_fragment(b),
        Formula::Bang(a) | Formula::Forall(_, _, a) | Formula::DynEx(_, _, a) => in_fragment(a),
        _ => false,
    }
}

/// Goal-directed search in the multiplicative and quantifier fragment.
/// `None` means no proof exists within `depth` rule applications, nothing
/// stronger.
pub fn bounded_search(ctx: &Context, goal: &Formula, depth: usize) -> Result<Option<ProofTerm>, SearchError> {
    if !in_fragment(goal) {
        return Err(SearchError::OutsideFragment(goal.to_string()));
    }
    prove(ctx, goal, SearchConfig { depth, additive: false })
}

/// Search with an explicit configuration. Every returned term has been
/// accepted by the checker.
pub fn prove(ctx: &Context, goal: &Formula, cfg: SearchConfig) -> Result<Option<ProofTerm>, SearchError> {
    ctx.well_formed().map_err(SearchError::Context)?;
    let mut s = Search {
        additive: cfg.additive,
        failed: HashSet::new(),
    };
    let found = s.solve(&ctx.gamma, &ctx.delta, goal, cfg.depth);
    match found {
        Some(t) => {
            check_term(ctx, &t, goal).map_err(SearchError::Unsound)?;
            Ok(Some(t))
        }
        None => Ok(None),
    }
}

type Zone = Vec<(String, Formula)>;

struct Search {
    additive: bool,
    failed: HashSet<String>,
}

fn names_in(gamma: &Zone, delta: &Zone, goal: &Formula) -> BTreeSet<String> {
    let mut avoid = goal.all_vars();
    for (n, f) in gamma.iter().chain(delta.iter()) {
        avoid.insert(n.clone());
        avoid.extend(f.all_vars());
    }
    avoid
}

fn without(delta: &Zone, idx: usize) -> Zone {
    let mut d = delta.clone();
    d.remove(idx);
    d
}

fn with(delta: &Zone, name: &str, ty: Formula) -> Zone {
    let mut d = delta.clone();
    d.push((name.to_string(), ty));
    d
}

/// Whether the atomic resource `r` could plausibly be consumed while
/// proving `goal` with no rules around.
fn relevant(r: &Formula, goal: &Formula) -> bool {
    match (r, goal) {
        (_, Formula::Top) => true,
        (Formula::Pred(l, _), Formula::Pred(l2, _)) => l == l2,
        (Formula::RefTo(b, _), Formula::RefTo(b2, _)) => b == b2,
        (Formula::RefTo(b, _), Formula::DynEx(_, b2, body)) => b == b2 || relevant(r, body),
        (Formula::Atom(a), Formula::Atom(a2)) => a == a2,
        (_, Formula::Tensor(a, b) | Formula::With(a, b) | Formula::Or(a, b)) => relevant(r, a) || relevant(r, b),
        (_, Formula::DynEx(_, _, body) | Formula::Forall(_, _, body)) => relevant(r, body),
        (_, Formula::Lolli(_, b) | Formula::Arrow(_, b)) => relevant(r, b),
        _ => alpha_eq(r, goal),
    }
}

fn is_rule(f: &Formula) -> bool {
    matches!(f, Formula::Lolli(..) | Formula::Arrow(..) | Formula::Forall(..))
}

impl Search {
    fn solve(&mut self, gamma: &Zone, delta: &Zone, goal: &Formula, depth: usize) -> Option<ProofTerm> {
        if depth == 0 {
            return None;
        }
        let key = memo_key(gamma, delta, goal, depth);
        if self.failed.contains(&key) {
            return None;
        }
        let r = self.solve_inner(gamma, delta, goal, depth - 1);
        if r.is_none() {
            self.failed.insert(key);
        }
        r
    }

    fn solve_inner(&mut self, gamma: &Zone, delta: &Zone, goal: &Formula, d: usize) -> Option<ProofTerm> {
        let avoid = names_in(gamma, delta, goal);

        // Axioms.
        if delta.len() == 1 && alpha_eq(&delta[0].1, goal) {
            return Some(ProofTerm::var(delta[0].0.clone()));
        }
        if delta.is_empty() {
            if *goal == Formula::One {
                return Some(ProofTerm::Nil);
            }
            if let Some((p, _)) = gamma.iter().rev().find(|(_, f)| alpha_eq(f, goal)) {
                return Some(ProofTerm::var(p.clone()));
            }
        }

        if self.additive {
            if let Some((k, _)) = delta.iter().find(|(_, f)| *f == Formula::Bot) {
                return Some(ProofTerm::error(goal.clone(), ProofTerm::var(k.clone())));
            }
        }

        // Left rules that lose nothing, applied eagerly to the first
        // decomposable resource.
        if let Some(i) = delta.iter().position(|(_, f)| {
            matches!(
                f,
                Formula::Tensor(..) | Formula::One | Formula::DynEx(..) | Formula::Bang(..)
            ) || (self.additive && matches!(f, Formula::Or(..)))
        }) {
            let (h, f) = &delta[i];
            let rest = without(delta, i);
            let bound = ProofTerm::var(h.clone());
            return match f {
                Formula::One => self.solve(gamma, &rest, goal, d).map(|k| ProofTerm::let_nil(bound, k)),
                Formula::Tensor(a, b) => {
                    let u = fresh_var(&format!("{h}1"), &avoid);
                    let mut avoid2 = avoid.clone();
                    avoid2.insert(u.clone());
                    let v = fresh_var(&format!("{h}2"), &avoid2);
                    let next = with(&with(&rest, &u, (**a).clone()), &v, (**b).clone());
                    self.solve(gamma, &next, goal, d)
                        .map(|k| ProofTerm::let_tensor(u, v, bound, k))
                }
                Formula::Bang(a) => {
                    let p = fresh_var(&format!("{h}_"), &avoid);
                    let g2 = with(gamma, &p, (**a).clone());
                    self.solve(&g2, &rest, goal, d)
                        .map(|k| ProofTerm::let_bang(p, bound, k))
                }
                Formula::DynEx(y, beta, body) => {
                    let x = fresh_var(y, &avoid);
                    let mut avoid2 = avoid.clone();
                    avoid2.insert(x.clone());
                    let n = fresh_var(&format!("n_{x}"), &avoid2);
                    avoid2.insert(n.clone());
                    let v = fresh_var(&format!("{h}_"), &avoid2);
                    let g2 = with(gamma, &x, Formula::Atom(beta.clone()));
                    let next = with(
                        &with(&rest, &n, Formula::RefTo(beta.clone(), x.clone())),
                        &v,
                        body.subst(y, &x),
                    );
                    self.solve(&g2, &next, goal, d)
                        .map(|k| ProofTerm::let_eps(n, x, v, bound, k))
                }
                Formula::Or(a, b) => {
                    let u = fresh_var(&format!("{h}_l"), &avoid);
                    let v = fresh_var(&format!("{h}_r"), &avoid);
                    let left = self.solve(gamma, &with(&rest, &u, (**a).clone()), goal, d)?;
                    let right = self.solve(gamma, &with(&rest, &v, (**b).clone()), goal, d)?;
                    Some(ProofTerm::Case {
                        scrutinee: Box::new(bound),
                        u,
                        left: Box::new(left),
                        v,
                        right: Box::new(right),
                    })
                }
                _ => unreachable!(),
            };
        }

        // Invertible right rules.
        match goal {
            Formula::Lolli(a, b) => {
                let u = fresh_var("u", &avoid);
                let next = with(delta, &u, (**a).clone());
                return self
                    .solve(gamma, &next, b, d)
                    .map(|k| ProofTerm::lam_lin(u, (**a).clone(), k));
            }
            Formula::Arrow(a, b) => {
                let p = fresh_var("p", &avoid);
                let g2 = with(gamma, &p, (**a).clone());
                return self
                    .solve(&g2, delta, b, d)
                    .map(|k| ProofTerm::lam_nl(p, (**a).clone(), k));
            }
            Formula::Forall(x, ty, body) => {
                let x2 = fresh_var(x, &avoid);
                let g2 = with(gamma, &x2, Formula::Atom(ty.clone()));
                return self
                    .solve(&g2, delta, &body.subst(x, &x2), d)
                    .map(|k| ProofTerm::lam_ind(x2, ty.clone(), k));
            }
            Formula::Top if self.additive => return Some(ProofTerm::Unit),
            Formula::With(a, b) if self.additive => {
                let l = self.solve(gamma, delta, a, d)?;
                let r = self.solve(gamma, delta, b, d)?;
                return Some(ProofTerm::pair(l, r));
            }
            _ => {}
        }

        let has_rules = gamma.iter().chain(delta.iter()).any(|(_, f)| is_rule(f));

        // Non-invertible right rules.
        match goal {
            Formula::Tensor(a, b) => {
                for (left, right) in splits(delta, |r| has_rules || relevant(r, a), |r| has_rules || relevant(r, b)) {
                    if let Some(ta) = self.solve(gamma, &left, a, d) {
                        if let Some(tb) = self.solve(gamma, &right, b, d) {
                            return Some(ProofTerm::tensor(ta, tb));
                        }
                    }
                }
            }
            Formula::DynEx(x, beta, body) => {
                for (i, (n, f)) in delta.iter().enumerate() {
                    let Formula::RefTo(b2, y) = f else { continue };
                    if b2 != beta || !gamma.iter().any(|(g, t)| g == y && *t == Formula::Atom(beta.clone())) {
                        continue;
                    }
                    if !freshness(body, x, y) {
                        continue;
                    }
                    let rest = without(delta, i);
                    if let Some(k) = self.solve(gamma, &rest, &body.subst(x, y), d) {
                        return Some(ProofTerm::eps(n.clone(), y.clone(), k));
                    }
                }
            }
            Formula::Bang(a) if delta.is_empty() => {
                if let Some(k) = self.solve(gamma, delta, a, d) {
                    return Some(ProofTerm::Bang(Box::new(k)));
                }
            }
            Formula::Or(a, b) if self.additive => {
                if let Some(k) = self.solve(gamma, delta, a, d) {
                    return Some(ProofTerm::inl((**b).clone(), k));
                }
                if let Some(k) = self.solve(gamma, delta, b, d) {
                    return Some(ProofTerm::inr((**a).clone(), k));
                }
            }
            _ => {}
        }

        if has_rules {
            return self.focus(gamma, delta, goal, d, &avoid);
        }
        None
    }

    /// Focus on an implication hypothesis: instantiate its universals with
    /// individuals in scope, prove the antecedent from part of the context
    /// and continue with the consequent as a new resource.
    fn focus(
        &mut self,
        gamma: &Zone,
        delta: &Zone,
        goal: &Formula,
        d: usize,
        avoid: &BTreeSet<String>,
    ) -> Option<ProofTerm> {
        let individuals: Vec<(String, String)> = gamma
            .iter()
            .filter_map(|(n, f)| match f {
                Formula::Atom(a) => Some((n.clone(), a.clone())),
                _ => None,
            })
            .collect();
        let hyps: Vec<(Option<usize>, String, Formula)> = delta
            .iter()
            .enumerate()
            .filter(|(_, (_, f))| is_rule(f))
            .map(|(i, (n, f))| (Some(i), n.clone(), f.clone()))
            .chain(
                gamma
                    .iter()
                    .filter(|(_, f)| is_rule(f))
                    .map(|(n, f)| (None, n.clone(), f.clone())),
            )
            .collect();
        let w = fresh_var("w", avoid);
        for (idx, h, f) in hyps {
            let rest = match idx {
                Some(i) => without(delta, i),
                None => delta.clone(),
            };
            for (head, inst) in instances(ProofTerm::var(h), f, &individuals) {
                match inst {
                    Formula::Lolli(a, b) => {
                        for (left, right) in splits(&rest, |_| true, |_| true) {
                            let Some(arg) = self.solve(gamma, &left, &a, d) else {
                                continue;
                            };
                            let next = with(&right, &w, (*b).clone());
                            if let Some(k) = self.solve(gamma, &next, goal, d) {
                                return Some(ProofTerm::app_lin(
                                    ProofTerm::lam_lin(w, (*b).clone(), k),
                                    ProofTerm::app_lin(head, arg),
                                ));
                            }
                        }
                    }
                    Formula::Arrow(a, b) => {
                        let Some(arg) = self.solve(gamma, &Vec::new(), &a, d) else {
                            continue;
                        };
                        let next = with(&rest, &w, (*b).clone());
                        if let Some(k) = self.solve(gamma, &next, goal, d) {
                            return Some(ProofTerm::app_lin(
                                ProofTerm::lam_lin(w, (*b).clone(), k),
                                ProofTerm::app_nl(head, arg),
                            ));
                        }
                    }
                    other => {
                        // A fully instantiated universal that is not an
                        // implication is used as a resource directly.
                        if idx.is_none() && matches!(other, Formula::Forall(..)) {
                            continue;
                        }
                        if idx.is_none() && !is_rule(&other) {
                            let next = with(&rest, &w, other.clone());
                            if let Some(k) = self.solve(gamma, &next, goal, d) {
                                return Some(ProofTerm::app_lin(ProofTerm::lam_lin(w, other, k), head));
                            }
                        }
                    }
                }
            }
        }
        None
    }
}

/// All ways of peeling the leading universals of `f` with individuals.
fn instances(head: ProofTerm, f: Formula, individuals: &[(String, String)]) -> Vec<(ProofTerm, Formula)> {
    match f {
        Formula::Forall(x, ty, body) => individuals
            .iter()
            .filter(|(_, t)| *t == ty)
            .flat_map(|(y, _)| {
                instances(
                    ProofTerm::app_nl(head.clone(), ProofTerm::var(y.clone())),
                    body.subst(&x, y),
                    individuals,
                )
            })
            .collect(),
        other => vec![(head, other)],
    }
}

/// Two-way partitions of `delta`, skipping any that send a resource to a
/// side that cannot use it.
fn splits(delta: &Zone, left_ok: impl Fn(&Formula) -> bool, right_ok: impl Fn(&Formula) -> bool) -> Vec<(Zone, Zone)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for (n, f) in delta {
        let l = left_ok(f);
        let r = right_ok(f);
        let mut next = Vec::with_capacity(out.len() * 2);
        for (a, b) in out {
            if l {
                let mut a2 = a.clone();
                a2.push((n.clone(), f.clone()));
                next.push((a2, b.clone()));
            }
            if r {
                let mut b2 = b;
                b2.push((n.clone(), f.clone()));
                next.push((a, b2));
            }
        }
        out = next;
    }
    out
}

fn memo_key(gamma: &Zone, delta: &Zone, goal: &Formula, depth: usize) -> String {
    let mut ds: Vec<String> = delta.iter().map(|(n, f)| format!("{n}:{f}")).collect();
    ds.sort();
    let gs: Vec<String> = gamma.iter().map(|(n, f)| format!("{n}:{f}")).collect();
    format!("{depth}|{}|{}|{goal}", gs.join(","), ds.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: &str, y: &str) -> Formula {
        Formula::pred("b", [x, y])
    }

    #[test]
    fn identity_found() {
        let e = Formula::dynex_all(&[("x".into(), "A".into()), ("y".into(), "A".into())], b("x", "y"));
        let t = bounded_search(&Context::new(), &Formula::lolli(e.clone(), e), 4).unwrap();
        assert!(t.is_some());
    }

    #[test]
    fn exchange_found() {
        let xy = [("x".to_string(), "A".to_string()), ("y".to_string(), "A".to_string())];
        let yx = [("y".to_string(), "A".to_string()), ("x".to_string(), "A".to_string())];
        let from = Formula::dynex_all(&xy, b("x", "y"));
        let to = Formula::dynex_all(&yx, b("x", "y"));
        assert!(bounded_search(&Context::new(), &Formula::lolli(from, to), 10)
            .unwrap()
            .is_some());
    }

    #[test]
    fn contraction_of_a_restriction_not_found() {
        let from = Formula::dynex("x", "A", b("x", "x"));
        let to = Formula::dynex_all(&[("x".into(), "A".into()), ("y".into(), "A".into())], b("x", "y"));
        assert_eq!(
            bounded_search(&Context::new(), &Formula::lolli(from, to), 12).unwrap(),
            None
        );
    }

    #[test]
    fn rule_application_found() {
        let rule = Formula::forall_all(
            &[("x1".into(), "A".into()), ("x2".into(), "A".into())],
            Formula::lolli(Formula::One, b("x1", "x2")),
        );
        let ctx = Context::new()
            .individual("x", "A")
            .individual("y", "A")
            .with_gamma("p", rule);
        let t = bounded_search(&ctx, &b("y", "x"), 6).unwrap();
        assert!(t.is_some());
    }

    #[test]
    fn outside_fragment_rejected() {
        let err = bounded_search(&Context::new(), &Formula::Top, 3).unwrap_err();
        assert!(matches!(err, SearchError::OutsideFragment(_)));
    }

    #[test]
    fn additive_disjunction() {
        let ctx = Context::new().with_delta("u", Formula::atom("Q"));
        let goal = Formula::or(Formula::atom("P"), Formula::atom("Q"));
        let t = prove(
            &ctx,
            &goal,
            SearchConfig {
                depth: 4,
                additive: true,
            },
        )
        .unwrap();
        assert!(t.is_some());
    }
}
