use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::{apply, find_matches, DpoError, Gts, Match};
use crate::graph::{canonical_key, congruent, GraphExpression};

/// Constraint on how often each rule is used along a trace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ReachMode {
    #[default]
    Unlimited,
    /// The trace uses exactly this multiset of rules.
    Exact(BTreeMap<String, usize>),
    /// The trace uses at least this multiset of rules.
    AtLeast(BTreeMap<String, usize>),
}

impl ReachMode {
    fn multiset(&self) -> Option<&BTreeMap<String, usize>> {
        match self {
            ReachMode::Unlimited => None,
            ReachMode::Exact(m) | ReachMode::AtLeast(m) => Some(m),
        }
    }

    fn accepts(&self, usage: &BTreeMap<String, usize>) -> bool {
        match self {
            ReachMode::Unlimited => true,
            ReachMode::Exact(m) => {
                let strip = |x: &BTreeMap<String, usize>| -> BTreeMap<String, usize> {
                    x.iter()
                        .filter(|(_, v)| **v > 0)
                        .map(|(k, v)| (k.clone(), *v))
                        .collect()
                };
                strip(m) == strip(usage)
            }
            ReachMode::AtLeast(m) => m.iter().all(|(k, v)| usage.get(k).copied().unwrap_or(0) >= *v),
        }
    }

    /// Whether the usage can still be extended to an accepted one.
    fn viable(&self, usage: &BTreeMap<String, usize>) -> bool {
        match self {
            ReachMode::Exact(m) => usage.iter().all(|(k, v)| *v <= m.get(k).copied().unwrap_or(0)),
            _ => true,
        }
    }

    /// The part of the usage that matters for acceptance, so that states
    /// differing only beyond it are merged.
    fn usage_key(&self, usage: &BTreeMap<String, usize>) -> Vec<(String, usize)> {
        match self {
            ReachMode::Unlimited => Vec::new(),
            ReachMode::Exact(_) => usage.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            ReachMode::AtLeast(m) => m
                .iter()
                .map(|(k, v)| (k.clone(), usage.get(k).copied().unwrap_or(0).min(*v)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReachOptions {
    pub max_steps: usize,
    /// Upper bound on the number of distinct states kept.
    pub frontier_cap: usize,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions {
            max_steps: 8,
            frontier_cap: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: String,
    pub matched: Match,
}

/// A rewrite trace: `states[i+1]` is `states[i]` rewritten by `steps[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationSeq {
    pub steps: Vec<Step>,
    pub states: Vec<GraphExpression>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub rule: String,
    pub d: BTreeMap<String, String>,
    pub consumed_edges: Vec<u32>,
    pub state_key: String,
}

impl DerivationSeq {
    pub fn empty(initial: GraphExpression) -> Self {
        DerivationSeq {
            steps: Vec::new(),
            states: vec![initial],
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &GraphExpression {
        self.states.last().expect("a trace has at least one state")
    }

    pub fn rule_usage(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for s in &self.steps {
            *m.entry(s.rule.clone()).or_insert(0) += 1;
        }
        m
    }

    /// Re-applies every step from the first state and checks that each
    /// result is congruent to the recorded one.
    pub fn replay(&self, gts: &Gts) -> Result<(), DpoError> {
        let mut current = self.states[0].clone();
        for (i, step) in self.steps.iter().enumerate() {
            let rule = gts.rule(&step.rule)?;
            let next = apply(&current, rule, &step.matched).map_err(|e| DpoError::Replay {
                index: i,
                reason: e.to_string(),
            })?;
            let recorded = self.states.get(i + 1).ok_or_else(|| DpoError::Replay {
                index: i,
                reason: "missing state".into(),
            })?;
            if congruent(&next, recorded).is_none() {
                return Err(DpoError::Replay {
                    index: i,
                    reason: "result is not congruent to the recorded state".into(),
                });
            }
            current = recorded.clone();
        }
        Ok(())
    }

    pub fn entries(&self) -> Vec<TraceEntry> {
        self.steps
            .iter()
            .zip(&self.states[1..])
            .map(|(s, st)| TraceEntry {
                rule: s.rule.clone(),
                d: s.matched.d.iter().map(|(k, v)| (k.clone(), v.name.clone())).collect(),
                consumed_edges: s.matched.edge_map.values().map(|e| e.0).collect(),
                state_key: canonical_key(st),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReachOutcome {
    Found(DerivationSeq),
    NotFound,
    /// The state cap was hit before the search space within the step bound
    /// was covered.
    Exhausted {
        explored: usize,
    },
}

struct Entry {
    state: GraphExpression,
    usage: BTreeMap<String, usize>,
    parent: Option<(usize, Step)>,
}

fn trace_to(entries: &[Entry], mut i: usize) -> DerivationSeq {
    let mut steps = Vec::new();
    let mut states = vec![entries[i].state.clone()];
    while let Some((p, step)) = &entries[i].parent {
        steps.push(step.clone());
        states.push(entries[*p].state.clone());
        i = *p;
    }
    steps.reverse();
    states.reverse();
    DerivationSeq { steps, states }
}

/// Breadth-first exploration; `visit` sees each new entry and may stop the
/// search by returning true.
fn explore(
    gts: &Gts,
    mode: &ReachMode,
    opts: ReachOptions,
    mut visit: impl FnMut(&[Entry], usize) -> bool,
) -> Result<(Vec<Entry>, Option<usize>, bool), DpoError> {
    if let Some(m) = mode.multiset() {
        for k in m.keys() {
            gts.rule(k)?;
        }
    }
    let mut entries = vec![Entry {
        state: gts.initial.clone(),
        usage: BTreeMap::new(),
        parent: None,
    }];
    let mut seen = HashSet::new();
    seen.insert((canonical_key(&gts.initial), mode.usage_key(&BTreeMap::new())));
    if visit(&entries, 0) {
        return Ok((entries, Some(0), false));
    }
    let mut level = vec![0usize];
    for _ in 0..opts.max_steps {
        let mut next = Vec::new();
        for &i in &level {
            for (name, rule) in &gts.rules {
                let state = entries[i].state.clone();
                for m in find_matches(&state, rule)? {
                    let mut usage = entries[i].usage.clone();
                    *usage.entry(name.clone()).or_insert(0) += 1;
                    if !mode.viable(&usage) {
                        continue;
                    }
                    let h = apply(&state, rule, &m)?;
                    let key = (canonical_key(&h), mode.usage_key(&usage));
                    if !seen.insert(key) {
                        continue;
                    }
                    if entries.len() >= opts.frontier_cap {
                        return Ok((entries, None, true));
                    }
                    entries.push(Entry {
                        state: h,
                        usage,
                        parent: Some((
                            i,
                            Step {
                                rule: name.clone(),
                                matched: m,
                            },
                        )),
                    });
                    let j = entries.len() - 1;
                    if visit(&entries, j) {
                        return Ok((entries, Some(j), false));
                    }
                    next.push(j);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Ok((entries, None, false))
}

/// Searches for a shortest trace from the initial graph to a graph
/// congruent to `target` whose rule usage satisfies `mode`.
pub fn reachable(
    gts: &Gts,
    target: &GraphExpression,
    mode: &ReachMode,
    opts: ReachOptions,
) -> Result<ReachOutcome, DpoError> {
    target.require_closed()?;
    let goal = canonical_key(target);
    let (entries, hit, exhausted) = explore(gts, mode, opts, |es, j| {
        mode.accepts(&es[j].usage) && canonical_key(&es[j].state) == goal
    })?;
    Ok(match (hit, exhausted) {
        (Some(j), _) => ReachOutcome::Found(trace_to(&entries, j)),
        (None, true) => ReachOutcome::Exhausted {
            explored: entries.len(),
        },
        (None, false) => ReachOutcome::NotFound,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachedState {
    pub key: String,
    pub trace: DerivationSeq,
}

/// Every state reachable within `opts.max_steps`, up to congruence, each
/// with one shortest witnessing trace. Sorted by key.
pub fn reachable_states(gts: &Gts, opts: ReachOptions) -> Result<Vec<ReachedState>, DpoError> {
    let (entries, _, exhausted) = explore(gts, &ReachMode::Unlimited, opts, |_, _| false)?;
    if exhausted {
        return Err(DpoError::CapReached(opts.frontier_cap));
    }
    let mut out: Vec<ReachedState> = (0..entries.len())
        .map(|i| ReachedState {
            key: canonical_key(&entries[i].state),
            trace: trace_to(&entries, i),
        })
        .collect();
    out.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpo::RuleExpr;
    use crate::graph::{Constituent, Node, TypeGraph};

    fn a(name: &str) -> Node {
        Node::new(name, "A")
    }

    fn b(id: u32, x: &str, y: &str) -> Constituent {
        Constituent::edge(id, "b", vec![a(x), a(y)])
    }

    fn gts() -> Gts {
        let mut tg = TypeGraph::new();
        tg.add_node_type("A").unwrap();
        tg.add_edge_type("b", vec!["A".into(), "A".into()]).unwrap();
        let p = RuleExpr::new(&tg, "p", vec![a("x1"), a("x2")], Constituent::Nil, b(0, "x1", "x2")).unwrap();
        let g0 = GraphExpression::closed(&tg, Constituent::nu_all(&[a("x"), a("y"), a("z")], b(0, "z", "x"))).unwrap();
        Gts::new(tg, [p], g0).unwrap()
    }

    fn with_edges(edges: &[(&str, &str)]) -> GraphExpression {
        let body = Constituent::par_all(edges.iter().enumerate().map(|(i, (x, y))| b(i as u32, x, y)));
        GraphExpression::from_parts([], Constituent::nu_all(&[a("x"), a("y"), a("z")], body)).unwrap()
    }

    fn opts(max_steps: usize) -> ReachOptions {
        ReachOptions {
            max_steps,
            ..ReachOptions::default()
        }
    }

    #[test]
    fn one_step_to_second_edge() {
        let g = gts();
        let target = with_edges(&[("z", "x"), ("x", "y")]);
        let ReachOutcome::Found(t) = reachable(&g, &target, &ReachMode::Unlimited, opts(1)).unwrap() else {
            panic!("expected a trace");
        };
        assert_eq!(t.len(), 1);
        assert_eq!(t.steps[0].rule, "p");
        t.replay(&g).unwrap();
        assert_eq!(t.entries()[0].consumed_edges, Vec::<u32>::new());
    }

    #[test]
    fn initial_state_needs_no_steps() {
        let g = gts();
        let ReachOutcome::Found(t) = reachable(&g, &g.initial, &ReachMode::Unlimited, opts(0)).unwrap() else {
            panic!("expected a trace");
        };
        assert!(t.is_empty());
    }

    #[test]
    fn each_step_adds_one_edge() {
        let g = gts();
        let target = with_edges(&[("z", "x"), ("x", "y"), ("y", "z"), ("x", "x")]);
        assert_eq!(
            reachable(&g, &target, &ReachMode::Unlimited, opts(2)).unwrap(),
            ReachOutcome::NotFound
        );
    }

    #[test]
    fn exact_mode_counts_rules() {
        let g = gts();
        let target = with_edges(&[("z", "x"), ("x", "y")]);
        let two: BTreeMap<String, usize> = [("p".to_string(), 2)].into_iter().collect();
        assert_eq!(
            reachable(&g, &target, &ReachMode::Exact(two), opts(3)).unwrap(),
            ReachOutcome::NotFound
        );
        let unknown: BTreeMap<String, usize> = [("q".to_string(), 1)].into_iter().collect();
        assert!(reachable(&g, &target, &ReachMode::AtLeast(unknown), opts(1)).is_err());
    }

    #[test]
    fn cap_reports_exhaustion() {
        let g = gts();
        let target = with_edges(&[("z", "x"), ("x", "y"), ("y", "z"), ("x", "x")]);
        let o = ReachOptions {
            max_steps: 3,
            frontier_cap: 3,
        };
        assert!(matches!(
            reachable(&g, &target, &ReachMode::Unlimited, o).unwrap(),
            ReachOutcome::Exhausted { .. }
        ));
    }
}
