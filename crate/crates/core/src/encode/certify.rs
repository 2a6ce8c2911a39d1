use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use super::{
    derive_constituent, derive_expression, encode_context, encode_expr, encode_rule, encode_type, instantiate,
    EncodeError, Resources,
};
use crate::dpo::{apply_detailed, DerivationSeq, DpoError, Gts, Match, RuleExpr, TraceEntry};
use crate::graph::{congruent, heating_witness, Constituent, EdgeComp, EdgeId, GraphExpression, Node};
use crate::logic::{check_term, fresh_var, prove, Context, Formula, KernelError, ProofTerm, SearchConfig, Sequent};
use crate::syntax::{parse_formula, parse_term};

/// How rule formulas enter the context of a trace certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleStyle {
    /// One unrestricted hypothesis per rule, usable any number of times.
    Nonlinear,
    /// Exactly the given number of linear instances per rule.
    Linear(BTreeMap<String, usize>),
    /// The given linear instances, all of which must be used, plus the
    /// unrestricted hypotheses for any further applications.
    AtLeast(BTreeMap<String, usize>),
}

/// How the initial graph enters the context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialForm {
    /// Its ground components, one resource each.
    #[default]
    Components,
    /// A single resource typed by its formula.
    Formula,
}

/// A sequent with its proof term, already accepted by the kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub sequent: Sequent,
    pub trace: Option<Vec<TraceEntry>>,
}

impl Certificate {
    fn new(sequent: Sequent, trace: Option<Vec<TraceEntry>>) -> Result<Self, EncodeError> {
        check_term(&sequent.ctx, &sequent.term, &sequent.ty).map_err(EncodeError::Kernel)?;
        Ok(Certificate { sequent, trace })
    }

    /// Re-check a sequent obtained elsewhere, e.g. read back from JSON.
    pub fn verify(sequent: Sequent) -> Result<Self, KernelError> {
        check_term(&sequent.ctx, &sequent.term, &sequent.ty)?;
        Ok(Certificate { sequent, trace: None })
    }

    /// Inverse of [`Certificate::to_json`] up to the trace, which is not
    /// needed for checking. A `{"certificate": ...}` wrapper is accepted.
    pub fn sequent_from_json(v: &Value) -> Result<Sequent, String> {
        let v = v.get("certificate").unwrap_or(v);
        let field = |k: &str| v.get(k).ok_or_else(|| format!("certificate has no `{k}` field"));
        let zone = |k: &str| -> Result<Vec<(String, Formula)>, String> {
            let arr = field(k)?.as_array().ok_or_else(|| format!("`{k}` is not a list"))?;
            arr.iter()
                .map(|e| {
                    match (
                        e.get("name").and_then(Value::as_str),
                        e.get("type").and_then(Value::as_str),
                    ) {
                        (Some(n), Some(t)) => Ok((n.to_string(), parse_formula(t).map_err(|e| format!("{k}: {e}"))?)),
                        _ => Err(format!("malformed `{k}` entry {e}")),
                    }
                })
                .collect()
        };
        let string = |k: &str| field(k)?.as_str().ok_or_else(|| format!("`{k}` is not a string"));
        Ok(Sequent {
            ctx: Context {
                gamma: zone("gamma")?,
                delta: zone("delta")?,
            },
            term: parse_term(string("term")?).map_err(|e| format!("term: {e}"))?,
            ty: parse_formula(string("type")?).map_err(|e| format!("type: {e}"))?,
        })
    }

    pub fn to_json(&self) -> Value {
        let zone = |z: &[(String, Formula)]| -> Vec<Value> {
            z.iter()
                .map(|(n, f)| json!({"name": n, "type": f.to_string()}))
                .collect()
        };
        let mut v = json!({
            "gamma": zone(&self.sequent.ctx.gamma),
            "delta": zone(&self.sequent.ctx.delta),
            "term": self.sequent.term.to_string(),
            "type": self.sequent.ty.to_string(),
        });
        if let Some(t) = &self.trace {
            v["trace"] = serde_json::to_value(t).expect("trace entries serialize");
        }
        v
    }
}

/// The pieces of the reachability sequents for a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtsEncoding {
    /// Individual variables for the nodes of the initial graph.
    pub gamma: Vec<(String, Formula)>,
    /// One formula per rule, named `rule_<p>`.
    pub rules: Vec<(String, Formula)>,
    /// Ground components of the initial graph.
    pub delta0: Vec<(String, Formula)>,
}

pub fn rule_var(p: &str) -> String {
    format!("rule_{p}")
}

pub fn encode_gts(gts: &Gts) -> GtsEncoding {
    GtsEncoding {
        gamma: encode_expr(&gts.initial).gamma,
        rules: gts
            .rules
            .values()
            .map(|r| (rule_var(r.name()), encode_rule(r)))
            .collect(),
        delta0: encode_context(&gts.initial).delta(),
    }
}

enum Frame {
    Tensor {
        u: String,
        v: String,
        bound: String,
    },
    Nil {
        bound: String,
    },
    Eps {
        n: String,
        x: String,
        v: String,
        bound: String,
    },
    Bind {
        u: String,
        ty: Formula,
        arg: ProofTerm,
    },
}

/// Individuals, references and edge resources currently in scope for the
/// nodes and edges of one graph.
#[derive(Debug, Clone, Default)]
struct Pool {
    ind: BTreeMap<String, String>,
    refs: BTreeMap<String, String>,
    edges: BTreeMap<EdgeId, (String, Formula)>,
}

/// Resolves the nodes and edges of a graph being reassembled.
struct Lookup {
    nodes: BTreeMap<String, (String, Option<String>)>,
    edges: BTreeMap<EdgeId, String>,
    /// When set, edges are picked by type instead of by id.
    by_type: Option<Vec<(String, Formula)>>,
}

impl Resources for Lookup {
    fn individual(&self, n: &Node) -> Result<String, EncodeError> {
        self.nodes
            .get(&n.name)
            .map(|(x, _)| x.clone())
            .ok_or_else(|| EncodeError::Inconsistent(format!("no individual for node `{n}`")))
    }

    fn reference(&mut self, n: &Node) -> Result<String, EncodeError> {
        self.nodes
            .get(&n.name)
            .and_then(|(_, r)| r.clone())
            .ok_or_else(|| EncodeError::Inconsistent(format!("no reference for node `{n}`")))
    }

    fn edge(&mut self, e: &EdgeComp, ty: &Formula) -> Result<String, EncodeError> {
        if let Some(avail) = &mut self.by_type {
            let pos = avail
                .iter()
                .position(|(_, f)| f == ty)
                .ok_or_else(|| EncodeError::Inconsistent(format!("no resource of type `{ty}`")))?;
            return Ok(avail.remove(pos).0);
        }
        self.edges
            .get(&e.id)
            .cloned()
            .ok_or_else(|| EncodeError::Inconsistent(format!("no resource for edge `{e}`")))
    }
}

impl Lookup {
    fn of_pool(pool: &Pool) -> Self {
        Lookup {
            nodes: pool
                .ind
                .iter()
                .map(|(k, x)| (k.clone(), (x.clone(), pool.refs.get(k).cloned())))
                .collect(),
            edges: pool.edges.iter().map(|(k, (n, _))| (*k, n.clone())).collect(),
            by_type: None,
        }
    }
}

struct Builder {
    taken: BTreeSet<String>,
    frames: Vec<Frame>,
}

impl Builder {
    fn new<'a>(names: impl IntoIterator<Item = &'a String>) -> Self {
        Builder {
            taken: names.into_iter().cloned().collect(),
            frames: Vec::new(),
        }
    }

    fn fresh(&mut self, base: &str) -> String {
        let n = fresh_var(base, &self.taken);
        self.taken.insert(n.clone());
        n
    }

    /// Takes apart the resource `var` whose type is the translation of `c`,
    /// recording the pieces in `pool`.
    fn destructure(&mut self, var: String, c: &Constituent, pool: &mut Pool) -> Result<(), EncodeError> {
        match c {
            Constituent::Edge(e) => {
                let args = e
                    .args
                    .iter()
                    .map(|a| {
                        pool.ind
                            .get(&a.name)
                            .cloned()
                            .ok_or_else(|| EncodeError::Inconsistent(format!("no individual for `{a}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                pool.edges.insert(e.id, (var, Formula::Pred(e.label.clone(), args)));
            }
            Constituent::Nil => self.frames.push(Frame::Nil { bound: var }),
            Constituent::Par(a, b) => {
                let u = self.fresh("l");
                let v = self.fresh("r");
                self.frames.push(Frame::Tensor {
                    u: u.clone(),
                    v: v.clone(),
                    bound: var,
                });
                self.destructure(u, a, pool)?;
                self.destructure(v, b, pool)?;
            }
            Constituent::Nu(node, body) => {
                let x = self.fresh(&format!("x_{}", node.name));
                let n = self.fresh(&format!("n_{}", node.name));
                let v = self.fresh("v");
                self.frames.push(Frame::Eps {
                    n: n.clone(),
                    x: x.clone(),
                    v: v.clone(),
                    bound: var,
                });
                pool.ind.insert(node.name.clone(), x);
                pool.refs.insert(node.name.clone(), n);
                self.destructure(v, body, pool)?;
            }
        }
        Ok(())
    }

    /// As `destructure`, for a whole expression whose interface
    /// individuals are already in `pool`.
    fn destructure_expr(&mut self, var: String, e: &GraphExpression, pool: &mut Pool) -> Result<(), EncodeError> {
        let iface: Vec<&Node> = e.interface().iter().collect();
        if iface.is_empty() {
            return self.destructure(var, e.body(), pool);
        }
        let refs = self.fresh("i");
        let rest = self.fresh("g");
        self.frames.push(Frame::Tensor {
            u: refs.clone(),
            v: rest.clone(),
            bound: var,
        });
        let mut cur = refs;
        for (k, n) in iface.iter().enumerate() {
            if k + 1 == iface.len() {
                pool.refs.insert(n.name.clone(), cur.clone());
                break;
            }
            let a = self.fresh(&format!("n_{}", n.name));
            let b = self.fresh("i");
            self.frames.push(Frame::Tensor {
                u: a.clone(),
                v: b.clone(),
                bound: cur,
            });
            pool.refs.insert(n.name.clone(), a);
            cur = b;
        }
        self.destructure(rest, e.body(), pool)
    }

    /// One rewrite step, continuing from the resources of `g` in `pool`.
    /// Returns the resulting graph and the resources of it.
    fn step(
        &mut self,
        g: &GraphExpression,
        pool: &Pool,
        rule: &RuleExpr,
        rule_formula: &Formula,
        head: &str,
        m: &Match,
    ) -> Result<(GraphExpression, Pool), EncodeError> {
        let app = apply_detailed(g, rule, m)?;
        let ind_of = |n: &Node| {
            pool.ind
                .get(&n.name)
                .cloned()
                .ok_or_else(|| EncodeError::Inconsistent(format!("no individual for `{n}`")))
        };

        let mut d_inds = Vec::new();
        for v in rule.iface_vars() {
            let img =
                m.d.get(&v.name)
                    .ok_or_else(|| EncodeError::Inconsistent(format!("match leaves `{v}` unassigned")))?;
            d_inds.push(ind_of(img)?);
        }
        let mut head_term = ProofTerm::var(head);
        for x in &d_inds {
            head_term = ProofTerm::app_nl(head_term, ProofTerm::var(x.clone()));
        }
        let Formula::Lolli(_, tau_r) = instantiate(rule_formula, &d_inds)? else {
            return Err(EncodeError::Inconsistent("rule formula is not an implication".into()));
        };

        let mut lhs = Lookup {
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
            by_type: None,
        };
        for (v, x) in rule.iface_vars().iter().zip(&d_inds) {
            lhs.nodes.insert(v.name.clone(), (x.clone(), None));
        }
        for (b, img) in &m.bound_map {
            let r = pool.refs.get(&img.name).cloned();
            lhs.nodes.insert(b.clone(), (ind_of(img)?, r));
        }
        for (le, ge) in &m.edge_map {
            let (name, _) = pool
                .edges
                .get(ge)
                .ok_or_else(|| EncodeError::Inconsistent(format!("no resource for edge {ge}")))?;
            lhs.edges.insert(*le, name.clone());
        }
        let arg = derive_constituent(rule.lhs().body(), &mut lhs)?.term;

        let r = self.fresh("w");
        self.frames.push(Frame::Bind {
            u: r.clone(),
            ty: (*tau_r).clone(),
            arg: ProofTerm::app_lin(head_term, arg),
        });
        let mut rpool = Pool::default();
        for (v, x) in rule.iface_vars().iter().zip(&d_inds) {
            rpool.ind.insert(v.name.clone(), x.clone());
        }
        self.destructure(r, rule.rhs().body(), &mut rpool)?;

        let created: BTreeMap<&str, &str> = app
            .created_nodes
            .iter()
            .map(|(rb, hn)| (hn.name.as_str(), rb.as_str()))
            .collect();
        let created_edges: BTreeMap<EdgeId, EdgeId> = app.created_edges.iter().map(|(re, he)| (*he, *re)).collect();
        let mut next = Pool::default();
        for n in app.result.nodes() {
            let (src, key) = match created.get(n.name.as_str()) {
                Some(rb) => (&rpool, *rb),
                None => (pool, n.name.as_str()),
            };
            let x = src.ind.get(key).cloned();
            let nr = src.refs.get(key).cloned();
            match (x, nr) {
                (Some(x), Some(nr)) => {
                    next.ind.insert(n.name.clone(), x);
                    next.refs.insert(n.name.clone(), nr);
                }
                _ => return Err(EncodeError::Inconsistent(format!("lost track of node `{n}`"))),
            }
        }
        for e in app.result.body().edges() {
            let found = match created_edges.get(&e.id) {
                Some(re) => rpool.edges.get(re),
                None => pool.edges.get(&e.id),
            };
            let res = found.ok_or_else(|| EncodeError::Inconsistent(format!("lost track of edge `{e}`")))?;
            next.edges.insert(e.id, res.clone());
        }
        Ok((app.result, next))
    }

    fn wrap(&mut self, body: ProofTerm) -> ProofTerm {
        let mut acc = body;
        while let Some(f) = self.frames.pop() {
            acc = match f {
                Frame::Tensor { u, v, bound } => ProofTerm::let_tensor(u, v, ProofTerm::var(bound), acc),
                Frame::Nil { bound } => ProofTerm::let_nil(ProofTerm::var(bound), acc),
                Frame::Eps { n, x, v, bound } => ProofTerm::let_eps(n, x, v, ProofTerm::var(bound), acc),
                Frame::Bind { u, ty, arg } => ProofTerm::app_lin(ProofTerm::lam_lin(u, ty, acc), arg),
            };
        }
        acc
    }
}

/// Moves `pool` from the names and ids of `from` to those of the congruent
/// `to`. Parallel edges of equal type are interchangeable.
fn rekey(pool: Pool, from: &GraphExpression, to: &GraphExpression) -> Result<Pool, EncodeError> {
    if from == to {
        return Ok(pool);
    }
    let sigma = congruent(from, to)
        .ok_or_else(|| EncodeError::Inconsistent("recorded state differs from the replayed one".into()))?;
    let mut out = Pool::default();
    for (k, x) in &pool.ind {
        out.ind.insert(sigma.apply(k).to_string(), x.clone());
    }
    for (k, r) in &pool.refs {
        out.refs.insert(sigma.apply(k).to_string(), r.clone());
    }
    let mut avail: Vec<(&EdgeComp, &(String, Formula))> = from
        .body()
        .edges()
        .into_iter()
        .filter_map(|e| pool.edges.get(&e.id).map(|r| (e, r)))
        .collect();
    for e in to.body().edges() {
        let pos = avail
            .iter()
            .position(|(f, _)| {
                f.label == e.label
                    && f.args.len() == e.args.len()
                    && f.args.iter().zip(&e.args).all(|(a, b)| sigma.apply(&a.name) == b.name)
            })
            .ok_or_else(|| EncodeError::Inconsistent(format!("no counterpart for edge `{e}`")))?;
        let (_, r) = avail.remove(pos);
        out.edges.insert(e.id, r.clone());
    }
    Ok(out)
}

/// `Γ; p :: ∀x̄. ⟦L⟧ ⊸ ⟦R⟧ ⊢ M :: ⟦G⟧ ⊸ ⟦H⟧` for one rewrite step.
pub fn certify_step(g: &GraphExpression, rule: &RuleExpr, m: &Match) -> Result<Certificate, EncodeError> {
    g.require_closed()?;
    let rho = encode_rule(rule);
    let head = rule_var(rule.name());
    let gty = encode_type(g);
    let mut b = Builder::new([&head]);
    let gv = b.fresh("g");
    let mut pool = Pool::default();
    b.destructure_expr(gv.clone(), g, &mut pool)?;
    let (h, pool) = b.step(g, &pool, rule, &rho, &head, m)?;
    let body = derive_expression(h.interface(), h.body(), &mut Lookup::of_pool(&pool))?.term;
    let term = ProofTerm::lam_lin(gv, gty.clone(), b.wrap(body));
    let sequent = Sequent {
        ctx: Context::new().with_delta(head, rho),
        term,
        ty: Formula::lolli(gty, encode_type(&h)),
    };
    Certificate::new(sequent, None)
}

/// Context, rule heads and open let-frames after replaying a trace.
struct Replayed {
    ctx: Context,
    builder: Builder,
    pool: Pool,
    last: GraphExpression,
}

fn replay(gts: &Gts, trace: &DerivationSeq, style: &RuleStyle, initial: InitialForm) -> Result<Replayed, EncodeError> {
    let g0 = &trace.states[0];
    g0.require_closed()?;
    let usage = trace.rule_usage();
    let mut ctx = Context::new();
    let mut pool = Pool::default();

    let (nonlinear, instances) = match style {
        RuleStyle::Nonlinear => (true, BTreeMap::new()),
        RuleStyle::Linear(i) => (false, i.clone()),
        RuleStyle::AtLeast(i) => (true, i.clone()),
    };
    for (p, k) in &instances {
        gts.rule(p)?;
        let used = usage.get(p).copied().unwrap_or(0);
        if *k > used {
            return Err(EncodeError::UnusedInstances {
                rule: p.clone(),
                unused: k - used,
            });
        }
    }
    if !nonlinear {
        for (p, used) in &usage {
            let available = instances.get(p).copied().unwrap_or(0);
            if *used > available {
                return Err(EncodeError::UnderProvisioned {
                    rule: p.clone(),
                    needed: *used,
                    available,
                });
            }
        }
    }

    if nonlinear {
        for r in gts.rules.values() {
            ctx = ctx.with_gamma(rule_var(r.name()), encode_rule(r));
        }
    }
    let mut queues: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (p, k) in &instances {
        let rho = encode_rule(gts.rule(p)?);
        for i in 1..=*k {
            let name = format!("{}_{i}", rule_var(p));
            ctx = ctx.with_delta(name.clone(), rho.clone());
            queues.entry(p.clone()).or_default().push(name);
        }
    }
    for q in queues.values_mut() {
        q.reverse();
    }

    let mut builder;
    match initial {
        InitialForm::Components => {
            let gc = encode_context(g0);
            for (x, t) in &gc.gamma {
                ctx = ctx.with_gamma(x.clone(), t.clone());
            }
            for e in &gc.entries {
                ctx = ctx.with_delta(e.var.clone(), e.ty.clone());
            }
            for n in g0.nodes() {
                pool.ind.insert(n.name.clone(), super::individual_var(&n.name));
                pool.refs.insert(n.name.clone(), super::reference_var(&n.name));
            }
            for e in g0.body().edges() {
                let args = e.args.iter().map(|a| super::individual_var(&a.name)).collect();
                pool.edges
                    .insert(e.id, (super::edge_var(e), Formula::Pred(e.label.clone(), args)));
            }
            builder = Builder::new(ctx.names().into_iter().map(str::to_string).collect::<Vec<_>>().iter());
        }
        InitialForm::Formula => {
            builder = Builder::new(ctx.names().into_iter().map(str::to_string).collect::<Vec<_>>().iter());
            let gv = builder.fresh("g");
            ctx = ctx.with_delta(gv.clone(), encode_type(g0));
            builder.destructure_expr(gv, g0, &mut pool)?;
        }
    }

    let mut current = g0.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        let rule = gts.rule(&step.rule)?;
        let head = match queues.get_mut(&step.rule).and_then(Vec::pop) {
            Some(h) => h,
            None => rule_var(&step.rule),
        };
        let (next, next_pool) = builder
            .step(&current, &pool, rule, &encode_rule(rule), &head, &step.matched)
            .map_err(|e| match e {
                EncodeError::Dpo(d) => EncodeError::Dpo(DpoError::Replay {
                    index: i,
                    reason: d.to_string(),
                }),
                other => other,
            })?;
        let recorded = trace.states.get(i + 1).ok_or_else(|| {
            EncodeError::Dpo(DpoError::Replay {
                index: i,
                reason: "missing state".into(),
            })
        })?;
        pool = rekey(next_pool, &next, recorded)?;
        current = recorded.clone();
    }
    Ok(Replayed {
        ctx,
        builder,
        pool,
        last: current,
    })
}

/// A certificate that the last state of `trace` is reachable:
/// `Γ, Γ_P; Δ₀ ⊢ M :: ⟦G⟧` (or with linear rule instances, per `style`).
pub fn certify_trace(
    gts: &Gts,
    trace: &DerivationSeq,
    style: &RuleStyle,
    initial: InitialForm,
) -> Result<Certificate, EncodeError> {
    let Replayed {
        ctx,
        mut builder,
        pool,
        last,
    } = replay(gts, trace, style, initial)?;
    let body = derive_expression(last.interface(), last.body(), &mut Lookup::of_pool(&pool))?.term;
    let sequent = Sequent {
        ctx,
        term: builder.wrap(body),
        ty: encode_type(&last),
    };
    Certificate::new(sequent, Some(trace.entries()))
}

/// A certificate of `⊩ ⟦E1⟧ ⊸ ⟦E2⟧` when `E1` is a heating of `E2`.
pub fn heating_implication(e1: &GraphExpression, e2: &GraphExpression) -> Result<Option<Certificate>, EncodeError> {
    let Some((_, sigma)) = heating_witness(e1, e2) else {
        return Ok(None);
    };
    let t1 = encode_type(e1);
    let t2 = encode_type(e2);
    let gamma: Vec<(String, Formula)> = e1
        .interface()
        .iter()
        .map(|n| (super::individual_var(&n.name), Formula::Atom(n.ty.clone())))
        .collect();
    let mut ctx = Context::new();
    for (x, t) in &gamma {
        ctx = ctx.with_gamma(x.clone(), t.clone());
    }
    if e1 == e2 {
        let sequent = Sequent {
            ctx,
            term: ProofTerm::lam_lin("u", t1.clone(), ProofTerm::var("u")),
            ty: Formula::lolli(t1, t2),
        };
        return Certificate::new(sequent, None).map(Some);
    }

    let mut b = Builder::new(gamma.iter().map(|(x, _)| x));
    let u = b.fresh("u");
    let mut pool = Pool::default();
    for (n, (x, _)) in e1.interface().iter().zip(&gamma) {
        pool.ind.insert(n.name.clone(), x.clone());
    }
    b.destructure_expr(u.clone(), e1, &mut pool)?;

    let back = sigma.inverse();
    let mut look = Lookup {
        nodes: BTreeMap::new(),
        edges: BTreeMap::new(),
        by_type: Some(pool.edges.values().cloned().collect()),
    };
    for n in e2.nodes() {
        let src = if e2.interface().contains(&n) {
            n.name.as_str()
        } else {
            back.apply(&n.name)
        };
        let x = pool.ind.get(src).cloned();
        let r = pool.refs.get(src).cloned();
        match x {
            Some(x) => look.nodes.insert(n.name.clone(), (x, r)),
            None => return Err(EncodeError::Inconsistent(format!("no individual for `{n}`"))),
        };
    }
    let body = derive_expression(e2.interface(), e2.body(), &mut look)?.term;
    let term = ProofTerm::lam_lin(u, t1.clone(), b.wrap(body));
    let sequent = Sequent {
        ctx,
        term,
        ty: Formula::lolli(t1, t2),
    };
    Certificate::new(sequent, None).map(Some)
}

/// With `¬α = α ⊸ ⊥` as an extra premise, derives `⊥` from the resources
/// reached by `trace`, when the final graph entails `α` (possibly leaving
/// resources over). `None` means no such proof was found.
pub fn constraint_violation(
    gts: &Gts,
    trace: &DerivationSeq,
    style: &RuleStyle,
    initial: InitialForm,
    alpha: &Formula,
) -> Result<Option<Certificate>, EncodeError> {
    let Replayed {
        ctx,
        mut builder,
        pool,
        last,
    } = replay(gts, trace, style, initial)?;
    let neg = builder.fresh("neg");
    let ctx = ctx.with_delta(neg.clone(), Formula::negation(alpha.clone()));

    let mut local = Context::new();
    for n in last.nodes() {
        let x = &pool.ind[&n.name];
        local = local.with_gamma(x.clone(), Formula::Atom(n.ty.clone()));
    }
    for n in last.nodes() {
        local = local.with_delta(
            pool.refs[&n.name].clone(),
            Formula::refto(n.ty.clone(), pool.ind[&n.name].clone()),
        );
    }
    for (name, ty) in pool.edges.values() {
        local = local.with_delta(name.clone(), ty.clone());
    }
    let depth = 4 * formula_size(alpha) + 8;
    let cfg = SearchConfig { depth, additive: true };

    let body = if let Some(m) = prove(&local, alpha, cfg)? {
        ProofTerm::app_lin(ProofTerm::var(neg), m)
    } else {
        let padded = Formula::tensor(alpha.clone(), Formula::Top);
        let Some(m) = prove(&local, &padded, cfg)? else {
            return Ok(None);
        };
        let a = builder.fresh("a");
        let t = builder.fresh("t");
        ProofTerm::let_tensor(
            a.clone(),
            t,
            m,
            ProofTerm::error(Formula::Bot, ProofTerm::app_lin(ProofTerm::var(neg), ProofTerm::var(a))),
        )
    };
    let sequent = Sequent {
        ctx,
        term: builder.wrap(body),
        ty: Formula::Bot,
    };
    Certificate::new(sequent, Some(trace.entries())).map(Some)
}

fn formula_size(f: &Formula) -> usize {
    match f {
        Formula::Tensor(a, b)
        | Formula::Lolli(a, b)
        | Formula::With(a, b)
        | Formula::Arrow(a, b)
        | Formula::Or(a, b)
        | Formula::Eq(a, b) => 1 + formula_size(a) + formula_size(b),
        Formula::Bang(a) | Formula::Forall(_, _, a) | Formula::DynEx(_, _, a) => 1 + formula_size(a),
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpo::{find_matches, reachable, ReachMode, ReachOptions, ReachOutcome};
    use crate::encode::decode;
    use crate::graph::TypeGraph;
    use crate::logic::alpha_eq;

    fn tg() -> TypeGraph {
        let mut tg = TypeGraph::new();
        tg.add_node_type("A").unwrap();
        tg.add_edge_type("b", vec!["A".into(), "A".into()]).unwrap();
        tg
    }

    fn a(n: &str) -> Node {
        Node::new(n, "A")
    }

    fn example() -> Gts {
        let p = RuleExpr::new(
            &tg(),
            "p",
            vec![a("x1"), a("x2")],
            Constituent::Nil,
            Constituent::edge(0, "b", vec![a("x1"), a("x2")]),
        )
        .unwrap();
        let g0 = GraphExpression::closed(
            &tg(),
            Constituent::nu_all(
                &[a("x"), a("y"), a("z")],
                Constituent::edge(0, "b", vec![a("z"), a("x")]),
            ),
        )
        .unwrap();
        Gts::new(tg(), [p], g0).unwrap()
    }

    fn target() -> GraphExpression {
        GraphExpression::closed(
            &tg(),
            Constituent::nu_all(
                &[a("x"), a("y"), a("z")],
                Constituent::par(
                    Constituent::edge(0, "b", vec![a("z"), a("x")]),
                    Constituent::edge(1, "b", vec![a("x"), a("y")]),
                ),
            ),
        )
        .unwrap()
    }

    fn one_step() -> DerivationSeq {
        let gts = example();
        match reachable(&gts, &target(), &ReachMode::Unlimited, ReachOptions::default()).unwrap() {
            ReachOutcome::Found(t) => t,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn example_sequent() {
        let gts = example();
        let cert = certify_trace(&gts, &one_step(), &RuleStyle::Nonlinear, InitialForm::Formula).unwrap();
        let s = &cert.sequent;
        assert!(s
            .ctx
            .gamma
            .iter()
            .any(|(_, f)| f.to_string() == "all x1 x2:A. 1 -o b(x1,x2)"));
        assert_eq!(s.ctx.delta.len(), 1);
        assert_eq!(s.ctx.delta[0].1.to_string(), "ex x y z:A. b(z,x)");
        assert!(
            alpha_eq(&s.ty, &encode_type(&target()))
                || congruent(&decode::formula_to_expr(&s.ty).unwrap(), &target()).is_some()
        );
    }

    #[test]
    fn every_step_certified() {
        let gts = example();
        let g = &gts.initial;
        let rule = gts.rule("p").unwrap();
        for m in find_matches(g, rule).unwrap() {
            let cert = certify_step(g, rule, &m).unwrap();
            let Formula::Lolli(_, rhs) = &cert.sequent.ty else {
                panic!()
            };
            let h = crate::dpo::apply(g, rule, &m).unwrap();
            assert!(congruent(&decode::formula_to_expr(rhs).unwrap(), &h).is_some());
        }
    }

    #[test]
    fn linear_instances_are_counted() {
        let gts = example();
        let trace = one_step();
        let one: BTreeMap<String, usize> = [("p".to_string(), 1)].into();
        certify_trace(&gts, &trace, &RuleStyle::Linear(one.clone()), InitialForm::Components).unwrap();
        certify_trace(&gts, &trace, &RuleStyle::AtLeast(one), InitialForm::Components).unwrap();
        let none = BTreeMap::new();
        assert!(matches!(
            certify_trace(&gts, &trace, &RuleStyle::Linear(none), InitialForm::Components),
            Err(EncodeError::UnderProvisioned { .. })
        ));
        let two: BTreeMap<String, usize> = [("p".to_string(), 2)].into();
        assert!(matches!(
            certify_trace(&gts, &trace, &RuleStyle::Linear(two), InitialForm::Components),
            Err(EncodeError::UnusedInstances { .. })
        ));
    }

    #[test]
    fn empty_trace_is_the_encoding() {
        let gts = example();
        let trace = DerivationSeq::empty(gts.initial.clone());
        let cert = certify_trace(&gts, &trace, &RuleStyle::Nonlinear, InitialForm::Components).unwrap();
        assert_eq!(cert.sequent.term, *encode_expr(&gts.initial).main_term());
    }

    #[test]
    fn heating_certificates() {
        let open =
            GraphExpression::new(&tg(), [a("x"), a("y")], Constituent::edge(0, "b", vec![a("x"), a("y")])).unwrap();
        let closed = GraphExpression::closed(
            &tg(),
            Constituent::nu_all(&[a("x"), a("y")], Constituent::edge(0, "b", vec![a("x"), a("y")])),
        )
        .unwrap();
        assert!(heating_implication(&open, &closed).unwrap().is_some());
        let id = heating_implication(&open, &open).unwrap().unwrap();
        assert_eq!(
            id.sequent.term.to_string(),
            "lfn u:((A @ x_x * A @ x_y) * b(x_x,x_y)) => u"
        );
        assert!(heating_implication(&closed, &open).unwrap().is_none());
    }

    #[test]
    fn constraint_contradiction() {
        let gts = example();
        let b = |x: &str, y: &str| Formula::pred("b", [x, y]);
        let xyz = [
            ("x".to_string(), "A".to_string()),
            ("y".to_string(), "A".to_string()),
            ("z".to_string(), "A".to_string()),
        ];
        let alpha = Formula::dynex_all(
            &xyz,
            Formula::or_all([
                Formula::tensor(b("x", "y"), b("x", "z")),
                Formula::tensor(b("x", "y"), b("z", "x")),
                Formula::tensor(b("y", "x"), b("z", "x")),
            ])
            .unwrap(),
        );
        let trace = one_step();
        let cert = constraint_violation(&gts, &trace, &RuleStyle::Nonlinear, InitialForm::Formula, &alpha)
            .unwrap()
            .expect("contradiction");
        assert_eq!(cert.sequent.ty, Formula::Bot);
        let empty = DerivationSeq::empty(gts.initial.clone());
        assert!(
            constraint_violation(&gts, &empty, &RuleStyle::Nonlinear, InitialForm::Formula, &alpha)
                .unwrap()
                .is_none()
        );
    }
}
