//! The `gts` command line: argument parsing, dispatch and output.
//!
//! Exit codes: 0 affirmative or valid, 1 negative, absent or invalid proof,
//! 2 input error, 3 resource bound exhausted.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dpo::{
    apply_detailed, find_matches, reachable, DerivationSeq, DpoError, Gts, ReachMode, ReachOptions, ReachOutcome,
};
use crate::encode::{
    certify_step, certify_trace, constraint_violation, encode_context, encode_expr, encode_gts, encode_rule,
    formula_equiv, Certificate, EncodeError, InitialForm, RuleStyle,
};
use crate::graph::{canonical_key, classify, congruent, heating_witness, normalize, GraphExpression};
use crate::logic::{check_term, prove, Context, Formula, SearchConfig, SearchError};
use crate::syntax::{parse_formula, ParseError};
use crate::workspace::{Workspace, WorkspaceError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "gts",
    version,
    about = "Graph rewriting with checkable linear-logic certificates"
)]
pub struct Cli {
    /// Declaration file; repeat to load several into one workspace.
    #[arg(short = 'f', long = "file", global = true)]
    pub files: Vec<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    Nonlinear,
    Linear,
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitialArg {
    Components,
    Formula,
}

impl From<InitialArg> for InitialForm {
    fn from(a: InitialArg) -> Self {
        match a {
            InitialArg::Components => InitialForm::Components,
            InitialArg::Formula => InitialForm::Formula,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct TraceArgs {
    /// Target graph to reach from the initial graph.
    pub target: String,
    #[arg(long, default_value_t = 8)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub cap: usize,
    #[arg(long, value_enum, default_value_t = StyleArg::Nonlinear)]
    pub style: StyleArg,
    /// Linear rule instances, e.g. `p=2,q=1`. For `linear` the default is
    /// exactly the usage of the trace found.
    #[arg(long)]
    pub instances: Option<String>,
    #[arg(long, value_enum, default_value_t = InitialArg::Components)]
    pub initial: InitialArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal form, node classification and canonical key of a graph.
    Normalize { graph: String },
    /// Decide structural congruence.
    Congr { g1: String, g2: String },
    /// Decide whether the first graph is a heating of the second.
    Heat { g1: String, g2: String },
    /// List the matches of a rule in a graph.
    Match { rule: String, graph: String },
    /// Apply a rule at the K-th match.
    Apply {
        rule: String,
        graph: String,
        #[arg(long = "match", default_value_t = 0)]
        k: usize,
    },
    /// Bounded breadth-first reachability from the initial graph.
    Reach {
        target: String,
        #[arg(long, default_value_t = 8)]
        max_steps: usize,
        /// Rules used exactly this often, e.g. `p,p,q`.
        #[arg(long, conflicts_with = "at_least")]
        exact: Option<String>,
        /// Rules used at least this often.
        #[arg(long)]
        at_least: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Graph derivation of a graph expression.
    Encode { graph: String },
    /// Formula of a rule.
    EncodeRule { rule: String },
    /// Context and rule formulas of the whole system.
    EncodeGts,
    /// Check a sequent of the workspace, or a certificate file.
    Check {
        sequent: Option<String>,
        #[arg(long, conflicts_with = "sequent")]
        cert: Option<PathBuf>,
    },
    /// Decide linear equivalence of two graph formulas (names or text).
    Equiv { f1: String, f2: String },
    /// Search for a proof of a sequent's goal; its term is ignored.
    Search {
        sequent: String,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Certificate for one rewrite step.
    CertifyStep {
        rule: String,
        graph: String,
        #[arg(long = "match", default_value_t = 0)]
        k: usize,
    },
    /// Certificate that a target is reachable.
    CertifyTrace(TraceArgs),
    /// Certificate of bottom from a negated constraint after a trace.
    Constraint {
        /// Formula name or text.
        formula: String,
        #[command(flatten)]
        trace: ConstraintTrace,
    },
}

#[derive(Debug, clap::Args)]
pub struct ConstraintTrace {
    /// Target graph whose trace is replayed first.
    #[arg(long = "trace")]
    pub target: String,
    #[arg(long, default_value_t = 8)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub cap: usize,
    #[arg(long, value_enum, default_value_t = StyleArg::Nonlinear)]
    pub style: StyleArg,
    #[arg(long)]
    pub instances: Option<String>,
    #[arg(long, value_enum, default_value_t = InitialArg::Components)]
    pub initial: InitialArg,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    text: String,
    json: Value,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }
}

impl From<WorkspaceError> for Failure {
    fn from(e: WorkspaceError) -> Self {
        match e {
            WorkspaceError::Dpo(d) => d.into(),
            other => Failure::input(other),
        }
    }
}

impl From<DpoError> for Failure {
    fn from(e: DpoError) -> Self {
        let code = match e {
            DpoError::CapReached(_) => EXIT_EXHAUSTED,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<EncodeError> for Failure {
    fn from(e: EncodeError) -> Self {
        let code = match &e {
            EncodeError::UnderProvisioned { .. } | EncodeError::UnusedInstances { .. } | EncodeError::Kernel(_) => {
                EXIT_NEGATIVE
            }
            EncodeError::Dpo(DpoError::CapReached(_)) => EXIT_EXHAUSTED,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::input(e)
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Output {
    let name = command_name(&cli.command);
    let result = Workspace::load(&cli.files)
        .map_err(Failure::from)
        .and_then(|ws| dispatch(&ws, &cli.command));
    match result {
        Ok(r) => {
            let stdout = if cli.json {
                let mut v = r.json;
                v["command"] = json!(name);
                v["exit"] = json!(r.code);
                format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize"))
            } else {
                r.text
            };
            Output {
                code: r.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(f) => {
            if cli.json {
                let v = json!({"command": name, "exit": f.code, "error": f.message});
                Output {
                    code: f.code,
                    stdout: format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize")),
                    stderr: String::new(),
                }
            } else {
                Output {
                    code: f.code,
                    stdout: String::new(),
                    stderr: format!("error: {}\n", f.message),
                }
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Normalize { .. } => "normalize",
        Command::Congr { .. } => "congr",
        Command::Heat { .. } => "heat",
        Command::Match { .. } => "match",
        Command::Apply { .. } => "apply",
        Command::Reach { .. } => "reach",
        Command::Encode { .. } => "encode",
        Command::EncodeRule { .. } => "encode-rule",
        Command::EncodeGts => "encode-gts",
        Command::Check { .. } => "check",
        Command::Equiv { .. } => "equiv",
        Command::Search { .. } => "search",
        Command::CertifyStep { .. } => "certify-step",
        Command::CertifyTrace(_) => "certify-trace",
        Command::Constraint { .. } => "constraint",
    }
}

fn names(nodes: impl IntoIterator<Item = impl ToString>) -> Vec<String> {
    nodes.into_iter().map(|n| n.to_string()).collect()
}

fn zone_json(z: &[(String, Formula)]) -> Value {
    Value::Array(
        z.iter()
            .map(|(n, f)| json!({"name": n, "type": f.to_string()}))
            .collect(),
    )
}

fn zone_text(z: &[(String, Formula)]) -> String {
    if z.is_empty() {
        return "(empty)".to_string();
    }
    z.iter().map(|(n, f)| format!("{n}:{f}")).collect::<Vec<_>>().join(", ")
}

/// `p,p,q` as a multiset.
fn multiset(spec: &str) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for r in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        *m.entry(r.to_string()).or_insert(0) += 1;
    }
    m
}

/// `p=2,q=1` as counts.
fn counts(spec: &str) -> Result<BTreeMap<String, usize>, Failure> {
    let mut m = BTreeMap::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (r, k) = part
            .split_once('=')
            .ok_or_else(|| Failure::input(format!("instance count `{part}` is not of the form rule=N")))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("`{k}` is not a count")))?;
        m.insert(r.trim().to_string(), k);
    }
    Ok(m)
}

fn formula_arg(ws: &Workspace, arg: &str) -> Result<Formula, Failure> {
    if let Some(f) = ws.formulas.get(arg) {
        return Ok(f.clone());
    }
    parse_formula(arg).map_err(|e| Failure::input(format!("`{arg}` is neither a formula name nor a formula ({e})")))
}

fn nth_match(g: &GraphExpression, rule: &crate::dpo::RuleExpr, k: usize) -> Result<crate::dpo::Match, Failure> {
    let ms = find_matches(g, rule)?;
    let count = ms.len();
    ms.into_iter()
        .nth(k)
        .ok_or_else(|| Failure::input(format!("match index {k} out of range ({count} matches)")))
}

fn find_trace(gts: &Gts, target: &GraphExpression, max_steps: usize, cap: usize) -> Result<DerivationSeq, Failure> {
    let opts = ReachOptions {
        max_steps,
        frontier_cap: cap,
    };
    match reachable(gts, target, &ReachMode::Unlimited, opts)? {
        ReachOutcome::Found(t) => Ok(t),
        ReachOutcome::NotFound => Err(Failure {
            code: EXIT_NEGATIVE,
            message: format!("target not reachable within {max_steps} steps"),
        }),
        ReachOutcome::Exhausted { explored } => Err(Failure {
            code: EXIT_EXHAUSTED,
            message: format!("state cap reached after {explored} states"),
        }),
    }
}

fn style_for(style: StyleArg, instances: &Option<String>, trace: &DerivationSeq) -> Result<RuleStyle, Failure> {
    Ok(match style {
        StyleArg::Nonlinear => RuleStyle::Nonlinear,
        StyleArg::Linear => RuleStyle::Linear(match instances {
            Some(s) => counts(s)?,
            None => trace.rule_usage(),
        }),
        StyleArg::AtLeast => RuleStyle::AtLeast(match instances {
            Some(s) => counts(s)?,
            None => BTreeMap::new(),
        }),
    })
}

fn certificate_report(cert: &Certificate) -> Report {
    let s = &cert.sequent;
    let mut text = String::new();
    let _ = writeln!(text, "Gamma: {}", zone_text(&s.ctx.gamma));
    let _ = writeln!(text, "Delta: {}", zone_text(&s.ctx.delta));
    let _ = writeln!(text, "term:  {}", s.term);
    let _ = writeln!(text, "type:  {}", s.ty);
    let _ = writeln!(text, "kernel: accepted");
    Report {
        code: EXIT_OK,
        text,
        json: json!({"certificate": cert.to_json()}),
    }
}

fn check_report(ctx: &Context, term: &crate::logic::ProofTerm, ty: &Formula) -> Report {
    match check_term(ctx, term, ty) {
        Ok(()) => Report {
            code: EXIT_OK,
            text: "valid\n".to_string(),
            json: json!({"valid": true, "class": null, "message": null}),
        },
        Err(e) => Report {
            code: EXIT_NEGATIVE,
            text: format!("invalid [{}]: {e}\n", e.class()),
            json: json!({"valid": false, "class": e.class().to_string(), "message": e.to_string()}),
        },
    }
}

/// Reads a certificate written by `--json` back into a context, term and type.
fn load_certificate(path: &PathBuf) -> Result<(Context, crate::logic::ProofTerm, Formula), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let s = Certificate::sequent_from_json(&v).map_err(Failure::input)?;
    Ok((s.ctx, s.term, s.ty))
}

fn dispatch(ws: &Workspace, cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Normalize { graph } => {
            let g = ws.graph(graph)?;
            let n = normalize(g);
            let c = classify(g);
            let key = canonical_key(g);
            let text = format!(
                "{}\nisolated bound: {}\nkey: {key}\n",
                n.to_expression(),
                names(&c.isolated_bound).join(", ")
            );
            Ok(Report {
                code: EXIT_OK,
                text,
                json: json!({
                    "graph": n.to_expression().to_string(),
                    "prefix": names(&n.prefix),
                    "components": names(&n.components),
                    "isolated_bound": names(&c.isolated_bound),
                    "key": key,
                }),
            })
        }
        Command::Congr { g1, g2 } => {
            let (a, b) = (ws.graph(g1)?, ws.graph(g2)?);
            Ok(match congruent(a, b) {
                Some(sigma) => Report {
                    code: EXIT_OK,
                    text: format!("congruent\nrenaming: {sigma}\n"),
                    json: json!({"congruent": true, "renaming": sigma.0}),
                },
                None => Report {
                    code: EXIT_NEGATIVE,
                    text: "not congruent\n".to_string(),
                    json: json!({"congruent": false, "renaming": null}),
                },
            })
        }
        Command::Heat { g1, g2 } => {
            let (a, b) = (ws.graph(g1)?, ws.graph(g2)?);
            Ok(match heating_witness(a, b) {
                Some((restricted, sigma)) => Report {
                    code: EXIT_OK,
                    text: format!(
                        "{g1} is a heating of {g2}\nrestricted: {}\nrenaming: {sigma}\n",
                        names(&restricted).join(", ")
                    ),
                    json: json!({"heating": true, "restricted": names(&restricted), "renaming": sigma.0}),
                },
                None => Report {
                    code: EXIT_NEGATIVE,
                    text: format!("{g1} is not a heating of {g2}\n"),
                    json: json!({"heating": false, "restricted": null, "renaming": null}),
                },
            })
        }
        Command::Match { rule, graph } => {
            let (r, g) = (ws.rule(rule)?, ws.graph(graph)?);
            let ms = find_matches(g, r)?;
            let mut text = format!("{} match(es)\n", ms.len());
            let mut arr = Vec::new();
            for (i, m) in ms.iter().enumerate() {
                let _ = writeln!(text, "[{i}] {m}");
                let d: BTreeMap<&String, &String> = m.d.iter().map(|(k, v)| (k, &v.name)).collect();
                let b: BTreeMap<&String, &String> = m.bound_map.iter().map(|(k, v)| (k, &v.name)).collect();
                let e: BTreeMap<String, u32> = m.edge_map.iter().map(|(k, v)| (k.0.to_string(), v.0)).collect();
                arr.push(json!({"index": i, "d": d, "bound_map": b, "edge_map": e}));
            }
            Ok(Report {
                code: if ms.is_empty() { EXIT_NEGATIVE } else { EXIT_OK },
                text,
                json: json!({"rule": rule, "graph": graph, "matches": arr}),
            })
        }
        Command::Apply { rule, graph, k } => {
            let (r, g) = (ws.rule(rule)?, ws.graph(graph)?);
            let m = nth_match(g, r, *k)?;
            let app = apply_detailed(g, r, &m)?;
            let key = canonical_key(&app.result);
            let created: BTreeMap<&String, &String> = app.created_nodes.iter().map(|(k, v)| (k, &v.name)).collect();
            Ok(Report {
                code: EXIT_OK,
                text: format!("{}\nkey: {key}\n", app.result),
                json: json!({"result": app.result.to_string(), "key": key, "created_nodes": created}),
            })
        }
        Command::Reach {
            target,
            max_steps,
            exact,
            at_least,
            cap,
        } => {
            let gts = ws.gts()?;
            let t = ws.graph(target)?;
            let mode = match (exact, at_least) {
                (Some(s), _) => ReachMode::Exact(multiset(s)),
                (_, Some(s)) => ReachMode::AtLeast(multiset(s)),
                _ => ReachMode::Unlimited,
            };
            let opts = ReachOptions {
                max_steps: *max_steps,
                frontier_cap: *cap,
            };
            Ok(match reachable(&gts, t, &mode, opts)? {
                ReachOutcome::Found(trace) => {
                    let mut text = format!("reachable in {} step(s)\n", trace.len());
                    let _ = writeln!(text, "  {}", trace.states[0]);
                    for (s, g) in trace.steps.iter().zip(&trace.states[1..]) {
                        let _ = writeln!(text, "  => {}", s.matched);
                        let _ = writeln!(text, "  {g}");
                    }
                    Report {
                        code: EXIT_OK,
                        text,
                        json: json!({
                            "outcome": "found",
                            "steps": trace.len(),
                            "trace": trace.entries(),
                            "states": names(&trace.states),
                        }),
                    }
                }
                ReachOutcome::NotFound => Report {
                    code: EXIT_NEGATIVE,
                    text: format!("not reachable within {max_steps} step(s)\n"),
                    json: json!({"outcome": "not_found", "steps": null, "trace": null, "states": null}),
                },
                ReachOutcome::Exhausted { explored } => Report {
                    code: EXIT_EXHAUSTED,
                    text: format!("state cap reached after {explored} states; search incomplete\n"),
                    json: json!({"outcome": "exhausted", "steps": null, "trace": null, "states": null, "explored": explored}),
                },
            })
        }
        Command::Encode { graph } => {
            let g = ws.graph(graph)?;
            let d = encode_expr(g);
            let delta = encode_context(g).delta();
            let text = format!(
                "Gamma: {}\nDelta: {}\nterm:  {}\ntype:  {}\n",
                zone_text(&d.gamma),
                zone_text(&delta),
                d.main_term(),
                d.main_type()
            );
            Ok(Report {
                code: EXIT_OK,
                text,
                json: json!({
                    "gamma": zone_json(&d.gamma),
                    "delta": zone_json(&delta),
                    "term": d.main_term().to_string(),
                    "type": d.main_type().to_string(),
                    "size": d.size(),
                }),
            })
        }
        Command::EncodeRule { rule } => {
            let f = encode_rule(ws.rule(rule)?);
            Ok(Report {
                code: EXIT_OK,
                text: format!("{f}\n"),
                json: json!({"rule": rule, "formula": f.to_string()}),
            })
        }
        Command::EncodeGts => {
            let gts = ws.gts()?;
            let e = encode_gts(&gts);
            let text = format!(
                "Gamma: {}\nrules: {}\nDelta0: {}\n",
                zone_text(&e.gamma),
                zone_text(&e.rules),
                zone_text(&e.delta0)
            );
            Ok(Report {
                code: EXIT_OK,
                text,
                json: json!({"gamma": zone_json(&e.gamma), "rules": zone_json(&e.rules), "delta0": zone_json(&e.delta0)}),
            })
        }
        Command::Check { sequent, cert } => {
            let (ctx, term, ty) = match (sequent, cert) {
                (_, Some(path)) => load_certificate(path)?,
                (Some(name), None) => {
                    let s = ws.sequent(name)?;
                    let term = s
                        .term
                        .clone()
                        .ok_or_else(|| Failure::input(format!("sequent `{name}` has no proof term")))?;
                    (s.ctx.clone(), term, s.ty.clone())
                }
                (None, None) => return Err(Failure::input("give a sequent name or --cert <file>")),
            };
            Ok(check_report(&ctx, &term, &ty))
        }
        Command::Equiv { f1, f2 } => {
            let (a, b) = (formula_arg(ws, f1)?, formula_arg(ws, f2)?);
            let eq = formula_equiv(&a, &b).map_err(Failure::input)?;
            Ok(Report {
                code: if eq { EXIT_OK } else { EXIT_NEGATIVE },
                text: if eq { "equivalent\n" } else { "not equivalent\n" }.to_string(),
                json: json!({"equivalent": eq}),
            })
        }
        Command::Search { sequent, depth } => {
            let s = ws.sequent(sequent)?;
            let cfg = SearchConfig {
                depth: *depth,
                ..SearchConfig::default()
            };
            match prove(&s.ctx, &s.ty, cfg) {
                Ok(Some(t)) => Ok(Report {
                    code: EXIT_OK,
                    text: format!("found: {t}\n"),
                    json: json!({"found": true, "depth": depth, "term": t.to_string()}),
                }),
                Ok(None) => Ok(Report {
                    code: EXIT_NEGATIVE,
                    text: format!("no proof within depth {depth}\n"),
                    json: json!({"found": false, "depth": depth, "term": null}),
                }),
                Err(SearchError::Unsound(e)) => Err(Failure {
                    code: EXIT_NEGATIVE,
                    message: format!("internal error: search produced a term the kernel rejects: {e}"),
                }),
                Err(e) => Err(Failure::input(e)),
            }
        }
        Command::CertifyStep { rule, graph, k } => {
            let (r, g) = (ws.rule(rule)?, ws.graph(graph)?);
            let m = nth_match(g, r, *k)?;
            Ok(certificate_report(&certify_step(g, r, &m)?))
        }
        Command::CertifyTrace(a) => {
            let gts = ws.gts()?;
            let trace = find_trace(&gts, ws.graph(&a.target)?, a.max_steps, a.cap)?;
            let style = style_for(a.style, &a.instances, &trace)?;
            Ok(certificate_report(&certify_trace(
                &gts,
                &trace,
                &style,
                a.initial.into(),
            )?))
        }
        Command::Constraint { formula, trace: a } => {
            let alpha = formula_arg(ws, formula)?;
            let gts = ws.gts()?;
            let trace = find_trace(&gts, ws.graph(&a.target)?, a.max_steps, a.cap)?;
            let style = style_for(a.style, &a.instances, &trace)?;
            match constraint_violation(&gts, &trace, &style, a.initial.into(), &alpha)? {
                Some(cert) => {
                    let mut r = certificate_report(&cert);
                    r.text.insert_str(0, "constraint violated: bottom is derivable\n");
                    Ok(r)
                }
                None => Ok(Report {
                    code: EXIT_NEGATIVE,
                    text: "no contradiction found\n".to_string(),
                    json: json!({"certificate": null}),
                }),
            }
        }
    }
}
