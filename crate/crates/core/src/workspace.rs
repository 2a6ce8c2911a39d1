//! Named graphs, rules, formulas and sequents over one type graph, loaded
//! from one or more declaration files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::dpo::{DpoError, Gts, RuleExpr};
use crate::graph::{Constituent, GraphError, GraphExpression, Node, TypeGraph};
use crate::logic::Formula;
use crate::syntax::{parse_file, Decl, DeclKind, ParseError, RawConstituent, SequentDecl};

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("{file}: cannot read: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{source}")]
    Parse {
        file: String,
        #[source]
        source: ParseError,
    },
    #[error("{file}:{line}: {message}")]
    Resolve { file: String, line: usize, message: String },
    #[error("{kind} `{name}` is defined twice ({first} and {second})")]
    Duplicate {
        kind: &'static str,
        name: String,
        first: String,
        second: String,
    },
    #[error("no {kind} named `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("no initial graph: declare `init <graph>;` or a graph named G0")]
    NoInitial,
    #[error(transparent)]
    Dpo(#[from] DpoError),
}

#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub type_graph: TypeGraph,
    pub graphs: BTreeMap<String, GraphExpression>,
    pub rules: BTreeMap<String, RuleExpr>,
    pub formulas: BTreeMap<String, Formula>,
    pub sequents: BTreeMap<String, SequentDecl>,
    pub init: Option<String>,
}

/// Where a declaration came from, for messages.
struct Located {
    file: String,
    decl: Decl,
}

impl Located {
    fn at(&self) -> String {
        format!("{}:{}", self.file, self.decl.line)
    }

    fn fail(&self, message: impl ToString) -> WorkspaceError {
        WorkspaceError::Resolve {
            file: self.file.clone(),
            line: self.decl.line,
            message: message.to_string(),
        }
    }
}

fn resolve(
    raw: &RawConstituent,
    env: &mut Vec<(String, String)>,
    scope: &BTreeMap<String, String>,
    next_id: &mut u32,
) -> Result<Constituent, String> {
    Ok(match raw {
        RawConstituent::Nil => Constituent::Nil,
        RawConstituent::Edge(label, args) => {
            let args = args
                .iter()
                .map(|a| {
                    env.iter()
                        .rev()
                        .find(|(x, _)| x == a)
                        .map(|(_, t)| t.clone())
                        .or_else(|| scope.get(a).cloned())
                        .map(|t| Node::new(a.clone(), t))
                        .ok_or_else(|| format!("unknown node `{a}` in `{label}(...)`"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let id = *next_id;
            *next_id += 1;
            Constituent::edge(id, label.clone(), args)
        }
        RawConstituent::Par(a, b) => {
            let a = resolve(a, env, scope, next_id)?;
            Constituent::par(a, resolve(b, env, scope, next_id)?)
        }
        RawConstituent::Nu(x, ty, body) => {
            env.push((x.clone(), ty.clone()));
            let body = resolve(body, env, scope, next_id);
            env.pop();
            Constituent::nu(Node::new(x.clone(), ty.clone()), body?)
        }
    })
}

fn resolve_body(raw: &RawConstituent, vars: &[(String, String)]) -> Result<(Vec<Node>, Constituent), String> {
    let mut scope = BTreeMap::new();
    let mut nodes = Vec::new();
    for (x, t) in vars {
        if scope.insert(x.clone(), t.clone()).is_some() {
            return Err(format!("`{x}` is listed twice"));
        }
        nodes.push(Node::new(x.clone(), t.clone()));
    }
    let body = resolve(raw, &mut Vec::new(), &scope, &mut 0)?;
    Ok((nodes, body))
}

impl Workspace {
    pub fn load<P: AsRef<Path>>(paths: &[P]) -> Result<Self, WorkspaceError> {
        let mut sources = Vec::new();
        for p in paths {
            let path: PathBuf = p.as_ref().to_path_buf();
            let text = std::fs::read_to_string(&path).map_err(|source| WorkspaceError::Io {
                file: path.display().to_string(),
                source,
            })?;
            sources.push((path.display().to_string(), text));
        }
        Self::from_sources(&sources)
    }

    /// Builds a workspace from `(file name, contents)` pairs. A file holding
    /// a bare sequent names it after the file stem.
    pub fn from_sources(sources: &[(String, String)]) -> Result<Self, WorkspaceError> {
        let mut all = Vec::new();
        for (file, text) in sources {
            let stem = Path::new(file)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| file.clone());
            let decls = parse_file(text, &stem).map_err(|source| WorkspaceError::Parse {
                file: file.clone(),
                source,
            })?;
            all.extend(decls.into_iter().map(|decl| Located {
                file: file.clone(),
                decl,
            }));
        }

        let mut ws = Workspace::default();
        let mut seen: BTreeMap<(&'static str, String), String> = BTreeMap::new();
        let mut claim = |kind: &'static str, name: &str, at: String| -> Result<(), WorkspaceError> {
            if let Some(first) = seen.insert((kind, name.to_string()), at.clone()) {
                return Err(WorkspaceError::Duplicate {
                    kind,
                    name: name.to_string(),
                    first,
                    second: at,
                });
            }
            Ok(())
        };

        // Types first, so that declaration order across files does not matter.
        for l in &all {
            match &l.decl.kind {
                DeclKind::NodeType(a) => {
                    claim("node type", a, l.at())?;
                    ws.type_graph.add_node_type(a.clone()).map_err(|e| l.fail(e))?;
                }
                DeclKind::EdgeType(name, _) => claim("edge type", name, l.at())?,
                _ => {}
            }
        }
        for l in &all {
            if let DeclKind::EdgeType(name, args) = &l.decl.kind {
                ws.type_graph
                    .add_edge_type(name.clone(), args.clone())
                    .map_err(|e| l.fail(e))?;
            }
        }

        for l in &all {
            match &l.decl.kind {
                DeclKind::NodeType(_) | DeclKind::EdgeType(..) => {}
                DeclKind::Graph { name, iface, body } => {
                    claim("graph", name, l.at())?;
                    let (nodes, body) = resolve_body(body, iface).map_err(|m| l.fail(m))?;
                    let g = GraphExpression::new(&ws.type_graph, nodes, body).map_err(|e| l.fail(e))?;
                    ws.graphs.insert(name.clone(), g);
                }
                DeclKind::Rule { name, bind, lhs, rhs } => {
                    claim("rule", name, l.at())?;
                    let (vars, lhs) = resolve_body(lhs, bind).map_err(|m| l.fail(m))?;
                    let (_, rhs) = resolve_body(rhs, bind).map_err(|m| l.fail(m))?;
                    let r = RuleExpr::new(&ws.type_graph, name.clone(), vars, lhs, rhs).map_err(|e| l.fail(e))?;
                    ws.rules.insert(name.clone(), r);
                }
                DeclKind::Formula(name, f) => {
                    claim("formula", name, l.at())?;
                    ws.formulas.insert(name.clone(), f.clone());
                }
                DeclKind::Sequent(name, s) => {
                    claim("sequent", name, l.at())?;
                    ws.sequents.insert(name.clone(), s.clone());
                }
                DeclKind::Init(g) => {
                    claim("init", "", l.at())?;
                    ws.init = Some(g.clone());
                }
            }
        }
        if let Some(g) = &ws.init {
            ws.graph(g)?;
        }
        Ok(ws)
    }

    pub fn graph(&self, name: &str) -> Result<&GraphExpression, WorkspaceError> {
        self.graphs.get(name).ok_or_else(|| WorkspaceError::Unknown {
            kind: "graph",
            name: name.to_string(),
        })
    }

    pub fn rule(&self, name: &str) -> Result<&RuleExpr, WorkspaceError> {
        self.rules.get(name).ok_or_else(|| WorkspaceError::Unknown {
            kind: "rule",
            name: name.to_string(),
        })
    }

    pub fn formula(&self, name: &str) -> Result<&Formula, WorkspaceError> {
        self.formulas.get(name).ok_or_else(|| WorkspaceError::Unknown {
            kind: "formula",
            name: name.to_string(),
        })
    }

    pub fn sequent(&self, name: &str) -> Result<&SequentDecl, WorkspaceError> {
        self.sequents.get(name).ok_or_else(|| WorkspaceError::Unknown {
            kind: "sequent",
            name: name.to_string(),
        })
    }

    /// The initial graph: the one named by `init`, else the graph `G0`.
    pub fn initial(&self) -> Result<&GraphExpression, WorkspaceError> {
        match &self.init {
            Some(g) => self.graph(g),
            None => self.graphs.get("G0").ok_or(WorkspaceError::NoInitial),
        }
    }

    /// The system made of every rule and the initial graph.
    pub fn gts(&self) -> Result<Gts, WorkspaceError> {
        let g0 = self.initial()?.clone();
        Ok(Gts::new(self.type_graph.clone(), self.rules.values().cloned(), g0)?)
    }

    pub fn is_empty(&self) -> bool {
        self.type_graph.is_empty()
            && self.graphs.is_empty()
            && self.rules.is_empty()
            && self.formulas.is_empty()
            && self.sequents.is_empty()
    }
}

impl From<GraphError> for WorkspaceError {
    fn from(e: GraphError) -> Self {
        WorkspaceError::Dpo(DpoError::Graph(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYSTEM: &str = "node A;\nedge b(A, A);\n\
        rule p { bind x1:A, x2:A; lhs Nil; rhs b(x1,x2); }\n\
        graph G0 { body nu x:A . nu y:A . nu z:A . b(z,x); }\n";

    fn ws(files: &[(&str, &str)]) -> Result<Workspace, WorkspaceError> {
        let s: Vec<(String, String)> = files.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        Workspace::from_sources(&s)
    }

    #[test]
    fn example_system() {
        let w = ws(&[("sys.gts", SYSTEM)]).unwrap();
        assert_eq!(w.rules.len(), 1);
        assert_eq!(w.graphs.len(), 1);
        let gts = w.gts().unwrap();
        assert_eq!(gts.initial.edge_count(), 1);
        assert_eq!(gts.initial.to_string(), "{} |= nu x:A . nu y:A . nu z:A . b(z,x)");
    }

    #[test]
    fn empty_file_is_empty_workspace() {
        let w = ws(&[("e.gts", "")]).unwrap();
        assert!(w.is_empty());
        assert!(matches!(w.gts(), Err(WorkspaceError::NoInitial)));
    }

    #[test]
    fn arity_and_names_checked() {
        let e = ws(&[("a.gts", "node A;\nedge b(A, A);\ngraph G { iface x:A; body b(x); }")]).unwrap_err();
        assert!(matches!(e, WorkspaceError::Resolve { line: 3, .. }), "{e}");
        assert!(e.to_string().contains("expects 2 arguments"));
        let e = ws(&[("a.gts", "node A;\nedge b(A, A);\ngraph G { body b(x,x); }")]).unwrap_err();
        assert!(e.to_string().contains("unknown node `x`"));
        let e = ws(&[("a.gts", "node A;\nedge b(A, B);")]).unwrap_err();
        assert!(e.to_string().contains("unknown node type `B`"));
    }

    #[test]
    fn duplicates_across_files_rejected() {
        let e = ws(&[("a.gts", SYSTEM), ("b.gts", "rule p { lhs Nil; rhs Nil; }")]).unwrap_err();
        assert!(matches!(e, WorkspaceError::Duplicate { kind: "rule", .. }), "{e}");
        let e = ws(&[("a.gts", SYSTEM), ("b.gts", "node A;")]).unwrap_err();
        assert!(matches!(e, WorkspaceError::Duplicate { kind: "node type", .. }));
    }

    #[test]
    fn split_files_and_bare_sequents() {
        let w = ws(&[
            ("rules.gts", "rule p { bind x1:A, x2:A; lhs Nil; rhs b(x1,x2); }"),
            ("types.gts", "node A; edge b(A, A);"),
            ("iso.seq", "Gamma: x:A; Delta: n:A @ x |- eps(n|x). nil :: ex y:A. 1;"),
        ])
        .unwrap();
        assert!(w.rules.contains_key("p"));
        assert!(w.sequents.contains_key("iso"));
    }
}
