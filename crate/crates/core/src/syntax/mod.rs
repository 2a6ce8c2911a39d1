//! Text formats: type declarations, graphs, rules, formulas, proof terms and
//! sequents.
//!
//! Parsing produces an AST with names still unresolved; [`crate::workspace`]
//! checks it against the type graph. Every AST node prints back in a form the
//! parser accepts.

mod lexer;

use std::fmt;

use thiserror::Error;

use crate::logic::{Context, Formula, ProofTerm};
use lexer::{lex, Tok, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// A graph body before node names are resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawConstituent {
    Edge(String, Vec<String>),
    Nil,
    Par(Box<RawConstituent>, Box<RawConstituent>),
    Nu(String, String, Box<RawConstituent>),
}

/// A sequent as written; the term may be left open with `?`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentDecl {
    pub ctx: Context,
    pub term: Option<ProofTerm>,
    pub ty: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeclKind {
    NodeType(String),
    EdgeType(String, Vec<String>),
    Graph {
        name: String,
        iface: Vec<(String, String)>,
        body: RawConstituent,
    },
    Rule {
        name: String,
        bind: Vec<(String, String)>,
        lhs: RawConstituent,
        rhs: RawConstituent,
    },
    Formula(String, Formula),
    Sequent(String, SequentDecl),
    Init(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub kind: DeclKind,
    pub line: usize,
}

const TERM_KEYWORDS: &[&str] = &[
    "eps", "fn", "nfn", "lfn", "let", "in", "case", "of", "inl", "inr", "error", "fst", "snd", "bang", "pair", "nil",
    "unit", "nil_eq",
];
const FORMULA_KEYWORDS: &[&str] = &["all", "ex", "top", "bot"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn line(&self) -> usize {
        self.toks[self.pos].line
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError::new(
            t.line,
            t.col,
            format!("expected {expected}, found {}", t.tok.describe()),
        ))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.error(&format!("`{k}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.error(what),
        }
    }

    /// An identifier that is not a keyword of the given list.
    fn name(&mut self, what: &str, reserved: &[&str]) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !reserved.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.error(what),
        }
    }

    fn end(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    // ---- formulas -------------------------------------------------------

    fn formula(&mut self) -> PResult<Formula> {
        if self.is_kw("all") || self.is_kw("ex") {
            return self.quantifier();
        }
        let lhs = self.or_level()?;
        if self.eat_sym("-o") {
            Ok(Formula::lolli(lhs, self.formula()?))
        } else if self.eat_sym("->") {
            Ok(Formula::arrow(lhs, self.formula()?))
        } else {
            Ok(lhs)
        }
    }

    fn quantifier(&mut self) -> PResult<Formula> {
        let is_all = self.is_kw("all");
        self.bump();
        let mut binders: Vec<(String, String)> = Vec::new();
        loop {
            let mut group = vec![self.name("a bound variable", FORMULA_KEYWORDS)?];
            while !self.is_sym(":") {
                group.push(self.name("a bound variable or `:`", FORMULA_KEYWORDS)?);
            }
            self.expect_sym(":")?;
            let ty = self.ident("a node type")?;
            binders.extend(group.into_iter().map(|x| (x, ty.clone())));
            if self.eat_sym(".") {
                break;
            }
            self.eat_sym(",");
        }
        let body = self.formula()?;
        Ok(if is_all {
            Formula::forall_all(&binders, body)
        } else {
            Formula::dynex_all(&binders, body)
        })
    }

    fn or_level(&mut self) -> PResult<Formula> {
        let a = self.with_level()?;
        if self.eat_sym("|") {
            Ok(Formula::or(a, self.or_level()?))
        } else {
            Ok(a)
        }
    }

    fn with_level(&mut self) -> PResult<Formula> {
        let a = self.tensor_level()?;
        if self.eat_sym("&") {
            Ok(Formula::with(a, self.with_level()?))
        } else {
            Ok(a)
        }
    }

    fn tensor_level(&mut self) -> PResult<Formula> {
        let a = self.eq_level()?;
        if self.eat_sym("*") {
            Ok(Formula::tensor(a, self.tensor_level()?))
        } else {
            Ok(a)
        }
    }

    fn eq_level(&mut self) -> PResult<Formula> {
        let a = self.bang_level()?;
        if self.eat_sym("==") {
            Ok(Formula::eq(a, self.bang_level()?))
        } else {
            Ok(a)
        }
    }

    fn bang_level(&mut self) -> PResult<Formula> {
        if self.eat_sym("!") {
            Ok(Formula::bang(self.bang_level()?))
        } else {
            self.formula_primary()
        }
    }

    fn formula_primary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Int(1) => {
                self.bump();
                Ok(Formula::One)
            }
            Tok::Sym("(") => {
                self.bump();
                let f = self.formula()?;
                self.expect_sym(")")?;
                Ok(f)
            }
            Tok::Ident(k) if k == "top" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(k) if k == "bot" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Ident(k) if k == "all" || k == "ex" => self.quantifier(),
            Tok::Ident(head) => {
                self.bump();
                if self.eat_sym("(") {
                    let mut args = Vec::new();
                    if !self.is_sym(")") {
                        loop {
                            args.push(self.ident("a variable")?);
                            if !self.eat_sym(",") {
                                break;
                            }
                        }
                    }
                    self.expect_sym(")")?;
                    Ok(Formula::Pred(head, args))
                } else if self.eat_sym("@") {
                    Ok(Formula::RefTo(head, self.ident("a referring variable")?))
                } else {
                    Ok(Formula::Atom(head))
                }
            }
            _ => self.error("a formula"),
        }
    }

    // ---- proof terms ----------------------------------------------------

    fn term(&mut self) -> PResult<ProofTerm> {
        let Tok::Ident(k) = self.peek().clone() else {
            return self.tensor_term();
        };
        match k.as_str() {
            "eps" => {
                self.bump();
                self.expect_sym("(")?;
                let n = self.name("a reference variable", TERM_KEYWORDS)?;
                self.expect_sym("|")?;
                let y = self.name("an individual variable", TERM_KEYWORDS)?;
                self.expect_sym(")")?;
                self.expect_sym(".")?;
                Ok(ProofTerm::eps(n, y, self.term()?))
            }
            "fn" => {
                self.bump();
                let x = self.name("a variable", TERM_KEYWORDS)?;
                self.expect_sym(":")?;
                let ty = self.ident("a node type")?;
                self.expect_sym("=>")?;
                Ok(ProofTerm::lam_ind(x, ty, self.term()?))
            }
            "nfn" | "lfn" => {
                self.bump();
                let x = self.name("a variable", TERM_KEYWORDS)?;
                self.expect_sym(":")?;
                let ty = self.formula()?;
                self.expect_sym("=>")?;
                let body = self.term()?;
                Ok(if k == "nfn" {
                    ProofTerm::lam_nl(x, ty, body)
                } else {
                    ProofTerm::lam_lin(x, ty, body)
                })
            }
            "let" => {
                self.bump();
                self.let_term()
            }
            "case" => {
                self.bump();
                let scrutinee = self.term()?;
                self.expect_kw("of")?;
                self.expect_kw("inl")?;
                let u = self.name("a variable", TERM_KEYWORDS)?;
                self.expect_sym("=>")?;
                let left = self.term()?;
                self.expect_sym("|")?;
                self.expect_kw("inr")?;
                let v = self.name("a variable", TERM_KEYWORDS)?;
                self.expect_sym("=>")?;
                let right = self.term()?;
                Ok(ProofTerm::Case {
                    scrutinee: Box::new(scrutinee),
                    u,
                    left: Box::new(left),
                    v,
                    right: Box::new(right),
                })
            }
            _ => self.tensor_term(),
        }
    }

    fn let_term(&mut self) -> PResult<ProofTerm> {
        enum Pat {
            Nil,
            Bang(String),
            Eps(String, String, String),
            Tensor(String, String),
        }
        let pat = if self.eat_kw("nil") {
            Pat::Nil
        } else if self.eat_sym("!") {
            Pat::Bang(self.name("a variable", TERM_KEYWORDS)?)
        } else if self.eat_kw("eps") {
            self.expect_sym("(")?;
            let n = self.name("a reference variable", TERM_KEYWORDS)?;
            self.expect_sym("|")?;
            let x = self.name("an individual variable", TERM_KEYWORDS)?;
            self.expect_sym(")")?;
            self.expect_sym(".")?;
            let v = self.name("a variable", TERM_KEYWORDS)?;
            Pat::Eps(n, x, v)
        } else {
            let u = self.name("a let pattern", TERM_KEYWORDS)?;
            self.expect_sym("*")?;
            let v = self.name("a variable", TERM_KEYWORDS)?;
            Pat::Tensor(u, v)
        };
        self.expect_sym("=")?;
        let bound = self.term()?;
        self.expect_kw("in")?;
        let body = self.term()?;
        Ok(match pat {
            Pat::Nil => ProofTerm::let_nil(bound, body),
            Pat::Bang(p) => ProofTerm::let_bang(p, bound, body),
            Pat::Eps(n, x, v) => ProofTerm::let_eps(n, x, v, bound, body),
            Pat::Tensor(u, v) => ProofTerm::let_tensor(u, v, bound, body),
        })
    }

    fn binder_ahead(&self) -> bool {
        matches!(self.peek(), Tok::Ident(k) if ["eps", "fn", "nfn", "lfn", "let", "case"].contains(&k.as_str()))
    }

    fn tensor_term(&mut self) -> PResult<ProofTerm> {
        let a = self.lin_app_term()?;
        if self.eat_sym("*") {
            let b = if self.binder_ahead() {
                self.term()?
            } else {
                self.tensor_term()?
            };
            Ok(ProofTerm::tensor(a, b))
        } else {
            Ok(a)
        }
    }

    fn lin_app_term(&mut self) -> PResult<ProofTerm> {
        let mut a = self.app_term()?;
        while self.eat_sym("^") {
            let b = if self.binder_ahead() {
                self.term()?
            } else {
                self.app_term()?
            };
            a = ProofTerm::app_lin(a, b);
        }
        Ok(a)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Sym("(") => true,
            Tok::Ident(k) => {
                !TERM_KEYWORDS.contains(&k.as_str()) || ["nil", "unit", "nil_eq", "pair"].contains(&k.as_str())
            }
            _ => false,
        }
    }

    fn bracketed_formula(&mut self) -> PResult<Formula> {
        self.expect_sym("[")?;
        let f = self.formula()?;
        self.expect_sym("]")?;
        Ok(f)
    }

    fn app_term(&mut self) -> PResult<ProofTerm> {
        let mut head = match self.peek().clone() {
            Tok::Ident(k) if k == "error" => {
                self.bump();
                let f = self.bracketed_formula()?;
                ProofTerm::error(f, self.atom_term()?)
            }
            Tok::Ident(k) if k == "inl" || k == "inr" => {
                self.bump();
                let f = self.bracketed_formula()?;
                let m = self.atom_term()?;
                if k == "inl" {
                    ProofTerm::inl(f, m)
                } else {
                    ProofTerm::inr(f, m)
                }
            }
            Tok::Ident(k) if k == "fst" => {
                self.bump();
                ProofTerm::Fst(Box::new(self.atom_term()?))
            }
            Tok::Ident(k) if k == "snd" => {
                self.bump();
                ProofTerm::Snd(Box::new(self.atom_term()?))
            }
            Tok::Ident(k) if k == "bang" => {
                self.bump();
                ProofTerm::Bang(Box::new(self.atom_term()?))
            }
            _ => self.atom_term()?,
        };
        while self.starts_atom() {
            head = ProofTerm::app_nl(head, self.atom_term()?);
        }
        Ok(head)
    }

    fn atom_term(&mut self) -> PResult<ProofTerm> {
        if self.binder_ahead() {
            return self.term();
        }
        match self.peek().clone() {
            Tok::Sym("(") => {
                self.bump();
                let t = self.term()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Ident(k) => match k.as_str() {
                "nil" => {
                    self.bump();
                    Ok(ProofTerm::Nil)
                }
                "unit" => {
                    self.bump();
                    Ok(ProofTerm::Unit)
                }
                "nil_eq" => {
                    self.bump();
                    Ok(ProofTerm::NilEq)
                }
                "pair" => {
                    self.bump();
                    self.expect_sym("(")?;
                    let a = self.term()?;
                    self.expect_sym(",")?;
                    let b = self.term()?;
                    self.expect_sym(")")?;
                    Ok(ProofTerm::pair(a, b))
                }
                _ if TERM_KEYWORDS.contains(&k.as_str()) => self.error("a proof term"),
                _ => {
                    self.bump();
                    Ok(ProofTerm::Var(k))
                }
            },
            _ => self.error("a proof term"),
        }
    }

    // ---- sequents -------------------------------------------------------

    fn zone(&mut self, stop: &str) -> PResult<Vec<(String, Formula)>> {
        let mut out = Vec::new();
        if self.eat_sym(".") {
            return Ok(out);
        }
        if self.is_sym(stop) {
            return Ok(out);
        }
        loop {
            let x = self.ident("a variable")?;
            self.expect_sym(":")?;
            out.push((x, self.formula()?));
            if !self.eat_sym(",") {
                break;
            }
        }
        Ok(out)
    }

    fn sequent(&mut self) -> PResult<SequentDecl> {
        self.expect_kw("Gamma")?;
        self.expect_sym(":")?;
        let gamma = self.zone(";")?;
        self.expect_sym(";")?;
        self.expect_kw("Delta")?;
        self.expect_sym(":")?;
        let delta = self.zone("|-")?;
        self.expect_sym("|-")?;
        let term = if self.eat_sym("?") { None } else { Some(self.term()?) };
        self.expect_sym("::")?;
        let ty = self.formula()?;
        self.expect_sym(";")?;
        Ok(SequentDecl {
            ctx: Context { gamma, delta },
            term,
            ty,
        })
    }

    // ---- graphs and declarations ------------------------------------------

    fn constituent(&mut self) -> PResult<RawConstituent> {
        let mut a = self.constituent_primary()?;
        while self.eat_sym("||") {
            let b = self.constituent_primary()?;
            a = RawConstituent::Par(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn typed_names(&mut self) -> PResult<Vec<(String, String)>> {
        let mut out = Vec::new();
        loop {
            let x = self.name("a node name", &["nu", "Nil"])?;
            self.expect_sym(":")?;
            out.push((x, self.ident("a node type")?));
            if !self.eat_sym(",") {
                break;
            }
        }
        Ok(out)
    }

    fn constituent_primary(&mut self) -> PResult<RawConstituent> {
        match self.peek().clone() {
            Tok::Sym("(") => {
                self.bump();
                let c = self.constituent()?;
                self.expect_sym(")")?;
                Ok(c)
            }
            Tok::Ident(k) if k == "Nil" => {
                self.bump();
                Ok(RawConstituent::Nil)
            }
            Tok::Ident(k) if k == "nu" => {
                self.bump();
                let names = self.typed_names()?;
                self.expect_sym(".")?;
                let mut body = self.constituent_primary()?;
                for (x, ty) in names.into_iter().rev() {
                    body = RawConstituent::Nu(x, ty, Box::new(body));
                }
                Ok(body)
            }
            Tok::Ident(label) => {
                self.bump();
                self.expect_sym("(")?;
                let mut args = Vec::new();
                if !self.is_sym(")") {
                    loop {
                        args.push(self.ident("a node name")?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym(")")?;
                Ok(RawConstituent::Edge(label, args))
            }
            _ => self.error("an edge, `Nil`, `nu` or `(`"),
        }
    }

    /// `section name:T, ...;` when the section keyword is next.
    fn optional_section(&mut self, kw: &str) -> PResult<Vec<(String, String)>> {
        if !self.eat_kw(kw) {
            return Ok(Vec::new());
        }
        if self.eat_sym(";") {
            return Ok(Vec::new());
        }
        let names = self.typed_names()?;
        self.expect_sym(";")?;
        Ok(names)
    }

    fn decl(&mut self) -> PResult<Decl> {
        let line = self.line();
        let kw = self.ident("a declaration")?;
        let kind = match kw.as_str() {
            "node" => {
                let name = self.ident("a node type name")?;
                self.expect_sym(";")?;
                DeclKind::NodeType(name)
            }
            "edge" => {
                let name = self.ident("an edge type name")?;
                self.expect_sym("(")?;
                let mut args = Vec::new();
                if !self.is_sym(")") {
                    loop {
                        args.push(self.ident("a node type")?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym(")")?;
                self.expect_sym(";")?;
                DeclKind::EdgeType(name, args)
            }
            "graph" => {
                let name = self.ident("a graph name")?;
                self.expect_sym("{")?;
                let iface = self.optional_section("iface")?;
                self.expect_kw("body")?;
                let body = self.constituent()?;
                self.expect_sym(";")?;
                self.expect_sym("}")?;
                DeclKind::Graph { name, iface, body }
            }
            "rule" => {
                let name = self.ident("a rule name")?;
                self.expect_sym("{")?;
                let bind = self.optional_section("bind")?;
                self.expect_kw("lhs")?;
                let lhs = self.constituent()?;
                self.expect_sym(";")?;
                self.expect_kw("rhs")?;
                let rhs = self.constituent()?;
                self.expect_sym(";")?;
                self.expect_sym("}")?;
                DeclKind::Rule { name, bind, lhs, rhs }
            }
            "formula" => {
                let name = self.ident("a formula name")?;
                self.expect_sym("=")?;
                let f = self.formula()?;
                self.expect_sym(";")?;
                DeclKind::Formula(name, f)
            }
            "sequent" => {
                let name = self.ident("a sequent name")?;
                self.expect_sym("{")?;
                let s = self.sequent()?;
                self.expect_sym("}")?;
                DeclKind::Sequent(name, s)
            }
            "init" => {
                let name = self.ident("a graph name")?;
                self.expect_sym(";")?;
                DeclKind::Init(name)
            }
            other => {
                self.pos -= 1;
                return self.error(&format!("a declaration (not `{other}`)"));
            }
        };
        Ok(Decl { kind, line })
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.end()?;
    Ok(f)
}

pub fn parse_term(src: &str) -> Result<ProofTerm, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.end()?;
    Ok(t)
}

pub fn parse_constituent(src: &str) -> Result<RawConstituent, ParseError> {
    let mut p = Parser::new(src)?;
    let c = p.constituent()?;
    p.end()?;
    Ok(c)
}

/// A sequent file: `Gamma: ...; Delta: ... |- M :: f;`.
pub fn parse_sequent(src: &str) -> Result<SequentDecl, ParseError> {
    let mut p = Parser::new(src)?;
    let s = p.sequent()?;
    p.end()?;
    Ok(s)
}

/// A declaration file. A file holding a bare sequent yields one sequent
/// declaration named `default_name`.
pub fn parse_file(src: &str, default_name: &str) -> Result<Vec<Decl>, ParseError> {
    let mut p = Parser::new(src)?;
    if p.is_kw("Gamma") && p.peek_at(1) == &Tok::Sym(":") {
        let line = p.line();
        let s = p.sequent()?;
        p.end()?;
        return Ok(vec![Decl {
            kind: DeclKind::Sequent(default_name.to_string(), s),
            line,
        }]);
    }
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        out.push(p.decl()?);
    }
    Ok(out)
}

impl fmt::Display for RawConstituent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(c: &RawConstituent, f: &mut fmt::Formatter<'_>, operand: bool) -> fmt::Result {
            match c {
                RawConstituent::Edge(l, args) => write!(f, "{l}({})", args.join(",")),
                RawConstituent::Nil => f.write_str("Nil"),
                RawConstituent::Nu(x, ty, b) => {
                    write!(f, "nu {x}:{ty} . ")?;
                    go(b, f, true)
                }
                RawConstituent::Par(l, r) => {
                    if operand {
                        f.write_str("(")?;
                    }
                    go(l, f, false)?;
                    f.write_str(" || ")?;
                    go(r, f, true)?;
                    if operand {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, f, false)
    }
}

fn write_zone(f: &mut fmt::Formatter<'_>, z: &[(String, Formula)]) -> fmt::Result {
    for (i, (x, ty)) in z.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}:{ty}")?;
    }
    Ok(())
}

impl fmt::Display for SequentDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Gamma: ")?;
        write_zone(f, &self.ctx.gamma)?;
        f.write_str("; Delta: ")?;
        write_zone(f, &self.ctx.delta)?;
        f.write_str(" |- ")?;
        match &self.term {
            Some(t) => write!(f, "{t}")?,
            None => f.write_str("?")?,
        }
        write!(f, " :: {};", self.ty)
    }
}

fn typed_list(xs: &[(String, String)]) -> String {
    xs.iter()
        .map(|(x, t)| format!("{x}:{t}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for DeclKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeclKind::NodeType(a) => write!(f, "node {a};"),
            DeclKind::EdgeType(l, args) => write!(f, "edge {l}({});", args.join(", ")),
            DeclKind::Graph { name, iface, body } => {
                write!(f, "graph {name} {{ ")?;
                if !iface.is_empty() {
                    write!(f, "iface {}; ", typed_list(iface))?;
                }
                write!(f, "body {body}; }}")
            }
            DeclKind::Rule { name, bind, lhs, rhs } => {
                write!(f, "rule {name} {{ ")?;
                if !bind.is_empty() {
                    write!(f, "bind {}; ", typed_list(bind))?;
                }
                write!(f, "lhs {lhs}; rhs {rhs}; }}")
            }
            DeclKind::Formula(n, phi) => write!(f, "formula {n} = {phi};"),
            DeclKind::Sequent(n, s) => write!(f, "sequent {n} {{ {s} }}"),
            DeclKind::Init(g) => write!(f, "init {g};"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_precedence() {
        let f = parse_formula("all x1 x2:A. 1 -o b(x1,x2)").unwrap();
        assert_eq!(f.to_string(), "all x1 x2:A. 1 -o b(x1,x2)");
        let g = parse_formula("a * b | c & d -o e -> !f == g").unwrap();
        assert_eq!(
            g,
            Formula::lolli(
                Formula::or(
                    Formula::tensor(Formula::atom("a"), Formula::atom("b")),
                    Formula::with(Formula::atom("c"), Formula::atom("d")),
                ),
                Formula::arrow(
                    Formula::atom("e"),
                    Formula::eq(Formula::bang(Formula::atom("f")), Formula::atom("g")),
                ),
            )
        );
        let r = parse_formula("(A @ x * A @ y) * ex z:A. b(x,z)").unwrap();
        assert_eq!(parse_formula(&r.to_string()).unwrap(), r);
        assert!(parse_formula("b(x,").is_err());
    }

    #[test]
    fn term_precedence() {
        for src in [
            "eps(n_x|x_x). eps(n_y|x_y). c_0",
            "p x y ^ nil",
            "(lfn u:(1 * 1) => u) * nil",
            "let eps(n|x). v = g in let a * b = v in a * b",
            "case w of inl u => (let nil = u in nil) | inr v => v",
            "error[bot] (neg ^ a)",
            "inl[b(x,y)] (fst pair(u, unit)) x",
            "nfn p:(A -> B) => bang (p x)",
            "fn x:A => nil_eq",
        ] {
            let t = parse_term(src).unwrap();
            assert_eq!(t.to_string(), src, "printing {src}");
            assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        }
        assert!(parse_term("let in").is_err());
    }

    #[test]
    fn sequent_file() {
        let s = parse_sequent("Gamma: x:A; Delta: n:A @ x |- eps(n|x). nil :: ex y:A. 1;").unwrap();
        assert_eq!(s.ctx.gamma, vec![("x".to_string(), Formula::atom("A"))]);
        assert_eq!(s.ctx.delta, vec![("n".to_string(), Formula::refto("A", "x"))]);
        assert_eq!(parse_sequent(&s.to_string()).unwrap(), s);
        let open = parse_sequent("Gamma: ; Delta: |- ? :: 1 -o 1;").unwrap();
        assert!(open.term.is_none() && open.ctx.gamma.is_empty());
        assert_eq!(parse_sequent(&open.to_string()).unwrap(), open);
    }

    #[test]
    fn graph_binding_and_association() {
        let c = parse_constituent("nu z:A . b(z,x) || Nil || c(x)").unwrap();
        let expected = RawConstituent::Par(
            Box::new(RawConstituent::Par(
                Box::new(RawConstituent::Nu(
                    "z".into(),
                    "A".into(),
                    Box::new(RawConstituent::Edge("b".into(), vec!["z".into(), "x".into()])),
                )),
                Box::new(RawConstituent::Nil),
            )),
            Box::new(RawConstituent::Edge("c".into(), vec!["x".into()])),
        );
        assert_eq!(c, expected);
        assert_eq!(parse_constituent(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn declarations_round_trip() {
        let src = "node A;\nedge b(A, A);\nrule p { bind x1:A, x2:A; lhs Nil; rhs b(x1,x2); }\n\
                   graph G0 { body nu x:A, y:A, z:A . b(z,x); }\ninit G0;\nformula f = ex x:A. 1;\n\
                   sequent s { Gamma: ; Delta: |- nil :: 1; }";
        let decls = parse_file(src, "unused").unwrap();
        assert_eq!(decls.len(), 7);
        assert_eq!(decls[2].line, 3);
        let printed: String = decls.iter().map(|d| format!("{}\n", d.kind)).collect();
        let again = parse_file(&printed, "unused").unwrap();
        let kinds = |ds: &[Decl]| ds.iter().map(|d| d.kind.clone()).collect::<Vec<_>>();
        assert_eq!(kinds(&again), kinds(&decls));
        assert!(parse_file("", "x").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_file("node A;\nedge b(A A);", "x").unwrap_err();
        assert_eq!((e.line, e.col), (2, 10));
        assert!(e.to_string().starts_with("2:10:"));
    }
}
