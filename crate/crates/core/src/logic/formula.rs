use std::collections::BTreeSet;
use std::fmt;

/// Formulas. Quantifiers range over node types, and `RefTo(A, x)` is the
/// node type `A` referred to by the individual variable `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Pred(String, Vec<String>),
    One,
    Top,
    Bot,
    Tensor(Box<Formula>, Box<Formula>),
    Lolli(Box<Formula>, Box<Formula>),
    With(Box<Formula>, Box<Formula>),
    Arrow(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Bang(Box<Formula>),
    Forall(String, String, Box<Formula>),
    DynEx(String, String, Box<Formula>),
    RefTo(String, String),
    Eq(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: impl Into<String>) -> Self {
        Formula::Atom(a.into())
    }

    pub fn pred<S: Into<String>>(label: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        Formula::Pred(label.into(), args.into_iter().map(Into::into).collect())
    }

    pub fn refto(ty: impl Into<String>, x: impl Into<String>) -> Self {
        Formula::RefTo(ty.into(), x.into())
    }

    pub fn tensor(a: Formula, b: Formula) -> Self {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    pub fn lolli(a: Formula, b: Formula) -> Self {
        Formula::Lolli(Box::new(a), Box::new(b))
    }

    pub fn with(a: Formula, b: Formula) -> Self {
        Formula::With(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Formula, b: Formula) -> Self {
        Formula::Arrow(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn bang(a: Formula) -> Self {
        Formula::Bang(Box::new(a))
    }

    pub fn forall(x: impl Into<String>, ty: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(x.into(), ty.into(), Box::new(body))
    }

    pub fn dynex(x: impl Into<String>, ty: impl Into<String>, body: Formula) -> Self {
        Formula::DynEx(x.into(), ty.into(), Box::new(body))
    }

    pub fn eq(a: Formula, b: Formula) -> Self {
        Formula::Eq(Box::new(a), Box::new(b))
    }

    /// `¬α ≜ α ⊸ ⊥`.
    pub fn negation(a: Formula) -> Self {
        Formula::lolli(a, Formula::Bot)
    }

    /// `(α ⊸ β) & (β ⊸ α)`.
    pub fn lequiv(a: Formula, b: Formula) -> Self {
        Formula::with(Formula::lolli(a.clone(), b.clone()), Formula::lolli(b, a))
    }

    /// Right-nested tensor; `1` when empty.
    pub fn tensor_all(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Formula::One;
        };
        while let Some(p) = parts.pop() {
            acc = Formula::tensor(p, acc);
        }
        acc
    }

    /// Right-nested disjunction of at least one formula.
    pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Option<Self> {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let mut acc = parts.pop()?;
        while let Some(p) = parts.pop() {
            acc = Formula::or(p, acc);
        }
        Some(acc)
    }

    /// `∃̂ x̄. body`, first binder outermost.
    pub fn dynex_all(binders: &[(String, String)], body: Formula) -> Self {
        binders
            .iter()
            .rev()
            .fold(body, |acc, (x, ty)| Formula::dynex(x.clone(), ty.clone(), acc))
    }

    pub fn forall_all(binders: &[(String, String)], body: Formula) -> Self {
        binders
            .iter()
            .rev()
            .fold(body, |acc, (x, ty)| Formula::forall(x.clone(), ty.clone(), acc))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn has_free(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_) | Formula::One | Formula::Top | Formula::Bot => {}
            Formula::Pred(_, args) => {
                for a in args {
                    if !bound.contains(&a.as_str()) {
                        out.insert(a.clone());
                    }
                }
            }
            Formula::RefTo(_, x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Formula::Tensor(a, b)
            | Formula::Lolli(a, b)
            | Formula::With(a, b)
            | Formula::Arrow(a, b)
            | Formula::Or(a, b)
            | Formula::Eq(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Bang(a) => a.collect_free(bound, out),
            Formula::Forall(x, _, body) | Formula::DynEx(x, _, body) => {
                bound.push(x);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Formula::Atom(_) | Formula::One | Formula::Top | Formula::Bot => {}
                Formula::Pred(_, args) => out.extend(args.iter().cloned()),
                Formula::RefTo(_, x) => {
                    out.insert(x.clone());
                }
                Formula::Tensor(a, b)
                | Formula::Lolli(a, b)
                | Formula::With(a, b)
                | Formula::Arrow(a, b)
                | Formula::Or(a, b)
                | Formula::Eq(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Bang(a) => go(a, out),
                Formula::Forall(x, _, body) | Formula::DynEx(x, _, body) => {
                    out.insert(x.clone());
                    go(body, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// `α[t/x]`, capture-avoiding: a binder equal to `t` is renamed first.
    pub fn subst(&self, x: &str, t: &str) -> Formula {
        if x == t || !self.has_free(x) {
            return self.clone();
        }
        let bin = |a: &Formula, b: &Formula| (Box::new(a.subst(x, t)), Box::new(b.subst(x, t)));
        match self {
            Formula::Atom(_) | Formula::One | Formula::Top | Formula::Bot => self.clone(),
            Formula::Pred(l, args) => Formula::Pred(
                l.clone(),
                args.iter()
                    .map(|a| if a == x { t.to_string() } else { a.clone() })
                    .collect(),
            ),
            Formula::RefTo(ty, v) => Formula::RefTo(ty.clone(), if v == x { t.into() } else { v.clone() }),
            Formula::Tensor(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Tensor(a, b)
            }
            Formula::Lolli(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Lolli(a, b)
            }
            Formula::With(a, b) => {
                let (a, b) = bin(a, b);
                Formula::With(a, b)
            }
            Formula::Arrow(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Arrow(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Or(a, b)
            }
            Formula::Eq(a, b) => {
                let (a, b) = bin(a, b);
                Formula::Eq(a, b)
            }
            Formula::Bang(a) => Formula::Bang(Box::new(a.subst(x, t))),
            Formula::Forall(y, ty, body) | Formula::DynEx(y, ty, body) => {
                let (y, body) = if y == t {
                    let mut avoid = body.all_vars();
                    avoid.insert(t.to_string());
                    avoid.insert(x.to_string());
                    let y2 = fresh_var(y, &avoid);
                    let renamed = body.subst(y, &y2);
                    (y2, renamed)
                } else {
                    (y.clone(), (**body).clone())
                };
                let body = Box::new(body.subst(x, t));
                match self {
                    Formula::Forall(..) => Formula::Forall(y, ty.clone(), body),
                    _ => Formula::DynEx(y, ty.clone(), body),
                }
            }
        }
    }

    /// Simultaneous renaming of free variables, applied one at a time
    /// through fresh intermediates so that swaps work.
    pub fn rename_many(&self, pairs: &[(String, String)]) -> Formula {
        let mut avoid = self.all_vars();
        for (a, b) in pairs {
            avoid.insert(a.clone());
            avoid.insert(b.clone());
        }
        let mut temps = Vec::new();
        let mut f = self.clone();
        for (from, _) in pairs {
            let tmp = fresh_var(&format!("{from}_tmp"), &avoid);
            avoid.insert(tmp.clone());
            f = f.subst(from, &tmp);
            temps.push(tmp);
        }
        for ((_, to), tmp) in pairs.iter().zip(temps) {
            f = f.subst(&tmp, to);
        }
        f
    }

    /// The graph-formula fragment: `1`, `⊗`, `∃̂`, `↓↦`, edge predicates.
    pub fn is_graph_formula(&self) -> bool {
        match self {
            Formula::One | Formula::Pred(..) | Formula::RefTo(..) => true,
            Formula::Tensor(a, b) => a.is_graph_formula() && b.is_graph_formula(),
            Formula::DynEx(_, _, b) => b.is_graph_formula(),
            _ => false,
        }
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::DynEx(..) | Formula::Lolli(..) | Formula::Arrow(..) => 0,
            Formula::Or(..) => 1,
            Formula::With(..) => 2,
            Formula::Tensor(..) => 3,
            Formula::Eq(..) => 4,
            Formula::Bang(..) => 5,
            _ => 6,
        }
    }
}

/// `base'`, `base''`, … avoiding `avoid`; `base` itself if free.
pub fn fresh_var(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    fn var_eq(x: &str, y: &str, env: &[(&str, &str)]) -> bool {
        for (l, r) in env.iter().rev() {
            if *l == x || *r == y {
                return *l == x && *r == y;
            }
        }
        x == y
    }
    fn go<'a>(a: &'a Formula, b: &'a Formula, env: &mut Vec<(&'a str, &'a str)>) -> bool {
        use Formula::*;
        match (a, b) {
            (Atom(x), Atom(y)) => x == y,
            (One, One) | (Top, Top) | (Bot, Bot) => true,
            (Pred(l1, a1), Pred(l2, a2)) => {
                l1 == l2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| var_eq(x, y, env))
            }
            (RefTo(t1, x), RefTo(t2, y)) => t1 == t2 && var_eq(x, y, env),
            (Tensor(a1, b1), Tensor(a2, b2))
            | (Lolli(a1, b1), Lolli(a2, b2))
            | (With(a1, b1), With(a2, b2))
            | (Arrow(a1, b1), Arrow(a2, b2))
            | (Or(a1, b1), Or(a2, b2))
            | (Eq(a1, b1), Eq(a2, b2)) => go(a1, a2, env) && go(b1, b2, env),
            (Bang(a1), Bang(a2)) => go(a1, a2, env),
            (Forall(x, t1, b1), Forall(y, t2, b2)) | (DynEx(x, t1, b1), DynEx(y, t2, b2)) => {
                if t1 != t2 {
                    return false;
                }
                env.push((x, y));
                let r = go(b1, b2, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// `α#(x,y) ≜ (α[y/x])[x/y] = α`: abstracting `x` over `α[y/x]` recovers
/// `α`, so `y` has no occurrence in `α` other than through `x`.
pub fn freshness(alpha: &Formula, x: &str, y: &str) -> bool {
    alpha_eq(&alpha.subst(x, y).subst(y, x), alpha)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f, 0)
    }
}

fn write_formula(phi: &Formula, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
    let paren = phi.level() < min;
    if paren {
        f.write_str("(")?;
    }
    match phi {
        Formula::Atom(a) => f.write_str(a)?,
        Formula::Pred(l, args) => write!(f, "{l}({})", args.join(","))?,
        Formula::One => f.write_str("1")?,
        Formula::Top => f.write_str("top")?,
        Formula::Bot => f.write_str("bot")?,
        Formula::RefTo(a, x) => write!(f, "{a} @ {x}")?,
        Formula::Tensor(a, b) => bin(f, a, " * ", b, 3)?,
        Formula::With(a, b) => bin(f, a, " & ", b, 2)?,
        Formula::Or(a, b) => bin(f, a, " | ", b, 1)?,
        Formula::Lolli(a, b) => bin(f, a, " -o ", b, 0)?,
        Formula::Arrow(a, b) => bin(f, a, " -> ", b, 0)?,
        Formula::Eq(a, b) => {
            write_formula(a, f, 5)?;
            f.write_str(" == ")?;
            write_formula(b, f, 5)?;
        }
        Formula::Bang(a) => {
            f.write_str("!")?;
            write_formula(a, f, 5)?;
        }
        Formula::Forall(..) | Formula::DynEx(..) => {
            let is_all = matches!(phi, Formula::Forall(..));
            f.write_str(if is_all { "all" } else { "ex" })?;
            let mut cur = phi;
            loop {
                let (x, ty, body) = match cur {
                    Formula::Forall(x, ty, b) if is_all => (x, ty, b),
                    Formula::DynEx(x, ty, b) if !is_all => (x, ty, b),
                    _ => unreachable!("loop only continues on same quantifier"),
                };
                write!(f, " {x}")?;
                let same = match &**body {
                    Formula::Forall(_, t2, _) if is_all => t2 == ty,
                    Formula::DynEx(_, t2, _) if !is_all => t2 == ty,
                    _ => false,
                };
                if same {
                    cur = body;
                    continue;
                }
                write!(f, ":{ty}. ")?;
                write_formula(body, f, 0)?;
                break;
            }
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

fn bin(f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, level: u8) -> fmt::Result {
    write_formula(a, f, level + 1)?;
    f.write_str(op)?;
    write_formula(b, f, level)
}
