use std::fmt;

use super::Formula;

/// Proof terms. A variable is resolved against the context, linear zone
/// first, so one `Var` covers individual, unrestricted, reference and linear
/// variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofTerm {
    Var(String),
    /// `nil :: 1`
    Nil,
    /// `⟨⟩ :: ⊤`
    Unit,
    /// Witness of `α = α`.
    NilEq,
    Tensor(Box<ProofTerm>, Box<ProofTerm>),
    /// `ε̂(n|y). M`
    Eps {
        n: String,
        y: String,
        body: Box<ProofTerm>,
    },
    /// `λx:A. M` proving `∀x:A. α`.
    LamInd {
        x: String,
        ty: String,
        body: Box<ProofTerm>,
    },
    /// `λp:α. M` proving `α → β`.
    LamNl {
        p: String,
        ty: Formula,
        body: Box<ProofTerm>,
    },
    /// `λ̂u:α. M` proving `α ⊸ β`.
    LamLin {
        u: String,
        ty: Formula,
        body: Box<ProofTerm>,
    },
    /// `M ^ N`
    AppLin(Box<ProofTerm>, Box<ProofTerm>),
    /// `M N`, both `→E` and `∀E`.
    AppNl(Box<ProofTerm>, Box<ProofTerm>),
    Error(Formula, Box<ProofTerm>),
    Pair(Box<ProofTerm>, Box<ProofTerm>),
    Fst(Box<ProofTerm>),
    Snd(Box<ProofTerm>),
    Case {
        scrutinee: Box<ProofTerm>,
        u: String,
        left: Box<ProofTerm>,
        v: String,
        right: Box<ProofTerm>,
    },
    /// `inl^β M :: α ∨ β`
    Inl(Formula, Box<ProofTerm>),
    /// `inr^α M :: α ∨ β`
    Inr(Formula, Box<ProofTerm>),
    Bang(Box<ProofTerm>),
    LetTensor {
        u: String,
        v: String,
        bound: Box<ProofTerm>,
        body: Box<ProofTerm>,
    },
    LetNil {
        bound: Box<ProofTerm>,
        body: Box<ProofTerm>,
    },
    LetBang {
        p: String,
        bound: Box<ProofTerm>,
        body: Box<ProofTerm>,
    },
    /// `let ε̂(n|x). v = M in N`
    LetEps {
        n: String,
        x: String,
        v: String,
        bound: Box<ProofTerm>,
        body: Box<ProofTerm>,
    },
}

impl ProofTerm {
    pub fn var(x: impl Into<String>) -> Self {
        ProofTerm::Var(x.into())
    }

    pub fn tensor(a: ProofTerm, b: ProofTerm) -> Self {
        ProofTerm::Tensor(Box::new(a), Box::new(b))
    }

    /// Right-nested tensor; `nil` when empty.
    pub fn tensor_all(parts: impl IntoIterator<Item = ProofTerm>) -> Self {
        let mut parts: Vec<ProofTerm> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return ProofTerm::Nil;
        };
        while let Some(p) = parts.pop() {
            acc = ProofTerm::tensor(p, acc);
        }
        acc
    }

    pub fn eps(n: impl Into<String>, y: impl Into<String>, body: ProofTerm) -> Self {
        ProofTerm::Eps {
            n: n.into(),
            y: y.into(),
            body: Box::new(body),
        }
    }

    pub fn lam_ind(x: impl Into<String>, ty: impl Into<String>, body: ProofTerm) -> Self {
        ProofTerm::LamInd {
            x: x.into(),
            ty: ty.into(),
            body: Box::new(body),
        }
    }

    pub fn lam_nl(p: impl Into<String>, ty: Formula, body: ProofTerm) -> Self {
        ProofTerm::LamNl {
            p: p.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn lam_lin(u: impl Into<String>, ty: Formula, body: ProofTerm) -> Self {
        ProofTerm::LamLin {
            u: u.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn app_lin(m: ProofTerm, n: ProofTerm) -> Self {
        ProofTerm::AppLin(Box::new(m), Box::new(n))
    }

    pub fn app_nl(m: ProofTerm, n: ProofTerm) -> Self {
        ProofTerm::AppNl(Box::new(m), Box::new(n))
    }

    pub fn pair(m: ProofTerm, n: ProofTerm) -> Self {
        ProofTerm::Pair(Box::new(m), Box::new(n))
    }

    pub fn error(ty: Formula, m: ProofTerm) -> Self {
        ProofTerm::Error(ty, Box::new(m))
    }

    pub fn inl(other: Formula, m: ProofTerm) -> Self {
        ProofTerm::Inl(other, Box::new(m))
    }

    pub fn inr(other: Formula, m: ProofTerm) -> Self {
        ProofTerm::Inr(other, Box::new(m))
    }

    pub fn let_tensor(u: impl Into<String>, v: impl Into<String>, bound: ProofTerm, body: ProofTerm) -> Self {
        ProofTerm::LetTensor {
            u: u.into(),
            v: v.into(),
            bound: Box::new(bound),
            body: Box::new(body),
        }
    }

    pub fn let_nil(bound: ProofTerm, body: ProofTerm) -> Self {
        ProofTerm::LetNil {
            bound: Box::new(bound),
            body: Box::new(body),
        }
    }

    pub fn let_bang(p: impl Into<String>, bound: ProofTerm, body: ProofTerm) -> Self {
        ProofTerm::LetBang {
            p: p.into(),
            bound: Box::new(bound),
            body: Box::new(body),
        }
    }

    pub fn let_eps(
        n: impl Into<String>,
        x: impl Into<String>,
        v: impl Into<String>,
        bound: ProofTerm,
        body: ProofTerm,
    ) -> Self {
        ProofTerm::LetEps {
            n: n.into(),
            x: x.into(),
            v: v.into(),
            bound: Box::new(bound),
            body: Box::new(body),
        }
    }

    /// Number of constructors, a rough size measure.
    pub fn size(&self) -> usize {
        use ProofTerm::*;
        match self {
            Var(_) | Nil | Unit | NilEq => 1,
            Tensor(a, b) | AppLin(a, b) | AppNl(a, b) | Pair(a, b) => 1 + a.size() + b.size(),
            Eps { body, .. } | LamInd { body, .. } | LamNl { body, .. } | LamLin { body, .. } => 1 + body.size(),
            Error(_, m) | Fst(m) | Snd(m) | Inl(_, m) | Inr(_, m) | Bang(m) => 1 + m.size(),
            Case {
                scrutinee, left, right, ..
            } => 1 + scrutinee.size() + left.size() + right.size(),
            LetTensor { bound, body, .. }
            | LetNil { bound, body }
            | LetBang { bound, body, .. }
            | LetEps { bound, body, .. } => 1 + bound.size() + body.size(),
        }
    }

    fn level(&self) -> u8 {
        use ProofTerm::*;
        match self {
            Eps { .. }
            | LamInd { .. }
            | LamNl { .. }
            | LamLin { .. }
            | LetTensor { .. }
            | LetNil { .. }
            | LetBang { .. }
            | LetEps { .. }
            | Case { .. } => 0,
            Tensor(..) => 1,
            AppLin(..) => 2,
            AppNl(..) | Error(..) | Fst(_) | Snd(_) | Inl(..) | Inr(..) | Bang(_) => 3,
            Var(_) | Nil | Unit | NilEq | Pair(..) => 4,
        }
    }
}

impl fmt::Display for ProofTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f, 0)
    }
}

/// `lfn u:f => M` needs the annotation parenthesised when it is not atomic,
/// since `=>` is not a formula operator but `-o` inside it would read fine;
/// parentheses keep it unambiguous either way.
fn annot(f: &mut fmt::Formatter<'_>, ty: &Formula) -> fmt::Result {
    match ty {
        Formula::Atom(_) | Formula::Pred(..) | Formula::One | Formula::Top | Formula::Bot => {
            write!(f, "{ty}")
        }
        _ => write!(f, "({ty})"),
    }
}

fn write_term(t: &ProofTerm, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
    use ProofTerm::*;
    let paren = t.level() < min;
    if paren {
        f.write_str("(")?;
    }
    match t {
        Var(x) => f.write_str(x)?,
        Nil => f.write_str("nil")?,
        Unit => f.write_str("unit")?,
        NilEq => f.write_str("nil_eq")?,
        Pair(a, b) => {
            f.write_str("pair(")?;
            write_term(a, f, 0)?;
            f.write_str(", ")?;
            write_term(b, f, 0)?;
            f.write_str(")")?;
        }
        Tensor(a, b) => {
            write_term(a, f, 2)?;
            f.write_str(" * ")?;
            write_term(b, f, 1)?;
        }
        AppLin(a, b) => {
            write_term(a, f, 2)?;
            f.write_str(" ^ ")?;
            write_term(b, f, 3)?;
        }
        AppNl(a, b) => {
            write_term(a, f, 3)?;
            f.write_str(" ")?;
            write_term(b, f, 4)?;
        }
        Error(ty, m) => {
            f.write_str("error[")?;
            write!(f, "{ty}")?;
            f.write_str("] ")?;
            write_term(m, f, 4)?;
        }
        Fst(m) => {
            f.write_str("fst ")?;
            write_term(m, f, 4)?;
        }
        Snd(m) => {
            f.write_str("snd ")?;
            write_term(m, f, 4)?;
        }
        Inl(ty, m) => {
            write!(f, "inl[{ty}] ")?;
            write_term(m, f, 4)?;
        }
        Inr(ty, m) => {
            write!(f, "inr[{ty}] ")?;
            write_term(m, f, 4)?;
        }
        Bang(m) => {
            f.write_str("bang ")?;
            write_term(m, f, 4)?;
        }
        Eps { n, y, body } => {
            write!(f, "eps({n}|{y}). ")?;
            write_term(body, f, 0)?;
        }
        LamInd { x, ty, body } => {
            write!(f, "fn {x}:{ty} => ")?;
            write_term(body, f, 0)?;
        }
        LamNl { p, ty, body } => {
            write!(f, "nfn {p}:")?;
            annot(f, ty)?;
            f.write_str(" => ")?;
            write_term(body, f, 0)?;
        }
        LamLin { u, ty, body } => {
            write!(f, "lfn {u}:")?;
            annot(f, ty)?;
            f.write_str(" => ")?;
            write_term(body, f, 0)?;
        }
        LetTensor { u, v, bound, body } => {
            write!(f, "let {u} * {v} = ")?;
            write_term(bound, f, 0)?;
            f.write_str(" in ")?;
            write_term(body, f, 0)?;
        }
        LetNil { bound, body } => {
            f.write_str("let nil = ")?;
            write_term(bound, f, 0)?;
            f.write_str(" in ")?;
            write_term(body, f, 0)?;
        }
        LetBang { p, bound, body } => {
            write!(f, "let !{p} = ")?;
            write_term(bound, f, 0)?;
            f.write_str(" in ")?;
            write_term(body, f, 0)?;
        }
        LetEps { n, x, v, bound, body } => {
            write!(f, "let eps({n}|{x}). {v} = ")?;
            write_term(bound, f, 0)?;
            f.write_str(" in ")?;
            write_term(body, f, 0)?;
        }
        Case {
            scrutinee,
            u,
            left,
            v,
            right,
        } => {
            f.write_str("case ")?;
            write_term(scrutinee, f, 0)?;
            write!(f, " of inl {u} => ")?;
            // The left branch must not swallow the `|` separator; binders
            // are parenthesised there.
            write_term(left, f, 1)?;
            write!(f, " | inr {v} => ")?;
            write_term(right, f, 0)?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_precedence() {
        let t = ProofTerm::eps("n", "x", ProofTerm::tensor(ProofTerm::var("c"), ProofTerm::Nil));
        assert_eq!(t.to_string(), "eps(n|x). c * nil");
        let app = ProofTerm::app_lin(
            ProofTerm::app_nl(
                ProofTerm::app_nl(ProofTerm::var("p"), ProofTerm::var("x")),
                ProofTerm::var("y"),
            ),
            ProofTerm::Nil,
        );
        assert_eq!(app.to_string(), "p x y ^ nil");
        let lam = ProofTerm::lam_lin("u", Formula::tensor(Formula::One, Formula::One), ProofTerm::var("u"));
        assert_eq!(
            ProofTerm::tensor(lam, ProofTerm::Nil).to_string(),
            "(lfn u:(1 * 1) => u) * nil"
        );
    }
}
