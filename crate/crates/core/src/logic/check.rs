use std::collections::BTreeSet;

use super::{alpha_eq, freshness, Context, Formula, KernelError, ProofTerm, Sequent};

/// Resources a subterm consumed. `slack` records that a `⊤` or `error`
/// below may absorb any further resources left over.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Usage {
    used: BTreeSet<String>,
    slack: bool,
}

impl Usage {
    fn one(name: &str) -> Self {
        Usage {
            used: [name.to_string()].into_iter().collect(),
            slack: false,
        }
    }

    fn sink() -> Self {
        Usage {
            used: BTreeSet::new(),
            slack: true,
        }
    }

    /// Multiplicative combination: the two parts must be disjoint.
    fn join(mut self, other: Usage, rule: &'static str) -> Result<Usage, KernelError> {
        if let Some(v) = self.used.intersection(&other.used).next() {
            return Err(KernelError::LinearReuse { var: v.clone(), rule });
        }
        self.used.extend(other.used);
        self.slack |= other.slack;
        Ok(self)
    }

    /// Additive combination: both branches run on the same resources, up
    /// to what a sink in either branch can absorb.
    fn additive(a: Usage, b: Usage) -> Result<Usage, KernelError> {
        if a.used == b.used {
            return Ok(Usage {
                used: a.used,
                slack: a.slack && b.slack,
            });
        }
        let ok =
            (a.slack && a.used.is_subset(&b.used)) || (b.slack && b.used.is_subset(&a.used)) || (a.slack && b.slack);
        if !ok {
            return Err(KernelError::AdditiveMismatch {
                left: a.used.into_iter().collect(),
                right: b.used.into_iter().collect(),
            });
        }
        let slack = a.slack && b.slack;
        let mut used = a.used;
        used.extend(b.used);
        Ok(Usage { used, slack })
    }

    fn require_empty(self, construct: &'static str) -> Result<(), KernelError> {
        if self.used.is_empty() {
            Ok(())
        } else {
            Err(KernelError::NonlinearConsumes {
                construct,
                used: self.used.into_iter().collect(),
            })
        }
    }
}

enum Zone {
    Gamma,
    Delta,
}

struct Checker {
    gamma: Vec<(String, Formula)>,
    delta: Vec<(String, Formula)>,
}

fn mismatch(expected: impl ToString, found: impl ToString) -> KernelError {
    KernelError::Mismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

impl Checker {
    fn lookup(&self, name: &str) -> Option<(Zone, &Formula)> {
        if let Some((_, ty)) = self.delta.iter().rev().find(|(n, _)| n == name) {
            return Some((Zone::Delta, ty));
        }
        self.gamma
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, ty)| (Zone::Gamma, ty))
    }

    fn gamma_type(&self, name: &str) -> Option<&Formula> {
        self.gamma.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Names a new binder must avoid: every context name and every variable
    /// free in a context formula.
    fn occupied(&self, name: &str) -> bool {
        self.gamma
            .iter()
            .chain(self.delta.iter())
            .any(|(n, ty)| n == name || ty.has_free(name))
    }

    fn push_gamma(&mut self, name: &str, ty: Formula) -> Result<(), KernelError> {
        if self.occupied(name) {
            return Err(KernelError::Shadowing(name.to_string()));
        }
        self.gamma.push((name.to_string(), ty));
        Ok(())
    }

    fn push_delta(&mut self, name: &str, ty: Formula) -> Result<(), KernelError> {
        if self.gamma.iter().chain(self.delta.iter()).any(|(n, _)| n == name) {
            return Err(KernelError::Shadowing(name.to_string()));
        }
        if let Formula::RefTo(_, x) = &ty {
            let clash = self
                .delta
                .iter()
                .any(|(_, t)| matches!(t, Formula::RefTo(_, y) if y == x));
            if clash {
                return Err(KernelError::Uniqueness {
                    var: name.to_string(),
                    referring: x.clone(),
                });
            }
        }
        self.delta.push((name.to_string(), ty));
        Ok(())
    }

    /// Leaves the scope of a linear binder.
    fn release(&mut self, name: &str, usage: &mut Usage) -> Result<(), KernelError> {
        let pos = self
            .delta
            .iter()
            .rposition(|(n, _)| n == name)
            .expect("released variable was pushed");
        self.delta.remove(pos);
        if !usage.used.remove(name) && !usage.slack {
            return Err(KernelError::LinearUnused(name.to_string()));
        }
        Ok(())
    }

    fn pop_gamma(&mut self, name: &str) {
        let pos = self
            .gamma
            .iter()
            .rposition(|(n, _)| n == name)
            .expect("popped variable was pushed");
        self.gamma.remove(pos);
    }

    /// The reference `n :: β ↓↦ y`, checked against `Γ(y) = β` (NId).
    fn reference(&self, n: &str, y: &str) -> Result<String, KernelError> {
        let not_ref = |reason: String| KernelError::NotAReference {
            var: n.to_string(),
            to: y.to_string(),
            reason,
        };
        match self.lookup(n) {
            None => Err(KernelError::Unbound(n.to_string())),
            Some((Zone::Gamma, _)) => Err(not_ref("it is not a linear resource".into())),
            Some((Zone::Delta, Formula::RefTo(beta, x))) => {
                if x != y {
                    return Err(not_ref(format!("it refers to `{x}`")));
                }
                match self.gamma_type(y) {
                    Some(Formula::Atom(a)) if a == beta => Ok(beta.clone()),
                    Some(other) => Err(not_ref(format!("`{y}` has type `{other}`, not `{beta}`"))),
                    None => Err(not_ref(format!("`{y}` is not an individual variable in scope"))),
                }
            }
            Some((Zone::Delta, other)) => Err(not_ref(format!("its type is `{other}`"))),
        }
    }

    fn infer(&mut self, t: &ProofTerm) -> Result<(Formula, Usage), KernelError> {
        use ProofTerm::*;
        match t {
            Var(x) => match self.lookup(x) {
                None => Err(KernelError::Unbound(x.clone())),
                Some((Zone::Gamma, ty)) => Ok((ty.clone(), Usage::default())),
                Some((Zone::Delta, ty)) => {
                    let ty = ty.clone();
                    if let Formula::RefTo(_, y) = &ty {
                        self.reference(x, y)?;
                    }
                    Ok((ty, Usage::one(x)))
                }
            },
            Nil => Ok((Formula::One, Usage::default())),
            Unit => Ok((Formula::Top, Usage::sink())),
            NilEq => Err(KernelError::NotSynthesizable(t.to_string())),
            Tensor(a, b) => {
                let (ta, ua) = self.infer(a)?;
                let (tb, ub) = self.infer(b)?;
                Ok((Formula::tensor(ta, tb), ua.join(ub, "tensor introduction")?))
            }
            Eps { n, y, body } => {
                let beta = self.reference(n, y)?;
                let (alpha, mut u) = self.infer(body)?;
                if u.used.contains(n) {
                    return Err(KernelError::WitnessReuse(n.clone()));
                }
                u.used.insert(n.clone());
                Ok((Formula::dynex(y.clone(), beta, alpha), u))
            }
            LamInd { x, ty, body } => {
                self.push_gamma(x, Formula::Atom(ty.clone()))?;
                let r = self.infer(body);
                self.pop_gamma(x);
                let (tau, u) = r?;
                Ok((Formula::forall(x.clone(), ty.clone(), tau), u))
            }
            LamNl { p, ty, body } => {
                self.push_gamma(p, ty.clone())?;
                let r = self.infer(body);
                self.pop_gamma(p);
                let (tau, u) = r?;
                Ok((Formula::arrow(ty.clone(), tau), u))
            }
            LamLin { u: var, ty, body } => {
                self.push_delta(var, ty.clone())?;
                let r = self.infer(body);
                let (tau, mut u) = match r {
                    Ok(v) => v,
                    Err(e) => {
                        self.delta.pop();
                        return Err(e);
                    }
                };
                self.release(var, &mut u)?;
                Ok((Formula::lolli(ty.clone(), tau), u))
            }
            AppLin(m, n) => {
                let (tm, um) = self.infer(m)?;
                let Formula::Lolli(a, b) = tm else {
                    return Err(mismatch("a linear implication", tm));
                };
                let un = self.check(n, &a)?;
                Ok((*b, um.join(un, "linear application")?))
            }
            AppNl(m, n) => {
                let (tm, um) = self.infer(m)?;
                match tm {
                    Formula::Arrow(a, b) => {
                        self.check(n, &a)?
                            .require_empty("argument of an unrestricted application")?;
                        Ok((*b, um))
                    }
                    Formula::Forall(x, ty, body) => {
                        let ProofTerm::Var(y) = &**n else {
                            return Err(mismatch(format!("an individual variable of type {ty}"), n));
                        };
                        match self.lookup(y) {
                            Some((Zone::Gamma, Formula::Atom(a))) if *a == ty => {}
                            Some((Zone::Gamma, other)) => return Err(mismatch(Formula::Atom(ty), other)),
                            Some((Zone::Delta, _)) => {
                                return Err(KernelError::NonlinearConsumes {
                                    construct: "instantiation of a universal",
                                    used: vec![y.clone()],
                                })
                            }
                            None => return Err(KernelError::Unbound(y.clone())),
                        }
                        Ok((body.subst(&x, y), um))
                    }
                    other => Err(mismatch("an implication or a universal", other)),
                }
            }
            Error(ty, m) => {
                let mut u = self.check(m, &Formula::Bot)?;
                u.slack = true;
                Ok((ty.clone(), u))
            }
            Pair(a, b) => {
                let (ta, ua) = self.infer(a)?;
                let (tb, ub) = self.infer(b)?;
                Ok((Formula::with(ta, tb), Usage::additive(ua, ub)?))
            }
            Fst(m) | Snd(m) => {
                let (tm, u) = self.infer(m)?;
                let Formula::With(a, b) = tm else {
                    return Err(mismatch("an additive conjunction", tm));
                };
                Ok((if matches!(t, Fst(_)) { *a } else { *b }, u))
            }
            Case {
                scrutinee,
                u: lu,
                left,
                v: rv,
                right,
            } => {
                let (ts, us) = self.infer(scrutinee)?;
                let Formula::Or(a, b) = ts else {
                    return Err(mismatch("a disjunction", ts));
                };
                let (tl, ul) = self.branch(lu, &a, left, None)?;
                let (_, ur) = self.branch(rv, &b, right, Some(&tl))?;
                Ok((tl, us.join(Usage::additive(ul, ur)?, "disjunction elimination")?))
            }
            Inl(other, m) => {
                let (tm, u) = self.infer(m)?;
                Ok((Formula::or(tm, other.clone()), u))
            }
            Inr(other, m) => {
                let (tm, u) = self.infer(m)?;
                Ok((Formula::or(other.clone(), tm), u))
            }
            Bang(m) => {
                let (tm, u) = self.infer(m)?;
                u.require_empty("bang")?;
                Ok((Formula::bang(tm), Usage::default()))
            }
            LetTensor { .. } | LetNil { .. } | LetBang { .. } | LetEps { .. } => self.let_form(t, None),
        }
    }

    /// A case branch: binds `var :: ty` linearly around `body`.
    fn branch(
        &mut self,
        var: &str,
        ty: &Formula,
        body: &ProofTerm,
        goal: Option<&Formula>,
    ) -> Result<(Formula, Usage), KernelError> {
        self.push_delta(var, ty.clone())?;
        let r = match goal {
            Some(g) => self.check(body, g).map(|u| (g.clone(), u)),
            None => self.infer(body),
        };
        let (t, mut u) = match r {
            Ok(v) => v,
            Err(e) => {
                self.delta.retain(|(n, _)| n != var);
                return Err(e);
            }
        };
        self.release(var, &mut u)?;
        Ok((t, u))
    }

    /// The four `let` eliminations, in inference (`goal = None`) or
    /// checking mode.
    fn let_form(&mut self, t: &ProofTerm, goal: Option<&Formula>) -> Result<(Formula, Usage), KernelError> {
        use ProofTerm::*;
        let body_of = |s: &mut Checker, body: &ProofTerm| match goal {
            Some(g) => s.check(body, g).map(|u| (g.clone(), u)),
            None => s.infer(body),
        };
        match t {
            LetTensor { u, v, bound, body } => {
                let (tb, ub) = self.infer(bound)?;
                let Formula::Tensor(a, b) = tb else {
                    return Err(mismatch("a tensor", tb));
                };
                self.push_delta(u, *a)?;
                if let Err(e) = self.push_delta(v, *b) {
                    self.delta.pop();
                    return Err(e);
                }
                let r = body_of(self, body);
                let (ty, mut un) = match r {
                    Ok(x) => x,
                    Err(e) => {
                        self.delta.pop();
                        self.delta.pop();
                        return Err(e);
                    }
                };
                let rv = self.release(v, &mut un);
                let ru = self.release(u, &mut un);
                rv?;
                ru?;
                Ok((ty, ub.join(un, "tensor elimination")?))
            }
            LetNil { bound, body } => {
                let ub = self.check(bound, &Formula::One)?;
                let (ty, un) = body_of(self, body)?;
                Ok((ty, ub.join(un, "unit elimination")?))
            }
            LetBang { p, bound, body } => {
                let (tb, ub) = self.infer(bound)?;
                let Formula::Bang(a) = tb else {
                    return Err(mismatch("a banged formula", tb));
                };
                self.push_gamma(p, *a)?;
                let r = body_of(self, body);
                self.pop_gamma(p);
                let (ty, un) = r?;
                Ok((ty, ub.join(un, "bang elimination")?))
            }
            LetEps { n, x, v, bound, body } => {
                let (tb, ub) = self.infer(bound)?;
                let Formula::DynEx(y, beta, alpha) = tb else {
                    return Err(mismatch("a resource-bound existential", tb));
                };
                if goal.is_some_and(|g| g.has_free(x)) {
                    return Err(KernelError::Shadowing(x.clone()));
                }
                self.push_gamma(x, Formula::Atom(beta.clone()))?;
                if let Err(e) = self.push_delta(n, Formula::RefTo(beta.clone(), x.clone())) {
                    self.pop_gamma(x);
                    return Err(e);
                }
                if let Err(e) = self.push_delta(v, alpha.subst(&y, x)) {
                    self.delta.pop();
                    self.pop_gamma(x);
                    return Err(e);
                }
                let r = body_of(self, body);
                let (ty, mut un) = match r {
                    Ok(r) => r,
                    Err(e) => {
                        self.delta.pop();
                        self.delta.pop();
                        self.pop_gamma(x);
                        return Err(e);
                    }
                };
                let rv = self.release(v, &mut un);
                let rn = self.release(n, &mut un);
                self.pop_gamma(x);
                rv?;
                rn?;
                if ty.has_free(x) {
                    return Err(KernelError::Escape(x.clone()));
                }
                Ok((ty, ub.join(un, "existential elimination")?))
            }
            _ => unreachable!("let_form called on a let"),
        }
    }

    fn check(&mut self, t: &ProofTerm, goal: &Formula) -> Result<Usage, KernelError> {
        use ProofTerm::*;
        match (t, goal) {
            (Unit, Formula::Top) => Ok(Usage::sink()),
            (NilEq, Formula::Eq(a, b)) => {
                if alpha_eq(a, b) {
                    Ok(Usage::default())
                } else {
                    Err(mismatch(a, b))
                }
            }
            (Tensor(a, b), Formula::Tensor(ga, gb)) => {
                let ua = self.check(a, ga)?;
                let ub = self.check(b, gb)?;
                ua.join(ub, "tensor introduction")
            }
            (Eps { n, y, body }, Formula::DynEx(x, beta, alpha)) => {
                let b2 = self.reference(n, y)?;
                if b2 != *beta {
                    return Err(mismatch(Formula::Atom(beta.clone()), Formula::Atom(b2)));
                }
                if !freshness(alpha, x, y) {
                    return Err(KernelError::Freshness {
                        formula: goal.to_string(),
                        x: x.clone(),
                        y: y.clone(),
                    });
                }
                let mut u = self.check(body, &alpha.subst(x, y))?;
                if u.used.contains(n) {
                    return Err(KernelError::WitnessReuse(n.clone()));
                }
                u.used.insert(n.clone());
                Ok(u)
            }
            (LamInd { x, ty, body }, Formula::Forall(x2, ty2, alpha)) => {
                if ty != ty2 {
                    return Err(KernelError::Annotation {
                        annotation: ty.clone(),
                        expected: ty2.clone(),
                    });
                }
                let target = alpha.subst(x2, x);
                self.push_gamma(x, Formula::Atom(ty.clone()))?;
                let r = self.check(body, &target);
                self.pop_gamma(x);
                r
            }
            (LamInd { x, ty, body }, Formula::Arrow(a, b)) => self.check(
                &ProofTerm::lam_nl(x.clone(), Formula::Atom(ty.clone()), (**body).clone()),
                &Formula::Arrow(a.clone(), b.clone()),
            ),
            (LamNl { p, ty, body }, Formula::Arrow(a, b)) => {
                if !alpha_eq(ty, a) {
                    return Err(KernelError::Annotation {
                        annotation: ty.to_string(),
                        expected: a.to_string(),
                    });
                }
                self.push_gamma(p, ty.clone())?;
                let r = self.check(body, b);
                self.pop_gamma(p);
                r
            }
            (LamLin { u: var, ty, body }, Formula::Lolli(a, b)) => {
                if !alpha_eq(ty, a) {
                    return Err(KernelError::Annotation {
                        annotation: ty.to_string(),
                        expected: a.to_string(),
                    });
                }
                self.push_delta(var, ty.clone())?;
                let mut u = match self.check(body, b) {
                    Ok(u) => u,
                    Err(e) => {
                        self.delta.retain(|(n, _)| n != var);
                        return Err(e);
                    }
                };
                self.release(var, &mut u)?;
                Ok(u)
            }
            (Error(ty, m), _) => {
                if !alpha_eq(ty, goal) {
                    return Err(KernelError::Annotation {
                        annotation: ty.to_string(),
                        expected: goal.to_string(),
                    });
                }
                let mut u = self.check(m, &Formula::Bot)?;
                u.slack = true;
                Ok(u)
            }
            (Pair(a, b), Formula::With(ga, gb)) => {
                let ua = self.check(a, ga)?;
                let ub = self.check(b, gb)?;
                Usage::additive(ua, ub)
            }
            (Inl(other, m), Formula::Or(ga, gb)) => {
                if !alpha_eq(other, gb) {
                    return Err(KernelError::Annotation {
                        annotation: other.to_string(),
                        expected: gb.to_string(),
                    });
                }
                self.check(m, ga)
            }
            (Inr(other, m), Formula::Or(ga, gb)) => {
                if !alpha_eq(other, ga) {
                    return Err(KernelError::Annotation {
                        annotation: other.to_string(),
                        expected: ga.to_string(),
                    });
                }
                self.check(m, gb)
            }
            (Bang(m), Formula::Bang(a)) => {
                self.check(m, a)?.require_empty("bang")?;
                Ok(Usage::default())
            }
            (
                Case {
                    scrutinee,
                    u: lu,
                    left,
                    v: rv,
                    right,
                },
                _,
            ) => {
                let (ts, us) = self.infer(scrutinee)?;
                let Formula::Or(a, b) = ts else {
                    return Err(mismatch("a disjunction", ts));
                };
                let (_, ul) = self.branch(lu, &a, left, Some(goal))?;
                let (_, ur) = self.branch(rv, &b, right, Some(goal))?;
                us.join(Usage::additive(ul, ur)?, "disjunction elimination")
            }
            (LetTensor { .. } | LetNil { .. } | LetBang { .. } | LetEps { .. }, _) => {
                self.let_form(t, Some(goal)).map(|(_, u)| u)
            }
            _ => {
                let (ty, u) = self.infer(t)?;
                if alpha_eq(&ty, goal) {
                    Ok(u)
                } else {
                    Err(mismatch(goal, ty))
                }
            }
        }
    }
}

fn finish(ctx: &Context, u: Usage) -> Result<(), KernelError> {
    if u.slack {
        return Ok(());
    }
    for (n, _) in &ctx.delta {
        if !u.used.contains(n) {
            return Err(KernelError::LinearUnused(n.clone()));
        }
    }
    Ok(())
}

fn checker(ctx: &Context) -> Result<Checker, KernelError> {
    ctx.well_formed()?;
    Ok(Checker {
        gamma: ctx.gamma.clone(),
        delta: ctx.delta.clone(),
    })
}

/// Decides whether `Γ; Δ ⊢ M :: α` is derivable, with `Δ` consumed exactly
/// (up to what `⊤` and `error` absorb).
pub fn check_term(ctx: &Context, term: &ProofTerm, ty: &Formula) -> Result<(), KernelError> {
    let mut c = checker(ctx)?;
    let u = c.check(term, ty)?;
    finish(ctx, u)
}

/// Synthesizes the type of `M` in `Γ; Δ`, requiring every resource used.
pub fn infer_term(ctx: &Context, term: &ProofTerm) -> Result<Formula, KernelError> {
    let mut c = checker(ctx)?;
    let (ty, u) = c.infer(term)?;
    finish(ctx, u)?;
    Ok(ty)
}

pub fn check(s: &Sequent) -> Result<(), KernelError> {
    check_term(&s.ctx, &s.term, &s.ty)
}
