//! Syntax-directed, bidirectional type checking for the four modes.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use serde::Serialize;

use super::decl::{DeclEnv, DeclInfo};
use super::{Name, Polarity, Sort, Ty};
use crate::surface::{node_id, DeclKind, Side, Span, SpanMap, Term};

/// Which of the four systems a program is checked in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    /// Classical recursion over data.
    #[serde(rename = "s-")]
    SMinus,
    /// Ramified recursion over data.
    #[serde(rename = "rs-")]
    RSMinus,
    /// Classical recursion and corecursion.
    #[serde(rename = "s")]
    S,
    /// Ramified recursion and corecursion.
    #[serde(rename = "rs")]
    RS,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::SMinus, Mode::RSMinus, Mode::S, Mode::RS];

    pub fn is_ramified(self) -> bool {
        matches!(self, Mode::RSMinus | Mode::RS)
    }

    pub fn allows_codata(self) -> bool {
        matches!(self, Mode::S | Mode::RS)
    }

    /// The classical mode with the same data/codata reach.
    pub fn classical(self) -> Mode {
        if self.allows_codata() {
            Mode::S
        } else {
            Mode::SMinus
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::SMinus => "s-",
            Mode::RSMinus => "rs-",
            Mode::S => "s",
            Mode::RS => "rs",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "s-" => Ok(Mode::SMinus),
            "rs-" => Ok(Mode::RSMinus),
            "s" => Ok(Mode::S),
            "rs" => Ok(Mode::RS),
            _ => Err(format!("unknown mode `{s}` (expected s-, rs-, s or rs)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeErrorKind {
    Mismatch,
    CannotInfer,
    UnboundVariable,
    UnknownConstructor,
    UnknownType,
    NotAFunction,
    NotAProduct,
    NotASum,
    NotData,
    NotCodata,
    LowerWithSafeFreeVariable,
    LowerNotSafeGround,
    FoldSubjectNotNormal,
    FoldMotiveNotSafe,
    UnfoldSeedNotSafe,
    MixedPolarityPair,
    MixedPolaritySum,
    SafeDependence,
    CodataInDataMode,
    RamifiedInClassicalMode,
    ClassicalInRamifiedMode,
}

impl TypeErrorKind {
    pub fn code(self) -> &'static str {
        use TypeErrorKind::*;
        match self {
            Mismatch => "mismatch",
            CannotInfer => "cannot-infer",
            UnboundVariable => "unbound-variable",
            UnknownConstructor => "unknown-constructor",
            UnknownType => "unknown-type",
            NotAFunction => "not-a-function",
            NotAProduct => "not-a-product",
            NotASum => "not-a-sum",
            NotData => "not-data",
            NotCodata => "not-codata",
            LowerWithSafeFreeVariable => "lower-with-safe-free-variable",
            LowerNotSafeGround => "lower-not-safe-ground",
            FoldSubjectNotNormal => "fold-subject-not-normal",
            FoldMotiveNotSafe => "fold-motive-not-safe",
            UnfoldSeedNotSafe => "unfold-seed-not-safe",
            MixedPolarityPair => "mixed-polarity-pair",
            MixedPolaritySum => "mixed-polarity-sum",
            SafeDependence => "safe-dependence",
            CodataInDataMode => "codata-in-data-mode",
            RamifiedInClassicalMode => "ramified-in-classical-mode",
            ClassicalInRamifiedMode => "classical-in-ramified-mode",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub message: String,
    pub span: Option<Span>,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

impl TypeError {
    fn new(kind: TypeErrorKind, message: impl Into<String>) -> TypeError {
        TypeError { kind, message: message.into(), span: None, expected: None, actual: None }
    }

    fn types(mut self, expected: impl fmt::Display, actual: &Ty) -> TypeError {
        self.expected = Some(expected.to_string());
        self.actual = Some(actual.to_string());
        self
    }

    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = self.span {
            write!(f, "{s}: ")?;
        }
        write!(f, "{} [{}]", self.message, self.code())?;
        if let (Some(e), Some(a)) = (&self.expected, &self.actual) {
            write!(f, " (expected {e}, found {a})")?;
        }
        Ok(())
    }
}

/// Variable typings, innermost binding last.
#[derive(Clone, Debug, Default)]
pub struct TyCtx {
    vars: Vec<(Name, Ty)>,
}

impl TyCtx {
    pub fn new() -> TyCtx {
        TyCtx::default()
    }

    pub fn push(&mut self, x: Name, t: Ty) {
        self.vars.push((x, t));
    }

    pub fn pop(&mut self) {
        self.vars.pop();
    }

    pub fn lookup(&self, x: &str) -> Option<&Ty> {
        self.vars.iter().rev().find(|(y, _)| &**y == x).map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, Ty)> {
        self.vars.iter()
    }
}

impl FromIterator<(Name, Ty)> for TyCtx {
    fn from_iter<I: IntoIterator<Item = (Name, Ty)>>(iter: I) -> TyCtx {
        TyCtx { vars: iter.into_iter().collect() }
    }
}

/// A variable is safe when its type is a safe ground type.
pub fn is_safe_var_type(t: &Ty) -> bool {
    t.is_safe_ground()
}

/// The free variables of `t` whose context type is safe.
pub fn sfv(t: &Term, ctx: &TyCtx) -> Result<BTreeSet<Name>, TypeError> {
    let mut out = BTreeSet::new();
    for x in t.free_vars() {
        let ty = ctx
            .lookup(&x)
            .ok_or_else(|| TypeError::new(TypeErrorKind::UnboundVariable, format!("unbound variable `{x}`")))?;
        if is_safe_var_type(ty) {
            out.insert(x);
        }
    }
    Ok(out)
}

/// The safe image of a normal ground type.
pub fn safe_of(t: &Ty, env: &DeclEnv) -> Result<Ty, TypeError> {
    for (b, _) in t.bases() {
        if env.get(&b).is_none() {
            return Err(TypeError::new(TypeErrorKind::UnknownType, format!("unknown type `{b}`")));
        }
    }
    if !t.is_normal_ground() {
        return Err(TypeError::new(TypeErrorKind::Mismatch, format!("`{t}` is not a normal ground type"))
            .types("a normal ground type", t));
    }
    Ok(t.to_safe())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeClass {
    pub level: usize,
    pub rank: usize,
    pub ground: bool,
    pub polarity: Polarity,
}

pub fn classify_type(t: &Ty, env: &DeclEnv) -> Result<TypeClass, TypeError> {
    let mut rank = 0;
    for (b, _) in t.bases() {
        let d = env
            .get(&b)
            .ok_or_else(|| TypeError::new(TypeErrorKind::UnknownType, format!("unknown type `{b}`")))?;
        rank = rank.max(d.rank);
    }
    Ok(TypeClass { level: t.level(), rank, ground: t.is_ground(), polarity: t.polarity() })
}

/// One typing judgment `Γ ⊢ e : τ`, with the safe free variables of `e`.
#[derive(Clone, Debug)]
pub struct Judgment {
    pub term: Rc<Term>,
    pub ty: Ty,
    pub sfv: BTreeSet<Name>,
}

pub struct Checker<'a> {
    env: &'a DeclEnv,
    mode: Mode,
    spans: Option<&'a SpanMap>,
    ctx: TyCtx,
    visits: usize,
    trace: Option<Vec<Judgment>>,
}

type Judg = (Ty, BTreeSet<Name>);

impl<'a> Checker<'a> {
    pub fn new(env: &'a DeclEnv, mode: Mode) -> Checker<'a> {
        Checker { env, mode, spans: None, ctx: TyCtx::new(), visits: 0, trace: None }
    }

    pub fn with_spans(mut self, spans: &'a SpanMap) -> Self {
        self.spans = Some(spans);
        self
    }

    pub fn with_ctx(mut self, ctx: TyCtx) -> Self {
        self.ctx = ctx;
        self
    }

    /// Record every judgment of the derivation (innermost first).
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    /// Number of `synth`/`check` entries so far: one per AST node visited.
    pub fn visits(&self) -> usize {
        self.visits
    }

    pub fn take_trace(&mut self) -> Vec<Judgment> {
        self.trace.take().unwrap_or_default()
    }

    /// Synthesize the type of a closed-under-context term.
    pub fn infer(&mut self, t: &Rc<Term>) -> Result<Ty, TypeError> {
        self.synth(t).map(|(ty, _)| ty)
    }

    pub fn check_against(&mut self, t: &Rc<Term>, ty: &Ty) -> Result<(), TypeError> {
        self.check(t, ty).map(|_| ())
    }

    fn at(&self, t: &Rc<Term>, mut e: TypeError) -> TypeError {
        if e.span.is_none() {
            e.span = self.spans.and_then(|s| s.get(node_id(t)));
        }
        e
    }

    fn finish(&mut self, t: &Rc<Term>, (ty, sfv): Judg) -> Result<Judg, TypeError> {
        if self.mode.is_ramified() && ty.is_ground() && ty.polarity() == Polarity::Normal && !sfv.is_empty() {
            let names: Vec<&str> = sfv.iter().map(|n| &**n).collect();
            return Err(self.at(
                t,
                TypeError::new(
                    TypeErrorKind::SafeDependence,
                    format!("term of normal type `{ty}` depends on safe variable(s) {}", names.join(", ")),
                ),
            ));
        }
        if let Some(trace) = &mut self.trace {
            trace.push(Judgment { term: t.clone(), ty: ty.clone(), sfv: sfv.clone() });
        }
        Ok((ty, sfv))
    }

    fn decl(&self, name: &str, kind: Option<DeclKind>) -> Result<&'a DeclInfo, TypeError> {
        let d = self
            .env
            .get(name)
            .ok_or_else(|| TypeError::new(TypeErrorKind::UnknownType, format!("unknown type `{name}`")))?;
        if d.kind == DeclKind::Codata && !self.mode.allows_codata() {
            return Err(TypeError::new(
                TypeErrorKind::CodataInDataMode,
                format!("codata type `{name}` is not available in mode {}", self.mode),
            ));
        }
        match kind {
            Some(DeclKind::Data) if d.kind != DeclKind::Data => {
                Err(TypeError::new(TypeErrorKind::NotData, format!("`{name}` is not a data type")))
            }
            Some(DeclKind::Codata) if d.kind != DeclKind::Codata => {
                Err(TypeError::new(TypeErrorKind::NotCodata, format!("`{name}` is not a codata type")))
            }
            _ => Ok(d),
        }
    }

    fn sort_ok(&self, sort: Sort) -> Result<(), TypeError> {
        if sort == Sort::Safe && !self.mode.is_ramified() {
            return Err(TypeError::new(
                TypeErrorKind::RamifiedInClassicalMode,
                format!("safe types and constructors are not available in mode {}", self.mode),
            ));
        }
        Ok(())
    }

    fn ty_ok(&self, t: &Ty) -> Result<(), TypeError> {
        for (b, sort) in t.bases() {
            self.sort_ok(sort)?;
            self.decl(&b, None)?;
        }
        Ok(())
    }

    fn polarity_ok(&self, t: &Ty, kind: TypeErrorKind) -> Result<(), TypeError> {
        if self.mode.is_ramified() && t.is_ground() && t.polarity() == Polarity::Mixed {
            let what = if kind == TypeErrorKind::MixedPolarityPair { "pair" } else { "injection" };
            return Err(TypeError::new(kind, format!("{what} of type `{t}` mixes normal and safe components")));
        }
        Ok(())
    }

    fn bind<R>(&mut self, x: &Name, ty: Ty, f: impl FnOnce(&mut Self) -> R) -> R {
        self.ctx.push(x.clone(), ty);
        let r = f(self);
        self.ctx.pop();
        r
    }

    pub fn synth(&mut self, t: &Rc<Term>) -> Result<Judg, TypeError> {
        self.visits += 1;
        let j = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.synth_inner(t)).map_err(|e| self.at(t, e))?;
        self.finish(t, j)
    }

    pub fn check(&mut self, t: &Rc<Term>, want: &Ty) -> Result<Judg, TypeError> {
        self.visits += 1;
        let j = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.check_inner(t, want))
            .map_err(|e| self.at(t, e))?;
        self.finish(t, j)
    }

    fn synth_inner(&mut self, t: &Rc<Term>) -> Result<Judg, TypeError> {
        use TypeErrorKind::*;
        match &**t {
            Term::Var(x) => {
                let ty = self
                    .ctx
                    .lookup(x)
                    .cloned()
                    .ok_or_else(|| TypeError::new(UnboundVariable, format!("unbound variable `{x}`")))?;
                let mut s = BTreeSet::new();
                if is_safe_var_type(&ty) {
                    s.insert(x.clone());
                }
                Ok((ty, s))
            }
            Term::Unit => Ok((Ty::Unit, BTreeSet::new())),
            Term::App(f, a) => {
                let (fty, mut s) = self.synth(f)?;
                let Ty::Arrow(dom, cod) = fty else {
                    return Err(TypeError::new(NotAFunction, format!("cannot apply a value of type `{fty}`"))
                        .types("a function type", &fty));
                };
                let (_, s2) = self.check(a, &dom)?;
                s.extend(s2);
                Ok((*cod, s))
            }
            Term::Lam { param, ty, body } => {
                self.ty_ok(ty)?;
                let (bty, mut s) = self.bind(param, ty.clone(), |c| c.synth(body))?;
                s.remove(param);
                Ok((Ty::arrow(ty.clone(), bty), s))
            }
            Term::Pair(a, b) => {
                let (ta, mut s) = self.synth(a)?;
                let (tb, s2) = self.synth(b)?;
                s.extend(s2);
                let ty = Ty::prod(ta, tb);
                self.polarity_ok(&ty, MixedPolarityPair)?;
                Ok((ty, s))
            }
            Term::Proj(side, e) => {
                let (ty, s) = self.synth(e)?;
                let Ty::Prod(a, b) = ty else {
                    return Err(TypeError::new(NotAProduct, format!("cannot project from type `{ty}`"))
                        .types("a product type", &ty));
                };
                Ok((if *side == Side::First { *a } else { *b }, s))
            }
            Term::Inj(..) => Err(TypeError::new(
                CannotInfer,
                "cannot infer the type of an injection; annotate it as `(e : T)`",
            )),
            Term::Case { scrutinee, left, right } => {
                let (sty, mut s) = self.synth(scrutinee)?;
                let Ty::Sum(a, b) = sty else {
                    return Err(TypeError::new(NotASum, format!("cannot case on type `{sty}`")).types("a sum type", &sty));
                };
                let (lty, mut ls) = self.bind(&left.var, *a, |c| c.synth(&left.body))?;
                ls.remove(&left.var);
                let (_, mut rs) = self.bind(&right.var, *b, |c| c.check(&right.body, &lty))?;
                rs.remove(&right.var);
                s.extend(ls);
                s.extend(rs);
                Ok((lty, s))
            }
            Term::Let { bindings, body } => {
                let (tys, mut s) = self.let_bindings(bindings)?;
                for (b, ty) in bindings.iter().zip(tys) {
                    self.ctx.push(b.name.clone(), ty);
                }
                let r = self.synth(body);
                for _ in bindings {
                    self.ctx.pop();
                }
                let (ty, mut bs) = r?;
                for b in bindings {
                    bs.remove(&b.name);
                }
                s.extend(bs);
                Ok((ty, s))
            }
            Term::Ann(e, ty) => {
                self.ty_ok(ty)?;
                self.check(e, ty)
            }
            Term::Ctor { name, sort, arg } => {
                self.sort_ok(*sort)?;
                let (d, c) = self
                    .env
                    .ctor(name)
                    .ok_or_else(|| TypeError::new(UnknownConstructor, format!("unknown constructor `{name}`")))?;
                self.decl(&d.name, None)?;
                let (payload, result) = match sort {
                    Sort::Normal => (c.payload.clone(), d.ty()),
                    Sort::Safe => (c.payload.to_safe(), d.ty().to_safe()),
                };
                match arg {
                    Some(a) => {
                        let (_, s) = self.check(a, &payload)?;
                        Ok((result, s))
                    }
                    None if payload == Ty::Unit => Ok((result, BTreeSet::new())),
                    None => Ok((Ty::arrow(payload, result), BTreeSet::new())),
                }
            }
            Term::Con { ty, sort, arg } | Term::Des { ty, sort, arg } => {
                self.sort_ok(*sort)?;
                let d = self.decl(ty, None)?;
                let tau = match sort {
                    Sort::Normal => d.ty(),
                    Sort::Safe => d.ty().to_safe(),
                };
                let unfolded = d.unfolded(*sort);
                let (dom, cod) = if matches!(**t, Term::Con { .. }) { (unfolded, tau) } else { (tau, unfolded) };
                match arg {
                    Some(a) => {
                        let (_, s) = self.check(a, &dom)?;
                        Ok((cod, s))
                    }
                    None => Ok((Ty::arrow(dom, cod), BTreeSet::new())),
                }
            }
            Term::Fold { sort, ty, step, subject, .. } => {
                let d = self.decl(ty, Some(DeclKind::Data))?;
                match (sort, self.mode.is_ramified()) {
                    (Sort::Normal, true) => {
                        return Err(TypeError::new(
                            ClassicalInRamifiedMode,
                            format!("classical `fold` is not available in mode {}; use `sfold`", self.mode),
                        ))
                    }
                    (Sort::Safe, false) => self.sort_ok(Sort::Safe)?,
                    _ => {}
                }
                let (fty, mut s) = self.synth(step)?;
                let Ty::Arrow(dom, motive) = &fty else {
                    return Err(self.at(
                        step,
                        TypeError::new(NotAFunction, "the step of a fold must be a function").types("a function type", &fty),
                    ));
                };
                if *sort == Sort::Safe && !motive.is_safe_or_neutral_ground() {
                    return Err(self.at(
                        step,
                        TypeError::new(FoldMotiveNotSafe, format!("the result type `{motive}` of a safe fold is not safe"))
                            .types("a safe ground type", motive),
                    ));
                }
                let want = d.functor.apply(motive);
                if **dom != want {
                    return Err(self.at(
                        step,
                        TypeError::new(Mismatch, format!("the step of a fold over `{ty}` must take `{want}`"))
                            .types(&want, dom),
                    ));
                }
                let (sty, s2) = self.synth(subject)?;
                if sty != d.ty() {
                    let kind = if sty == d.ty().to_safe() { FoldSubjectNotNormal } else { Mismatch };
                    return Err(self.at(
                        subject,
                        TypeError::new(kind, format!("the subject of a fold over `{ty}` must have type `{ty}`"))
                            .types(d.ty(), &sty),
                    ));
                }
                s.extend(s2);
                Ok(((**motive).clone(), s))
            }
            Term::Unfold { sort, ty, step, seed } => {
                let d = self.decl(ty, Some(DeclKind::Codata))?;
                match (sort, self.mode.is_ramified()) {
                    (Sort::Normal, true) => {
                        return Err(TypeError::new(
                            ClassicalInRamifiedMode,
                            format!("classical `unfold` is not available in mode {}; use `sunfold`", self.mode),
                        ))
                    }
                    (Sort::Safe, false) => self.sort_ok(Sort::Safe)?,
                    _ => {}
                }
                let (fty, mut s) = self.synth(step)?;
                let Ty::Arrow(motive, cod) = &fty else {
                    return Err(self.at(
                        step,
                        TypeError::new(NotAFunction, "the step of an unfold must be a function").types("a function type", &fty),
                    ));
                };
                let (want, result) = match sort {
                    Sort::Normal => (d.functor.apply(motive), d.ty()),
                    Sort::Safe => {
                        if !motive.is_safe_or_neutral_ground() {
                            return Err(self.at(
                                step,
                                TypeError::new(
                                    UnfoldSeedNotSafe,
                                    format!("the seed type `{motive}` of a safe unfold is not safe"),
                                )
                                .types("a safe ground type", motive),
                            ));
                        }
                        (d.functor.apply_safe(&motive.erase()), d.ty().to_safe())
                    }
                };
                if **cod != want {
                    return Err(self.at(
                        step,
                        TypeError::new(Mismatch, format!("the step of an unfold of `{ty}` must return `{want}`"))
                            .types(&want, cod),
                    ));
                }
                let (_, s2) = self.check(seed, motive)?;
                s.extend(s2);
                Ok((result, s))
            }
            Term::Lower(e) => {
                if !self.mode.is_ramified() {
                    return Err(TypeError::new(
                        RamifiedInClassicalMode,
                        format!("`lower` is not available in mode {}", self.mode),
                    ));
                }
                let (ty, s) = self.synth(e)?;
                if !ty.is_safe_or_neutral_ground() {
                    return Err(TypeError::new(LowerNotSafeGround, format!("`lower` applies to safe ground types, not `{ty}`"))
                        .types("a safe ground type", &ty));
                }
                if !s.is_empty() {
                    let names: Vec<&str> = s.iter().map(|n| &**n).collect();
                    return Err(TypeError::new(
                        LowerWithSafeFreeVariable,
                        format!("cannot lower a term with safe free variable(s) {}", names.join(", ")),
                    ));
                }
                Ok((ty.erase(), s))
            }
        }
    }

    fn let_bindings(&mut self, bindings: &[crate::surface::Binding]) -> Result<(Vec<Ty>, BTreeSet<Name>), TypeError> {
        let mut s = BTreeSet::new();
        let mut tys = Vec::new();
        for b in bindings {
            let (ty, s2) = match &b.ty {
                Some(ty) => {
                    self.ty_ok(ty)?;
                    self.check(&b.value, ty)?
                }
                None => self.synth(&b.value)?,
            };
            s.extend(s2);
            tys.push(ty);
        }
        Ok((tys, s))
    }

    fn check_inner(&mut self, t: &Rc<Term>, want: &Ty) -> Result<Judg, TypeError> {
        use TypeErrorKind::*;
        match (&**t, want) {
            (Term::Lam { param, ty, body }, Ty::Arrow(dom, cod)) => {
                self.ty_ok(ty)?;
                if ty != &**dom {
                    return Err(TypeError::new(Mismatch, format!("parameter `{param}` is annotated `{ty}`"))
                        .types(&**dom, ty));
                }
                let (_, mut s) = self.bind(param, ty.clone(), |c| c.check(body, cod))?;
                s.remove(param);
                Ok((want.clone(), s))
            }
            (Term::Pair(a, b), Ty::Prod(ta, tb)) => {
                self.polarity_ok(want, MixedPolarityPair)?;
                let (_, mut s) = self.check(a, ta)?;
                let (_, s2) = self.check(b, tb)?;
                s.extend(s2);
                Ok((want.clone(), s))
            }
            (Term::Inj(side, e), Ty::Sum(ta, tb)) => {
                self.polarity_ok(want, MixedPolaritySum)?;
                let part = if *side == Side::First { ta } else { tb };
                let (_, s) = self.check(e, part)?;
                Ok((want.clone(), s))
            }
            (Term::Inj(..), _) => Err(TypeError::new(Mismatch, "an injection must have a sum type").types(want, want)),
            (Term::Case { scrutinee, left, right }, _) => {
                let (sty, mut s) = self.synth(scrutinee)?;
                let Ty::Sum(a, b) = sty else {
                    return Err(TypeError::new(NotASum, format!("cannot case on type `{sty}`")).types("a sum type", &sty));
                };
                let (_, mut ls) = self.bind(&left.var, *a, |c| c.check(&left.body, want))?;
                ls.remove(&left.var);
                let (_, mut rs) = self.bind(&right.var, *b, |c| c.check(&right.body, want))?;
                rs.remove(&right.var);
                s.extend(ls);
                s.extend(rs);
                Ok((want.clone(), s))
            }
            (Term::Let { bindings, body }, _) => {
                let (tys, mut s) = self.let_bindings(bindings)?;
                for (b, ty) in bindings.iter().zip(tys) {
                    self.ctx.push(b.name.clone(), ty);
                }
                let r = self.check(body, want);
                for _ in bindings {
                    self.ctx.pop();
                }
                let (_, mut bs) = r?;
                for b in bindings {
                    bs.remove(&b.name);
                }
                s.extend(bs);
                Ok((want.clone(), s))
            }
            _ => {
                // Inline the synthesis so the node counts as a single visit.
                let (ty, s) = self.synth_inner(t)?;
                if &ty != want {
                    return Err(TypeError::new(Mismatch, format!("expected `{want}`, found `{ty}`")).types(want, &ty));
                }
                Ok((ty, s))
            }
        }
    }
}

/// Check a closed term.
pub fn typecheck(t: &Rc<Term>, ctx: &TyCtx, env: &DeclEnv, mode: Mode) -> Result<Ty, TypeError> {
    Checker::new(env, mode).with_ctx(ctx.clone()).infer(t)
}

/// Reject declarations the mode cannot express.
pub fn check_declarations(env: &DeclEnv, mode: Mode) -> Result<(), TypeError> {
    if let Some(d) = env.iter().find(|d| d.kind == DeclKind::Codata) {
        if !mode.allows_codata() {
            return Err(TypeError::new(
                TypeErrorKind::CodataInDataMode,
                format!("codata type `{}` is not available in mode {mode}", d.name),
            ));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct FragmentReport {
    pub ok: bool,
    /// First subterm (innermost-first order) whose type leaves the fragment.
    pub offending_term: Option<String>,
    pub offending_type: Option<String>,
}

/// Does every type in the RS derivation of `t` use only `allowed` bases
/// (and their safe twins, and unit)?
pub fn check_fragment(
    t: &Rc<Term>,
    allowed: &BTreeSet<Name>,
    env: &DeclEnv,
    render: impl Fn(&Term) -> String,
) -> Result<FragmentReport, TypeError> {
    let mut c = Checker::new(env, Mode::RS).with_trace();
    c.infer(t)?;
    for j in c.take_trace() {
        if j.ty.bases().iter().any(|(b, _)| !allowed.contains(b)) {
            return Ok(FragmentReport {
                ok: false,
                offending_term: Some(render(&j.term)),
                offending_type: Some(j.ty.to_string()),
            });
        }
    }
    Ok(FragmentReport { ok: true, offending_term: None, offending_type: None })
}

/// Forget ramification: drop `lower`, turn safe sorts normal and ramified
/// recursors classical.
pub fn erase(t: &Rc<Term>) -> Rc<Term> {
    let e = |x: &Rc<Term>| erase(x);
    let eo = |x: &Option<Rc<Term>>| x.as_ref().map(erase);
    Rc::new(match &**t {
        Term::Lower(x) => return erase(x),
        Term::Var(_) | Term::Unit => return t.clone(),
        Term::App(a, b) => Term::App(e(a), e(b)),
        Term::Lam { param, ty, body } => Term::Lam { param: param.clone(), ty: ty.erase(), body: e(body) },
        Term::Pair(a, b) => Term::Pair(e(a), e(b)),
        Term::Proj(s, x) => Term::Proj(*s, e(x)),
        Term::Inj(s, x) => Term::Inj(*s, e(x)),
        Term::Case { scrutinee, left, right } => Term::Case {
            scrutinee: e(scrutinee),
            left: crate::surface::Arm { var: left.var.clone(), body: e(&left.body) },
            right: crate::surface::Arm { var: right.var.clone(), body: e(&right.body) },
        },
        Term::Let { bindings, body } => Term::Let {
            bindings: bindings
                .iter()
                .map(|b| crate::surface::Binding {
                    name: b.name.clone(),
                    ty: b.ty.as_ref().map(Ty::erase),
                    value: e(&b.value),
                })
                .collect(),
            body: e(body),
        },
        Term::Ann(x, ty) => Term::Ann(e(x), ty.erase()),
        Term::Ctor { name, arg, .. } => Term::Ctor { name: name.clone(), sort: Sort::Normal, arg: eo(arg) },
        Term::Con { ty, arg, .. } => Term::Con { ty: ty.clone(), sort: Sort::Normal, arg: eo(arg) },
        Term::Des { ty, arg, .. } => Term::Des { ty: ty.clone(), sort: Sort::Normal, arg: eo(arg) },
        Term::Fold { site, ty, step, subject, .. } => {
            Term::Fold { site: *site, sort: Sort::Normal, ty: ty.clone(), step: e(step), subject: e(subject) }
        }
        Term::Unfold { ty, step, seed, .. } => {
            Term::Unfold { sort: Sort::Normal, ty: ty.clone(), step: e(step), seed: e(seed) }
        }
    })
}
