//! Abstract syntax shared by every mode of the language.
//!
//! Every subterm lives behind an `Rc<Term>`; closures capture bodies by
//! reference count and source spans are keyed by node address.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use serde::Serialize;

use crate::typesys::{Name, Sort, Ty};

/// Static identity of a `fold` occurrence in the source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SiteId(pub u32);

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fold#{}", self.0)
    }
}

/// Which component of a product or coproduct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::First => 1,
            Side::Second => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub name: Name,
    pub ty: Option<Ty>,
    pub value: Rc<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arm {
    pub var: Name,
    pub body: Rc<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(Name),
    App(Rc<Term>, Rc<Term>),
    Lam { param: Name, ty: Ty, body: Rc<Term> },
    Unit,
    Pair(Rc<Term>, Rc<Term>),
    Proj(Side, Rc<Term>),
    Inj(Side, Rc<Term>),
    Case { scrutinee: Rc<Term>, left: Arm, right: Arm },
    /// Simultaneous bindings: `let x1 = e1; ...; xm = em in e0`.
    Let { bindings: Vec<Binding>, body: Rc<Term> },
    Ann(Rc<Term>, Ty),
    /// Sugared constructor `C e` (or bare `C` for unit payloads). When `arg`
    /// is `None` on a constructor with a payload, the term denotes the
    /// constructor function itself.
    Ctor { name: Name, sort: Sort, arg: Option<Rc<Term>> },
    /// Unsugared constructor `c[tau] e`.
    Con { ty: Name, sort: Sort, arg: Option<Rc<Term>> },
    /// Destructor `d[tau] e`.
    Des { ty: Name, sort: Sort, arg: Option<Rc<Term>> },
    /// `fold[tau]` (normal) or `sfold[tau]` (safe).
    Fold { site: SiteId, sort: Sort, ty: Name, step: Rc<Term>, subject: Rc<Term> },
    /// `unfold[tau]` (normal) or `sunfold[tau]` (safe).
    Unfold { sort: Sort, ty: Name, step: Rc<Term>, seed: Rc<Term> },
    Lower(Rc<Term>),
}

impl Term {
    pub fn var(name: &str) -> Rc<Term> {
        Rc::new(Term::Var(name.into()))
    }

    pub fn app(f: Rc<Term>, a: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::App(f, a))
    }

    pub fn lam(param: &str, ty: Ty, body: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Lam { param: param.into(), ty, body })
    }

    pub fn pair(a: Rc<Term>, b: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Pair(a, b))
    }

    pub fn case(scrutinee: Rc<Term>, left: (&str, Rc<Term>), right: (&str, Rc<Term>)) -> Rc<Term> {
        Rc::new(Term::Case {
            scrutinee,
            left: Arm { var: left.0.into(), body: left.1 },
            right: Arm { var: right.0.into(), body: right.1 },
        })
    }

    /// Number of AST nodes (every `Rc<Term>` counts once per occurrence).
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&Rc<Term>> {
        match self {
            Term::Var(_) | Term::Unit => vec![],
            Term::App(a, b) | Term::Pair(a, b) => vec![a, b],
            Term::Lam { body, .. } => vec![body],
            Term::Proj(_, e) | Term::Inj(_, e) | Term::Ann(e, _) | Term::Lower(e) => vec![e],
            Term::Case { scrutinee, left, right } => vec![scrutinee, &left.body, &right.body],
            Term::Let { bindings, body } => {
                let mut v: Vec<&Rc<Term>> = bindings.iter().map(|b| &b.value).collect();
                v.push(body);
                v
            }
            Term::Ctor { arg, .. } | Term::Con { arg, .. } | Term::Des { arg, .. } => arg.iter().collect(),
            Term::Fold { step, subject, .. } => vec![step, subject],
            Term::Unfold { step, seed, .. } => vec![step, seed],
        }
    }

    /// Free variables, in first-occurrence order.
    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) && !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::Lam { param, body, .. } => {
                bound.push(param.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::Case { scrutinee, left, right } => {
                scrutinee.collect_free(bound, out);
                for arm in [left, right] {
                    bound.push(arm.var.clone());
                    arm.body.collect_free(bound, out);
                    bound.pop();
                }
            }
            Term::Let { bindings, body } => {
                for b in bindings {
                    b.value.collect_free(bound, out);
                }
                let n = bindings.len();
                bound.extend(bindings.iter().map(|b| b.name.clone()));
                body.collect_free(bound, out);
                bound.truncate(bound.len() - n);
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    /// Every identifier mentioned, bound or free.
    pub fn all_names(&self, out: &mut Vec<Name>) {
        match self {
            Term::Var(x) => out.push(x.clone()),
            Term::Lam { param, .. } => out.push(param.clone()),
            Term::Case { left, right, .. } => {
                out.push(left.var.clone());
                out.push(right.var.clone());
            }
            Term::Let { bindings, .. } => out.extend(bindings.iter().map(|b| b.name.clone())),
            _ => {}
        }
        for c in self.children() {
            c.all_names(out);
        }
    }
}

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Node address of an `Rc<Term>`; used as the key for spans and diagnostics.
pub fn node_id(t: &Rc<Term>) -> usize {
    Rc::as_ptr(t) as usize
}

#[derive(Clone, Debug, Default)]
pub struct SpanMap(HashMap<usize, Span>);

impl SpanMap {
    pub fn insert(&mut self, t: &Rc<Term>, span: Span) {
        self.0.entry(node_id(t)).or_insert(span);
    }

    pub fn get(&self, node: usize) -> Option<Span> {
        self.0.get(&node).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeclKind {
    Data,
    Codata,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub ctor: Name,
    pub payload: Ty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub kind: DeclKind,
    pub name: Name,
    pub summands: Vec<Summand>,
    pub span: Option<Span>,
}

#[derive(Clone, Debug)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub body: Rc<Term>,
    pub spans: SpanMap,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.decls.len() == other.decls.len()
            && self
                .decls
                .iter()
                .zip(&other.decls)
                .all(|(a, b)| a.kind == b.kind && a.name == b.name && a.summands == b.summands)
            && self.body == other.body
    }
}
