//! Declaration elaboration: signature functors, constructor tables, ranks.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use serde::Serialize;

use super::{Name, Sort, Ty};
use crate::surface::{Decl, DeclKind, Side, Span, Term};

/// A polynomial signature functor body over one recursion variable `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Unit,
    /// A previously declared (normal) base type.
    Const(Name),
    /// The recursion variable.
    Rec,
    Sum(Box<Shape>, Box<Shape>),
    Prod(Box<Shape>, Box<Shape>),
}

impl Shape {
    /// `F σ`: substitute `σ` for the recursion variable. Constant slots stay normal.
    pub fn apply(&self, sigma: &Ty) -> Ty {
        match self {
            Shape::Unit => Ty::Unit,
            Shape::Const(b) => Ty::base(b.clone()),
            Shape::Rec => sigma.clone(),
            Shape::Sum(a, b) => Ty::sum(a.apply(sigma), b.apply(sigma)),
            Shape::Prod(a, b) => Ty::prod(a.apply(sigma), b.apply(sigma)),
        }
    }

    /// `ˆ(F σ)`: the fully safe image of `F σ`.
    pub fn apply_safe(&self, sigma: &Ty) -> Ty {
        self.apply(sigma).to_safe()
    }

    pub fn mentions_rec(&self) -> bool {
        match self {
            Shape::Rec => true,
            Shape::Unit | Shape::Const(_) => false,
            Shape::Sum(a, b) | Shape::Prod(a, b) => a.mentions_rec() || b.mentions_rec(),
        }
    }

    /// Some product has the recursion variable on both sides.
    pub fn is_branching(&self) -> bool {
        match self {
            Shape::Unit | Shape::Const(_) | Shape::Rec => false,
            Shape::Sum(a, b) => a.is_branching() || b.is_branching(),
            Shape::Prod(a, b) => (a.mentions_rec() && b.mentions_rec()) || a.is_branching() || b.is_branching(),
        }
    }

    fn constants(&self, out: &mut Vec<Name>) {
        match self {
            Shape::Const(b) => out.push(b.clone()),
            Shape::Unit | Shape::Rec => {}
            Shape::Sum(a, b) | Shape::Prod(a, b) => {
                a.constants(out);
                b.constants(out);
            }
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Reuse type printing with `X` standing for the recursion variable.
        write!(f, "{}", self.apply(&Ty::base("X")))
    }
}

/// Build the term for `F f` applied to `arg`: identity on constant slots,
/// `f` on recursion slots, structural on sums and products. `fresh` supplies
/// case-bound names that must not clash with `f` or `arg`.
pub fn functor_map_term(shape: &Shape, f: &Rc<Term>, arg: Rc<Term>, fresh: &mut dyn FnMut() -> Name) -> Rc<Term> {
    match shape {
        Shape::Unit | Shape::Const(_) => arg,
        Shape::Rec => Term::app(f.clone(), arg),
        Shape::Prod(a, b) => Term::pair(
            functor_map_term(a, f, Rc::new(Term::Proj(Side::First, arg.clone())), fresh),
            functor_map_term(b, f, Rc::new(Term::Proj(Side::Second, arg)), fresh),
        ),
        Shape::Sum(a, b) => {
            let (l, r) = (fresh(), fresh());
            let left = Rc::new(Term::Inj(Side::First, functor_map_term(a, f, Rc::new(Term::Var(l.clone())), fresh)));
            let right = Rc::new(Term::Inj(Side::Second, functor_map_term(b, f, Rc::new(Term::Var(r.clone())), fresh)));
            Term::case(arg, (&l, left), (&r, right))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorInfo {
    pub name: Name,
    /// Position among the declaration's summands (0-based).
    pub index: usize,
    /// Payload type with the declared name standing for itself.
    pub payload: Ty,
}

#[derive(Clone, Debug)]
pub struct DeclInfo {
    pub name: Name,
    pub kind: DeclKind,
    pub functor: Shape,
    pub ctors: Vec<CtorInfo>,
    pub branching: bool,
    pub rank: usize,
}

impl DeclInfo {
    pub fn ty(&self) -> Ty {
        Ty::base(self.name.clone())
    }

    /// Type of the (unsugared) constructor argument, `F τ` or `ˆ(F τ)`.
    pub fn unfolded(&self, sort: Sort) -> Ty {
        match sort {
            Sort::Normal => self.functor.apply(&self.ty()),
            Sort::Safe => self.functor.apply_safe(&self.ty()),
        }
    }

    /// Number of summands, i.e. `n` in the injection encoding.
    pub fn arity(&self) -> usize {
        self.ctors.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElabErrorKind {
    NonGroundSignature,
    NonNormalSignature,
    EmptyDataType,
    UnknownBase,
    DuplicateDeclaration,
    DuplicateConstructor,
}

impl ElabErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ElabErrorKind::NonGroundSignature => "non-ground-signature",
            ElabErrorKind::NonNormalSignature => "non-normal-signature",
            ElabErrorKind::EmptyDataType => "empty-data-type",
            ElabErrorKind::UnknownBase => "unknown-base",
            ElabErrorKind::DuplicateDeclaration => "duplicate-declaration",
            ElabErrorKind::DuplicateConstructor => "duplicate-constructor",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{message}")]
pub struct ElabError {
    pub kind: ElabErrorKind,
    pub declaration: String,
    pub span: Option<Span>,
    pub message: String,
}

/// Elaborated declarations, in source order.
#[derive(Clone, Debug, Default)]
pub struct DeclEnv {
    decls: Vec<DeclInfo>,
    source: Vec<Decl>,
    by_name: HashMap<Name, usize>,
    by_ctor: HashMap<Name, (usize, usize)>,
}

impl DeclEnv {
    pub fn get(&self, name: &str) -> Option<&DeclInfo> {
        self.by_name.get(name).map(|&i| &self.decls[i])
    }

    /// The declaration owning constructor `name`, and the constructor.
    pub fn ctor(&self, name: &str) -> Option<(&DeclInfo, &CtorInfo)> {
        self.by_ctor.get(name).map(|&(d, c)| (&self.decls[d], &self.decls[d].ctors[c]))
    }

    pub fn iter(&self) -> impl Iterator<Item = &DeclInfo> {
        self.decls.iter()
    }

    /// The declarations as parsed (used by the pretty-printer).
    pub fn source(&self) -> &[Decl] {
        &self.source
    }

    pub fn has_codata(&self) -> bool {
        self.decls.iter().any(|d| d.kind == DeclKind::Codata)
    }

    /// Elaborate and append one declaration.
    pub fn add(&mut self, decl: &Decl) -> Result<(), ElabError> {
        let err = |kind: ElabErrorKind, message: String| ElabError {
            kind,
            declaration: decl.name.to_string(),
            span: decl.span,
            message,
        };
        if self.by_name.contains_key(&decl.name) {
            return Err(err(ElabErrorKind::DuplicateDeclaration, format!("type `{}` is declared twice", decl.name)));
        }
        let mut ctors = Vec::new();
        let mut shapes = Vec::new();
        for (index, s) in decl.summands.iter().enumerate() {
            if self.by_ctor.contains_key(&s.ctor) || ctors.iter().any(|c: &CtorInfo| c.name == s.ctor) {
                return Err(err(ElabErrorKind::DuplicateConstructor, format!("constructor `{}` is declared twice", s.ctor)));
            }
            shapes.push(self.shape_of(&decl.name, &s.payload).map_err(|(kind, m)| err(kind, m))?);
            ctors.push(CtorInfo { name: s.ctor.clone(), index, payload: s.payload.clone() });
        }
        let functor = shapes
            .into_iter()
            .rev()
            .reduce(|acc, s| Shape::Sum(Box::new(s), Box::new(acc)))
            .ok_or_else(|| err(ElabErrorKind::EmptyDataType, format!("`{}` has no constructors", decl.name)))?;
        if decl.kind == DeclKind::Data && !inhabited(&functor) {
            return Err(err(
                ElabErrorKind::EmptyDataType,
                format!("data type `{}` has no constructor that avoids recursion, so it is empty", decl.name),
            ));
        }
        let mut consts = Vec::new();
        functor.constants(&mut consts);
        let rank = consts
            .iter()
            .map(|c| {
                let d = self.get(c).expect("constants are declared");
                match d.kind {
                    DeclKind::Data => d.rank,
                    DeclKind::Codata => d.rank + 1,
                }
            })
            .max()
            .unwrap_or(0);
        let info = DeclInfo {
            name: decl.name.clone(),
            kind: decl.kind,
            branching: functor.is_branching(),
            functor,
            ctors,
            rank,
        };
        let idx = self.decls.len();
        for (c, ctor) in info.ctors.iter().enumerate() {
            self.by_ctor.insert(ctor.name.clone(), (idx, c));
        }
        self.by_name.insert(info.name.clone(), idx);
        self.decls.push(info);
        self.source.push(decl.clone());
        Ok(())
    }

    fn shape_of(&self, own: &Name, t: &Ty) -> Result<Shape, (ElabErrorKind, String)> {
        Ok(match t {
            Ty::Unit => Shape::Unit,
            Ty::Base { name, sort } => {
                if *sort == Sort::Safe {
                    return Err((ElabErrorKind::NonNormalSignature, format!("signature of `{own}` mentions safe type `'{name}`")));
                }
                if name == own {
                    Shape::Rec
                } else if self.by_name.contains_key(name) {
                    Shape::Const(name.clone())
                } else {
                    return Err((ElabErrorKind::UnknownBase, format!("signature of `{own}` mentions undeclared type `{name}`")));
                }
            }
            Ty::Sum(a, b) => Shape::Sum(Box::new(self.shape_of(own, a)?), Box::new(self.shape_of(own, b)?)),
            Ty::Prod(a, b) => Shape::Prod(Box::new(self.shape_of(own, a)?), Box::new(self.shape_of(own, b)?)),
            Ty::Arrow(..) => {
                return Err((ElabErrorKind::NonGroundSignature, format!("signature of `{own}` contains function type `{t}`")))
            }
        })
    }
}

/// Is `F(∅)` inhabited? Constants are declared types, which are never empty.
fn inhabited(s: &Shape) -> bool {
    match s {
        Shape::Unit | Shape::Const(_) => true,
        Shape::Rec => false,
        Shape::Sum(a, b) => inhabited(a) || inhabited(b),
        Shape::Prod(a, b) => inhabited(a) && inhabited(b),
    }
}

pub fn elaborate_declarations(decls: &[Decl]) -> Result<DeclEnv, ElabError> {
    let mut env = DeclEnv::default();
    for d in decls {
        env.add(d)?;
    }
    Ok(env)
}
