use std::fmt::Write;

use super::ast::*;
use crate::typesys::{Sort, Ty};

#[derive(Clone, Copy, Debug)]
pub struct PrettyOptions {
    /// Print sugared constructors (`Succ Zero`). When false, constructors are
    /// expanded to `c[tau]` applied to the explicit injection chain.
    pub sugar: bool,
}

impl Default for PrettyOptions {
    fn default() -> Self {
        PrettyOptions { sugar: true }
    }
}

pub fn pretty_ty(t: &Ty) -> String {
    t.to_string()
}

pub fn pretty_program(p: &Program, opts: PrettyOptions) -> String {
    let mut out = String::new();
    for (i, d) in p.decls.iter().enumerate() {
        if i > 0 {
            out.push_str(";\n");
        }
        let kw = match d.kind {
            DeclKind::Data => "data",
            DeclKind::Codata => "codata",
        };
        write!(out, "{kw} {} = ", d.name).unwrap();
        for (j, s) in d.summands.iter().enumerate() {
            if j > 0 {
                out.push_str(" | ");
            }
            out.push_str(&s.ctor);
            if s.payload != Ty::Unit {
                write!(out, " of {}", s.payload).unwrap();
            }
        }
    }
    if !p.decls.is_empty() {
        out.push('\n');
    }
    out.push_str("in\n");
    out.push_str(&Printer { decls: &p.decls, opts }.term(&p.body, 0, 0));
    out.push('\n');
    out
}

/// Print a term; `decls` supplies constructor arities and indices.
pub fn pretty_term(t: &Term, decls: &[Decl], opts: PrettyOptions) -> String {
    Printer { decls, opts }.term(t, 0, 0)
}

struct Printer<'a> {
    decls: &'a [Decl],
    opts: PrettyOptions,
}

/// Precedence levels: 0 = binders (`fn`, `case`, `let`), 1 = application,
/// 2 = prefix operator application, 3 = atom.
fn level(t: &Term, nullary: bool) -> u8 {
    match t {
        Term::Lam { .. } | Term::Case { .. } | Term::Let { .. } => 0,
        Term::App(..) => 1,
        Term::Proj(..) | Term::Inj(..) | Term::Lower(_) | Term::Fold { .. } | Term::Unfold { .. } => 2,
        Term::Ctor { arg: Some(_), .. } | Term::Con { arg: Some(_), .. } | Term::Des { arg: Some(_), .. } => 2,
        Term::Ctor { arg: None, .. } if nullary => 3,
        // Unapplied constructor functions are always printed as `(C)`.
        Term::Ctor { .. } | Term::Con { .. } | Term::Des { .. } => 3,
        Term::Var(_) | Term::Unit | Term::Pair(..) | Term::Ann(..) => 3,
    }
}

fn tick(sort: Sort) -> &'static str {
    match sort {
        Sort::Normal => "",
        Sort::Safe => "'",
    }
}

impl Printer<'_> {
    fn ctor_info(&self, name: &str) -> Option<(&Decl, usize)> {
        self.decls
            .iter()
            .find_map(|d| d.summands.iter().position(|s| &*s.ctor == name).map(|i| (d, i)))
    }

    fn is_nullary(&self, name: &str) -> bool {
        self.ctor_info(name).is_some_and(|(d, i)| d.summands[i].payload == Ty::Unit)
    }

    fn term(&self, t: &Term, min: u8, indent: usize) -> String {
        let nullary = matches!(t, Term::Ctor { name, arg: None, .. } if self.is_nullary(name));
        let mine = if !self.opts.sugar && matches!(t, Term::Ctor { .. }) { 2 } else { level(t, nullary) };
        let body = self.raw(t, indent + usize::from(mine < min));
        if mine < min {
            format!("({body})")
        } else {
            body
        }
    }

    fn raw(&self, t: &Term, indent: usize) -> String {
        match t {
            Term::Var(x) => x.to_string(),
            Term::Unit => "()".into(),
            Term::App(f, a) => format!("{} {}", self.term(f, 1, indent), self.term(a, 3, indent)),
            Term::Lam { .. } => {
                let mut s = String::from("fn");
                let mut cur = t;
                while let Term::Lam { param, ty, body } = cur {
                    write!(s, " ({param} : {ty})").unwrap();
                    cur = body;
                }
                write!(s, " => {}", self.term(cur, 0, indent)).unwrap();
                s
            }
            Term::Pair(a, b) => format!("({}, {})", self.term(a, 0, indent), self.term(b, 0, indent)),
            Term::Proj(side, e) => {
                let op = if *side == Side::First { "fst" } else { "snd" };
                format!("{op} {}", self.term(e, 3, indent))
            }
            Term::Inj(side, e) => {
                let op = if *side == Side::First { "inl" } else { "inr" };
                format!("{op} {}", self.term(e, 3, indent))
            }
            Term::Lower(e) => format!("lower {}", self.term(e, 3, indent)),
            Term::Ann(e, ty) => format!("({} : {ty})", self.term(e, 0, indent)),
            Term::Case { scrutinee, left, right } => format!(
                "case {} of inl {} => {} | inr {} => {}",
                self.term(scrutinee, 1, indent),
                left.var,
                self.term(&left.body, 1, indent),
                right.var,
                self.term(&right.body, 0, indent)
            ),
            Term::Let { bindings, body } => {
                let mut s = String::from("let ");
                for (i, b) in bindings.iter().enumerate() {
                    if i > 0 {
                        s.push_str("; ");
                    }
                    s.push_str(&b.name);
                    if let Some(ty) = &b.ty {
                        write!(s, " : {ty}").unwrap();
                    }
                    write!(s, " = {}", self.term(&b.value, 0, indent + 2)).unwrap();
                }
                write!(s, " in\n{}{}", " ".repeat(indent), self.term(body, 0, indent)).unwrap();
                s
            }
            Term::Ctor { name, sort, arg } => {
                if self.opts.sugar {
                    return match arg {
                        Some(a) => format!("{}{name} {}", tick(*sort), self.term(a, 3, indent)),
                        None if self.is_nullary(name) => format!("{}{name}", tick(*sort)),
                        None => format!("({}{name})", tick(*sort)),
                    };
                }
                let Some((decl, i)) = self.ctor_info(name) else {
                    return format!("({}{name})", tick(*sort));
                };
                let n = decl.summands.len();
                let (mut payload, wrap_fn) = match arg {
                    Some(a) => (self.term(a, 3, indent), false),
                    None if decl.summands[i].payload == Ty::Unit => ("()".to_string(), false),
                    None => ("x".to_string(), true),
                };
                let mut ops = Vec::new();
                if n > 1 && i + 1 < n {
                    ops.push("inl");
                }
                ops.extend(std::iter::repeat_n("inr", if n > 1 { i } else { 0 }));
                for op in ops {
                    payload = format!("({op} {payload})");
                }
                let applied = format!("{}c[{}] {payload}", tick(*sort), decl.name);
                if wrap_fn {
                    let ty = match sort {
                        Sort::Normal => decl.summands[i].payload.clone(),
                        Sort::Safe => decl.summands[i].payload.to_safe(),
                    };
                    format!("(fn (x : {ty}) => {applied})")
                } else {
                    applied
                }
            }
            Term::Con { ty, sort, arg } | Term::Des { ty, sort, arg } => {
                let op = if matches!(t, Term::Con { .. }) { "c" } else { "d" };
                match arg {
                    Some(a) => format!("{}{op}[{ty}] {}", tick(*sort), self.term(a, 3, indent)),
                    None => format!("({}{op}[{ty}])", tick(*sort)),
                }
            }
            Term::Fold { sort, ty, step, subject, .. } => {
                let kw = if *sort == Sort::Safe { "sfold" } else { "fold" };
                format!("{kw}[{ty}] {} {}", self.term(step, 3, indent), self.term(subject, 3, indent))
            }
            Term::Unfold { sort, ty, step, seed } => {
                let kw = if *sort == Sort::Safe { "sunfold" } else { "unfold" };
                format!("{kw}[{ty}] {} {}", self.term(step, 3, indent), self.term(seed, 3, indent))
            }
        }
    }
}
