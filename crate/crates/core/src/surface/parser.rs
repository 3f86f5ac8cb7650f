use std::collections::HashMap;
use std::rc::Rc;

use super::ast::*;
use super::lexer::{tokenize, Kw, Tok, Token};
use super::{ParseError, ParseErrorKind};
use crate::typesys::{Name, Sort, Ty};

/// Declarations visible to the parser: type names and, for constructors,
/// whether they take a payload. The parser needs constructor arity to know
/// whether `C` consumes the following argument.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    types: HashMap<Name, DeclKind>,
    ctors: HashMap<Name, bool>,
}

impl Scope {
    pub fn from_decls(decls: &[Decl]) -> Scope {
        let mut s = Scope::default();
        for d in decls {
            s.add(d);
        }
        s
    }

    pub fn add(&mut self, d: &Decl) {
        self.types.insert(d.name.clone(), d.kind);
        for s in &d.summands {
            self.ctors.insert(s.ctor.clone(), s.payload != Ty::Unit);
        }
    }

    pub fn has_type(&self, name: &str) -> bool {
        self.types.contains_key(name)
    }
}

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src, Scope::default(), 0)?;
    let program = p.program()?;
    Ok(program)
}

/// Parse a standalone expression against already-known declarations.
/// Fold sites are numbered from `first_site`.
pub fn parse_expr_in(src: &str, scope: &Scope, first_site: u32) -> Result<(Rc<Term>, SpanMap), ParseError> {
    let mut p = Parser::new(src, scope.clone(), first_site)?;
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok((e, p.spans))
}

/// Parse one or more declarations (optionally `;`-separated) that extend `scope`.
pub fn parse_decls_in(src: &str, scope: &Scope) -> Result<Vec<Decl>, ParseError> {
    let mut p = Parser::new(src, scope.clone(), 0)?;
    let mut out = Vec::new();
    loop {
        out.push(p.decl()?);
        p.eat(&Tok::Semi);
        if p.peek() == &Tok::Eof {
            break;
        }
    }
    Ok(out)
}

pub fn parse_type_in(src: &str, scope: &Scope) -> Result<Ty, ParseError> {
    let mut p = Parser::new(src, scope.clone(), 0)?;
    let t = p.ty()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    expected: Vec<String>,
    scope: Scope,
    /// Name of the declaration whose signature is being parsed.
    recursive: Option<Name>,
    spans: SpanMap,
    next_site: u32,
}

fn is_ctor_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

impl Parser {
    fn new(src: &str, scope: Scope, first_site: u32) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            expected: Vec::new(),
            scope,
            recursive: None,
            spans: SpanMap::default(),
            next_site: first_site,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> Span {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        self.expected.clear();
        t
    }

    fn note(&mut self, what: impl Into<String>) {
        let what = what.into();
        if !self.expected.contains(&what) {
            self.expected.push(what);
        }
    }

    fn check(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            true
        } else {
            self.note(t.to_string());
            false
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.check(t) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<Span, ParseError> {
        if self.check(&t) {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected())
        }
    }

    fn unexpected(&self) -> ParseError {
        let found = self.peek().to_string();
        self.error(ParseErrorKind::Syntax, self.here(), format!("unexpected {found}"))
    }

    fn error(&self, kind: ParseErrorKind, span: Span, message: String) -> ParseError {
        let mut expected = self.expected.clone();
        expected.sort();
        ParseError { kind, line: span.line, col: span.col, message, expected }
    }

    fn ident(&mut self, what: &str) -> Result<(Name, Span), ParseError> {
        if let Tok::Ident(n) = self.peek().clone() {
            let span = self.advance().span;
            Ok((n, span))
        } else {
            self.note(what.to_string());
            Err(self.unexpected())
        }
    }

    fn mk(&mut self, t: Term, span: Span) -> Rc<Term> {
        let rc = Rc::new(t);
        self.spans.insert(&rc, span);
        rc
    }

    // ---- programs and declarations ----

    fn program(&mut self) -> Result<Program, ParseError> {
        self.eat(&Tok::Kw(Kw::Declare));
        let mut decls = Vec::new();
        loop {
            let is_decl = self.check(&Tok::Kw(Kw::Data)) | self.check(&Tok::Kw(Kw::Codata));
            if !is_decl {
                break;
            }
            let d = self.decl()?;
            decls.push(d);
            self.eat(&Tok::Semi);
        }
        self.expect(Tok::Kw(Kw::In))?;
        let body = self.expr()?;
        self.expect(Tok::Eof)?;
        Ok(Program { decls, body, spans: std::mem::take(&mut self.spans) })
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let span = self.here();
        let kind = if self.eat(&Tok::Kw(Kw::Data)) {
            DeclKind::Data
        } else if self.eat(&Tok::Kw(Kw::Codata)) {
            DeclKind::Codata
        } else {
            return Err(self.unexpected());
        };
        let (name, name_span) = self.ident("type name")?;
        if self.scope.types.contains_key(&name) {
            return Err(self.error(
                ParseErrorKind::DuplicateDeclaration,
                name_span,
                format!("type `{name}` is declared more than once"),
            ));
        }
        self.expect(Tok::Eq)?;
        self.eat(&Tok::Bar);
        self.recursive = Some(name.clone());
        let mut summands: Vec<Summand> = Vec::new();
        loop {
            let (ctor, ctor_span) = self.ident("constructor name")?;
            if !is_ctor_name(&ctor) {
                return Err(self.error(
                    ParseErrorKind::Syntax,
                    ctor_span,
                    format!("constructor `{ctor}` must start with an uppercase letter"),
                ));
            }
            if self.scope.ctors.contains_key(&ctor) || summands.iter().any(|s| s.ctor == ctor) {
                return Err(self.error(
                    ParseErrorKind::DuplicateConstructor,
                    ctor_span,
                    format!("constructor `{ctor}` is declared more than once"),
                ));
            }
            let payload = if self.eat(&Tok::Kw(Kw::Of)) { self.ty()? } else { Ty::Unit };
            summands.push(Summand { ctor, payload });
            if !self.eat(&Tok::Bar) {
                break;
            }
        }
        self.recursive = None;
        let d = Decl { kind, name, summands, span: Some(span) };
        self.scope.add(&d);
        Ok(d)
    }

    // ---- types ----

    fn ty(&mut self) -> Result<Ty, ParseError> {
        let lhs = self.sum_ty()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.ty()?;
            return Ok(Ty::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn sum_ty(&mut self) -> Result<Ty, ParseError> {
        let lhs = self.prod_ty()?;
        if self.eat(&Tok::Plus) {
            let rhs = self.sum_ty()?;
            return Ok(Ty::sum(lhs, rhs));
        }
        Ok(lhs)
    }

    fn prod_ty(&mut self) -> Result<Ty, ParseError> {
        let lhs = self.atom_ty()?;
        if self.eat(&Tok::Star) {
            let rhs = self.prod_ty()?;
            return Ok(Ty::prod(lhs, rhs));
        }
        Ok(lhs)
    }

    fn known_type(&self, name: &Name, span: Span) -> Result<(), ParseError> {
        if self.scope.types.contains_key(name) || self.recursive.as_ref() == Some(name) {
            Ok(())
        } else {
            Err(self.error(
                ParseErrorKind::ForwardReference,
                span,
                format!("type `{name}` is not declared before this point"),
            ))
        }
    }

    fn atom_ty(&mut self) -> Result<Ty, ParseError> {
        let span = self.here();
        match self.peek().clone() {
            Tok::Kw(Kw::Unit) => {
                self.advance();
                Ok(Ty::Unit)
            }
            Tok::Ident(name) => {
                self.advance();
                self.known_type(&name, span)?;
                Ok(Ty::Base { name, sort: Sort::Normal })
            }
            Tok::Tick(name) => {
                self.advance();
                self.known_type(&name, span)?;
                Ok(Ty::Base { name, sort: Sort::Safe })
            }
            Tok::LParen => {
                self.advance();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => {
                self.note("type");
                Err(self.unexpected())
            }
        }
    }

    // ---- expressions ----

    fn expr(&mut self) -> Result<Rc<Term>, ParseError> {
        let span = self.here();
        match self.peek() {
            Tok::Kw(Kw::Fn) => {
                self.advance();
                let mut params = Vec::new();
                loop {
                    self.expect(Tok::LParen)?;
                    let (x, _) = self.ident("parameter name")?;
                    self.expect(Tok::Colon)?;
                    let t = self.ty()?;
                    self.expect(Tok::RParen)?;
                    params.push((x, t));
                    if !self.check(&Tok::LParen) {
                        break;
                    }
                }
                self.expect(Tok::FatArrow)?;
                let mut body = self.expr()?;
                for (param, ty) in params.into_iter().rev() {
                    body = self.mk(Term::Lam { param, ty, body }, span);
                }
                Ok(body)
            }
            Tok::Kw(Kw::Case) => {
                self.advance();
                let scrutinee = self.expr()?;
                self.expect(Tok::Kw(Kw::Of))?;
                self.eat(&Tok::Bar);
                let mut arms = Vec::new();
                loop {
                    let pat_span = self.here();
                    let pat = self.pattern()?;
                    let (var, _) = self.ident("pattern variable")?;
                    self.expect(Tok::FatArrow)?;
                    let body = self.expr()?;
                    arms.push((pat, pat_span, Arm { var, body }));
                    if !self.eat(&Tok::Bar) {
                        break;
                    }
                }
                self.case_arms(scrutinee, arms, span)
            }
            Tok::Kw(Kw::Let) | Tok::Kw(Kw::LetStar) => {
                let sequential = self.advance().tok == Tok::Kw(Kw::LetStar);
                let mut bindings = Vec::new();
                loop {
                    let (name, name_span) = self.ident("binding name")?;
                    if !sequential && bindings.iter().any(|b: &Binding| b.name == name) {
                        return Err(self.error(
                            ParseErrorKind::Syntax,
                            name_span,
                            format!("`{name}` is bound twice in one `let`"),
                        ));
                    }
                    let ty = if self.eat(&Tok::Colon) { Some(self.ty()?) } else { None };
                    self.expect(Tok::Eq)?;
                    let value = self.expr()?;
                    bindings.push(Binding { name, ty, value });
                    if !self.eat(&Tok::Semi) {
                        break;
                    }
                }
                self.expect(Tok::Kw(Kw::In))?;
                let body = self.expr()?;
                if sequential {
                    let mut acc = body;
                    for b in bindings.into_iter().rev() {
                        acc = self.mk(Term::Let { bindings: vec![b], body: acc }, span);
                    }
                    Ok(acc)
                } else {
                    Ok(self.mk(Term::Let { bindings, body }, span))
                }
            }
            _ => self.app(),
        }
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        match self.peek().clone() {
            Tok::Kw(Kw::Inl) => {
                self.advance();
                Ok(Pattern::Binary(Side::First))
            }
            Tok::Kw(Kw::Inr) => {
                self.advance();
                Ok(Pattern::Binary(Side::Second))
            }
            Tok::Ident(n) if n.strip_prefix("inj").is_some_and(|d| d.parse::<usize>().is_ok()) => {
                self.advance();
                Ok(Pattern::Nary(n[3..].parse().unwrap()))
            }
            _ => {
                self.note("`inl`");
                self.note("`inr`");
                self.note("`injK`");
                Err(self.unexpected())
            }
        }
    }

    fn case_arms(
        &mut self,
        scrutinee: Rc<Term>,
        arms: Vec<(Pattern, Span, Arm)>,
        span: Span,
    ) -> Result<Rc<Term>, ParseError> {
        let bad = |p: &Parser, s: Span, m: &str| p.error(ParseErrorKind::Syntax, s, m.to_string());
        if arms.iter().all(|(p, ..)| matches!(p, Pattern::Binary(_))) {
            if arms.len() != 2 || arms[0].0 == arms[1].0 {
                return Err(bad(self, span, "a binary case needs exactly one `inl` arm and one `inr` arm"));
            }
            let mut arms = arms;
            if arms[0].0 == Pattern::Binary(Side::Second) {
                arms.swap(0, 1);
            }
            let mut it = arms.into_iter().map(|(_, _, a)| a);
            let (left, right) = (it.next().unwrap(), it.next().unwrap());
            return Ok(self.mk(Term::Case { scrutinee, left, right }, span));
        }
        let n = arms.len();
        let mut slots: Vec<Option<Arm>> = vec![None; n];
        for (p, s, arm) in arms {
            match p {
                Pattern::Nary(i) if (1..=n).contains(&i) && slots[i - 1].is_none() => slots[i - 1] = Some(arm),
                Pattern::Nary(_) => {
                    return Err(bad(self, s, &format!("an {n}-ary case needs arms `inj1` .. `inj{n}`, each once")))
                }
                Pattern::Binary(_) => return Err(bad(self, s, "cannot mix `inl`/`inr` with `injK` patterns")),
            }
        }
        if n < 2 {
            return Err(bad(self, span, "a case needs at least two arms"));
        }
        let arms: Vec<Arm> = slots.into_iter().map(Option::unwrap).collect();
        Ok(self.nest_cases(scrutinee, &arms, span))
    }

    /// `inj_i^n` is `inr^(i-1) . inl` for `i < n` and `inr^(n-1)` for `i = n`,
    /// so an n-ary case peels one `inr` per level.
    fn nest_cases(&mut self, scrutinee: Rc<Term>, arms: &[Arm], span: Span) -> Rc<Term> {
        if arms.len() == 2 {
            return self.mk(Term::Case { scrutinee, left: arms[0].clone(), right: arms[1].clone() }, span);
        }
        let mut used = Vec::new();
        for a in arms {
            used.push(a.var.clone());
            a.body.all_names(&mut used);
        }
        let fresh: Name = (1..).map(|k| format!("_c{k}")).find(|c| !used.iter().any(|u| &**u == c)).unwrap().into();
        let rest_scrut = self.mk(Term::Var(fresh.clone()), span);
        let inner = self.nest_cases(rest_scrut, &arms[1..], span);
        self.mk(Term::Case { scrutinee, left: arms[0].clone(), right: Arm { var: fresh, body: inner } }, span)
    }

    fn starts_prefix(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::Tick(_)
                | Tok::LParen
                | Tok::Kw(Kw::Fst | Kw::Snd | Kw::Inl | Kw::Inr | Kw::Lower)
                | Tok::Kw(Kw::Fold | Kw::SFold | Kw::Unfold | Kw::SUnfold)
        )
    }

    fn app(&mut self) -> Result<Rc<Term>, ParseError> {
        let span = self.here();
        let mut head = self.prefix()?;
        while self.starts_prefix() {
            let arg = self.prefix()?;
            head = self.mk(Term::App(head, arg), span);
        }
        Ok(head)
    }

    fn required_arg(&mut self) -> Result<Rc<Term>, ParseError> {
        if !self.starts_prefix() {
            self.note("expression");
            return Err(self.unexpected());
        }
        self.prefix()
    }

    fn optional_arg(&mut self) -> Result<Option<Rc<Term>>, ParseError> {
        if self.starts_prefix() {
            Ok(Some(self.prefix()?))
        } else {
            Ok(None)
        }
    }

    fn bracket_type_name(&mut self) -> Result<Name, ParseError> {
        self.expect(Tok::LBrack)?;
        let (name, span) = self.ident("type name")?;
        self.known_type(&name, span)?;
        self.expect(Tok::RBrack)?;
        Ok(name)
    }

    fn prefix(&mut self) -> Result<Rc<Term>, ParseError> {
        let span = self.here();
        let tok = self.peek().clone();
        let raw_bracket = self.peek_at(1) == &Tok::LBrack;
        let term = match tok {
            Tok::Kw(k @ (Kw::Fst | Kw::Snd | Kw::Inl | Kw::Inr | Kw::Lower)) => {
                self.advance();
                let arg = self.required_arg()?;
                match k {
                    Kw::Fst => Term::Proj(Side::First, arg),
                    Kw::Snd => Term::Proj(Side::Second, arg),
                    Kw::Inl => Term::Inj(Side::First, arg),
                    Kw::Inr => Term::Inj(Side::Second, arg),
                    _ => Term::Lower(arg),
                }
            }
            Tok::Kw(k @ (Kw::Fold | Kw::SFold)) => {
                self.advance();
                let ty = self.bracket_type_name()?;
                let step = self.required_arg()?;
                let subject = self.required_arg()?;
                let sort = if k == Kw::SFold { Sort::Safe } else { Sort::Normal };
                let site = SiteId(self.next_site);
                self.next_site += 1;
                Term::Fold { site, sort, ty, step, subject }
            }
            Tok::Kw(k @ (Kw::Unfold | Kw::SUnfold)) => {
                self.advance();
                let ty = self.bracket_type_name()?;
                let step = self.required_arg()?;
                let seed = self.required_arg()?;
                let sort = if k == Kw::SUnfold { Sort::Safe } else { Sort::Normal };
                Term::Unfold { sort, ty, step, seed }
            }
            Tok::Ident(ref n) | Tok::Tick(ref n) if raw_bracket && (&**n == "c" || &**n == "d") => {
                let sort = if matches!(tok, Tok::Tick(_)) { Sort::Safe } else { Sort::Normal };
                let is_con = &**n == "c";
                self.advance();
                let ty = self.bracket_type_name()?;
                let arg = self.optional_arg()?;
                if is_con {
                    Term::Con { ty, sort, arg }
                } else {
                    Term::Des { ty, sort, arg }
                }
            }
            Tok::Ident(ref n) | Tok::Tick(ref n) if is_ctor_name(n) => {
                let sort = if matches!(tok, Tok::Tick(_)) { Sort::Safe } else { Sort::Normal };
                let name = n.clone();
                self.advance();
                let arg = match self.scope.ctors.get(&name) {
                    Some(false) => None,
                    _ => self.optional_arg()?,
                };
                Term::Ctor { name, sort, arg }
            }
            Tok::Tick(n) => {
                return Err(self.error(
                    ParseErrorKind::Syntax,
                    span,
                    format!("`'{n}` is not a safe constructor (safe constructors start with an uppercase letter)"),
                ))
            }
            _ => return self.atom(),
        };
        Ok(self.mk(term, span))
    }

    fn atom(&mut self) -> Result<Rc<Term>, ParseError> {
        let span = self.here();
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.advance();
                Ok(self.mk(Term::Var(x), span))
            }
            Tok::LParen => {
                self.advance();
                if self.eat(&Tok::RParen) {
                    return Ok(self.mk(Term::Unit, span));
                }
                let e = self.expr()?;
                if self.eat(&Tok::Comma) {
                    let e2 = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(self.mk(Term::Pair(e, e2), span));
                }
                if self.eat(&Tok::Colon) {
                    let t = self.ty()?;
                    self.expect(Tok::RParen)?;
                    return Ok(self.mk(Term::Ann(e, t), span));
                }
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => {
                self.note("expression");
                Err(self.unexpected())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pattern {
    Binary(Side),
    Nary(usize),
}
