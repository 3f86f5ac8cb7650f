//! Random type-directed term generation over an open context of normal and
//! safe variables. Generated terms are not well-typed by construction: sorts
//! are sometimes flipped on purpose, and the checker is the filter.

use std::fmt;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum G {
    Nat(bool),
    Bit(bool),
    Unit,
    Prod(Box<G>, Box<G>),
    Sum(Box<G>, Box<G>),
    Arrow(Box<G>, Box<G>),
}

use G::*;

fn tick(safe: bool) -> &'static str {
    if safe {
        "'"
    } else {
        ""
    }
}

impl fmt::Display for G {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nat(s) => write!(f, "{}nat", tick(*s)),
            Bit(s) => write!(f, "{}bit", tick(*s)),
            Unit => f.write_str("unit"),
            Prod(a, b) => write!(f, "({a} * {b})"),
            Sum(a, b) => write!(f, "({a} + {b})"),
            Arrow(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}

fn prod(a: G, b: G) -> G {
    Prod(Box::new(a), Box::new(b))
}
fn sum(a: G, b: G) -> G {
    Sum(Box::new(a), Box::new(b))
}
fn arrow(a: G, b: G) -> G {
    Arrow(Box::new(a), Box::new(b))
}

impl G {
    /// Ground with at least one base, all of them safe.
    pub fn is_safe_ground(&self) -> bool {
        fn walk(t: &G, any: &mut bool) -> bool {
            match t {
                Nat(s) | Bit(s) => {
                    *any = true;
                    *s
                }
                Unit => true,
                Prod(a, b) | Sum(a, b) => walk(a, any) && walk(b, any),
                Arrow(..) => false,
            }
        }
        let mut any = false;
        walk(self, &mut any) && any
    }

    fn flip(&self) -> G {
        match self {
            Nat(s) => Nat(!s),
            Bit(s) => Bit(!s),
            Unit => Unit,
            Prod(a, b) => prod(a.flip(), b.flip()),
            Sum(a, b) => sum(a.flip(), b.flip()),
            Arrow(a, b) => arrow(a.flip(), b.flip()),
        }
    }
}

pub fn small_types() -> Vec<G> {
    vec![
        Nat(false),
        Nat(true),
        Bit(false),
        Bit(true),
        Unit,
        prod(Nat(false), Nat(false)),
        prod(Nat(true), Bit(true)),
        sum(Unit, Nat(true)),
        sum(Unit, Nat(false)),
        arrow(Nat(false), Nat(false)),
        arrow(Nat(true), Nat(true)),
        arrow(Nat(false), Nat(true)),
    ]
}

pub fn normal_targets() -> Vec<G> {
    vec![
        Nat(false),
        Bit(false),
        prod(Nat(false), Nat(false)),
        prod(Nat(false), Bit(false)),
        sum(Unit, Nat(false)),
        sum(prod(Nat(false), Bit(false)), Unit),
    ]
}

/// The open context every term is generated in.
pub fn base_context() -> Vec<(String, G)> {
    [
        ("x", Nat(false)),
        ("x2", Nat(false)),
        ("y", Nat(true)),
        ("y2", Nat(true)),
        ("b", Bit(false)),
        ("c", Bit(true)),
        ("u0", Unit),
        ("p", prod(Nat(false), Bit(false))),
        ("q", prod(Nat(true), Bit(true))),
        ("s", sum(Unit, Nat(true))),
        ("f", arrow(Nat(false), Nat(true))),
        ("g", arrow(Nat(true), Nat(true))),
        ("h", arrow(Nat(false), Nat(false))),
    ]
    .into_iter()
    .map(|(x, t)| (x.to_string(), t))
    .collect()
}

pub struct TermGen<'r> {
    rng: &'r mut StdRng,
    ctx: Vec<(String, G)>,
    fresh: usize,
}

impl<'r> TermGen<'r> {
    pub fn new(rng: &'r mut StdRng) -> Self {
        TermGen { rng, ctx: base_context(), fresh: 0 }
    }

    fn fresh(&mut self) -> String {
        self.fresh += 1;
        format!("v{}", self.fresh)
    }

    fn random_type(&mut self) -> G {
        small_types().choose(self.rng).unwrap().clone()
    }

    fn under<T>(&mut self, x: &str, t: G, k: impl FnOnce(&mut Self) -> T) -> T {
        self.ctx.push((x.to_string(), t));
        let r = k(self);
        self.ctx.pop();
        r
    }

    pub fn term(&mut self, t: &G, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.leaf(t);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..6) {
            0 => self.case(t, d),
            1 => {
                let a = self.random_type();
                let f = self.term(&arrow(a.clone(), t.clone()), d);
                let x = self.term(&a, d);
                format!("({f}) ({x})")
            }
            2 => {
                let a = self.random_type();
                let v = self.fresh();
                let e = self.term(&a, d);
                let body = self.under(&v, a, |g| g.term(t, d));
                format!("(let {v} = {e} in {body})")
            }
            3 => {
                let other = self.random_type();
                if self.rng.gen_bool(0.5) {
                    format!("fst ({})", self.term(&prod(t.clone(), other), d))
                } else {
                    format!("snd ({})", self.term(&prod(other, t.clone()), d))
                }
            }
            _ => self.intro(t, d),
        }
    }

    fn leaf(&mut self, t: &G) -> String {
        let want = if self.rng.gen_bool(0.1) { t.flip() } else { t.clone() };
        let vars: Vec<String> = self.ctx.iter().filter(|(_, u)| *u == want).map(|(x, _)| x.clone()).collect();
        if let Some(x) = vars.choose(self.rng) {
            if self.rng.gen_bool(0.7) {
                return x.clone();
            }
        }
        match t {
            Nat(s) => format!("{}Zero", tick(*s)),
            Bit(s) => format!("{}{}", tick(*s), if self.rng.gen_bool(0.5) { "Nought" } else { "One" }),
            Unit => "()".into(),
            Prod(a, b) => format!("({}, {})", self.leaf(a), self.leaf(b)),
            Sum(a, _) => format!("(inl ({}) : {t})", self.leaf(a)),
            Arrow(a, b) => {
                let v = self.fresh();
                let body = self.under(&v, (**a).clone(), |g| g.leaf(b));
                format!("(fn ({v} : {a}) => {body})")
            }
        }
    }

    fn case(&mut self, t: &G, d: u32) -> String {
        let (v1, v2) = (self.fresh(), self.fresh());
        let safe = self.rng.gen_bool(0.5);
        let (scrutinee, left, right) = match self.rng.gen_range(0..3) {
            0 => (format!("{}d[nat] ({})", tick(safe), self.term(&Nat(safe), d)), Unit, Nat(safe)),
            1 => (format!("{}d[bit] ({})", tick(safe), self.term(&Bit(safe), d)), Unit, Unit),
            _ => {
                let s = sum(Unit, Nat(safe));
                (self.term(&s, d), Unit, Nat(safe))
            }
        };
        let l = self.under(&v1, left, |g| g.term(t, d));
        let r = self.under(&v2, right, |g| g.term(t, d));
        format!("(case {scrutinee} of inl {v1} => ({l}) | inr {v2} => ({r}))")
    }

    fn intro(&mut self, t: &G, d: u32) -> String {
        match t {
            Nat(s) => match self.rng.gen_range(0..3) {
                0 => format!("{}Succ ({})", tick(*s), self.term(t, d)),
                1 if !s => format!("lower ({})", self.term(&Nat(true), d)),
                _ => self.sfold(t, d),
            },
            Bit(false) if self.rng.gen_bool(0.5) => format!("lower ({})", self.term(&Bit(true), d)),
            Bit(_) | Unit => self.sfold(t, d),
            Prod(a, b) => format!("({}, {})", self.term(a, d), self.term(b, d)),
            Sum(a, b) => {
                if self.rng.gen_bool(0.5) {
                    format!("(inl ({}) : {t})", self.term(a, d))
                } else {
                    format!("(inr ({}) : {t})", self.term(b, d))
                }
            }
            Arrow(a, b) => {
                let v = self.fresh();
                let body = self.under(&v, (**a).clone(), |g| g.term(b, d));
                format!("(fn ({v} : {a}) => {body})")
            }
        }
    }

    /// A safe recursion over a normal numeral, with motive `t` (which the
    /// checker rejects unless it is safe or unit-only).
    fn sfold(&mut self, t: &G, d: u32) -> String {
        let (z, u, w) = (self.fresh(), self.fresh(), self.fresh());
        let base = self.under(&u, Unit, |g| g.term(t, d));
        let step = self.under(&w, t.clone(), |g| g.term(t, d));
        let subject = self.term(&Nat(false), d);
        format!("sfold[nat] (fn ({z} : unit + {t}) => case {z} of inl {u} => ({base}) | inr {w} => ({step})) ({subject})")
    }
}
