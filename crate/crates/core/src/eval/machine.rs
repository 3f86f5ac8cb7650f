use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use serde::Serialize;

use super::heap::*;
use crate::surface::{DeclKind, Side, SiteId, Term};
use crate::typesys::{DeclEnv, DeclInfo, Name, Shape};

/// When a fold keeps a memo table keyed by subject cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemoPolicy {
    /// Only for branching subject types.
    #[default]
    Branching,
    Never,
    Always,
}

#[derive(Clone, Copy, Debug)]
pub struct EvalConfig {
    /// Maximum number of evaluation steps.
    pub fuel: u64,
    pub memo: MemoPolicy,
}

pub const DEFAULT_FUEL: u64 = 10_000_000;

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { fuel: DEFAULT_FUEL, memo: MemoPolicy::Branching }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SiteStats {
    pub ty: String,
    /// Top-level invocations of this fold occurrence.
    pub invocations: u64,
    /// Times the step function was applied.
    pub step_entries: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Cost {
    pub steps: u64,
    pub allocations: u64,
    pub memo_hits: u64,
    pub memo_misses: u64,
    pub memo_tables: u64,
    pub thunk_forces: u64,
    pub sites: BTreeMap<SiteId, SiteStats>,
}

impl Cost {
    /// Step-function entries summed over every fold site.
    pub fn step_entries(&self) -> u64 {
        self.sites.values().map(|s| s.step_entries).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
pub enum EvalError {
    #[error("out of fuel after {steps} steps")]
    OutOfFuel { steps: u64 },
    #[error("internal error (ill-typed input?): {0}")]
    Internal(String),
}

impl EvalError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::OutOfFuel { .. } => "out-of-fuel",
            EvalError::Internal(_) => "internal",
        }
    }
}

type R<T> = Result<T, EvalError>;

fn internal<T>(msg: impl Into<String>) -> R<T> {
    Err(EvalError::Internal(msg.into()))
}

/// Big-step call-by-value evaluator over a shared heap.
pub struct Evaluator<'a> {
    decls: &'a DeclEnv,
    pub heap: &'a mut Heap,
    config: EvalConfig,
    cost: Cost,
}

impl<'a> Evaluator<'a> {
    pub fn new(decls: &'a DeclEnv, heap: &'a mut Heap, config: EvalConfig) -> Evaluator<'a> {
        Evaluator { decls, heap, config, cost: Cost::default() }
    }

    pub fn cost(&self) -> &Cost {
        &self.cost
    }

    pub fn take_cost(&mut self) -> Cost {
        std::mem::take(&mut self.cost)
    }

    fn tick(&mut self) -> R<()> {
        self.cost.steps += 1;
        if self.cost.steps > self.config.fuel {
            return Err(EvalError::OutOfFuel { steps: self.cost.steps });
        }
        Ok(())
    }

    fn alloc(&mut self, cell: Cell) -> Value {
        self.cost.allocations += 1;
        Value::Cell(self.heap.alloc(cell))
    }

    fn unit(&self) -> Value {
        Value::Cell(self.heap.unit())
    }

    fn decl(&self, name: &str) -> R<&'a DeclInfo> {
        match self.decls.get(name) {
            Some(d) => Ok(d),
            None => internal(format!("unknown type `{name}`")),
        }
    }

    fn cell_of(&self, v: &Value) -> R<CellRef> {
        match v {
            Value::Cell(c) => Ok(*c),
            Value::Closure(_) => internal("expected a cell, found a function"),
        }
    }

    pub fn eval(&mut self, t: &Rc<Term>, env: &Env) -> R<Value> {
        stacker::maybe_grow(256 * 1024, 8 * 1024 * 1024, || self.eval_inner(t, env))
    }

    fn eval_inner(&mut self, t: &Rc<Term>, env: &Env) -> R<Value> {
        self.tick()?;
        match &**t {
            Term::Var(x) => match env.lookup(x) {
                Some(v) => Ok(v.clone()),
                None => internal(format!("unbound variable `{x}`")),
            },
            Term::Unit => Ok(self.unit()),
            Term::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                self.apply(&fv, av)
            }
            Term::Lam { param, body, .. } => {
                Ok(Value::Closure(Rc::new(Closure::Lam { param: param.clone(), body: body.clone(), env: env.clone() })))
            }
            Term::Pair(a, b) => {
                let av = self.eval(a, env)?;
                let bv = self.eval(b, env)?;
                Ok(self.alloc(Cell::Pair(av, bv)))
            }
            Term::Proj(side, e) => {
                let v = self.eval(e, env)?;
                self.project(&v, *side)
            }
            Term::Inj(side, e) => {
                let v = self.eval(e, env)?;
                Ok(self.alloc(Cell::Inj(*side, v)))
            }
            Term::Case { scrutinee, left, right } => {
                let v = self.eval(scrutinee, env)?;
                let c = self.cell_of(&v)?;
                match self.heap.get(c) {
                    Cell::Inj(Side::First, x) => {
                        let env = env.extend(left.var.clone(), x.clone());
                        self.eval(&left.body, &env)
                    }
                    Cell::Inj(Side::Second, x) => {
                        let env = env.extend(right.var.clone(), x.clone());
                        self.eval(&right.body, &env)
                    }
                    other => internal(format!("case on a non-injection {other:?}")),
                }
            }
            Term::Let { bindings, body } => {
                let mut inner = env.clone();
                for b in bindings {
                    let v = self.eval(&b.value, env)?;
                    inner = inner.extend(b.name.clone(), v);
                }
                self.eval(body, &inner)
            }
            Term::Ann(e, _) | Term::Lower(e) => self.eval(e, env),
            Term::Ctor { name, arg, .. } => {
                let Some((d, c)) = self.decls.ctor(name) else {
                    return internal(format!("unknown constructor `{name}`"));
                };
                let (ty, index) = (d.name.clone(), c.index);
                match (arg, d.kind) {
                    (None, _) if c.payload != crate::typesys::Ty::Unit => {
                        Ok(Value::Closure(Rc::new(Closure::Ctor { ty, index })))
                    }
                    (None, _) => {
                        let u = self.unit();
                        self.construct_sugared(d, index, u)
                    }
                    (Some(a), DeclKind::Data) => {
                        let v = self.eval(a, env)?;
                        self.construct_sugared(d, index, v)
                    }
                    (Some(a), DeclKind::Codata) => Ok(self.alloc(Cell::Thunk {
                        ty,
                        state: ThunkState::Unforced(Suspended::Payload {
                            term: a.clone(),
                            env: env.clone(),
                            inj: Some((index, d.arity())),
                        }),
                    })),
                }
            }
            Term::Con { ty, arg, .. } => {
                let d = self.decl(ty)?;
                match (arg, d.kind) {
                    (None, _) => Ok(Value::Closure(Rc::new(Closure::Con { ty: ty.clone() }))),
                    (Some(a), DeclKind::Data) => {
                        let v = self.eval(a, env)?;
                        self.construct(d, v)
                    }
                    (Some(a), DeclKind::Codata) => Ok(self.alloc(Cell::Thunk {
                        ty: ty.clone(),
                        state: ThunkState::Unforced(Suspended::Payload { term: a.clone(), env: env.clone(), inj: None }),
                    })),
                }
            }
            Term::Des { ty, arg, .. } => match arg {
                None => Ok(Value::Closure(Rc::new(Closure::Des { ty: ty.clone() }))),
                Some(a) => {
                    let v = self.eval(a, env)?;
                    self.destruct(&v)
                }
            },
            Term::Fold { site, ty, step, subject, .. } => {
                let g = self.eval(step, env)?;
                let s = self.eval(subject, env)?;
                self.fold(*site, ty, &g, &s)
            }
            Term::Unfold { ty, step, seed, .. } => Ok(self.alloc(Cell::Thunk {
                ty: ty.clone(),
                state: ThunkState::Unforced(Suspended::Unfold { step: step.clone(), seed: seed.clone(), env: env.clone() }),
            })),
        }
    }

    pub fn apply(&mut self, f: &Value, arg: Value) -> R<Value> {
        self.tick()?;
        let Value::Closure(c) = f else {
            return internal("applied a non-function");
        };
        match &**c {
            Closure::Lam { param, body, env } => {
                let env = env.extend(param.clone(), arg);
                self.eval(body, &env)
            }
            Closure::Ctor { ty, index } => {
                let d = self.decl(ty)?;
                self.construct_sugared(d, *index, arg)
            }
            Closure::Con { ty } => {
                let d = self.decl(ty)?;
                self.construct(d, arg)
            }
            Closure::Des { .. } => self.destruct(&arg),
        }
    }

    fn project(&mut self, v: &Value, side: Side) -> R<Value> {
        let c = self.cell_of(v)?;
        match self.heap.get(c) {
            Cell::Pair(a, b) => Ok(if side == Side::First { a.clone() } else { b.clone() }),
            other => internal(format!("projection from a non-pair {other:?}")),
        }
    }

    /// Wrap a summand payload in the injections `ι_i^n`.
    fn inject(&mut self, index: usize, arity: usize, payload: Value) -> Value {
        if arity == 1 {
            return payload;
        }
        let mut v = payload;
        if index + 1 < arity {
            v = self.alloc(Cell::Inj(Side::First, v));
        }
        for _ in 0..index {
            v = self.alloc(Cell::Inj(Side::Second, v));
        }
        v
    }

    /// Read `ι_i^n v` back into `(i, v)`.
    fn uninject(&self, arity: usize, v: Value) -> R<(usize, Value)> {
        let mut cur = v;
        for i in 0..arity.saturating_sub(1) {
            let c = self.cell_of(&cur)?;
            match self.heap.get(c) {
                Cell::Inj(Side::First, x) => return Ok((i, x.clone())),
                Cell::Inj(Side::Second, x) => cur = x.clone(),
                other => return internal(format!("expected an injection, found {other:?}")),
            }
        }
        Ok((arity - 1, cur))
    }

    fn construct_sugared(&mut self, d: &DeclInfo, index: usize, payload: Value) -> R<Value> {
        match d.kind {
            DeclKind::Data => Ok(self.alloc(Cell::Data { ty: d.name.clone(), ctor: index, payload })),
            DeclKind::Codata => {
                let head = self.inject(index, d.arity(), payload);
                Ok(self.alloc(Cell::Thunk { ty: d.name.clone(), state: ThunkState::Unforced(Suspended::Head(head)) }))
            }
        }
    }

    /// `c[tau] v` for a value `v : F tau`.
    fn construct(&mut self, d: &DeclInfo, v: Value) -> R<Value> {
        match d.kind {
            DeclKind::Data => {
                let (index, payload) = self.uninject(d.arity(), v)?;
                Ok(self.alloc(Cell::Data { ty: d.name.clone(), ctor: index, payload }))
            }
            DeclKind::Codata => {
                Ok(self.alloc(Cell::Thunk { ty: d.name.clone(), state: ThunkState::Unforced(Suspended::Head(v)) }))
            }
        }
    }

    /// `d[tau] v`: one layer of a data cell, or the forced head of a thunk.
    pub fn destruct(&mut self, v: &Value) -> R<Value> {
        let c = self.cell_of(v)?;
        match self.heap.get(c) {
            Cell::Data { ty, ctor, payload } => {
                let (ctor, payload) = (*ctor, payload.clone());
                let d = self.decl(&ty.clone())?;
                Ok(self.inject(ctor, d.arity(), payload))
            }
            Cell::Thunk { .. } => self.force(c),
            other => internal(format!("destructor applied to {other:?}")),
        }
    }

    /// Force a codata cell, performing its suspended work at most once.
    pub fn force(&mut self, c: CellRef) -> R<Value> {
        let ty = match self.heap.get(c) {
            Cell::Thunk { state: ThunkState::Forced(h), .. } => return Ok(h.clone()),
            Cell::Thunk { ty, .. } => ty.clone(),
            other => return internal(format!("forced a non-codata cell {other:?}")),
        };
        let suspended = match self.heap.set_thunk_state(c, ThunkState::Forcing) {
            ThunkState::Unforced(s) => s,
            _ => return internal("cyclic forcing"),
        };
        self.cost.thunk_forces += 1;
        let head = self.run_suspended(&ty, suspended)?;
        self.heap.set_thunk_state(c, ThunkState::Forced(head.clone()));
        Ok(head)
    }

    fn run_suspended(&mut self, ty: &Name, s: Suspended) -> R<Value> {
        let d = self.decl(ty)?;
        match s {
            Suspended::Head(h) => Ok(h),
            Suspended::Payload { term, env, inj } => {
                let v = self.eval(&term, &env)?;
                Ok(match inj {
                    Some((index, arity)) => self.inject(index, arity, v),
                    None => v,
                })
            }
            Suspended::Unfold { step, seed, env } => {
                let f = self.eval(&step, &env)?;
                let s = self.eval(&seed, &env)?;
                self.unfold_layer(d, f, s)
            }
            Suspended::Unfolding { step, seed } => self.unfold_layer(d, step, seed),
        }
    }

    /// `F(unfold f)(f seed)`: recursive slots become fresh unforced thunks.
    fn unfold_layer(&mut self, d: &DeclInfo, f: Value, seed: Value) -> R<Value> {
        let layer = self.apply(&f, seed)?;
        let ty = d.name.clone();
        self.fmap(&d.functor, &layer, &mut |ev, x| {
            Ok(ev.alloc(Cell::Thunk {
                ty: ty.clone(),
                state: ThunkState::Unforced(Suspended::Unfolding { step: f.clone(), seed: x }),
            }))
        })
    }

    /// The action of a signature functor on a morphism given as a callback.
    pub fn fmap(
        &mut self,
        shape: &Shape,
        v: &Value,
        f: &mut dyn FnMut(&mut Self, Value) -> R<Value>,
    ) -> R<Value> {
        match shape {
            Shape::Unit | Shape::Const(_) => Ok(v.clone()),
            Shape::Rec => f(self, v.clone()),
            Shape::Prod(a, b) => {
                let (x, y) = (self.project(v, Side::First)?, self.project(v, Side::Second)?);
                let x2 = self.fmap(a, &x, f)?;
                let y2 = self.fmap(b, &y, f)?;
                Ok(self.alloc(Cell::Pair(x2, y2)))
            }
            Shape::Sum(a, b) => {
                let c = self.cell_of(v)?;
                let (side, x) = match self.heap.get(c) {
                    Cell::Inj(side, x) => (*side, x.clone()),
                    other => return internal(format!("expected an injection, found {other:?}")),
                };
                let x2 = self.fmap(if side == Side::First { a } else { b }, &x, f)?;
                Ok(self.alloc(Cell::Inj(side, x2)))
            }
        }
    }

    /// `F f` applied to `v`, with `f` a function value.
    pub fn apply_functor_map(&mut self, shape: &Shape, f: &Value, v: &Value) -> R<Value> {
        self.fmap(shape, v, &mut |ev, x| ev.apply(f, x))
    }

    /// `fold g s`, memoized per invocation when the policy asks for it.
    pub fn fold(&mut self, site: SiteId, ty: &Name, g: &Value, subject: &Value) -> R<Value> {
        let d = self.decl(ty)?;
        let memo = match self.config.memo {
            MemoPolicy::Always => true,
            MemoPolicy::Never => false,
            MemoPolicy::Branching => d.branching,
        };
        let stats = self.cost.sites.entry(site).or_default();
        stats.ty = ty.to_string();
        stats.invocations += 1;
        let mut table = if memo {
            self.cost.memo_tables += 1;
            Some(HashMap::new())
        } else {
            None
        };
        self.fold_cell(site, d, g, subject, &mut table)
    }

    fn fold_cell(
        &mut self,
        site: SiteId,
        d: &DeclInfo,
        g: &Value,
        v: &Value,
        table: &mut Option<HashMap<CellRef, Value>>,
    ) -> R<Value> {
        stacker::maybe_grow(256 * 1024, 8 * 1024 * 1024, || {
            self.tick()?;
            let c = self.cell_of(v)?;
            if let Some(t) = table {
                if let Some(hit) = t.get(&c) {
                    self.cost.memo_hits += 1;
                    return Ok(hit.clone());
                }
                self.cost.memo_misses += 1;
            }
            let layer = self.destruct(v)?;
            let mapped = self.fmap(&d.functor, &layer, &mut |ev, x| ev.fold_cell(site, d, g, &x, table))?;
            self.cost.sites.entry(site).or_default().step_entries += 1;
            let r = self.apply(g, mapped)?;
            if let Some(t) = table {
                t.insert(c, r.clone());
            }
            Ok(r)
        })
    }
}

/// Build the unary numeral `k` of a `unit + X` data type.
pub fn alloc_numeral(heap: &mut Heap, d: &DeclInfo, k: u64) -> Result<Value, EvalError> {
    let zero = d.ctors.iter().find(|c| c.payload == crate::typesys::Ty::Unit);
    let succ = d.ctors.iter().find(|c| c.payload == d.ty());
    let (Some(zero), Some(succ)) = (zero, succ) else {
        return internal(format!("`{}` is not a numeral type", d.name));
    };
    let unit = Value::Cell(heap.unit());
    let mut v = Value::Cell(heap.alloc(Cell::Data { ty: d.name.clone(), ctor: zero.index, payload: unit }));
    for _ in 0..k {
        v = Value::Cell(heap.alloc(Cell::Data { ty: d.name.clone(), ctor: succ.index, payload: v }));
    }
    Ok(v)
}
