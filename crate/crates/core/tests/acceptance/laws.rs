//! The fold law, the unfold law and the iterated-destructor law on every
//! recursion and corecursion step that occurs in the corpus.
//!
//! Oracles here never call the evaluator's fold or force code paths: folds
//! are recomputed by walking data cells and applying the step directly, and
//! unfolds by iterating the step on seeds.

use std::collections::HashMap;

use rs1::eval::{alloc_numeral, structurally_equal, Cell, CellRef, EvalConfig, Evaluator, Heap, Value};
use rs1::surface::{Side, SiteId};
use rs1::typesys::{DeclEnv, Mode, Shape};

use crate::support::compiled;

const NAT: &str = "data nat = Zero | Succ of nat";
const NAT_BIT: &str = "data nat = Zero | Succ of nat; data bit = Nought | One";
const TREE: &str = "data tree = Leaf | Fork of tree * tree";
const NAT_TREE: &str = "data nat = Zero | Succ of nat; data tree = Leaf | Fork of tree * tree";
const NAT_BIT_TREE: &str = "data nat = Zero | Succ of nat; data bit = Nought | One; data tree = Leaf | Fork of tree * tree";
const NATS: &str = "data nat = Zero | Succ of nat; codata nats = Cons of nat * nats";
const STREAM: &str = "data bit = Nought | One; codata stream = Cons of bit * stream";
const NAT_STREAM: &str = "data nat = Zero | Succ of nat; data bit = Nought | One; codata stream = Cons of bit * stream";

const PLUS: &str = "fn (x : nat) (y : 'nat) =>
  sfold[nat] (fn (z : unit + 'nat) => case z of inl u => y | inr w => 'Succ w) x";
const GE: &str = "fn (a : nat) =>
  fold[nat] (fn (z : unit + (nat -> bit)) => case z of
    inl u => (fn (b : nat) => case d[nat] b of inl v => One | inr w => Nought)
  | inr r => (fn (b : nat) => case d[nat] b of inl v => One | inr w => r w)) a";
const ALTERNATING: &str =
    "sunfold[stream] (fn (b : 'bit) => (b, case 'd[bit] b of inl x => 'One | inr x => 'Nought)) 'Nought";

/// How two results of the same type are compared.
#[derive(Clone, Copy)]
enum Cmp {
    Ground,
    /// A `nat -> ground` function, applied to the numerals 0..=6.
    NatFun,
    /// A codata value, compared layer by layer to the given depth.
    Codata(u32),
}

struct FoldCase {
    name: &'static str,
    decls: &'static str,
    mode: Mode,
    ty: &'static str,
    step: String,
    cmp: Cmp,
}

fn fold_cases() -> Vec<FoldCase> {
    let case = |name, decls, mode, ty, step: &str, cmp| FoldCase { name, decls, mode, ty, step: step.to_string(), cmp };
    vec![
        case(
            "plus step",
            NAT,
            Mode::RSMinus,
            "nat",
            "let y = 'Succ ('Succ 'Zero) in fn (z : unit + 'nat) => case z of inl u => y | inr w => 'Succ w",
            Cmp::Ground,
        ),
        case(
            "times step",
            NAT,
            Mode::RSMinus,
            "nat",
            &format!(
                "let* plus = {PLUS}; x = Succ (Succ (Succ Zero)) in
                 fn (z : unit + 'nat) => case z of inl u => 'Zero | inr w => plus x w"
            ),
            Cmp::Ground,
        ),
        case("up nat", NAT, Mode::RSMinus, "nat", "'c[nat]", Cmp::Ground),
        case("up tree", TREE, Mode::RSMinus, "tree", "'c[tree]", Cmp::Ground),
        case(
            "comparison step",
            NAT_BIT,
            Mode::SMinus,
            "nat",
            "fn (z : unit + (nat -> bit)) => case z of
               inl u => (fn (b : nat) => case d[nat] b of inl v => One | inr w => Nought)
             | inr r => (fn (b : nat) => case d[nat] b of inl v => One | inr w => r w)",
            Cmp::NatFun,
        ),
        case(
            "height step",
            NAT_BIT_TREE,
            Mode::SMinus,
            "tree",
            &format!(
                "let* ge = {GE};
                      max = fn (a : nat) (b : nat) => case d[bit] (ge a b) of inl u => b | inr u => a
                 in fn (z : unit + nat * nat) => case z of inl u => Zero | inr p => Succ (max (fst p) (snd p))"
            ),
            Cmp::Ground,
        ),
        case(
            "shared tree step",
            NAT_TREE,
            Mode::RSMinus,
            "nat",
            "fn (z : unit + 'tree) => case z of inl u => 'Leaf | inr t => 'Fork (t, t)",
            Cmp::Ground,
        ),
        case(
            "shared tree step (classical)",
            NAT_TREE,
            Mode::SMinus,
            "nat",
            "fn (z : unit + tree) => case z of inl u => Leaf | inr t => Fork (t, t)",
            Cmp::Ground,
        ),
        case(
            "doubling step",
            NAT,
            Mode::SMinus,
            "nat",
            "fn (z : unit + nat) => case z of inl u => Zero | inr r => Succ (Succ r)",
            Cmp::Ground,
        ),
        case(
            "safe doubling step",
            NAT,
            Mode::RSMinus,
            "nat",
            "fn (z : unit + 'nat) => case z of inl u => 'Zero | inr r => 'Succ ('Succ r)",
            Cmp::Ground,
        ),
        case(
            "exponential step",
            NAT,
            Mode::SMinus,
            "nat",
            "let double = fn (x : nat) =>
               fold[nat] (fn (z : unit + nat) => case z of inl u => Zero | inr r => Succ (Succ r)) x
             in fn (z : unit + nat) => case z of inl u => Succ Zero | inr r => double (double r)",
            Cmp::Ground,
        ),
        case(
            "stream walk step",
            NATS,
            Mode::S,
            "nat",
            "let ns = unfold[nats] (fn (x : nat) => case d[nat] x of
                 inl y => (Zero, Succ Zero) | inr y => (Succ y, Succ (Succ y))) Zero
             in fn (x : unit + nats) => case x of inl y => ns | inr y => snd (d[nats] y)",
            Cmp::Codata(16),
        ),
        case(
            "safe stream walk step",
            NATS,
            Mode::RS,
            "nat",
            "let ns = sunfold[nats] (fn (x : 'nat) => case 'd[nat] x of
                 inl y => ('Zero, 'Succ 'Zero) | inr y => ('Succ y, 'Succ ('Succ y))) 'Zero
             in fn (x : unit + 'nats) => case x of inl y => ns | inr y => snd ('d[nats] y)",
            Cmp::Codata(16),
        ),
    ]
}

struct UnfoldCase {
    name: &'static str,
    decls: &'static str,
    mode: Mode,
    ty: &'static str,
    step: String,
    seed: String,
}

fn unfold_cases() -> Vec<UnfoldCase> {
    let case = |name, decls, mode, ty, step: &str, seed: &str| UnfoldCase {
        name,
        decls,
        mode,
        ty,
        step: step.to_string(),
        seed: seed.to_string(),
    };
    vec![
        case(
            "identity stream",
            NATS,
            Mode::S,
            "nats",
            "let f = fn (x : nat) => x in fn (x : nat) => case d[nat] x of
               inl y => (f Zero, Succ Zero) | inr y => (f (Succ y), Succ (Succ y))",
            "Zero",
        ),
        case(
            "safe identity stream",
            NATS,
            Mode::RS,
            "nats",
            "let f = fn (x : 'nat) => x in fn (x : 'nat) => case 'd[nat] x of
               inl y => (f 'Zero, 'Succ 'Zero) | inr y => (f ('Succ y), 'Succ ('Succ y))",
            "'Zero",
        ),
        case("zeros", NATS, Mode::RS, "nats", "fn (u : unit) => ('Zero, ())", "()"),
        case(
            "alternating bits",
            STREAM,
            Mode::RS,
            "stream",
            "fn (b : 'bit) => (b, case 'd[bit] b of inl x => 'One | inr x => 'Nought)",
            "'Nought",
        ),
        case(
            "counter",
            NAT_STREAM,
            Mode::RS,
            "stream",
            "fn (n : 'nat) => (case 'd[nat] n of inl z => 'One | inr m => 'Nought, 'Succ n)",
            "'Zero",
        ),
        case("stream identity", STREAM, Mode::RS, "stream", "fn (t : 'stream) => 'd[stream] t", ALTERNATING),
        case(
            "running parity",
            STREAM,
            Mode::RS,
            "stream",
            "let* flip = fn (b : 'bit) => case 'd[bit] b of inl u => 'One | inr u => 'Nought;
                  xor = fn (a : 'bit) (b : 'bit) => case 'd[bit] a of inl u => b | inr u => flip b
             in fn (st : 'bit * 'stream) =>
                  let* p = 'd[stream] (snd st);
                       b = xor (fst st) (fst p)
                  in (b, (b, snd p))",
            &format!("('Nought, {ALTERNATING})"),
        ),
    ]
}

type R<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn eval_in(decls: &str, mode: Mode, body: &str, heap: &mut Heap) -> R<(Value, DeclEnv)> {
    let c = compiled(&format!("{decls}\nin\n{body}"), mode)?;
    let (v, _) = c.run(heap, EvalConfig::default()).map_err(err)?;
    Ok((v, c.decls))
}

fn numerals(heap: &mut Heap, decls: &DeclEnv, upto: u64) -> R<Vec<Value>> {
    let nat = decls.get("nat").ok_or("no nat")?;
    (0..=upto).map(|k| alloc_numeral(heap, nat, k).map_err(err)).collect()
}

/// Shared perfect trees of heights 0..=5 and a few unshared trees.
fn trees(heap: &mut Heap) -> Vec<Value> {
    let leaf = |heap: &mut Heap| {
        let u = Value::Cell(heap.unit());
        Value::Cell(heap.alloc(Cell::Data { ty: "tree".into(), ctor: 0, payload: u }))
    };
    let fork = |heap: &mut Heap, a: Value, b: Value| {
        let p = Value::Cell(heap.alloc(Cell::Pair(a, b)));
        Value::Cell(heap.alloc(Cell::Data { ty: "tree".into(), ctor: 1, payload: p }))
    };
    let mut out = vec![leaf(heap)];
    for k in 1..=5 {
        let t = out[k - 1].clone();
        out.push(fork(heap, t.clone(), t));
    }
    // Unshared, unbalanced shapes.
    let mut spine = leaf(heap);
    for k in 0..4 {
        let l = leaf(heap);
        spine = if k % 2 == 0 { fork(heap, spine, l) } else { fork(heap, l, spine) };
    }
    out.push(spine);
    let (a, b) = (leaf(heap), leaf(heap));
    let ab = fork(heap, a, b);
    let (c, d) = (leaf(heap), leaf(heap));
    let cd = fork(heap, c, d);
    let l = leaf(heap);
    let abl = fork(heap, ab, l);
    out.push(fork(heap, abl, cd));
    out
}

/// Summand `i` of a right-nested sum of `n` summands.
fn summand(shape: &Shape, i: usize, n: usize) -> &Shape {
    match shape {
        Shape::Sum(a, rest) if n > 1 => {
            if i == 0 {
                a
            } else {
                summand(rest, i - 1, n - 1)
            }
        }
        _ => shape,
    }
}

fn alloc(ev: &mut Evaluator<'_>, cell: Cell) -> Value {
    Value::Cell(ev.heap.alloc(cell))
}

/// `inr^i (inl v)` for `i < n - 1`, `inr^(n-1) v` for the last summand.
fn injections(ev: &mut Evaluator<'_>, i: usize, n: usize, v: Value) -> Value {
    let mut v = if i + 1 < n { alloc(ev, Cell::Inj(Side::First, v)) } else { v };
    for _ in 0..i {
        v = alloc(ev, Cell::Inj(Side::Second, v));
    }
    v
}

/// Rebuild `v : shape[X]` with `f` applied at the recursive positions,
/// reading pairs and injections straight off the heap.
fn map_shape(
    ev: &mut Evaluator<'_>,
    shape: &Shape,
    v: &Value,
    f: &mut dyn FnMut(&mut Evaluator<'_>, &Value) -> R<Value>,
) -> R<Value> {
    match shape {
        Shape::Unit | Shape::Const(_) => Ok(v.clone()),
        Shape::Rec => f(ev, v),
        Shape::Prod(a, b) => {
            let Cell::Pair(x, y) = ev.heap.get(v.cell().ok_or("fn")?).clone() else {
                return Err("expected a pair".into());
            };
            let x = map_shape(ev, a, &x, f)?;
            let y = map_shape(ev, b, &y, f)?;
            Ok(alloc(ev, Cell::Pair(x, y)))
        }
        Shape::Sum(a, b) => {
            let Cell::Inj(side, x) = ev.heap.get(v.cell().ok_or("fn")?).clone() else {
                return Err("expected an injection".into());
            };
            let x = map_shape(ev, if side == Side::First { a } else { b }, &x, f)?;
            Ok(alloc(ev, Cell::Inj(side, x)))
        }
    }
}

/// Structural recursion by direct walking of data cells.
fn fold_oracle(
    ev: &mut Evaluator<'_>,
    decls: &DeclEnv,
    g: &Value,
    v: &Value,
    memo: &mut HashMap<CellRef, Value>,
) -> R<Value> {
    let c = v.cell().ok_or("subject is a function")?;
    if let Some(r) = memo.get(&c) {
        return Ok(r.clone());
    }
    let Cell::Data { ty, ctor, payload } = ev.heap.get(c).clone() else {
        return Err("subject is not a data cell".into());
    };
    let d = decls.get(&ty).ok_or("unknown type")?;
    let n = d.ctors.len();
    let shape = summand(&d.functor, ctor, n).clone();
    let mapped = map_shape(ev, &shape, &payload, &mut |ev, x| fold_oracle(ev, decls, g, x, memo))?;
    let layer = injections(ev, ctor, n, mapped);
    let r = ev.apply(g, layer).map_err(err)?;
    memo.insert(c, r.clone());
    Ok(r)
}

/// Numeral folds again, as plain iteration of the step from its base case.
fn nat_iteration(ev: &mut Evaluator<'_>, g: &Value, k: u64) -> R<Value> {
    let unit = Value::Cell(ev.heap.unit());
    let inl = alloc(ev, Cell::Inj(Side::First, unit));
    let mut r = ev.apply(g, inl).map_err(err)?;
    for _ in 0..k {
        let inr = alloc(ev, Cell::Inj(Side::Second, r));
        r = ev.apply(g, inr).map_err(err)?;
    }
    Ok(r)
}

fn same(ev: &mut Evaluator<'_>, decls: &DeclEnv, cmp: Cmp, a: &Value, b: &Value) -> R<bool> {
    match cmp {
        Cmp::Ground => Ok(structurally_equal(ev.heap, a, ev.heap, b)),
        Cmp::NatFun => {
            let nat = decls.get("nat").ok_or("no nat")?;
            for k in 0..=6 {
                let arg = alloc_numeral(ev.heap, nat, k).map_err(err)?;
                let (x, y) = (ev.apply(a, arg.clone()).map_err(err)?, ev.apply(b, arg).map_err(err)?);
                if !structurally_equal(ev.heap, &x, ev.heap, &y) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Cmp::Codata(depth) => codata_equal(ev, decls, a, b, depth),
    }
}

/// Bisimilarity up to `depth` destructor layers.
fn codata_equal(ev: &mut Evaluator<'_>, decls: &DeclEnv, a: &Value, b: &Value, depth: u32) -> R<bool> {
    if depth == 0 {
        return Ok(true);
    }
    let (ca, cb) = (a.cell().ok_or("fn")?, b.cell().ok_or("fn")?);
    let Cell::Thunk { ty, .. } = ev.heap.get(ca).clone() else {
        return Err("expected codata".into());
    };
    let shape = decls.get(&ty).ok_or("unknown type")?.functor.clone();
    let (ha, hb) = (ev.force(ca).map_err(err)?, ev.force(cb).map_err(err)?);
    layers_equal(ev, &shape, &ha, &hb, &mut |ev, x, y| codata_equal(ev, decls, x, y, depth - 1))
}

type RecCheck<'c> = dyn FnMut(&mut Evaluator<'_>, &Value, &Value) -> R<bool> + 'c;

/// Compare two one-layer values of `shape`, structurally at constant
/// positions and with `rec` at recursive ones.
fn layers_equal(
    ev: &mut Evaluator<'_>,
    shape: &Shape,
    a: &Value,
    b: &Value,
    rec: &mut RecCheck<'_>,
) -> R<bool> {
    match shape {
        Shape::Unit | Shape::Const(_) => Ok(structurally_equal(ev.heap, a, ev.heap, b)),
        Shape::Rec => rec(ev, a, b),
        Shape::Prod(s, t) => {
            let (Cell::Pair(a1, a2), Cell::Pair(b1, b2)) =
                (ev.heap.get(a.cell().ok_or("fn")?).clone(), ev.heap.get(b.cell().ok_or("fn")?).clone())
            else {
                return Err("expected pairs".into());
            };
            Ok(layers_equal(ev, s, &a1, &b1, rec)? && layers_equal(ev, t, &a2, &b2, rec)?)
        }
        Shape::Sum(s, t) => {
            let (Cell::Inj(sa, x), Cell::Inj(sb, y)) =
                (ev.heap.get(a.cell().ok_or("fn")?).clone(), ev.heap.get(b.cell().ok_or("fn")?).clone())
            else {
                return Err("expected injections".into());
            };
            Ok(sa == sb && layers_equal(ev, if sa == Side::First { s } else { t }, &x, &y, rec)?)
        }
    }
}

/// Compare the codata value `v` against the direct iteration of `f` from
/// `seed`: each layer of `v` must equal `f seed` with its recursive slots
/// in turn matching iterations from the new seeds.
fn unfold_matches(ev: &mut Evaluator<'_>, decls: &DeclEnv, f: &Value, v: &Value, seed: &Value, depth: u32) -> R<bool> {
    if depth == 0 {
        return Ok(true);
    }
    let c = v.cell().ok_or("fn")?;
    let Cell::Thunk { ty, .. } = ev.heap.get(c).clone() else {
        return Err("expected codata".into());
    };
    let shape = decls.get(&ty).ok_or("unknown type")?.functor.clone();
    let head = ev.force(c).map_err(err)?;
    let layer = ev.apply(f, seed.clone()).map_err(err)?;
    layers_equal(ev, &shape, &head, &layer, &mut |ev, thunk, next_seed| {
        unfold_matches(ev, decls, f, thunk, next_seed, depth - 1)
    })
}

fn pair_parts(heap: &Heap, v: &Value) -> R<(Value, Value)> {
    match heap.get(v.cell().ok_or("fn")?) {
        Cell::Pair(a, b) => Ok((a.clone(), b.clone())),
        other => Err(format!("expected a pair, found {other:?}")),
    }
}

/// Heads 1..=depth of a stream-shaped `unfold g u`: the n-th head is
/// `fst (g (snd∘g)^(n-1) u)`.
fn iterated_heads(ev: &mut Evaluator<'_>, g: &Value, v: &Value, u: &Value, depth: u32) -> R<bool> {
    let mut cur = v.clone();
    let mut seed = u.clone();
    for _ in 0..depth {
        let head = ev.force(cur.cell().ok_or("fn")?).map_err(err)?;
        let (h, rest) = pair_parts(ev.heap, &head)?;
        let layer = ev.apply(g, seed).map_err(err)?;
        let (want, next) = pair_parts(ev.heap, &layer)?;
        if !structurally_equal(ev.heap, &h, ev.heap, &want) {
            return Ok(false);
        }
        cur = rest;
        seed = next;
    }
    Ok(true)
}

const PROBE_DEPTH: u32 = 16;

pub fn check() -> R<String> {
    let config = EvalConfig::default();
    let mut checks = 0usize;
    for case in fold_cases() {
        let mut heap = Heap::new();
        let (g, decls) = eval_in(case.decls, case.mode, &case.step, &mut heap)?;
        let subjects = if case.ty == "tree" { trees(&mut heap) } else { numerals(&mut heap, &decls, 8)? };
        let mut ev = Evaluator::new(&decls, &mut heap, config);
        let name: rs1::typesys::Name = case.ty.into();
        let functor = decls.get(&name).ok_or("unknown type")?.functor.clone();
        for (k, s) in subjects.iter().enumerate() {
            // fold g (c v) = g (F (fold g) v)
            let lhs = ev.fold(SiteId(u32::MAX), &name, &g, s).map_err(err)?;
            let layer = ev.destruct(s).map_err(err)?;
            let mapped = ev.fmap(&functor, &layer, &mut |ev, x| ev.fold(SiteId(u32::MAX), &name, &g, &x)).map_err(err)?;
            let rhs = ev.apply(&g, mapped).map_err(err)?;
            if !same(&mut ev, &decls, case.cmp, &lhs, &rhs)? {
                return Err(format!("fold law fails for {} on subject #{k}", case.name));
            }
            let oracle = fold_oracle(&mut ev, &decls, &g, s, &mut HashMap::new())?;
            if !same(&mut ev, &decls, case.cmp, &lhs, &oracle)? {
                return Err(format!("fold of {} on subject #{k} disagrees with the cell-walking oracle", case.name));
            }
            if case.ty == "nat" {
                let it = nat_iteration(&mut ev, &g, k as u64)?;
                if !same(&mut ev, &decls, case.cmp, &lhs, &it)? {
                    return Err(format!("fold of {} at {k} disagrees with direct iteration", case.name));
                }
            }
            checks += 1;
        }
    }
    let folds = checks;
    for case in unfold_cases() {
        let mut heap = Heap::new();
        let kw = if case.mode == Mode::S { "unfold" } else { "sunfold" };
        let (v, decls) =
            eval_in(case.decls, case.mode, &format!("{kw}[{}] ({}) ({})", case.ty, case.step, case.seed), &mut heap)?;
        let (f, _) = eval_in(case.decls, case.mode, &case.step, &mut heap)?;
        let (seed, _) = eval_in(case.decls, case.mode, &case.seed, &mut heap)?;
        let mut probe = heap.clone();
        let mut ev = Evaluator::new(&decls, &mut heap, config);
        if !unfold_matches(&mut ev, &decls, &f, &v, &seed, PROBE_DEPTH)? {
            return Err(format!("unfold law fails for {}", case.name));
        }
        // The iterated form, on a copy where nothing has been forced yet.
        let mut ev = Evaluator::new(&decls, &mut probe, config);
        if !iterated_heads(&mut ev, &f, &v, &seed, PROBE_DEPTH)? {
            return Err(format!("iterated-destructor law fails for {}", case.name));
        }
        checks += 2;
    }
    Ok(format!(
        "{folds} fold-law instances over {} steps, {} unfold-law and iterated-destructor checks to depth {PROBE_DEPTH}",
        fold_cases().len(),
        checks - folds
    ))
}
