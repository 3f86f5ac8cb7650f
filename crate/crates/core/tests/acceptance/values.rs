//! Random ground values built directly on a heap, with optional sharing
//! between the two halves of a pair.

use std::collections::HashSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use rs1::eval::{Cell, CellRef, Heap, Value};
use rs1::surface::Side;

pub struct ValueGen<'r> {
    pub rng: &'r mut StdRng,
    pub heap: Heap,
}

impl<'r> ValueGen<'r> {
    pub fn new(rng: &'r mut StdRng) -> Self {
        ValueGen { rng, heap: Heap::new() }
    }

    fn data(&mut self, ty: &str, ctor: usize, payload: Value) -> Value {
        Value::Cell(self.heap.alloc(Cell::Data { ty: ty.into(), ctor, payload }))
    }

    fn unit(&self) -> Value {
        Value::Cell(self.heap.unit())
    }

    /// A numeral, a tree (with internal sharing when `pool` is non-empty), or
    /// a pair/injection of those. Subterms are drawn from `pool` with
    /// probability `share`.
    pub fn value(&mut self, depth: u32, pool: &[Value], share: f64) -> Value {
        if !pool.is_empty() && self.rng.gen_bool(share) {
            return pool.choose(self.rng).unwrap().clone();
        }
        match self.rng.gen_range(0..4) {
            0 => {
                let mut v = self.data("nat", 0, self.unit());
                for _ in 0..self.rng.gen_range(0..6) {
                    v = self.data("nat", 1, v);
                }
                v
            }
            1 if depth > 0 => {
                let a = self.value(depth - 1, pool, share);
                let b = self.value(depth - 1, pool, share);
                Value::Cell(self.heap.alloc(Cell::Pair(a, b)))
            }
            2 if depth > 0 => {
                let side = if self.rng.gen_bool(0.5) { Side::First } else { Side::Second };
                let a = self.value(depth - 1, pool, share);
                Value::Cell(self.heap.alloc(Cell::Inj(side, a)))
            }
            _ => self.tree(depth + 1),
        }
    }

    fn tree(&mut self, depth: u32) -> Value {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return self.data("tree", 0, self.unit());
        }
        let l = self.tree(depth - 1);
        let r = if self.rng.gen_bool(0.3) { l.clone() } else { self.tree(depth - 1) };
        let p = Value::Cell(self.heap.alloc(Cell::Pair(l, r)));
        self.data("tree", 1, p)
    }
}

/// Every data cell reachable from `v`, by a plain recursive walk.
pub fn data_cells(heap: &Heap, v: &Value) -> HashSet<CellRef> {
    fn walk(heap: &Heap, c: CellRef, seen: &mut HashSet<CellRef>, out: &mut HashSet<CellRef>) {
        if !seen.insert(c) {
            return;
        }
        let next = match heap.get(c) {
            Cell::Data { payload, .. } => {
                out.insert(c);
                vec![payload.clone()]
            }
            Cell::Pair(a, b) => vec![a.clone(), b.clone()],
            Cell::Inj(_, a) => vec![a.clone()],
            _ => vec![],
        };
        for n in next.iter().filter_map(Value::cell) {
            walk(heap, n, seen, out);
        }
    }
    let mut seen = HashSet::new();
    let mut out = HashSet::new();
    if let Some(c) = v.cell() {
        walk(heap, c, &mut seen, &mut out);
    }
    out
}
