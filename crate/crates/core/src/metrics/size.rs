use std::collections::{HashMap, HashSet};

use crate::eval::{Cell, CellRef, EvalConfig, EvalError, Evaluator, Heap, Value};
use crate::surface::DeclKind;
use crate::typesys::{DeclEnv, Ty};

/// Number of distinct data cells reachable from `roots`.
///
/// Pair and injection cells are traversed but not counted; unforced and
/// forced thunks are never entered. A codata value given directly as a root
/// counts as one cell.
pub fn apparent_size(roots: &[Value], heap: &Heap) -> u64 {
    let mut seen: HashSet<CellRef> = HashSet::new();
    let mut count = 0;
    let mut stack: Vec<CellRef> = Vec::new();
    for r in roots.iter().filter_map(Value::cell) {
        if matches!(heap.get(r), Cell::Thunk { .. }) {
            if seen.insert(r) {
                count += 1;
            }
        } else {
            stack.push(r);
        }
    }
    while let Some(c) = stack.pop() {
        if !seen.insert(c) {
            continue;
        }
        match heap.get(c) {
            Cell::Thunk { .. } => continue,
            Cell::Data { .. } => count += 1,
            _ => {}
        }
        stack.extend(heap.children(c).into_iter().filter(|k| !seen.contains(k)));
    }
    count
}

/// Is `ty` a declared codata type of rank 0 (safe twins included)?
pub fn is_rank0_codata(ty: &Ty, decls: &DeclEnv) -> bool {
    match ty {
        Ty::Base { name, .. } => decls.get(name).is_some_and(|d| d.kind == DeclKind::Codata && d.rank == 0),
        _ => false,
    }
}

/// Largest apparent size reachable from `v` by destructor sequences that use
/// at most `depth` codata destructors.
///
/// The search follows the value's shape: at a codata cell it measures the
/// cell itself (one) and, if a token is left, spends it to force the head;
/// at a pair it measures the pair and explores both components; at an
/// injection it explores the payload; at a data cell it measures and stops,
/// since data destructors only reach sub-graphs. Thunks are forced in place
/// unless `pristine` is set, in which case a copy of the heap is probed.
pub fn observed_size(
    decls: &DeclEnv,
    heap: &mut Heap,
    v: &Value,
    depth: u64,
    config: EvalConfig,
    pristine: bool,
) -> Result<u64, EvalError> {
    if pristine {
        let mut copy = heap.clone();
        let mut ev = Evaluator::new(decls, &mut copy, config);
        return Prober::default().probe(&mut ev, v, depth);
    }
    let mut ev = Evaluator::new(decls, heap, config);
    Prober::default().probe(&mut ev, v, depth)
}

/// As [`observed_size`], on an existing evaluator (its cost is charged).
pub fn observed_size_with(ev: &mut Evaluator<'_>, v: &Value, depth: u64) -> Result<u64, EvalError> {
    Prober::default().probe(ev, v, depth)
}

#[derive(Default)]
struct Prober {
    memo: HashMap<(CellRef, u64), u64>,
}

impl Prober {
    fn probe(&mut self, ev: &mut Evaluator<'_>, v: &Value, tokens: u64) -> Result<u64, EvalError> {
        let Some(c) = v.cell() else {
            return Ok(0);
        };
        if let Some(&m) = self.memo.get(&(c, tokens)) {
            return Ok(m);
        }
        let here = apparent_size(std::slice::from_ref(v), ev.heap);
        let best = match ev.heap.get(c) {
            Cell::Thunk { .. } if tokens > 0 => {
                let head = ev.force(c)?;
                here.max(self.probe(ev, &head, tokens - 1)?)
            }
            Cell::Pair(a, b) => {
                let (a, b) = (a.clone(), b.clone());
                here.max(self.probe(ev, &a, tokens)?).max(self.probe(ev, &b, tokens)?)
            }
            Cell::Inj(_, x) => {
                let x = x.clone();
                here.max(self.probe(ev, &x, tokens)?)
            }
            _ => here,
        };
        self.memo.insert((c, tokens), best);
        Ok(best)
    }
}
