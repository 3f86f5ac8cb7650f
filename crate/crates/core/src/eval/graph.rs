//! Deterministic textual forms of value graphs, and graph comparisons.

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use super::heap::*;
use crate::surface::Side;
use crate::typesys::{DeclEnv, Sort, Ty};

/// Serialize the graph reachable from `root`, one cell per line in
/// topological order (children first), with shared cells named once:
///
/// ```text
/// #0 = Zero
/// #1 = Succ #0
/// root #1
/// ```
pub fn serialize_graph(heap: &Heap, decls: &DeclEnv, root: &Value) -> String {
    let Value::Cell(r) = root else {
        return "root <fn>\n".to_string();
    };
    let mut ids: HashMap<CellRef, usize> = HashMap::new();
    let mut out = String::new();
    let name = |v: &Value, ids: &HashMap<CellRef, usize>| match v {
        Value::Cell(c) => format!("#{}", ids[c]),
        Value::Closure(_) => "<fn>".to_string(),
    };
    // Iterative post-order so deep numerals do not exhaust the stack.
    let mut stack = vec![(*r, false)];
    while let Some((c, expanded)) = stack.pop() {
        if ids.contains_key(&c) {
            continue;
        }
        if !expanded {
            stack.push((c, true));
            // Nullary constructors print without their unit payload.
            let nullary = matches!(heap.get(c), Cell::Data { payload, .. } if payload.cell() == Some(heap.unit()));
            for k in heap.children(c).into_iter().rev().filter(|_| !nullary) {
                if !ids.contains_key(&k) {
                    stack.push((k, false));
                }
            }
            continue;
        }
        let id = ids.len();
        ids.insert(c, id);
        let line = match heap.get(c) {
            Cell::Unit => "()".to_string(),
            Cell::Data { ty, ctor, payload } => {
                let ctor_name = decls.get(ty).map(|d| d.ctors[*ctor].name.to_string()).unwrap_or_default();
                let unit_payload = payload.cell() == Some(heap.unit());
                if unit_payload {
                    ctor_name
                } else {
                    format!("{ctor_name} {}", name(payload, &ids))
                }
            }
            Cell::Pair(a, b) => format!("({}, {})", name(a, &ids), name(b, &ids)),
            Cell::Inj(Side::First, v) => format!("inl {}", name(v, &ids)),
            Cell::Inj(Side::Second, v) => format!("inr {}", name(v, &ids)),
            Cell::Thunk { ty, state: ThunkState::Forced(h) } => format!("<{ty}> {}", name(h, &ids)),
            Cell::Thunk { ty, .. } => format!("<{ty}> unforced"),
        };
        writeln!(out, "#{id} = {line}").unwrap();
    }
    writeln!(out, "root #{}", ids[r]).unwrap();
    out
}

/// Render a value as a term of type `ty`, giving up after `limit` characters.
pub fn render_value(heap: &Heap, decls: &DeclEnv, v: &Value, ty: &Ty, limit: usize) -> String {
    let mut out = String::new();
    render(heap, decls, v, Some(ty), false, limit, &mut out);
    if out.len() > limit {
        out.truncate(limit);
        out.push_str(" ...");
    }
    out
}

fn render(heap: &Heap, decls: &DeclEnv, v: &Value, ty: Option<&Ty>, atomic: bool, limit: usize, out: &mut String) {
    if out.len() > limit {
        return;
    }
    let c = match v {
        Value::Closure(_) => return out.push_str("<fn>"),
        Value::Cell(c) => *c,
    };
    fn parts(t: Option<&Ty>) -> (Option<&Ty>, Option<&Ty>) {
        match t {
            Some(Ty::Prod(a, b)) | Some(Ty::Sum(a, b)) => (Some(&**a), Some(&**b)),
            _ => (None, None),
        }
    }
    match heap.get(c) {
        Cell::Unit => out.push_str("()"),
        Cell::Pair(a, b) => {
            let (ta, tb) = parts(ty);
            out.push('(');
            render(heap, decls, a, ta, false, limit, out);
            out.push_str(", ");
            render(heap, decls, b, tb, false, limit, out);
            out.push(')');
        }
        Cell::Inj(side, x) => {
            let (ta, tb) = parts(ty);
            if atomic {
                out.push('(');
            }
            out.push_str(if *side == Side::First { "inl " } else { "inr " });
            render(heap, decls, x, if *side == Side::First { ta } else { tb }, true, limit, out);
            if atomic {
                out.push(')');
            }
        }
        Cell::Data { ty: name, ctor, payload } => {
            let Some(d) = decls.get(name) else {
                return out.push_str("<?>");
            };
            let tick = match ty {
                Some(Ty::Base { sort: Sort::Safe, .. }) => "'",
                _ => "",
            };
            let info = &d.ctors[*ctor];
            if info.payload == Ty::Unit {
                write!(out, "{tick}{}", info.name).unwrap();
                return;
            }
            let payload_ty = if tick.is_empty() { info.payload.clone() } else { info.payload.to_safe() };
            if atomic {
                out.push('(');
            }
            write!(out, "{tick}{} ", info.name).unwrap();
            render(heap, decls, payload, Some(&payload_ty), true, limit, out);
            if atomic {
                out.push(')');
            }
        }
        Cell::Thunk { ty: name, .. } => {
            let tick = match ty {
                Some(Ty::Base { sort: Sort::Safe, .. }) => "'",
                _ => "",
            };
            write!(out, "<codata {tick}{name}>").unwrap();
        }
    }
}

/// Equality of the values as trees (sharing ignored). Thunks compare equal
/// only when both are forced to equal heads or are the same cell.
pub fn structurally_equal(ha: &Heap, a: &Value, hb: &Heap, b: &Value) -> bool {
    let mut seen = HashSet::new();
    let mut work = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = work.pop() {
        let (Value::Cell(cx), Value::Cell(cy)) = (&x, &y) else {
            return false;
        };
        if !seen.insert((*cx, *cy)) {
            continue;
        }
        match (ha.get(*cx), hb.get(*cy)) {
            (Cell::Unit, Cell::Unit) => {}
            (Cell::Data { ty: t1, ctor: c1, payload: p1 }, Cell::Data { ty: t2, ctor: c2, payload: p2 }) => {
                if t1 != t2 || c1 != c2 {
                    return false;
                }
                work.push((p1.clone(), p2.clone()));
            }
            (Cell::Pair(a1, b1), Cell::Pair(a2, b2)) => {
                work.push((a1.clone(), a2.clone()));
                work.push((b1.clone(), b2.clone()));
            }
            (Cell::Inj(s1, v1), Cell::Inj(s2, v2)) => {
                if s1 != s2 {
                    return false;
                }
                work.push((v1.clone(), v2.clone()));
            }
            (Cell::Thunk { ty: t1, state: ThunkState::Forced(h1) }, Cell::Thunk { ty: t2, state: ThunkState::Forced(h2) }) => {
                if t1 != t2 {
                    return false;
                }
                work.push((h1.clone(), h2.clone()));
            }
            (Cell::Thunk { .. }, Cell::Thunk { .. }) if std::ptr::eq(ha, hb) && cx == cy => {}
            _ => return false,
        }
    }
    true
}

/// Are the graphs reachable from `a` and `b` the same up to renaming of
/// cells? Unlike [`structurally_equal`], this also compares sharing.
pub fn isomorphic(ha: &Heap, a: &Value, hb: &Heap, b: &Value) -> bool {
    let mut fwd: HashMap<CellRef, CellRef> = HashMap::new();
    let mut back: HashMap<CellRef, CellRef> = HashMap::new();
    let mut work = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = work.pop() {
        let (cx, cy) = match (&x, &y) {
            (Value::Cell(cx), Value::Cell(cy)) => (*cx, *cy),
            (Value::Closure(_), Value::Closure(_)) => continue,
            _ => return false,
        };
        match (fwd.get(&cx), back.get(&cy)) {
            (Some(m), Some(n)) if *m == cy && *n == cx => continue,
            (None, None) => {
                fwd.insert(cx, cy);
                back.insert(cy, cx);
            }
            _ => return false,
        }
        match (ha.get(cx), hb.get(cy)) {
            (Cell::Unit, Cell::Unit) => {}
            (Cell::Data { ty: t1, ctor: c1, payload: p1 }, Cell::Data { ty: t2, ctor: c2, payload: p2 }) => {
                if t1 != t2 || c1 != c2 {
                    return false;
                }
                work.push((p1.clone(), p2.clone()));
            }
            (Cell::Pair(a1, b1), Cell::Pair(a2, b2)) => {
                work.push((a1.clone(), a2.clone()));
                work.push((b1.clone(), b2.clone()));
            }
            (Cell::Inj(s1, v1), Cell::Inj(s2, v2)) => {
                if s1 != s2 {
                    return false;
                }
                work.push((v1.clone(), v2.clone()));
            }
            (Cell::Thunk { ty: t1, state: s1 }, Cell::Thunk { ty: t2, state: s2 }) => {
                if t1 != t2 {
                    return false;
                }
                match (s1, s2) {
                    (ThunkState::Forced(h1), ThunkState::Forced(h2)) => work.push((h1.clone(), h2.clone())),
                    (ThunkState::Unforced(_), ThunkState::Unforced(_)) => {}
                    _ => return false,
                }
            }
            _ => return false,
        }
    }
    true
}
