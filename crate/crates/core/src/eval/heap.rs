use std::fmt;
use std::rc::Rc;

use crate::surface::{Side, Term};
use crate::typesys::Name;

/// Index of a cell in a [`Heap`]. Sharing is identity of `CellRef`s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellRef(pub u32);

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub enum Value {
    Cell(CellRef),
    Closure(Rc<Closure>),
}

impl Value {
    pub fn cell(&self) -> Option<CellRef> {
        match self {
            Value::Cell(c) => Some(*c),
            Value::Closure(_) => None,
        }
    }
}

/// Function values.
#[derive(Debug)]
pub enum Closure {
    Lam { param: Name, body: Rc<Term>, env: Env },
    /// A sugared constructor used as a function.
    Ctor { ty: Name, index: usize },
    /// `c[tau]` used as a function.
    Con { ty: Name },
    /// `d[tau]` used as a function.
    Des { ty: Name },
}

/// Persistent environment: a shared linked list, innermost binding first.
#[derive(Clone, Debug, Default)]
pub struct Env(Option<Rc<EnvNode>>);

#[derive(Debug)]
struct EnvNode {
    name: Name,
    value: Value,
    next: Env,
}

impl Env {
    pub fn new() -> Env {
        Env(None)
    }

    pub fn extend(&self, name: Name, value: Value) -> Env {
        Env(Some(Rc::new(EnvNode { name, value, next: self.clone() })))
    }

    pub fn lookup(&self, x: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if &*node.name == x {
                return Some(&node.value);
            }
            cur = &node.next.0;
        }
        None
    }

    /// Bindings, innermost first (shadowed bindings included).
    pub fn bindings(&self) -> Vec<(Name, Value)> {
        let mut out = Vec::new();
        let mut cur = &self.0;
        while let Some(node) = cur {
            out.push((node.name.clone(), node.value.clone()));
            cur = &node.next.0;
        }
        out
    }
}

/// Work suspended in an unforced codata cell.
#[derive(Clone, Debug)]
pub enum Suspended {
    /// Constructor payload still to be evaluated; `inj` is `(index, arity)`
    /// for a sugared constructor, `None` for `c[tau] e`.
    Payload { term: Rc<Term>, env: Env, inj: Option<(usize, usize)> },
    /// Head already known (a constructor applied as a function).
    Head(Value),
    /// `unfold f e` with neither `f` nor `e` evaluated yet.
    Unfold { step: Rc<Term>, seed: Rc<Term>, env: Env },
    /// A recursive slot of an unfold: `unfold f v` with both evaluated.
    Unfolding { step: Value, seed: Value },
}

#[derive(Clone, Debug)]
pub enum ThunkState {
    Unforced(Suspended),
    Forcing,
    /// The head, a value of type `F tau`.
    Forced(Value),
}

#[derive(Clone, Debug)]
pub enum Cell {
    Unit,
    /// A data cons-cell: summand `ctor` of type `ty` holding the summand payload.
    Data { ty: Name, ctor: usize, payload: Value },
    Pair(Value, Value),
    Inj(Side, Value),
    Thunk { ty: Name, state: ThunkState },
}

/// Arena of cells. Cells are never freed individually.
#[derive(Clone, Debug)]
pub struct Heap {
    cells: Vec<Cell>,
}

impl Default for Heap {
    fn default() -> Self {
        Heap::new()
    }
}

impl Heap {
    pub fn new() -> Heap {
        Heap { cells: vec![Cell::Unit] }
    }

    /// The shared unit cell.
    pub fn unit(&self) -> CellRef {
        CellRef(0)
    }

    pub fn alloc(&mut self, cell: Cell) -> CellRef {
        let r = CellRef(u32::try_from(self.cells.len()).expect("heap exhausted"));
        self.cells.push(cell);
        r
    }

    pub fn get(&self, r: CellRef) -> &Cell {
        &self.cells[r.0 as usize]
    }

    pub(crate) fn set_thunk_state(&mut self, r: CellRef, new: ThunkState) -> ThunkState {
        match &mut self.cells[r.0 as usize] {
            Cell::Thunk { state, .. } => std::mem::replace(state, new),
            other => panic!("not a thunk: {other:?}"),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cell references stored directly in `c`.
    pub fn children(&self, r: CellRef) -> Vec<CellRef> {
        let of = |v: &Value| v.cell();
        match self.get(r) {
            Cell::Unit => vec![],
            Cell::Data { payload, .. } => of(payload).into_iter().collect(),
            Cell::Pair(a, b) => of(a).into_iter().chain(of(b)).collect(),
            Cell::Inj(_, v) => of(v).into_iter().collect(),
            Cell::Thunk { state: ThunkState::Forced(h), .. } => of(h).into_iter().collect(),
            Cell::Thunk { .. } => vec![],
        }
    }
}
