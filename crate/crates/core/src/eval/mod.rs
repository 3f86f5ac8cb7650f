//! Call-by-value evaluation over a shared cons-cell heap.
//!
//! Data constructors allocate one cell each and sharing is cell identity.
//! Folds over branching types keep a per-invocation memo table keyed by
//! subject cell. Codata constructors and unfolds allocate thunks that are
//! forced in place, once, by a destructor.

mod graph;
mod heap;
mod machine;

pub use graph::{isomorphic, render_value, serialize_graph, structurally_equal};
pub use heap::{Cell, CellRef, Closure, Env, Heap, Suspended, ThunkState, Value};
pub use machine::{alloc_numeral, Cost, EvalConfig, EvalError, Evaluator, MemoPolicy, SiteStats, DEFAULT_FUEL};
