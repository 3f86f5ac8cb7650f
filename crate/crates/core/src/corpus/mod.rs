//! Embedded example programs with their expected results.
//!
//! Every entry is re-checked by the test suite: it must type-check in its
//! mode with the expected type (or fail with the expected error code), and
//! its value rendering and apparent size, where given, must match.

use crate::typesys::Mode;

/// Whether an entry transcribes a program from the literature or was
/// constructed for this corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Classic,
    Constructed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    /// The body's type, as printed.
    Type(&'static str),
    /// The error code the program must be rejected with.
    Error(&'static str),
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    /// File name under `examples/` (or `families/`).
    pub file: &'static str,
    pub source: &'static str,
    pub mode: Mode,
    pub expect: Expect,
    /// Rendering of the body's value, for ground results.
    pub value: Option<&'static str>,
    /// Apparent size of the body's value.
    pub size: Option<u64>,
    pub origin: Origin,
}

macro_rules! example {
    ($file:literal) => {
        ($file, include_str!(concat!("../../examples/", $file)))
    };
}

macro_rules! family {
    ($file:literal) => {
        ($file, include_str!(concat!("../../families/", $file)))
    };
}

fn entry(
    name: &'static str,
    (file, source): (&'static str, &'static str),
    mode: Mode,
    expect: Expect,
    origin: Origin,
) -> CorpusEntry {
    CorpusEntry { name, file, source, mode, expect, value: None, size: None, origin }
}

impl CorpusEntry {
    fn value(mut self, v: &'static str) -> Self {
        self.value = Some(v);
        self
    }

    fn size(mut self, s: u64) -> Self {
        self.size = Some(s);
        self
    }
}

/// All corpus entries, in a fixed order.
pub fn load_corpus() -> Vec<CorpusEntry> {
    use Expect::{Error, Type};
    use Mode::*;
    use Origin::*;
    vec![
        entry("nat", example!("nat.rs1"), RSMinus, Type("unit"), Classic).value("()").size(0),
        entry("tree", example!("tree.rs1"), RSMinus, Type("unit"), Classic).value("()"),
        entry("nats", example!("nats.rs1"), RS, Type("unit"), Classic).value("()"),
        entry("bit", example!("bit.rs1"), RSMinus, Type("unit"), Classic).value("()"),
        entry("stream", example!("stream.rs1"), RS, Type("unit"), Classic).value("()"),
        entry("plus", example!("plus.rs1"), RSMinus, Type("nat -> 'nat -> 'nat"), Classic),
        entry("times", example!("times.rs1"), RSMinus, Type("nat -> nat -> 'nat"), Classic),
        entry("cube", example!("cube.rs1"), RSMinus, Type("nat -> nat"), Classic),
        entry("cube_one_lower", example!("cube_one_lower.rs1"), RSMinus, Type("nat -> 'nat"), Classic),
        entry("cube_no_lower", example!("cube_no_lower.rs1"), RSMinus, Error("mismatch"), Classic),
        entry("lower_safe_var", example!("lower_safe_var.rs1"), RSMinus, Error("lower-with-safe-free-variable"), Classic),
        entry("up_nat", example!("up_nat.rs1"), RSMinus, Type("nat -> 'nat"), Classic),
        entry("up_tree", example!("up_tree.rs1"), RSMinus, Type("tree -> 'tree"), Classic),
        entry("t_n(3)", example!("t3.rs1"), RSMinus, Type("tree"), Classic)
            .value("Fork (Fork (Fork (Leaf, Leaf), Fork (Leaf, Leaf)), Fork (Fork (Leaf, Leaf), Fork (Leaf, Leaf)))")
            .size(4),
        entry("height", example!("height.rs1"), SMinus, Type("tree -> nat"), Classic),
        entry("height_t5", example!("height_t5.rs1"), SMinus, Type("nat"), Classic)
            .value("Succ (Succ (Succ (Succ (Succ Zero))))")
            .size(6),
        entry("ms", example!("ms_id.rs1"), S, Type("nats"), Classic).size(1),
        entry("ms_ramified", example!("ms_ramified.rs1"), RS, Type("'nats"), Classic),
        entry("ms_unramifiable", example!("ms_unramifiable.rs1"), RS, Error("lower-with-safe-free-variable"), Constructed),
        entry("ms_in_data_mode", example!("ms_id.rs1"), RSMinus, Error("codata-in-data-mode"), Constructed),
        entry("nth", example!("nth.rs1"), S, Type("nat -> nat"), Classic),
        entry("nth_ramified", example!("nth_ramified.rs1"), RS, Type("nat -> 'nat"), Classic),
        entry("stream_id", example!("stream_id.rs1"), RS, Type("'stream -> 'stream"), Constructed),
        entry("zeros", example!("zeros.rs1"), RS, Type("'nats"), Constructed),
        entry("xor_scan", example!("xor_scan.rs1"), RS, Type("'stream -> 'stream"), Constructed),
        entry("alternating", example!("alternating.rs1"), RS, Type("unit -> 'stream"), Constructed),
        entry("counter_producer", example!("counter_producer.rs1"), RS, Type("unit -> 'stream"), Constructed),
        entry("family_times_sq", family!("times_sq.rs1"), RSMinus, Type("nat -> 'nat"), Classic),
        entry("family_cube", family!("cube.rs1"), RSMinus, Type("nat -> nat"), Classic),
        entry("family_tn", family!("tn.rs1"), RSMinus, Type("nat -> 'tree"), Classic),
        entry("family_height_tn", family!("height_tn.rs1"), SMinus, Type("nat -> nat"), Classic),
        entry("family_exp_control", family!("exp_control.rs1"), SMinus, Type("nat -> nat"), Constructed),
        entry("family_ms_prefix", family!("ms_prefix.rs1"), RS, Type("nat -> 'nats"), Classic),
    ]
}

/// Look up an entry by name.
pub fn corpus_entry(name: &str) -> Option<CorpusEntry> {
    load_corpus().into_iter().find(|e| e.name == name)
}
