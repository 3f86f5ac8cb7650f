use rs1::eval::{alloc_numeral, Cell, EvalConfig, Evaluator, Heap, Value};
use rs1::typesys::{DeclEnv, Mode};
use rs1::{compile, Compiled};

pub fn compiled(src: &str, mode: Mode) -> Result<Compiled, String> {
    compile(src, mode).map_err(|e| format!("{e}\n{src}"))
}

/// Evaluate the body of `c` and apply it to the given numerals in turn.
pub fn apply_numerals(c: &Compiled, heap: &mut Heap, args: &[u64], config: EvalConfig) -> Result<Value, String> {
    let (mut v, _) = c.run(heap, config).map_err(|e| e.to_string())?;
    let nat = c.decls.get("nat").ok_or("no `nat` declared")?;
    for &a in args {
        let arg = alloc_numeral(heap, nat, a).map_err(|e| e.to_string())?;
        v = Evaluator::new(&c.decls, heap, config).apply(&v, arg).map_err(|e| e.to_string())?;
    }
    Ok(v)
}

/// Read a `Zero`/`Succ` numeral by walking its cells.
pub fn read_numeral(heap: &Heap, decls: &DeclEnv, v: &Value) -> Option<u64> {
    let mut n = 0;
    let mut cur = v.cell()?;
    loop {
        let Cell::Data { ty, ctor, payload } = heap.get(cur) else {
            return None;
        };
        match &*decls.get(ty)?.ctors[*ctor].name {
            "Zero" => return Some(n),
            "Succ" => {
                n += 1;
                cur = payload.cell()?;
            }
            _ => return None,
        }
    }
}
