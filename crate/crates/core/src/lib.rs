//! A toolchain for safe/normal ramified recursion over data and codata:
//! parser, four-mode type checker, sharing evaluator with memoized folds and
//! lazy unfolds, and size metrics.

pub mod corpus;
pub mod eval;
pub mod metrics;
pub mod surface;
pub mod typesys;

use serde::Serialize;

use eval::{Cost, EvalConfig, EvalError, Evaluator, Heap, Value};
use surface::{ParseError, Program};
use typesys::{DeclEnv, ElabError, Mode, Ty, TypeError};

/// Any failure on the way from source text to a value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "stage", rename_all = "kebab-case")]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(ParseError),
    #[error("declaration error: {0}")]
    Elab(ElabError),
    #[error("type error: {0}")]
    Type(TypeError),
    #[error("evaluation error: {0}")]
    Eval(EvalError),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(e) => e.kind.code(),
            Error::Elab(e) => e.kind.code(),
            Error::Type(e) => e.code(),
            Error::Eval(e) => e.code(),
        }
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}
impl From<ElabError> for Error {
    fn from(e: ElabError) -> Self {
        Error::Elab(e)
    }
}
impl From<TypeError> for Error {
    fn from(e: TypeError) -> Self {
        Error::Type(e)
    }
}
impl From<EvalError> for Error {
    fn from(e: EvalError) -> Self {
        Error::Eval(e)
    }
}

/// A parsed, elaborated and type-checked program.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub program: Program,
    pub decls: DeclEnv,
    pub mode: Mode,
    pub ty: Ty,
}

pub fn compile(src: &str, mode: Mode) -> Result<Compiled, Error> {
    let program = surface::parse_program(src)?;
    let decls = typesys::elaborate_declarations(&program.decls)?;
    typesys::check_declarations(&decls, mode)?;
    let ty = typesys::Checker::new(&decls, mode).with_spans(&program.spans).infer(&program.body)?;
    Ok(Compiled { program, decls, mode, ty })
}

impl Compiled {
    /// Evaluate the body in `heap`.
    pub fn run(&self, heap: &mut Heap, config: EvalConfig) -> Result<(Value, Cost), EvalError> {
        let mut ev = Evaluator::new(&self.decls, heap, config);
        let v = ev.eval(&self.program.body, &eval::Env::new())?;
        Ok((v, ev.take_cost()))
    }
}
