//! Types, declaration elaboration and the ramified type checker.

mod check;
mod decl;
mod ty;

pub use check::{
    check_declarations, check_fragment, classify_type, erase, is_safe_var_type, safe_of, sfv, typecheck, Checker,
    FragmentReport, Judgment, Mode, TyCtx, TypeClass, TypeError, TypeErrorKind,
};
pub use decl::{elaborate_declarations, functor_map_term, CtorInfo, DeclEnv, DeclInfo, ElabError, ElabErrorKind, Shape};
pub use ty::{Name, Polarity, Sort, Ty};
