//! Refinement logic: sorts, predicates, refinement types, environments,
//! alias expansion and well-formedness.

pub mod alias;
pub mod env;
pub mod eval;
pub mod pred;
pub mod rtype;
pub mod sort;
pub mod wf;

use std::collections::HashMap;

pub use alias::{AliasError, AliasTable, TypeAlias};
pub use env::{env_to_antecedent, Binder, BinderKind, Env};
pub use pred::{BinOp, Pred};
pub use rtype::{fresh_name, BaseType, RType, Refinement};
pub use sort::Sort;
pub use wf::{well_formed, Signatures, SortCtx, WfError};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot substitute `{term}` ({found}) for `{var}` ({expected})")]
pub struct SortMismatch {
    pub var: String,
    pub term: String,
    pub expected: String,
    pub found: String,
}

/// Sort-checked substitution of `term` for `var` in `p`.
pub fn substitute(p: &Pred, var: &str, term: &Pred, ctx: &SortCtx<'_>) -> Result<Pred, SortMismatch> {
    if let Some(expected) = ctx.var_sort(var) {
        let found = ctx.infer(term).map_err(|_| SortMismatch {
            var: var.to_string(),
            term: term.to_string(),
            expected: expected.to_string(),
            found: "ill-sorted".to_string(),
        })?;
        if !found.compatible(expected) {
            return Err(SortMismatch {
                var: var.to_string(),
                term: term.to_string(),
                expected: expected.to_string(),
                found: found.to_string(),
            });
        }
    }
    let mut map = HashMap::new();
    map.insert(var.to_string(), term.clone());
    Ok(p.subst(&map))
}
