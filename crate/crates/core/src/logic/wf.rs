use std::collections::HashMap;

use thiserror::Error;

use super::env::Env;
use super::pred::{BinOp, Pred};
use super::rtype::RType;
use super::sort::Sort;
use crate::diagnostic::{Code, Diagnostic};

/// Sorts of logic-level functions other than the built-in `len` measure.
pub trait Signatures {
    fn signature(&self, name: &str) -> Option<(Vec<Sort>, Sort)>;
}

pub struct NoFunctions;

impl Signatures for NoFunctions {
    fn signature(&self, _: &str) -> Option<(Vec<Sort>, Sort)> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WfError {
    #[error("unbound variable `{0}` in refinement")]
    Unbound(String),
    #[error("ill-sorted term `{term}`: expected {expected}, found {found}")]
    IllSorted {
        term: String,
        expected: String,
        found: String,
    },
    #[error("`mod` divisor must be a nonzero integer literal in `{0}`")]
    NonLiteralMod(String),
    #[error("unknown logic function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` expects {expected} argument(s), given {given}")]
    Arity {
        name: String,
        expected: usize,
        given: usize,
    },
    #[error("type `{0}` contains an unresolved alias or wildcard")]
    Unresolved(String),
}

/// Variable sorts in scope plus function signatures.
pub struct SortCtx<'a> {
    vars: HashMap<String, Sort>,
    fns: &'a dyn Signatures,
}

impl<'a> SortCtx<'a> {
    pub fn new(fns: &'a dyn Signatures) -> Self {
        SortCtx {
            vars: HashMap::new(),
            fns,
        }
    }

    pub fn from_env(env: &Env, fns: &'a dyn Signatures) -> Self {
        let mut ctx = SortCtx::new(fns);
        for b in env.binders() {
            ctx.vars.insert(b.name.clone(), b.sort.clone());
        }
        ctx
    }

    pub fn with_var(mut self, name: &str, sort: Sort) -> Self {
        self.vars.insert(name.to_string(), sort);
        self
    }

    pub fn insert(&mut self, name: &str, sort: Sort) {
        self.vars.insert(name.to_string(), sort);
    }

    pub fn var_sort(&self, name: &str) -> Option<&Sort> {
        self.vars.get(name)
    }

    pub fn fn_signature(&self, name: &str) -> Option<(Vec<Sort>, Sort)> {
        self.fns.signature(name)
    }

    pub fn check(&self, p: &Pred, expected: &Sort) -> Result<Sort, WfError> {
        let found = self.infer(p)?;
        if found.compatible(expected) {
            Ok(found.join(expected))
        } else {
            Err(ill(p, expected, &found))
        }
    }

    pub fn infer(&self, p: &Pred) -> Result<Sort, WfError> {
        match p {
            Pred::Int(_) => Ok(Sort::Int),
            Pred::Bool(_) => Ok(Sort::Bool),
            Pred::Unit => Ok(Sort::Unit),
            Pred::Var(x) => self.vars.get(x).cloned().ok_or_else(|| WfError::Unbound(x.clone())),
            Pred::Nil => Ok(Sort::list(Sort::Any)),
            Pred::Cons(h, t) => {
                let sh = self.infer(h)?;
                self.check(t, &Sort::list(sh))
            }
            Pred::Bin(op, a, b) => self.infer_bin(p, *op, a, b),
            Pred::Not(a) => {
                self.check(a, &Sort::Bool)?;
                Ok(Sort::Bool)
            }
            Pred::Ite(c, a, b) => {
                self.check(c, &Sort::Bool)?;
                let sa = self.infer(a)?;
                self.check(b, &sa)
            }
            Pred::App(f, args) if f == "len" => {
                if args.len() != 1 {
                    return Err(WfError::Arity {
                        name: f.clone(),
                        expected: 1,
                        given: args.len(),
                    });
                }
                self.check(&args[0], &Sort::list(Sort::Any))?;
                Ok(Sort::Int)
            }
            Pred::App(f, args) => {
                let (params, result) = self
                    .fns
                    .signature(f)
                    .ok_or_else(|| WfError::UnknownFunction(f.clone()))?;
                if params.len() != args.len() {
                    return Err(WfError::Arity {
                        name: f.clone(),
                        expected: params.len(),
                        given: args.len(),
                    });
                }
                for (a, s) in args.iter().zip(&params) {
                    self.check(a, s)?;
                }
                Ok(result)
            }
        }
    }

    fn infer_bin(&self, whole: &Pred, op: BinOp, a: &Pred, b: &Pred) -> Result<Sort, WfError> {
        if op == BinOp::Mod {
            self.check(a, &Sort::Int)?;
            return match b {
                Pred::Int(n) if *n != 0 => Ok(Sort::Int),
                _ => Err(WfError::NonLiteralMod(whole.to_string())),
            };
        }
        if op.is_arith() {
            self.check(a, &Sort::Int)?;
            self.check(b, &Sort::Int)?;
            return Ok(Sort::Int);
        }
        if op.is_order() {
            self.check(a, &Sort::Int)?;
            self.check(b, &Sort::Int)?;
            return Ok(Sort::Bool);
        }
        if op.is_logical() {
            self.check(a, &Sort::Bool)?;
            self.check(b, &Sort::Bool)?;
            return Ok(Sort::Bool);
        }
        // equality at any sort
        let sa = self.infer(a)?;
        self.check(b, &sa)?;
        Ok(Sort::Bool)
    }

    /// Checks an alias-free type, extending scope with function binders.
    pub fn check_type(&mut self, t: &RType, errors: &mut Vec<WfError>) {
        match t {
            RType::Base { base, refinement } => {
                let Some(sort) = base.sort() else {
                    errors.push(WfError::Unresolved(t.to_string()));
                    return;
                };
                if let Some(r) = refinement {
                    let saved = self.vars.insert(r.binder.clone(), sort);
                    if let Err(e) = self.check(&r.pred, &Sort::Bool) {
                        errors.push(e);
                    }
                    match saved {
                        Some(s) => {
                            self.vars.insert(r.binder.clone(), s);
                        }
                        None => {
                            self.vars.remove(&r.binder);
                        }
                    }
                }
            }
            RType::Fun { binder, dom, cod } => {
                self.check_type(dom, errors);
                let dom_sort = dom.base_type().and_then(|b| b.sort());
                let saved = match (binder, dom_sort) {
                    (Some(b), Some(s)) => Some((b.clone(), self.vars.insert(b.clone(), s))),
                    _ => None,
                };
                self.check_type(cod, errors);
                if let Some((b, prev)) = saved {
                    match prev {
                        Some(s) => {
                            self.vars.insert(b, s);
                        }
                        None => {
                            self.vars.remove(&b);
                        }
                    }
                }
            }
        }
    }
}

fn ill(p: &Pred, expected: &Sort, found: &Sort) -> WfError {
    WfError::IllSorted {
        term: p.to_string(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// Checks sorts, free variables, and the literal-`mod` restriction of an
/// alias-free type under `env`.
pub fn well_formed(t: &RType, env: &Env, fns: &dyn Signatures) -> Result<(), Vec<Diagnostic>> {
    let mut ctx = SortCtx::from_env(env, fns);
    let mut errors = Vec::new();
    ctx.check_type(t, &mut errors);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors
            .into_iter()
            .map(|e| {
                let code = match e {
                    WfError::Unbound(_) => Code::Unbound,
                    _ => Code::WellFormed,
                };
                Diagnostic::error(code, None, e.to_string())
            })
            .collect())
    }
}
