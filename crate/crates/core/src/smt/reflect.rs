use std::collections::{BTreeMap, BTreeSet};

use crate::logic::{Pred, RType, Signatures, Sort};
use crate::surface::{Expr, ExprKind, PatKind, Program};

/// One defining equation: argument patterns and a right-hand side over the
/// names they bind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub pats: Vec<PatKind>,
    pub rhs: Pred,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reflected {
    pub name: String,
    pub params: Vec<String>,
    pub param_sorts: Vec<Sort>,
    pub result: Sort,
    /// Result refinement over `params`, with the value binder as given.
    pub post: Option<(String, Pred)>,
    /// `None` when the body is not expressible in the logic (e.g. has holes).
    pub equations: Option<Vec<Equation>>,
    /// Whether the definition is recursive (directly).
    pub recursive: bool,
}

/// Logic-level functions: the `len` measure plus every top-level function
/// whose parameter and result sorts are representable.
#[derive(Debug, Clone, Default)]
pub struct ReflectionTable {
    fns: BTreeMap<String, Reflected>,
}

impl Signatures for ReflectionTable {
    fn signature(&self, name: &str) -> Option<(Vec<Sort>, Sort)> {
        self.fns.get(name).map(|r| (r.param_sorts.clone(), r.result.clone()))
    }
}

pub fn len_equations() -> Vec<Equation> {
    vec![
        Equation {
            pats: vec![PatKind::Nil],
            rhs: Pred::Int(0),
        },
        Equation {
            pats: vec![PatKind::Cons("_".into(), "t".into())],
            rhs: Pred::add(Pred::Int(1), Pred::len(Pred::var("t"))),
        },
    ]
}

impl ReflectionTable {
    /// `sigs` are alias-free, inferred signatures keyed by function name.
    pub fn build(prog: &Program, sigs: &BTreeMap<String, RType>) -> ReflectionTable {
        let mut fns = BTreeMap::new();
        for d in &prog.decls {
            let Some(sig) = sigs.get(&d.name) else {
                continue;
            };
            let (params, result) = sig.split_params();
            let Some(param_sorts) = params
                .iter()
                .map(|(_, t)| t.base_type().and_then(|b| b.sort()))
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let Some(result_sort) = result.base_type().and_then(|b| b.sort()) else {
                continue;
            };
            let names: Vec<String> = params
                .iter()
                .enumerate()
                .map(|(i, (b, _))| b.map(str::to_string).unwrap_or(format!("x{}", i + 1)))
                .collect();
            let post = result.pred().map(|(b, p)| (b.to_string(), p.clone())).filter(|(b, p)| {
                let mut fv = p.free_vars();
                fv.remove(b);
                fv.iter().all(|v| names.contains(v))
            });
            let decl_names: BTreeSet<&str> = prog.decls.iter().map(|d| d.name.as_str()).collect();
            let equations = d
                .clauses
                .iter()
                .map(|c| {
                    if c.pats.len() != names.len() {
                        return None;
                    }
                    let bound: BTreeSet<&str> = c.pats.iter().flat_map(|p| p.bound_names()).collect();
                    let rhs = expr_to_logic(&c.body, &bound, &decl_names)?;
                    Some(Equation {
                        pats: c.pats.iter().map(|p| p.kind.clone()).collect(),
                        rhs,
                    })
                })
                .collect::<Option<Vec<_>>>();
            let recursive = equations
                .as_ref()
                .map(|eqs| {
                    eqs.iter().any(|e| {
                        e.rhs
                            .apps()
                            .iter()
                            .any(|a| matches!(a, Pred::App(g, _) if *g == d.name))
                    })
                })
                .unwrap_or(false);
            fns.insert(
                d.name.clone(),
                Reflected {
                    name: d.name.clone(),
                    params: names,
                    param_sorts,
                    result: result_sort,
                    post,
                    equations,
                    recursive,
                },
            );
        }
        // greatest fixpoint: equations may only mention reflected functions
        loop {
            let known: BTreeSet<String> = fns.keys().cloned().collect();
            let mut changed = false;
            for r in fns.values_mut() {
                let bad = r.equations.as_ref().is_some_and(|eqs| {
                    eqs.iter().any(|e| {
                        e.rhs.apps().iter().any(|a| match a {
                            Pred::App(g, _) => g != "len" && !known.contains(g),
                            _ => false,
                        })
                    })
                });
                if bad {
                    r.equations = None;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        ReflectionTable { fns }
    }

    pub fn get(&self, name: &str) -> Option<&Reflected> {
        self.fns.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.fns.contains_key(name)
    }

    pub fn functions(&self) -> impl Iterator<Item = &Reflected> {
        self.fns.values()
    }

    /// Defining equations of `name`, including the built-in `len`.
    pub fn equations(&self, name: &str) -> Option<Vec<Equation>> {
        if name == "len" && !self.fns.contains_key("len") {
            return Some(len_equations());
        }
        self.fns.get(name).and_then(|r| r.equations.clone())
    }

    /// Whether `name` is defined by matching on parameter `i`.
    pub fn matches_on(&self, name: &str, i: usize) -> bool {
        self.equations(name).is_some_and(|eqs| {
            eqs.iter().any(|e| {
                e.pats
                    .get(i)
                    .is_some_and(|p| matches!(p, PatKind::Nil | PatKind::Cons(..)))
            })
        })
    }
}

/// Converts a clause body into a logic term; `?` keeps its left operand.
fn expr_to_logic(e: &Expr, bound: &BTreeSet<&str>, decls: &BTreeSet<&str>) -> Option<Pred> {
    match &e.kind {
        ExprKind::Proof(a, _) => expr_to_logic(a, bound, decls),
        ExprKind::Hole(_) => None,
        ExprKind::Var(x) if bound.contains(x.as_str()) => Some(Pred::var(x)),
        ExprKind::Var(x) if decls.contains(x.as_str()) => Some(Pred::app(x.clone(), vec![])),
        ExprKind::Var(_) => None,
        ExprKind::App(g, args) => Some(Pred::app(
            g.clone(),
            args.iter()
                .map(|a| expr_to_logic(a, bound, decls))
                .collect::<Option<_>>()?,
        )),
        _ => {
            // structural cases share the generic conversion on children
            let kids: Vec<Pred> = e
                .children()
                .into_iter()
                .map(|c| expr_to_logic(c, bound, decls))
                .collect::<Option<_>>()?;
            let mut it = kids.into_iter();
            let mut next = || Box::new(it.next().unwrap());
            Some(match &e.kind {
                ExprKind::Int(n) => Pred::Int(*n),
                ExprKind::Bool(b) => Pred::Bool(*b),
                ExprKind::Unit => Pred::Unit,
                ExprKind::Nil => Pred::Nil,
                ExprKind::Cons(..) => Pred::Cons(next(), next()),
                ExprKind::Binary(op, ..) => Pred::Bin(*op, next(), next()),
                ExprKind::Not(_) => Pred::Not(next()),
                ExprKind::If(..) => Pred::Ite(next(), next(), next()),
                _ => unreachable!(),
            })
        }
    }
}
