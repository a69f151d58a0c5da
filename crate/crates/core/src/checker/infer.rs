use std::collections::BTreeMap;

use crate::diagnostic::{Code, Diagnostic};
use crate::logic::{BaseType, Pred, RType, Refinement};
use crate::surface::{Decl, PatKind};

/// Element type assumed for lists whose element type is never constrained.
pub const ELEM: &str = "a";

/// Replaces `_` parameter types with a base inferred from the first clause's
/// patterns, or from how the signature's refinements use the binder.
/// Only `[a]` and `Int` can be inferred.
///
/// `known` gives resolved parameter bases of already-processed functions.
pub fn infer_signature(decl: &Decl, known: &BTreeMap<String, Vec<BaseType>>) -> Result<RType, Diagnostic> {
    let first = decl.clauses.first();
    let all_preds = refinements(&decl.sig);
    let mut i = 0;
    fill(&decl.sig, &mut i, &mut |idx, binder| {
        if let Some(p) = first.and_then(|c| c.pats.get(idx)) {
            match p.kind {
                PatKind::Nil | PatKind::Cons(..) => return Some(list()),
                PatKind::Int(_) => return Some(BaseType::Int),
                _ => {}
            }
        }
        let b = binder?;
        all_preds.iter().find_map(|p| from_uses(p, b, known))
    })
    .map_err(|idx| {
        Diagnostic::error(
            Code::Sort,
            decl.sig_span,
            format!(
                "cannot infer the type of parameter {} of `{}`; write it explicitly",
                idx + 1,
                decl.name
            ),
        )
    })
}

fn list() -> BaseType {
    BaseType::list(BaseType::TyVar(ELEM.into()))
}

fn refinements(t: &RType) -> Vec<Pred> {
    match t {
        RType::Base { refinement, .. } => refinement.iter().map(|r| r.pred.clone()).collect(),
        RType::Fun { dom, cod, .. } => {
            let mut v = refinements(dom);
            v.extend(refinements(cod));
            v
        }
    }
}

fn fill(
    t: &RType,
    idx: &mut usize,
    guess: &mut dyn FnMut(usize, Option<&str>) -> Option<BaseType>,
) -> Result<RType, usize> {
    match t {
        RType::Fun { binder, dom, cod } => {
            let here = *idx;
            let dom = match dom.as_ref() {
                RType::Base {
                    base: BaseType::Infer,
                    refinement,
                } => RType::Base {
                    base: guess(here, binder.as_deref()).ok_or(here)?,
                    refinement: refinement.clone(),
                },
                d => d.clone(),
            };
            *idx += 1;
            Ok(RType::Fun {
                binder: binder.clone(),
                dom: Box::new(dom),
                cod: Box::new(fill(cod, idx, guess)?),
            })
        }
        RType::Base {
            base: BaseType::Infer, ..
        } => Err(*idx),
        RType::Base { .. } => Ok(t.clone()),
    }
}

fn from_uses(p: &Pred, x: &str, known: &BTreeMap<String, Vec<BaseType>>) -> Option<BaseType> {
    if let Pred::App(f, args) = p {
        for (j, a) in args.iter().enumerate() {
            if *a == Pred::var(x) {
                if f == "len" {
                    return Some(list());
                }
                if let Some(b) = known.get(f).and_then(|ps| ps.get(j)) {
                    if !b.contains_infer() {
                        return Some(b.clone());
                    }
                }
            }
        }
    }
    if let Pred::Bin(op, a, b) = p {
        if (op.is_arith() || op.is_order()) && (**a == Pred::var(x) || **b == Pred::var(x)) {
            return Some(BaseType::Int);
        }
    }
    p.children().into_iter().find_map(|c| from_uses(c, x, known))
}

/// The displayed form of a refinement-free type `{ v:b | true }` is `b`.
pub fn strip_trivial(t: RType) -> RType {
    match t {
        RType::Base {
            base,
            refinement: Some(Refinement {
                pred: Pred::Bool(true), ..
            }),
        } => RType::base(base),
        other => other,
    }
}
