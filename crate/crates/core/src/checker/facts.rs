use crate::logic::{BinOp, Pred};
use crate::surface::PatKind;

/// Facts known about scrutinee `x` inside a clause whose pattern is `pat`.
/// Constructor components must already carry real names (no `_`).
pub fn branch_facts(x: &str, pat: &PatKind) -> Vec<Pred> {
    let xv = Pred::var(x);
    match pat {
        PatKind::Nil => vec![Pred::eq(xv.clone(), Pred::Nil), Pred::eq(Pred::len(xv), Pred::Int(0))],
        PatKind::Cons(h, t) => vec![
            Pred::eq(xv.clone(), Pred::cons(Pred::var(h), Pred::var(t))),
            Pred::eq(Pred::len(xv), Pred::add(Pred::Int(1), Pred::len(Pred::var(t)))),
        ],
        PatKind::Int(k) => vec![Pred::eq(xv, Pred::Int(*k))],
        PatKind::Var(_) | PatKind::Wildcard => vec![],
    }
}

/// The shape test a refutable pattern performs, without its bindings.
pub fn shape_test(x: &str, pat: &PatKind) -> Option<Pred> {
    let xv = Pred::var(x);
    match pat {
        PatKind::Nil => Some(Pred::eq(xv, Pred::Nil)),
        PatKind::Cons(..) => Some(Pred::bin(BinOp::Ne, xv, Pred::Nil)),
        PatKind::Int(k) => Some(Pred::eq(xv, Pred::Int(*k))),
        PatKind::Var(_) | PatKind::Wildcard => None,
    }
}

/// Negation that flips a top-level (dis)equality instead of wrapping it.
pub fn negate(p: Pred) -> Pred {
    match p {
        Pred::Bin(BinOp::Eq, a, b) => Pred::Bin(BinOp::Ne, a, b),
        Pred::Bin(BinOp::Ne, a, b) => Pred::Bin(BinOp::Eq, a, b),
        Pred::Not(q) => *q,
        q => Pred::not(q),
    }
}
