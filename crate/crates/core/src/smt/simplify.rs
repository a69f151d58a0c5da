use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::prove;
use super::reflect::ReflectionTable;
use super::solver::Solver;
use super::unfold::{rewrite_once, Shapes};
use crate::logic::{BinOp, Env, Pred, Sort};

pub const MAX_PASSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// Substitute environment equalities `x == t`.
    R1,
    /// Unfold one measure or reflected-function application.
    R2,
    /// Linear normalization and constant folding.
    R3,
    /// Drop conjuncts entailed by the environment.
    R4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub before: Pred,
    pub after: Pred,
}

pub type Trace = Vec<TraceStep>;

/// What the simplifier may consult.
pub struct SimplifyCtx<'a> {
    pub env: &'a Env,
    pub table: &'a ReflectionTable,
    /// Variables free in the predicate but not bound in `env` (the value binder).
    pub extra: Vec<(String, Sort)>,
    /// The value binder to isolate in R3.
    pub value: Option<String>,
    pub fuel: usize,
}

/// R1 then R2 only, to fixpoint: the "expands to" view of a goal.
pub fn expand(p: &Pred, cx: &SimplifyCtx<'_>) -> Pred {
    let shapes = Shapes::from_env(cx.env);
    let mut fuel = cx.fuel;
    let mut cur = substitute_env(p, cx).unwrap_or_else(|| p.clone());
    while fuel > 0 {
        match rewrite_once(&cur, cx.table, &shapes) {
            Some(n) => {
                cur = n;
                fuel -= 1;
            }
            None => break,
        }
    }
    cur
}

/// Runs R1, R2, R3, R4 in order until nothing changes or the pass limit.
/// R4 is skipped without a solver.
pub fn simplify(p: &Pred, cx: &SimplifyCtx<'_>, mut solver: Option<&mut Solver>) -> (Pred, Trace) {
    let shapes = Shapes::from_env(cx.env);
    let mut trace = Vec::new();
    let mut fuel = cx.fuel;
    let mut cur = p.clone();
    for _ in 0..MAX_PASSES {
        let start = cur.clone();
        if let Some(n) = substitute_env(&cur, cx) {
            trace.push(step(Rule::R1, &cur, &n));
            cur = n;
        }
        while fuel > 0 {
            match rewrite_once(&cur, cx.table, &shapes) {
                Some(n) => {
                    trace.push(step(Rule::R2, &cur, &n));
                    cur = n;
                    fuel -= 1;
                }
                None => break,
            }
        }
        let n = normalize(&cur, cx.value.as_deref());
        if n != cur {
            trace.push(step(Rule::R3, &cur, &n));
            cur = n;
        }
        if let Some(s) = solver.as_deref_mut() {
            if let Some(n) = drop_entailed(&cur, cx, s) {
                trace.push(step(Rule::R4, &cur, &n));
                cur = n;
            }
        }
        if cur == start {
            break;
        }
    }
    (cur, trace)
}

fn step(rule: Rule, before: &Pred, after: &Pred) -> TraceStep {
    TraceStep {
        rule,
        before: before.clone(),
        after: after.clone(),
    }
}

/// R1: variables bound in the environment that have a defining equality.
fn substitute_env(p: &Pred, cx: &SimplifyCtx<'_>) -> Option<Pred> {
    let mut map: HashMap<String, Pred> = HashMap::new();
    for f in cx.env.facts() {
        for c in f.conjuncts() {
            if let Pred::Bin(BinOp::Eq, a, b) = c {
                if let Pred::Var(x) = a.as_ref() {
                    if cx.env.contains(x)
                        && Some(x.as_str()) != cx.value.as_deref()
                        && !b.mentions(x)
                        && !map.contains_key(x)
                    {
                        map.insert(x.clone(), (**b).clone());
                    }
                }
            }
        }
    }
    if map.is_empty() {
        return None;
    }
    let out = p.subst(&map);
    (out != *p).then_some(out)
}

/// R4: drops conjuncts the environment already entails.
fn drop_entailed(p: &Pred, cx: &SimplifyCtx<'_>, solver: &mut Solver) -> Option<Pred> {
    let cs = p.conjuncts();
    if cs.is_empty() {
        return None;
    }
    let mut keep = Vec::new();
    let mut dropped = false;
    for c in cs {
        let entailed = prove(cx.env, &cx.extra, &[], c, cx.table, cx.fuel, solver)
            .map(|v| v.is_valid())
            .unwrap_or(false);
        if entailed {
            dropped = true;
        } else {
            keep.push(c.clone());
        }
    }
    dropped.then(|| Pred::and_all(keep))
}

// ---- R3 ----

#[derive(Debug, Clone, PartialEq, Eq)]
struct Lin {
    terms: Vec<(Pred, i64)>,
    c: i64,
}

impl Lin {
    fn constant(c: i64) -> Lin {
        Lin { terms: vec![], c }
    }

    fn atom(p: &Pred) -> Lin {
        Lin {
            terms: vec![(p.clone(), 1)],
            c: 0,
        }
    }

    fn add(mut self, o: Lin, sign: i64) -> Option<Lin> {
        self.c = self.c.checked_add(o.c.checked_mul(sign)?)?;
        for (t, k) in o.terms {
            let k = k.checked_mul(sign)?;
            match self.terms.iter_mut().find(|(u, _)| *u == t) {
                Some((_, j)) => *j = j.checked_add(k)?,
                None => self.terms.push((t, k)),
            }
        }
        self.terms.retain(|(_, k)| *k != 0);
        Some(self)
    }

    fn scale(mut self, k: i64) -> Option<Lin> {
        self.c = self.c.checked_mul(k)?;
        for (_, j) in self.terms.iter_mut() {
            *j = j.checked_mul(k)?;
        }
        self.terms.retain(|(_, j)| *j != 0);
        Some(self)
    }

    fn coeff(&self, t: &Pred) -> i64 {
        self.terms.iter().find(|(u, _)| u == t).map(|(_, k)| *k).unwrap_or(0)
    }

    fn mentions(&self, x: &str) -> usize {
        self.terms.iter().filter(|(t, _)| t.mentions(x)).count()
    }

    fn build(&self) -> Pred {
        let pos = self.terms.iter().filter(|(_, k)| *k > 0);
        let neg = self.terms.iter().filter(|(_, k)| *k < 0);
        let mono = |t: &Pred, k: i64| {
            if k == 1 {
                t.clone()
            } else {
                Pred::bin(BinOp::Mul, Pred::Int(k), t.clone())
            }
        };
        let mut c = self.c;
        let mut acc: Option<Pred> = None;
        if c > 0 && !self.terms.iter().any(|(_, k)| *k > 0) {
            acc = Some(Pred::Int(c));
            c = 0;
        }
        for (t, k) in pos {
            let m = mono(t, *k);
            acc = Some(match acc {
                None => m,
                Some(a) => Pred::add(a, m),
            });
        }
        for (t, k) in neg {
            let m = mono(t, -*k);
            acc = Some(Pred::bin(BinOp::Sub, acc.unwrap_or(Pred::Int(0)), m));
        }
        match acc {
            None => Pred::Int(c),
            Some(a) if c > 0 => Pred::add(a, Pred::Int(c)),
            Some(a) if c < 0 => Pred::bin(BinOp::Sub, a, Pred::Int(-c)),
            Some(a) => a,
        }
    }
}

fn lin(p: &Pred) -> Lin {
    let go = || -> Option<Lin> {
        Some(match p {
            Pred::Int(n) => Lin::constant(*n),
            Pred::Bin(BinOp::Add, a, b) => lin(a).add(lin(b), 1)?,
            Pred::Bin(BinOp::Sub, a, b) => lin(a).add(lin(b), -1)?,
            Pred::Bin(BinOp::Mul, a, b) => match (a.as_ref(), b.as_ref()) {
                (Pred::Int(k), e) | (e, Pred::Int(k)) => lin(e).scale(*k)?,
                _ => return None,
            },
            _ => return None,
        })
    };
    go().unwrap_or_else(|| Lin::atom(p))
}

fn flip(op: BinOp) -> BinOp {
    match op {
        BinOp::Lt => BinOp::Gt,
        BinOp::Le => BinOp::Ge,
        BinOp::Gt => BinOp::Lt,
        BinOp::Ge => BinOp::Le,
        o => o,
    }
}

fn is_arith(p: &Pred) -> bool {
    matches!(p, Pred::Int(_) | Pred::Bin(BinOp::Add | BinOp::Sub | BinOp::Mul, ..))
}

/// Cancels common terms and isolates `value`, for one comparison.
fn normalize_atom(op: BinOp, a: &Pred, b: &Pred, value: Option<&str>) -> Option<Pred> {
    if !(is_arith(a) || is_arith(b)) {
        return None;
    }
    let (mut la, mut lb) = (lin(a), lin(b));
    let mut changed = false;
    // cancel common additive terms with the same sign
    let common: Vec<Pred> = la
        .terms
        .iter()
        .filter(|(t, k)| {
            let j = lb.coeff(t);
            j != 0 && j.signum() == k.signum()
        })
        .map(|(t, _)| t.clone())
        .collect();
    for t in common {
        let (ka, kb) = (la.coeff(&t), lb.coeff(&t));
        let m = if ka.abs() < kb.abs() { ka } else { kb };
        la = la.add(Lin::atom(&t).scale(m)?, -1)?;
        lb = lb.add(Lin::atom(&t).scale(m)?, -1)?;
        changed = true;
    }
    if la.c != 0 && lb.c != 0 && la.c.signum() == lb.c.signum() {
        let m = if la.c.abs() < lb.c.abs() { la.c } else { lb.c };
        la.c -= m;
        lb.c -= m;
        changed = true;
    }
    if let Some(v) = value {
        let vp = Pred::var(v);
        let (in_a, in_b) = (la.mentions(v), lb.mentions(v));
        let iso = |from: &Lin, to: &Lin| -> Option<(i64, Lin)> {
            let k = from.coeff(&vp);
            if from.mentions(v) != 1 || k.abs() != 1 || (from.terms.len() == 1 && from.c == 0) {
                return None;
            }
            let rest = from.clone().add(Lin::atom(&vp).scale(k)?, -1)?;
            Some((k, to.clone().add(rest, -1)?))
        };
        if in_a == 1 && in_b == 0 {
            if let Some((k, rhs)) = iso(&la, &lb) {
                let (op2, rhs) = if k == 1 { (op, rhs) } else { (flip(op), rhs.scale(-1)?) };
                return Some(fold(&Pred::bin(op2, vp, rhs.build())));
            }
        } else if in_b == 1 && in_a == 0 {
            if let Some((k, rhs)) = iso(&lb, &la) {
                // a op (k*v + r)  ~~>  v op' (a - r)/k, keeping v on its side
                let (op2, rhs) = if k == 1 { (op, rhs) } else { (flip(op), rhs.scale(-1)?) };
                return Some(fold(&Pred::bin(op2, rhs.build(), vp)));
            }
        }
    }
    changed.then(|| fold(&Pred::bin(op, la.build(), lb.build())))
}

/// R3 over a whole predicate: per-atom normalization, then folding.
pub fn normalize(p: &Pred, value: Option<&str>) -> Pred {
    let inner = p.map_children(|c| normalize(c, value));
    let out = match &inner {
        Pred::Bin(op, a, b) if op.is_equality() || op.is_order() => {
            normalize_atom(*op, a, b, value).unwrap_or_else(|| inner.clone())
        }
        _ => inner.clone(),
    };
    fold(&out)
}

/// One level of constant folding.
pub fn fold(p: &Pred) -> Pred {
    use Pred::*;
    match p {
        Bin(op, a, b) => match (op, a.as_ref(), b.as_ref()) {
            (BinOp::Add, Int(x), Int(y)) => x.checked_add(*y).map(Int).unwrap_or_else(|| p.clone()),
            (BinOp::Sub, Int(x), Int(y)) => x.checked_sub(*y).map(Int).unwrap_or_else(|| p.clone()),
            (BinOp::Mul, Int(x), Int(y)) => x.checked_mul(*y).map(Int).unwrap_or_else(|| p.clone()),
            (BinOp::Mod, Int(x), Int(y)) if *y != 0 => Int(crate::surface::eval::haskell_mod(*x, *y)),
            (BinOp::Add, e, Int(0)) | (BinOp::Add, Int(0), e) | (BinOp::Sub, e, Int(0)) => e.clone(),
            (BinOp::Lt, Int(x), Int(y)) => Bool(x < y),
            (BinOp::Le, Int(x), Int(y)) => Bool(x <= y),
            (BinOp::Gt, Int(x), Int(y)) => Bool(x > y),
            (BinOp::Ge, Int(x), Int(y)) => Bool(x >= y),
            (BinOp::Eq, x, y) if x == y => Bool(true),
            (BinOp::Le | BinOp::Ge, x, y) if x == y => Bool(true),
            (BinOp::Ne | BinOp::Lt | BinOp::Gt, x, y) if x == y => Bool(false),
            (BinOp::Eq, Int(_), Int(_)) | (BinOp::Eq, Bool(_), Bool(_)) => Bool(false),
            (BinOp::Ne, Int(_), Int(_)) | (BinOp::Ne, Bool(_), Bool(_)) => Bool(true),
            (BinOp::Eq, Nil, Cons(..)) | (BinOp::Eq, Cons(..), Nil) => Bool(false),
            (BinOp::Eq, Cons(h1, t1), Cons(h2, t2)) => fold(&Pred::and(
                fold(&Pred::eq((**h1).clone(), (**h2).clone())),
                fold(&Pred::eq((**t1).clone(), (**t2).clone())),
            )),
            (BinOp::And, Bool(true), e) | (BinOp::And, e, Bool(true)) => e.clone(),
            (BinOp::And, Bool(false), _) | (BinOp::And, _, Bool(false)) => Bool(false),
            (BinOp::Or, Bool(false), e) | (BinOp::Or, e, Bool(false)) => e.clone(),
            (BinOp::Or, Bool(true), _) | (BinOp::Or, _, Bool(true)) => Bool(true),
            (BinOp::Implies, Bool(true), e) => e.clone(),
            (BinOp::Implies, Bool(false), _) | (BinOp::Implies, _, Bool(true)) => Bool(true),
            _ => p.clone(),
        },
        Not(a) => match a.as_ref() {
            Bool(b) => Bool(!b),
            _ => p.clone(),
        },
        Ite(c, a, b) => match c.as_ref() {
            Bool(true) => (**a).clone(),
            Bool(false) => (**b).clone(),
            _ if a == b => (**a).clone(),
            _ => p.clone(),
        },
        _ => p.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_pred;

    fn pr(s: &str) -> Pred {
        parse_pred(s).unwrap()
    }

    fn simp(s: &str, env: &Env) -> String {
        let table = ReflectionTable::default();
        let cx = SimplifyCtx {
            env,
            table: &table,
            extra: vec![("v".into(), Sort::Int)],
            value: Some("v".into()),
            fuel: 8,
        };
        simplify(&pr(s), &cx, None).0.to_string()
    }

    #[test]
    fn list_length_chain() {
        let env = Env::new();
        assert_eq!(simp("v == len []", &env), "v == 0");
        assert_eq!(simp("1 + v == len (y:ys)", &env), "v == len ys");
        assert_eq!(simp("true", &env), "true");
    }

    #[test]
    fn cancels_common_terms() {
        assert_eq!(
            normalize(&pr("1 + listLength ys == 1 + len ys"), None).to_string(),
            "listLength ys == len ys"
        );
        assert_eq!(normalize(&pr("0 == 0"), None), Pred::Bool(true));
        assert_eq!(normalize(&pr("v + 1 == 3"), Some("v")).to_string(), "v == 2");
        assert_eq!(normalize(&pr("3 - v <= x"), Some("v")).to_string(), "v >= 3 - x");
    }

    #[test]
    fn leaves_non_arithmetic_alone() {
        let p = pr("v mod 2 == 1");
        assert_eq!(normalize(&p, Some("v")), p);
        let q = pr("0 <= v && v == len xs");
        assert_eq!(normalize(&q, Some("v")), q);
    }
}
