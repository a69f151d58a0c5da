use std::collections::{BTreeSet, HashMap};

use super::reflect::{Equation, ReflectionTable};
use crate::logic::{BinOp, Env, Pred};
use crate::surface::PatKind;

/// Constructor or literal values known for variables, read off the
/// environment's equalities (`xs == (y:ys)`, `n == 3`).
#[derive(Debug, Clone, Default)]
pub struct Shapes {
    known: HashMap<String, Pred>,
}

impl Shapes {
    pub fn from_env(env: &Env) -> Shapes {
        let mut known = HashMap::new();
        let mut add = |p: &Pred| {
            if let Pred::Bin(BinOp::Eq, a, b) = p {
                match (a.as_ref(), b.as_ref()) {
                    (Pred::Var(x), t) | (t, Pred::Var(x)) if is_shape(t) => {
                        known.entry(x.clone()).or_insert_with(|| t.clone());
                    }
                    _ => {}
                }
            }
        };
        for f in env.facts() {
            for c in f.conjuncts() {
                add(c);
            }
        }
        for b in env.binders() {
            for c in b.refinement.conjuncts() {
                add(c);
            }
        }
        Shapes { known }
    }

    /// The constructor-headed (or literal) form of `t`, if known.
    pub fn resolve<'a>(&'a self, t: &'a Pred) -> Option<&'a Pred> {
        let mut cur = t;
        for _ in 0..8 {
            if is_shape(cur) {
                return Some(cur);
            }
            match cur {
                Pred::Var(x) => cur = self.known.get(x)?,
                _ => return None,
            }
        }
        None
    }
}

fn is_shape(t: &Pred) -> bool {
    matches!(t, Pred::Nil | Pred::Cons(..) | Pred::Int(_))
}

enum Match {
    Yes(HashMap<String, Pred>),
    No,
    Stuck,
}

fn match_equation(eq: &Equation, args: &[Pred], shapes: &Shapes) -> Match {
    let mut sub = HashMap::new();
    for (pat, arg) in eq.pats.iter().zip(args) {
        match pat {
            PatKind::Var(x) => {
                sub.insert(x.clone(), arg.clone());
            }
            PatKind::Wildcard => {}
            PatKind::Nil => match shapes.resolve(arg) {
                Some(Pred::Nil) => {}
                Some(_) => return Match::No,
                None => return Match::Stuck,
            },
            PatKind::Cons(h, t) => match shapes.resolve(arg) {
                Some(Pred::Cons(hd, tl)) => {
                    if h != "_" {
                        sub.insert(h.clone(), (**hd).clone());
                    }
                    if t != "_" {
                        sub.insert(t.clone(), (**tl).clone());
                    }
                }
                Some(_) => return Match::No,
                None => return Match::Stuck,
            },
            PatKind::Int(k) => match shapes.resolve(arg) {
                Some(Pred::Int(n)) if n == k => {}
                Some(_) => return Match::No,
                None => return Match::Stuck,
            },
        }
    }
    Match::Yes(sub)
}

/// One unfolding of `f(args)` by the first equation that applies.
pub fn unfold_app(f: &str, args: &[Pred], table: &ReflectionTable, shapes: &Shapes) -> Option<Pred> {
    let eqs = table.equations(f)?;
    for eq in &eqs {
        if eq.pats.len() != args.len() {
            return None;
        }
        match match_equation(eq, args, shapes) {
            Match::Yes(sub) => return Some(eq.rhs.subst(&sub)),
            Match::No => continue,
            Match::Stuck => return None,
        }
    }
    None
}

/// Rewrites the first unfoldable application in pre-order.
pub fn rewrite_once(p: &Pred, table: &ReflectionTable, shapes: &Shapes) -> Option<Pred> {
    if let Pred::App(f, args) = p {
        if let Some(r) = unfold_app(f, args, table, shapes) {
            return Some(r);
        }
    }
    let kids = p.children();
    for (i, k) in kids.iter().enumerate() {
        if let Some(r) = rewrite_once(k, table, shapes) {
            let mut j = 0;
            return Some(p.map_children(|c| {
                let out = if j == i { r.clone() } else { c.clone() };
                j += 1;
                out
            }));
        }
    }
    None
}

/// Fuel-bounded unfolding; every rewrite costs one unit of fuel.
pub fn unfold(p: &Pred, env: &Env, table: &ReflectionTable, fuel: usize) -> Pred {
    unfold_steps(p, env, table, fuel).0
}

/// Like [`unfold`], also returning each intermediate predicate.
pub fn unfold_steps(p: &Pred, env: &Env, table: &ReflectionTable, fuel: usize) -> (Pred, Vec<Pred>) {
    let shapes = Shapes::from_env(env);
    let mut cur = p.clone();
    let mut steps = Vec::new();
    for _ in 0..fuel {
        match rewrite_once(&cur, table, &shapes) {
            Some(next) => {
                steps.push(next.clone());
                cur = next;
            }
            None => break,
        }
    }
    (cur, steps)
}

/// Equations `f(args) == rhs` for applications reachable from `terms`,
/// instantiated breadth-first for `rounds` rounds, together with the
/// result refinements of every reflected application seen.
pub fn instantiate(terms: &[Pred], env: &Env, table: &ReflectionTable, rounds: usize) -> Vec<Pred> {
    let shapes = Shapes::from_env(env);
    let mut out = Vec::new();
    let mut seen: BTreeSet<Pred> = BTreeSet::new();
    let mut frontier: Vec<Pred> = terms.iter().flat_map(|t| t.apps().into_iter().cloned()).collect();
    for _ in 0..=rounds {
        let mut next = Vec::new();
        for app in frontier {
            if !seen.insert(app.clone()) {
                continue;
            }
            let Pred::App(f, args) = &app else { continue };
            if let Some(facts) = post_of(f, args, &app, table) {
                out.push(facts);
            }
            if let Some(rhs) = unfold_app(f, args, table, &shapes) {
                next.extend(rhs.apps().into_iter().cloned());
                out.push(Pred::eq(app.clone(), rhs));
            }
            for a in args {
                next.extend(a.apps().into_iter().cloned());
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    out
}

fn post_of(f: &str, args: &[Pred], app: &Pred, table: &ReflectionTable) -> Option<Pred> {
    if f == "len" {
        return Some(Pred::bin(BinOp::Le, Pred::Int(0), app.clone()));
    }
    let r = table.get(f)?;
    let (binder, post) = r.post.as_ref()?;
    let mut sub: HashMap<String, Pred> = r.params.iter().cloned().zip(args.iter().cloned()).collect();
    sub.insert(binder.clone(), app.clone());
    Some(post.subst(&sub))
}
