//! Seeded generators for property tests.

use lqh::checker::branch_facts;
use lqh::diagnostic::Span;
use lqh::logic::{BaseType, BinOp, BinderKind, Env, Pred, RType};
use lqh::surface::{AliasDecl, Clause, Decl, Expr, ExprKind, PatKind, Pattern, Program};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

fn list_a() -> RType {
    RType::base(BaseType::list(BaseType::TyVar("a".into())))
}

/// An environment over `x`, `y >= 0` and `xs`, optionally with `xs`
/// matched against `[]` or `(z:zs)`, and a linear goal that mentions `v`.
pub fn env_pred(rng: &mut StdRng) -> (Env, Pred) {
    let mut env = Env::new();
    let int = RType::base(BaseType::Int);
    env.bind("x", &int, int.clone(), BinderKind::Param).unwrap();
    let nat = RType::refined(BaseType::Int, "y", Pred::bin(BinOp::Ge, Pred::var("y"), Pred::Int(0)));
    env.bind("y", &nat, nat.clone(), BinderKind::Param).unwrap();
    env.bind("xs", &list_a(), list_a(), BinderKind::Param).unwrap();
    let shape = rng.random_range(0..3);
    let mut terms = vec![
        Pred::var("x"),
        Pred::var("y"),
        Pred::len(Pred::var("xs")),
        Pred::app("listLength", vec![Pred::var("xs")]),
        Pred::bin(BinOp::Mul, Pred::Int(2), Pred::var("x")),
    ];
    match shape {
        1 => {
            for f in branch_facts("xs", &PatKind::Nil) {
                env.add_fact(f);
            }
        }
        2 => {
            let a = RType::base(BaseType::TyVar("a".into()));
            env.bind("z", &a, a.clone(), BinderKind::Pattern).unwrap();
            env.bind("zs", &list_a(), list_a(), BinderKind::Pattern).unwrap();
            for f in branch_facts("xs", &PatKind::Cons("z".into(), "zs".into())) {
                env.add_fact(f);
            }
            terms.push(Pred::len(Pred::var("zs")));
            terms.push(Pred::app("listLength", vec![Pred::var("zs")]));
        }
        _ => {}
    }
    let sum = |rng: &mut StdRng, with_v: bool| {
        let mut t = if with_v {
            Pred::var("v")
        } else {
            terms.choose(rng).unwrap().clone()
        };
        for _ in 0..rng.random_range(0..3) {
            let next = if rng.random_bool(0.3) {
                Pred::Int(rng.random_range(-5..=5))
            } else {
                terms.choose(rng).unwrap().clone()
            };
            let op = if rng.random_bool(0.7) { BinOp::Add } else { BinOp::Sub };
            t = if rng.random_bool(0.5) {
                Pred::bin(op, t, next)
            } else {
                Pred::bin(op, next, t)
            };
        }
        t
    };
    let ops = [BinOp::Eq, BinOp::Le, BinOp::Lt, BinOp::Ge, BinOp::Ne];
    let n = rng.random_range(1..=3);
    let mut atoms = Vec::new();
    for i in 0..n {
        let op = *ops.choose(rng).unwrap();
        let l = sum(rng, i == 0);
        let r = sum(rng, false);
        let a = if rng.random_bool(0.5) {
            Pred::bin(op, l, r)
        } else {
            Pred::bin(op, r, l)
        };
        atoms.push(a);
    }
    if rng.random_bool(0.15) {
        atoms.push(Pred::eq(
            Pred::bin(BinOp::Mod, Pred::var("v"), Pred::Int(2)),
            Pred::Int(0),
        ));
    }
    (env, Pred::and_all(atoms))
}

const NAMES: [&str; 8] = ["x", "y", "n", "m", "acc", "xs", "ys", "zs"];
const OPS: [BinOp; 14] = [
    BinOp::Add,
    BinOp::Sub,
    BinOp::Mul,
    BinOp::Mod,
    BinOp::Eq,
    BinOp::Ne,
    BinOp::Lt,
    BinOp::Le,
    BinOp::Gt,
    BinOp::Ge,
    BinOp::And,
    BinOp::Or,
    BinOp::Implies,
    BinOp::Add,
];

struct G<'r> {
    rng: &'r mut StdRng,
    holes: usize,
    fns: Vec<String>,
}

impl G<'_> {
    fn int(&mut self) -> i64 {
        self.rng.random_range(-3..=12)
    }

    fn expr(&mut self, scope: &[String], depth: usize, holes: bool) -> Expr {
        let leaf = depth == 0 || self.rng.random_bool(0.3);
        let k = if leaf {
            self.rng.random_range(0..6)
        } else {
            self.rng.random_range(0..9)
        };
        let e = |k| Expr::synth(k);
        let b = |x: Expr| Box::new(x);
        match (leaf, k) {
            (true, 0) => e(ExprKind::Int(self.int())),
            (true, 1) => e(ExprKind::Bool(self.rng.random())),
            (true, 2) => e(ExprKind::Unit),
            (true, 3) => e(ExprKind::Nil),
            (true, 4) if holes => {
                let h = format!("_{}", self.holes);
                self.holes += 1;
                e(ExprKind::Hole(h))
            }
            (true, _) => match scope.choose(self.rng) {
                Some(v) => e(ExprKind::Var(v.clone())),
                None => e(ExprKind::Int(self.int())),
            },
            (false, 0) | (false, 1) | (false, 2) => {
                let op = *OPS.choose(self.rng).unwrap();
                let l = self.expr(scope, depth - 1, holes);
                let r = self.expr(scope, depth - 1, holes);
                e(ExprKind::Binary(op, b(l), b(r)))
            }
            (false, 3) => {
                let h = self.expr(scope, depth - 1, holes);
                let t = self.expr(scope, depth - 1, holes);
                e(ExprKind::Cons(b(h), b(t)))
            }
            (false, 4) => e(ExprKind::Not(b(self.expr(scope, depth - 1, holes)))),
            (false, 5) => {
                let c = self.expr(scope, depth - 1, holes);
                let t = self.expr(scope, depth - 1, holes);
                let f = self.expr(scope, depth - 1, holes);
                e(ExprKind::If(b(c), b(t), b(f)))
            }
            (false, 6) if holes => {
                let l = self.expr(scope, depth - 1, holes);
                let r = self.expr(scope, depth - 1, holes);
                e(ExprKind::Proof(b(l), b(r)))
            }
            _ => {
                let f = if self.rng.random_bool(0.3) {
                    "len".to_string()
                } else {
                    self.fns.choose(self.rng).cloned().unwrap_or_else(|| "len".into())
                };
                let n = self.rng.random_range(1..=2);
                let args = (0..n).map(|_| self.expr(scope, depth - 1, holes)).collect();
                e(ExprKind::App(f, args))
            }
        }
    }

    fn pred(&mut self, scope: &[String]) -> Pred {
        self.expr(scope, 2, false).to_pred().expect("hole-free")
    }

    fn base(&mut self, aliases: &[String]) -> BaseType {
        match self.rng.random_range(0..7) {
            0 | 1 => BaseType::Int,
            2 => BaseType::Bool,
            3 => BaseType::list(BaseType::Int),
            4 => BaseType::list(BaseType::TyVar("a".into())),
            5 => match aliases.choose(self.rng) {
                Some(a) => BaseType::Alias(a.clone()),
                None => BaseType::Alias("Nat".into()),
            },
            _ => BaseType::Infer,
        }
    }

    fn rtype(&mut self, scope: &[String], aliases: &[String]) -> RType {
        let base = self.base(aliases);
        if base != BaseType::Infer && self.rng.random_bool(0.5) {
            let mut s = scope.to_vec();
            s.push("v".into());
            RType::refined(base, "v", self.pred(&s))
        } else {
            RType::base(base)
        }
    }

    fn pattern(&mut self, used: &mut Vec<String>) -> PatKind {
        let fresh = |rng: &mut StdRng, used: &mut Vec<String>| {
            let free: Vec<&str> = NAMES.iter().copied().filter(|n| !used.iter().any(|u| u == n)).collect();
            let n = free.choose(rng).map_or("w", |v| v).to_string();
            used.push(n.clone());
            n
        };
        match self.rng.random_range(0..6) {
            0 => PatKind::Wildcard,
            1 => PatKind::Nil,
            2 => {
                let h = if self.rng.random_bool(0.2) {
                    "_".into()
                } else {
                    fresh(self.rng, used)
                };
                let t = if self.rng.random_bool(0.2) {
                    "_".into()
                } else {
                    fresh(self.rng, used)
                };
                PatKind::Cons(h, t)
            }
            3 => PatKind::Int(self.int()),
            _ => PatKind::Var(fresh(self.rng, used)),
        }
    }
}

/// A random, syntactically valid program (not necessarily well typed).
pub fn program(rng: &mut StdRng) -> Program {
    let mut g = G {
        rng,
        holes: 0,
        fns: vec![],
    };
    let mut aliases = Vec::new();
    if g.rng.random_bool(0.5) {
        let p = g.pred(&["v".to_string()]);
        aliases.push(AliasDecl {
            name: "Pos".into(),
            def: RType::refined(BaseType::Int, "v", p),
            span: Span::default(),
        });
    }
    let alias_names: Vec<String> = aliases.iter().map(|a| a.name.clone()).collect();
    let n = g.rng.random_range(1..=3);
    g.fns = (0..n).map(|i| format!("f{i}")).collect();
    let mut decls = Vec::new();
    for name in g.fns.clone() {
        let arity = g.rng.random_range(0..=3);
        let mut scope = Vec::new();
        let mut params = Vec::new();
        for i in 0..arity {
            let binder = g.rng.random_bool(0.7).then(|| format!("p{i}"));
            let t = g.rtype(&scope, &alias_names);
            if let Some(b) = &binder {
                scope.push(b.clone());
            }
            params.push((binder, t));
        }
        let mut sig = g.rtype(&scope, &alias_names);
        for (b, t) in params.into_iter().rev() {
            sig = RType::fun(b.as_deref(), t, sig);
        }
        let mut clauses = Vec::new();
        let k = g.rng.random_range(0..=arity);
        for _ in 0..g.rng.random_range(1..=2) {
            let mut used = Vec::new();
            let pats = (0..k).map(|_| Pattern::new(g.pattern(&mut used))).collect();
            let body = g.expr(&used, 3, true);
            clauses.push(Clause {
                pats,
                body,
                span: Span::default(),
            });
        }
        decls.push(Decl {
            name,
            sig,
            sig_span: Span::default(),
            clauses,
        });
    }
    Program { aliases, decls }
}
