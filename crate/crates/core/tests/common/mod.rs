#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use lqh::checker::{check_program, generate, CheckOptions, DeclInfo};
use lqh::logic::eval::holds;
use lqh::logic::{BaseType, BinOp, BinderKind, Env, Pred, RType, Sort};
use lqh::session::{Config, Session};
use lqh::smt::simplify::normalize;
use lqh::smt::{expand, prove, simplify, ReflectionTable, SimplifyCtx, Solver, SolverConfig, Verdict};
use lqh::surface::eval::Evaluator;
use lqh::surface::{evaluate, parse_program, print_program, Program, Value};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub mod gen;

pub type Outcome = Result<String, String>;

macro_rules! ensure {
    ($c:expr, $($msg:tt)*) => {
        if !$c {
            return Err(format!($($msg)*));
        }
    };
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus(name: &str) -> String {
    let p = corpus_dir().join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn corpus_files() -> Vec<(String, String)> {
    let mut v: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "lqh"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().to_string();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

pub fn solver() -> Solver {
    Solver::new(&SolverConfig::default()).expect("solver")
}

pub fn session() -> Session {
    Session::new(Config::default()).expect("session")
}

/// Compares ignoring trailing whitespace on each line.
pub fn same_text(a: &str, b: &str) -> bool {
    let norm = |s: &str| s.trim_end().lines().map(str::trim_end).collect::<Vec<_>>().join("\n");
    norm(a) == norm(b)
}

pub const MSG_SPLIT: &str = "Found hole `_0' of type `xs:[a] -> { _:Proof | listLength xs == len xs }'.
       Consider a case split as in the body of `listLength'.";
pub const MSG_UNIT: &str = "Found hole `_0' of type `{ _:Proof | xs == [] && listLength xs == len xs }'.
       This can be completed with `()'.";
pub const MSG_UNFOLD: &str = "Found hole `_1' of type `{ _:Proof | xs == (y:ys) && listLength xs == len xs }'.
       Conclusion expands to `1 + listLength ys == 1 + len ys',
       which is simplified to `listLength ys == len ys`.";

fn accepted(file: &str) -> Result<bool, String> {
    let prog = parse_program(&corpus(file)).map_err(|e| format!("{file}: {e:?}"))?;
    let r = check_program(&prog, &CheckOptions::default(), &mut solver());
    Ok(r.accepted())
}

pub fn c1_section2_corpus() -> Outcome {
    ensure!(accepted("odd_add.lqh")?, "oddAdd with EvenInt result was rejected");
    ensure!(!accepted("odd_add_bad.lqh")?, "oddAdd with OddInt result was accepted");
    ensure!(accepted("sum_odd.lqh")?, "sumOdd = () was rejected");
    Ok("oddAdd accepted, OddInt mutant rejected, sumOdd accepted".into())
}

pub fn c2_intrinsic_goals() -> Outcome {
    let a = session().analyze(&corpus("list_length_holes.lqh"));
    let want = [
        ("_0", "{ v:Nat | v == len [] }", "{ v:Nat | v == 0 }"),
        ("_1", "{ v:Nat | 1 + v == len (y:ys) }", "{ v:Nat | v == len ys }"),
    ];
    for (id, raw, simp) in want {
        let h = a.hole(id).ok_or_else(|| format!("no report for {id}"))?;
        ensure!(h.goal.raw.to_string() == raw, "{id} raw: got `{}`", h.goal.raw);
        ensure!(
            h.goal.simplified.to_string() == simp,
            "{id} simplified: got `{}`",
            h.goal.simplified
        );
    }
    Ok("raw and simplified goals of _0 and _1 match".into())
}

pub fn c3_extrinsic_script() -> Outcome {
    let mut s = session();
    let src = corpus("list_length_proof.lqh");
    let a = s.analyze(&src);
    let m0 = &a.hole("_0").ok_or("no _0 in unsplit proof")?.message;
    ensure!(same_text(m0, MSG_SPLIT), "unsplit message:\n{m0}");

    let split = s.split(&src, "_0", None, false).map_err(|e| e.to_string())?;
    ensure!(
        same_text(&split.source, &corpus("list_length_proof_split.lqh")),
        "split source:\n{}",
        split.source
    );
    let m = |a: &lqh::session::Analysis, id: &str| a.hole(id).map(|h| h.message.clone()).unwrap_or_default();
    ensure!(
        same_text(&m(&split.analysis, "_0"), MSG_UNIT),
        "nil message:\n{}",
        m(&split.analysis, "_0")
    );
    ensure!(
        same_text(&m(&split.analysis, "_1"), MSG_UNFOLD),
        "cons message:\n{}",
        m(&split.analysis, "_1")
    );

    let unit = s.fill_unit(&split.source, "_0").map_err(|e| e.to_string())?;
    let h1 = unit.analysis.hole("_1").ok_or("no _1 after filling ()")?;
    let text = h1
        .actions
        .iter()
        .find_map(|r| match &r.action.kind {
            lqh::holes::ActionKind::FillExpr { text } => Some(text.clone()),
            _ => None,
        })
        .ok_or("no induction suggestion for _1")?;
    ensure!(text == "listLengthProof ys", "suggested `{text}`");
    let done = s.fill(&unit.source, "_1", &text).map_err(|e| e.to_string())?;
    ensure!(
        done.analysis.accepted(),
        "final program rejected: {:?}",
        done.analysis.diagnostics(true)
    );
    ensure!(done.analysis.holes.is_empty(), "holes remain");
    ensure!(
        same_text(&done.source, &corpus("list_length_proof_done.lqh")),
        "final source:\n{}",
        done.source
    );
    Ok("split, (), and `listLengthProof ys` give an accepted hole-free proof; all three messages exact".into())
}

/// `env ⊢ a ⇔ b`.
pub fn equivalent(
    env: &Env,
    extra: &[(String, Sort)],
    a: &Pred,
    b: &Pred,
    table: &ReflectionTable,
    s: &mut Solver,
) -> Result<bool, String> {
    for (p, q) in [(a, b), (b, a)] {
        let goal = Pred::bin(BinOp::Implies, p.clone(), q.clone());
        match prove(env, extra, &[], &goal, table, 8, s).map_err(|e| e.to_string())? {
            Verdict::Valid => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

pub fn c4_simplifier_soundness() -> Outcome {
    let mut s = solver();
    let mut steps = 0;
    let mut preds = 0;
    // corpus goals
    for (name, src) in corpus_files() {
        let Ok(prog) = parse_program(&src) else { continue };
        let r = check_program(&prog, &CheckOptions::default(), &mut s);
        for cap in &r.captures {
            let g = lqh::holes::hole_goal(cap, &r.table, 8, Some(&mut s));
            let Some(stmt) = &g.statement else { continue };
            let extra = if g.value == "_" {
                vec![]
            } else {
                vec![(
                    g.value.clone(),
                    cap.expected.base_type().and_then(|b| b.sort()).unwrap_or(Sort::Int),
                )]
            };
            preds += 1;
            for st in &g.trace {
                steps += 1;
                ensure!(
                    equivalent(&cap.env, &extra, &st.before, &st.after, &r.table, &mut s)?,
                    "{name} {}: {:?} step `{}` -> `{}` not equivalent",
                    cap.name,
                    st.rule,
                    st.before,
                    st.after
                );
            }
            let simp = g.simplified_pred().cloned().unwrap_or(Pred::Bool(true));
            ensure!(
                equivalent(&cap.env, &extra, stmt, &simp, &r.table, &mut s)?,
                "{name} {}: raw/simplified differ",
                cap.name
            );
        }
    }
    // generated pairs
    let table = generate(&parse_program(&corpus("list_length_proof.lqh")).unwrap()).table;
    let mut rng = StdRng::seed_from_u64(4);
    for i in 0..200 {
        let (env, p) = gen::env_pred(&mut rng);
        let extra = vec![("v".to_string(), Sort::Int)];
        let cx = SimplifyCtx {
            env: &env,
            table: &table,
            extra: extra.clone(),
            value: Some("v".into()),
            fuel: 8,
        };
        let (q, trace) = simplify(&p, &cx, Some(&mut s));
        preds += 1;
        for st in &trace {
            steps += 1;
            ensure!(
                equivalent(&env, &extra, &st.before, &st.after, &table, &mut s)?,
                "generated #{i}: {:?} step `{}` -> `{}` not equivalent",
                st.rule,
                st.before,
                st.after
            );
        }
        ensure!(
            equivalent(&env, &extra, &p, &q, &table, &mut s)?,
            "generated #{i}: `{p}` vs `{q}`"
        );
    }
    Ok(format!(
        "{steps} rewrite steps over {preds} predicates, all SMT-equivalent"
    ))
}

/// Values of an alias-free base type: ints in [-100, 100], lists up to 6 long.
pub fn random_value(rng: &mut StdRng, b: &BaseType) -> Value {
    match b {
        BaseType::Int | BaseType::TyVar(_) => Value::Int(rng.random_range(-100..=100)),
        BaseType::Bool => Value::Bool(rng.random()),
        BaseType::Unit => Value::Unit,
        BaseType::List(e) => {
            let n = rng.random_range(0..=6);
            Value::List((0..n).map(|_| random_value(rng, e)).collect())
        }
        _ => Value::Unit,
    }
}

fn intrinsic(info: &DeclInfo) -> bool {
    let (_, res) = info.resolved.split_params();
    res.pred().is_some() && !matches!(res.base_type(), Some(BaseType::Unit))
}

/// Samples `n` precondition-satisfying inputs per function and checks the
/// postcondition on the evaluated result.
pub fn oracle(prog: &Program, info: &DeclInfo, n: usize, rng: &mut StdRng) -> Result<usize, String> {
    let ev = Evaluator::new(prog);
    let (params, res) = info.resolved.split_params();
    let mut found = 0;
    let mut tries = 0;
    while found < n {
        tries += 1;
        ensure!(
            tries < n * 400,
            "`{}`: only {found} inputs met the precondition",
            info.name
        );
        let mut assign = HashMap::new();
        let mut args = Vec::new();
        let mut ok = true;
        for (i, (_, t)) in params.iter().enumerate() {
            let v = random_value(rng, t.base_type().unwrap());
            assign.insert(info.params[i].clone(), v.clone());
            args.push(v);
            if let Some((b, p)) = t.pred() {
                let p = p.rename(b, &info.params[i]);
                if !holds(&p, &assign, &ev).map_err(|e| format!("{}: {e}", info.name))? {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        found += 1;
        let out = ev
            .call(&info.name, args.clone())
            .map_err(|e| format!("{} {args:?}: {e}", info.name))?;
        let (b, post) = res.pred().unwrap();
        let mut a = assign.clone();
        a.insert(b.to_string(), out.clone());
        ensure!(
            holds(post, &a, &ev).map_err(|e| e.to_string())?,
            "`{}` on {args:?} returned {out}, violating `{post}`",
            info.name
        );
    }
    Ok(found)
}

pub fn c5_evaluator_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut s = solver();
    let mut fns = Vec::new();
    for (name, src) in corpus_files() {
        let Ok(prog) = parse_program(&src) else { continue };
        let r = check_program(&prog, &CheckOptions::default(), &mut s);
        if !r.accepted() {
            continue;
        }
        for info in r.decls.values().filter(|i| intrinsic(i)) {
            oracle(&prog, info, 500, &mut rng).map_err(|e| format!("{name}: {e}"))?;
            fns.push(info.name.clone());
        }
    }
    ensure!(fns.len() >= 5, "too few specified functions: {fns:?}");
    Ok(format!("{} functions x 500 inputs: {}", fns.len(), fns.join(", ")))
}

pub fn lit(xs: &[i64]) -> Pred {
    xs.iter().rev().fold(Pred::Nil, |t, &h| Pred::cons(Pred::Int(h), t))
}

pub fn small_lists() -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..3 {
        let mut next = Vec::new();
        for l in &frontier {
            for b in [0, 1] {
                let mut m: Vec<i64> = l.clone();
                m.push(b);
                next.push(m);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn c6_brute_force() -> Outcome {
    let prog = parse_program(&corpus("list_length.lqh")).unwrap();
    let table = generate(&prog).table;
    let env = Env::new();
    let cx = SimplifyCtx {
        env: &env,
        table: &table,
        extra: vec![],
        value: None,
        fuel: 10,
    };
    let lists = small_lists();
    for l in &lists {
        let vals = Value::List(l.iter().map(|&n| Value::Int(n)).collect());
        for f in ["len", "listLength"] {
            let got = normalize(&expand(&Pred::app(f, vec![lit(l)]), &cx), None);
            let want = if f == "len" {
                l.len() as i64
            } else {
                match evaluate(&prog, f, vec![vals.clone()]).map_err(|e| e.to_string())? {
                    Value::Int(n) => n,
                    v => return Err(format!("listLength returned {v}")),
                }
            };
            ensure!(
                got == Pred::Int(want),
                "{f} {l:?}: unfolding gives `{got}`, evaluation {want}"
            );
        }
    }
    let mut s = solver();
    let mut cases = 0;
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let mut env = Env::new();
                for (x, r) in [("x", a), ("y", b)] {
                    let t = RType::refined(
                        BaseType::Int,
                        x,
                        Pred::eq(Pred::bin(BinOp::Mod, Pred::var(x), Pred::Int(2)), Pred::Int(r)),
                    );
                    env.bind(x, &t, t.clone(), BinderKind::Param).unwrap();
                }
                let goal = Pred::eq(
                    Pred::bin(BinOp::Mod, Pred::add(Pred::var("x"), Pred::var("y")), Pred::Int(2)),
                    Pred::Int(c),
                );
                let brute = (-20i64..=20)
                    .flat_map(|x| (-20i64..=20).map(move |y| (x, y)))
                    .filter(|(x, y)| x.rem_euclid(2) == a && y.rem_euclid(2) == b)
                    .all(|(x, y)| (x + y).rem_euclid(2) == c);
                let v = prove(&env, &[], &[], &goal, &table, 2, &mut s).map_err(|e| e.to_string())?;
                ensure!(
                    v.is_valid() == brute,
                    "residues ({a},{b}) -> {c}: solver {v:?}, brute force {brute}"
                );
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{} lists x 2 functions agree; {cases} parity verdicts agree",
        lists.len()
    ))
}

pub fn c7_round_trip() -> Outcome {
    let mut n = 0;
    for (name, src) in corpus_files() {
        let p = parse_program(&src).map_err(|e| format!("{name}: {e:?}"))?;
        let printed = print_program(&p);
        let q = parse_program(&printed).map_err(|e| format!("{name} reprint: {e:?}\n{printed}"))?;
        ensure!(p == q, "{name}: round trip changed the program:\n{printed}");
        n += 1;
    }
    let mut rng = StdRng::seed_from_u64(7);
    for i in 0..50 {
        let p = gen::program(&mut rng);
        let printed = print_program(&p);
        let q = parse_program(&printed).map_err(|e| format!("generated #{i}: {e:?}\n{printed}"))?;
        ensure!(p == q, "generated #{i} changed:\n{printed}\n{p:#?}\n{q:#?}");
    }
    Ok(format!("{n} corpus files and 50 generated programs round-trip"))
}

pub fn c8_termination() -> Outcome {
    let prog = parse_program(&corpus("loop.lqh")).unwrap();
    let r = check_program(&prog, &CheckOptions::default(), &mut solver());
    ensure!(
        r.diagnostics
            .iter()
            .any(|d| d.code == lqh::diagnostic::Code::Termination),
        "`f xs = f xs` not rejected for termination: {:?}",
        r.diagnostics
    );
    ensure!(
        accepted("list_length_proof_done.lqh")?,
        "`listLengthProof ys` in the cons branch rejected"
    );
    Ok("`f xs = f xs` rejected; `listLengthProof ys` accepted".into())
}

pub type Criterion = (u8, &'static str, fn() -> Outcome);

pub fn criteria() -> Vec<Criterion> {
    vec![
        (1, "odd/even corpus", c1_section2_corpus as fn() -> Outcome),
        (2, "intrinsic hole goals", c2_intrinsic_goals),
        (3, "extrinsic proof transcript", c3_extrinsic_script),
        (4, "simplifier soundness", c4_simplifier_soundness),
        (5, "evaluator oracle", c5_evaluator_oracle),
        (6, "brute-force agreement", c6_brute_force),
        (7, "parser round trip", c7_round_trip),
        (8, "termination gate", c8_termination),
    ]
}
