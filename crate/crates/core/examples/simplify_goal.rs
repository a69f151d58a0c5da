//! Runs the goal simplifier on a predicate under a matched-list context and
//! prints each rewrite.

use lqh::checker::{branch_facts, generate};
use lqh::logic::{BaseType, BinderKind, Env, RType, Sort};
use lqh::smt::{simplify, SimplifyCtx, Solver, SolverConfig};
use lqh::surface::{parse_pred, parse_program, PatKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prog = parse_program(include_str!("../corpus/list_length.lqh")).map_err(|d| format!("{d:?}"))?;
    let table = generate(&prog).table;
    let goal = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "2 + v == listLength xs + 1".into());
    let p = parse_pred(&goal)?;

    let list = RType::base(BaseType::list(BaseType::TyVar("a".into())));
    let elem = RType::base(BaseType::TyVar("a".into()));
    let mut env = Env::new();
    env.bind("xs", &list, list.clone(), BinderKind::Param)?;
    env.bind("y", &elem, elem.clone(), BinderKind::Pattern)?;
    env.bind("ys", &list, list.clone(), BinderKind::Pattern)?;
    for f in branch_facts("xs", &PatKind::Cons("y".into(), "ys".into())) {
        env.add_fact(f);
    }
    let cx = SimplifyCtx {
        env: &env,
        table: &table,
        extra: vec![("v".into(), Sort::Int)],
        value: Some("v".into()),
        fuel: 8,
    };
    let mut solver = Solver::new(&SolverConfig::default())?;
    let (q, trace) = simplify(&p, &cx, Some(&mut solver));
    println!("context: xs == (y:ys)");
    println!("goal:    {p}");
    for st in &trace {
        println!("  {:?}: {}  ~>  {}", st.rule, st.before, st.after);
    }
    println!("result:  {q}");
    Ok(())
}
