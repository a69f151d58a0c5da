//! Prints the SMT-LIB script for an obligation and the solver's answer.

use lqh::logic::{BaseType, BinderKind, Env, RType};
use lqh::smt::{encode_query, obligation, ReflectionTable, Solver, SolverConfig};
use lqh::surface::parse_pred;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut env = Env::new();
    for x in ["x", "y"] {
        let t = RType::refined(BaseType::Int, x, parse_pred(&format!("{x} mod 2 == 1"))?);
        env.bind(x, &t, t.clone(), BinderKind::Param)?;
    }
    let table = ReflectionTable::default();
    let mut solver = Solver::new(&SolverConfig::default())?;
    for goal in ["(x + y) mod 2 == 0", "(x + y) mod 2 == 1"] {
        let q = obligation(&env, &[], &[], &parse_pred(goal)?, &table, 2);
        println!("{}", encode_query(&q, &table)?.script);
        println!("; {goal}: {:?}\n", solver.check(&q, &table)?);
    }
    Ok(())
}
