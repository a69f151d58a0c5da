//! Reflection, unfolding, SMT-LIB encoding, the solver client and the
//! goal simplifier.

pub mod encode;
pub mod model;
pub mod reflect;
pub mod simplify;
pub mod solver;
pub mod unfold;

pub use encode::{encode_query, EncodeError, Encoded, Query};
pub use model::Model;
pub use reflect::{Equation, Reflected, ReflectionTable};
pub use simplify::{expand, simplify, Rule, SimplifyCtx, Trace, TraceStep};
pub use solver::{BackendMode, Response, SharedCache, SmtError, Solver, SolverConfig, SolverError, Status, Verdict};

use crate::logic::{Env, Pred, Sort};

/// Builds the query `env ∧ hyps ∧ instances ⇒ goal`, where the instances
/// come from `fuel` rounds of unfolding the applications in sight.
pub fn obligation(
    env: &Env,
    extra: &[(String, Sort)],
    hyps: &[Pred],
    goal: &Pred,
    table: &ReflectionTable,
    fuel: usize,
) -> Query {
    let mut env = env.clone();
    for h in hyps {
        env.add_fact(h.clone());
    }
    let ante = env.antecedent();
    let mut vars: std::collections::BTreeMap<String, Sort> =
        env.binders().iter().map(|b| (b.name.clone(), b.sort.clone())).collect();
    for (x, s) in extra {
        vars.entry(x.clone()).or_insert_with(|| s.clone());
    }
    let mut all = vec![ante.clone()];
    all.extend(unfold::instantiate(&[ante, goal.clone()], &env, table, fuel));
    all.retain(|p| !p.is_true());
    Query {
        vars,
        hyps: all,
        goal: goal.clone(),
    }
}

pub fn prove(
    env: &Env,
    extra: &[(String, Sort)],
    hyps: &[Pred],
    goal: &Pred,
    table: &ReflectionTable,
    fuel: usize,
    solver: &mut Solver,
) -> Result<Verdict, SmtError> {
    if goal.is_true() {
        return Ok(Verdict::Valid);
    }
    let q = obligation(env, extra, hyps, goal, table, fuel);
    solver.check(&q, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{BaseType, BinderKind, RType};
    use crate::surface::parse_pred;

    fn odd_env() -> Env {
        let mut env = Env::new();
        for x in ["x", "y"] {
            let t = RType::refined(BaseType::Int, x, parse_pred(&format!("{x} mod 2 == 1")).unwrap());
            env.bind(x, &t, t.clone(), BinderKind::Param).unwrap();
        }
        env
    }

    #[test]
    fn odd_plus_odd_with_z3() {
        let Ok(mut s) = Solver::new(&SolverConfig::default()) else {
            return;
        };
        if s.probe().is_err() {
            return;
        }
        let env = odd_env();
        let table = ReflectionTable::default();
        let extra = [("v".to_string(), Sort::Int)];
        let hyp = [parse_pred("v == x + y").unwrap()];
        let even = parse_pred("v mod 2 == 0").unwrap();
        let odd = parse_pred("v mod 2 == 1").unwrap();
        assert_eq!(
            prove(&env, &extra, &hyp, &even, &table, 2, &mut s).unwrap(),
            Verdict::Valid
        );
        match prove(&env, &extra, &hyp, &odd, &table, 2, &mut s).unwrap() {
            Verdict::Invalid(Some(m)) => {
                let (x, y) = (m["x"].clone(), m["y"].clone());
                assert!(
                    matches!((x, y), (crate::surface::Value::Int(a), crate::surface::Value::Int(b)) if a.rem_euclid(2) == 1 && b.rem_euclid(2) == 1)
                );
            }
            other => panic!("{other:?}"),
        }
    }
}
