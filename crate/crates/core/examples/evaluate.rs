//! Runs corpus functions with the reference evaluator.

use lqh::surface::{evaluate, parse_program, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let list = |xs: &[i64]| Value::List(xs.iter().map(|&n| Value::Int(n)).collect());
    let append = parse_program(include_str!("../corpus/append.lqh")).map_err(|d| format!("{d:?}"))?;
    let r = evaluate(&append, "append", vec![list(&[1, 2]), list(&[3])])?;
    println!("append [1,2] [3] = {r}");
    let abs = parse_program(include_str!("../corpus/abs.lqh")).map_err(|d| format!("{d:?}"))?;
    for n in [-7, 0, 5] {
        println!("abs {n} = {}", evaluate(&abs, "abs", vec![Value::Int(n)])?);
    }
    let proof = parse_program(include_str!("../corpus/list_length_proof_done.lqh")).map_err(|d| format!("{d:?}"))?;
    println!(
        "listLengthProof [1,2,3] = {}",
        evaluate(&proof, "listLengthProof", vec![list(&[1, 2, 3])])?
    );
    Ok(())
}
