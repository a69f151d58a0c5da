//! The structural termination check on a looping and a decreasing call.

use lqh::checker::{check_program, CheckOptions};
use lqh::smt::{Solver, SolverConfig};
use lqh::surface::parse_program;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut solver = Solver::new(&SolverConfig::default())?;
    for (name, src) in [
        ("loop", include_str!("../corpus/loop.lqh")),
        ("listLengthProof", include_str!("../corpus/list_length_proof_done.lqh")),
    ] {
        let prog = parse_program(src).map_err(|d| format!("{d:?}"))?;
        let r = check_program(&prog, &CheckOptions::default(), &mut solver);
        println!("{name}: {}", if r.accepted() { "accepted" } else { "rejected" });
        for d in &r.diagnostics {
            println!("  {d}");
        }
    }
    Ok(())
}
