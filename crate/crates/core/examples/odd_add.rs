//! Checks `oddAdd` and its mutant, printing each obligation's verdict.

use lqh::checker::{check_program, CheckOptions};
use lqh::smt::{Solver, SolverConfig};
use lqh::surface::parse_program;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut solver = Solver::new(&SolverConfig::default())?;
    for (name, src) in [
        ("odd_add", include_str!("../corpus/odd_add.lqh")),
        ("odd_add_bad", include_str!("../corpus/odd_add_bad.lqh")),
    ] {
        let prog = parse_program(src).map_err(|d| format!("{d:?}"))?;
        let r = check_program(&prog, &CheckOptions::default(), &mut solver);
        println!("{name}: {}", if r.accepted() { "accepted" } else { "rejected" });
        for vc in &r.vcs {
            println!("  {} : {:?}", vc.goal, vc.status);
        }
        for d in &r.diagnostics {
            println!("  {}", d.locate(name, src));
        }
    }
    Ok(())
}
