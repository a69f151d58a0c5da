//! Completes `listLengthProof` from a single hole by following the tool's
//! suggestions: split, fill `()`, then the inductive call.

use lqh::holes::ActionKind;
use lqh::session::{Analysis, Config, Session};

fn show(a: &Analysis) {
    println!("{}", a.source);
    for h in &a.holes {
        println!("{}\n", h.message);
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut s = Session::new(Config::default())?;
    let src = include_str!("../corpus/list_length_proof.lqh");
    show(&s.analyze(src));

    let split = s.split(src, "_0", None, false)?;
    println!("--- after case split");
    show(&split.analysis);

    let unit = s.fill_unit(&split.source, "_0")?;
    let hint = unit.analysis.holes[0]
        .actions
        .iter()
        .find_map(|r| match &r.action.kind {
            ActionKind::FillExpr { text } => Some(text.clone()),
            _ => None,
        })
        .ok_or("no inductive hint")?;
    let hole = unit.analysis.holes[0].site.name.clone();
    let done = s.fill(&unit.source, &hole, &hint)?;
    println!("--- after `()` and `{hint}`");
    show(&done.analysis);
    println!("accepted: {}", done.analysis.accepted());
    Ok(())
}
