use crate::diagnostic::{Code, Diagnostic, Span};
use crate::logic::{Pred, RType, Sort};
use crate::surface::{Clause, PatKind};

/// Index of the decreasing argument: the first list-sorted parameter.
pub fn metric_position(sig: &RType) -> Option<usize> {
    let (params, _) = sig.split_params();
    params.iter().position(|(_, t)| {
        t.base_type()
            .and_then(|b| b.sort())
            .is_some_and(|s| matches!(s, Sort::List(_)))
    })
}

/// Accepts a recursive call `name args` made from `clause` iff the metric
/// argument is the tail bound by that clause's cons pattern.
pub fn termination_ok(name: &str, sig: &RType, clause: &Clause, args: &[Pred], span: Span) -> Result<(), Diagnostic> {
    let call = Pred::app(name, args.to_vec());
    let Some(m) = metric_position(sig) else {
        return Err(Diagnostic::error(
            Code::Termination,
            span,
            format!("recursive call `{call}`: `{name}` has no list parameter to decrease on"),
        ));
    };
    let tail = clause.pats.get(m).and_then(|p| match &p.kind {
        PatKind::Cons(_, t) if t != "_" => Some(t.as_str()),
        _ => None,
    });
    match (args.get(m), tail) {
        (Some(Pred::Var(a)), Some(t)) if a == t => Ok(()),
        (arg, _) => Err(Diagnostic::error(
            Code::Termination,
            span,
            format!(
                "recursive call `{call}` may not terminate: argument {} (`{}`) is not a strict sub-list of the matched parameter",
                m + 1,
                arg.map(|a| a.to_string()).unwrap_or_default()
            ),
        )),
    }
}
