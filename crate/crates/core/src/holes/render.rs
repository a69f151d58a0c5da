use super::actions::{ActionKind, EditAction};
use super::goal::HoleGoal;

pub const INDENT: &str = "       ";

/// Header line naming the hole and its raw goal.
pub fn header(goal: &HoleGoal) -> String {
    format!("Found hole `{}' of type `{}'.", goal.name, goal.raw)
}

/// The diagnostic text for a hole: header, then one indented paragraph per
/// suggestion. Induction fills are offered as actions only.
pub fn message_block(goal: &HoleGoal, actions: &[EditAction]) -> String {
    let mut out = header(goal);
    for a in actions {
        if matches!(a.kind, ActionKind::FillExpr { .. }) {
            continue;
        }
        out.push('\n');
        out.push_str(INDENT);
        out.push_str(&a.message);
    }
    out
}
