//! Typed holes: goals, suggested actions and source edits.

pub mod actions;
pub mod edit;
pub mod goal;
pub mod render;

pub use actions::{enumerate_actions, splittable, suggest_induction, ActionCtx, ActionKind, EditAction};
pub use edit::{apply_edit, case_split, fill, Branch, Edit, EditError, Replacement};
pub use goal::{hole_goal, try_unit, GoalKind, HoleGoal};
pub use render::{header, message_block};
