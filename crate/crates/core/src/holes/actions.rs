use std::collections::BTreeMap;

use super::goal::{try_unit, GoalKind, HoleGoal};
use crate::checker::{metric_position, termination_ok, DeclInfo};
use crate::logic::{Pred, Sort};
use crate::smt::{ReflectionTable, Solver, Verdict};
use crate::surface::{Expr, HoleSite, PatKind, Program};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionKind {
    FillUnit,
    CaseSplit { var: String, function: String },
    FillExpr { text: String },
    UnfoldView { expanded: Pred, simplified: Pred },
}

impl ActionKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ActionKind::FillUnit => "fill_unit",
            ActionKind::CaseSplit { .. } => "split",
            ActionKind::FillExpr { .. } => "fill_expr",
            ActionKind::UnfoldView { .. } => "unfold_view",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditAction {
    pub hole: String,
    pub kind: ActionKind,
    pub message: String,
    /// For FillUnit, the verdict that licenses it.
    pub certificate: Option<Verdict>,
}

/// Parameters of the hole's clause that a split could still refine: list
/// parameters bound by a variable pattern, or not yet bound at all.
pub fn splittable(prog: &Program, decls: &BTreeMap<String, DeclInfo>, site: &HoleSite) -> Vec<String> {
    let (Some(decl), Some(info)) = (prog.decl(&site.decl), decls.get(&site.decl)) else {
        return vec![];
    };
    let clause = &decl.clauses[site.clause];
    let (params, _) = info.resolved.split_params();
    let is_list = |i: usize| {
        params
            .get(i)
            .and_then(|(_, t)| t.base_type())
            .and_then(|b| b.sort())
            .is_some_and(|s| matches!(s, Sort::List(_)))
    };
    let mut out = Vec::new();
    for i in 0..params.len() {
        match clause.pats.get(i).map(|p| &p.kind) {
            Some(PatKind::Var(x)) if is_list(i) => out.push(x.clone()),
            None if is_list(i) => out.push(info.params[i].clone()),
            _ => {}
        }
    }
    out
}

/// A function in `p` defined by matching on an argument that is one of `vars`.
fn split_candidate(p: &Pred, vars: &[String], table: &ReflectionTable) -> Option<(String, String)> {
    let apps = p.apps();
    let mut fallback = None;
    for a in apps {
        let Pred::App(f, args) = a else { continue };
        for (i, arg) in args.iter().enumerate() {
            let Pred::Var(x) = arg else { continue };
            if vars.contains(x) && table.matches_on(f, i) {
                if f != "len" {
                    return Some((x.clone(), f.clone()));
                }
                fallback.get_or_insert((x.clone(), f.clone()));
            }
        }
    }
    fallback
}

/// `declName t` when the simplified goal is the theorem itself at the tail `t`
/// of the matched metric parameter.
pub fn suggest_induction(
    goal: &HoleGoal,
    prog: &Program,
    decls: &BTreeMap<String, DeclInfo>,
    site: &HoleSite,
) -> Option<String> {
    if goal.kind != GoalKind::Proof {
        return None;
    }
    let decl = prog.decl(&site.decl)?;
    let info = decls.get(&site.decl)?;
    let clause = &decl.clauses[site.clause];
    let (params, result) = info.resolved.split_params();
    if !matches!(result.base_type().and_then(|b| b.sort()), Some(Sort::Unit)) {
        return None;
    }
    let (_, stmt) = result.pred()?;
    let m = metric_position(&info.resolved)?;
    if clause.pats.len() != params.len() {
        return None;
    }
    let tail = match &clause.pats[m].kind {
        PatKind::Cons(_, t) if t != "_" => t.clone(),
        _ => return None,
    };
    let mut args = Vec::new();
    for (i, p) in clause.pats.iter().enumerate() {
        let a = if i == m {
            tail.clone()
        } else {
            match &p.kind {
                PatKind::Var(x) => x.clone(),
                _ => info.params[i].clone(),
            }
        };
        if !goal.capture.env.contains(&a) {
            return None;
        }
        args.push(a);
    }
    let map = info.params.iter().cloned().zip(args.iter().map(Pred::var)).collect();
    let instance = stmt.subst(&map);
    let target = goal.simplified_pred()?;
    if !instance.equiv_modulo_symmetry(target) {
        return None;
    }
    let terms: Vec<Pred> = args.iter().map(Pred::var).collect();
    termination_ok(&decl.name, &info.resolved, clause, &terms, site.span).ok()?;
    let mut text = decl.name.clone();
    for a in &args {
        let e = Expr::from_pred(&Pred::var(a));
        text.push(' ');
        text.push_str(&e.to_string());
    }
    Some(text)
}

pub struct ActionCtx<'a> {
    pub prog: &'a Program,
    pub decls: &'a BTreeMap<String, DeclInfo>,
    pub table: &'a ReflectionTable,
    pub fuel: usize,
}

/// Applicable actions, in the order FillUnit, CaseSplit, FillExpr, UnfoldView.
pub fn enumerate_actions(
    cx: &ActionCtx<'_>,
    goal: &HoleGoal,
    site: &HoleSite,
    solver: Option<&mut Solver>,
) -> Vec<EditAction> {
    let mut out = Vec::new();
    let act = |kind: ActionKind, message: String, certificate: Option<Verdict>| EditAction {
        hole: goal.name.clone(),
        kind,
        message,
        certificate,
    };
    let mut unit_ok = false;
    if let Some(s) = solver {
        if let Some(v) = try_unit(goal, cx.table, cx.fuel, s) {
            if v.is_valid() {
                unit_ok = true;
                out.push(act(
                    ActionKind::FillUnit,
                    "This can be completed with `()'.".into(),
                    Some(v),
                ));
            }
        }
    }
    if site.at_root() && !unit_ok {
        let vars = splittable(cx.prog, cx.decls, site);
        let stmt = match goal.kind {
            GoalKind::Function => goal.raw.split_params().1.pred().map(|(_, p)| p.clone()),
            _ => goal.statement.clone(),
        };
        if let Some((var, function)) = stmt.and_then(|p| split_candidate(&p, &vars, cx.table)) {
            let message = format!("Consider a case split as in the body of `{function}'.");
            out.push(act(ActionKind::CaseSplit { var, function }, message, None));
        }
    }
    if let Some(text) = suggest_induction(goal, cx.prog, cx.decls, site) {
        let message = format!("Replace `{}' with `{text}' (the inductive assumption).", goal.name);
        out.push(act(ActionKind::FillExpr { text }, message, None));
    }
    if let (Some(expanded), false) = (&goal.expansion, unit_ok) {
        let simplified = goal.simplified_pred().cloned().unwrap_or(Pred::Bool(true));
        let message = format!("Conclusion expands to `{expanded}',\n       which is simplified to `{simplified}`.");
        out.push(act(
            ActionKind::UnfoldView {
                expanded: expanded.clone(),
                simplified,
            },
            message,
            None,
        ));
    }
    out
}
