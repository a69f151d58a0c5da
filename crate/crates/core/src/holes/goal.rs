use crate::checker::HoleCapture;
use crate::logic::{fresh_name, BaseType, Pred, RType, Sort};
use crate::smt::{expand, prove, simplify, ReflectionTable, SimplifyCtx, Solver, Trace, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoalKind {
    /// A whole function is missing (`f = _0`).
    Function,
    /// A `Proof`/unit-valued hole: its refinement is a proposition.
    Proof,
    Value,
}

/// What a hole must inhabit, as shown to the user.
#[derive(Debug, Clone)]
pub struct HoleGoal {
    pub name: String,
    pub kind: GoalKind,
    /// Displayed binders: name and type as written.
    pub env: Vec<(String, RType)>,
    pub facts: Vec<Pred>,
    pub raw: RType,
    pub simplified: RType,
    /// The proposition being simplified (for Proof goals, without the
    /// pattern facts shown in `raw`).
    pub statement: Option<Pred>,
    /// Unfolding-only view of `statement`, when it differs.
    pub expansion: Option<Pred>,
    pub trace: Trace,
    /// Displayed value binder (`v`, or `_` for Proof goals).
    pub value: String,
    pub capture: HoleCapture,
}

impl HoleGoal {
    pub fn simplified_pred(&self) -> Option<&Pred> {
        self.simplified.pred().map(|(_, p)| p)
    }
}

fn is_proof(t: &RType) -> bool {
    match t.base_type() {
        Some(BaseType::Unit) => true,
        Some(BaseType::Alias(a)) => a == "Proof",
        _ => false,
    }
}

/// Computes raw and simplified goals. Without a solver, simplification
/// skips the entailment-based rule.
pub fn hole_goal(cap: &HoleCapture, table: &ReflectionTable, fuel: usize, solver: Option<&mut Solver>) -> HoleGoal {
    let env: Vec<(String, RType)> = cap
        .env
        .binders()
        .iter()
        .filter(|b| b.kind.displayed())
        .map(|b| (b.name.clone(), b.shown.clone()))
        .collect();
    let facts = cap.env.facts().to_vec();
    let mut goal = HoleGoal {
        name: cap.name.clone(),
        kind: GoalKind::Function,
        env,
        facts,
        raw: cap.shown.clone(),
        simplified: cap.shown.clone(),
        statement: None,
        expansion: None,
        trace: Vec::new(),
        value: String::new(),
        capture: cap.clone(),
    };
    if cap.shown.is_fun() {
        return goal;
    }
    let proof = is_proof(&cap.shown) || is_proof(&cap.expected);
    goal.kind = if proof { GoalKind::Proof } else { GoalKind::Value };
    let base = cap.shown.base_type().cloned().unwrap_or(BaseType::Int);
    let sort = cap.expected.base_type().and_then(|b| b.sort()).unwrap_or(Sort::Any);
    let value = if proof {
        "_".to_string()
    } else {
        fresh_name("v", &cap.env.names())
    };
    let stmt = match cap.shown.pred() {
        Some((b, p)) => p.rename(b, &value),
        None => Pred::Bool(true),
    };
    let (raw_pred, stmt) = if proof {
        let shown = Pred::and_all(cap.matched.iter().cloned().chain([stmt.clone()]));
        (shown, stmt)
    } else {
        let subst: std::collections::HashMap<String, Pred> =
            cap.subst.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let s = stmt.subst(&subst);
        (s.clone(), s)
    };
    let cx = SimplifyCtx {
        env: &cap.env,
        table,
        extra: vec![(value.clone(), sort)],
        value: (!proof).then(|| value.clone()),
        fuel,
    };
    let (simp, trace) = simplify(&stmt, &cx, solver);
    let expanded = expand(&stmt, &cx);
    goal.raw = RType::refined(base.clone(), &value, raw_pred);
    goal.simplified = RType::refined(base, &value, simp);
    goal.expansion = (expanded != stmt).then_some(expanded);
    goal.statement = Some(stmt);
    goal.trace = trace;
    goal.value = value;
    goal
}

/// Whether `()` inhabits a Proof goal: `None` when the goal is not unit-valued.
pub fn try_unit(goal: &HoleGoal, table: &ReflectionTable, fuel: usize, solver: &mut Solver) -> Option<Verdict> {
    if goal.kind != GoalKind::Proof {
        return None;
    }
    let cap = &goal.capture;
    let p = match cap.expected.pred() {
        Some((b, p)) => p.subst1(b, &Pred::Unit),
        None => return Some(Verdict::Valid),
    };
    Some(prove(&cap.env, &[], &[], &p, table, fuel, solver).unwrap_or_else(|e| Verdict::Unknown(e.to_string())))
}
