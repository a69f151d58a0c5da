//! One-shot operations over source text: analyze, split, fill.

use thiserror::Error;

use crate::checker::{check_program, CheckOptions, CheckResult, DEFAULT_FUEL};
use crate::diagnostic::{Code, Diagnostic};
use crate::holes::{
    apply_edit, case_split, enumerate_actions, fill, hole_goal, message_block, try_unit, ActionCtx, ActionKind, Branch,
    Edit, EditAction, EditError, HoleGoal,
};
use crate::smt::{SharedCache, Solver, SolverConfig, SolverError};
use crate::surface::{holes_of, parse_program, HoleSite, Program};

#[derive(Debug, Clone)]
pub struct Config {
    pub solver: SolverConfig,
    pub fuel: usize,
    /// Probe whether `()` closes each Proof hole while enumerating actions.
    pub probe_unit: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            solver: SolverConfig::default(),
            fuel: DEFAULT_FUEL,
            probe_unit: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportedAction {
    pub action: EditAction,
    /// Text the action would insert, if it changes the source.
    pub preview: Option<String>,
}

#[derive(Debug, Clone)]
pub struct HoleReport {
    pub site: HoleSite,
    pub goal: HoleGoal,
    pub actions: Vec<ReportedAction>,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub source: String,
    pub program: Option<Program>,
    pub check: Option<CheckResult>,
    pub parse_errors: Vec<Diagnostic>,
    pub holes: Vec<HoleReport>,
}

impl Analysis {
    /// Parse and check diagnostics; with `with_holes`, each hole is an
    /// additional HOLE error carrying its message.
    pub fn diagnostics(&self, with_holes: bool) -> Vec<Diagnostic> {
        let mut out = self.parse_errors.clone();
        if let Some(c) = &self.check {
            out.extend(c.diagnostics.iter().cloned());
            if let Some(f) = &c.solver_failure {
                out.push(Diagnostic::error(Code::UnknownVc, None, format!("solver failure: {f}")));
            }
        }
        if with_holes {
            out.extend(
                self.holes
                    .iter()
                    .map(|h| Diagnostic::error(Code::Hole, h.site.span, h.message.clone())),
            );
        }
        out.sort_by_key(|d| d.span.map_or(0, |s| s.start));
        out
    }

    pub fn accepted(&self) -> bool {
        self.parse_errors.is_empty() && self.check.as_ref().is_some_and(|c| c.accepted())
    }

    pub fn solver_failure(&self) -> Option<&str> {
        self.check.as_ref().and_then(|c| c.solver_failure.as_deref())
    }

    pub fn hole(&self, id: &str) -> Option<&HoleReport> {
        self.holes.iter().find(|h| h.site.name == id)
    }
}

#[derive(Debug, Clone, Error)]
pub enum OpError {
    #[error("source does not parse")]
    Parse(Vec<Diagnostic>),
    #[error("no hole named `{0}`")]
    UnknownHole(String),
    #[error("{0}")]
    NotApplicable(String),
    #[error("{0}")]
    BadExpr(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl From<EditError> for OpError {
    fn from(e: EditError) -> Self {
        match e {
            EditError::UnknownHole(h) => OpError::UnknownHole(h),
            EditError::BadExpr { .. } => OpError::BadExpr(e.to_string()),
            other => OpError::NotApplicable(other.to_string()),
        }
    }
}

impl From<SolverError> for OpError {
    fn from(e: SolverError) -> Self {
        OpError::Solver(e.to_string())
    }
}

/// Result of an edit: the edit, the new text, and a fresh analysis of it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub edit: Edit,
    pub source: String,
    pub analysis: Analysis,
}

pub struct Session {
    pub config: Config,
    solver: Solver,
}

impl Session {
    pub fn new(config: Config) -> Result<Session, SolverError> {
        Self::with_cache(config, SharedCache::default())
    }

    pub fn with_cache(config: Config, cache: SharedCache) -> Result<Session, SolverError> {
        let solver = Solver::with_cache(&config.solver, cache)?;
        Ok(Session { config, solver })
    }

    pub fn solver(&mut self) -> &mut Solver {
        &mut self.solver
    }

    fn opts(&self) -> CheckOptions {
        CheckOptions { fuel: self.config.fuel }
    }

    pub fn analyze(&mut self, source: &str) -> Analysis {
        let prog = match parse_program(source) {
            Ok(p) => p,
            Err(parse_errors) => {
                return Analysis {
                    source: source.to_string(),
                    program: None,
                    check: None,
                    parse_errors,
                    holes: vec![],
                }
            }
        };
        let opts = self.opts();
        let check = check_program(&prog, &opts, &mut self.solver);
        let mut holes = Vec::new();
        if check.solver_failure.is_none() {
            let cx = ActionCtx {
                prog: &prog,
                decls: &check.decls,
                table: &check.table,
                fuel: opts.fuel,
            };
            for site in holes_of(&prog) {
                let Some(cap) = check.capture(&site.name) else { continue };
                let goal = hole_goal(cap, &check.table, opts.fuel, Some(&mut self.solver));
                let probe = self.config.probe_unit.then_some(&mut self.solver);
                let actions = enumerate_actions(&cx, &goal, &site, probe);
                let message = message_block(&goal, &actions);
                let actions = actions
                    .into_iter()
                    .map(|a| {
                        let preview = preview(source, &prog, &check, &a);
                        ReportedAction { action: a, preview }
                    })
                    .collect();
                holes.push(HoleReport {
                    site,
                    goal,
                    actions,
                    message,
                });
            }
        }
        Analysis {
            source: source.to_string(),
            program: Some(prog),
            check: Some(check),
            parse_errors: vec![],
            holes,
        }
    }

    /// Analysis of a program that parsed and whose solver ran.
    fn analyze_ok(&mut self, source: &str) -> Result<Analysis, OpError> {
        let a = self.analyze(source);
        if !a.parse_errors.is_empty() {
            return Err(OpError::Parse(a.parse_errors));
        }
        if let Some(f) = a.solver_failure() {
            return Err(OpError::Solver(f.to_string()));
        }
        Ok(a)
    }

    fn finish(&mut self, source: &str, edit: Edit) -> Result<Outcome, OpError> {
        let new = apply_edit(source, &edit)?;
        let analysis = self.analyze(&new);
        if let Some(f) = analysis.solver_failure() {
            return Err(OpError::Solver(f.to_string()));
        }
        Ok(Outcome {
            edit,
            source: new,
            analysis,
        })
    }

    /// Splits the clause whose body is `hole`. Without `var`, uses the
    /// variable the hole's case-split suggestion names. With `auto_unit`,
    /// branches that `()` provably completes get `()` instead of a hole.
    pub fn split(&mut self, source: &str, hole: &str, var: Option<&str>, auto_unit: bool) -> Result<Outcome, OpError> {
        let a = self.analyze_ok(source)?;
        let prog = a.program.as_ref().expect("parsed");
        let check = a.check.as_ref().expect("checked");
        if prog.hole(hole).is_none() {
            return Err(OpError::UnknownHole(hole.into()));
        }
        let var = match var {
            Some(v) => v.to_string(),
            None => a
                .hole(hole)
                .and_then(|h| {
                    h.actions.iter().find_map(|r| match &r.action.kind {
                        ActionKind::CaseSplit { var, .. } => Some(var.clone()),
                        _ => None,
                    })
                })
                .ok_or_else(|| OpError::NotApplicable(format!("no case split is suggested for `{hole}`")))?,
        };
        let mut edit = case_split(source, prog, &check.decls, hole, &var, [Branch::Hole; 2])?;
        if auto_unit {
            let trial = self.analyze_ok(&apply_edit(source, &edit)?)?;
            let tcheck = trial.check.as_ref().expect("checked");
            let mut fills = [Branch::Hole; 2];
            for (slot, name) in fills.iter_mut().zip(&edit.created) {
                let Some(h) = trial.hole(name) else { continue };
                if try_unit(&h.goal, &tcheck.table, self.config.fuel, &mut self.solver).is_some_and(|v| v.is_valid()) {
                    *slot = Branch::Unit;
                }
            }
            if fills != [Branch::Hole; 2] {
                edit = case_split(source, prog, &check.decls, hole, &var, fills)?;
            }
        }
        self.finish(source, edit)
    }

    /// Replaces `hole` by the expression `text`, then rechecks.
    pub fn fill(&mut self, source: &str, hole: &str, text: &str) -> Result<Outcome, OpError> {
        let prog = parse_program(source).map_err(OpError::Parse)?;
        let edit = fill(source, &prog, hole, text)?;
        self.finish(source, edit)
    }

    /// Fills `hole` with `()` if the solver certifies that this closes it.
    pub fn fill_unit(&mut self, source: &str, hole: &str) -> Result<Outcome, OpError> {
        let a = self.analyze_ok(source)?;
        let check = a.check.as_ref().expect("checked");
        let report = match a.hole(hole) {
            Some(r) => r,
            None if a.program.as_ref().is_some_and(|p| p.hole(hole).is_some()) => {
                return Err(OpError::NotApplicable(format!("the type of `{hole}` is unknown")))
            }
            None => return Err(OpError::UnknownHole(hole.into())),
        };
        match try_unit(&report.goal, &check.table, self.config.fuel, &mut self.solver) {
            Some(v) if v.is_valid() => self.fill(source, hole, "()"),
            Some(_) => Err(OpError::NotApplicable(format!("`()` does not complete `{hole}`"))),
            None => Err(OpError::NotApplicable(format!("`{hole}` is not a proof"))),
        }
    }
}

fn preview(source: &str, prog: &Program, check: &CheckResult, a: &EditAction) -> Option<String> {
    match &a.kind {
        ActionKind::FillUnit => Some("()".into()),
        ActionKind::FillExpr { text } => Some(text.clone()),
        ActionKind::CaseSplit { var, .. } => case_split(source, prog, &check.decls, &a.hole, var, [Branch::Hole; 2])
            .ok()
            .and_then(|e| e.replacements.first().map(|r| r.text.clone())),
        ActionKind::UnfoldView { .. } => None,
    }
}
