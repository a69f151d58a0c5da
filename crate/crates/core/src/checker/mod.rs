//! Bidirectional refinement checking: VC generation, pattern facts,
//! structural termination and hole capture.

pub mod facts;
pub mod infer;
pub mod termination;

use std::collections::{BTreeMap, BTreeSet};

pub use facts::branch_facts;
pub use infer::infer_signature;
pub use termination::{metric_position, termination_ok};

use crate::diagnostic::{Code, Diagnostic, Span};
use crate::logic::{well_formed, AliasTable, BaseType, BinOp, BinderKind, Env, Pred, RType, Sort};
use crate::smt::{prove, Model, ReflectionTable, SmtError, Solver, Verdict};
use crate::surface::{Clause, Decl, Expr, ExprKind, PatKind, Program};

pub const DEFAULT_FUEL: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Unfolding rounds per query, and rewrite budget for simplification.
    pub fuel: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { fuel: DEFAULT_FUEL }
    }
}

/// A declaration's signature after wildcard inference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclInfo {
    pub name: String,
    /// As written, with `_` parameter types filled in.
    pub shown: RType,
    /// Alias-free.
    pub resolved: RType,
    /// Logic name for each parameter (`x1`, `x2`, ... when unnamed).
    pub params: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VcStatus {
    Pending,
    Valid,
    Invalid(Option<Model>),
    Unknown(String),
    /// Depends on the value of a hole.
    Skipped,
    /// Could not be encoded or sent to the solver.
    Failed(String),
}

/// Obligation `env ⇒ goal`.
#[derive(Debug, Clone)]
pub struct Vc {
    pub id: usize,
    pub env: Env,
    pub goal: Pred,
    pub span: Span,
    pub blame: String,
    pub decl: String,
    pub status: VcStatus,
}

#[derive(Debug, Clone)]
pub struct HoleCapture {
    pub name: String,
    pub span: Span,
    pub decl: String,
    pub clause: usize,
    pub env: Env,
    /// Expected type with aliases expanded; its value binder stands for the hole.
    pub expected: RType,
    /// The same goal as written, aliases intact.
    pub shown: RType,
    /// Equalities `x == ctor` the clause's patterns establish.
    pub matched: Vec<Pred>,
    pub subst: BTreeMap<String, Pred>,
    /// Binder standing for the hole in later obligations.
    pub var: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct CheckResult {
    pub vcs: Vec<Vc>,
    pub captures: Vec<HoleCapture>,
    pub diagnostics: Vec<Diagnostic>,
    pub table: ReflectionTable,
    pub decls: BTreeMap<String, DeclInfo>,
    /// Set when the solver process itself failed.
    pub solver_failure: Option<String>,
}

impl CheckResult {
    /// Every obligation valid and no holes left.
    pub fn accepted(&self) -> bool {
        self.diagnostics.is_empty() && self.captures.is_empty() && self.solver_failure.is_none()
    }

    pub fn capture(&self, name: &str) -> Option<&HoleCapture> {
        self.captures.iter().find(|c| c.name == name)
    }

    /// Obligations actually sent to the solver.
    pub fn nontrivial_vcs(&self) -> usize {
        self.vcs.iter().filter(|v| v.status != VcStatus::Skipped).count()
    }
}

pub fn check_program(prog: &Program, opts: &CheckOptions, solver: &mut Solver) -> CheckResult {
    let mut r = generate(prog);
    solve(&mut r, opts, solver);
    r
}

/// Signature processing and VC generation, without solving.
pub fn generate(prog: &Program) -> CheckResult {
    let mut diags = Vec::new();
    let mut aliases = AliasTable::default();
    for a in &prog.aliases {
        if let Err(e) = aliases.insert(&a.name, a.def.clone()) {
            diags.push(Diagnostic::error(Code::Alias, a.span, e.to_string()));
        }
    }
    for (name, e) in aliases.validate() {
        let span = prog.aliases.iter().find(|a| a.name == name).map(|a| a.span);
        diags.push(Diagnostic::error(Code::Alias, span, e.to_string()));
    }

    let infos = signatures(prog, &aliases, &mut diags);
    let mut sigs: BTreeMap<String, RType> = infos.iter().map(|(n, i)| (n.clone(), i.resolved.clone())).collect();
    let table = ReflectionTable::build(prog, &sigs);
    let mut bad = BTreeSet::new();
    for d in &prog.decls {
        let Some(info) = infos.get(&d.name) else { continue };
        if let Err(es) = well_formed(&info.resolved, &Env::new(), &table) {
            diags.extend(es.into_iter().map(|e| e.at(d.sig_span)));
            bad.insert(d.name.clone());
        }
    }
    let (infos, table) = if bad.is_empty() {
        (infos, table)
    } else {
        sigs.retain(|n, _| !bad.contains(n));
        let infos: BTreeMap<_, _> = infos.into_iter().filter(|(n, _)| !bad.contains(n)).collect();
        (infos, ReflectionTable::build(prog, &sigs))
    };

    let mut out = CheckResult {
        table,
        ..Default::default()
    };
    for d in &prog.decls {
        let Some(info) = infos.get(&d.name) else { continue };
        for (i, c) in d.clauses.iter().enumerate() {
            let mut g = Gen {
                table: &out.table,
                infos: &infos,
                decl: d,
                info,
                clause_idx: i,
                clause: c,
                matched: Vec::new(),
                subst: BTreeMap::new(),
                vcs: &mut out.vcs,
                captures: &mut out.captures,
                diags: &mut diags,
            };
            g.check_clause();
        }
    }
    for (i, v) in out.vcs.iter_mut().enumerate() {
        v.id = i;
    }
    out.decls = infos;
    out.diagnostics = diags;
    out
}

fn signatures(prog: &Program, aliases: &AliasTable, diags: &mut Vec<Diagnostic>) -> BTreeMap<String, DeclInfo> {
    let mut infos: BTreeMap<String, DeclInfo> = BTreeMap::new();
    let mut known: BTreeMap<String, Vec<BaseType>> = BTreeMap::new();
    let mut pending: Vec<&Decl> = Vec::new();
    for d in &prog.decls {
        if pending.iter().any(|p| p.name == d.name) {
            diags.push(Diagnostic::error(
                Code::Parse,
                d.sig_span,
                format!("`{}` is declared more than once", d.name),
            ));
            continue;
        }
        pending.push(d);
    }
    // inference may depend on later signatures, so iterate to a fixpoint
    loop {
        let mut progress = false;
        let mut failed = Vec::new();
        for d in std::mem::take(&mut pending) {
            match infer_signature(d, &known) {
                Ok(shown) => {
                    progress = true;
                    match aliases.resolve(&shown) {
                        Ok(resolved) => {
                            known.insert(
                                d.name.clone(),
                                resolved
                                    .split_params()
                                    .0
                                    .iter()
                                    .map(|(_, t)| t.base_type().cloned().unwrap_or(BaseType::Infer))
                                    .collect(),
                            );
                            let params = resolved
                                .split_params()
                                .0
                                .iter()
                                .enumerate()
                                .map(|(i, (b, _))| b.map(str::to_string).unwrap_or(format!("x{}", i + 1)))
                                .collect();
                            infos.insert(
                                d.name.clone(),
                                DeclInfo {
                                    name: d.name.clone(),
                                    shown,
                                    resolved,
                                    params,
                                },
                            );
                        }
                        Err(e) => diags.push(Diagnostic::error(Code::Alias, d.sig_span, e.to_string())),
                    }
                }
                Err(e) => failed.push((d, e)),
            }
        }
        if failed.is_empty() {
            break;
        }
        if !progress {
            diags.extend(failed.into_iter().map(|(_, e)| e));
            break;
        }
        pending = failed.into_iter().map(|(d, _)| d).collect();
    }
    infos
}

/// Sends every pending obligation to the solver.
pub fn solve(r: &mut CheckResult, opts: &CheckOptions, solver: &mut Solver) {
    let mut diags = Vec::new();
    for vc in r.vcs.iter_mut().filter(|v| v.status == VcStatus::Pending) {
        if let Some(f) = &r.solver_failure {
            vc.status = VcStatus::Failed(f.clone());
            continue;
        }
        vc.status = match prove(&vc.env, &[], &[], &vc.goal, &r.table, opts.fuel, solver) {
            Ok(Verdict::Valid) => VcStatus::Valid,
            Ok(Verdict::Invalid(m)) => {
                let mut msg = format!("{}: cannot prove `{}`", vc.blame, vc.goal);
                if let Some(m) = &m {
                    let cex: Vec<String> = vc
                        .env
                        .binders()
                        .iter()
                        .filter(|b| b.kind.displayed())
                        .filter_map(|b| m.get(&b.name).map(|v| format!("{} = {v}", b.name)))
                        .collect();
                    if !cex.is_empty() {
                        msg.push_str(&format!(" (counterexample: {})", cex.join(", ")));
                    }
                }
                diags.push(Diagnostic::error(Code::InvalidVc, vc.span, msg));
                VcStatus::Invalid(m)
            }
            Ok(Verdict::Unknown(reason)) => {
                diags.push(Diagnostic::error(
                    Code::UnknownVc,
                    vc.span,
                    format!("{}: solver could not decide `{}` ({reason})", vc.blame, vc.goal),
                ));
                VcStatus::Unknown(reason)
            }
            Err(SmtError::Encode(e)) => {
                diags.push(Diagnostic::error(
                    Code::Unsupported,
                    vc.span,
                    format!("{}: {e}", vc.blame),
                ));
                VcStatus::Failed(e.to_string())
            }
            Err(SmtError::Solver(e)) => {
                r.solver_failure = Some(e.to_string());
                VcStatus::Failed(e.to_string())
            }
        };
    }
    r.diagnostics.extend(diags);
    r.diagnostics.sort_by_key(|d| d.span.map(|s| s.start).unwrap_or(0));
}

/// Expected type in both forms.
#[derive(Debug, Clone)]
struct Expect {
    res: RType,
    shown: RType,
}

impl Expect {
    fn subst1(&self, binder: Option<&str>, term: &Pred) -> Expect {
        match binder {
            Some(b) if *term != Pred::var(b) => Expect {
                res: self.res.subst1(b, term),
                shown: self.shown.subst1(b, term),
            },
            _ => self.clone(),
        }
    }

    fn sort(&self) -> Option<Sort> {
        self.res.base_type().and_then(|b| b.sort())
    }

    fn trivial(sort: &Sort) -> Expect {
        let t = RType::base(BaseType::from_sort(sort));
        Expect {
            res: t.clone(),
            shown: t,
        }
    }
}

type R<T> = Result<T, ()>;

struct Gen<'a> {
    table: &'a ReflectionTable,
    infos: &'a BTreeMap<String, DeclInfo>,
    decl: &'a Decl,
    info: &'a DeclInfo,
    clause_idx: usize,
    clause: &'a Clause,
    matched: Vec<Pred>,
    subst: BTreeMap<String, Pred>,
    vcs: &'a mut Vec<Vc>,
    captures: &'a mut Vec<HoleCapture>,
    diags: &'a mut Vec<Diagnostic>,
}

fn split_fun(t: &RType) -> Option<(Option<&str>, &RType, &RType)> {
    match t {
        RType::Fun { binder, dom, cod } => Some((binder.as_deref(), dom, cod)),
        RType::Base { .. } => None,
    }
}

impl Gen<'_> {
    fn error(&mut self, code: Code, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span, msg));
    }

    fn bind(&mut self, env: &mut Env, name: &str, res: &RType, shown: &RType, kind: BinderKind, span: Span) -> R<()> {
        env.bind(name, res, shown.clone(), kind).map_err(|e| {
            self.error(Code::Sort, span, e.to_string());
        })
    }

    fn check_clause(&mut self) {
        let mut env = Env::new();
        let mut cur = Expect {
            res: self.info.resolved.clone(),
            shown: self.info.shown.clone(),
        };
        let pat_names: BTreeSet<&str> = self.clause.pats.iter().flat_map(|p| p.bound_names()).collect();
        let mut names = Vec::new();
        for (i, pat) in self.clause.pats.iter().enumerate() {
            let (Some((binder, dom, cod)), Some((_, sdom, scod))) = (split_fun(&cur.res), split_fun(&cur.shown)) else {
                self.error(
                    Code::Arity,
                    self.clause.span,
                    format!(
                        "`{}` has {} parameter(s) but this clause matches {}",
                        self.decl.name,
                        self.info.params.len(),
                        self.clause.pats.len()
                    ),
                );
                return;
            };
            if dom.is_fun() {
                self.error(
                    Code::Unsupported,
                    pat.span,
                    "function-typed parameters are not supported",
                );
                return;
            }
            let name = match &pat.kind {
                PatKind::Var(x) => {
                    if self.bind(&mut env, x, dom, sdom, BinderKind::Param, pat.span).is_err() {
                        return;
                    }
                    x.clone()
                }
                kind => {
                    let base = self.info.params[i].clone();
                    let nm = if env.contains(&base) || pat_names.contains(base.as_str()) {
                        let mut avoid = env.names();
                        avoid.extend(pat_names.iter().map(|s| s.to_string()));
                        crate::logic::fresh_name(&base, &avoid)
                    } else {
                        base
                    };
                    if self
                        .bind(&mut env, &nm, dom, sdom, BinderKind::Logic, pat.span)
                        .is_err()
                    {
                        return;
                    }
                    let sort = env.sort_of(&nm).cloned().unwrap_or(Sort::Any);
                    let ok = match kind {
                        PatKind::Nil | PatKind::Cons(..) => sort.is_list(),
                        PatKind::Int(_) => sort == Sort::Int,
                        _ => true,
                    };
                    if !ok {
                        self.error(
                            Code::Sort,
                            pat.span,
                            format!("pattern does not match parameter type `{sdom}`"),
                        );
                        return;
                    }
                    let kind = match kind {
                        PatKind::Cons(h, t) => {
                            let h = if h == "_" { env.fresh("_h") } else { h.clone() };
                            let t = if t == "_" { env.fresh("_t") } else { t.clone() };
                            let elem = sort.elem().cloned().unwrap_or(Sort::Any);
                            let list_base = match sdom.base_type() {
                                Some(BaseType::List(e)) => BaseType::List(e.clone()),
                                _ => BaseType::from_sort(&sort),
                            };
                            let elem_shown = match &list_base {
                                BaseType::List(e) => RType::base((**e).clone()),
                                _ => RType::base(BaseType::from_sort(&elem)),
                            };
                            let ok = env
                                .bind_sorted(&h, elem, Pred::Bool(true), elem_shown, BinderKind::Pattern)
                                .and_then(|_| {
                                    env.bind_sorted(
                                        &t,
                                        sort.clone(),
                                        Pred::Bool(true),
                                        RType::base(list_base),
                                        BinderKind::Pattern,
                                    )
                                });
                            if let Err(e) = ok {
                                self.error(Code::Sort, pat.span, e.to_string());
                                return;
                            }
                            PatKind::Cons(h, t)
                        }
                        k => k.clone(),
                    };
                    let facts = branch_facts(&nm, &kind);
                    if let Some(Pred::Bin(BinOp::Eq, _, ctor)) = facts.first() {
                        self.matched.push(facts[0].clone());
                        self.subst.insert(nm.clone(), (**ctor).clone());
                    }
                    for f in facts {
                        env.add_fact(f);
                    }
                    nm
                }
            };
            let next = Expect {
                res: (*cod).clone(),
                shown: (*scod).clone(),
            };
            cur = next.subst1(binder, &Pred::var(&name));
            names.push(name);
        }
        // facts from earlier clauses not matching
        for prev in &self.decl.clauses[..self.clause_idx] {
            let tests: Vec<Pred> = prev
                .pats
                .iter()
                .zip(&names)
                .filter_map(|(p, n)| facts::shape_test(n, &p.kind))
                .collect();
            match tests.len() {
                0 => {}
                1 => env.add_fact(facts::negate(tests[0].clone())),
                _ => env.add_fact(Pred::not(Pred::and_all(tests))),
            }
        }
        if cur.res.is_fun() {
            if let ExprKind::Hole(h) = &self.clause.body.kind {
                self.capture(&env, h, self.clause.body.span, &cur, None);
            } else {
                self.error(
                    Code::Unsupported,
                    self.clause.body.span,
                    format!(
                        "this clause of `{}` binds fewer parameters than its signature; only a hole may stand for the rest",
                        self.decl.name
                    ),
                );
            }
            return;
        }
        let blame = format!("result of `{}`", self.decl.name);
        let _ = self.check(&mut env, &self.clause.body, &cur, &blame);
    }

    fn capture(&mut self, env: &Env, name: &str, span: Span, exp: &Expect, var: Option<String>) {
        self.captures.push(HoleCapture {
            name: name.to_string(),
            span,
            decl: self.decl.name.clone(),
            clause: self.clause_idx,
            env: env.clone(),
            expected: exp.res.clone(),
            shown: exp.shown.clone(),
            matched: self.matched.clone(),
            subst: self.subst.clone(),
            var,
        });
    }

    fn capture_and_bind(&mut self, env: &mut Env, name: &str, span: Span, exp: &Expect) -> Pred {
        let h = env.fresh("_h");
        self.capture(env, name, span, exp, Some(h.clone()));
        let sort = exp.sort().unwrap_or(Sort::Any);
        let _ = env.bind_sorted(&h, sort, Pred::Bool(true), exp.shown.clone(), BinderKind::Hole);
        Pred::var(h)
    }

    fn temp(&mut self, env: &mut Env, sort: Sort, refinement: Option<(&str, &Pred)>) -> Pred {
        let t = env.fresh("_t");
        let r = refinement.map(|(b, p)| p.rename(b, &t)).unwrap_or(Pred::Bool(true));
        let shown = RType::base(BaseType::from_sort(&sort));
        let _ = env.bind_sorted(&t, sort, r, shown, BinderKind::Temp);
        Pred::var(t)
    }

    fn emit(&mut self, env: &Env, exp: &Expect, term: &Pred, span: Span, blame: &str) {
        let Some((b, p)) = exp.res.pred() else { return };
        let goal = p.subst1(b, term);
        if goal.is_true() {
            return;
        }
        let deps = env.closure_of(&goal.free_vars());
        let on_hole = env
            .binders()
            .iter()
            .any(|x| x.kind == BinderKind::Hole && deps.contains(&x.name));
        self.vcs.push(Vc {
            id: 0,
            env: env.clone(),
            goal,
            span,
            blame: blame.to_string(),
            decl: self.decl.name.clone(),
            status: if on_hole { VcStatus::Skipped } else { VcStatus::Pending },
        });
    }

    fn sort_error(&mut self, span: Span, want: &Sort, got: &Sort) {
        self.error(
            Code::Sort,
            span,
            format!("expected a value of sort {want}, found {got}"),
        );
    }

    /// Checks `e` against `exp`; returns the logic term for `e` when it has one.
    fn check(&mut self, env: &mut Env, e: &Expr, exp: &Expect, blame: &str) -> R<Option<Pred>> {
        match &e.kind {
            ExprKind::Hole(h) => Ok(Some(self.capture_and_bind(env, h, e.span, exp))),
            ExprKind::If(c, t, f) => {
                let ct = self.synth_as(env, c, &Sort::Bool)?;
                let mut et = env.with_fact(ct.clone());
                let rt = self.check(&mut et, t, exp, blame);
                let mut ef = env.with_fact(facts::negate(ct.clone()));
                let rf = self.check(&mut ef, f, exp, blame);
                let names = env.names();
                Ok(match (rt?, rf?) {
                    (Some(a), Some(b)) if a.free_vars().is_subset(&names) && b.free_vars().is_subset(&names) => {
                        Some(Pred::Ite(Box::new(ct), Box::new(a), Box::new(b)))
                    }
                    _ => None,
                })
            }
            ExprKind::Proof(a, b) => {
                self.synth(env, b, Some(&Sort::Unit))?;
                self.check(env, a, exp, blame)
            }
            _ => {
                let want = exp.sort().unwrap_or(Sort::Any);
                let nested = contextual_hole(e);
                let (s, t) = self.synth(env, e, Some(&want))?;
                if !s.compatible(&want) {
                    self.sort_error(e.span, &want, &s);
                    return Err(());
                }
                if let Some(h) = nested {
                    self.refine_nested(env, h, &t, exp);
                    return Ok(None);
                }
                self.emit(env, exp, &t, e.span, blame);
                Ok(Some(t))
            }
        }
    }

    /// A hole under arithmetic, boolean or list operators inherits the
    /// enclosing goal: `{v:b | P}` becomes `{h:b' | P[v := E(h)]}`.
    fn refine_nested(&mut self, env: &Env, hole: &str, term: &Pred, exp: &Expect) {
        let Some(idx) = self.captures.iter().rposition(|c| c.name == hole) else {
            return;
        };
        let Some(h) = self.captures[idx].var.clone() else {
            return;
        };
        let hsort = env.sort_of(&h).cloned().unwrap_or(Sort::Any);
        let same = exp.sort().is_some_and(|s| s == hsort);
        let lift = |t: &RType| -> RType {
            let base = match (same, t.base_type()) {
                (true, Some(b)) => b.clone(),
                _ => BaseType::from_sort(&hsort),
            };
            match t.pred() {
                Some((b, p)) => RType::refined(base, &h, p.subst1(b, term)),
                None => RType::base(base),
            }
        };
        let c = &mut self.captures[idx];
        c.expected = lift(&exp.res);
        c.shown = lift(&exp.shown);
    }

    fn synth_as(&mut self, env: &mut Env, e: &Expr, want: &Sort) -> R<Pred> {
        let (s, t) = self.synth(env, e, Some(want))?;
        if !s.compatible(want) {
            self.sort_error(e.span, want, &s);
            return Err(());
        }
        Ok(t)
    }

    fn synth(&mut self, env: &mut Env, e: &Expr, hint: Option<&Sort>) -> R<(Sort, Pred)> {
        match &e.kind {
            ExprKind::Int(n) => Ok((Sort::Int, Pred::Int(*n))),
            ExprKind::Bool(b) => Ok((Sort::Bool, Pred::Bool(*b))),
            ExprKind::Unit => Ok((Sort::Unit, Pred::Unit)),
            ExprKind::Nil => {
                let s = hint.filter(|s| s.is_list()).cloned().unwrap_or(Sort::list(Sort::Any));
                Ok((s, Pred::Nil))
            }
            ExprKind::Var(x) => {
                if let Some(b) = env.lookup(x) {
                    if b.kind.program_visible() {
                        return Ok((b.sort.clone(), Pred::var(x)));
                    }
                    if b.kind == BinderKind::Logic {
                        self.error(
                            Code::Unbound,
                            e.span,
                            format!("`{x}` is named only in the signature; bind it with a pattern to use it here"),
                        );
                        return Err(());
                    }
                }
                if self.infos.get(x).is_some_and(|i| i.params.is_empty()) {
                    return self.call(env, x, &[], e.span);
                }
                self.error(Code::Unbound, e.span, format!("unbound variable `{x}`"));
                Err(())
            }
            ExprKind::Cons(h, t) => {
                let (st, tt) = self.synth(env, t, hint.filter(|s| s.is_list()))?;
                if !st.is_list() {
                    self.sort_error(t.span, &Sort::list(Sort::Any), &st);
                    return Err(());
                }
                let (sh, th) = self.synth(env, h, st.elem())?;
                let want = Sort::list(sh);
                if !st.compatible(&want) {
                    self.sort_error(e.span, &st, &want);
                    return Err(());
                }
                Ok((st.join(&want), Pred::cons(th, tt)))
            }
            ExprKind::Binary(op, a, b) => self.binary(env, *op, a, b),
            ExprKind::Not(a) => {
                let t = self.synth_as(env, a, &Sort::Bool)?;
                Ok((Sort::Bool, Pred::not(t)))
            }
            ExprKind::If(c, t, f) => {
                let ct = self.synth_as(env, c, &Sort::Bool)?;
                let mut et = env.with_fact(ct.clone());
                let rt = self.synth(&mut et, t, hint);
                let mut ef = env.with_fact(facts::negate(ct.clone()));
                let rf = self.synth(&mut ef, f, hint);
                let ((s1, a), (s2, b)) = (rt?, rf?);
                if !s1.compatible(&s2) {
                    self.sort_error(f.span, &s1, &s2);
                    return Err(());
                }
                let sort = s1.join(&s2);
                let names = env.names();
                if a.free_vars().is_subset(&names) && b.free_vars().is_subset(&names) {
                    Ok((sort, Pred::Ite(Box::new(ct), Box::new(a), Box::new(b))))
                } else {
                    let t = self.temp(env, sort.clone(), None);
                    Ok((sort, t))
                }
            }
            ExprKind::App(f, args) => self.call(env, f, args, e.span),
            ExprKind::Proof(a, b) => {
                self.synth(env, b, Some(&Sort::Unit))?;
                self.synth(env, a, hint)
            }
            ExprKind::Hole(h) => {
                let sort = hint.cloned().unwrap_or(Sort::Any);
                let t = self.capture_and_bind(env, h, e.span, &Expect::trivial(&sort));
                Ok((sort, t))
            }
        }
    }

    fn binary(&mut self, env: &mut Env, op: BinOp, a: &Expr, b: &Expr) -> R<(Sort, Pred)> {
        if op.is_arith() || op.is_order() {
            let ta = self.synth_as(env, a, &Sort::Int);
            let tb = self.synth_as(env, b, &Sort::Int);
            let (ta, tb) = (ta?, tb?);
            let lit = |p: &Pred| matches!(p, Pred::Int(_));
            let term = match op {
                BinOp::Mul if !lit(&ta) && !lit(&tb) => self.temp(env, Sort::Int, None),
                BinOp::Mod => match tb {
                    Pred::Int(0) => {
                        self.error(Code::Sort, b.span, "`mod` by zero");
                        return Err(());
                    }
                    Pred::Int(_) => Pred::bin(op, ta, tb),
                    _ => self.temp(env, Sort::Int, None),
                },
                _ => Pred::bin(op, ta, tb),
            };
            let sort = if op.is_order() { Sort::Bool } else { Sort::Int };
            return Ok((sort, term));
        }
        if op.is_logical() {
            let ta = self.synth_as(env, a, &Sort::Bool);
            let tb = self.synth_as(env, b, &Sort::Bool);
            return Ok((Sort::Bool, Pred::bin(op, ta?, tb?)));
        }
        // (dis)equality: hint a hole with the other side's sort
        let hole_first = matches!(a.kind, ExprKind::Hole(_));
        let ((sa, ta), (sb, tb)) = if hole_first {
            let r = self.synth(env, b, None)?;
            (self.synth(env, a, Some(&r.0))?, r)
        } else {
            let l = self.synth(env, a, None)?;
            let r = self.synth(env, b, Some(&l.0))?;
            (l, r)
        };
        if !sa.compatible(&sb) {
            self.sort_error(b.span, &sa, &sb);
            return Err(());
        }
        Ok((Sort::Bool, Pred::bin(op, ta, tb)))
    }

    fn call(&mut self, env: &mut Env, f: &str, args: &[Expr], span: Span) -> R<(Sort, Pred)> {
        if f == "len" && !self.infos.contains_key("len") {
            if args.len() != 1 {
                self.error(
                    Code::Arity,
                    span,
                    format!("`len` expects 1 argument, given {}", args.len()),
                );
                return Err(());
            }
            let t = self.synth_as(env, &args[0], &Sort::list(Sort::Any))?;
            return Ok((Sort::Int, Pred::len(t)));
        }
        let Some(info) = self.infos.get(f) else {
            self.error(Code::Unbound, span, format!("unknown function `{f}`"));
            return Err(());
        };
        if args.len() != info.params.len() {
            self.error(
                Code::Arity,
                span,
                format!("`{f}` expects {} argument(s), given {}", info.params.len(), args.len()),
            );
            return Err(());
        }
        let mut cur = Expect {
            res: info.resolved.clone(),
            shown: info.shown.clone(),
        };
        let mut terms = Vec::new();
        let mut failed = false;
        for (i, a) in args.iter().enumerate() {
            let (Some((binder, dom, cod)), Some((_, sdom, scod))) = (split_fun(&cur.res), split_fun(&cur.shown)) else {
                return Err(());
            };
            if dom.is_fun() {
                self.error(Code::Unsupported, a.span, "function-typed arguments are not supported");
                return Err(());
            }
            let dom = Expect {
                res: dom.clone(),
                shown: sdom.clone(),
            };
            let binder = binder.map(str::to_string);
            let next = Expect {
                res: cod.clone(),
                shown: scod.clone(),
            };
            let t = match self.check_arg(env, a, &dom, &format!("argument {} of `{f}`", i + 1)) {
                Ok(t) => t,
                Err(()) => {
                    failed = true;
                    let s = dom.sort().unwrap_or(Sort::Any);
                    self.temp(env, s, None)
                }
            };
            cur = next.subst1(binder.as_deref(), &t);
            terms.push(t);
        }
        if failed {
            return Err(());
        }
        if f == self.decl.name {
            if let Err(d) = termination_ok(f, &info.resolved, self.clause, &terms, span) {
                self.diags.push(d);
            }
        }
        let sort = cur.sort().ok_or(())?;
        if !self.table.contains(f) {
            let t = self.temp(env, sort.clone(), cur.res.pred());
            return Ok((sort, t));
        }
        let app = Pred::app(f, terms);
        if let Some((b, p)) = cur.res.pred() {
            env.add_fact(p.subst1(b, &app));
        }
        Ok((sort, app))
    }

    fn check_arg(&mut self, env: &mut Env, a: &Expr, exp: &Expect, blame: &str) -> R<Pred> {
        match self.check(env, a, exp, blame)? {
            Some(t) => Ok(t),
            None => {
                let s = exp.sort().unwrap_or(Sort::Any);
                Ok(self.temp(env, s, exp.res.pred()))
            }
        }
    }
}

/// The single hole of `e`, when only arithmetic, boolean and list
/// operators lie between `e` and it.
fn contextual_hole(e: &Expr) -> Option<&str> {
    fn go<'a>(e: &'a Expr, found: &mut Vec<&'a str>, through: bool) -> bool {
        match &e.kind {
            ExprKind::Hole(h) => {
                found.push(h);
                through
            }
            ExprKind::Binary(_, a, b) | ExprKind::Cons(a, b) => {
                let x = go(a, found, through);
                let y = go(b, found, through);
                x && y
            }
            ExprKind::Not(a) => go(a, found, through),
            _ => {
                let mut ok = true;
                for c in e.children() {
                    ok &= go(c, found, false);
                }
                ok
            }
        }
    }
    if !matches!(e.kind, ExprKind::Binary(..) | ExprKind::Cons(..) | ExprKind::Not(_)) {
        return None;
    }
    let mut found = Vec::new();
    let ok = go(e, &mut found, true);
    (ok && found.len() == 1).then(|| found[0])
}
