use std::collections::BTreeSet;

use thiserror::Error;

use super::pred::Pred;
use super::rtype::{fresh_name, RType};
use super::sort::Sort;

/// How a binder entered the environment; controls visibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinderKind {
    /// Function parameter bound by a variable pattern.
    Param,
    /// Component of a constructor pattern (`y`, `ys` in `(y:ys)`).
    Pattern,
    /// Signature binder whose argument was matched by a constructor
    /// pattern: present in the logic, not nameable in the body.
    Logic,
    /// A-normalization temporary.
    Temp,
    /// Stand-in for the unknown value of a hole.
    Hole,
    /// The value binder of a subtyping obligation or a goal.
    Value,
}

impl BinderKind {
    pub fn program_visible(self) -> bool {
        matches!(self, BinderKind::Param | BinderKind::Pattern)
    }

    pub fn displayed(self) -> bool {
        matches!(self, BinderKind::Param | BinderKind::Pattern | BinderKind::Logic)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binder {
    pub name: String,
    pub sort: Sort,
    /// Refinement with the value binder already renamed to `name`.
    pub refinement: Pred,
    /// The type as the user would read it (aliases intact).
    pub shown: RType,
    pub kind: BinderKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("`{0}` is already bound")]
    Duplicate(String),
    #[error("cannot bind `{0}` at a function type")]
    FunctionType(String),
    #[error("type of `{0}` still contains aliases or wildcards")]
    Unresolved(String),
}

/// Ordered binders plus path facts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    binders: Vec<Binder>,
    facts: Vec<Pred>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    /// Binds `name` at an alias-free base type.
    pub fn bind(&mut self, name: &str, resolved: &RType, shown: RType, kind: BinderKind) -> Result<(), EnvError> {
        let RType::Base { base, refinement } = resolved else {
            return Err(EnvError::FunctionType(name.to_string()));
        };
        let sort = base.sort().ok_or_else(|| EnvError::Unresolved(name.to_string()))?;
        let refinement = refinement
            .as_ref()
            .map(|r| r.pred.rename(&r.binder, name))
            .unwrap_or(Pred::Bool(true));
        self.bind_sorted(name, sort, refinement, shown, kind)
    }

    pub fn bind_sorted(
        &mut self,
        name: &str,
        sort: Sort,
        refinement: Pred,
        shown: RType,
        kind: BinderKind,
    ) -> Result<(), EnvError> {
        if self.contains(name) {
            return Err(EnvError::Duplicate(name.to_string()));
        }
        self.binders.push(Binder {
            name: name.to_string(),
            sort,
            refinement,
            shown,
            kind,
        });
        Ok(())
    }

    pub fn add_fact(&mut self, fact: Pred) {
        if !fact.is_true() && !self.facts.contains(&fact) {
            self.facts.push(fact);
        }
    }

    pub fn with_fact(&self, fact: Pred) -> Env {
        let mut e = self.clone();
        e.add_fact(fact);
        e
    }

    pub fn binders(&self) -> &[Binder] {
        &self.binders
    }

    pub fn facts(&self) -> &[Pred] {
        &self.facts
    }

    pub fn lookup(&self, name: &str) -> Option<&Binder> {
        self.binders.iter().rev().find(|b| b.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    pub fn sort_of(&self, name: &str) -> Option<&Sort> {
        self.lookup(name).map(|b| &b.sort)
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.binders.iter().map(|b| b.name.clone()).collect()
    }

    /// A name not yet bound, derived from `base`.
    pub fn fresh(&self, base: &str) -> String {
        fresh_name(base, &self.names())
    }

    /// Conjunction of all binder refinements and path facts.
    pub fn antecedent(&self) -> Pred {
        Pred::and_all(
            self.binders
                .iter()
                .map(|b| b.refinement.clone())
                .chain(self.facts.iter().cloned()),
        )
    }

    /// Binders whose refinements (transitively) mention any of `vars`.
    pub fn closure_of(&self, vars: &BTreeSet<String>) -> BTreeSet<String> {
        let mut seen = vars.clone();
        loop {
            let before = seen.len();
            for b in &self.binders {
                if seen.contains(&b.name) {
                    seen.extend(b.refinement.free_vars());
                }
            }
            if seen.len() == before {
                return seen;
            }
        }
    }
}

/// Conjunction of each binder's refinement and every path fact; `true` for
/// the empty environment.
pub fn env_to_antecedent(env: &Env) -> Pred {
    env.antecedent()
}
