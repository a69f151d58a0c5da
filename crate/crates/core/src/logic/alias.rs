use std::collections::BTreeMap;

use thiserror::Error;

use super::pred::{BinOp, Pred};
use super::rtype::{BaseType, RType, Refinement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AliasError {
    #[error("unknown type alias `{0}`")]
    Unknown(String),
    #[error("type alias `{0}` is defined in terms of itself")]
    Cyclic(String),
    #[error("type alias `{0}` is already defined")]
    Duplicate(String),
    #[error("list elements cannot carry refinements (`[{0}]`)")]
    RefinedElement(String),
    #[error("type alias `{0}` names a function type and cannot be refined")]
    RefinedFunction(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeAlias {
    pub name: String,
    pub def: RType,
}

/// User aliases plus the built-ins `Nat` and `Proof`.
#[derive(Debug, Clone)]
pub struct AliasTable {
    defs: BTreeMap<String, RType>,
}

pub const BUILTIN_ALIASES: [&str; 2] = ["Nat", "Proof"];

impl Default for AliasTable {
    fn default() -> Self {
        let mut defs = BTreeMap::new();
        defs.insert(
            "Nat".to_string(),
            RType::refined(BaseType::Int, "v", Pred::bin(BinOp::Le, Pred::Int(0), Pred::var("v"))),
        );
        defs.insert("Proof".to_string(), RType::base(BaseType::Unit));
        AliasTable { defs }
    }
}

impl AliasTable {
    pub fn new<'a>(aliases: impl IntoIterator<Item = &'a TypeAlias>) -> Result<Self, AliasError> {
        let mut table = AliasTable::default();
        for a in aliases {
            table.insert(&a.name, a.def.clone())?;
        }
        Ok(table)
    }

    pub fn insert(&mut self, name: &str, def: RType) -> Result<(), AliasError> {
        if self.defs.contains_key(name) {
            return Err(AliasError::Duplicate(name.to_string()));
        }
        self.defs.insert(name.to_string(), def);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&RType> {
        self.defs.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.defs.contains_key(name)
    }

    /// Resolves every definition once, reporting unknown or cyclic aliases.
    pub fn validate(&self) -> Vec<(String, AliasError)> {
        self.defs
            .iter()
            .filter_map(|(n, d)| self.resolve(d).err().map(|e| (n.clone(), e)))
            .collect()
    }

    /// Expands all aliases; the result mentions no `BaseType::Alias`.
    pub fn resolve(&self, t: &RType) -> Result<RType, AliasError> {
        self.resolve_in(t, &mut Vec::new())
    }

    fn resolve_in(&self, t: &RType, stack: &mut Vec<String>) -> Result<RType, AliasError> {
        match t {
            RType::Fun { binder, dom, cod } => Ok(RType::Fun {
                binder: binder.clone(),
                dom: Box::new(self.resolve_in(dom, stack)?),
                cod: Box::new(self.resolve_in(cod, stack)?),
            }),
            RType::Base { base, refinement } => match base {
                BaseType::Alias(name) => {
                    let def = self.expand(name, stack)?;
                    match (def, refinement) {
                        (def @ RType::Fun { .. }, None) => Ok(def),
                        (RType::Fun { .. }, Some(_)) => Err(AliasError::RefinedFunction(name.clone())),
                        (
                            RType::Base {
                                base,
                                refinement: inner,
                            },
                            outer,
                        ) => Ok(RType::Base {
                            base,
                            refinement: combine(inner, outer.clone()),
                        }),
                    }
                }
                other => Ok(RType::Base {
                    base: self.resolve_base(other, stack)?,
                    refinement: refinement.clone(),
                }),
            },
        }
    }

    fn expand(&self, name: &str, stack: &mut Vec<String>) -> Result<RType, AliasError> {
        if stack.iter().any(|n| n == name) {
            return Err(AliasError::Cyclic(name.to_string()));
        }
        let def = self
            .defs
            .get(name)
            .ok_or_else(|| AliasError::Unknown(name.to_string()))?;
        stack.push(name.to_string());
        let r = self.resolve_in(def, stack);
        stack.pop();
        r
    }

    fn resolve_base(&self, b: &BaseType, stack: &mut Vec<String>) -> Result<BaseType, AliasError> {
        match b {
            BaseType::List(e) => match e.as_ref() {
                BaseType::Alias(name) => match self.expand(name, stack)? {
                    RType::Base { base, refinement: None } => Ok(BaseType::list(base)),
                    _ => Err(AliasError::RefinedElement(name.clone())),
                },
                inner => Ok(BaseType::list(self.resolve_base(inner, stack)?)),
            },
            BaseType::Alias(name) => match self.expand(name, stack)? {
                RType::Base { base, refinement: None } => Ok(base),
                _ => Err(AliasError::RefinedElement(name.clone())),
            },
            other => Ok(other.clone()),
        }
    }
}

fn combine(inner: Option<Refinement>, outer: Option<Refinement>) -> Option<Refinement> {
    match (inner, outer) {
        (None, r) | (r, None) => r,
        (Some(i), Some(o)) => Some(Refinement {
            pred: Pred::and(i.pred.rename(&i.binder, &o.binder), o.pred),
            binder: o.binder,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity(r: i64) -> RType {
        RType::refined(
            BaseType::Int,
            "v",
            Pred::eq(Pred::bin(BinOp::Mod, Pred::var("v"), Pred::Int(2)), Pred::Int(r)),
        )
    }

    fn table() -> AliasTable {
        let mut t = AliasTable::default();
        t.insert("EvenInt", parity(0)).unwrap();
        t.insert("OddInt", parity(1)).unwrap();
        t
    }

    #[test]
    fn expands_odd_int() {
        let r = table().resolve(&RType::base(BaseType::Alias("OddInt".into()))).unwrap();
        assert_eq!(r.to_string(), "{ v:Int | v mod 2 == 1 }");
    }

    #[test]
    fn alias_free_input_is_unchanged() {
        let t = parity(0);
        assert_eq!(table().resolve(&t).unwrap(), t);
    }

    #[test]
    fn expands_function_types() {
        let t = RType::fun(
            None,
            RType::base(BaseType::Alias("EvenInt".into())),
            RType::base(BaseType::Alias("OddInt".into())),
        );
        let r = table().resolve(&t).unwrap();
        assert_eq!(r.to_string(), "{ v:Int | v mod 2 == 0 } -> { v:Int | v mod 2 == 1 }");
        assert_eq!(table().resolve(&r).unwrap(), r);
    }

    #[test]
    fn refined_alias_conjoins_with_outer_binder() {
        let t = RType::refined(
            BaseType::Alias("Nat".into()),
            "w",
            Pred::eq(Pred::var("w"), Pred::len(Pred::var("xs"))),
        );
        let r = table().resolve(&t).unwrap();
        assert_eq!(r.to_string(), "{ w:Int | 0 <= w && w == len xs }");
    }

    #[test]
    fn detects_unknown_and_cyclic() {
        let mut t = table();
        assert_eq!(
            t.resolve(&RType::base(BaseType::Alias("Nope".into()))),
            Err(AliasError::Unknown("Nope".into()))
        );
        t.insert("A", RType::base(BaseType::Alias("B".into()))).unwrap();
        t.insert("B", RType::base(BaseType::Alias("A".into()))).unwrap();
        assert!(matches!(
            t.resolve(&RType::base(BaseType::Alias("A".into()))),
            Err(AliasError::Cyclic(_))
        ));
        assert_eq!(t.validate().len(), 2);
    }

    #[test]
    fn refined_list_elements_are_rejected() {
        let t = RType::base(BaseType::list(BaseType::Alias("Nat".into())));
        assert_eq!(table().resolve(&t), Err(AliasError::RefinedElement("Nat".into())));
    }
}
