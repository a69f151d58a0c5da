use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::pred::Pred;
use super::sort::Sort;

/// Base type as written in a signature, before alias expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseType {
    Int,
    Bool,
    Unit,
    List(Box<BaseType>),
    TyVar(String),
    /// A type alias, including the built-in `Nat` and `Proof`.
    Alias(String),
    /// The `_` wildcard; filled in by signature inference.
    Infer,
}

impl BaseType {
    pub fn list(elem: BaseType) -> BaseType {
        BaseType::List(Box::new(elem))
    }

    /// Sort of an alias-free base.
    pub fn sort(&self) -> Option<Sort> {
        Some(match self {
            BaseType::Int => Sort::Int,
            BaseType::Bool => Sort::Bool,
            BaseType::Unit => Sort::Unit,
            BaseType::List(e) => Sort::list(e.sort()?),
            BaseType::TyVar(a) => Sort::Var(a.clone()),
            BaseType::Alias(_) | BaseType::Infer => return None,
        })
    }

    pub fn from_sort(sort: &Sort) -> BaseType {
        match sort {
            Sort::Int | Sort::Any => BaseType::Int,
            Sort::Bool => BaseType::Bool,
            Sort::Unit => BaseType::Unit,
            Sort::List(e) => BaseType::list(BaseType::from_sort(e)),
            Sort::Var(a) => BaseType::TyVar(a.clone()),
        }
    }

    pub fn contains_infer(&self) -> bool {
        match self {
            BaseType::Infer => true,
            BaseType::List(e) => e.contains_infer(),
            _ => false,
        }
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseType::Int => f.write_str("Int"),
            BaseType::Bool => f.write_str("Bool"),
            BaseType::Unit => f.write_str("()"),
            BaseType::List(e) => write!(f, "[{e}]"),
            BaseType::TyVar(a) | BaseType::Alias(a) => f.write_str(a),
            BaseType::Infer => f.write_str("_"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Refinement {
    pub binder: String,
    pub pred: Pred,
}

/// Refinement type: a refined base or a dependent function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RType {
    Base {
        base: BaseType,
        refinement: Option<Refinement>,
    },
    Fun {
        binder: Option<String>,
        dom: Box<RType>,
        cod: Box<RType>,
    },
}

impl RType {
    pub fn base(base: BaseType) -> RType {
        RType::Base { base, refinement: None }
    }

    pub fn refined(base: BaseType, binder: impl Into<String>, pred: Pred) -> RType {
        RType::Base {
            base,
            refinement: Some(Refinement {
                binder: binder.into(),
                pred,
            }),
        }
    }

    pub fn fun(binder: Option<&str>, dom: RType, cod: RType) -> RType {
        RType::Fun {
            binder: binder.map(str::to_string),
            dom: Box::new(dom),
            cod: Box::new(cod),
        }
    }

    pub fn is_fun(&self) -> bool {
        matches!(self, RType::Fun { .. })
    }

    /// Number of arrows at the top level.
    pub fn arity(&self) -> usize {
        match self {
            RType::Fun { cod, .. } => 1 + cod.arity(),
            RType::Base { .. } => 0,
        }
    }

    /// (binder, domain) pairs and the final result type.
    pub fn split_params(&self) -> (Vec<(Option<&str>, &RType)>, &RType) {
        let mut params = Vec::new();
        let mut t = self;
        while let RType::Fun { binder, dom, cod } = t {
            params.push((binder.as_deref(), dom.as_ref()));
            t = cod;
        }
        (params, t)
    }

    pub fn base_type(&self) -> Option<&BaseType> {
        match self {
            RType::Base { base, .. } => Some(base),
            RType::Fun { .. } => None,
        }
    }

    /// Predicate of a base type, with `true` for unrefined bases.
    pub fn pred(&self) -> Option<(&str, &Pred)> {
        match self {
            RType::Base {
                refinement: Some(r), ..
            } => Some((&r.binder, &r.pred)),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            RType::Base {
                refinement: Some(r), ..
            } => {
                let mut fv = r.pred.free_vars();
                fv.remove(&r.binder);
                fv
            }
            RType::Base { .. } => BTreeSet::new(),
            RType::Fun { binder, dom, cod } => {
                let mut fv = dom.free_vars();
                let mut c = cod.free_vars();
                if let Some(b) = binder {
                    c.remove(b);
                }
                fv.append(&mut c);
                fv
            }
        }
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn subst(&self, map: &HashMap<String, Pred>) -> RType {
        if map.is_empty() {
            return self.clone();
        }
        let range_fv: BTreeSet<String> = map.values().flat_map(|p| p.free_vars()).collect();
        match self {
            RType::Base { base, refinement: None } => RType::base(base.clone()),
            RType::Base {
                base,
                refinement: Some(r),
            } => {
                let mut inner = map.clone();
                inner.remove(&r.binder);
                let (binder, pred) = if range_fv.contains(&r.binder) {
                    let mut avoid = range_fv.clone();
                    avoid.extend(r.pred.free_vars());
                    let fresh = fresh_name(&r.binder, &avoid);
                    inner.insert(r.binder.clone(), Pred::var(&fresh));
                    (fresh, r.pred.subst(&inner))
                } else {
                    (r.binder.clone(), r.pred.subst(&inner))
                };
                RType::Base {
                    base: base.clone(),
                    refinement: Some(Refinement { binder, pred }),
                }
            }
            RType::Fun { binder, dom, cod } => {
                let dom = dom.subst(map);
                match binder {
                    None => RType::Fun {
                        binder: None,
                        dom: Box::new(dom),
                        cod: Box::new(cod.subst(map)),
                    },
                    Some(b) => {
                        let mut inner = map.clone();
                        inner.remove(b);
                        if range_fv.contains(b) {
                            let mut avoid = range_fv.clone();
                            avoid.extend(cod.free_vars());
                            let fresh = fresh_name(b, &avoid);
                            inner.insert(b.clone(), Pred::var(&fresh));
                            RType::Fun {
                                binder: Some(fresh),
                                dom: Box::new(dom),
                                cod: Box::new(cod.subst(&inner)),
                            }
                        } else {
                            RType::Fun {
                                binder: Some(b.clone()),
                                dom: Box::new(dom),
                                cod: Box::new(cod.subst(&inner)),
                            }
                        }
                    }
                }
            }
        }
    }

    pub fn subst1(&self, var: &str, term: &Pred) -> RType {
        let mut map = HashMap::new();
        map.insert(var.to_string(), term.clone());
        self.subst(&map)
    }

    /// Renames the value binder of a base type.
    pub fn with_binder(&self, name: &str) -> RType {
        match self {
            RType::Base {
                base,
                refinement: Some(r),
            } if r.binder != name => RType::Base {
                base: base.clone(),
                refinement: Some(Refinement {
                    binder: name.to_string(),
                    pred: r.pred.rename(&r.binder, name),
                }),
            },
            t => t.clone(),
        }
    }
}

/// `base`, or `base1`, `base2`, ... avoiding `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded")
}

impl fmt::Display for RType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RType::Base { base, refinement: None } => write!(f, "{base}"),
            RType::Base {
                base,
                refinement: Some(r),
            } => write!(f, "{{ {}:{} | {} }}", r.binder, base, r.pred),
            RType::Fun { binder, dom, cod } => {
                if let Some(b) = binder {
                    write!(f, "{b}:")?;
                }
                if dom.is_fun() {
                    write!(f, "({dom})")?;
                } else {
                    write!(f, "{dom}")?;
                }
                write!(f, " -> {cod}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::pred::BinOp;

    #[test]
    fn display_matches_listing_syntax() {
        let t = RType::fun(
            Some("xs"),
            RType::base(BaseType::list(BaseType::TyVar("a".into()))),
            RType::refined(
                BaseType::Alias("Proof".into()),
                "_",
                Pred::eq(
                    Pred::app("listLength", vec![Pred::var("xs")]),
                    Pred::len(Pred::var("xs")),
                ),
            ),
        );
        assert_eq!(t.to_string(), "xs:[a] -> { _:Proof | listLength xs == len xs }");
    }

    #[test]
    fn binder_shadows_substitution() {
        let t = RType::refined(BaseType::Int, "v", Pred::eq(Pred::var("v"), Pred::var("x")));
        let s = t.subst1("v", &Pred::Int(3));
        assert_eq!(s, t);
        let s = t.subst1("x", &Pred::Int(3));
        assert_eq!(s.to_string(), "{ v:Int | v == 3 }");
    }

    #[test]
    fn substitution_renames_captured_binder() {
        // { v:Int | v < x } [x := v + 1]  must not capture the binder.
        let t = RType::refined(BaseType::Int, "v", Pred::bin(BinOp::Lt, Pred::var("v"), Pred::var("x")));
        let s = t.subst1("x", &Pred::add(Pred::var("v"), Pred::Int(1)));
        assert_eq!(s.to_string(), "{ v1:Int | v1 < v + 1 }");
    }

    #[test]
    fn fun_binder_is_renamed_when_captured() {
        let t = RType::fun(
            Some("y"),
            RType::base(BaseType::Int),
            RType::refined(
                BaseType::Int,
                "v",
                Pred::eq(Pred::var("v"), Pred::add(Pred::var("x"), Pred::var("y"))),
            ),
        );
        let s = t.subst1("x", &Pred::var("y"));
        assert_eq!(s.to_string(), "y1:Int -> { v:Int | v == y + y1 }");
    }
}
