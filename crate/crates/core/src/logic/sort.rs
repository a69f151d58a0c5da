use std::fmt;

/// Logic-level sort of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    Bool,
    Unit,
    List(Box<Sort>),
    /// Opaque element sort written as a type variable, e.g. the `a` in `[a]`.
    Var(String),
    /// Unconstrained element; only produced while inferring the sort of `[]`.
    Any,
}

impl Sort {
    pub fn list(elem: Sort) -> Sort {
        Sort::List(Box::new(elem))
    }

    pub fn is_list(&self) -> bool {
        matches!(self, Sort::List(_))
    }

    pub fn elem(&self) -> Option<&Sort> {
        match self {
            Sort::List(e) => Some(e),
            _ => None,
        }
    }

    /// `Any` unifies with everything, structurally.
    pub fn compatible(&self, other: &Sort) -> bool {
        match (self, other) {
            (Sort::Any, _) | (_, Sort::Any) => true,
            (Sort::List(a), Sort::List(b)) => a.compatible(b),
            (a, b) => a == b,
        }
    }

    /// The more informative of two compatible sorts.
    pub fn join(&self, other: &Sort) -> Sort {
        match (self, other) {
            (Sort::Any, s) | (s, Sort::Any) => s.clone(),
            (Sort::List(a), Sort::List(b)) => Sort::list(a.join(b)),
            (a, _) => a.clone(),
        }
    }

    pub fn is_concrete(&self) -> bool {
        match self {
            Sort::Any => false,
            Sort::List(e) => e.is_concrete(),
            _ => true,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => f.write_str("Int"),
            Sort::Bool => f.write_str("Bool"),
            Sort::Unit => f.write_str("()"),
            Sort::List(e) => write!(f, "[{e}]"),
            Sort::Var(a) => f.write_str(a),
            Sort::Any => f.write_str("?"),
        }
    }
}
