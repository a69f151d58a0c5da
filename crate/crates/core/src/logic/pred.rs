use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// Binary operators shared by predicates and executable expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    Non,
}

/// Precedence levels used by both printers and the parser. Higher binds tighter.
pub mod prec {
    pub const IF: u8 = 0;
    pub const PROOF: u8 = 1;
    pub const CONS: u8 = 6;
    pub const APP: u8 = 10;
    pub const ATOM: u8 = 11;
}

impl BinOp {
    pub fn fixity(self) -> (u8, Assoc) {
        use BinOp::*;
        match self {
            Implies => (2, Assoc::Right),
            Or => (3, Assoc::Right),
            And => (4, Assoc::Right),
            Eq | Ne | Lt | Le | Gt | Ge => (5, Assoc::Non),
            Add | Sub => (7, Assoc::Left),
            Mul | Mod => (8, Assoc::Left),
        }
    }

    pub fn symbol(self) -> &'static str {
        use BinOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Mod => "mod",
            Eq => "==",
            Ne => "/=",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            And => "&&",
            Or => "||",
            Implies => "=>",
        }
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Mod)
    }

    pub fn is_order(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_equality(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }

    /// Child precedences (left, right) for an operator at its own level.
    pub fn child_prec(self) -> (u8, u8) {
        let (level, assoc) = self.fixity();
        match assoc {
            Assoc::Left => (level, level + 1),
            Assoc::Right => (level + 1, level),
            Assoc::Non => (level + 1, level + 1),
        }
    }
}

/// Quantifier-free refinement term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pred {
    Int(i64),
    Bool(bool),
    Unit,
    Var(String),
    Nil,
    Cons(Box<Pred>, Box<Pred>),
    Bin(BinOp, Box<Pred>, Box<Pred>),
    Not(Box<Pred>),
    Ite(Box<Pred>, Box<Pred>, Box<Pred>),
    /// Measure (`len`) or reflected-function application.
    App(String, Vec<Pred>),
}

impl Pred {
    pub fn var(name: impl Into<String>) -> Pred {
        Pred::Var(name.into())
    }

    pub fn bin(op: BinOp, a: Pred, b: Pred) -> Pred {
        Pred::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn eq(a: Pred, b: Pred) -> Pred {
        Pred::bin(BinOp::Eq, a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Pred, b: Pred) -> Pred {
        Pred::bin(BinOp::Add, a, b)
    }

    pub fn cons(h: Pred, t: Pred) -> Pred {
        Pred::Cons(Box::new(h), Box::new(t))
    }

    pub fn app(f: impl Into<String>, args: Vec<Pred>) -> Pred {
        Pred::App(f.into(), args)
    }

    pub fn len(arg: Pred) -> Pred {
        Pred::App("len".into(), vec![arg])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Pred) -> Pred {
        Pred::Not(Box::new(p))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Pred::Bool(true))
    }

    /// Conjunction that drops literal `true`s.
    pub fn and(a: Pred, b: Pred) -> Pred {
        match (a, b) {
            (Pred::Bool(true), p) | (p, Pred::Bool(true)) => p,
            (a, b) => Pred::bin(BinOp::And, a, b),
        }
    }

    /// Right-nested conjunction; `true` when empty.
    pub fn and_all<I: IntoIterator<Item = Pred>>(items: I) -> Pred {
        let items: Vec<Pred> = items.into_iter().filter(|p| !p.is_true()).collect();
        let mut iter = items.into_iter().rev();
        match iter.next() {
            None => Pred::Bool(true),
            Some(last) => iter.fold(last, |acc, p| Pred::bin(BinOp::And, p, acc)),
        }
    }

    /// Top-level conjuncts, flattening nested `&&`.
    pub fn conjuncts(&self) -> Vec<&Pred> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Pred, out: &mut Vec<&'a Pred>) {
            match p {
                Pred::Bin(BinOp::And, a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Pred::Bool(true) => {}
                p => out.push(p),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn is_ctor(&self) -> bool {
        matches!(self, Pred::Nil | Pred::Cons(..))
    }

    pub fn children(&self) -> Vec<&Pred> {
        match self {
            Pred::Int(_) | Pred::Bool(_) | Pred::Unit | Pred::Var(_) | Pred::Nil => vec![],
            Pred::Cons(a, b) | Pred::Bin(_, a, b) => vec![a, b],
            Pred::Not(a) => vec![a],
            Pred::Ite(c, a, b) => vec![c, a, b],
            Pred::App(_, args) => args.iter().collect(),
        }
    }

    /// Rebuilds this node with each child replaced by `f(child)`.
    pub fn map_children(&self, mut f: impl FnMut(&Pred) -> Pred) -> Pred {
        match self {
            Pred::Int(_) | Pred::Bool(_) | Pred::Unit | Pred::Var(_) | Pred::Nil => self.clone(),
            Pred::Cons(a, b) => Pred::Cons(Box::new(f(a)), Box::new(f(b))),
            Pred::Bin(op, a, b) => Pred::Bin(*op, Box::new(f(a)), Box::new(f(b))),
            Pred::Not(a) => Pred::Not(Box::new(f(a))),
            Pred::Ite(c, a, b) => Pred::Ite(Box::new(f(c)), Box::new(f(a)), Box::new(f(b))),
            Pred::App(g, args) => Pred::App(g.clone(), args.iter().map(f).collect()),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        if let Pred::Var(x) = self {
            out.insert(x.clone());
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Pred::Var(x) => x == var,
            p => p.children().into_iter().any(|c| c.mentions(var)),
        }
    }

    /// Pre-order list of application nodes.
    pub fn apps(&self) -> Vec<&Pred> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Pred, out: &mut Vec<&'a Pred>) {
            if let Pred::App(..) = p {
                out.push(p);
            }
            for c in p.children() {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }

    /// Simultaneous substitution. Predicates have no binders, so this is
    /// trivially capture-free; binder-carrying types handle renaming.
    pub fn subst(&self, map: &HashMap<String, Pred>) -> Pred {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Pred::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            p => p.map_children(|c| c.subst(map)),
        }
    }

    pub fn subst1(&self, var: &str, term: &Pred) -> Pred {
        let mut map = HashMap::new();
        map.insert(var.to_string(), term.clone());
        self.subst(&map)
    }

    pub fn rename(&self, from: &str, to: &str) -> Pred {
        if from == to {
            return self.clone();
        }
        self.subst1(from, &Pred::var(to))
    }

    /// Structural equality that also accepts swapped operands of `==`, `&&`, `||`.
    pub fn equiv_modulo_symmetry(&self, other: &Pred) -> bool {
        match (self, other) {
            (Pred::Bin(op1, a1, b1), Pred::Bin(op2, a2, b2)) if op1 == op2 => {
                let direct = a1.equiv_modulo_symmetry(a2) && b1.equiv_modulo_symmetry(b2);
                let symmetric = matches!(op1, BinOp::Eq | BinOp::Ne | BinOp::And | BinOp::Or)
                    && a1.equiv_modulo_symmetry(b2)
                    && b1.equiv_modulo_symmetry(a2);
                direct || symmetric
            }
            (Pred::App(f, xs), Pred::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.equiv_modulo_symmetry(y))
            }
            (Pred::Cons(a1, b1), Pred::Cons(a2, b2)) => a1.equiv_modulo_symmetry(a2) && b1.equiv_modulo_symmetry(b2),
            (Pred::Not(a), Pred::Not(b)) => a.equiv_modulo_symmetry(b),
            (a, b) => a == b,
        }
    }

    pub fn write_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        match self {
            Pred::Int(n) if *n < 0 => write!(f, "({n})"),
            Pred::Int(n) => write!(f, "{n}"),
            Pred::Bool(b) => write!(f, "{b}"),
            Pred::Unit => f.write_str("()"),
            Pred::Var(x) => f.write_str(x),
            Pred::Nil => f.write_str("[]"),
            Pred::Cons(h, t) => {
                f.write_str("(")?;
                h.write_prec(f, prec::CONS + 1)?;
                f.write_str(":")?;
                t.write_prec(f, prec::CONS)?;
                f.write_str(")")
            }
            Pred::Bin(op, a, b) => {
                let (level, _) = op.fixity();
                let (lp, rp) = op.child_prec();
                let paren = level < ctx;
                if paren {
                    f.write_str("(")?;
                }
                a.write_prec(f, lp)?;
                write!(f, " {} ", op.symbol())?;
                b.write_prec(f, rp)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Pred::Not(a) => {
                let paren = prec::APP < ctx;
                if paren {
                    f.write_str("(")?;
                }
                f.write_str("not ")?;
                a.write_prec(f, prec::ATOM)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Pred::App(g, args) => {
                let paren = !args.is_empty() && prec::APP < ctx;
                if paren {
                    f.write_str("(")?;
                }
                f.write_str(g)?;
                for a in args {
                    f.write_str(" ")?;
                    a.write_prec(f, prec::ATOM)?;
                }
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Pred::Ite(c, a, b) => {
                let paren = prec::IF < ctx;
                if paren {
                    f.write_str("(")?;
                }
                f.write_str("if ")?;
                c.write_prec(f, prec::IF)?;
                f.write_str(" then ")?;
                a.write_prec(f, prec::IF)?;
                f.write_str(" else ")?;
                b.write_prec(f, prec::IF)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Pred {
        Pred::var(x)
    }

    #[test]
    fn prints_surface_syntax() {
        let p = Pred::eq(
            Pred::bin(BinOp::Mod, Pred::add(v("x"), v("y")), Pred::Int(2)),
            Pred::Int(1),
        );
        assert_eq!(p.to_string(), "(x + y) mod 2 == 1");
        let q = Pred::and(
            Pred::eq(v("xs"), Pred::cons(v("y"), v("ys"))),
            Pred::eq(Pred::app("listLength", vec![v("xs")]), Pred::len(v("xs"))),
        );
        assert_eq!(q.to_string(), "xs == (y:ys) && listLength xs == len xs");
        assert_eq!(Pred::len(Pred::Nil).to_string(), "len []");
    }

    #[test]
    fn left_nested_conjunction_keeps_parens() {
        let p = Pred::bin(BinOp::And, Pred::bin(BinOp::And, v("a"), v("b")), v("c"));
        assert_eq!(p.to_string(), "(a && b) && c");
    }

    #[test]
    fn negative_literals_are_parenthesized() {
        assert_eq!(Pred::add(v("x"), Pred::Int(-3)).to_string(), "x + (-3)");
        let sub = Pred::bin(BinOp::Sub, v("a"), Pred::bin(BinOp::Sub, v("b"), v("c")));
        assert_eq!(sub.to_string(), "a - (b - c)");
    }

    #[test]
    fn and_all_skips_true() {
        assert_eq!(Pred::and_all([]), Pred::Bool(true));
        let p = Pred::and_all([Pred::Bool(true), v("a"), v("b")]);
        assert_eq!(p.to_string(), "a && b");
        assert_eq!(p.conjuncts().len(), 2);
    }

    #[test]
    fn substitution_is_simultaneous() {
        let p = Pred::eq(v("x"), v("y"));
        let mut m = HashMap::new();
        m.insert("x".to_string(), v("y"));
        m.insert("y".to_string(), v("x"));
        assert_eq!(p.subst(&m).to_string(), "y == x");
    }

    #[test]
    fn symmetric_equivalence() {
        let a = Pred::eq(v("p"), v("q"));
        let b = Pred::eq(v("q"), v("p"));
        assert!(a.equiv_modulo_symmetry(&b));
        assert!(!Pred::bin(BinOp::Lt, v("p"), v("q")).equiv_modulo_symmetry(&Pred::bin(BinOp::Lt, v("q"), v("p"))));
    }
}
