use std::fmt;

use crate::diagnostic::Span;
use crate::logic::{BinOp, Pred, RType};

/// A parsed source file. Equality ignores spans.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub aliases: Vec<AliasDecl>,
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone)]
pub struct AliasDecl {
    pub name: String,
    pub def: RType,
    pub span: Span,
}

impl PartialEq for AliasDecl {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name && self.def == o.def
    }
}
impl Eq for AliasDecl {}

/// A signature together with its clauses.
#[derive(Debug, Clone)]
pub struct Decl {
    pub name: String,
    pub sig: RType,
    pub sig_span: Span,
    pub clauses: Vec<Clause>,
}

impl PartialEq for Decl {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name && self.sig == o.sig && self.clauses == o.clauses
    }
}
impl Eq for Decl {}

impl Decl {
    pub fn span(&self) -> Span {
        self.clauses.iter().fold(self.sig_span, |s, c| s.join(c.span))
    }
}

#[derive(Debug, Clone)]
pub struct Clause {
    pub pats: Vec<Pattern>,
    pub body: Expr,
    /// From the function name to the end of the body.
    pub span: Span,
}

impl PartialEq for Clause {
    fn eq(&self, o: &Self) -> bool {
        self.pats == o.pats && self.body == o.body
    }
}
impl Eq for Clause {}

#[derive(Debug, Clone)]
pub struct Pattern {
    pub kind: PatKind,
    pub span: Span,
}

impl PartialEq for Pattern {
    fn eq(&self, o: &Self) -> bool {
        self.kind == o.kind
    }
}
impl Eq for Pattern {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatKind {
    Var(String),
    Wildcard,
    Nil,
    /// `(h:t)`; either name may be `_`.
    Cons(String, String),
    Int(i64),
}

impl Pattern {
    pub fn new(kind: PatKind) -> Pattern {
        Pattern {
            kind,
            span: Span::default(),
        }
    }

    pub fn bound_names(&self) -> Vec<&str> {
        match &self.kind {
            PatKind::Var(x) => vec![x],
            PatKind::Cons(h, t) => [h, t]
                .into_iter()
                .filter(|n| n.as_str() != "_")
                .map(String::as_str)
                .collect(),
            _ => vec![],
        }
    }

    pub fn is_ctor(&self) -> bool {
        matches!(self.kind, PatKind::Nil | PatKind::Cons(..))
    }
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, o: &Self) -> bool {
        self.kind == o.kind
    }
}
impl Eq for Expr {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Unit,
    Var(String),
    Nil,
    Cons(Box<Expr>, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    App(String, Vec<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `e ? p`: evaluates to `e`, with `p`'s refinement in scope.
    Proof(Box<Expr>, Box<Expr>),
    Hole(String),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span }
    }

    /// Span-less constructor for generated code and tests.
    pub fn synth(kind: ExprKind) -> Expr {
        Expr::new(kind, Span::default())
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Int(_)
            | ExprKind::Bool(_)
            | ExprKind::Unit
            | ExprKind::Var(_)
            | ExprKind::Nil
            | ExprKind::Hole(_) => vec![],
            ExprKind::Cons(a, b) | ExprKind::Binary(_, a, b) | ExprKind::Proof(a, b) => {
                vec![a, b]
            }
            ExprKind::Not(a) => vec![a],
            ExprKind::App(_, args) => args.iter().collect(),
            ExprKind::If(c, t, e) => vec![c, t, e],
        }
    }

    pub fn contains_hole(&self) -> bool {
        matches!(self.kind, ExprKind::Hole(_)) || self.children().iter().any(|c| c.contains_hole())
    }

    /// The logic term this expression denotes, if it is a pure logic term.
    pub fn to_pred(&self) -> Option<Pred> {
        Some(match &self.kind {
            ExprKind::Int(n) => Pred::Int(*n),
            ExprKind::Bool(b) => Pred::Bool(*b),
            ExprKind::Unit => Pred::Unit,
            ExprKind::Var(x) => Pred::var(x),
            ExprKind::Nil => Pred::Nil,
            ExprKind::Cons(h, t) => Pred::cons(h.to_pred()?, t.to_pred()?),
            ExprKind::Binary(op, a, b) => Pred::bin(*op, a.to_pred()?, b.to_pred()?),
            ExprKind::Not(a) => Pred::not(a.to_pred()?),
            ExprKind::App(f, args) => Pred::app(f.clone(), args.iter().map(Expr::to_pred).collect::<Option<_>>()?),
            ExprKind::If(c, t, e) => Pred::Ite(Box::new(c.to_pred()?), Box::new(t.to_pred()?), Box::new(e.to_pred()?)),
            ExprKind::Proof(..) | ExprKind::Hole(_) => return None,
        })
    }

    /// Inverse of `to_pred` for printing; spans are empty.
    pub fn from_pred(p: &Pred) -> Expr {
        let b = |q: &Pred| Box::new(Expr::from_pred(q));
        Expr::synth(match p {
            Pred::Int(n) => ExprKind::Int(*n),
            Pred::Bool(v) => ExprKind::Bool(*v),
            Pred::Unit => ExprKind::Unit,
            Pred::Var(x) => ExprKind::Var(x.clone()),
            Pred::Nil => ExprKind::Nil,
            Pred::Cons(h, t) => ExprKind::Cons(b(h), b(t)),
            Pred::Bin(op, x, y) => ExprKind::Binary(*op, b(x), b(y)),
            Pred::Not(x) => ExprKind::Not(b(x)),
            Pred::Ite(c, x, y) => ExprKind::If(b(c), b(x), b(y)),
            Pred::App(f, args) => ExprKind::App(f.clone(), args.iter().map(Expr::from_pred).collect()),
        })
    }
}

/// One step from an expression to one of its children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathStep {
    BinLeft(BinOp),
    BinRight(BinOp),
    ConsHead,
    ConsTail,
    Not,
    Arg(String, usize),
    IfCond,
    IfThen,
    IfElse,
    ProofLeft,
    ProofRight,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathStep::BinLeft(op) => write!(f, "left of `{}`", op.symbol()),
            PathStep::BinRight(op) => write!(f, "right of `{}`", op.symbol()),
            PathStep::ConsHead => f.write_str("head of `:`"),
            PathStep::ConsTail => f.write_str("tail of `:`"),
            PathStep::Not => f.write_str("operand of `not`"),
            PathStep::Arg(g, i) => write!(f, "argument {} of `{g}`", i + 1),
            PathStep::IfCond => f.write_str("condition of `if`"),
            PathStep::IfThen => f.write_str("`then` branch"),
            PathStep::IfElse => f.write_str("`else` branch"),
            PathStep::ProofLeft => f.write_str("left of `?`"),
            PathStep::ProofRight => f.write_str("right of `?`"),
        }
    }
}

/// A syntactic hole occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleSite {
    pub name: String,
    pub span: Span,
    pub decl: String,
    /// Index of the clause within its declaration.
    pub clause: usize,
    /// Steps from the clause body down to the hole; empty at the root.
    pub path: Vec<PathStep>,
}

impl HoleSite {
    pub fn at_root(&self) -> bool {
        self.path.is_empty()
    }
}

pub fn holes_of(p: &Program) -> Vec<HoleSite> {
    fn go(e: &Expr, path: &mut Vec<PathStep>, decl: &str, clause: usize, out: &mut Vec<HoleSite>) {
        let mut visit = |step: PathStep, c: &Expr, path: &mut Vec<PathStep>| {
            path.push(step);
            go(c, path, decl, clause, out);
            path.pop();
        };
        match &e.kind {
            ExprKind::Hole(name) => out.push(HoleSite {
                name: name.clone(),
                span: e.span,
                decl: decl.to_string(),
                clause,
                path: path.clone(),
            }),
            ExprKind::Cons(h, t) => {
                visit(PathStep::ConsHead, h, path);
                visit(PathStep::ConsTail, t, path);
            }
            ExprKind::Binary(op, a, b) => {
                visit(PathStep::BinLeft(*op), a, path);
                visit(PathStep::BinRight(*op), b, path);
            }
            ExprKind::Not(a) => visit(PathStep::Not, a, path),
            ExprKind::App(g, args) => {
                for (i, a) in args.iter().enumerate() {
                    visit(PathStep::Arg(g.clone(), i), a, path);
                }
            }
            ExprKind::If(c, t, f) => {
                visit(PathStep::IfCond, c, path);
                visit(PathStep::IfThen, t, path);
                visit(PathStep::IfElse, f, path);
            }
            ExprKind::Proof(a, b) => {
                visit(PathStep::ProofLeft, a, path);
                visit(PathStep::ProofRight, b, path);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    for d in &p.decls {
        for (i, c) in d.clauses.iter().enumerate() {
            go(&c.body, &mut Vec::new(), &d.name, i, &mut out);
        }
    }
    out.sort_by_key(|h| h.span.start);
    out
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn hole(&self, name: &str) -> Option<HoleSite> {
        holes_of(self).into_iter().find(|h| h.name == name)
    }
}
