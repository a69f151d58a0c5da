use std::fmt::{self, Write};

use super::ast::*;
use crate::logic::pred::prec;

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for a in &p.aliases {
        let _ = writeln!(out, "type {} = {}", a.name, a.def);
    }
    for (i, d) in p.decls.iter().enumerate() {
        if i > 0 || !p.aliases.is_empty() {
            out.push('\n');
        }
        out.push_str(&print_decl(d));
    }
    out
}

pub fn print_decl(d: &Decl) -> String {
    let mut out = format!("{} :: {}\n", d.name, d.sig);
    for c in &d.clauses {
        out.push_str(&print_clause(&d.name, c));
        out.push('\n');
    }
    out
}

pub fn print_clause(name: &str, c: &Clause) -> String {
    let mut out = name.to_string();
    for p in &c.pats {
        out.push(' ');
        out.push_str(&print_pattern(p));
    }
    let _ = write!(out, " = {}", c.body);
    out
}

pub fn print_pattern(p: &Pattern) -> String {
    match &p.kind {
        PatKind::Var(x) => x.clone(),
        PatKind::Wildcard => "_".into(),
        PatKind::Nil => "[]".into(),
        PatKind::Cons(h, t) => format!("({h}:{t})"),
        PatKind::Int(n) if *n < 0 => format!("({n})"),
        PatKind::Int(n) => n.to_string(),
    }
}

impl Expr {
    /// Whether printing this expression needs no parentheses as an argument.
    pub fn is_atomic(&self) -> bool {
        match &self.kind {
            ExprKind::Int(n) => *n >= 0,
            ExprKind::Bool(_) | ExprKind::Unit | ExprKind::Var(_) | ExprKind::Nil | ExprKind::Hole(_) => true,
            _ => false,
        }
    }

    pub fn write_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, level: u8, body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
            if level < ctx {
                f.write_str("(")?;
                body(f)?;
                f.write_str(")")
            } else {
                body(f)
            }
        };
        match &self.kind {
            ExprKind::Int(n) if *n < 0 => write!(f, "({n})"),
            ExprKind::Int(n) => write!(f, "{n}"),
            ExprKind::Bool(true) => f.write_str("True"),
            ExprKind::Bool(false) => f.write_str("False"),
            ExprKind::Unit => f.write_str("()"),
            ExprKind::Var(x) | ExprKind::Hole(x) => f.write_str(x),
            ExprKind::Nil => f.write_str("[]"),
            ExprKind::Cons(h, t) => wrap(f, prec::CONS, &|f| {
                h.write_prec(f, prec::CONS + 1)?;
                f.write_str(" : ")?;
                t.write_prec(f, prec::CONS)
            }),
            ExprKind::Binary(op, a, b) => {
                let (level, _) = op.fixity();
                let (lp, rp) = op.child_prec();
                wrap(f, level, &|f| {
                    a.write_prec(f, lp)?;
                    write!(f, " {} ", op.symbol())?;
                    b.write_prec(f, rp)
                })
            }
            ExprKind::Proof(a, b) => wrap(f, prec::PROOF, &|f| {
                a.write_prec(f, prec::PROOF)?;
                f.write_str(" ? ")?;
                b.write_prec(f, prec::PROOF + 1)
            }),
            ExprKind::Not(a) => wrap(f, prec::APP, &|f| {
                f.write_str("not ")?;
                a.write_prec(f, prec::ATOM)
            }),
            ExprKind::App(g, args) => wrap(f, prec::APP, &|f| {
                f.write_str(g)?;
                for a in args {
                    f.write_str(" ")?;
                    a.write_prec(f, prec::ATOM)?;
                }
                Ok(())
            }),
            ExprKind::If(c, t, e) => wrap(f, prec::IF, &|f| {
                f.write_str("if ")?;
                c.write_prec(f, prec::IF)?;
                f.write_str(" then ")?;
                t.write_prec(f, prec::IF)?;
                f.write_str(" else ")?;
                e.write_prec(f, prec::IF)
            }),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}
