use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use thiserror::Error;

use super::reflect::ReflectionTable;
use crate::logic::{BinOp, Pred, Sort, SortCtx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("nonlinear multiplication is not supported: `{0}`")]
    Nonlinear(String),
    #[error("`mod` needs a nonzero literal divisor: `{0}`")]
    Mod(String),
    #[error("ill-sorted term `{0}`: {1}")]
    IllSorted(String, String),
}

/// A validity query: do `hyps` entail `goal` for all values of `vars`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub vars: BTreeMap<String, Sort>,
    pub hyps: Vec<Pred>,
    pub goal: Pred,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub script: String,
    /// SMT symbol to source variable name.
    pub symbols: BTreeMap<String, String>,
}

const RESERVED: &[&str] = &[
    "and", "or", "not", "ite", "mod", "div", "abs", "true", "false", "let", "forall", "exists", "as", "par", "match",
    "distinct", "nil", "cons", "hd", "tl", "unit", "Int", "Bool", "List", "Unit", "T", "assert", "check", "model",
    "define", "declare", "push", "pop", "reset", "exit", "echo", "to_real", "to_int", "is_int", "is",
];

/// SMT symbol for a source variable.
pub fn symbol(name: &str) -> String {
    let simple = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "_";
    if simple && !RESERVED.contains(&name) {
        name.to_string()
    } else if name.contains('|') || name.contains('\\') {
        // cannot occur for lexer-produced names; keep it well-formed anyway
        format!("|'{}|", name.replace(['|', '\\'], "?"))
    } else if simple {
        format!("|'{name}|")
    } else {
        format!("|{name}|")
    }
}

pub fn fn_symbol(name: &str) -> String {
    format!("fn.{name}")
}

fn mangle(s: &Sort) -> String {
    match s {
        Sort::Int | Sort::Any => "Int".into(),
        Sort::Bool => "Bool".into(),
        Sort::Unit => "Unit".into(),
        Sort::Var(a) => format!("s.{a}"),
        Sort::List(e) => format!("List_{}", mangle(e)),
    }
}

pub fn smt_sort(s: &Sort) -> String {
    match s {
        Sort::Int | Sort::Any => "Int".into(),
        Sort::Bool => "Bool".into(),
        Sort::Unit => "Unit".into(),
        Sort::Var(a) => format!("s.{a}"),
        Sort::List(e) => format!("(List {})", smt_sort(e)),
    }
}

fn defaulted(s: &Sort) -> Sort {
    match s {
        Sort::Any => Sort::Int,
        Sort::List(e) => Sort::list(defaulted(e)),
        s => s.clone(),
    }
}

struct Enc<'a> {
    ctx: SortCtx<'a>,
    table: &'a ReflectionTable,
    len_sorts: BTreeSet<Sort>,
    fns: BTreeSet<String>,
    sorts: BTreeSet<Sort>,
}

impl<'a> Enc<'a> {
    fn note_sort(&mut self, s: &Sort) {
        match s {
            Sort::Var(_) | Sort::Unit => {
                self.sorts.insert(s.clone());
            }
            Sort::List(e) => self.note_sort(e),
            _ => {}
        }
    }

    fn infer(&self, p: &Pred) -> Result<Sort, EncodeError> {
        self.ctx
            .infer(p)
            .map_err(|e| EncodeError::IllSorted(p.to_string(), e.to_string()))
    }

    fn term(&mut self, p: &Pred, expected: &Sort, out: &mut String) -> Result<(), EncodeError> {
        match p {
            Pred::Int(n) if *n < 0 => write!(out, "(- {})", n.unsigned_abs()).unwrap(),
            Pred::Int(n) => write!(out, "{n}").unwrap(),
            Pred::Bool(b) => write!(out, "{b}").unwrap(),
            Pred::Unit => {
                self.sorts.insert(Sort::Unit);
                out.push_str("unit")
            }
            Pred::Var(x) => out.push_str(&symbol(x)),
            Pred::Nil => {
                let s = defaulted(&match expected {
                    Sort::List(_) => expected.clone(),
                    _ => Sort::list(Sort::Any),
                });
                self.note_sort(&s);
                write!(out, "(as nil {})", smt_sort(&s)).unwrap()
            }
            Pred::Cons(h, t) => {
                let hs = self.infer(h)?;
                let elem = match expected {
                    Sort::List(e) => hs.join(e),
                    _ => hs,
                };
                let ts = self.infer(t)?.join(&Sort::list(elem.clone()));
                out.push_str("(cons ");
                self.term(h, &elem, out)?;
                out.push(' ');
                self.term(t, &ts, out)?;
                out.push(')');
            }
            Pred::Bin(op, a, b) => self.bin(p, *op, a, b, out)?,
            Pred::Not(a) => {
                out.push_str("(not ");
                self.term(a, &Sort::Bool, out)?;
                out.push(')');
            }
            Pred::Ite(c, a, b) => {
                let s = self.infer(a)?.join(&self.infer(b)?).join(expected);
                out.push_str("(ite ");
                self.term(c, &Sort::Bool, out)?;
                out.push(' ');
                self.term(a, &s, out)?;
                out.push(' ');
                self.term(b, &s, out)?;
                out.push(')');
            }
            Pred::App(f, args) if f == "len" && args.len() == 1 => {
                let s = defaulted(&self.infer(&args[0])?.join(&Sort::list(Sort::Any)));
                self.note_sort(&s);
                let elem = s.elem().cloned().unwrap_or(Sort::Int);
                write!(out, "(len.{} ", mangle(&elem)).unwrap();
                self.len_sorts.insert(elem);
                self.term(&args[0], &s, out)?;
                out.push(')');
            }
            Pred::App(f, args) => {
                let (params, _) = self
                    .table
                    .signature_of(f)
                    .ok_or_else(|| EncodeError::IllSorted(p.to_string(), format!("unknown function `{f}`")))?;
                self.fns.insert(f.clone());
                if args.is_empty() {
                    out.push_str(&fn_symbol(f));
                } else {
                    write!(out, "({}", fn_symbol(f)).unwrap();
                    for (a, s) in args.iter().zip(&params) {
                        out.push(' ');
                        self.term(a, s, out)?;
                    }
                    out.push(')');
                }
            }
        }
        Ok(())
    }

    fn bin(&mut self, whole: &Pred, op: BinOp, a: &Pred, b: &Pred, out: &mut String) -> Result<(), EncodeError> {
        let int = Sort::Int;
        match op {
            BinOp::Mod => {
                let Pred::Int(n) = b else {
                    return Err(EncodeError::Mod(whole.to_string()));
                };
                match n.signum() {
                    1 => {
                        out.push_str("(mod ");
                        self.term(a, &int, out)?;
                        write!(out, " {n})").unwrap();
                    }
                    -1 => {
                        // Haskell `mod` takes the divisor's sign
                        out.push_str("(- (mod (- ");
                        self.term(a, &int, out)?;
                        write!(out, ") {}))", n.unsigned_abs()).unwrap();
                    }
                    _ => return Err(EncodeError::Mod(whole.to_string())),
                }
                return Ok(());
            }
            BinOp::Mul if !matches!(a, Pred::Int(_)) && !matches!(b, Pred::Int(_)) => {
                return Err(EncodeError::Nonlinear(whole.to_string()));
            }
            _ => {}
        }
        let (head, sort) = match op {
            BinOp::Add => ("+", int),
            BinOp::Sub => ("-", int),
            BinOp::Mul => ("*", int),
            BinOp::Lt => ("<", int),
            BinOp::Le => ("<=", int),
            BinOp::Gt => (">", int),
            BinOp::Ge => (">=", int),
            BinOp::And => ("and", Sort::Bool),
            BinOp::Or => ("or", Sort::Bool),
            BinOp::Implies => ("=>", Sort::Bool),
            BinOp::Eq | BinOp::Ne => {
                let s = defaulted(&self.infer(a)?.join(&self.infer(b)?));
                self.note_sort(&s);
                out.push_str(if op == BinOp::Ne { "(not (= " } else { "(= " });
                self.term(a, &s, out)?;
                out.push(' ');
                self.term(b, &s, out)?;
                out.push_str(if op == BinOp::Ne { "))" } else { ")" });
                return Ok(());
            }
            BinOp::Mod => unreachable!(),
        };
        write!(out, "({head} ").unwrap();
        self.term(a, &sort, out)?;
        out.push(' ');
        self.term(b, &sort, out)?;
        out.push(')');
        Ok(())
    }
}

impl ReflectionTable {
    fn signature_of(&self, f: &str) -> Option<(Vec<Sort>, Sort)> {
        crate::logic::Signatures::signature(self, f)
    }
}

/// Encodes `vars. hyps => goal` as a satisfiability check of
/// `hyps && not goal`; byte-identical output for identical queries.
pub fn encode_query(q: &Query, table: &ReflectionTable) -> Result<Encoded, EncodeError> {
    let mut ctx = SortCtx::new(table);
    for (x, s) in &q.vars {
        ctx.insert(x, s.clone());
    }
    let mut enc = Enc {
        ctx,
        table,
        len_sorts: BTreeSet::new(),
        fns: BTreeSet::new(),
        sorts: BTreeSet::new(),
    };
    for s in q.vars.values() {
        enc.note_sort(s);
    }
    for t in q.hyps.iter().chain(std::iter::once(&q.goal)) {
        if let Some(x) = t.free_vars().into_iter().find(|x| !q.vars.contains_key(x)) {
            return Err(EncodeError::IllSorted(
                t.to_string(),
                format!("undeclared variable `{x}`"),
            ));
        }
    }
    let mut body = String::new();
    for h in &q.hyps {
        body.push_str("(assert ");
        enc.term(h, &Sort::Bool, &mut body)?;
        body.push_str(")\n");
    }
    body.push_str("(assert (not ");
    enc.term(&q.goal, &Sort::Bool, &mut body)?;
    body.push_str("))\n(check-sat)\n");

    // reflected signatures may mention further sorts
    let fns: Vec<(String, Vec<Sort>, Sort)> = enc
        .fns
        .iter()
        .filter_map(|f| table.signature_of(f).map(|(p, r)| (f.clone(), p, r)))
        .collect();
    for (_, ps, r) in &fns {
        for s in ps.iter().chain(std::iter::once(r)) {
            enc.note_sort(s);
        }
    }

    let mut s = String::new();
    s.push_str("(set-option :produce-models true)\n(set-logic QF_UFDTLIA)\n");
    for so in &enc.sorts {
        if let Sort::Var(a) = so {
            writeln!(s, "(declare-sort s.{a} 0)").unwrap();
        }
    }
    if enc.sorts.contains(&Sort::Unit) {
        s.push_str("(declare-datatypes ((Unit 0)) (((unit))))\n");
    }
    s.push_str("(declare-datatypes ((List 1)) ((par (T) ((nil) (cons (hd T) (tl (List T)))))))\n");
    for e in &enc.len_sorts {
        writeln!(
            s,
            "(declare-fun len.{} ({}) Int)",
            mangle(e),
            smt_sort(&Sort::list(e.clone()))
        )
        .unwrap();
    }
    for (f, ps, r) in &fns {
        let params: Vec<String> = ps.iter().map(smt_sort).collect();
        writeln!(
            s,
            "(declare-fun {} ({}) {})",
            fn_symbol(f),
            params.join(" "),
            smt_sort(r)
        )
        .unwrap();
    }
    let mut symbols = BTreeMap::new();
    for (x, so) in &q.vars {
        let sym = symbol(x);
        writeln!(s, "(declare-const {} {})", sym, smt_sort(&defaulted(so))).unwrap();
        symbols.insert(sym, x.clone());
    }
    s.push_str(&body);
    Ok(Encoded { script: s, symbols })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odd(x: &str) -> Pred {
        Pred::eq(Pred::bin(BinOp::Mod, Pred::var(x), Pred::Int(2)), Pred::Int(1))
    }

    #[test]
    fn odd_add_script_shape() {
        let q = Query {
            vars: [("x".to_string(), Sort::Int), ("y".to_string(), Sort::Int)].into(),
            hyps: vec![odd("x"), odd("y")],
            goal: Pred::eq(
                Pred::bin(BinOp::Mod, Pred::add(Pred::var("x"), Pred::var("y")), Pred::Int(2)),
                Pred::Int(0),
            ),
        };
        let e = encode_query(&q, &ReflectionTable::default()).unwrap();
        assert!(e.script.contains("(set-logic QF_UFDTLIA)"));
        assert!(e.script.contains("(declare-const x Int)"));
        assert!(e.script.contains("(assert (= (mod x 2) 1))"));
        assert!(e.script.contains("(assert (not (= (mod (+ x y) 2) 0)))"));
        assert!(e.script.ends_with("(check-sat)\n"));
        assert_eq!(encode_query(&q, &ReflectionTable::default()).unwrap(), e);
    }

    #[test]
    fn nil_gets_annotated_and_lists_get_measures() {
        let q = Query {
            vars: [("xs".to_string(), Sort::list(Sort::Var("a".into())))].into(),
            hyps: vec![Pred::eq(Pred::var("xs"), Pred::Nil)],
            goal: Pred::eq(Pred::len(Pred::var("xs")), Pred::Int(0)),
        };
        let e = encode_query(&q, &ReflectionTable::default()).unwrap();
        assert!(e.script.contains("(declare-sort s.a 0)"));
        assert!(e.script.contains("(as nil (List s.a))"));
        assert!(e.script.contains("(declare-fun len.s.a ((List s.a)) Int)"));
    }

    #[test]
    fn negative_modulus_and_nonlinear() {
        let q = Query {
            vars: [("x".to_string(), Sort::Int)].into(),
            hyps: vec![],
            goal: Pred::eq(Pred::bin(BinOp::Mod, Pred::var("x"), Pred::Int(-3)), Pred::Int(0)),
        };
        let e = encode_query(&q, &ReflectionTable::default()).unwrap();
        assert!(e.script.contains("(- (mod (- x) 3))"));
        let bad = Query {
            vars: [("x".to_string(), Sort::Int)].into(),
            hyps: vec![],
            goal: Pred::eq(Pred::bin(BinOp::Mul, Pred::var("x"), Pred::var("x")), Pred::Int(4)),
        };
        assert!(matches!(
            encode_query(&bad, &ReflectionTable::default()),
            Err(EncodeError::Nonlinear(_))
        ));
    }

    #[test]
    fn symbols_are_quoted_when_needed() {
        assert_eq!(symbol("x"), "x");
        assert_eq!(symbol("x'"), "|x'|");
        assert_eq!(symbol("nil"), "|'nil|");
        assert_eq!(symbol("_t3"), "_t3");
    }
}
