use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::ast::*;
use crate::logic::BinOp;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Unit,
    List(Vec<Value>),
    /// An element of an opaque type such as the `a` in `[a]`.
    Atom(String),
    /// A top-level function applied to fewer arguments than it takes.
    Closure(String, Vec<Value>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
            Value::Unit => f.write_str("()"),
            Value::Atom(a) => f.write_str(a),
            Value::List(xs) => {
                f.write_str("[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
            Value::Closure(g, args) => {
                write!(f, "<{g}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(">")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation reached hole `{0}`")]
    Hole(String),
    #[error("no clause of `{0}` matches the arguments")]
    MatchFailure(String),
    #[error("division by zero in `mod`")]
    DivByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("`{name}` takes {expected} argument(s), given {given}")]
    Arity {
        name: String,
        expected: usize,
        given: usize,
    },
    #[error("type error: {0}")]
    Type(String),
    #[error("recursion depth limit exceeded")]
    Depth,
}

/// Haskell's `mod`: the result has the sign of the divisor.
pub fn haskell_mod(a: i64, n: i64) -> i64 {
    let r = a.wrapping_rem(n);
    if r != 0 && ((r < 0) != (n < 0)) {
        r + n
    } else {
        r
    }
}

pub struct Evaluator<'p> {
    prog: &'p Program,
    arity: HashMap<&'p str, usize>,
    pub max_depth: usize,
}

impl<'p> Evaluator<'p> {
    pub fn new(prog: &'p Program) -> Self {
        let arity = prog.decls.iter().map(|d| (d.name.as_str(), d.sig.arity())).collect();
        Evaluator {
            prog,
            arity,
            max_depth: 2_000,
        }
    }

    pub fn call(&self, name: &str, args: Vec<Value>) -> Result<Value, EvalError> {
        self.call_at(name, args, 0)
    }

    fn call_at(&self, name: &str, args: Vec<Value>, depth: usize) -> Result<Value, EvalError> {
        if depth > self.max_depth {
            return Err(EvalError::Depth);
        }
        let decl = self
            .prog
            .decl(name)
            .ok_or_else(|| EvalError::UnknownFunction(name.to_string()))?;
        let arity = decl.sig.arity();
        if args.len() < arity {
            return Ok(Value::Closure(name.to_string(), args));
        }
        if args.len() > arity {
            return Err(EvalError::Arity {
                name: name.to_string(),
                expected: arity,
                given: args.len(),
            });
        }
        for c in &decl.clauses {
            let mut env = HashMap::new();
            let n = c.pats.len();
            if c.pats.iter().zip(&args).all(|(p, v)| bind(p, v, &mut env)) {
                let v = self.eval(&c.body, &env, depth + 1)?;
                let rest = args[n..].to_vec();
                return if rest.is_empty() {
                    Ok(v)
                } else {
                    self.apply(v, rest, depth + 1)
                };
            }
        }
        Err(EvalError::MatchFailure(name.to_string()))
    }

    fn apply(&self, f: Value, rest: Vec<Value>, depth: usize) -> Result<Value, EvalError> {
        match f {
            Value::Closure(g, mut args) => {
                args.extend(rest);
                self.call_at(&g, args, depth)
            }
            other => Err(EvalError::Type(format!("cannot apply {other}"))),
        }
    }

    pub fn eval(&self, e: &Expr, env: &HashMap<String, Value>, depth: usize) -> Result<Value, EvalError> {
        let ev = |x: &Expr| self.eval(x, env, depth);
        let int = |x: &Expr| match ev(x)? {
            Value::Int(n) => Ok(n),
            v => Err(EvalError::Type(format!("expected an integer, found {v}"))),
        };
        let boolean = |x: &Expr| match ev(x)? {
            Value::Bool(b) => Ok(b),
            v => Err(EvalError::Type(format!("expected a boolean, found {v}"))),
        };
        Ok(match &e.kind {
            ExprKind::Int(n) => Value::Int(*n),
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::Unit => Value::Unit,
            ExprKind::Nil => Value::List(vec![]),
            ExprKind::Hole(h) => return Err(EvalError::Hole(h.clone())),
            ExprKind::Var(x) => match env.get(x) {
                Some(v) => v.clone(),
                None if self.arity.contains_key(x.as_str()) => self.call_at(x, vec![], depth + 1)?,
                None => return Err(EvalError::Unbound(x.clone())),
            },
            ExprKind::Cons(h, t) => {
                let h = ev(h)?;
                match ev(t)? {
                    Value::List(mut xs) => {
                        xs.insert(0, h);
                        Value::List(xs)
                    }
                    v => return Err(EvalError::Type(format!("cons onto non-list {v}"))),
                }
            }
            ExprKind::Binary(op, a, b) => match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul => {
                    let (x, y) = (int(a)?, int(b)?);
                    let r = match op {
                        BinOp::Add => x.checked_add(y),
                        BinOp::Sub => x.checked_sub(y),
                        _ => x.checked_mul(y),
                    };
                    Value::Int(r.ok_or(EvalError::Overflow)?)
                }
                BinOp::Mod => {
                    let (x, y) = (int(a)?, int(b)?);
                    if y == 0 {
                        return Err(EvalError::DivByZero);
                    }
                    Value::Int(haskell_mod(x, y))
                }
                BinOp::Eq => Value::Bool(ev(a)? == ev(b)?),
                BinOp::Ne => Value::Bool(ev(a)? != ev(b)?),
                BinOp::Lt => Value::Bool(int(a)? < int(b)?),
                BinOp::Le => Value::Bool(int(a)? <= int(b)?),
                BinOp::Gt => Value::Bool(int(a)? > int(b)?),
                BinOp::Ge => Value::Bool(int(a)? >= int(b)?),
                BinOp::And => Value::Bool(boolean(a)? && boolean(b)?),
                BinOp::Or => Value::Bool(boolean(a)? || boolean(b)?),
                BinOp::Implies => Value::Bool(!boolean(a)? || boolean(b)?),
            },
            ExprKind::Not(a) => Value::Bool(!boolean(a)?),
            ExprKind::If(c, t, f) => {
                if boolean(c)? {
                    ev(t)?
                } else {
                    ev(f)?
                }
            }
            // the proof term only matters to the checker
            ExprKind::Proof(a, _) => ev(a)?,
            ExprKind::App(g, args) => {
                let vals = args.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
                if g == "len" && !self.arity.contains_key("len") {
                    return match vals.as_slice() {
                        [Value::List(xs)] => Ok(Value::Int(xs.len() as i64)),
                        _ => Err(EvalError::Type("`len` expects one list".into())),
                    };
                }
                match env.get(g) {
                    Some(f) => self.apply(f.clone(), vals, depth + 1)?,
                    None => self.call_at(g, vals, depth + 1)?,
                }
            }
        })
    }
}

fn bind(p: &Pattern, v: &Value, env: &mut HashMap<String, Value>) -> bool {
    match (&p.kind, v) {
        (PatKind::Var(x), v) => {
            env.insert(x.clone(), v.clone());
            true
        }
        (PatKind::Wildcard, _) => true,
        (PatKind::Nil, Value::List(xs)) => xs.is_empty(),
        (PatKind::Cons(h, t), Value::List(xs)) if !xs.is_empty() => {
            if h != "_" {
                env.insert(h.clone(), xs[0].clone());
            }
            if t != "_" {
                env.insert(t.clone(), Value::List(xs[1..].to_vec()));
            }
            true
        }
        (PatKind::Int(n), Value::Int(m)) => n == m,
        _ => false,
    }
}

pub fn evaluate(p: &Program, name: &str, args: Vec<Value>) -> Result<Value, EvalError> {
    Evaluator::new(p).call(name, args)
}
