use std::collections::HashMap;

use thiserror::Error;

use super::pred::{BinOp, Pred};
use crate::surface::eval::{haskell_mod, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredEvalError {
    #[error("unassigned variable `{0}`")]
    Unassigned(String),
    #[error("type error evaluating `{0}`")]
    Type(String),
    #[error("division by zero in `{0}`")]
    DivByZero(String),
    #[error("integer overflow in `{0}`")]
    Overflow(String),
    #[error("call to `{0}` failed: {1}")]
    Call(String, String),
}

/// Calls logic-level functions other than `len`.
pub trait Interp {
    fn call(&self, name: &str, args: &[Value]) -> Result<Value, String>;
}

pub struct NoInterp;

impl Interp for NoInterp {
    fn call(&self, name: &str, _: &[Value]) -> Result<Value, String> {
        Err(format!("no interpretation for `{name}`"))
    }
}

impl Interp for crate::surface::eval::Evaluator<'_> {
    fn call(&self, name: &str, args: &[Value]) -> Result<Value, String> {
        crate::surface::eval::Evaluator::call(self, name, args.to_vec()).map_err(|e| e.to_string())
    }
}

/// Evaluates a ground predicate under an assignment.
pub fn eval_pred(p: &Pred, assign: &HashMap<String, Value>, interp: &dyn Interp) -> Result<Value, PredEvalError> {
    let ev = |q: &Pred| eval_pred(q, assign, interp);
    let int = |q: &Pred| match ev(q)? {
        Value::Int(n) => Ok(n),
        _ => Err(PredEvalError::Type(q.to_string())),
    };
    let boolean = |q: &Pred| match ev(q)? {
        Value::Bool(b) => Ok(b),
        _ => Err(PredEvalError::Type(q.to_string())),
    };
    Ok(match p {
        Pred::Int(n) => Value::Int(*n),
        Pred::Bool(b) => Value::Bool(*b),
        Pred::Unit => Value::Unit,
        Pred::Var(x) => assign
            .get(x)
            .cloned()
            .ok_or_else(|| PredEvalError::Unassigned(x.clone()))?,
        Pred::Nil => Value::List(vec![]),
        Pred::Cons(h, t) => {
            let h = ev(h)?;
            match ev(t)? {
                Value::List(mut xs) => {
                    xs.insert(0, h);
                    Value::List(xs)
                }
                _ => return Err(PredEvalError::Type(p.to_string())),
            }
        }
        Pred::Bin(op, a, b) => match op {
            BinOp::Add | BinOp::Sub | BinOp::Mul => {
                let (x, y) = (int(a)?, int(b)?);
                let r = match op {
                    BinOp::Add => x.checked_add(y),
                    BinOp::Sub => x.checked_sub(y),
                    _ => x.checked_mul(y),
                };
                Value::Int(r.ok_or_else(|| PredEvalError::Overflow(p.to_string()))?)
            }
            BinOp::Mod => {
                let (x, y) = (int(a)?, int(b)?);
                if y == 0 {
                    return Err(PredEvalError::DivByZero(p.to_string()));
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
        Pred::Not(a) => Value::Bool(!boolean(a)?),
        Pred::Ite(c, a, b) => {
            if boolean(c)? {
                ev(a)?
            } else {
                ev(b)?
            }
        }
        Pred::App(f, args) if f == "len" && args.len() == 1 => match ev(&args[0])? {
            Value::List(xs) => Value::Int(xs.len() as i64),
            _ => return Err(PredEvalError::Type(p.to_string())),
        },
        Pred::App(f, args) => {
            let vals = args.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
            interp.call(f, &vals).map_err(|e| PredEvalError::Call(f.clone(), e))?
        }
    })
}

pub fn holds(p: &Pred, assign: &HashMap<String, Value>, interp: &dyn Interp) -> Result<bool, PredEvalError> {
    match eval_pred(p, assign, interp)? {
        Value::Bool(b) => Ok(b),
        _ => Err(PredEvalError::Type(p.to_string())),
    }
}
