//! The mini-language: syntax tree, lexer, parser, printer and evaluator.

pub mod ast;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::{holes_of, AliasDecl, Clause, Decl, Expr, ExprKind, HoleSite, PatKind, PathStep, Pattern, Program};
pub use eval::{evaluate, EvalError, Value};
pub use parser::{parse_expr, parse_pred, parse_program, parse_type};
pub use printer::{print_clause, print_decl, print_pattern, print_program};
