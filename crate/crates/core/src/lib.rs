//! `lqh`: a refinement-type checker with typed holes for a small
//! Haskell-like language.

pub mod checker;
pub mod cli;
pub mod diagnostic;
pub mod holes;
pub mod logic;
pub mod report;
pub mod service;
pub mod session;
pub mod smt;
pub mod surface;
