//! A small vector-expression language for defining immersions in text.
//!
//! ```text
//! # circular helix
//! dim 1 -> 3
//! const a = 3
//! x = [a*cos(s), a*sin(s), 4*s]
//! s in [0, 2*pi]
//! ```
//!
//! See [`parser`] for the grammar. Chart variables default to `s, u2, …, un`
//! and may be renamed with a `vars` line.

pub mod ast;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod print;
pub mod spec;

pub use ast::{BinOp, Expr, ExprKind, Func, Span};
pub use error::{EvalError, ParseError, ParseErrorKind};
pub use parser::{parse_expr, parse_immersion};
pub use print::print_expr;
pub use spec::{default_var_names, eval_spec, ImmersionSpec};
