//! Command-line front end: expression syntax, identity suites and artifact
//! export.

pub mod emit;
pub mod parser;
pub mod suites;

pub use parser::{lower, parse, parse_poly, print_canonical, Expr, ExprKind, Span};
pub use suites::{run_suite, Check, SuiteReport, SUITES};
