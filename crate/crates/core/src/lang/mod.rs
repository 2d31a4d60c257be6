//! TiniScript front end: tokens, syntax tree, parser, formatter and static
//! checks.

pub mod ast;
pub mod diag;
pub mod parser;
pub mod printer;
pub mod token;
pub mod validate;

pub use ast::{
    BinaryOp, Direction, Expr, ExprKind, Frame, LoopCount, Program, SensorName, SetupMode, Stmt,
    StmtKind, UnaryOp,
};
pub use diag::{has_errors, DiagCode, Diagnostic, Severity, SourceSpan};
pub use parser::{parse_expr, parse_frame, parse_instructions};
pub use printer::{pretty_print, print_expr, print_statements};
pub use token::{tokenize, Keyword, Token, TokenKind};
pub use validate::validate;

/// Parses and validates in one go. Fails if either step reports an error;
/// on success returns the frame and any warnings.
pub fn compile(source: &str) -> Result<(Frame, Vec<Diagnostic>), Vec<Diagnostic>> {
    let frame = parse_frame(source)?;
    let diags = validate(&frame);
    if has_errors(&diags) {
        Err(diags)
    } else {
        Ok((frame, diags))
    }
}
