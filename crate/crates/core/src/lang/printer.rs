//! Canonical single-line formatter.

use std::fmt::Write;

use super::ast::{Expr, ExprKind, Frame, LoopCount, SetupMode, Stmt, StmtKind, UnaryOp};

const PING_PAYLOAD: &str = "check_connection";

/// Canonical form: `SETUP|stmt;stmt;...` with `, ` between call arguments
/// and single spaces around binary operators.
pub fn pretty_print(frame: &Frame) -> String {
    let mut out = String::new();
    out.push_str(frame.setup.keyword());
    out.push('|');
    if frame.setup == SetupMode::Ping {
        out.push_str(PING_PAYLOAD);
        return out;
    }
    write_block(&mut out, &frame.program.statements);
    out
}

pub fn print_statements(stmts: &[Stmt]) -> String {
    let mut out = String::new();
    write_block(&mut out, stmts);
    out
}

pub fn print_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr);
    out
}

fn write_block(out: &mut String, stmts: &[Stmt]) {
    for (i, stmt) in stmts.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        write_stmt(out, stmt);
    }
}

fn write_stmt(out: &mut String, stmt: &Stmt) {
    match &stmt.kind {
        StmtKind::Move { dir, time, power } => {
            out.push_str(dir.letter());
            out.push('(');
            write_expr(out, time);
            out.push_str(", ");
            write_expr(out, power);
            out.push(')');
        }
        StmtKind::Stop => out.push('S'),
        StmtKind::Wait { seconds } => {
            out.push_str("W(");
            write_expr(out, seconds);
            out.push(')');
        }
        StmtKind::SensorRead { sensor } => out.push_str(sensor.as_str()),
        StmtKind::If { condition, body } => {
            out.push_str("IF(");
            write_expr(out, condition);
            out.push_str(");");
            write_block(out, body);
            if !body.is_empty() {
                out.push(';');
            }
            out.push_str("ENDIF");
        }
        StmtKind::Loop { count, body } => {
            out.push_str("LOOP(");
            match count {
                LoopCount::Forever => out.push_str("FOREVER"),
                LoopCount::Finite(n) => write_expr(out, n),
            }
            out.push_str(");");
            write_block(out, body);
            if !body.is_empty() {
                out.push(';');
            }
            out.push_str("END_LOOP");
        }
        StmtKind::StartMarker => out.push_str("START"),
    }
}

/// Precedence of the node as it will appear in the output. Atoms and unary
/// forms bind tighter than any binary operator.
fn precedence(expr: &Expr) -> u8 {
    match &expr.kind {
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { .. } => 6,
        ExprKind::Number(n) if *n < 0.0 || (*n == 0.0 && n.is_sign_negative()) => 6,
        _ => 7,
    }
}

fn write_expr(out: &mut String, expr: &Expr) {
    match &expr.kind {
        ExprKind::Number(n) => write_number(out, *n),
        ExprKind::Bool(true) => out.push_str("TRUE"),
        ExprKind::Bool(false) => out.push_str("FALSE"),
        ExprKind::Sensor(s) => out.push_str(s.as_str()),
        ExprKind::Unary { op, operand } => {
            match op {
                UnaryOp::Neg => out.push('-'),
                UnaryOp::Not => out.push_str("NOT "),
            }
            write_child(out, operand, precedence(operand) < 6);
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            // Comparators do not chain, so an equal-level left operand needs
            // parentheses too.
            let lhs_parens = if op.is_comparison() {
                precedence(lhs) <= prec
            } else {
                precedence(lhs) < prec
            };
            write_child(out, lhs, lhs_parens);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_child(out, rhs, precedence(rhs) <= prec);
        }
        ExprKind::Round { value, decimals } => {
            out.push_str("ROUND(");
            write_expr(out, value);
            out.push_str(", ");
            write_expr(out, decimals);
            out.push(')');
        }
    }
}

fn write_child(out: &mut String, expr: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, expr);
        out.push(')');
    } else {
        write_expr(out, expr);
    }
}

fn write_number(out: &mut String, n: f64) {
    // `Display` for f64 is the shortest representation that reads back to
    // the same value, and never uses exponent notation.
    if n < 0.0 || (n == 0.0 && n.is_sign_negative()) {
        let _ = write!(out, "-{}", -n);
    } else {
        let _ = write!(out, "{n}");
    }
}
