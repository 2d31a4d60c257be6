//! Static checks on a parsed frame.

use super::ast::{Frame, LoopCount, Stmt, StmtKind};
use super::diag::{DiagCode, Diagnostic};

/// Returns warnings and errors for a parsed frame. Only literal arguments
/// are checked; computed values are handled at runtime.
pub fn validate(frame: &Frame) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_block(&frame.program.statements, &mut out);
    out
}

fn check_block(stmts: &[Stmt], out: &mut Vec<Diagnostic>) {
    for stmt in stmts {
        match &stmt.kind {
            StmtKind::Move { time, power, .. } => {
                if let Some(p) = power.literal_number() {
                    if p > 100.0 {
                        out.push(Diagnostic::warning(
                            DiagCode::PowerOutOfRange,
                            power.span,
                            format!("power literal {p} > 100, will clamp"),
                        ));
                    } else if p < 0.0 {
                        out.push(Diagnostic::warning(
                            DiagCode::PowerOutOfRange,
                            power.span,
                            format!("power literal {p} < 0, will clamp"),
                        ));
                    }
                }
                negative_duration(time, "time", out);
            }
            StmtKind::Wait { seconds } => negative_duration(seconds, "wait", out),
            StmtKind::If { body, .. } => check_block(body, out),
            StmtKind::Loop { count, body } => {
                match count {
                    LoopCount::Finite(n) => {
                        if let Some(v) = n.literal_number() {
                            if v < 0.0 {
                                out.push(Diagnostic::error(
                                    DiagCode::NegativeLoopCount,
                                    n.span,
                                    format!("negative loop count {v}"),
                                ));
                            } else if v.fract() != 0.0 {
                                out.push(Diagnostic::error(
                                    DiagCode::FractionalLoopCount,
                                    n.span,
                                    format!("loop count {v} is not an integer"),
                                ));
                            }
                        }
                    }
                    LoopCount::Forever => {
                        if !body.iter().any(has_timed_effect) {
                            out.push(Diagnostic::warning(
                                DiagCode::DegenerateForever,
                                stmt.span,
                                "LOOP(FOREVER) body has no move, wait or stop; it will spin",
                            ));
                        }
                    }
                }
                check_block(body, out);
            }
            StmtKind::Stop | StmtKind::SensorRead { .. } | StmtKind::StartMarker => {}
        }
    }
}

fn negative_duration(expr: &super::ast::Expr, what: &str, out: &mut Vec<Diagnostic>) {
    if let Some(t) = expr.literal_number() {
        if t < 0.0 {
            out.push(Diagnostic::warning(
                DiagCode::NegativeDuration,
                expr.span,
                format!("negative {what} {t}, treated as 0"),
            ));
        }
    }
}

fn has_timed_effect(stmt: &Stmt) -> bool {
    match &stmt.kind {
        StmtKind::Move { .. } | StmtKind::Stop | StmtKind::Wait { .. } => true,
        StmtKind::If { body, .. } | StmtKind::Loop { body, .. } => {
            body.iter().any(has_timed_effect)
        }
        StmtKind::SensorRead { .. } | StmtKind::StartMarker => false,
    }
}
