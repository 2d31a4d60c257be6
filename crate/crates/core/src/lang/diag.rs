use std::fmt;

use serde::Serialize;

/// Half-open byte range `[start, end)` into the frame source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn point(at: usize) -> Self {
        Self { start: at, end: at }
    }

    pub fn to(self, other: SourceSpan) -> SourceSpan {
        SourceSpan::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// One-based column used when rendering; zero is reserved for
    /// frame-level errors that have no position.
    pub fn column(&self) -> usize {
        self.start + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

/// Machine-readable diagnostic kind. The `Display` form is the token sent
/// over the wire in `ERR <offset> <code>` frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DiagCode {
    UnknownCharacter,
    MalformedNumber,
    MissingSeparator,
    UnknownSetup,
    UnbalancedBlock,
    TrailingGarbage,
    UnexpectedToken,
    UnclosedParen,
    ChainedComparator,
    EmptyLoopBody,
    NegativeLoopCount,
    FractionalLoopCount,
    PowerOutOfRange,
    NegativeDuration,
    DegenerateForever,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::UnknownCharacter => "UnknownCharacter",
            DiagCode::MalformedNumber => "MalformedNumber",
            DiagCode::MissingSeparator => "MissingSeparator",
            DiagCode::UnknownSetup => "UnknownSetup",
            DiagCode::UnbalancedBlock => "UnbalancedBlock",
            DiagCode::TrailingGarbage => "TrailingGarbage",
            DiagCode::UnexpectedToken => "UnexpectedToken",
            DiagCode::UnclosedParen => "UnclosedParen",
            DiagCode::ChainedComparator => "ChainedComparator",
            DiagCode::EmptyLoopBody => "EmptyLoopBody",
            DiagCode::NegativeLoopCount => "NegativeLoopCount",
            DiagCode::FractionalLoopCount => "FractionalLoopCount",
            DiagCode::PowerOutOfRange => "PowerOutOfRange",
            DiagCode::NegativeDuration => "NegativeDuration",
            DiagCode::DegenerateForever => "DegenerateForever",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn error(code: DiagCode, span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn warning(code: DiagCode, span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `ERR <offset> <code>`, the compact form used on the serial channel.
    pub fn wire_line(&self) -> String {
        format!("ERR {} {}", self.span.column(), self.code)
    }
}

/// CLI rendering: `ERR <offset>: <code>: <message>` (or `WARN` for warnings).
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "ERR",
            Severity::Warning => "WARN",
        };
        write!(
            f,
            "{tag} {}: {}: {}",
            self.span.column(),
            self.code,
            self.message
        )
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
