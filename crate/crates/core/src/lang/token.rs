//! Lexer. Whitespace of any kind separates tokens and is otherwise ignored,
//! so a multi-line listing and its single-line wire form produce the same
//! token stream.

use std::fmt;

use super::ast::SensorName;
use super::diag::{DiagCode, Diagnostic, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    F,
    B,
    L,
    R,
    S,
    Stop,
    W,
    If,
    EndIf,
    Loop,
    EndLoop,
    Forever,
    Round,
    True,
    False,
    And,
    Or,
    Not,
    Start,
    Si,
    Sb,
    Ping,
}

impl Keyword {
    pub const ALL: [Keyword; 22] = [
        Keyword::F,
        Keyword::B,
        Keyword::L,
        Keyword::R,
        Keyword::S,
        Keyword::Stop,
        Keyword::W,
        Keyword::If,
        Keyword::EndIf,
        Keyword::Loop,
        Keyword::EndLoop,
        Keyword::Forever,
        Keyword::Round,
        Keyword::True,
        Keyword::False,
        Keyword::And,
        Keyword::Or,
        Keyword::Not,
        Keyword::Start,
        Keyword::Si,
        Keyword::Sb,
        Keyword::Ping,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::F => "F",
            Keyword::B => "B",
            Keyword::L => "L",
            Keyword::R => "R",
            Keyword::S => "S",
            Keyword::Stop => "STOP",
            Keyword::W => "W",
            Keyword::If => "IF",
            Keyword::EndIf => "ENDIF",
            Keyword::Loop => "LOOP",
            Keyword::EndLoop => "END_LOOP",
            Keyword::Forever => "FOREVER",
            Keyword::Round => "ROUND",
            Keyword::True => "TRUE",
            Keyword::False => "FALSE",
            Keyword::And => "AND",
            Keyword::Or => "OR",
            Keyword::Not => "NOT",
            Keyword::Start => "START",
            Keyword::Si => "SI",
            Keyword::Sb => "SB",
            Keyword::Ping => "PING",
        }
    }

    pub fn from_word(word: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str() == word)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Sensor(SensorName),
    /// A word that is neither a keyword nor a sensor. Kept as a token so the
    /// parser can report it with a suggestion.
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    Comma,
    Semi,
    Bar,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
    Ne,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => f.write_str(k.as_str()),
            TokenKind::Sensor(s) => f.write_str(s.as_str()),
            TokenKind::Ident(w) => f.write_str(w),
            TokenKind::Number(n) => write!(f, "{n}"),
            TokenKind::LParen => f.write_str("("),
            TokenKind::RParen => f.write_str(")"),
            TokenKind::Comma => f.write_str(","),
            TokenKind::Semi => f.write_str(";"),
            TokenKind::Bar => f.write_str("|"),
            TokenKind::Plus => f.write_str("+"),
            TokenKind::Minus => f.write_str("-"),
            TokenKind::Star => f.write_str("*"),
            TokenKind::Slash => f.write_str("/"),
            TokenKind::Percent => f.write_str("%"),
            TokenKind::Eq => f.write_str("="),
            TokenKind::Lt => f.write_str("<"),
            TokenKind::Gt => f.write_str(">"),
            TokenKind::Le => f.write_str("<="),
            TokenKind::Ge => f.write_str(">="),
            TokenKind::Ne => f.write_str("<>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

/// Tokenizes `source`. Spans are absolute byte offsets into `source`.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Diagnostic> {
    tokenize_at(source, 0)
}

/// Tokenizes `source` as if it started at byte `base` of a larger text.
pub fn tokenize_at(source: &str, base: usize) -> Result<Vec<Token>, Diagnostic> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;

    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |kind: TokenKind| Token {
            kind,
            span: SourceSpan::new(base + start, base + start + 1),
        };
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'(' => {
                tokens.push(single(TokenKind::LParen));
                i += 1;
            }
            b')' => {
                tokens.push(single(TokenKind::RParen));
                i += 1;
            }
            b',' => {
                tokens.push(single(TokenKind::Comma));
                i += 1;
            }
            b';' => {
                tokens.push(single(TokenKind::Semi));
                i += 1;
            }
            b'|' => {
                tokens.push(single(TokenKind::Bar));
                i += 1;
            }
            b'+' => {
                tokens.push(single(TokenKind::Plus));
                i += 1;
            }
            b'-' => {
                tokens.push(single(TokenKind::Minus));
                i += 1;
            }
            b'*' => {
                tokens.push(single(TokenKind::Star));
                i += 1;
            }
            b'/' => {
                tokens.push(single(TokenKind::Slash));
                i += 1;
            }
            b'%' => {
                tokens.push(single(TokenKind::Percent));
                i += 1;
            }
            b'=' => {
                tokens.push(single(TokenKind::Eq));
                i += 1;
            }
            b'<' | b'>' => {
                let next = bytes.get(i + 1).copied();
                let (kind, len) = match (c, next) {
                    (b'<', Some(b'=')) => (TokenKind::Le, 2),
                    (b'<', Some(b'>')) => (TokenKind::Ne, 2),
                    (b'>', Some(b'=')) => (TokenKind::Ge, 2),
                    (b'<', _) => (TokenKind::Lt, 1),
                    _ => (TokenKind::Gt, 1),
                };
                tokens.push(Token {
                    kind,
                    span: SourceSpan::new(base + start, base + start + len),
                });
                i += len;
            }
            b'0'..=b'9' | b'.' => {
                let (value, len) =
                    lex_number(&bytes[i..]).map_err(|len| malformed(source, base, start, len))?;
                tokens.push(Token {
                    kind: TokenKind::Number(value),
                    span: SourceSpan::new(base + start, base + start + len),
                });
                i += len;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let len = bytes[i..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                    .count();
                let word = &source[i..i + len];
                let kind = if let Some(k) = Keyword::from_word(word) {
                    TokenKind::Keyword(k)
                } else if let Some(s) = SensorName::from_word(word) {
                    TokenKind::Sensor(s)
                } else {
                    TokenKind::Ident(word.to_string())
                };
                tokens.push(Token {
                    kind,
                    span: SourceSpan::new(base + start, base + start + len),
                });
                i += len;
            }
            _ => {
                let ch = source[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(Diagnostic::error(
                    DiagCode::UnknownCharacter,
                    SourceSpan::new(base + start, base + start + ch.len_utf8()),
                    format!("unexpected character {ch:?}"),
                ));
            }
        }
    }
    Ok(tokens)
}

fn malformed(source: &str, base: usize, start: usize, len: usize) -> Diagnostic {
    let text = &source[start..start + len];
    Diagnostic::error(
        DiagCode::MalformedNumber,
        SourceSpan::new(base + start, base + start + len),
        format!("malformed number {text:?}"),
    )
}

/// Lexes `digits ('.' digits)?`. On failure returns the length of the
/// offending run so the diagnostic can cover it.
fn lex_number(bytes: &[u8]) -> Result<(f64, usize), usize> {
    let run = bytes
        .iter()
        .take_while(|b| b.is_ascii_alphanumeric() || **b == b'.' || **b == b'_')
        .count();
    let int_len = bytes.iter().take_while(|b| b.is_ascii_digit()).count();
    if int_len == 0 {
        return Err(run.max(1));
    }
    let mut len = int_len;
    if bytes.get(len) == Some(&b'.') {
        let frac_len = bytes[len + 1..]
            .iter()
            .take_while(|b| b.is_ascii_digit())
            .count();
        if frac_len == 0 {
            return Err(run);
        }
        len += 1 + frac_len;
    }
    if len != run {
        return Err(run);
    }
    let text = std::str::from_utf8(&bytes[..len]).map_err(|_| run)?;
    let value: f64 = text.parse().map_err(|_| run)?;
    Ok((value, len))
}
