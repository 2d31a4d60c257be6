//! Recursive-descent parser for frames, instruction lists and expressions.
//!
//! ```text
//! frame        -> SETUP '|' instructions
//! instructions -> (stmt? ';')* stmt?
//! stmt         -> (F|B|L|R) '(' expr ',' expr ')' | S | STOP | W '(' expr ')'
//!               | SENSOR | START
//!               | IF '(' expr ')' instructions ENDIF
//!               | LOOP '(' (FOREVER | expr) ')' instructions END_LOOP
//! expr         -> or
//! or           -> and (OR and)*
//! and          -> cmp (AND cmp)*
//! cmp          -> add (CMP add)?          // comparators do not chain
//! add          -> mul (('+' | '-') mul)*
//! mul          -> unary (('*' | '/' | '%') unary)*
//! unary        -> ('-' | NOT) unary | primary
//! primary      -> NUMBER | TRUE | FALSE | SENSOR | ROUND '(' expr ',' expr ')'
//!               | '(' expr ')'
//! ```

use super::ast::{
    BinaryOp, Direction, Expr, ExprKind, Frame, LoopCount, Program, SensorName, SetupMode, Stmt,
    StmtKind, UnaryOp,
};
use super::diag::{DiagCode, Diagnostic, SourceSpan};
use super::token::{tokenize_at, Keyword, Token, TokenKind};

/// Parses one `SETUP|INSTRUCTIONS` frame.
pub fn parse_frame(source: &str) -> Result<Frame, Vec<Diagnostic>> {
    parse_frame_inner(source).map_err(|d| vec![d])
}

/// Parses a `;`-separated instruction list with no setup prefix.
pub fn parse_instructions(text: &str) -> Result<Vec<Stmt>, Vec<Diagnostic>> {
    let run = || {
        let tokens = tokenize_at(text, 0)?;
        let mut p = Parser::new(tokens, text.len());
        p.block(None)
    };
    run().map_err(|d| vec![d])
}

/// Parses a single expression; the whole input must be consumed.
pub fn parse_expr(text: &str) -> Result<Expr, Vec<Diagnostic>> {
    let run = || {
        let tokens = tokenize_at(text, 0)?;
        let mut p = Parser::new(tokens, text.len());
        let expr = p.expr()?;
        if let Some(tok) = p.peek() {
            return Err(Diagnostic::error(
                DiagCode::TrailingGarbage,
                tok.span,
                format!("unexpected `{}` after expression", tok.kind),
            ));
        }
        Ok(expr)
    };
    run().map_err(|d| vec![d])
}

fn parse_frame_inner(source: &str) -> Result<Frame, Diagnostic> {
    let span = SourceSpan::new(0, source.len());
    let Some(bar) = source.find('|') else {
        return Err(Diagnostic::error(
            DiagCode::MissingSeparator,
            SourceSpan::point(source.len()),
            "expected `SETUP|INSTRUCTIONS`; no `|` found",
        ));
    };

    let raw_setup = &source[..bar];
    let lead = raw_setup.len() - raw_setup.trim_start().len();
    let setup_text = raw_setup.trim();
    let setup_span = SourceSpan::new(lead, lead + setup_text.len());
    let setup = match setup_text {
        "SI" => SetupMode::Immediate,
        "SB" => SetupMode::ButtonStart,
        "PING" => SetupMode::Ping,
        other => {
            let upper = other.to_ascii_uppercase();
            let message = if matches!(upper.as_str(), "SI" | "SB" | "PING") {
                format!("unknown setup `{other}`; did you mean `{upper}`?")
            } else {
                format!("unknown setup `{other}`; expected SI, SB or PING")
            };
            return Err(Diagnostic::error(
                DiagCode::UnknownSetup,
                setup_span,
                message,
            ));
        }
    };

    if setup == SetupMode::Ping {
        return Ok(Frame {
            setup,
            program: Program::default(),
            span,
        });
    }

    let body_start = bar + 1;
    let tokens = tokenize_at(&source[body_start..], body_start)?;
    let mut p = Parser::new(tokens, source.len());
    let statements = p.block(None)?;
    Ok(Frame {
        setup,
        program: Program { statements },
        span,
    })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    paren_depth: usize,
}

impl Parser {
    fn new(tokens: Vec<Token>, end: usize) -> Self {
        Self {
            tokens,
            pos: 0,
            end,
            paren_depth: 0,
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: &TokenKind) -> Option<Token> {
        if self.peek_kind() == Some(kind) {
            self.bump()
        } else {
            None
        }
    }

    fn eof_span(&self) -> SourceSpan {
        SourceSpan::point(self.end)
    }

    /// Error for a missing token: running off the end inside parentheses is
    /// reported as an unclosed paren, anything else as an unexpected token.
    fn missing(&self, what: &str) -> Diagnostic {
        match self.peek() {
            None if self.paren_depth > 0 => Diagnostic::error(
                DiagCode::UnclosedParen,
                self.eof_span(),
                format!("expected {what} before end of input; `(` is never closed"),
            ),
            None => Diagnostic::error(
                DiagCode::UnexpectedToken,
                self.eof_span(),
                format!("expected {what}, found end of input"),
            ),
            Some(tok) => unexpected(tok, what),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, Diagnostic> {
        self.eat(&kind).ok_or_else(|| self.missing(what))
    }

    fn open(&mut self) -> Result<Token, Diagnostic> {
        let tok = self.expect(TokenKind::LParen, "`(`")?;
        self.paren_depth += 1;
        Ok(tok)
    }

    fn close(&mut self) -> Result<Token, Diagnostic> {
        let tok = self.expect(TokenKind::RParen, "`)`")?;
        self.paren_depth -= 1;
        Ok(tok)
    }

    /// Statements up to `terminator` (consumed) or end of input.
    fn block(&mut self, terminator: Option<(Keyword, &Token)>) -> Result<Vec<Stmt>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            while self.eat(&TokenKind::Semi).is_some() {}
            let Some(tok) = self.peek().cloned() else {
                return match terminator {
                    None => Ok(out),
                    Some((kw, opener)) => Err(Diagnostic::error(
                        DiagCode::UnbalancedBlock,
                        opener.span,
                        format!("`{}` is never closed by `{}`", opener.kind, kw.as_str()),
                    )),
                };
            };
            if let TokenKind::Keyword(kw @ (Keyword::EndIf | Keyword::EndLoop)) = tok.kind {
                return match terminator {
                    Some((want, _)) if want == kw => {
                        self.bump();
                        Ok(out)
                    }
                    _ => Err(Diagnostic::error(
                        DiagCode::UnbalancedBlock,
                        tok.span,
                        format!("`{}` without a matching opener", kw.as_str()),
                    )),
                };
            }
            out.push(self.statement()?);
            match self.peek() {
                None => {}
                Some(t) if t.kind == TokenKind::Semi => {}
                Some(t) => {
                    return Err(Diagnostic::error(
                        DiagCode::TrailingGarbage,
                        t.span,
                        format!("expected `;` after statement, found `{}`", t.kind),
                    ))
                }
            }
        }
    }

    fn statement(&mut self) -> Result<Stmt, Diagnostic> {
        let tok = self.bump().ok_or_else(|| self.missing("a statement"))?;
        let kind = match &tok.kind {
            TokenKind::Keyword(kw) => match kw {
                Keyword::F | Keyword::B | Keyword::L | Keyword::R => {
                    let dir = match kw {
                        Keyword::F => Direction::Forward,
                        Keyword::B => Direction::Backward,
                        Keyword::L => Direction::Left,
                        _ => Direction::Right,
                    };
                    self.open()?;
                    let time = self.expr()?;
                    self.expect(TokenKind::Comma, "`,`")?;
                    let power = self.expr()?;
                    self.close()?;
                    StmtKind::Move { dir, time, power }
                }
                Keyword::S | Keyword::Stop => StmtKind::Stop,
                Keyword::W => {
                    self.open()?;
                    let seconds = self.expr()?;
                    self.close()?;
                    StmtKind::Wait { seconds }
                }
                Keyword::Start => StmtKind::StartMarker,
                Keyword::If => {
                    self.open()?;
                    let condition = self.expr()?;
                    self.close()?;
                    let body = self.block(Some((Keyword::EndIf, &tok)))?;
                    StmtKind::If { condition, body }
                }
                Keyword::Loop => {
                    self.open()?;
                    let count = if self.eat(&TokenKind::Keyword(Keyword::Forever)).is_some() {
                        LoopCount::Forever
                    } else {
                        LoopCount::Finite(self.expr()?)
                    };
                    self.close()?;
                    let body = self.block(Some((Keyword::EndLoop, &tok)))?;
                    if body.is_empty() {
                        return Err(Diagnostic::error(
                            DiagCode::EmptyLoopBody,
                            tok.span,
                            "LOOP body is empty",
                        ));
                    }
                    StmtKind::Loop { count, body }
                }
                _ => return Err(unexpected(&tok, "a statement")),
            },
            TokenKind::Sensor(sensor) => StmtKind::SensorRead { sensor: *sensor },
            _ => return Err(unexpected(&tok, "a statement")),
        };
        let end = self
            .tokens
            .get(self.pos.saturating_sub(1))
            .map_or(tok.span, |t| t.span);
        Ok(Stmt {
            kind,
            span: tok.span.to(end),
        })
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, Diagnostic> {
        self.or()
    }

    fn or(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.and()?;
        while self.eat(&TokenKind::Keyword(Keyword::Or)).is_some() {
            let rhs = self.and()?;
            lhs = binary(BinaryOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.comparison()?;
        while self.eat(&TokenKind::Keyword(Keyword::And)).is_some() {
            let rhs = self.comparison()?;
            lhs = binary(BinaryOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn comparison_op(&self) -> Option<BinaryOp> {
        Some(match self.peek_kind()? {
            TokenKind::Eq => BinaryOp::Eq,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Ge => BinaryOp::Ge,
            TokenKind::Ne => BinaryOp::Ne,
            _ => return None,
        })
    }

    fn comparison(&mut self) -> Result<Expr, Diagnostic> {
        let lhs = self.additive()?;
        let Some(op) = self.comparison_op() else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = self.additive()?;
        if self.comparison_op().is_some() {
            let tok = self.peek().expect("comparison operator present");
            return Err(Diagnostic::error(
                DiagCode::ChainedComparator,
                tok.span,
                "comparisons do not chain; combine them with AND",
            ));
        }
        Ok(binary(op, lhs, rhs))
    }

    fn additive(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => BinaryOp::Add,
                Some(TokenKind::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => BinaryOp::Mul,
                Some(TokenKind::Slash) => BinaryOp::Div,
                Some(TokenKind::Percent) => BinaryOp::Mod,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, Diagnostic> {
        let op = match self.peek_kind() {
            Some(TokenKind::Minus) => UnaryOp::Neg,
            Some(TokenKind::Keyword(Keyword::Not)) => UnaryOp::Not,
            _ => return self.primary(),
        };
        let tok = self.bump().expect("peeked");
        let operand = self.unary()?;
        let span = tok.span.to(operand.span);
        Ok(Expr {
            kind: ExprKind::Unary {
                op,
                operand: Box::new(operand),
            },
            span,
        })
    }

    fn primary(&mut self) -> Result<Expr, Diagnostic> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.missing("an expression"));
        };
        let kind = match &tok.kind {
            TokenKind::Number(n) => ExprKind::Number(*n),
            TokenKind::Keyword(Keyword::True) => ExprKind::Bool(true),
            TokenKind::Keyword(Keyword::False) => ExprKind::Bool(false),
            TokenKind::Sensor(s) => ExprKind::Sensor(*s),
            TokenKind::Keyword(Keyword::Round) => {
                self.bump();
                self.open()?;
                let value = self.expr()?;
                self.expect(TokenKind::Comma, "`,`")?;
                let decimals = self.expr()?;
                let close = self.close()?;
                return Ok(Expr {
                    kind: ExprKind::Round {
                        value: Box::new(value),
                        decimals: Box::new(decimals),
                    },
                    span: tok.span.to(close.span),
                });
            }
            TokenKind::LParen => {
                self.open()?;
                let inner = self.expr()?;
                let close = self.close()?;
                return Ok(Expr {
                    kind: inner.kind,
                    span: tok.span.to(close.span),
                });
            }
            _ => return Err(unexpected(&tok, "an expression")),
        };
        self.bump();
        Ok(Expr {
            kind,
            span: tok.span,
        })
    }
}

fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = lhs.span.to(rhs.span);
    Expr {
        kind: ExprKind::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        },
        span,
    }
}

fn unexpected(tok: &Token, what: &str) -> Diagnostic {
    let mut message = format!("expected {what}, found `{}`", tok.kind);
    if let TokenKind::Ident(word) = &tok.kind {
        let upper = word.to_ascii_uppercase();
        if Keyword::from_word(&upper).is_some() || SensorName::from_word(&upper).is_some() {
            message =
                format!("unknown word `{word}`; did you mean `{upper}`? (keywords are uppercase)");
        } else {
            message = format!("unknown word `{word}`");
        }
    }
    Diagnostic::error(DiagCode::UnexpectedToken, tok.span, message)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(dir: Direction, t: f64, p: f64) -> Stmt {
        StmtKind::Move {
            dir,
            time: Expr::num(t),
            power: Expr::num(p),
        }
        .into()
    }

    fn err_code(src: &str) -> DiagCode {
        parse_frame(src).unwrap_err()[0].code
    }

    #[test]
    fn immediate_forward() {
        let f = parse_frame("SI|F(5, 80)").unwrap();
        assert_eq!(
            f,
            Frame::new(
                SetupMode::Immediate,
                vec![mv(Direction::Forward, 5.0, 80.0)]
            )
        );
    }

    #[test]
    fn ping_ignores_payload() {
        let f = parse_frame("PING|check_connection").unwrap();
        assert_eq!(f.setup, SetupMode::Ping);
        assert!(f.program.statements.is_empty());
        assert!(parse_frame("PING|anything (goes) here ###").is_ok());
    }

    #[test]
    fn conditional_on_light() {
        let f = parse_frame("SI|IF(LIGHT_R > 100);F(4, 70);ENDIF").unwrap();
        let expected = StmtKind::If {
            condition: Expr::binary(
                BinaryOp::Gt,
                Expr::sensor(SensorName::LightR),
                Expr::num(100.0),
            ),
            body: vec![mv(Direction::Forward, 4.0, 70.0)],
        };
        assert_eq!(f.program.statements, vec![Stmt::new(expected)]);
    }

    #[test]
    fn empty_program() {
        let f = parse_frame("SI|").unwrap();
        assert!(f.program.statements.is_empty());
    }

    #[test]
    fn unbalanced_loop() {
        assert_eq!(err_code("SI|LOOP(3);F(2,50)"), DiagCode::UnbalancedBlock);
        assert_eq!(err_code("SI|IF(TRUE);S"), DiagCode::UnbalancedBlock);
        assert_eq!(err_code("SI|S;ENDIF"), DiagCode::UnbalancedBlock);
        assert_eq!(
            err_code("SI|IF(TRUE);S;END_LOOP"),
            DiagCode::UnbalancedBlock
        );
    }

    #[test]
    fn setup_errors() {
        assert_eq!(err_code("F(1, 2)"), DiagCode::MissingSeparator);
        assert_eq!(err_code("XX|F(1, 2)"), DiagCode::UnknownSetup);
        let d = &parse_frame("si|S").unwrap_err()[0];
        assert!(d.message.contains("did you mean `SI`"), "{}", d.message);
    }

    #[test]
    fn trailing_garbage() {
        assert_eq!(err_code("SI|F(1, 2) S"), DiagCode::TrailingGarbage);
    }

    #[test]
    fn lowercase_keyword_hint() {
        let d = &parse_frame("SI|stop").unwrap_err()[0];
        assert_eq!(d.code, DiagCode::UnexpectedToken);
        assert!(d.message.contains("did you mean `STOP`"));
    }

    #[test]
    fn unclosed_paren_points_at_end() {
        let d = &parse_frame("SI|F(1").unwrap_err()[0];
        assert_eq!(d.code, DiagCode::UnclosedParen);
        assert_eq!(d.wire_line(), "ERR 7 UnclosedParen");
    }

    #[test]
    fn module_sequence() {
        let stmts = parse_instructions("L(1,50); B(1,80); W(1); S").unwrap();
        assert_eq!(
            stmts,
            vec![
                mv(Direction::Left, 1.0, 50.0),
                mv(Direction::Backward, 1.0, 80.0),
                StmtKind::Wait {
                    seconds: Expr::num(1.0)
                }
                .into(),
                StmtKind::Stop.into(),
            ]
        );
    }

    #[test]
    fn finite_loop() {
        let stmts = parse_instructions("LOOP(3);F(2, 50);END_LOOP").unwrap();
        assert_eq!(
            stmts,
            vec![Stmt::new(StmtKind::Loop {
                count: LoopCount::Finite(Expr::num(3.0)),
                body: vec![mv(Direction::Forward, 2.0, 50.0)],
            })]
        );
    }

    #[test]
    fn empty_segments() {
        assert!(parse_instructions(";;").unwrap().is_empty());
        assert_eq!(
            parse_instructions(";S;;STOP;").unwrap(),
            vec![Stmt::new(StmtKind::Stop), Stmt::new(StmtKind::Stop)]
        );
    }

    #[test]
    fn empty_loop_body_rejected() {
        assert_eq!(err_code("SI|LOOP(2);END_LOOP"), DiagCode::EmptyLoopBody);
    }

    #[test]
    fn start_and_sensor_statements() {
        let stmts = parse_instructions("START;DISTANCE").unwrap();
        assert_eq!(
            stmts,
            vec![
                Stmt::new(StmtKind::StartMarker),
                Stmt::new(StmtKind::SensorRead {
                    sensor: SensorName::Distance
                })
            ]
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse_expr("1 + 2 * 3").unwrap(),
            Expr::binary(
                BinaryOp::Add,
                Expr::num(1.0),
                Expr::binary(BinaryOp::Mul, Expr::num(2.0), Expr::num(3.0))
            )
        );
        assert_eq!(
            parse_expr("NOT TRUE AND FALSE").unwrap(),
            Expr::binary(
                BinaryOp::And,
                Expr::unary(UnaryOp::Not, Expr::boolean(true)),
                Expr::boolean(false)
            )
        );
        assert_eq!(
            parse_expr("TRUE OR FALSE AND FALSE").unwrap(),
            Expr::binary(
                BinaryOp::Or,
                Expr::boolean(true),
                Expr::binary(BinaryOp::And, Expr::boolean(false), Expr::boolean(false))
            )
        );
        assert_eq!(
            parse_expr("10 - 4 - 3").unwrap(),
            Expr::binary(
                BinaryOp::Sub,
                Expr::binary(BinaryOp::Sub, Expr::num(10.0), Expr::num(4.0)),
                Expr::num(3.0)
            )
        );
        assert_eq!(
            parse_expr("-2 * 3").unwrap(),
            Expr::binary(
                BinaryOp::Mul,
                Expr::unary(UnaryOp::Neg, Expr::num(2.0)),
                Expr::num(3.0)
            )
        );
    }

    #[test]
    fn expression_errors() {
        assert_eq!(
            parse_expr("1 < 2 < 3").unwrap_err()[0].code,
            DiagCode::ChainedComparator
        );
        assert_eq!(
            parse_expr("(1 + 2").unwrap_err()[0].code,
            DiagCode::UnclosedParen
        );
        assert_eq!(
            parse_expr("1 +").unwrap_err()[0].code,
            DiagCode::UnexpectedToken
        );
        assert_eq!(
            parse_expr("1 2").unwrap_err()[0].code,
            DiagCode::TrailingGarbage
        );
        assert_eq!(
            parse_expr(")").unwrap_err()[0].code,
            DiagCode::UnexpectedToken
        );
    }

    #[test]
    fn statement_spans_cover_source() {
        let src = "SI|F(5, 80);W(1)";
        let f = parse_frame(src).unwrap();
        let s = &f.program.statements;
        assert_eq!(&src[s[0].span.start..s[0].span.end], "F(5, 80)");
        assert_eq!(&src[s[1].span.start..s[1].span.end], "W(1)");
    }
}
