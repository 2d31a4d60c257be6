//! Typed syntax tree. Nodes carry source spans, but equality is structural:
//! spans never take part in `==`, so a reparsed program compares equal to
//! the original regardless of formatting.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::diag::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetupMode {
    /// `PING|...`: connection check, never executes anything.
    Ping,
    /// `SI|...`: start immediately.
    Immediate,
    /// `SB|...`: start when the robot's button is pressed.
    ButtonStart,
}

impl SetupMode {
    pub fn keyword(self) -> &'static str {
        match self {
            SetupMode::Ping => "PING",
            SetupMode::Immediate => "SI",
            SetupMode::ButtonStart => "SB",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Frame {
    pub setup: SetupMode,
    pub program: Program,
    pub span: SourceSpan,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.setup == other.setup && self.program == other.program
    }
}

impl Frame {
    pub fn new(setup: SetupMode, statements: Vec<Stmt>) -> Self {
        Self {
            setup,
            program: Program { statements },
            span: SourceSpan::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Program {
    pub statements: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
    Left,
    Right,
}

impl Direction {
    pub fn letter(self) -> &'static str {
        match self {
            Direction::Forward => "F",
            Direction::Backward => "B",
            Direction::Left => "L",
            Direction::Right => "R",
        }
    }

    /// Wheel power signs `(left, right)`. Turns spin in place.
    pub fn wheel_signs(self) -> (f64, f64) {
        match self {
            Direction::Forward => (1.0, 1.0),
            Direction::Backward => (-1.0, -1.0),
            Direction::Left => (-1.0, 1.0),
            Direction::Right => (1.0, -1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SensorName {
    #[serde(rename = "LIGHT_R")]
    LightR,
    #[serde(rename = "LIGHT_L")]
    LightL,
    #[serde(rename = "DISTANCE")]
    Distance,
}

impl SensorName {
    pub const ALL: [SensorName; 3] = [SensorName::LightR, SensorName::LightL, SensorName::Distance];

    pub fn as_str(self) -> &'static str {
        match self {
            SensorName::LightR => "LIGHT_R",
            SensorName::LightL => "LIGHT_L",
            SensorName::Distance => "DISTANCE",
        }
    }

    pub fn from_word(word: &str) -> Option<SensorName> {
        SensorName::ALL.into_iter().find(|s| s.as_str() == word)
    }
}

impl fmt::Display for SensorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Self {
            kind,
            span: SourceSpan::default(),
        }
    }
}

impl From<StmtKind> for Stmt {
    fn from(kind: StmtKind) -> Self {
        Stmt::new(kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Move {
        dir: Direction,
        time: Expr,
        power: Expr,
    },
    Stop,
    Wait {
        seconds: Expr,
    },
    SensorRead {
        sensor: SensorName,
    },
    If {
        condition: Expr,
        body: Vec<Stmt>,
    },
    Loop {
        count: LoopCount,
        body: Vec<Stmt>,
    },
    StartMarker,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoopCount {
    Finite(Expr),
    Forever,
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl From<ExprKind> for Expr {
    fn from(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: SourceSpan::default(),
        }
    }
}

impl Expr {
    pub fn num(value: f64) -> Expr {
        ExprKind::Number(value).into()
    }

    pub fn boolean(value: bool) -> Expr {
        ExprKind::Bool(value).into()
    }

    pub fn sensor(name: SensorName) -> Expr {
        ExprKind::Sensor(name).into()
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Expr {
        ExprKind::Unary {
            op,
            operand: Box::new(operand),
        }
        .into()
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        ExprKind::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
        .into()
    }

    pub fn round(value: Expr, decimals: Expr) -> Expr {
        ExprKind::Round {
            value: Box::new(value),
            decimals: Box::new(decimals),
        }
        .into()
    }

    /// The numeric value of a literal, looking through unary minus.
    pub fn literal_number(&self) -> Option<f64> {
        match &self.kind {
            ExprKind::Number(n) => Some(*n),
            ExprKind::Unary {
                op: UnaryOp::Neg,
                operand,
            } => operand.literal_number().map(|n| -n),
            _ => None,
        }
    }

    pub fn contains_sensor(&self) -> bool {
        match &self.kind {
            ExprKind::Sensor(_) => true,
            ExprKind::Number(_) | ExprKind::Bool(_) => false,
            ExprKind::Unary { operand, .. } => operand.contains_sensor(),
            ExprKind::Binary { lhs, rhs, .. } => lhs.contains_sensor() || rhs.contains_sensor(),
            ExprKind::Round { value, decimals } => {
                value.contains_sensor() || decimals.contains_sensor()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(f64),
    Bool(bool),
    Sensor(SensorName),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Round {
        value: Box<Expr>,
        decimals: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 13] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Mod,
        BinaryOp::Eq,
        BinaryOp::Lt,
        BinaryOp::Gt,
        BinaryOp::Le,
        BinaryOp::Ge,
        BinaryOp::Ne,
        BinaryOp::And,
        BinaryOp::Or,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Mod => "%",
            BinaryOp::Eq => "=",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::Ne => "<>",
            BinaryOp::And => "AND",
            BinaryOp::Or => "OR",
        }
    }

    /// Binding strength; larger binds tighter. Unary operators sit above
    /// every binary level.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq
            | BinaryOp::Lt
            | BinaryOp::Gt
            | BinaryOp::Le
            | BinaryOp::Ge
            | BinaryOp::Ne => 3,
            BinaryOp::Add | BinaryOp::Sub => 4,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }
}
