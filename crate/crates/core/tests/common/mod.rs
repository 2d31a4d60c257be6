//! Shared fixtures for the integration tests: program corpus, proptest
//! generators, an independent expression evaluator and a whitespace
//! mutator.

#![allow(dead_code)]

pub mod net;

use proptest::prelude::*;
use proptest::strategy::BoxedStrategy;

use tiniscript::lang::{
    tokenize, BinaryOp, Direction, Expr, ExprKind, Frame, LoopCount, SensorName, SetupMode, Stmt,
    StmtKind, UnaryOp,
};

pub const EXAMPLE_FORWARD: &str = "SI|F(5, 80)";
pub const EXAMPLE_BUTTON: &str = "SB|R(3, 60)";
pub const EXAMPLE_LIGHT: &str = "SI|IF(LIGHT_R > 100);F(4, 70);ENDIF";
pub const EXAMPLE_PING: &str = "PING|check_connection";
pub const EXAMPLE_LOOP: &str = "SI|LOOP(3);F(2, 50);END_LOOP";
pub const MODULE_SEQUENCE: &str = "L(1,50); B(1,80); W(1); S;";
pub const OBSTACLE_WIRE: &str =
    "SI|START;LOOP(FOREVER);F(1, 80);DISTANCE;IF(DISTANCE < 10);STOP;R(1, 60);ENDIF;END_LOOP";
pub const OBSTACLE_LISTING: &str = "SI|LOOP(FOREVER);\n  F(1, 80);\n  DISTANCE;\n  IF(DISTANCE < 10);\n    STOP;\n    R(1, 60);\n  ENDIF;\nEND_LOOP";

pub const EXAMPLE_PROGRAMS: [&str; 5] = [
    EXAMPLE_FORWARD,
    EXAMPLE_BUTTON,
    EXAMPLE_LIGHT,
    EXAMPLE_PING,
    EXAMPLE_LOOP,
];

// ---------------------------------------------------------------- generators

fn number() -> BoxedStrategy<f64> {
    prop_oneof![
        4 => (0u32..200).prop_map(f64::from),
        3 => (0u32..100_000).prop_map(|n| f64::from(n) / 1000.0),
        1 => 0.0f64..1e6,
    ]
    .boxed()
}

fn sensor() -> BoxedStrategy<SensorName> {
    prop::sample::select(SensorName::ALL.to_vec()).boxed()
}

fn ops(list: &[BinaryOp]) -> BoxedStrategy<BinaryOp> {
    prop::sample::select(list.to_vec()).boxed()
}

const ARITH: [BinaryOp; 5] = [
    BinaryOp::Add,
    BinaryOp::Sub,
    BinaryOp::Mul,
    BinaryOp::Div,
    BinaryOp::Mod,
];
const COMPARE: [BinaryOp; 6] = [
    BinaryOp::Eq,
    BinaryOp::Lt,
    BinaryOp::Gt,
    BinaryOp::Le,
    BinaryOp::Ge,
    BinaryOp::Ne,
];
const LOGIC: [BinaryOp; 2] = [BinaryOp::And, BinaryOp::Or];

/// Numeric expressions of at most `depth` levels.
pub fn num_expr(depth: u32, sensors: bool) -> BoxedStrategy<Expr> {
    let leaf = if sensors {
        prop_oneof![3 => number().prop_map(Expr::num), 1 => sensor().prop_map(Expr::sensor)].boxed()
    } else {
        number().prop_map(Expr::num).boxed()
    };
    if depth == 0 {
        return leaf;
    }
    let sub = num_expr(depth - 1, sensors);
    prop_oneof![
        3 => leaf,
        1 => sub.clone().prop_map(|e| Expr::unary(UnaryOp::Neg, e)),
        4 => (ops(&ARITH), sub.clone(), sub.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
        1 => (sub, 0u32..5).prop_map(|(v, d)| Expr::round(v, Expr::num(f64::from(d)))),
    ]
    .boxed()
}

/// Boolean expressions of at most `depth` levels.
pub fn bool_expr(depth: u32, sensors: bool) -> BoxedStrategy<Expr> {
    let leaf = any::<bool>().prop_map(Expr::boolean).boxed();
    if depth == 0 {
        return leaf;
    }
    let n = num_expr(depth - 1, sensors);
    let b = bool_expr(depth - 1, sensors);
    prop_oneof![
        2 => leaf,
        1 => b.clone().prop_map(|e| Expr::unary(UnaryOp::Not, e)),
        4 => (ops(&COMPARE), n.clone(), n).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
        2 => (ops(&LOGIC), b.clone(), b.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
        1 => (ops(&[BinaryOp::Eq, BinaryOp::Ne]), b.clone(), b).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
    ]
    .boxed()
}

/// Any expression shape, including ill-typed ones; the parser and printer
/// do not care about types.
pub fn any_expr(depth: u32) -> BoxedStrategy<Expr> {
    let typed = prop_oneof![num_expr(depth, true), bool_expr(depth, true)].boxed();
    if depth == 0 {
        return typed;
    }
    let sub = any_expr(depth - 1);
    prop_oneof![
        4 => typed,
        1 => (ops(&BinaryOp::ALL), sub.clone(), sub.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
        1 => (prop::sample::select(vec![UnaryOp::Neg, UnaryOp::Not]), sub.clone())
            .prop_map(|(op, e)| Expr::unary(op, e)),
        1 => (sub.clone(), sub).prop_map(|(v, d)| Expr::round(v, d)),
    ]
    .boxed()
}

fn direction() -> BoxedStrategy<Direction> {
    prop::sample::select(vec![
        Direction::Forward,
        Direction::Backward,
        Direction::Left,
        Direction::Right,
    ])
    .boxed()
}

pub fn stmt(depth: u32) -> BoxedStrategy<Stmt> {
    let simple = prop_oneof![
        4 => (direction(), any_expr(2), any_expr(2))
            .prop_map(|(dir, time, power)| Stmt::new(StmtKind::Move { dir, time, power })),
        2 => Just(Stmt::new(StmtKind::Stop)),
        2 => any_expr(2).prop_map(|seconds| Stmt::new(StmtKind::Wait { seconds })),
        2 => sensor().prop_map(|sensor| Stmt::new(StmtKind::SensorRead { sensor })),
        1 => Just(Stmt::new(StmtKind::StartMarker)),
    ]
    .boxed();
    if depth == 0 {
        return simple;
    }
    let body = prop::collection::vec(stmt(depth - 1), 0..4);
    let nonempty = prop::collection::vec(stmt(depth - 1), 1..4);
    let count = prop_oneof![
        1 => Just(LoopCount::Forever),
        3 => any_expr(1).prop_map(LoopCount::Finite),
    ];
    prop_oneof![
        5 => simple,
        1 => (any_expr(2), body).prop_map(|(condition, body)| Stmt::new(StmtKind::If { condition, body })),
        1 => (count, nonempty).prop_map(|(count, body)| Stmt::new(StmtKind::Loop { count, body })),
    ]
    .boxed()
}

pub fn frame() -> BoxedStrategy<Frame> {
    let setup = prop::sample::select(vec![SetupMode::Immediate, SetupMode::ButtonStart]);
    prop_oneof![
        20 => (setup, prop::collection::vec(stmt(2), 0..6)).prop_map(|(s, body)| Frame::new(s, body)),
        1 => Just(Frame::new(SetupMode::Ping, Vec::new())),
    ]
    .boxed()
}

// ---------------------------------------------------------------- whitespace

/// Rebuilds `source` from its tokens with the given separators: `gaps[i]`
/// goes before token `i`, cycling when there are more tokens than gaps.
/// Separators never glue two tokens into one.
pub fn respace(source: &str, gaps: &[String]) -> String {
    let (setup, body) = source.split_once('|').expect("frame has a bar");
    let mut gap = gaps.iter().cycle();
    let mut out = String::new();
    out.push_str(gap.next().unwrap());
    out.push_str(setup.trim());
    out.push_str(gap.next().unwrap());
    out.push('|');
    if setup.trim() == "PING" {
        out.push_str(body);
        return out;
    }
    let tokens = tokenize(body).expect("valid frame body");
    let mut prev_end = 0usize;
    for tok in &tokens {
        let text = &body[tok.span.start..tok.span.end];
        let g = gap.next().unwrap();
        let needs_space = prev_end > 0
            && is_word_byte(body.as_bytes()[prev_end - 1])
            && is_word_byte(text.as_bytes()[0]);
        let is_pair = prev_end > 0
            && matches!(
                (&body[prev_end - 1..prev_end], &text[..1]),
                ("<", "=") | ("<", ">") | (">", "=")
            );
        if (needs_space || is_pair) && g.is_empty() {
            out.push(' ');
        } else {
            out.push_str(g);
        }
        out.push_str(text);
        prev_end = tok.span.end;
    }
    out.push_str(gap.next().unwrap());
    out
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'.'
}

pub fn whitespace() -> BoxedStrategy<String> {
    prop::collection::vec(prop::sample::select(vec![' ', '\t', '\n', '\r']), 0..4)
        .prop_map(|cs| cs.into_iter().collect())
        .boxed()
}

// ---------------------------------------------------------------- oracle

/// Result of the reference evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    Num(f64),
    Bool(bool),
    Fault,
}

/// Straightforward recursive evaluator used as ground truth for the VM.
/// Sensor reads are not supported.
pub fn oracle_eval(e: &Expr) -> Oracle {
    use Oracle::*;
    match &e.kind {
        ExprKind::Number(n) => Num(*n),
        ExprKind::Bool(b) => Bool(*b),
        ExprKind::Sensor(_) => panic!("oracle evaluates sensor-free expressions only"),
        ExprKind::Unary { op, operand } => match (op, oracle_eval(operand)) {
            (UnaryOp::Neg, Num(n)) => Num(-n),
            (UnaryOp::Not, Bool(b)) => Bool(!b),
            _ => Fault,
        },
        ExprKind::Binary { op, lhs, rhs } => {
            let (l, r) = (oracle_eval(lhs), oracle_eval(rhs));
            if l == Fault || r == Fault {
                return Fault;
            }
            match (op, l, r) {
                (BinaryOp::Add, Num(a), Num(b)) => Num(a + b),
                (BinaryOp::Sub, Num(a), Num(b)) => Num(a - b),
                (BinaryOp::Mul, Num(a), Num(b)) => Num(a * b),
                (BinaryOp::Div | BinaryOp::Mod, Num(_), Num(0.0)) => Fault,
                (BinaryOp::Div, Num(a), Num(b)) => Num(a / b),
                (BinaryOp::Mod, Num(a), Num(b)) => Num(exact_fmod(a, b)),
                (BinaryOp::Lt, Num(a), Num(b)) => Bool(a < b),
                (BinaryOp::Gt, Num(a), Num(b)) => Bool(a > b),
                (BinaryOp::Le, Num(a), Num(b)) => Bool(a <= b),
                (BinaryOp::Ge, Num(a), Num(b)) => Bool(a >= b),
                (BinaryOp::Eq, Num(a), Num(b)) => Bool(a == b),
                (BinaryOp::Ne, Num(a), Num(b)) => Bool(a != b),
                (BinaryOp::Eq, Bool(a), Bool(b)) => Bool(a == b),
                (BinaryOp::Ne, Bool(a), Bool(b)) => Bool(a != b),
                (BinaryOp::And, Bool(a), Bool(b)) => Bool(a && b),
                (BinaryOp::Or, Bool(a), Bool(b)) => Bool(a || b),
                _ => Fault,
            }
        }
        ExprKind::Round { value, decimals } => match (oracle_eval(value), oracle_eval(decimals)) {
            (Num(v), Num(d)) if d >= 0.0 => Num(oracle_round(v, d)),
            _ => Fault,
        },
    }
}

/// Exact floating remainder with the sign of the dividend, by repeated
/// subtraction of doubled divisors (each subtraction is exact).
fn exact_fmod(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() || a.is_infinite() {
        return f64::NAN;
    }
    if b.is_infinite() {
        return a;
    }
    let (mut r, m) = (a.abs(), b.abs());
    while r >= m {
        let mut d = m;
        while d * 2.0 <= r {
            d *= 2.0;
        }
        r -= d;
    }
    r.copysign(a)
}

/// Half-away-from-zero rounding of the shortest decimal form of `v`,
/// computed from the scientific-notation digits.
pub fn oracle_round(v: f64, d: f64) -> f64 {
    if !v.is_finite() {
        return v;
    }
    let places = d.trunc() as i64;
    let sci = format!("{:e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i64 = exp.parse().unwrap();
    let digits: Vec<u8> = mantissa
        .bytes()
        .filter(u8::is_ascii_digit)
        .map(|b| b - b'0')
        .collect();
    // v = 0.d1 d2 ... dn * 10^(exp + 1); keep this many leading digits.
    let keep = exp + 1 + places;
    if keep >= digits.len() as i64 {
        return v;
    }
    let mut kept: Vec<u8> = if keep > 0 {
        digits[..keep as usize].to_vec()
    } else {
        Vec::new()
    };
    let next = if keep >= 0 { digits[keep as usize] } else { 0 };
    if next >= 5 {
        let mut i = kept.len();
        loop {
            if i == 0 {
                kept.insert(0, 1);
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    if kept.iter().all(|&x| x == 0) {
        return 0.0;
    }
    let int: String = kept.iter().map(|x| char::from(b'0' + x)).collect();
    let magnitude: f64 = format!("{int}e{}", -places).parse().unwrap();
    magnitude.copysign(v)
}

/// Equality for the oracle comparison: exact for booleans and faults,
/// relative 1e-12 for numbers (NaN matches NaN).
pub fn oracle_agrees(vm: Oracle, oracle: Oracle) -> bool {
    match (vm, oracle) {
        (Oracle::Num(a), Oracle::Num(b)) => {
            (a.is_nan() && b.is_nan()) || a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
        }
        (a, b) => a == b,
    }
}

// ------------------------------------------------------------- scenarios

/// Stop-then-turn reactions, each paired with the DISTANCE reading that
/// triggered it.
pub fn reactions(events: &[tiniscript::interp::TraceEvent]) -> Vec<f64> {
    use tiniscript::interp::EventKind;
    let mut last_distance = f64::INFINITY;
    let mut out = Vec::new();
    for pair in events.windows(2) {
        if let EventKind::SensorSample {
            sensor: SensorName::Distance,
            value,
        } = pair[0].kind
        {
            last_distance = value;
        }
        let stop = matches!(pair[0].kind, EventKind::MotorSet { left, right } if left == 0.0 && right == 0.0);
        let turn = matches!(pair[1].kind, EventKind::MotorSet { left, right } if left > 0.0 && right == -left);
        if stop && turn {
            out.push(last_distance);
        }
    }
    out
}
