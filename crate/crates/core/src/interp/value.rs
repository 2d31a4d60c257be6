//! Runtime values and expression evaluation.

use std::fmt;

use serde::Serialize;

use super::RuntimeFault;
use crate::lang::{BinaryOp, Expr, ExprKind, SensorName, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Bool(bool),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Bool(_) => "boolean",
        }
    }

    pub fn as_num(self, context: &str) -> Result<f64, RuntimeFault> {
        match self {
            Value::Num(n) => Ok(n),
            Value::Bool(_) => Err(RuntimeFault::TypeMismatch(format!(
                "{context} expects a number, got a boolean"
            ))),
        }
    }

    pub fn as_bool(self, context: &str) -> Result<bool, RuntimeFault> {
        match self {
            Value::Bool(b) => Ok(b),
            Value::Num(_) => Err(RuntimeFault::TypeMismatch(format!(
                "{context} expects a boolean, got a number"
            ))),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(n) => write!(f, "{n}"),
            Value::Bool(true) => f.write_str("TRUE"),
            Value::Bool(false) => f.write_str("FALSE"),
        }
    }
}

/// Evaluates `expr`. Every sensor reference calls `sensors` afresh.
/// Both operands of a binary operator are always evaluated, left first,
/// before the operator is applied.
pub fn eval_expr(
    expr: &Expr,
    sensors: &mut dyn FnMut(SensorName) -> f64,
) -> Result<Value, RuntimeFault> {
    match &expr.kind {
        ExprKind::Number(n) => Ok(Value::Num(*n)),
        ExprKind::Bool(b) => Ok(Value::Bool(*b)),
        ExprKind::Sensor(name) => Ok(Value::Num(sensors(*name))),
        ExprKind::Unary { op, operand } => {
            let v = eval_expr(operand, sensors)?;
            match op {
                UnaryOp::Neg => Ok(Value::Num(-v.as_num("unary -")?)),
                UnaryOp::Not => Ok(Value::Bool(!v.as_bool("NOT")?)),
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let l = eval_expr(lhs, sensors)?;
            let r = eval_expr(rhs, sensors)?;
            apply_binary(*op, l, r)
        }
        ExprKind::Round { value, decimals } => {
            let v = eval_expr(value, sensors)?.as_num("ROUND value")?;
            let d = eval_expr(decimals, sensors)?.as_num("ROUND decimals")?;
            round_half_away(v, d).map(Value::Num)
        }
    }
}

/// Evaluates an expression that must not reference sensors.
pub fn eval_const(expr: &Expr) -> Result<Value, RuntimeFault> {
    eval_expr(expr, &mut |name| {
        panic!("eval_const called on an expression reading {name}")
    })
}

fn apply_binary(op: BinaryOp, l: Value, r: Value) -> Result<Value, RuntimeFault> {
    let sym = op.symbol();
    let nums = |l: Value, r: Value| -> Result<(f64, f64), RuntimeFault> {
        Ok((l.as_num(sym)?, r.as_num(sym)?))
    };
    Ok(match op {
        BinaryOp::Add => {
            let (a, b) = nums(l, r)?;
            Value::Num(a + b)
        }
        BinaryOp::Sub => {
            let (a, b) = nums(l, r)?;
            Value::Num(a - b)
        }
        BinaryOp::Mul => {
            let (a, b) = nums(l, r)?;
            Value::Num(a * b)
        }
        BinaryOp::Div => {
            let (a, b) = nums(l, r)?;
            if b == 0.0 {
                return Err(RuntimeFault::DivisionByZero);
            }
            Value::Num(a / b)
        }
        BinaryOp::Mod => {
            let (a, b) = nums(l, r)?;
            if b == 0.0 {
                return Err(RuntimeFault::ModuloByZero);
            }
            Value::Num(a % b)
        }
        BinaryOp::Lt => {
            let (a, b) = nums(l, r)?;
            Value::Bool(a < b)
        }
        BinaryOp::Gt => {
            let (a, b) = nums(l, r)?;
            Value::Bool(a > b)
        }
        BinaryOp::Le => {
            let (a, b) = nums(l, r)?;
            Value::Bool(a <= b)
        }
        BinaryOp::Ge => {
            let (a, b) = nums(l, r)?;
            Value::Bool(a >= b)
        }
        BinaryOp::Eq | BinaryOp::Ne => {
            let equal = match (l, r) {
                (Value::Num(a), Value::Num(b)) => a == b,
                (Value::Bool(a), Value::Bool(b)) => a == b,
                _ => {
                    return Err(RuntimeFault::TypeMismatch(format!(
                        "{sym} compares a {} with a {}",
                        l.type_name(),
                        r.type_name()
                    )))
                }
            };
            Value::Bool(if op == BinaryOp::Eq { equal } else { !equal })
        }
        BinaryOp::And => Value::Bool(l.as_bool(sym)? & r.as_bool(sym)?),
        BinaryOp::Or => Value::Bool(l.as_bool(sym)? | r.as_bool(sym)?),
    })
}

/// Rounds half away from zero at `decimals` places, working on the shortest
/// decimal representation of `value` so that `ROUND(1.005, 2)` is `1.01`
/// as a calculator would give. Fractional `decimals` truncate.
pub fn round_half_away(value: f64, decimals: f64) -> Result<f64, RuntimeFault> {
    if decimals.is_nan() {
        return Err(RuntimeFault::NonFinite("ROUND decimals".into()));
    }
    if decimals < 0.0 {
        return Err(RuntimeFault::NegativeDecimals);
    }
    if !value.is_finite() {
        return Ok(value);
    }
    let places = decimals.trunc().min(1024.0) as usize;
    let text = format!("{}", value.abs());
    let (int_part, frac_part) = text.split_once('.').unwrap_or((&text, ""));
    if frac_part.len() <= places {
        return Ok(value);
    }

    let mut digits: Vec<u8> = int_part
        .bytes()
        .chain(frac_part[..places].bytes())
        .collect();
    if frac_part.as_bytes()[places] >= b'5' {
        let mut carry = true;
        for d in digits.iter_mut().rev() {
            if *d == b'9' {
                *d = b'0';
            } else {
                *d += 1;
                carry = false;
                break;
            }
        }
        if carry {
            digits.insert(0, b'1');
        }
    }
    let split = digits.len() - places;
    let mut rounded = String::with_capacity(digits.len() + 1);
    rounded.push_str(std::str::from_utf8(&digits[..split]).expect("ascii digits"));
    if places > 0 {
        rounded.push('.');
        rounded.push_str(std::str::from_utf8(&digits[split..]).expect("ascii digits"));
    }
    let magnitude: f64 = rounded.parse().expect("valid decimal");
    if magnitude == 0.0 {
        Ok(0.0)
    } else {
        Ok(magnitude.copysign(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_expr;

    fn eval(src: &str) -> Result<Value, RuntimeFault> {
        eval_const(&parse_expr(src).unwrap())
    }

    #[test]
    fn sensor_comparison() {
        let e = parse_expr("LIGHT_R > 100").unwrap();
        let v = eval_expr(&e, &mut |_| 150.0).unwrap();
        assert_eq!(v, Value::Bool(true));
    }

    #[test]
    fn rounding() {
        assert_eq!(eval("ROUND(2.456, 1)").unwrap(), Value::Num(2.5));
        assert_eq!(eval("ROUND(2.5, 0)").unwrap(), Value::Num(3.0));
        assert_eq!(eval("ROUND(-2.5, 0)").unwrap(), Value::Num(-3.0));
        assert_eq!(eval("ROUND(1.005, 2)").unwrap(), Value::Num(1.01));
        assert_eq!(eval("ROUND(9.96, 1)").unwrap(), Value::Num(10.0));
        assert_eq!(eval("ROUND(-0.4, 0)").unwrap(), Value::Num(0.0));
        assert_eq!(eval("ROUND(1.23456, 10)").unwrap(), Value::Num(1.23456));
        assert_eq!(eval("ROUND(2.75, 1.9)").unwrap(), Value::Num(2.8));
        assert_eq!(
            eval("ROUND(1, 0 - 1)").unwrap_err(),
            RuntimeFault::NegativeDecimals
        );
    }

    #[test]
    fn arithmetic_and_logic() {
        assert_eq!(eval("7 % 3").unwrap(), Value::Num(1.0));
        assert_eq!(eval("-7 % 3").unwrap(), Value::Num(-1.0));
        assert_eq!(eval("NOT (TRUE AND FALSE)").unwrap(), Value::Bool(true));
        assert_eq!(eval("TRUE = FALSE").unwrap(), Value::Bool(false));
        assert_eq!(eval("TRUE <> FALSE").unwrap(), Value::Bool(true));
        assert_eq!(eval("0.1 + 0.2 = 0.3").unwrap(), Value::Bool(false));
        assert_eq!(eval("1 + 2 * 3").unwrap(), Value::Num(7.0));
    }

    #[test]
    fn faults() {
        assert_eq!(eval("1 / 0").unwrap_err(), RuntimeFault::DivisionByZero);
        assert_eq!(eval("1 % 0").unwrap_err(), RuntimeFault::ModuloByZero);
        assert!(matches!(
            eval("TRUE + 1"),
            Err(RuntimeFault::TypeMismatch(_))
        ));
        assert!(matches!(
            eval("1 = TRUE"),
            Err(RuntimeFault::TypeMismatch(_))
        ));
        assert!(matches!(
            eval("TRUE < FALSE"),
            Err(RuntimeFault::TypeMismatch(_))
        ));
        assert!(matches!(eval("NOT 1"), Err(RuntimeFault::TypeMismatch(_))));
    }

    #[test]
    fn evaluation_is_strict() {
        // The right operand still faults even when the left decides the result.
        assert_eq!(
            eval("FALSE AND 1 / 0 > 1").unwrap_err(),
            RuntimeFault::DivisionByZero
        );
        assert_eq!(
            eval("TRUE OR 1 % 0 > 1").unwrap_err(),
            RuntimeFault::ModuloByZero
        );
    }

    #[test]
    fn sensors_are_read_each_time() {
        let e = parse_expr("DISTANCE + DISTANCE").unwrap();
        let mut calls = 0;
        let v = eval_expr(&e, &mut |_| {
            calls += 1;
            calls as f64
        })
        .unwrap();
        assert_eq!(v, Value::Num(3.0));
        assert_eq!(calls, 2);
    }
}
