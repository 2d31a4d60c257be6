//! The interpreter: runs a parsed frame against a robot on a virtual clock
//! and records everything it does as trace events.

pub mod session;
pub mod trace;
pub mod value;

use std::cell::RefCell;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::lang::SensorName;

pub use session::{Phase, Session, DEFAULT_STATEMENT_BUDGET};
pub use trace::{count_by_kind, read_jsonl, write_jsonl, EventKind, Nanos, TraceEvent};
pub use value::{eval_const, eval_expr, round_half_away, Value};

/// What the interpreter may do to a robot.
pub trait RobotInterface {
    /// Wheel powers in percent, each in `-100..=100`.
    fn set_motors(&mut self, left: f64, right: f64);
    fn read_sensor(&self, sensor: SensorName) -> f64;
    fn beep(&mut self);
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeFault {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulo by zero")]
    ModuloByZero,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("negative loop count {0}")]
    NegativeLoopCount(f64),
    #[error("ROUND with negative decimals")]
    NegativeDecimals,
    #[error("{0} is not a finite number")]
    NonFinite(String),
    #[error("more than {0} statements ran without the clock advancing")]
    StatementBudgetExceeded(usize),
}

impl RuntimeFault {
    pub fn code(&self) -> &'static str {
        match self {
            RuntimeFault::DivisionByZero => "DivisionByZero",
            RuntimeFault::ModuloByZero => "ModuloByZero",
            RuntimeFault::TypeMismatch(_) => "TypeMismatch",
            RuntimeFault::NegativeLoopCount(_) => "NegativeLoopCount",
            RuntimeFault::NegativeDecimals => "NegativeDecimals",
            RuntimeFault::NonFinite(_) => "NonFinite",
            RuntimeFault::StatementBudgetExceeded(_) => "StatementBudgetExceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("PING frames are answered by the transport and never executed")]
    RejectPing,
}

/// A robot with fixed sensor readings that records every call. Handy for
/// exercising the interpreter without a world.
#[derive(Debug, Default)]
pub struct ScriptedRobot {
    pub sensors: BTreeMap<SensorName, f64>,
    pub motors: (f64, f64),
    pub motor_calls: Vec<(f64, f64)>,
    pub beeps: usize,
    pub reads: RefCell<Vec<SensorName>>,
}

impl ScriptedRobot {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_sensor(mut self, sensor: SensorName, value: f64) -> Self {
        self.sensors.insert(sensor, value);
        self
    }
}

impl RobotInterface for ScriptedRobot {
    fn set_motors(&mut self, left: f64, right: f64) {
        self.motors = (left, right);
        self.motor_calls.push((left, right));
    }

    fn read_sensor(&self, sensor: SensorName) -> f64 {
        self.reads.borrow_mut().push(sensor);
        self.sensors.get(&sensor).copied().unwrap_or(0.0)
    }

    fn beep(&mut self) {
        self.beeps += 1;
    }
}
