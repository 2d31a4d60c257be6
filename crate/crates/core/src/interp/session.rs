//! Tick-driven execution of one frame on a virtual clock.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::trace::{nanos_to_secs, secs_to_nanos, EventKind, Nanos, TraceEvent};
use super::value::{eval_expr, Value};
use super::{RobotInterface, RuntimeFault, SessionError};
use crate::lang::{Expr, Frame, LoopCount, SensorName, SetupMode, SourceSpan, Stmt, StmtKind};

pub const DEFAULT_STATEMENT_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    AwaitButton,
    Running,
    Done,
    Faulted,
}

impl Phase {
    pub fn is_finished(self) -> bool {
        matches!(self, Phase::Done | Phase::Faulted)
    }
}

#[derive(Debug, Clone, Copy)]
enum BlockKind {
    Root,
    If,
    Loop {
        /// Iterations still to start after the current one; `None` forever.
        remaining: Option<u64>,
        iteration: u64,
        count: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy)]
struct BlockCursor {
    next: usize,
    kind: BlockKind,
}

enum Advance<'a> {
    Execute(&'a Stmt),
    Continue,
    Exhausted,
}

/// Execution state of one frame.
#[derive(Debug, Clone)]
pub struct Session {
    frame: Arc<Frame>,
    stack: Vec<BlockCursor>,
    phase: Phase,
    clock: Nanos,
    busy_until: Nanos,
    env: BTreeMap<SensorName, f64>,
    motors: (f64, f64),
    budget: usize,
    outbox: Vec<TraceEvent>,
}

impl Session {
    /// Starts a session for `frame`. `SI` frames run on the first step;
    /// `SB` frames wait for [`Session::press_button`].
    pub fn new(frame: impl Into<Arc<Frame>>) -> Result<Self, SessionError> {
        let frame = frame.into();
        let phase = match frame.setup {
            SetupMode::Ping => return Err(SessionError::RejectPing),
            SetupMode::Immediate => Phase::Running,
            SetupMode::ButtonStart => Phase::AwaitButton,
        };
        let ack = TraceEvent {
            t: 0.0,
            kind: EventKind::Ack {
                setup: frame.setup.keyword().to_string(),
            },
        };
        Ok(Self {
            frame,
            stack: vec![BlockCursor {
                next: 0,
                kind: BlockKind::Root,
            }],
            phase,
            clock: 0,
            busy_until: 0,
            env: BTreeMap::new(),
            motors: (0.0, 0.0),
            budget: DEFAULT_STATEMENT_BUDGET,
            outbox: vec![ack],
        })
    }

    pub fn with_statement_budget(mut self, budget: usize) -> Self {
        self.budget = budget.max(1);
        self
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Virtual seconds since the session was created.
    pub fn clock(&self) -> f64 {
        nanos_to_secs(self.clock)
    }

    pub fn clock_nanos(&self) -> Nanos {
        self.clock
    }

    pub fn busy_until(&self) -> f64 {
        nanos_to_secs(self.busy_until)
    }

    pub fn motors(&self) -> (f64, f64) {
        self.motors
    }

    /// Latest sampled value per sensor.
    pub fn env(&self) -> &BTreeMap<SensorName, f64> {
        &self.env
    }

    /// Events produced outside of [`Session::step`] (the initial `Ack`)
    /// that have not been collected yet.
    pub fn drain_events(&mut self) -> Vec<TraceEvent> {
        std::mem::take(&mut self.outbox)
    }

    /// Releases an `SB` session. Returns whether anything changed.
    pub fn press_button(&mut self) -> bool {
        if self.phase == Phase::AwaitButton {
            self.phase = Phase::Running;
            true
        } else {
            false
        }
    }

    /// Runs every statement that is due at the current virtual time, then
    /// advances the clock by `dt` seconds.
    pub fn step(&mut self, dt: f64, robot: &mut dyn RobotInterface) -> Vec<TraceEvent> {
        assert!(
            dt > 0.0 && dt.is_finite(),
            "step dt must be positive, got {dt}"
        );
        if self.phase == Phase::Running {
            if let Err((fault, span)) = self.run_due(robot) {
                self.fault(fault, span, robot);
            }
        }
        self.clock += secs_to_nanos(dt).max(1);
        self.drain_events()
    }

    /// Evaluates `expr` against live sensor reads, refreshing the sensor
    /// snapshot and recording a sample per read.
    pub fn eval_expr(
        &mut self,
        expr: &Expr,
        robot: &mut dyn RobotInterface,
    ) -> Result<Value, RuntimeFault> {
        let t = nanos_to_secs(self.clock);
        let env = &mut self.env;
        let outbox = &mut self.outbox;
        let robot: &dyn RobotInterface = robot;
        eval_expr(expr, &mut |name| {
            let value = robot.read_sensor(name);
            env.insert(name, value);
            outbox.push(TraceEvent {
                t,
                kind: EventKind::SensorSample {
                    sensor: name,
                    value,
                },
            });
            value
        })
    }

    /// Halts this session in favour of `new_frame`. A running session is
    /// stopped with a `Preempted` event; one still waiting for its button is
    /// dropped silently. Returns the old session's final events; the new
    /// session's `Ack` is left in its outbox.
    pub fn preempt(
        &mut self,
        new_frame: impl Into<Arc<Frame>>,
        robot: &mut dyn RobotInterface,
    ) -> Result<Vec<TraceEvent>, SessionError> {
        let next = Session::new(new_frame)?.with_statement_budget(self.budget);
        if self.phase == Phase::Running {
            self.emit(EventKind::Preempted);
            self.halt_motors(robot);
        }
        let old = std::mem::replace(self, next);
        Ok(old.outbox)
    }

    fn emit(&mut self, kind: EventKind) {
        self.outbox.push(TraceEvent {
            t: nanos_to_secs(self.clock),
            kind,
        });
    }

    fn set_motors(&mut self, left: f64, right: f64, robot: &mut dyn RobotInterface) {
        self.motors = (left, right);
        robot.set_motors(left, right);
        self.emit(EventKind::MotorSet { left, right });
    }

    fn halt_motors(&mut self, robot: &mut dyn RobotInterface) {
        if self.motors != (0.0, 0.0) {
            self.set_motors(0.0, 0.0, robot);
        } else {
            robot.set_motors(0.0, 0.0);
        }
    }

    fn fault(&mut self, fault: RuntimeFault, span: SourceSpan, robot: &mut dyn RobotInterface) {
        self.emit(EventKind::Error {
            code: fault.code().to_string(),
            message: fault.to_string(),
            offset: span.column(),
        });
        self.halt_motors(robot);
        self.phase = Phase::Faulted;
    }

    fn finish(&mut self, robot: &mut dyn RobotInterface) {
        self.halt_motors(robot);
        robot.beep();
        self.emit(EventKind::Beep);
        self.emit(EventKind::Done);
        self.phase = Phase::Done;
    }

    fn run_due(
        &mut self,
        robot: &mut dyn RobotInterface,
    ) -> Result<(), (RuntimeFault, SourceSpan)> {
        let frame = Arc::clone(&self.frame);
        let root = &frame.program.statements;
        let mut spent = 0usize;
        let mut last_span = frame.span;
        while self.clock >= self.busy_until {
            spent += 1;
            if spent > self.budget {
                return Err((
                    RuntimeFault::StatementBudgetExceeded(self.budget),
                    last_span,
                ));
            }
            match self.advance(root) {
                Advance::Execute(stmt) => {
                    last_span = stmt.span;
                    self.execute(stmt, robot).map_err(|f| (f, stmt.span))?;
                }
                Advance::Continue => {}
                Advance::Exhausted => {
                    self.finish(robot);
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    /// Moves the cursor to the next statement, unwinding finished blocks
    /// and restarting loop bodies.
    fn advance<'a>(&mut self, root: &'a [Stmt]) -> Advance<'a> {
        let block = resolve(root, &self.stack);
        let top = self.stack.last_mut().expect("root cursor is never popped");
        if let Some(stmt) = block.get(top.next) {
            top.next += 1;
            return Advance::Execute(stmt);
        }
        let mut iter_event = None;
        let outcome = match top.kind {
            BlockKind::Root => Advance::Exhausted,
            BlockKind::If => {
                self.stack.pop();
                Advance::Continue
            }
            BlockKind::Loop {
                remaining,
                iteration,
                count,
            } => {
                let again = remaining.map_or(Some(None), |r| r.checked_sub(1).map(Some));
                match again {
                    Some(remaining) => {
                        top.next = 0;
                        top.kind = BlockKind::Loop {
                            remaining,
                            iteration: iteration + 1,
                            count,
                        };
                        iter_event = Some(EventKind::LoopIter {
                            iteration: iteration + 1,
                            count,
                        });
                    }
                    None => {
                        self.stack.pop();
                    }
                }
                Advance::Continue
            }
        };
        if let Some(kind) = iter_event {
            self.emit(kind);
        }
        outcome
    }

    fn eval_number(
        &mut self,
        expr: &Expr,
        what: &str,
        robot: &mut dyn RobotInterface,
    ) -> Result<f64, RuntimeFault> {
        let n = self.eval_expr(expr, robot)?.as_num(what)?;
        if n.is_finite() {
            Ok(n)
        } else {
            Err(RuntimeFault::NonFinite(what.to_string()))
        }
    }

    fn warn(&mut self, span: SourceSpan, message: String) {
        self.emit(EventKind::Warning {
            message,
            offset: span.column(),
        });
    }

    fn duration(
        &mut self,
        expr: &Expr,
        what: &str,
        robot: &mut dyn RobotInterface,
    ) -> Result<Nanos, RuntimeFault> {
        let mut secs = self.eval_number(expr, what, robot)?;
        if secs < 0.0 {
            self.warn(expr.span, format!("negative {what} {secs} treated as 0"));
            secs = 0.0;
        }
        Ok(secs_to_nanos(secs))
    }

    fn execute(&mut self, stmt: &Stmt, robot: &mut dyn RobotInterface) -> Result<(), RuntimeFault> {
        match &stmt.kind {
            StmtKind::Move { dir, time, power } => {
                let duration = self.duration(time, "time", robot)?;
                let mut p = self.eval_number(power, "power", robot)?;
                if !(0.0..=100.0).contains(&p) {
                    let clamped = p.clamp(0.0, 100.0);
                    self.warn(power.span, format!("power {p} clamped to {clamped}"));
                    p = clamped;
                }
                let (sl, sr) = dir.wheel_signs();
                self.set_motors(sl * p, sr * p, robot);
                self.busy_until = self.clock.saturating_add(duration);
            }
            StmtKind::Stop => self.set_motors(0.0, 0.0, robot),
            StmtKind::Wait { seconds } => {
                let duration = self.duration(seconds, "wait", robot)?;
                self.busy_until = self.clock.saturating_add(duration);
            }
            StmtKind::SensorRead { sensor } => {
                let value = robot.read_sensor(*sensor);
                self.env.insert(*sensor, value);
                self.emit(EventKind::SensorSample {
                    sensor: *sensor,
                    value,
                });
            }
            StmtKind::If { condition, .. } => {
                if self.eval_expr(condition, robot)?.as_bool("IF condition")? {
                    self.stack.push(BlockCursor {
                        next: 0,
                        kind: BlockKind::If,
                    });
                }
            }
            StmtKind::Loop { count, .. } => {
                let count = match count {
                    LoopCount::Forever => None,
                    LoopCount::Finite(expr) => {
                        let n = self.eval_number(expr, "loop count", robot)?;
                        if n < 0.0 {
                            return Err(RuntimeFault::NegativeLoopCount(n));
                        }
                        if n.fract() != 0.0 {
                            self.warn(
                                expr.span,
                                format!("loop count {n} truncated to {}", n.trunc()),
                            );
                        }
                        Some(n.trunc().min(u64::MAX as f64) as u64)
                    }
                };
                if count == Some(0) {
                    return Ok(());
                }
                self.stack.push(BlockCursor {
                    next: 0,
                    kind: BlockKind::Loop {
                        remaining: count.map(|n| n - 1),
                        iteration: 1,
                        count,
                    },
                });
                self.emit(EventKind::LoopIter {
                    iteration: 1,
                    count,
                });
            }
            StmtKind::StartMarker => {}
        }
        Ok(())
    }
}

/// The statement list the innermost cursor walks. Each outer cursor has
/// already stepped past the statement that opened the next block.
fn resolve<'a>(root: &'a [Stmt], stack: &[BlockCursor]) -> &'a [Stmt] {
    let mut block = root;
    for cursor in &stack[..stack.len() - 1] {
        block = match &block[cursor.next - 1].kind {
            StmtKind::If { body, .. } | StmtKind::Loop { body, .. } => body,
            other => unreachable!("cursor opened by non-block statement {other:?}"),
        };
    }
    block
}
