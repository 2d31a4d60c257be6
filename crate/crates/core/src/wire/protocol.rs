//! Line protocol and the transport-free service state machine.
//!
//! Inbound, one per line: a TiniScript frame, or the control line `BTN`.
//! Outbound, one per line:
//!
//! | frame              | when                                              |
//! |--------------------|---------------------------------------------------|
//! | `PONG`             | reply to a `PING|...` frame                       |
//! | `ACK`              | reply to an accepted frame or `BTN`               |
//! | `ERR <off> <code>` | reply to a rejected line, or a runtime fault      |
//! | `PREEMPTED`        | a running program was replaced by a new frame     |
//! | `EVT BUTTON_WAIT`  | an `SB` program is waiting for the button         |
//! | `EVT BEEP`         | the buzzer sounded at the end of a program        |
//! | `DONE`             | the program finished normally                     |
//!
//! `<off>` is a one-based byte column into the request line; `0` marks
//! errors that are not tied to a position.

use std::fmt;

use serde::Serialize;

use crate::driver::Driver;
use crate::interp::trace::{secs_to_nanos, Nanos};
use crate::interp::{EventKind, Phase, TraceEvent};
use crate::lang::{self, Frame, SetupMode};
use crate::sim::{LightSide, Simulator};

/// Longest accepted request line in bytes, excluding the newline.
pub const MAX_LINE_LEN: usize = 64 * 1024;
pub const BUTTON_LINE: &str = "BTN";
pub const DEFAULT_TELEMETRY_INTERVAL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    Pong,
    Ack,
    Err { offset: usize, code: String },
    EvtBeep,
    EvtButtonWait,
    Done,
    Preempted,
}

impl Response {
    pub fn err(offset: usize, code: impl Into<String>) -> Self {
        Response::Err {
            offset,
            code: code.into(),
        }
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Response::Pong => f.write_str("PONG"),
            Response::Ack => f.write_str("ACK"),
            Response::Err { offset, code } => write!(f, "ERR {offset} {code}"),
            Response::EvtBeep => f.write_str("EVT BEEP"),
            Response::EvtButtonWait => f.write_str("EVT BUTTON_WAIT"),
            Response::Done => f.write_str("DONE"),
            Response::Preempted => f.write_str("PREEMPTED"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Request {
    Frame(Frame),
    Button,
}

/// Decodes one request line (trailing `\n` / `\r\n` is tolerated). Parse
/// and static errors come back as the `ERR` response to send.
pub fn decode_request(line: &str) -> Result<Request, Response> {
    let line = line.strip_suffix('\n').unwrap_or(line);
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.len() > MAX_LINE_LEN {
        return Err(Response::err(0, "line_too_long"));
    }
    if line.trim() == BUTTON_LINE {
        return Ok(Request::Button);
    }
    match lang::compile(line) {
        Ok((frame, _warnings)) => Ok(Request::Frame(frame)),
        Err(diags) => {
            let first = diags
                .iter()
                .find(|d| d.is_error())
                .expect("compile fails only with an error");
            Err(Response::err(first.span.column(), first.code.as_str()))
        }
    }
}

/// One periodic snapshot for the telemetry channel. Field order is the
/// wire key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TelemetryRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub ml: f64,
    pub mr: f64,
    pub light_l: f64,
    pub light_r: f64,
    pub distance: f64,
    pub phase: &'static str,
}

impl TelemetryRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("telemetry serializes")
    }
}

pub fn phase_name(phase: Option<Phase>) -> &'static str {
    match phase {
        None => "Idle",
        Some(Phase::AwaitButton) => "AwaitButton",
        Some(Phase::Running) => "Running",
        Some(Phase::Done) => "Done",
        Some(Phase::Faulted) => "Faulted",
    }
}

/// Something the service wants to send.
#[derive(Debug, Clone, PartialEq)]
pub enum Outbound {
    /// Immediate answer, only to the client that sent the line.
    Reply(Response),
    /// Session event, to every connected client.
    Broadcast(Response),
    Telemetry(TelemetryRecord),
}

/// The serial service without any I/O: feed it request lines and clock
/// steps, collect what it wants to send. One robot, at most one session;
/// a new `SI`/`SB` frame preempts the current one.
#[derive(Debug)]
pub struct ServiceCore {
    driver: Driver,
    dt: f64,
    telemetry_every: Nanos,
    next_telemetry: Nanos,
    trace: Vec<TraceEvent>,
    keep_trace: bool,
}

impl ServiceCore {
    pub fn new(sim: Simulator, dt: f64) -> Self {
        Self {
            driver: Driver::new(sim),
            dt,
            telemetry_every: secs_to_nanos(DEFAULT_TELEMETRY_INTERVAL),
            next_telemetry: 0,
            trace: Vec::new(),
            keep_trace: false,
        }
    }

    pub fn with_telemetry_interval(mut self, secs: f64) -> Self {
        self.telemetry_every = secs_to_nanos(secs).max(1);
        self
    }

    /// Keep every trace event in memory (see [`ServiceCore::trace`]).
    pub fn with_trace(mut self) -> Self {
        self.keep_trace = true;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn driver(&self) -> &Driver {
        &self.driver
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    /// True while the clock must keep moving for the session to progress.
    pub fn is_running(&self) -> bool {
        self.driver.phase() == Some(Phase::Running)
    }

    pub fn handle_line(&mut self, line: &str) -> Vec<Outbound> {
        match decode_request(line) {
            Err(resp) => vec![Outbound::Reply(resp)],
            Ok(Request::Button) => {
                if self.driver.press_button() {
                    log::debug!("button pressed");
                }
                vec![Outbound::Reply(Response::Ack)]
            }
            Ok(Request::Frame(frame)) if frame.setup == SetupMode::Ping => {
                vec![Outbound::Reply(Response::Pong)]
            }
            Ok(Request::Frame(frame)) => {
                let setup = frame.setup;
                let events = self
                    .driver
                    .load(frame)
                    .expect("ping frames are answered above");
                let mut out = self.translate(events);
                out.push(Outbound::Reply(Response::Ack));
                if setup == SetupMode::ButtonStart {
                    out.push(Outbound::Broadcast(Response::EvtButtonWait));
                }
                out
            }
        }
    }

    /// Advances the service clock by one `dt`.
    pub fn step(&mut self) -> Vec<Outbound> {
        let mut out = Vec::new();
        let now = secs_to_nanos(self.driver.elapsed());
        if now >= self.next_telemetry {
            out.push(Outbound::Telemetry(self.telemetry()));
            self.next_telemetry = now + self.telemetry_every;
        }
        let events = self.driver.step(self.dt);
        out.extend(self.translate(events));
        out
    }

    pub fn telemetry(&self) -> TelemetryRecord {
        let sim = self.driver.sim();
        let state = sim.state();
        TelemetryRecord {
            t: self.driver.elapsed(),
            x: state.pose.x,
            y: state.pose.y,
            theta: state.pose.theta,
            ml: state.motor_left,
            mr: state.motor_right,
            light_l: sim.read_light(LightSide::Left),
            light_r: sim.read_light(LightSide::Right),
            distance: sim.read_distance(),
            phase: phase_name(self.driver.phase()),
        }
    }

    fn translate(&mut self, events: Vec<TraceEvent>) -> Vec<Outbound> {
        let out = events
            .iter()
            .filter_map(|e| {
                let resp = match &e.kind {
                    EventKind::Preempted => Response::Preempted,
                    EventKind::Beep => Response::EvtBeep,
                    EventKind::Done => Response::Done,
                    EventKind::Error { code, offset, .. } => Response::err(*offset, code.clone()),
                    _ => return None,
                };
                Some(Outbound::Broadcast(resp))
            })
            .collect();
        if self.keep_trace {
            self.trace.extend(events);
        }
        out
    }
}
