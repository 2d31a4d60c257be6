//! Couples an interpreter session to the simulator and runs whole programs.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::interp::trace::{nanos_to_secs, secs_to_nanos, Nanos};
use crate::interp::{count_by_kind, EventKind, Phase, Session, SessionError, TraceEvent};
use crate::lang::Frame;
use crate::sim::{Pose, Simulator};

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_MAX_TIME: f64 = 60.0;

/// One robot plus at most one active session. Each [`Driver::step`] runs the
/// due statements at the current instant, then integrates the robot over
/// `dt` with the resulting motor setpoints.
#[derive(Debug)]
pub struct Driver {
    sim: Simulator,
    session: Option<Session>,
    elapsed: Nanos,
}

impl Driver {
    pub fn new(sim: Simulator) -> Self {
        Self {
            sim,
            session: None,
            elapsed: 0,
        }
    }

    pub fn sim(&self) -> &Simulator {
        &self.sim
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    /// Virtual seconds since the driver was created.
    pub fn elapsed(&self) -> f64 {
        nanos_to_secs(self.elapsed)
    }

    pub fn phase(&self) -> Option<Phase> {
        self.session.as_ref().map(Session::phase)
    }

    /// Starts `frame`, preempting any active session. Returns the old
    /// session's final events followed by the new session's `Ack`.
    pub fn load(&mut self, frame: impl Into<Arc<Frame>>) -> Result<Vec<TraceEvent>, SessionError> {
        let frame = frame.into();
        match self.session.as_mut() {
            Some(active) if !active.phase().is_finished() => {
                let mut events = active.preempt(frame, &mut self.sim)?;
                events.extend(active.drain_events());
                Ok(events)
            }
            _ => {
                let mut session = Session::new(frame)?;
                let events = session.drain_events();
                self.session = Some(session);
                Ok(events)
            }
        }
    }

    pub fn press_button(&mut self) -> bool {
        self.session.as_mut().is_some_and(Session::press_button)
    }

    pub fn step(&mut self, dt: f64) -> Vec<TraceEvent> {
        let mut events = match self.session.as_mut() {
            Some(session) => session.step(dt, &mut self.sim),
            None => Vec::new(),
        };
        let was_touching = self.sim.state().collided;
        let state = self.sim.tick(dt);
        self.elapsed += secs_to_nanos(dt).max(1);
        if state.collided && !was_touching {
            let t = self
                .session
                .as_ref()
                .map_or_else(|| self.elapsed(), Session::clock);
            events.push(TraceEvent {
                t,
                kind: EventKind::Collision {
                    x: state.pose.x,
                    y: state.pose.y,
                },
            });
        }
        events
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub dt: f64,
    /// Virtual seconds after which an unfinished program is cut off.
    pub max_time: f64,
    /// Virtual time at which the start button is pressed, for `SB` frames.
    pub button_at: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            max_time: DEFAULT_MAX_TIME,
            button_at: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    Done,
    Faulted,
    TimeCutoff,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Done => 0,
            RunStatus::Faulted => 3,
            RunStatus::TimeCutoff => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub status: RunStatus,
    pub exit_code: i32,
    /// Virtual seconds until completion, fault or cutoff.
    pub duration: f64,
    pub counts: BTreeMap<String, usize>,
    pub final_pose: Pose,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<String>,
}

impl RunReport {
    pub fn count(&self, kind: &str) -> usize {
        self.counts.get(kind).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub events: Vec<TraceEvent>,
    pub report: RunReport,
}

/// Runs `frame` on `sim` until it finishes or `max_time` passes.
pub fn run_frame(
    frame: impl Into<Arc<Frame>>,
    sim: Simulator,
    options: RunOptions,
) -> Result<RunOutcome, SessionError> {
    let mut driver = Driver::new(sim);
    let mut events = driver.load(frame)?;
    let max = secs_to_nanos(options.max_time);
    let button = options.button_at.map(secs_to_nanos);
    let mut pressed = false;

    let status = loop {
        let session = driver.session().expect("loaded above");
        match session.phase() {
            Phase::Done => break RunStatus::Done,
            Phase::Faulted => break RunStatus::Faulted,
            _ => {}
        }
        let now = session.clock_nanos();
        if now > max {
            break RunStatus::TimeCutoff;
        }
        if let Some(at) = button {
            if !pressed && now >= at {
                driver.press_button();
                pressed = true;
            }
        }
        events.extend(driver.step(options.dt));
    };

    let session = driver.session().expect("loaded above");
    let duration = match status {
        RunStatus::TimeCutoff => session.clock(),
        _ => events.last().map_or(0.0, |e| e.t),
    };
    let report = RunReport {
        status,
        exit_code: status.exit_code(),
        duration,
        counts: count_by_kind(&events),
        final_pose: driver.sim().pose(),
        trace_path: None,
    };
    Ok(RunOutcome { events, report })
}
