//! TiniScript is a one-line command language for classroom robots:
//! `SI|F(2, 80)` drives forward for two seconds at 80% power.
//!
//! This crate contains the whole loop:
//!
//! - [`lang`]: tokenizer, parser, canonical formatter and static checks.
//! - [`interp`]: a tick-driven interpreter on a virtual clock that records
//!   every effect as a [`interp::TraceEvent`].
//! - [`sim`]: a 2D differential-drive robot with distance and light sensors.
//! - [`driver`]: runs sessions against the simulator.
//! - [`wire`]: the newline-framed serial protocol, a TCP/stdio service and
//!   a WebSocket telemetry feed.
//! - [`cli`]: the `tini` command line.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod driver;
pub mod interp;
pub mod lang;
pub mod sim;
pub mod wire;

pub use driver::{
    run_frame, Driver, RunOptions, RunOutcome, RunReport, RunStatus, DEFAULT_DT, DEFAULT_MAX_TIME,
};
pub use interp::{RobotInterface, Session, TraceEvent};
pub use lang::{parse_frame, pretty_print, validate, Frame};
pub use sim::{RobotParams, Simulator, WorldModel};
