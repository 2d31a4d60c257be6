//! The robot's serial link, emulated over TCP or stdio, plus a WebSocket
//! feed of telemetry for browser front ends.
//!
//! [`ServiceCore`] holds all protocol logic and does no I/O, so it can be
//! driven directly in tests. [`serve`] wraps it in threads and sockets.

pub mod protocol;
pub mod server;

pub use protocol::{
    decode_request, phase_name, Outbound, Request, Response, ServiceCore, TelemetryRecord,
    BUTTON_LINE, DEFAULT_TELEMETRY_INTERVAL, MAX_LINE_LEN,
};
pub use server::{
    control_to_line, read_capped_line, serve, LineRead, ServeError, ServiceConfig, ServiceHandle,
    TimeMode, DEFAULT_SERIAL_PORT, DEFAULT_TELEMETRY_PORT,
};
