//! Threaded service: a stepper thread owns the [`ServiceCore`]; serial and
//! WebSocket client threads talk to it only through channels.

use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use crossbeam_channel::{bounded, unbounded, Receiver, RecvTimeoutError, Sender, TrySendError};
use serde::Deserialize;
use tungstenite::{Message, WebSocket};

use super::protocol::{Outbound, Response, ServiceCore, BUTTON_LINE, MAX_LINE_LEN};
use crate::driver::DEFAULT_DT;
use crate::sim::{resolve_world, Simulator, WorldError, WorldModel, MAX_TICK};

pub const DEFAULT_SERIAL_PORT: u16 = 7401;
pub const DEFAULT_TELEMETRY_PORT: u16 = 7402;
/// Telemetry messages buffered per WebSocket subscriber before the oldest
/// are dropped.
pub const TELEMETRY_QUEUE: usize = 256;
const POLL: Duration = Duration::from_millis(5);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMode {
    /// The virtual clock follows wall time.
    Realtime,
    /// Step as fast as possible while a program runs; idle otherwise.
    Fast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub host: String,
    /// Port 0 picks a free port.
    pub serial_port: u16,
    pub telemetry_port: u16,
    /// World file path or bundled world name; `None` is the empty arena.
    pub world: Option<String>,
    pub time_mode: TimeMode,
    pub dt: f64,
    /// Serve the serial channel on stdin/stdout instead of TCP.
    pub stdio: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            host: "127.0.0.1".to_string(),
            serial_port: DEFAULT_SERIAL_PORT,
            telemetry_port: DEFAULT_TELEMETRY_PORT,
            world: None,
            time_mode: TimeMode::Realtime,
            dt: DEFAULT_DT,
            stdio: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("cannot bind {what} on {addr}: {source}")]
    Bind {
        what: &'static str,
        addr: String,
        source: io::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl ServiceConfig {
    pub fn validate(&self) -> Result<(), ServeError> {
        if !(self.dt > 0.0 && self.dt <= MAX_TICK) {
            return Err(ServeError::Config(format!(
                "dt must be in (0, {MAX_TICK}], got {}",
                self.dt
            )));
        }
        if !self.stdio && self.serial_port != 0 && self.serial_port == self.telemetry_port {
            return Err(ServeError::Config(format!(
                "serial and telemetry ports must differ (both {})",
                self.serial_port
            )));
        }
        Ok(())
    }

    pub fn load_world(&self) -> Result<WorldModel, ServeError> {
        Ok(match &self.world {
            Some(arg) => resolve_world(arg)?,
            None => WorldModel::empty(),
        })
    }
}

type ClientId = u64;

enum Command {
    Attach { id: ClientId, sink: Sink },
    Detach { id: ClientId },
    Line { id: ClientId, text: String },
    Shutdown,
}

/// A socket message tagged with its position in the stepper's output, so
/// the two per-subscriber queues can be merged back into order.
type Sequenced = (u64, String);

enum Sink {
    Serial(Sender<String>),
    Socket {
        replies: Sender<Sequenced>,
        telemetry: Sender<Sequenced>,
        /// Second handle on the telemetry queue, used to drop the oldest
        /// message when the subscriber falls behind.
        overflow: Receiver<Sequenced>,
    },
}

impl Sink {
    fn response(&self, seq: u64, resp: &Response) {
        match self {
            Sink::Serial(tx) => {
                let _ = tx.send(resp.to_string());
            }
            Sink::Socket { replies, .. } => {
                let json = serde_json::json!({ "resp": resp.to_string() });
                let _ = replies.send((seq, json.to_string()));
            }
        }
    }

    fn telemetry(&self, seq: u64, json: &str) {
        if let Sink::Socket {
            telemetry,
            overflow,
            ..
        } = self
        {
            let mut msg = (seq, json.to_string());
            loop {
                match telemetry.try_send(msg) {
                    Ok(()) | Err(TrySendError::Disconnected(_)) => break,
                    Err(TrySendError::Full(back)) => {
                        let _ = overflow.try_recv();
                        msg = back;
                    }
                }
            }
        }
    }
}

struct Stepper {
    core: ServiceCore,
    sinks: BTreeMap<ClientId, Sink>,
    seq: u64,
}

impl Stepper {
    /// Returns false on shutdown.
    fn handle(&mut self, cmd: Command) -> bool {
        match cmd {
            Command::Attach { id, sink } => {
                self.sinks.insert(id, sink);
            }
            Command::Detach { id } => {
                self.sinks.remove(&id);
            }
            Command::Line { id, text } => {
                log::debug!("client {id}: {text}");
                let out = self.core.handle_line(&text);
                self.route(Some(id), out);
            }
            Command::Shutdown => return false,
        }
        true
    }

    fn step(&mut self) {
        let out = self.core.step();
        self.route(None, out);
    }

    fn route(&mut self, origin: Option<ClientId>, out: Vec<Outbound>) {
        for item in out {
            self.seq += 1;
            let seq = self.seq;
            match item {
                Outbound::Reply(resp) => {
                    if let Some(sink) = origin.and_then(|id| self.sinks.get(&id)) {
                        sink.response(seq, &resp);
                    }
                }
                Outbound::Broadcast(resp) => {
                    log::info!("{resp}");
                    self.sinks.values().for_each(|s| s.response(seq, &resp));
                }
                Outbound::Telemetry(record) => {
                    let json = record.to_json();
                    self.sinks.values().for_each(|s| s.telemetry(seq, &json));
                }
            }
        }
    }

    fn run(mut self, rx: Receiver<Command>, mode: TimeMode) {
        match mode {
            TimeMode::Fast => loop {
                if self.core.is_running() {
                    while let Ok(cmd) = rx.try_recv() {
                        if !self.handle(cmd) {
                            return;
                        }
                    }
                    self.step();
                } else {
                    let Ok(cmd) = rx.recv() else { return };
                    if !self.handle(cmd) {
                        return;
                    }
                }
            },
            TimeMode::Realtime => {
                let start = Instant::now();
                loop {
                    let due = start
                        + Duration::from_secs_f64(self.core.driver().elapsed() + self.core.dt());
                    match rx.recv_deadline(due) {
                        Ok(cmd) => {
                            if !self.handle(cmd) {
                                return;
                            }
                        }
                        Err(RecvTimeoutError::Timeout) => self.step(),
                        Err(RecvTimeoutError::Disconnected) => return,
                    }
                }
            }
        }
    }
}

/// A running service. Dropping the handle shuts it down.
pub struct ServiceHandle {
    serial_addr: Option<SocketAddr>,
    telemetry_addr: SocketAddr,
    commands: Sender<Command>,
    stop: Arc<AtomicBool>,
    threads: Vec<JoinHandle<()>>,
}

impl ServiceHandle {
    /// `None` in stdio mode.
    pub fn serial_addr(&self) -> Option<SocketAddr> {
        self.serial_addr
    }

    pub fn telemetry_addr(&self) -> SocketAddr {
        self.telemetry_addr
    }

    /// True once the stepper has exited.
    pub fn is_finished(&self) -> bool {
        self.threads.first().is_none_or(JoinHandle::is_finished)
    }

    /// Blocks until the stepper exits (on shutdown, or stdin EOF in stdio
    /// mode).
    pub fn wait(mut self) {
        if let Some(stepper) = self.threads.first_mut() {
            while !stepper.is_finished() {
                thread::sleep(Duration::from_millis(20));
            }
        }
        self.shutdown_inner();
    }

    pub fn shutdown(mut self) {
        self.shutdown_inner();
    }

    fn shutdown_inner(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = self.commands.send(Command::Shutdown);
        for t in self.threads.drain(..) {
            let _ = t.join();
        }
    }
}

impl Drop for ServiceHandle {
    fn drop(&mut self) {
        self.shutdown_inner();
    }
}

fn bind(host: &str, port: u16, what: &'static str) -> Result<TcpListener, ServeError> {
    let addr = format!("{host}:{port}");
    let listener =
        TcpListener::bind(&addr).map_err(|source| ServeError::Bind { what, addr, source })?;
    listener.set_nonblocking(true)?;
    Ok(listener)
}

/// Starts the service and returns once both listeners are bound.
pub fn serve(config: ServiceConfig) -> Result<ServiceHandle, ServeError> {
    config.validate()?;
    let world = config.load_world()?;
    let world_json = world.to_json();
    let sim = Simulator::with_defaults(world)?;

    let serial = if config.stdio {
        None
    } else {
        Some(bind(&config.host, config.serial_port, "serial port")?)
    };
    let socket = bind(&config.host, config.telemetry_port, "telemetry port")?;
    let serial_addr = serial.as_ref().map(TcpListener::local_addr).transpose()?;
    let telemetry_addr = socket.local_addr()?;

    let (tx, rx) = unbounded();
    let stop = Arc::new(AtomicBool::new(false));
    let stepper = Stepper {
        core: ServiceCore::new(sim, config.dt),
        sinks: BTreeMap::new(),
        seq: 0,
    };
    let mode = config.time_mode;
    let mut threads = vec![thread::Builder::new()
        .name("tini-stepper".into())
        .spawn(move || stepper.run(rx, mode))?];

    match serial {
        Some(listener) => {
            let (tx, stop) = (tx.clone(), stop.clone());
            threads.push(
                thread::Builder::new()
                    .name("tini-serial".into())
                    .spawn(move || accept_serial(listener, tx, stop))?,
            );
        }
        None => {
            // Not joined: a read on stdin cannot be interrupted. EOF on
            // stdin shuts the service down.
            let tx = tx.clone();
            thread::Builder::new()
                .name("tini-stdio".into())
                .spawn(move || {
                    let (out_tx, out_rx) = unbounded();
                    let _ = tx.send(Command::Attach {
                        id: 0,
                        sink: Sink::Serial(out_tx),
                    });
                    let writer = thread::spawn(move || write_lines(io::stdout(), out_rx));
                    read_lines(io::stdin().lock(), 0, &tx);
                    let _ = tx.send(Command::Detach { id: 0 });
                    let _ = tx.send(Command::Shutdown);
                    let _ = writer.join();
                })?;
        }
    }

    {
        let (tx, stop) = (tx.clone(), stop.clone());
        threads.push(
            thread::Builder::new()
                .name("tini-telemetry".into())
                .spawn(move || accept_sockets(socket, world_json, tx, stop))?,
        );
    }

    log::info!(
        "serving: serial {}, telemetry ws://{telemetry_addr}",
        serial_addr.map_or_else(|| "stdio".to_string(), |a| a.to_string())
    );
    Ok(ServiceHandle {
        serial_addr,
        telemetry_addr,
        commands: tx,
        stop,
        threads,
    })
}

/// Client ids: serial clients are odd, WebSocket subscribers even, 0 is stdio.
fn accept_serial(listener: TcpListener, tx: Sender<Command>, stop: Arc<AtomicBool>) {
    let mut next_id: ClientId = 1;
    let mut current: Option<JoinHandle<()>> = None;
    while !stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((mut stream, peer)) => {
                let _ = stream.set_nonblocking(false);
                if current.as_ref().is_some_and(|h| !h.is_finished()) {
                    log::warn!("refusing second serial client {peer}");
                    let _ = writeln!(stream, "{}", Response::err(0, "busy"));
                    continue;
                }
                log::info!("serial client {peer} connected");
                let id = next_id;
                next_id += 2;
                let tx = tx.clone();
                let stop = stop.clone();
                current = Some(thread::spawn(move || serial_client(stream, id, tx, stop)));
            }
            Err(e) if e.kind() == io::ErrorKind::WouldBlock => thread::sleep(POLL),
            Err(e) => {
                log::error!("serial accept failed: {e}");
                thread::sleep(POLL);
            }
        }
    }
    if let Some(h) = current {
        let _ = h.join();
    }
}

fn serial_client(stream: TcpStream, id: ClientId, tx: Sender<Command>, stop: Arc<AtomicBool>) {
    let Ok(write_half) = stream.try_clone() else {
        return;
    };
    let (out_tx, out_rx) = unbounded();
    if tx
        .send(Command::Attach {
            id,
            sink: Sink::Serial(out_tx),
        })
        .is_err()
    {
        return;
    }
    let writer = thread::spawn(move || write_lines(write_half, out_rx));
    // A short read timeout lets the reader notice shutdown.
    let _ = stream.set_read_timeout(Some(Duration::from_millis(50)));
    let mut reader = BufReader::new(StopAware {
        inner: &stream,
        stop: &stop,
    });
    read_lines(&mut reader, id, &tx);
    let _ = tx.send(Command::Detach { id });
    let _ = stream.shutdown(std::net::Shutdown::Both);
    let _ = writer.join();
    log::info!("serial client {id} disconnected");
}

/// Retries read timeouts until the stop flag is raised, then reports EOF.
struct StopAware<'a> {
    inner: &'a TcpStream,
    stop: &'a AtomicBool,
}

impl Read for StopAware<'_> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        loop {
            if self.stop.load(Ordering::SeqCst) {
                return Ok(0);
            }
            match self.inner.read(buf) {
                Err(e)
                    if matches!(
                        e.kind(),
                        io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut
                    ) => {}
                other => return other,
            }
        }
    }
}

/// Outcome of reading one `\n`-terminated line with a length cap.
#[derive(Debug, PartialEq, Eq)]
pub enum LineRead {
    Line(String),
    /// The line exceeded [`MAX_LINE_LEN`]; its bytes were discarded.
    TooLong,
    Eof,
}

/// Reads one line without ever buffering more than `MAX_LINE_LEN + 1`
/// bytes of it.
pub fn read_capped_line<R: BufRead>(reader: &mut R) -> io::Result<LineRead> {
    let mut buf = Vec::new();
    let n = reader
        .by_ref()
        .take(MAX_LINE_LEN as u64 + 2)
        .read_until(b'\n', &mut buf)?;
    if n == 0 {
        return Ok(LineRead::Eof);
    }
    let terminated = buf.last() == Some(&b'\n');
    if terminated {
        buf.pop();
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
    }
    if buf.len() > MAX_LINE_LEN {
        if !terminated {
            let mut sink = Vec::new();
            loop {
                sink.clear();
                let n = reader
                    .by_ref()
                    .take(MAX_LINE_LEN as u64)
                    .read_until(b'\n', &mut sink)?;
                if n == 0 || sink.last() == Some(&b'\n') {
                    break;
                }
            }
        }
        return Ok(LineRead::TooLong);
    }
    Ok(LineRead::Line(String::from_utf8_lossy(&buf).into_owned()))
}

fn read_lines<R: BufRead>(mut reader: R, id: ClientId, tx: &Sender<Command>) {
    loop {
        let text = match read_capped_line(&mut reader) {
            Ok(LineRead::Line(text)) => text,
            // The oversized marker is rejected by the core with the usual
            // ERR reply, keeping it in order with other replies.
            Ok(LineRead::TooLong) => "x".repeat(MAX_LINE_LEN + 1),
            Ok(LineRead::Eof) | Err(_) => return,
        };
        if text.trim().is_empty() {
            continue;
        }
        if tx.send(Command::Line { id, text }).is_err() {
            return;
        }
    }
}

fn write_lines<W: Write>(mut out: W, rx: Receiver<String>) {
    for line in rx {
        if writeln!(out, "{line}").and_then(|()| out.flush()).is_err() {
            return;
        }
    }
}

fn accept_sockets(
    listener: TcpListener,
    world_json: String,
    tx: Sender<Command>,
    stop: Arc<AtomicBool>,
) {
    let mut next_id: ClientId = 2;
    let mut clients = Vec::new();
    while !stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, peer)) => {
                let _ = stream.set_nonblocking(false);
                log::info!("telemetry subscriber {peer} connected");
                let id = next_id;
                next_id += 2;
                let (tx, stop, world) = (tx.clone(), stop.clone(), world_json.clone());
                clients.push(thread::spawn(move || {
                    if let Err(e) = socket_client(stream, id, &world, &tx, &stop) {
                        log::debug!("subscriber {id}: {e}");
                    }
                    let _ = tx.send(Command::Detach { id });
                }));
                clients.retain(|h: &JoinHandle<()>| !h.is_finished());
            }
            Err(e) if e.kind() == io::ErrorKind::WouldBlock => thread::sleep(POLL),
            Err(e) => {
                log::error!("telemetry accept failed: {e}");
                thread::sleep(POLL);
            }
        }
    }
    for h in clients {
        let _ = h.join();
    }
}

/// Inbound UI control message.
#[derive(Debug, Deserialize)]
#[serde(tag = "cmd", rename_all = "lowercase")]
enum Control {
    Frame { text: String },
    Btn,
}

/// Maps a UI control message to the serial line it stands for.
pub fn control_to_line(message: &str) -> Option<String> {
    match serde_json::from_str::<Control>(message).ok()? {
        Control::Frame { text } => Some(text),
        Control::Btn => Some(BUTTON_LINE.to_string()),
    }
}

fn socket_client(
    stream: TcpStream,
    id: ClientId,
    world_json: &str,
    tx: &Sender<Command>,
    stop: &AtomicBool,
) -> Result<(), Box<dyn std::error::Error>> {
    let mut ws: WebSocket<TcpStream> = tungstenite::accept(stream)?;
    ws.get_ref().set_read_timeout(Some(POLL))?;
    let world: serde_json::Value = serde_json::from_str(world_json)?;
    ws.send(Message::text(
        serde_json::json!({ "world": world }).to_string(),
    ))?;

    let (reply_tx, reply_rx) = unbounded();
    let (tele_tx, tele_rx) = bounded(TELEMETRY_QUEUE);
    tx.send(Command::Attach {
        id,
        sink: Sink::Socket {
            replies: reply_tx,
            telemetry: tele_tx,
            overflow: tele_rx.clone(),
        },
    })?;

    let mut pending: Vec<Sequenced> = Vec::new();
    while !stop.load(Ordering::SeqCst) {
        match ws.read() {
            Ok(Message::Text(text)) => match control_to_line(text.as_str()) {
                Some(line) => tx.send(Command::Line { id, text: line })?,
                None => {
                    let json =
                        serde_json::json!({ "resp": Response::err(0, "bad_control").to_string() });
                    pending.push((0, json.to_string()));
                }
            },
            Ok(Message::Close(_)) => break,
            Ok(_) => {}
            Err(tungstenite::Error::Io(e))
                if matches!(
                    e.kind(),
                    io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut
                ) => {}
            Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => break,
            Err(e) => return Err(e.into()),
        }
        // Replies first: any telemetry older than a drained reply is
        // already queued by then, so sorting restores the stepper's order.
        pending.extend(reply_rx.try_iter());
        pending.extend(tele_rx.try_iter());
        pending.sort_by_key(|(seq, _)| *seq);
        for (_, msg) in pending.drain(..) {
            ws.write(Message::text(msg))?;
        }
        match ws.flush() {
            Err(tungstenite::Error::Io(e)) if e.kind() == io::ErrorKind::WouldBlock => {}
            other => other?,
        }
    }
    let _ = ws.close(None);
    let _ = ws.flush();
    Ok(())
}
