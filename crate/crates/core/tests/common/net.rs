//! Serial and WebSocket test clients for a running service.

use std::io::{BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpStream};
use std::time::Duration;

use tiniscript::wire::{serve, ServiceConfig, ServiceHandle, TimeMode};

pub fn start(mode: TimeMode, world: Option<&str>) -> ServiceHandle {
    serve(ServiceConfig {
        serial_port: 0,
        telemetry_port: 0,
        world: world.map(str::to_string),
        time_mode: mode,
        ..ServiceConfig::default()
    })
    .expect("service starts")
}

pub struct SerialClient {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    /// Everything sent (`> `) and received (`< `), in order.
    pub transcript: Vec<String>,
}

impl SerialClient {
    pub fn connect(addr: SocketAddr) -> Self {
        let stream = TcpStream::connect(addr).expect("connect");
        stream
            .set_read_timeout(Some(Duration::from_secs(20)))
            .unwrap();
        Self {
            reader: BufReader::new(stream.try_clone().unwrap()),
            writer: stream,
            transcript: Vec::new(),
        }
    }

    pub fn send(&mut self, line: &str) {
        self.transcript.push(format!("> {line}"));
        self.writer.write_all(line.as_bytes()).unwrap();
        self.writer.write_all(b"\n").unwrap();
    }

    pub fn send_raw(&mut self, bytes: &[u8]) {
        self.writer.write_all(bytes).unwrap();
    }

    pub fn recv(&mut self) -> String {
        let mut line = String::new();
        let n = self
            .reader
            .read_line(&mut line)
            .expect("response before timeout");
        assert!(n > 0, "connection closed");
        let line = line.trim_end().to_string();
        self.transcript.push(format!("< {line}"));
        line
    }

    pub fn recv_n(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.recv()).collect()
    }

    /// Reads until a line equal to `last` arrives; returns every line read.
    pub fn recv_until(&mut self, last: &str) -> Vec<String> {
        let mut got = Vec::new();
        loop {
            let line = self.recv();
            let stop = line == last || line.starts_with("ERR");
            got.push(line);
            if stop {
                return got;
            }
        }
    }
}

/// The scripted serial session used for the golden transcript. Returns the
/// transcript.
pub fn scripted_session(addr: SocketAddr) -> Vec<String> {
    let mut c = SerialClient::connect(addr);
    c.send(super::EXAMPLE_PING);
    c.recv();
    c.send(super::EXAMPLE_FORWARD);
    c.recv_until("DONE");
    c.send(super::EXAMPLE_BUTTON);
    c.recv_n(2);
    c.send("BTN");
    c.recv_until("DONE");
    c.send("SI|LOOP(FOREVER);F(1, 80);END_LOOP");
    c.recv();
    c.send("SI|B(1, 50)");
    c.recv_until("DONE");
    c.send("SI|F(1");
    c.recv();
    c.send("SI|W(1 / 0)");
    c.recv_n(2);
    c.send("BTN");
    c.recv();
    c.transcript
}
