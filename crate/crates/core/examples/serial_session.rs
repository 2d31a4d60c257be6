//! Start the service in fast mode on an ephemeral port and talk to it over
//! TCP the way a classroom host would talk to the robot's serial port.
//!
//! `cargo run --example serial_session`

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;

use tiniscript::wire::{serve, ServiceConfig, TimeMode};

fn main() -> std::io::Result<()> {
    let service = serve(ServiceConfig {
        serial_port: 0,
        telemetry_port: 0,
        time_mode: TimeMode::Fast,
        ..ServiceConfig::default()
    })
    .expect("service starts");
    let addr = service.serial_addr().expect("TCP mode");
    println!(
        "serial on {addr}, telemetry on ws://{}",
        service.telemetry_addr()
    );

    let stream = TcpStream::connect(addr)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = stream;
    let mut exchange = |line: &str, until: &[&str]| -> std::io::Result<()> {
        println!("> {line}");
        writeln!(writer, "{line}")?;
        loop {
            let mut reply = String::new();
            reader.read_line(&mut reply)?;
            let reply = reply.trim_end();
            println!("< {reply}");
            if until.iter().any(|u| reply.starts_with(u)) {
                return Ok(());
            }
        }
    };

    exchange("PING|check_connection", &["PONG"])?;
    exchange("SI|F(5, 80)", &["DONE", "ERR"])?;
    exchange("SB|R(3, 60)", &["EVT BUTTON_WAIT"])?;
    exchange("BTN", &["DONE"])?;
    exchange("SI|LOOP(FOREVER);F(1, 80);END_LOOP", &["ACK"])?;
    exchange("SI|B(1, 50)", &["DONE"])?;
    exchange("SI|F(1", &["ERR"])?;
    service.shutdown();
    Ok(())
}
