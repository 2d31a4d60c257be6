//! Act as a browser front end: connect to the telemetry WebSocket, start a
//! program with a control message and print the pose stream.
//!
//! `cargo run --example telemetry_client`

use tiniscript::wire::{serve, ServiceConfig, TimeMode};
use tungstenite::Message;

fn main() {
    let service = serve(ServiceConfig {
        serial_port: 0,
        telemetry_port: 0,
        world: Some("corridor".into()),
        time_mode: TimeMode::Fast,
        ..ServiceConfig::default()
    })
    .expect("service starts");

    let url = format!("ws://{}", service.telemetry_addr());
    let (mut ws, _) = tungstenite::connect(url).expect("handshake");

    let control = serde_json::json!({"cmd": "frame", "text": "SI|F(2, 60);L(1, 50);F(1, 60)"});
    ws.send(Message::text(control.to_string())).unwrap();

    let mut records = 0u32;
    loop {
        let Message::Text(text) = ws.read().expect("message") else {
            continue;
        };
        let msg: serde_json::Value = serde_json::from_str(text.as_str()).unwrap();
        if msg.get("world").is_some() {
            println!(
                "world: {} walls",
                msg["world"]["walls"].as_array().map_or(0, Vec::len)
            );
        } else if let Some(resp) = msg.get("resp") {
            println!("{}", resp.as_str().unwrap());
            if resp == "DONE" {
                break;
            }
        } else {
            records += 1;
            // Every 25th record (one per 1.25 s of virtual time) is plenty
            // for a console.
            if records % 25 == 1 {
                let f = |k: &str| msg[k].as_f64().unwrap_or(f64::NAN);
                println!(
                    "t={:.2} x={:.3} y={:.3} theta={:.2} distance={:.1} {}",
                    f("t"),
                    f("x"),
                    f("y"),
                    f("theta"),
                    f("distance"),
                    msg["phase"].as_str().unwrap_or("?")
                );
            }
        }
    }
    let _ = ws.close(None);
    service.shutdown();
}
