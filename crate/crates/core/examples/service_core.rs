//! The serial protocol without sockets: feed lines to a [`ServiceCore`] and
//! step it, printing replies, broadcasts and telemetry records.
//!
//! `cargo run --example service_core`

use tiniscript::wire::{Outbound, ServiceCore};
use tiniscript::{Simulator, WorldModel};

fn show(out: Vec<Outbound>) {
    for o in out {
        match o {
            Outbound::Reply(r) => println!("reply      {r}"),
            Outbound::Broadcast(r) => println!("broadcast  {r}"),
            Outbound::Telemetry(t) => println!("telemetry  {}", t.to_json()),
        }
    }
}

fn main() {
    let sim = Simulator::with_defaults(WorldModel::empty()).unwrap();
    let mut core = ServiceCore::new(sim, 0.01).with_telemetry_interval(0.25);

    for line in ["PING|check_connection", "SI|F(1", "SB|F(1, 80)", "BTN"] {
        println!("> {line}");
        show(core.handle_line(line));
    }
    while core.is_running() {
        show(core.step());
    }
    println!("> SI|W(1 / 0)");
    show(core.handle_line("SI|W(1 / 0)"));
    show(core.step());
}
