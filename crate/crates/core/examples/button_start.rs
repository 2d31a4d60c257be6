//! An `SB` program waits for the start button. This steps a [`Driver`] by
//! hand and presses the button two seconds in.
//!
//! `cargo run --example button_start`

use tiniscript::interp::EventKind;
use tiniscript::{parse_frame, Driver, Simulator, WorldModel};

fn main() {
    let sim = Simulator::with_defaults(WorldModel::empty()).unwrap();
    let mut driver = Driver::new(sim);
    let dt = 0.01;
    let mut events = driver.load(parse_frame("SB|R(3, 60)").unwrap()).unwrap();

    for tick in 0.. {
        if tick == 200 {
            println!("t={:.2}: button pressed", driver.elapsed());
            driver.press_button();
        }
        events.extend(driver.step(dt));
        if driver.phase().is_some_and(|p| p.is_finished()) {
            break;
        }
    }
    for e in &events {
        println!("t={:>5.2}  {}", e.t, e.kind.name());
    }
    let moved_early = events
        .iter()
        .any(|e| matches!(e.kind, EventKind::MotorSet { .. }) && e.t < 2.0);
    println!("motors touched before the press: {moved_early}");
    println!(
        "heading after the spin: {:.3} rad",
        driver.sim().pose().theta
    );
}
