//! Drive the obstacle-avoiding loop through the bundled corridor and list
//! each time the robot stopped and turned away.
//!
//! `cargo run --example obstacle_course`

use tiniscript::interp::EventKind;
use tiniscript::lang::SensorName;
use tiniscript::{parse_frame, run_frame, RunOptions, Simulator, WorldModel};

const PROGRAM: &str =
    "SI|START;LOOP(FOREVER);F(1, 80);DISTANCE;IF(DISTANCE < 10);S;R(1, 60);ENDIF;END_LOOP";

fn main() {
    let world = WorldModel::bundled("corridor").unwrap();
    let sim = Simulator::with_defaults(world).unwrap();
    let outcome = run_frame(parse_frame(PROGRAM).unwrap(), sim, RunOptions::default()).unwrap();

    let mut distance = f64::NAN;
    for pair in outcome.events.windows(2) {
        if let EventKind::SensorSample {
            sensor: SensorName::Distance,
            value,
        } = pair[0].kind
        {
            distance = value;
        }
        if let (
            EventKind::MotorSet {
                left: 0.0,
                right: 0.0,
            },
            EventKind::MotorSet { left, right },
        ) = (&pair[0].kind, &pair[1].kind)
        {
            if *left > 0.0 && *right < 0.0 {
                println!(
                    "t={:>6.2}s  obstacle at {distance:.1} cm, turning right",
                    pair[1].t
                );
            }
        }
    }
    let r = &outcome.report;
    println!(
        "{:?} at t={} s, collisions: {}, final pose ({:.2}, {:.2})",
        r.status,
        r.duration,
        r.count("Collision"),
        r.final_pose.x,
        r.final_pose.y
    );
}
