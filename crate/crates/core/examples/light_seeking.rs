//! Steer toward the brighter of two lamps using the left and right light
//! sensors.
//!
//! `cargo run --example light_seeking`

use tiniscript::sim::LightSide;
use tiniscript::{parse_frame, run_frame, RunOptions, Simulator, WorldModel};

const PROGRAM: &str = "SI|LOOP(40);\
    IF(LIGHT_L > LIGHT_R);L(0.05, 40);ENDIF;\
    IF(LIGHT_R > LIGHT_L);R(0.05, 40);ENDIF;\
    F(0.1, 60);\
    END_LOOP";

fn main() {
    let world = WorldModel::bundled("lights").unwrap();
    for light in &world.lights {
        println!(
            "lamp at ({:.2}, {:.2}) intensity {}",
            light.position.x, light.position.y, light.intensity
        );
    }
    let sim = Simulator::with_defaults(world.clone()).unwrap();
    println!(
        "start: left {:.0}, right {:.0}",
        sim.read_light(LightSide::Left),
        sim.read_light(LightSide::Right)
    );

    let outcome = run_frame(parse_frame(PROGRAM).unwrap(), sim, RunOptions::default()).unwrap();
    let pose = outcome.report.final_pose;
    let mut end = Simulator::with_defaults(world).unwrap();
    end.set_pose(pose);
    println!(
        "end at ({:.2}, {:.2}): left {:.0}, right {:.0}",
        pose.x,
        pose.y,
        end.read_light(LightSide::Left),
        end.read_light(LightSide::Right)
    );
}
