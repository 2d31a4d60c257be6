//! Build a world from JSON, place the robot by hand and read its sensors
//! while driving the simulator directly, without any program.
//!
//! `cargo run --example custom_world`

use tiniscript::sim::{LightSide, Pose};
use tiniscript::{Simulator, WorldModel};

const WORLD: &str = r#"{
    "walls": [[1.0, -1.0, 1.0, 1.0]],
    "circles": [[0.5, 0.5, 0.1]],
    "lights": [[0.8, 0.0, 50.0]],
    "robot_start": [0.0, 0.0, 0.0]
}"#;

fn main() {
    let world = WorldModel::from_json(WORLD).expect("valid world");
    let mut sim = Simulator::with_defaults(world).expect("robot starts clear");

    sim.set_motors(50.0, 50.0);
    for step in 0..=10 {
        if step > 0 {
            sim.tick(0.25);
        }
        let s = sim.state();
        println!(
            "t={:.2} x={:.3} distance={:>5.1} cm light=({:.0}, {:.0}) touching={}",
            f64::from(step) * 0.25,
            s.pose.x,
            sim.read_distance(),
            sim.read_light(LightSide::Left),
            sim.read_light(LightSide::Right),
            s.collided
        );
    }

    // Facing the pillar instead.
    sim.set_pose(Pose::new(0.0, 0.5, 0.0));
    println!("distance to pillar: {:.1} cm", sim.read_distance());
}
