//! Evaluate expressions, with and without sensors.
//!
//! `cargo run --example expressions`

use std::sync::Arc;

use tiniscript::interp::{eval_const, ScriptedRobot, Session};
use tiniscript::lang::{parse_expr, parse_frame, print_expr, SensorName};

fn main() {
    for src in [
        "1 + 2 * 3",
        "(1 + 2) * 3",
        "ROUND(2.675, 2)",
        "7 % 3 = 1 AND NOT FALSE",
        "TRUE OR FALSE AND FALSE",
        "1 / 0",
        "1 + TRUE",
    ] {
        let expr = parse_expr(src).expect("expression parses");
        match eval_const(&expr) {
            Ok(v) => println!("{:<28} => {v}", print_expr(&expr)),
            Err(fault) => println!("{:<28} => fault: {fault}", print_expr(&expr)),
        }
    }

    // Sensor reads go through the robot; here a scripted one.
    let mut robot = ScriptedRobot::new();
    robot.sensors.insert(SensorName::Distance, 8.0);
    robot.sensors.insert(SensorName::LightL, 300.0);
    robot.sensors.insert(SensorName::LightR, 120.0);
    let mut session = Session::new(Arc::new(parse_frame("SI|S").unwrap())).unwrap();
    for src in [
        "DISTANCE < 10",
        "LIGHT_L - LIGHT_R",
        "LIGHT_L > LIGHT_R AND DISTANCE >= 5",
    ] {
        let expr = parse_expr(src).unwrap();
        let value = session.eval_expr(&expr, &mut robot).unwrap();
        println!("{src:<36} => {value}");
    }
}
