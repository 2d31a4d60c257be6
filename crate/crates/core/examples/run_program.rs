//! Run a program in an empty world and print its trace as JSON lines.
//!
//! `cargo run --example run_program -- "SI|LOOP(3);F(2, 50);END_LOOP"`

use tiniscript::interp::write_jsonl;
use tiniscript::{parse_frame, run_frame, RunOptions, Simulator, WorldModel};

fn main() {
    let src = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "SI|LOOP(3);F(2, 50);END_LOOP".to_string());
    let frame = match parse_frame(&src) {
        Ok(f) => f,
        Err(diags) => {
            for d in diags {
                eprintln!("{d}");
            }
            std::process::exit(1);
        }
    };
    let sim = Simulator::with_defaults(WorldModel::empty()).unwrap();
    let outcome = run_frame(frame, sim, RunOptions::default()).expect("program starts");

    write_jsonl(std::io::stdout().lock(), &outcome.events).unwrap();
    let r = &outcome.report;
    eprintln!(
        "{:?} after {} s at x={:.3} y={:.3}, exit code {}",
        r.status, r.duration, r.final_pose.x, r.final_pose.y, r.exit_code
    );
}
