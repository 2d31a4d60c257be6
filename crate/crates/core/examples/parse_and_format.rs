//! Parse programs, print diagnostics for broken ones and show the
//! canonical one-line form of a multi-line listing.
//!
//! `cargo run --example parse_and_format`

use tiniscript::lang::{compile, parse_frame, pretty_print, tokenize};

const LISTING: &str = "SI|LOOP(FOREVER);
  F(1, 80);
  DISTANCE;
  IF(DISTANCE < 10);
    STOP;
    R(1, 60);
  ENDIF;
END_LOOP";

fn main() {
    let frame = parse_frame(LISTING).expect("listing parses");
    println!("canonical: {}", pretty_print(&frame));
    println!("setup:     {:?}", frame.setup);
    println!("tokens:    {}", tokenize("SI|F(2, 80)").unwrap().len());

    for src in [
        "SI|F(1",
        "SI|LOOP(3);F(2,50)",
        "XX|S",
        "SI|W(1 < 2 < 3)",
        "SI|F(1, 150)",
    ] {
        match compile(src) {
            Ok((_, warnings)) if warnings.is_empty() => println!("{src:<20} ok"),
            Ok((_, warnings)) => {
                for w in warnings {
                    println!("{src:<20} {w}");
                }
            }
            Err(errors) => {
                // The wire form is what a robot would answer on the serial link.
                println!("{src:<20} {}  ({})", errors[0].wire_line(), errors[0]);
            }
        }
    }
}
