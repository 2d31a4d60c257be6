mod common;

use common::*;
use proptest::prelude::*;

use tiniscript::lang::{
    compile, parse_expr, parse_frame, parse_instructions, pretty_print, print_expr, validate,
    DiagCode, Direction, SetupMode, StmtKind,
};

#[test]
fn example_programs_parse_cleanly_and_round_trip() {
    for src in EXAMPLE_PROGRAMS
        .iter()
        .chain([&OBSTACLE_WIRE, &OBSTACLE_LISTING])
    {
        let frame = parse_frame(src).unwrap_or_else(|d| panic!("{src}: {d:?}"));
        assert!(validate(&frame).is_empty(), "{src}");
        let printed = pretty_print(&frame);
        assert_eq!(parse_frame(&printed).unwrap(), frame, "{src}");
    }
    let seq = parse_instructions(MODULE_SEQUENCE).unwrap();
    let kinds: Vec<_> = seq.iter().map(|s| &s.kind).collect();
    assert!(matches!(
        kinds[0],
        StmtKind::Move {
            dir: Direction::Left,
            ..
        }
    ));
    assert!(matches!(
        kinds[1],
        StmtKind::Move {
            dir: Direction::Backward,
            ..
        }
    ));
    assert!(matches!(kinds[2], StmtKind::Wait { .. }));
    assert!(matches!(kinds[3], StmtKind::Stop));
    let framed = format!("SI|{MODULE_SEQUENCE}");
    assert!(compile(&framed).unwrap().1.is_empty());
}

#[test]
fn listing_and_wire_form_are_the_same_program() {
    let listing = parse_frame(OBSTACLE_LISTING).unwrap();
    let mut wire = parse_frame(OBSTACLE_WIRE).unwrap();
    assert!(matches!(
        wire.program.statements[0].kind,
        StmtKind::StartMarker
    ));
    wire.program.statements.remove(0);
    assert_eq!(listing, wire);
    assert_eq!(
        pretty_print(&parse_frame(OBSTACLE_WIRE).unwrap()),
        "SI|START;LOOP(FOREVER);F(1, 80);DISTANCE;IF(DISTANCE < 10);S;R(1, 60);ENDIF;END_LOOP"
    );
}

#[test]
fn setup_modes() {
    assert_eq!(parse_frame(EXAMPLE_PING).unwrap().setup, SetupMode::Ping);
    assert_eq!(
        parse_frame(EXAMPLE_BUTTON).unwrap().setup,
        SetupMode::ButtonStart
    );
    assert_eq!(
        parse_frame(EXAMPLE_FORWARD).unwrap().setup,
        SetupMode::Immediate
    );
}

fn first_code(src: &str) -> DiagCode {
    compile(src).unwrap_err()[0].code
}

#[test]
fn diagnostics_for_broken_frames() {
    assert_eq!(first_code("SI F(1, 2)"), DiagCode::MissingSeparator);
    assert_eq!(first_code("XX|S"), DiagCode::UnknownSetup);
    assert_eq!(first_code("SI|LOOP(3);F(2,50)"), DiagCode::UnbalancedBlock);
    assert_eq!(
        first_code("SI|IF(TRUE);S;END_LOOP"),
        DiagCode::UnbalancedBlock
    );
    assert_eq!(first_code("SI|F(1"), DiagCode::UnclosedParen);
    assert_eq!(first_code("SI|F(1, 2) S"), DiagCode::TrailingGarbage);
    assert_eq!(first_code("SI|W(1 < 2 < 3)"), DiagCode::ChainedComparator);
    assert_eq!(first_code("SI|F(1, 2$)"), DiagCode::UnknownCharacter);
    assert_eq!(first_code("SI|W(1.2.3)"), DiagCode::MalformedNumber);
    assert_eq!(first_code("SI|LOOP(2);END_LOOP"), DiagCode::EmptyLoopBody);
    assert_eq!(
        first_code("SI|LOOP(-2);S;END_LOOP"),
        DiagCode::NegativeLoopCount
    );
    assert_eq!(
        first_code("SI|LOOP(2.5);S;END_LOOP"),
        DiagCode::FractionalLoopCount
    );
}

#[test]
fn warnings_do_not_block() {
    let (_, warnings) = compile("SI|F(1, 150);W(-1);LOOP(FOREVER);DISTANCE;END_LOOP").unwrap();
    let codes: Vec<_> = warnings.iter().map(|d| d.code).collect();
    assert_eq!(
        codes,
        [
            DiagCode::PowerOutOfRange,
            DiagCode::NegativeDuration,
            DiagCode::DegenerateForever
        ]
    );
}

#[test]
fn error_columns_point_into_the_line() {
    let d = &parse_frame("SI|F(1").unwrap_err()[0];
    assert_eq!(d.wire_line(), "ERR 7 UnclosedParen");
    let d = &parse_frame("SI|F(1, 2$)").unwrap_err()[0];
    assert_eq!(d.span.column(), 10);
}

#[test]
fn precedence() {
    for (src, canonical) in [
        ("1 + 2 * 3", "1 + 2 * 3"),
        ("(1 + 2) * 3", "(1 + 2) * 3"),
        ("NOT TRUE AND FALSE OR TRUE", "NOT TRUE AND FALSE OR TRUE"),
        ("TRUE OR FALSE AND FALSE", "TRUE OR FALSE AND FALSE"),
        ("-2 * -3", "-2 * -3"),
        (
            "1 + 2 < 4 AND DISTANCE >= 10",
            "1 + 2 < 4 AND DISTANCE >= 10",
        ),
    ] {
        assert_eq!(print_expr(&parse_expr(src).unwrap()), canonical);
    }
    // (TRUE OR FALSE) AND FALSE would be FALSE.
    let e = parse_expr("TRUE OR FALSE AND FALSE").unwrap();
    assert_eq!(
        tiniscript::interp::eval_const(&e).unwrap(),
        tiniscript::interp::Value::Bool(true)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(frame in frame()) {
        let printed = pretty_print(&frame);
        let reparsed = parse_frame(&printed);
        prop_assert!(reparsed.is_ok(), "{printed}: {reparsed:?}");
        prop_assert_eq!(reparsed.unwrap(), frame);
    }

    #[test]
    fn whitespace_never_changes_the_ast(
        frame in frame(),
        gaps in prop::collection::vec(whitespace(), 1..16),
    ) {
        let canonical = pretty_print(&frame);
        let mutated = respace(&canonical, &gaps);
        let reparsed = parse_frame(&mutated);
        prop_assert!(reparsed.is_ok(), "{mutated:?}: {reparsed:?}");
        prop_assert_eq!(reparsed.unwrap(), frame);
    }

    #[test]
    fn formatting_is_idempotent(frame in frame()) {
        let once = pretty_print(&frame);
        let twice = pretty_print(&parse_frame(&once).unwrap());
        prop_assert_eq!(once, twice);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    /// Arbitrary input never panics and every error points inside the line.
    #[test]
    fn parser_is_total(src in "\\PC{0,80}") {
        if let Err(diags) = compile(&src) {
            prop_assert!(!diags.is_empty());
            for d in diags {
                prop_assert!(d.span.start <= src.len() && d.span.end <= src.len());
            }
        }
    }

    /// Token soup built from the language's own vocabulary.
    #[test]
    fn parser_is_total_on_token_soup(
        words in prop::collection::vec(prop::sample::select(vec![
            "SI", "SB", "PING", "|", ";", "(", ")", ",", "F", "B", "L", "R", "S", "STOP", "W",
            "IF", "ENDIF", "LOOP", "END_LOOP", "FOREVER", "ROUND", "TRUE", "FALSE", "AND", "OR",
            "NOT", "START", "DISTANCE", "LIGHT_L", "LIGHT_R", "1", "2.5", "+", "-", "*", "/",
            "%", "=", "<", ">", "<=", ">=", "<>", " ",
        ]), 0..40)
    ) {
        let src: String = words.concat();
        let _ = compile(&src);
    }

    /// Removing one structural delimiter from a valid program is always
    /// reported, never silently accepted as a different program.
    #[test]
    fn dropped_delimiters_are_detected(frame in frame(), pick in any::<prop::sample::Index>()) {
        let printed = pretty_print(&frame);
        let positions: Vec<usize> = printed
            .char_indices()
            .filter(|(_, c)| matches!(c, '(' | ')' | '|'))
            .map(|(i, _)| i)
            .collect();
        if !positions.is_empty() {
            let at = positions[pick.index(positions.len())];
            let mut broken = printed.clone();
            broken.remove(at);
            if let Ok(other) = parse_frame(&broken) {
                prop_assert_eq!(pretty_print(&other), broken.clone(), "{} parsed as a different program", broken);
            }
        }
    }
}
