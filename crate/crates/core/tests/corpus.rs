//! Grammar corpus: every valid file round-trips through the printer and
//! validates; every invalid file is rejected with a source position.

use std::path::{Path, PathBuf};

use gpa_core::lang::{parse_model, print_model, validate};
use gpa_core::GpaError;
use proptest::prelude::*;

fn files(kind: &str) -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(kind);
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "gpa"))
        .collect();
    out.sort();
    out
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn reject(source: &str) -> Option<GpaError> {
    match parse_model(source) {
        Err(e) => Some(e.into()),
        Ok(m) => validate(&m).err().map(Into::into),
    }
}

#[test]
fn corpus_sizes() {
    assert!(files("valid").len() >= 25);
    assert!(files("invalid").len() >= 10);
}

#[test]
fn valid_files_round_trip_and_validate() {
    for p in files("valid") {
        let src = read(&p);
        let m = parse_model(&src).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        let printed = print_model(&m);
        let again = parse_model(&printed).unwrap_or_else(|e| panic!("{}: reprint fails: {e}\n{printed}", p.display()));
        assert_eq!(m, again, "{}", p.display());
        assert_eq!(print_model(&again), printed, "{}: printer not idempotent", p.display());
        validate(&m).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn invalid_files_report_positions() {
    for p in files("invalid") {
        let src = read(&p);
        match reject(&src) {
            Some(GpaError::Parse(e)) => assert!(e.pos.line >= 1, "{}", p.display()),
            Some(GpaError::Validation(e)) => assert!(e.pos.is_some(), "{}: {e}", p.display()),
            Some(other) => panic!("{}: unexpected error kind {other}", p.display()),
            None => panic!("{} was accepted", p.display()),
        }
    }
}

#[test]
fn invalid_files_that_parse_still_round_trip() {
    for p in files("invalid") {
        if let Ok(m) = parse_model(&read(&p)) {
            assert_eq!(parse_model(&print_model(&m)).unwrap(), m, "{}", p.display());
        }
    }
}

#[test]
fn error_position_points_at_offending_token() {
    let e = parse_model("A = (a, 1.0).A @;\nG{A[1]}\n").unwrap_err();
    assert_eq!((e.pos.line, e.pos.column), (1, 16));
    let e = parse_model("A = (a, 1.0).A\nG{A[1]}\n").unwrap_err();
    assert_eq!((e.pos.line, e.pos.column), (2, 1));
}

const TOKENS: &[&str] = &[
    "A", "B", "G", "r", "a", "stop", "odes", "simulation", "comparison", "plot", "plotSwitchpoints", "E", "Var",
    "Cov", "Central", "StandardisedCentral", "stopTime", "stepSize", "density", "replications", "=", ";", ",",
    ".", "(", ")", "{", "}", "[", "]", "<", ">", "|", "+", "-", "*", "/", "^", ":", "->", "\"f.csv\"", "1.0", "2",
    " ", "\n", "//x\n", "@",
];

fn token_soup() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(TOKENS), 0..60).prop_map(|v| v.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parser_is_total_on_token_soup(src in token_soup()) {
        if let Ok(m) = parse_model(&src) {
            prop_assert_eq!(parse_model(&print_model(&m)).unwrap(), m.clone());
            let _ = validate(&m);
        }
    }

    #[test]
    fn parser_is_total_on_arbitrary_text(src in "\\PC{0,200}") {
        let _ = parse_model(&src);
    }

    #[test]
    fn parser_is_total_on_mutated_corpus(file in 0usize..32, cut in 0usize..400, insert in prop::sample::select(TOKENS)) {
        let all = files("valid");
        let src = read(&all[file % all.len()]);
        let mut at = cut.min(src.len());
        while !src.is_char_boundary(at) {
            at -= 1;
        }
        let mutated = format!("{}{}{}", &src[..at], insert, &src[at..]);
        if let Ok(m) = parse_model(&mutated) {
            prop_assert_eq!(parse_model(&print_model(&m)).unwrap(), m.clone());
            let _ = validate(&m);
        }
    }
}
