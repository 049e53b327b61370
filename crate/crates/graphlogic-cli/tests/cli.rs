use std::path::PathBuf;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_graphlogic")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn scratch(name: &str, text: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const F: &str = r#"{"vertices":[{"id":1,"label":"a"},{"id":2,"label":"b"},{"id":3,"label":"c"},{"id":4,"label":"d"}],"edges":[[1,2],[2,3],[3,4]]}"#;
const G: &str = r#"{"vertices":[{"id":1,"label":"b"},{"id":2,"label":"a"},{"id":3,"label":"c"},{"id":4,"label":"d"}],"edges":[[1,2],[1,3],[3,4]]}"#;
const H: &str = r#"{"vertices":[{"id":1,"label":"a"},{"id":2,"label":"b"},{"id":3,"label":"c"},{"id":4,"label":"d"}],"edges":[[1,2],[1,3],[3,4]]}"#;

#[test]
fn excluded_middle_is_proved() {
    let (code, out) = run(&["prove", "--system", "mgl", "a | ~a"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"rule\": \"par\""));
}

#[test]
fn p4_alone_is_refuted() {
    let (code, out) = run(&["prove", "--system", "mgl0", "P4<a,b,c,d>"]);
    assert_eq!((code, out.trim()), (1, "refuted"));
}

#[test]
fn search_bound_reports_unknown() {
    let (code, _) = run(&["prove", "--system", "mgl", "--depth", "0", "(a & b) | ~a | ~b"]);
    assert_eq!(code, 3);
}

#[test]
fn similar_graphs_that_are_not_isomorphic() {
    let (f, g, h) = (scratch("F.json", F), scratch("G.json", G), scratch("H.json", H));
    let (code, out) = run(&["iso", &f, &h]);
    assert_eq!((code, out.trim()), (1, "similar but not isomorphic"));
    assert_eq!(run(&["iso", &f, &g]).0, 0);
}

#[test]
fn dot_output_is_sorted_and_minimal() {
    assert_eq!(run(&["graph", "--format", "dot", "a"]).1, "graph G {\n  v0 [label=\"a\"];\n}\n");
    let (_, two) = run(&["graph", "--format", "dot", "a & b"]);
    assert_eq!(two.matches("--").count(), 1);
}

#[test]
fn bad_input_is_a_usage_error() {
    assert_eq!(run(&["prove", "a |"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn proofs_round_trip_through_check_translate_and_glk() {
    let (_, proof) = run(&["prove", "--system", "mgl0", "(a & b) | (~a | ~b)"]);
    let p = scratch("p.json", &proof);
    assert_eq!(run(&["check", "--system", "mgl0", &p]).0, 0);
    let (code, gs) = run(&["translate", &p]);
    assert_eq!(code, 0);
    let d = scratch("d.json", &gs);
    assert_eq!(run(&["check", &d]).0, 0);
    assert_eq!(run(&["translate", &d]).0, 0);

    let (_, glk) = run(&["prove", "--system", "glk", "~a | (a | a)"]);
    let q = scratch("q.json", &glk);
    assert_eq!(run(&["check", "--system", "mgl", &q]).0, 1);
    let (code, staged) = run(&["decompose-glk", "--refine", &q]);
    assert_eq!(code, 0);
    assert_eq!(run(&["check", &scratch("s.json", &staged)]).0, 0);
}

#[test]
fn oracle_and_counterexample() {
    assert_eq!(run(&["oracle", "(a & b) | ~a | ~b"]), (0, "true\n".into()));
    assert_eq!(run(&["oracle", "a & ~a"]).0, 1);
    assert_eq!(run(&["oracle", "a | b", "--assign", "a=0,b=0"]).0, 1);
    let (code, out) = run(&["counterexample"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"prime\": true"));
}

#[test]
fn seeded_output_is_reproducible() {
    let a = run(&["parse", "--random", "9", "--seed", "17"]);
    let b = run(&["parse", "--random", "9", "--seed", "17"]);
    assert_eq!(a, b);
    assert_eq!(run(&["graph", "--random", "7", "--seed", "4"]), run(&["graph", "--random", "7", "--seed", "4"]));
}
