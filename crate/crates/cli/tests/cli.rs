use std::fs;
use std::path::Path;

use fraisse_cli::{run, EXIT_OK, EXIT_PROPERTY, EXIT_USAGE};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("fraisse").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const SAMPLE: &str = "\
vocab R/1 E/2
structure a
domain x y z
rel R (x) (z)
rel E (x,y) (y,z) (z,x)
end
";

#[test]
fn type_count_of_graphs() {
    let (code, out, _) = cli(&["type-count", "--class", "graphs", "--n", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().next(), Some("3"));
    let (code, out, _) = cli(&[
        "--format",
        "summary",
        "type-count",
        "--class",
        "sets",
        "--n",
        "4",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("--- summary ---\n"));
    assert!(out.contains("types=15\n"));
    assert!(out.contains("verdict=pass\n"));
}

#[test]
fn encode_then_decode_reproduces_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(dir.path(), "a.txt");
    fs::write(&input, SAMPLE).unwrap();
    let enc = path(dir.path(), "a.enc");
    let dec = path(dir.path(), "a.dec");
    let (code, _, err) = cli(&["encode", "--input", &input, "--emit", &enc]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (code, _, err) = cli(&["decode", "--input", &enc, "--emit", &dec]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(fs::read_to_string(&dec).unwrap(), SAMPLE);
}

#[test]
fn partial_labels_decode_to_the_labelled_tuples() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(dir.path(), "a.txt");
    fs::write(&input, SAMPLE).unwrap();
    let labels = path(dir.path(), "labels");
    fs::write(&labels, "# only two\nE x y\nR z\n").unwrap();
    let enc = path(dir.path(), "a.enc");
    assert_eq!(
        cli(&["encode", "--input", &input, "--labels", &labels, "--emit", &enc]).0,
        EXIT_OK
    );
    let (code, out, _) = cli(&["decode", "--input", &enc]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("rel R (z)\n"), "{out}");
    assert!(out.contains("rel E (x,y)\n"), "{out}");

    fs::write(&labels, "F x y\n").unwrap();
    let (code, _, err) = cli(&["encode", "--input", &input, "--labels", &labels]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown symbol F"), "{err}");
}

#[test]
fn complete_or_empty_fails_joint_embedding() {
    let (code, out, _) = cli(&[
        "check-class",
        "--class",
        "complete-or-empty",
        "--bound",
        "2",
    ]);
    assert_eq!(code, EXIT_PROPERTY);
    assert!(out.contains("witness:"), "{out}");
    assert!(
        out.contains("jep=fail") || out.contains("jep: fail"),
        "{out}"
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        cli(&["type-count", "--class", "graphs", "--n", "2", "--bogus"]).0,
        EXIT_USAGE
    );
    assert_eq!(cli(&["no-such-command"]).0, EXIT_USAGE);
    assert_eq!(cli(&["type-count", "--class", "graphs"]).0, EXIT_USAGE);
    let (code, _, err) = cli(&["type-count", "--class", "hypergraphs", "--n", "2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("unknown class"), "{err}");
    let (code, _, _) = cli(&["--format", "xml", "demo", "rado"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn parse_errors_carry_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let table = path(dir.path(), "t");
    fs::write(&table, "0 0 1\n0 x 1\n").unwrap();
    let (code, _, err) = cli(&[
        "gadget-verdict",
        "--table",
        &table,
        "--index",
        "0",
        "--horizon",
        "2",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("parse error at 2:3"), "{err}");
}

#[test]
fn gadget_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let table = path(dir.path(), "t");
    let rows: String = (0..10).map(|x| format!("0 0 {x}\n")).collect();
    fs::write(&table, format!("# e n x\n{rows}1 1 0\n")).unwrap();
    let (code, out, _) = cli(&[
        "gadget-verdict",
        "--table",
        &table,
        "--index",
        "1",
        "--horizon",
        "2",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, out, _) = cli(&[
        "gadget-verdict",
        "--table",
        &table,
        "--index",
        "0",
        "--horizon",
        "2",
    ]);
    assert_eq!(code, EXIT_PROPERTY);
    assert!(out.contains("sort 0"), "{out}");
}

#[test]
fn generic_axioms_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let generic = path(dir.path(), "g");
    let broken = path(dir.path(), "b");
    let axioms = path(dir.path(), "ax");
    assert_eq!(
        cli(&[
            "build-generic",
            "--class",
            "graphs",
            "--level",
            "2",
            "--emit",
            &generic
        ])
        .0,
        EXIT_OK
    );
    let (code, out, _) = cli(&[
        "axioms",
        "--class",
        "graphs",
        "--budget",
        "2",
        "--schemes",
        "cd",
        "--verify",
        &generic,
        "--emit",
        &axioms,
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(fs::read_to_string(&axioms)
        .unwrap()
        .lines()
        .any(|l| l.starts_with("[d]")));
    let (code, _, _) = cli(&[
        "build-generic",
        "--class",
        "graphs",
        "--level",
        "2",
        "--skip",
        "0",
        "--emit",
        &broken,
    ]);
    assert_eq!(code, EXIT_PROPERTY);
    let (code, out, _) = cli(&[
        "axioms",
        "--class",
        "graphs",
        "--budget",
        "2",
        "--schemes",
        "cd",
        "--verify",
        &broken,
    ]);
    assert_eq!(code, EXIT_PROPERTY);
    assert!(
        out.contains("first_failure=[c]") || out.contains("first_failure=[d]"),
        "{out}"
    );
}

#[test]
fn amalgamation_over_shared_names() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(dir.path(), "p");
    fs::write(
        &input,
        "vocab E/2\nstructure c\ndomain a\nend\n\nstructure d1\ndomain a b\nrel E (a,b) (b,a)\nend\n\n\
         structure d2\ndomain a c\nrel E (a,c) (c,a)\nend\n",
    )
    .unwrap();
    let (code, out, err) = cli(&["amalgamate", "--class", "triangle-free", "--input", &input]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("domain "), "{out}");
    let (code, out, _) = cli(&[
        "amalgamate",
        "--class",
        "complete-or-empty",
        "--input",
        &input,
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn gadget_axiom_file() {
    let (code, out, _) = cli(&[
        "gadget-axioms",
        "--layer",
        "0",
        "--budget",
        "2",
        "--schemes",
        "a",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("[a] (forall (x1) (not (rel Z1 x1)))"), "{out}");
    assert!(out.contains("# rewritten into L axioms of K_0,{}"), "{out}");
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a");
    let b = path(dir.path(), "b");
    for target in [&a, &b] {
        let (code, _, _) = cli(&[
            "--output",
            target,
            "check-class",
            "--class",
            "graphs",
            "--bound",
            "3",
        ]);
        assert_eq!(code, EXIT_OK);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(cli(&["demo", "dlo"]), cli(&["demo", "dlo"]));
}

#[test]
fn layered_subcommands() {
    let (code, out, _) = cli(&["layer-check", "--lower", "1", "--upper", "2"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, out, _) = cli(&[
        "stabilize",
        "--sentence",
        "(exists (x) (rel le3 x x x x))",
        "--horizon",
        "3",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("index=3"), "{out}");
    assert!(out.contains("truth="), "{out}");
    let (code, out, _) = cli(&["bnf-over-p", "--layer", "1"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(
        cli(&["layer-check", "--lower", "3", "--upper", "2"]).0,
        EXIT_USAGE
    );
}
