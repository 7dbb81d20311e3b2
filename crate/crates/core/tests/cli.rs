use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kac::codec::{parse_system, SystemDoc};
use kac::Generator;

fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn data(name: &str) -> String {
    tests_dir().join("data").join(name).display().to_string()
}

fn kac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> &str {
    std::str::from_utf8(&output.stdout).unwrap()
}

fn stderr(output: &Output) -> &str {
    std::str::from_utf8(&output.stderr).unwrap()
}

fn assert_golden(name: &str, args: &[&str]) {
    let expected = fs::read_to_string(tests_dir().join("golden").join(name)).unwrap();
    let output = kac(args);
    assert_eq!(output.status.code(), Some(0), "{name}: {}", stderr(&output));
    assert_eq!(stdout(&output), expected, "{name}");
}

#[test]
fn cycle_reports_match_golden_files() {
    let system = data("cycle5.json");
    let set = data("e_0_2.json");
    for (golden, command) in [
        ("verify_cycle5.json", "verify"),
        ("series_cycle5.json", "series"),
        ("tower_cycle5.json", "tower"),
        ("dist_cycle5.json", "dist"),
        ("induce_cycle5.json", "induce"),
    ] {
        assert_golden(golden, &[command, "--system", &system, "--set", &set]);
    }
}

#[test]
fn rotation_reports_match_golden_files() {
    let system = data("rotation_2_5.json");
    let set = data("e_first_fifth.json");
    assert_golden(
        "verify_rotation_2_5.json",
        &["verify", "--system", &system, "--set", &set],
    );
    assert_golden(
        "induce_rotation_2_5.json",
        &["induce", "--system", &system, "--set", &set],
    );
}

#[test]
fn output_is_deterministic() {
    let system = data("cycle5.json");
    let args = ["tower", "--system", &system, "--set", r#"{"points":[2,0]}"#];
    assert_eq!(kac(&args).stdout, kac(&args).stdout);
}

#[test]
fn normalize_adds_normalized_lhs() {
    let output = kac(&[
        "verify",
        "--system",
        &data("identity3.json"),
        "--set",
        r#"{"points":[1]}"#,
        "--normalize",
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        stdout(&output),
        "{\"lhs\":\"1/3\",\"rhs\":\"1/3\",\"equal\":true,\"invariant_closure\":[1],\"normalized_lhs\":\"1/3\"}\n"
    );
}

#[test]
fn human_output_is_a_table() {
    let output = kac(&[
        "verify",
        "--system",
        &data("cycle5.json"),
        "--set",
        &data("e_0_2.json"),
        "--output",
        "human",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.starts_with("quantity"), "{text}");
    assert!(text.contains("equal                   true"), "{text}");
}

#[test]
fn bad_input_exits_2() {
    let output = kac(&[
        "verify",
        "--system",
        &data("bad.json"),
        "--set",
        r#"{"points":[0]}"#,
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr(&output).contains("map is not a bijection"),
        "{}",
        stderr(&output)
    );
    assert!(stdout(&output).is_empty());

    let cases: [&[&str]; 5] = [
        &[
            "verify",
            "--system",
            "does-not-exist.json",
            "--set",
            r#"{"points":[0]}"#,
        ],
        &[
            "verify",
            "--system",
            &data("cycle5.json"),
            "--set",
            r#"{"points":[7]}"#,
        ],
        &[
            "verify",
            "--system",
            &data("cycle5.json"),
            "--set",
            r#"{"intervals":[["0","1"]]}"#,
        ],
        &[
            "tower",
            "--system",
            &data("cycle5.json"),
            "--set",
            r#"{"points":[]}"#,
        ],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(kac(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn gen_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("random.json");
    let out = out.to_str().unwrap();
    let output = kac(&[
        "gen",
        "random",
        "--n",
        "40",
        "--seed",
        "7",
        "--max-denominator",
        "100",
        "--out",
        out,
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).is_empty());

    let SystemDoc::Permutation(system) = parse_system(&fs::read_to_string(out).unwrap()).unwrap()
    else {
        panic!("expected a permutation system");
    };
    let expected = Generator::RandomPermutation {
        n: 40,
        seed: 7,
        max_denominator: 100,
    }
    .generate()
    .unwrap();
    assert_eq!(system, expected);

    let verify = kac(&["verify", "--system", out, "--set", r#"{"points":[0,5,9]}"#]);
    assert_eq!(verify.status.code(), Some(0), "{}", stderr(&verify));

    let cycle = kac(&["gen", "cycle", "--n", "3", "--total", "3/2"]);
    assert_eq!(
        stdout(&cycle),
        "{\"type\":\"permutation\",\"weights\":[\"1/2\",\"1/2\",\"1/2\"],\"map\":[1,2,0]}\n"
    );
    let cat = kac(&["gen", "cat-map", "--q", "2"]);
    assert_eq!(stdout(&cat), "{\"type\":\"permutation\",\"weights\":[\"1/4\",\"1/4\",\"1/4\",\"1/4\"],\"map\":[0,3,1,2]}\n");
}

#[test]
fn unknown_system_type_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flow.json");
    fs::write(&path, r#"{"type":"flow"}"#).unwrap();
    let output = kac(&[
        "verify",
        "--system",
        path.to_str().unwrap(),
        "--set",
        r#"{"points":[0]}"#,
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr(&output), "error: unknown system type \"flow\"\n");
}
