use std::io::Write;
use std::process::{Command, Output, Stdio};

fn lightswitch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightswitch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lightswitch"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn generated_board_balances_through_stdin() {
    let board = lightswitch(&["gen", "--rows", "5", "--cols", "8", "--seed", "9"]);
    assert!(board.status.success());
    let out = with_stdin(&["--format", "json", "balance", "-i", "-"], &stdout(&board));
    let doc = json(&out);
    assert_eq!(doc["m"], 5);
    assert_eq!(doc["n"], 8);
    assert!(doc["imbalance"].as_u64().unwrap() <= 2);
    assert!(doc.get("seed").is_none());
}

#[test]
fn identical_invocations_give_identical_bytes() {
    for args in [
        &[
            "--format", "json", "balance", "--rows", "12", "--cols", "12", "--seed", "4",
        ][..],
        &["oracle", "--rows", "4", "--cols", "6", "--seed", "4"],
        &["cube", "solve", "--seed", "17"],
    ] {
        assert_eq!(
            lightswitch(args).stdout,
            lightswitch(args).stdout,
            "{args:?}"
        );
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let one = lightswitch(&[
        "--jobs", "1", "--format", "json", "oracle", "--rows", "5", "--cols", "12",
    ]);
    let three = lightswitch(&[
        "--jobs", "3", "--format", "json", "oracle", "--rows", "5", "--cols", "12",
    ]);
    assert!(one.status.success());
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn oracle_cap_is_a_resource_error() {
    let out = lightswitch(&["oracle", "--rows", "6", "--cols", "6", "--cap", "8"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn balance_with_oracle_reports_both() {
    let doc = json(&lightswitch(&[
        "--format", "json", "balance", "--rows", "3", "--cols", "6", "--seed", "2", "--oracle",
    ]));
    let min = doc["oracle_min"].as_u64().unwrap();
    assert!(min <= doc["imbalance"].as_u64().unwrap());
    assert_eq!(doc["generator"], "chacha8/seed_from_u64");
}

#[test]
fn shape_errors_exit_two() {
    assert_eq!(
        lightswitch(&["balance", "--rows", "7", "--cols", "6"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lightswitch(&["cube", "solve", "--side", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        lightswitch(&["oracle", "--side", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(lightswitch(&["gen", "--side", "0"]).status.code(), Some(2));
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(lightswitch(&["balance"]).status.code(), Some(1));
    assert_eq!(lightswitch(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        lightswitch(&["cube", "prop3", "--script", "x0 q1"])
            .status
            .code(),
        Some(1)
    );
    let out = with_stdin(&["oracle", "-i", "-"], "3\n++\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn help_and_version_succeed() {
    assert!(lightswitch(&["--help"]).status.success());
    let v = lightswitch(&["--version"]);
    assert!(v.status.success());
    assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn oracle_detects_cube_files() {
    let cube = lightswitch(&["gen", "--side", "2", "--seed", "5"]);
    let doc = json(&with_stdin(
        &["--format", "json", "oracle", "-i", "-"],
        &stdout(&cube),
    ));
    assert_eq!(doc["n"], 2);
    assert!(doc["sx"].is_array());
    assert_eq!(doc["imbalance"], doc["oracle_min"]);
}

#[test]
fn cube_verbs_report_known_values() {
    assert_eq!(stdout(&lightswitch(&["cube", "verify-p2"])), "2\n");
    let doc = json(&lightswitch(&["--format", "json", "cube", "lemma4a"]));
    assert_eq!(
        (doc["numer"].as_u64(), doc["denom"].as_u64()),
        (Some(7), Some(2))
    );
    let doc = json(&lightswitch(&["--format", "json", "cube", "zchar"]));
    assert_eq!(doc["profiles"].as_array().unwrap().len(), 495);
    assert_eq!(doc["predicate_full_sound"], true);
}

#[test]
fn prop3_follows_a_script() {
    let doc = json(&lightswitch(&[
        "--format",
        "json",
        "cube",
        "prop3",
        "--seed",
        "1",
        "--script",
        "x0 y2 z3 x0",
    ]));
    assert_eq!(doc["divisible_by_4"], true);
    assert_eq!(doc["conserved"], true);
    assert_eq!(doc["script"], "x0 y2 z3 x0");

    // All lights on except one: the plane sums are odd.
    let mut text = String::from("4\n");
    for k in 0..4 {
        if k > 0 {
            text.push('\n');
        }
        for i in 0..4 {
            text.push_str(if i == 0 && k == 0 { "-+++\n" } else { "++++\n" });
        }
    }
    let doc = json(&with_stdin(
        &["--format", "json", "cube", "prop3", "-i", "-"],
        &text,
    ));
    assert_eq!(doc["divisible_by_4"], false);
    assert!(doc["conserved"].is_null());
}

#[test]
fn bench_reports_an_exponent() {
    let doc = json(&lightswitch(&[
        "--format", "json", "bench", "--sizes", "4,8,12", "--boards", "3",
    ]));
    assert_eq!(doc["sizes"].as_array().unwrap().len(), 3);
    assert!(doc["exponent"].as_f64().is_some());
    assert_eq!(
        lightswitch(&["bench", "--sizes", "5"]).status.code(),
        Some(2)
    );
}
