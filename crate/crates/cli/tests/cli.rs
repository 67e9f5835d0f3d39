use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn wsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsp"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_exit_codes() {
    assert_eq!(
        wsp(&["solve", &data("expenses.wsp")]).status.code(),
        Some(1)
    );
    let sat = wsp(&["solve", "--oracle", &data("expenses_neq.wsp")]);
    assert_eq!(sat.status.code(), Some(0));
    let text = stdout(&sat);
    assert!(text.starts_with("Sat\n"));
    assert_eq!(text.lines().filter(|l| l.contains(" -> ")).count(), 4);
    assert_eq!(wsp(&["solve", "/nonexistent.wsp"]).status.code(), Some(2));
    assert_eq!(wsp(&["solve"]).status.code(), Some(2));
}

#[test]
fn malformed_instance_is_a_usage_error() {
    let path = std::env::temp_dir().join("wsp_cli_bad.wsp");
    std::fs::write(&path, "this is not an instance\n").unwrap();
    let out = wsp(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn json_report() {
    let out = wsp(&[
        "solve",
        "--json",
        "--strategy",
        "min-fill",
        &data("rhul.wsp"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "sat");
    assert_eq!(v["users"], 7);
    assert_eq!(v["plan"].as_array().unwrap().len(), 2);
}

#[test]
fn external_decomposition() {
    let out = wsp(&["check-td", &data("rhul.wsp"), &data("rhul.td")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("valid width=3"));
    let solved = wsp(&["solve", "--td", &data("rhul.td"), &data("rhul.wsp")]);
    assert_eq!(solved.status.code(), Some(0));
}

#[test]
fn generator_output_round_trips_through_solve() {
    let gen = wsp(&["gen", "--seed", "9", "--users", "6", "--steps", "4"]);
    assert!(gen.status.success());
    let path = std::env::temp_dir().join("wsp_cli_gen.wsp");
    std::fs::write(&path, &gen.stdout).unwrap();
    let out = wsp(&["solve", "--oracle", path.to_str().unwrap()]);
    assert!(matches!(out.status.code(), Some(0 | 1)));
    assert!(String::from_utf8_lossy(&out.stderr).contains("agree"));
}

#[test]
fn reduction_check() {
    let out = wsp(&[
        "reduce",
        "psi",
        &data("triangle_k4.psi"),
        "--to",
        "wsp",
        "--check",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).starts_with("p wsp"));
}
