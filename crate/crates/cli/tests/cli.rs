use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn boim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boim")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const SMALL: &str = r#"
seed = 5
runs = 2
budget = 40.0

[graph]
kind = "path"
n = 4

[weights]
kind = "explicit"
values = [0.5, 0.4, 0.3]

[costs]
kind = "explicit"
values = [0.5, 1.0, 0.2, 0.7]
c0 = 1.0

[[policy]]
variant = "cucb"
known_costs = true

[[policy]]
variant = "cucb5"
known_costs = false
"#;

fn write_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    fs::write(&path, SMALL).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_round_and_curve_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out_dir = dir.path().join("out");
    let out = boim(&["run", "--config", &config, "--output", out_dir.to_str().unwrap(), "--workers", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("cucb5"), "{text}");

    let names: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.contains(&"curves.csv".to_string()), "{names:?}");
    let rounds = names.iter().filter(|n| n.starts_with("rounds-")).count();
    assert_eq!(rounds, 4, "{names:?}");

    let curves = fs::read_to_string(out_dir.join("curves.csv")).unwrap();
    assert!(curves.lines().count() > 1);
}

#[test]
fn run_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(boim(&["run", "--config", &config, "--output", a.to_str().unwrap(), "--workers", "1"]).status.success());
    assert!(boim(&["run", "--config", &config, "--output", b.to_str().unwrap(), "--workers", "2"]).status.success());
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn oracle_prints_lambda_star() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = boim(&["oracle", "--config", &config]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("lambda* = ")).expect("lambda line");
    let value: f64 = line["lambda* = ".len()..].trim().parse().unwrap();
    assert!(value > 0.0 && value.is_finite());
    assert!(text.contains("provenance = exact"), "{text}");
}

#[test]
fn oracle_with_knapsack_budget_reports_mixture_or_set() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = boim(&["oracle", "--config", &config, "--knapsack-budget", "1.6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("lambda* = "));
}

#[test]
fn verify_passes() {
    let out = boim(&["verify", "--cases", "40", "--rebuilds", "40"]);
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn verify_catches_injected_fault() {
    let out = boim(&["verify", "--cases", "40", "--rebuilds", "10", "--inject-fault", "negated-bonus2"]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn bad_config_exits_with_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "seed = 1\nruns = 0\nbudget = 1.0\n[graph]\nkind = \"complete\"\nn = 3\n").unwrap();
    let out = boim(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn unknown_preset_is_rejected() {
    let out = boim(&["oracle", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}
