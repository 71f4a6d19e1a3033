use std::fs;
use std::process::{Command, Output};

fn outage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_outage"))
        .args(args)
        .output()
        .expect("spawn outage")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(o: &Output) -> f64 {
    let text = stdout(o);
    text.lines().rfind(|l| !l.starts_with('#')).unwrap().parse().unwrap()
}

fn header_value(o: &Output, key: &str) -> String {
    let prefix = format!("# {key} = ");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
        .unwrap_or_else(|| panic!("no header entry for {key}"))
}

#[test]
fn eval_prints_header_and_value() {
    let o = outage(&["eval", "suc", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("# outage "));
    assert_eq!(header_value(&o, "n"), "2");
    assert_eq!(header_value(&o, "alpha"), "4.0");
    assert!((value(&o) - 0.3820184286093977).abs() < 1e-14);
}

#[test]
fn invalid_parameters_exit_2() {
    for args in [
        &["eval", "suc", "--p", "1.5"][..],
        &["eval", "suc", "--alpha", "2"],
        &["eval", "pdec", "--m", "5", "--k", "5", "--q", "4"],
        &["eval", "no-such-quantity"],
        &["simulate", "suc", "--radius", "3"],
    ] {
        let o = outage(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn unstable_alternating_sum_exits_4() {
    let o = outage(&["eval", "outex", "--n", "70"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("simulate"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("link.cfg");
    fs::write(&cfg, "# test link\nalpha = 3\np = 0.2   # trailing comment\nn = 3\n").unwrap();
    let path = cfg.to_str().unwrap();

    let from_file = outage(&["eval", "suc", "--config", path]);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    assert_eq!(header_value(&from_file, "alpha"), "3.0");
    assert_eq!(header_value(&from_file, "p"), "0.2");
    assert!(stdout(&from_file).contains(&format!("# config: {path}\n")));

    let overridden = outage(&["eval", "suc", "--config", path, "--p", "0.05"]);
    assert_eq!(header_value(&overridden, "p"), "0.05");
    assert_eq!(header_value(&overridden, "alpha"), "3.0");
    assert_eq!(header_value(&overridden, "n"), "3");
    assert!(value(&overridden) > value(&from_file));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "alpah = 3\n").unwrap();
    let o = outage(&["eval", "suc", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpah"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.csv");
    let o = outage(&["figure", "sir_mom", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# outage "));
    assert!(text.lines().any(|l| l.starts_with("alpha,")));
}

#[test]
fn figure_list_names_every_figure() {
    let o = outage(&["figure", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 11);
}

#[test]
fn single_replication_warns() {
    let o = outage(&["simulate", "suc", "--reps", "1", "--slots", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn forced_mismatch_fails_validation() {
    let o = outage(&["validate", "--reps", "60", "--slots", "40", "--force-mismatch"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn simulate_is_reproducible_for_fixed_seed() {
    let args = ["simulate", "outex", "--n", "1", "--seed", "11", "--reps", "40", "--slots", "60"];
    assert_eq!(stdout(&outage(&args)), stdout(&outage(&args)));
}
