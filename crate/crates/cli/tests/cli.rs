use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn maxbid(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxbid")).current_dir(dir).args(args).output().unwrap()
}

fn with_config(text: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("scenario.cfg"), text).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const FULL_PAIR: &str = "game = auction\nstate = 7,5\nplayers = maxbid(window=full)\nhorizon = 100\n";

#[test]
fn run_writes_trace_and_summary() {
    let dir = with_config(FULL_PAIR);
    let o = maxbid(dir.path(), &["run", "--config", "scenario.cfg", "--out", "out"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = fs::read_to_string(dir.path().join("out/trace.csv")).unwrap();
    let rows: Vec<&str> = trace.lines().take(7).collect();
    assert_eq!(
        rows,
        [
            "round,bid_1,bid_2,winning_bid,winner_count,payoff_1,payoff_2",
            "1,1,1,1,2,3,2",
            "2,2,2,2,2,5/2,3/2",
            "3,3,3,3,2,2,1",
            "4,4,4,4,2,3/2,1/2",
            "5,5,4,5,1,2,0",
            "6,5,4,5,1,2,0",
        ]
    );
    let summary = json(&dir.path().join("out/summary.json"));
    assert_eq!(summary["classification"]["kind"], "absorbed");
    assert_eq!(summary["classification"]["since"], 5);
    assert_eq!(summary["players"][0]["longrun"], "2");
    assert_eq!(summary["players"][1]["longrun"], "0");
    assert_eq!(summary["players"][0]["exact_longrun"], true);
    assert_eq!(serde_json::from_str::<serde_json::Value>(&stdout(&o)).unwrap(), summary);
}

#[test]
fn prefix_composed_run_switches_after_one_round() {
    let dir = with_config(
        "game = auction\nstate = 7,3\nplayer.1 = compose(constant(2), maxbid(window=full), 1)\n\
         player.2 = compose(constant(5), maxbid(window=full), 1)\nhorizon = 20\n",
    );
    let o = maxbid(dir.path(), &["run", "--config", "scenario.cfg", "--out", "."]);
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let bids: Vec<String> = trace.lines().skip(1).take(4).map(|l| l.split(',').take(3).collect::<Vec<_>>().join(",")).collect();
    assert_eq!(bids, ["1,2,5", "2,6,2", "3,6,2", "4,6,2"]);
}

#[test]
fn horizon_one_gives_a_single_undetermined_row() {
    let dir = with_config(FULL_PAIR);
    let o = maxbid(dir.path(), &["run", "--config", "scenario.cfg", "--horizon", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(dir.path().join("trace.csv")).unwrap().lines().count(), 2);
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["classification"]["kind"], "undetermined");
    assert_eq!(summary["players"][0]["exact_longrun"], false);
}

#[test]
fn config_errors_report_line_and_column() {
    let dir = with_config("game = auction\nstate = 7,5\n  colour = red\n");
    let o = maxbid(dir.path(), &["run", "--config", "scenario.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3, column 3"), "{}", stderr(&o));
    assert!(stderr(&o).contains("unknown key"));
}

#[test]
fn out_of_range_bids_abort_with_round_and_player() {
    let dir = with_config("game = auction\nstate = 3,2\nplayer.1 = constant(1)\nplayer.2 = periodic(1,2;4)\nhorizon = 10\n");
    let o = maxbid(dir.path(), &["run", "--config", "scenario.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("round 3: player 2"), "{}", stderr(&o));
    assert!(!dir.path().join("trace.csv").exists());
}

#[test]
fn window_one_pair_is_not_a_learning_equilibrium() {
    let dir = with_config("game = auction\nstate = 7,5\nplayers = maxbid(window=const(1))\ncheck = le\nfamily = witnesses\nhorizon = 1000\n");
    let o = maxbid(dir.path(), &["verify", "--config", "scenario.cfg"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let v = json(&dir.path().join("verdict.json"));
    assert_eq!(v["pass"], false);
    let rows = v["rows"].as_array().unwrap();
    let witness = rows.iter().find(|r| r["player"] == 2).unwrap();
    assert_eq!(witness["deviation"], "periodic(;1,1,3)");
    assert_eq!(witness["deviated"], "2/3");
    assert_eq!(witness["violation"], true);
}

#[test]
fn ex21_pair_fails_after_an_n_round() {
    let dir = with_config(
        "game = matrix\nstates = A; B\nplayers = ex21\ncheck = robust\nprefixes = (constant(n), constant(n))\nhorizon = 100\n",
    );
    let o = maxbid(dir.path(), &["verify", "--config", "scenario.cfg"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let v = json(&dir.path().join("verdict.json"));
    let violations: Vec<_> = v["rows"].as_array().unwrap().iter().filter(|r| r["violation"] == true).collect();
    assert!(violations.iter().any(|r| r["state"] == "A" && r["player"] == 1 && r["gain"] == "1"), "{violations:?}");
}

#[test]
fn identity_only_failure_check_equals_the_robust_check() {
    let base = "game = auction\nstates = 7,5; 4,4\nplayers = maxbid(window=full)\nprefixes = constants\nprefix_rounds = 1,2\nhorizon = 200\n";
    let dir = with_config(&format!("{base}check = robust\n"));
    fs::write(dir.path().join("f.cfg"), format!("{base}check = f_robust\nschedules = identity\n")).unwrap();
    let robust = maxbid(dir.path(), &["verify", "--config", "scenario.cfg", "--out", "r"]);
    let f = maxbid(dir.path(), &["verify", "--config", "f.cfg", "--out", "f"]);
    assert_eq!(robust.status.code(), f.status.code());
    assert_eq!(json(&dir.path().join("r/verdict.json")), json(&dir.path().join("f/verdict.json")));
}

#[test]
fn sweep_tabulates_every_state() {
    let dir = with_config("game = auction\nstates = all(n=2, m=2..3)\nplayers = maxbid(window=full)\nhorizon = 100\n");
    let o = maxbid(dir.path(), &["sweep", "--config", "scenario.cfg"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 5);
    assert!(table.lines().skip(1).all(|l| l.contains("absorbed")));
}

#[test]
fn reproductions_pass_and_mismatches_name_the_round() {
    let dir = tempfile::tempdir().unwrap();
    for id in ["2.1", "3.5", "3.6", "3.7", "eq2-sweep"] {
        let o = maxbid(dir.path(), &["reproduce", id]);
        assert!(o.status.success(), "{id}: {}", stderr(&o));
        assert!(stdout(&o).starts_with(&format!("reproduce {id}: PASS")));
    }
    let o = maxbid(dir.path(), &["reproduce", "3.5", "--horizon", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("round 4"), "{}", stderr(&o));
    let o = maxbid(dir.path(), &["reproduce", "9.9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_are_validated() {
    let dir = with_config(FULL_PAIR);
    for args in [["--floor", "3"], ["--tolerance", "half"], ["--horizon", "0"]] {
        let o = maxbid(dir.path(), &["run", "--config", "scenario.cfg", args[0], args[1]]);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}
