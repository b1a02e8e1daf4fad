use std::process::{Command, Output};

fn tempus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tempus"))
        .args(args)
        .output()
        .expect("tempus runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_names_experiments_and_anchors() {
    let o = tempus(&["list"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for needle in [
        "MT-ur",
        "p-pov",
        "HU-clock-ur",
        "time-povm",
        "prep-ur",
        "hauser",
    ] {
        assert!(s.contains(needle), "missing {needle}");
    }
}

#[test]
fn list_json_is_one_object_per_line() {
    let o = tempus(&["list", "--json"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o)
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["name"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert!(names.contains(&"chopper".to_string()));
    assert!(names.contains(&"abm".to_string()));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["run", "nope"][..],
        &["run", "mt", "--bogus", "1"],
        &["run", "mt", "--dim", "2.5"],
        &["run", "mt", "--dim"],
        &["run", "mt", "--sweep", "dim=0..1:log"],
        &["run", "chopper", "--topen", "2"],
        &["run", "chopper", "--preset", "nope"],
        &["verify", "--group", "nope"],
        &["frobnicate"],
    ] {
        let o = tempus(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn run_is_deterministic_and_writes_tables() {
    let dir = std::env::temp_dir().join(format!("tempus-cli-test-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    let a = tempus(&["run", "mt", "--count", "20", "--seed", "7"]);
    let b = tempus(&["run", "mt", "--count", "20", "--seed", "7", "--out", d]);
    assert!(a.status.success() && b.status.success());
    let reports = std::fs::read_to_string(dir.join("mt_reports.csv")).unwrap();
    assert_eq!(reports, stdout(&a));
    assert_eq!(reports.lines().count(), 22);
    assert!(
        dir.join("mt.csv").exists()
            && dir.join("mt.gp").exists()
            && dir.join("mt_summary.csv").exists()
    );
    let c = tempus(&["run", "mt", "--count", "20", "--seed", "8"]);
    assert_ne!(stdout(&a), stdout(&c));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn sweep_and_jsonl() {
    let dir = std::env::temp_dir().join(format!("tempus-sweep-test-{}", std::process::id()));
    let o = tempus(&[
        "run",
        "clock",
        "--sweep",
        "n=2,4,8",
        "--format",
        "jsonl",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(dir.join("clock_summary.jsonl")).unwrap();
    let rows: Vec<serde_json::Value> = summary
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 3);
    // ladder of n levels with spacing omega orthogonalises after 2 pi / (n omega)
    for r in &rows {
        let n = r["n"].as_f64().unwrap();
        let dt = r["delta_t"].as_f64().unwrap();
        assert!((dt - 2.0 * std::f64::consts::PI / (2.0 * n)).abs() < 1e-9);
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn preset_reaches_the_chopper() {
    let o = tempus(&["run", "chopper", "--preset", "hauser", "--panels", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with("true,true")));
}

#[test]
fn verify_single_group() {
    let o = tempus(&["verify", "--group", "mt", "--format", "jsonl"]);
    assert!(o.status.success());
    for l in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["group"], "mt");
        assert_eq!(v["pass"], true);
    }
}
