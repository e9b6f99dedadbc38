use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use aeset::io::state_set_from_json;
use aeset::RunSeed;

fn aeset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aeset"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn amin_table_for_32() {
    let o = aeset(&["amin-table", "--d", "32"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let parts: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(parts, ["2x16", "4x8", "2x2x8", "2x4x4", "2x2x2x4", "2x2x2x2x2", "all"]);
    let ns: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(ns, ["18", "12", "11", "9", "8", "7", "18"]);
    let j = json(&aeset(&["amin-table", "--d", "32", "--json"]));
    assert_eq!(j["all_n"], 18);
}

#[test]
fn construct_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("eq1.json");
    let o = aeset(&["construct", "theorem4", "--partition", "2x2", "--a", "0.9", "--out", p(&f)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let set = state_set_from_json(&fs::read_to_string(&f).unwrap(), false).unwrap();
    assert_eq!(set.len(), 4);
    // the construction is written next to its manifest
    assert!(dir.path().join("eq1.json.manifest.json").exists());

    let j = json(&aeset(&["check", "--states", p(&f)]));
    assert_eq!(j["criterion"]["detected"], true);
    assert_eq!(j["aes"], true);
    assert!((j["criterion"]["L"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn construct_round_trip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("haar.json");
    let o = aeset(&["construct", "haar", "--dim", "6", "--n", "3", "--seed", "9", "--out", p(&f)]);
    assert!(o.status.success());
    let parsed = state_set_from_json(&fs::read_to_string(&f).unwrap(), false).unwrap();
    let direct = aeset::haar::haar_random_state_set(6, 3, RunSeed::new(9, 0)).unwrap();
    assert_eq!(parsed, direct);
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(&f, "{\"d\": 4,\n \"states\": [[[1, 0] [0, 0]]]}").unwrap();
    let o = aeset(&["check", "--states", p(&f)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(aeset(&["amin-table"]).status.code(), Some(2));
    assert_eq!(aeset(&["amin-table", "--d", "7"]).status.code(), Some(2));
    assert_eq!(aeset(&["construct", "eq1", "--c", "1.5"]).status.code(), Some(2));
    assert_eq!(aeset(&["volume", "--partition", "2y2", "--n", "4", "--samples", "1"]).status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3() {
    let o = aeset(&["construct", "theorem2", "--n", "5", "--a", "0.5", "--seed", "1", "--tol", "3.5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_seed_is_generated_and_printed() {
    let o = aeset(&["construct", "haar", "--dim", "4", "--n", "2"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("seed: "));
}

#[test]
fn volume_manifest_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let csv = dir.path().join("sweep.csv");
    let args = [
        "volume", "--partition", "2x2", "--n", "4", "--samples", "2000", "--seed", "3", "--method",
        "lower", "--csv", p(&csv), "--out", p(&out),
    ];
    assert!(aeset(&args).status.success());
    assert!(aeset(&args).status.success());
    let rows = fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 3);
    assert!(rows.starts_with("partition,N,samples"));

    let manifest = dir.path().join("v.json.manifest.json");
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["seed"], 3);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
    let r = aeset(&["replay", p(&manifest)]);
    assert!(r.status.success(), "{}", stdout(&r));
    assert_eq!(json(&r)["match"], true);

    // tampering with the recorded digest is detected
    let tampered = m.to_string().replace(m["outputs"][0]["sha256"].as_str().unwrap(), &"0".repeat(64));
    let bad = dir.path().join("bad.manifest.json");
    fs::write(&bad, tampered).unwrap();
    assert_eq!(aeset(&["replay", p(&bad)]).status.code(), Some(3));
}

#[test]
fn volume_independent_of_workers() {
    let run = |w: &str| {
        json(&aeset(&[
            "volume", "--partition", "2x2", "--n", "4", "--samples", "3000", "--seed", "11", "--method",
            "lower", "--workers", w,
        ]))
    };
    assert_eq!(run("1")["detected"], run("4")["detected"]);
}

#[test]
fn minimize_and_disentangle() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("three.json");
    assert!(aeset(&["construct", "haar", "--dim", "4", "--n", "3", "--seed", "5", "--out", p(&f)]).status.success());
    let j = json(&aeset(&["minimize", "--states", p(&f), "--partition", "2x2", "--seed", "1"]));
    assert!(j["min_total_entropy"].as_f64().unwrap() < 1e-11);
    assert_eq!(j["classified_aes"], false);
    assert_eq!(j["best_params"].as_array().unwrap().len(), 16);

    let u = dir.path().join("u.json");
    let j = json(&aeset(&["disentangle", "--states", p(&f), "--partition", "2x2", "--unitary-out", p(&u)]));
    assert!(j["max_residual"].as_f64().unwrap() < 1e-10);
    let unitary = aeset::io::unitary_from_json(&fs::read_to_string(&u).unwrap()).unwrap();
    assert_eq!(unitary.dim(), 4);
}

#[test]
fn critical_a_for_n5() {
    let j = json(&aeset(&["critical-a", "--family", "n5", "--subsets", "0,1,2,3;0,1,2,4"]));
    let per = j["search"]["per_subset"].as_array().unwrap();
    assert!((per[0]["critical"].as_f64().unwrap() - 0.5).abs() < 0.005);
    assert!((per[1]["critical"].as_f64().unwrap() - 0.82).abs() < 0.005);
    assert_eq!(aeset(&["critical-a", "--family", "n5", "--subsets", "0,1,2"]).status.code(), Some(2));
}
