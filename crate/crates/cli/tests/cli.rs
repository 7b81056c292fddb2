use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"{
  "surface": {"kind": "schottky", "generators": [{"lambda": 3.0, "angle": 0.0}, {"lambda": 3.0, "angle": 1.5707963267948966}]},
  "connections": {
    "trivial": {"rank": 2},
    "flat": {"rank": 2, "rep": "random"},
    "gauged": {"base": "flat", "gauges": [{"center": [0.0, 1.0], "radius": 0.3}]},
    "perturbed": {"base": "flat", "bumps": [{"center": [0.0, 1.0], "radius": 0.5, "scale": 0.05}]}
  },
  "run": {"max_word_len": 3, "ode_steps_per_unit": 128, "seed": 5}
}"#;

fn lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy-lab"))
        .arg("--config")
        .arg(dir.join("lab.json"))
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn setup(config: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("lab.json"), config).unwrap();
    dir
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn enumerate_writes_json_and_csv() {
    let dir = setup(CONFIG);
    let out = lab(dir.path(), &["enumerate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("out/classes.json"));
    // 4 + 4 + 8 primitive classes up to length 3
    assert_eq!(v["classes"].as_array().unwrap().len(), 16);
    let csv = std::fs::read_to_string(dir.path().join("out/classes.csv")).unwrap();
    assert_eq!(csv.lines().count(), 17);
}

#[test]
fn bad_input_exits_2() {
    let dir = setup(r#"{"surface": {"kind": "schottky"}, "connections": {}, "bogus": 1}"#);
    assert_eq!(lab(dir.path(), &["enumerate"]).status.code(), Some(2));
    let dir = setup(CONFIG);
    assert_eq!(lab(dir.path(), &["trace-map", "missing"]).status.code(), Some(2));
    assert_eq!(lab(dir.path(), &["--oracle", "trace-map", "perturbed"]).status.code(), Some(2));
    assert_eq!(lab(dir.path(), &["--threads", "0", "enumerate"]).status.code(), Some(2));
    let none = tempfile::tempdir().unwrap();
    assert_eq!(lab(none.path(), &["enumerate"]).status.code(), Some(2));
}

#[test]
fn gauge_pair_is_equivalent_and_bump_is_not() {
    let dir = setup(CONFIG);
    let out = lab(dir.path(), &["compare", "flat", "gauged"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&dir.path().join("out/compare.json"))["equivalent"], true);
    let out = lab(dir.path(), &["compare", "flat", "perturbed"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&dir.path().join("out/compare.json"))["equivalent"], false);
}

#[test]
fn ode_matches_oracle_file_and_mismatched_keys_exit_3() {
    let dir = setup(CONFIG);
    assert!(lab(dir.path(), &["trace-map", "flat"]).status.success());
    assert!(lab(dir.path(), &["--oracle", "trace-map", "flat"]).status.success());
    let (ode, oracle) = (dir.path().join("out/trace_map_flat.json"), dir.path().join("out/trace_map_flat.oracle.json"));
    let out = lab(dir.path(), &["compare", "--files", ode.to_str().unwrap(), oracle.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let short = setup(&CONFIG.replace("\"max_word_len\": 3", "\"max_word_len\": 2"));
    assert!(lab(short.path(), &["trace-map", "flat"]).status.success());
    let other = short.path().join("out/trace_map_flat.json");
    let out = lab(dir.path(), &["compare", "--files", ode.to_str().unwrap(), other.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_flag_changes_the_random_representation() {
    let dir = setup(CONFIG);
    let read = |args: &[&str]| {
        assert!(lab(dir.path(), args).status.success());
        std::fs::read(dir.path().join("out/trace_map_flat.oracle.json")).unwrap()
    };
    let a = read(&["--oracle", "trace-map", "flat"]);
    let b = read(&["--oracle", "trace-map", "flat"]);
    let c = read(&["--oracle", "--seed", "6", "trace-map", "flat"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn trivial_connection_has_constant_traces() {
    let dir = setup(CONFIG);
    assert!(lab(dir.path(), &["trace-map", "trivial"]).status.success());
    let v = json(&dir.path().join("out/trace_map_trivial.json"));
    for c in v["classes"].as_array().unwrap() {
        assert_eq!(c["trace"][0].as_f64(), Some(2.0));
        assert_eq!(c["trace"][1].as_f64(), Some(0.0));
    }
}
