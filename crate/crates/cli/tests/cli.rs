use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfstep")).args(args).output().expect("binary runs")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.display().to_string()
}

fn interval() -> Value {
    json!({
        "cells": [{"id": "a", "dim": 0}, {"id": "b", "dim": 0}, {"id": "e", "dim": 1}],
        "covers": [["a", "e"], ["b", "e"]]
    })
}

#[test]
fn space_files_load_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "seg.json", &interval());
    let o = run(&["sections", "--space", &space]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(report(&o)["sections"], json!({"0": {"rank": 1, "torsion": []}}));

    let out = dir.path().join("t");
    let o = run(&["truncate", "--space", &space, "--sheaf", "sky@e", "--cut", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let copy: Value = serde_json::from_str(&fs::read_to_string(out.join("lower.space.json")).unwrap()).unwrap();
    assert_eq!(copy, interval());
    // The written sheaf loads again, against its own copy of the space.
    let lower = out.join("lower.json");
    let o = run(&["membership", "--sheaf", lower.to_str().unwrap(), "--cut", "0", "--side", "le"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&lower).unwrap();
    let o = run(&["dual", "--sheaf", lower.to_str().unwrap(), "--out", dir.path().join("d.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&lower).unwrap(), text);
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = json!({"cells": [{"id": "a", "dim": 1}, {"id": "e", "dim": 1}], "covers": [["a", "e"]]});
    let space = write(dir.path(), "bad.json", &bad);
    let o = run(&["sections", "--space", &space]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("(a, e)"), "{}", stderr(&o));

    let cx = json!({"lo": 0, "ranks": [1, 1, 1], "diffs": [[[1]], [[1]]]});
    let p = write(dir.path(), "cx.json", &cx);
    let o = run(&["dual", "--sheaf", &p]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("degree 0"), "{}", stderr(&o));

    let o = run(&["membership", "--space", "circle", "--sheaf", "sky@nowhere", "--cut", "0"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["membership", "--space", "circle", "--cut", "x/y"])), 2);
    assert_eq!(code(&run(&["truncate", "--space", "circle", "--cut", "0", "--flavor", "lt-gt"])), 2);
    assert_eq!(code(&run(&["example", "nope"])), 2);
}

#[test]
fn membership_reports() {
    let o = run(&["membership", "--space", "rp3-cone", "--cut", "2"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["sides"][0]["member"], json!(true));
    assert_eq!(r["sides"][1]["member"], json!(true));

    let o = run(&["membership", "--space", "circle", "--cut", "1/4", "--side", "le"]);
    assert_eq!(code(&o), 1);
    let w = &report(&o)["sides"][0]["witnesses"][0];
    assert_eq!(w["dim"], json!(1));
    assert_eq!(w["probe"], json!("stalk"));
    assert_eq!(w["degree"], json!(0));

    let o = run(&["membership", "--space", "point", "--sheaf", "constant:Z/2", "--cut", "-1/2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn module_complexes() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "z2.json", &json!({"lo": -1, "ranks": [1, 1], "diffs": [[[2]]]}));
    let out = dir.path().join("dual.json");
    let o = run(&["dual", "--sheaf", &p, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["stalks"]["0"], json!({"1": {"rank": 0, "torsion": [2]}}));
    let d: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(d.get("ranks").is_some());
    let o = run(&["membership", "--sheaf", &p, "--cut", "-1/2"]);
    assert_eq!(code(&o), 0);
    let o = run(&["membership", "--sheaf", &p, "--cut", "0", "--side", "ge"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn value_form_sheaves() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "seg.json", &interval());
    let z = json!({"lo": 0, "ranks": [1]});
    let v = json!({
        "base": "seg",
        "values": {"a": z, "b": z, "e": z},
        "maps": [
            {"face": "a", "coface": "e", "mats": [[[1]]]},
            {"face": "b", "coface": "e", "mats": [[[1]]]}
        ]
    });
    let p = write(dir.path(), "const.json", &v);
    let o = run(&["sections", "--sheaf", &p]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(report(&o)["sections"], json!({"0": {"rank": 1, "torsion": []}}));
}

#[test]
fn truncations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("jz");
    let o = run(&["truncate", "--space", "rp3-cone", "--sheaf", "jshriek@c", "--cut", "2", "--flavor", "lt-ge", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["triangle"]["ok"], json!(true));
    assert_eq!(r["lower_stalks"], json!({"c": {"1": {"rank": 1, "torsion": []}}}));
    for f in ["lower.json", "upper.json", "triangle.json"] {
        assert!(out.join(f).is_file());
    }
    let lower: Value = serde_json::from_str(&fs::read_to_string(out.join("lower.json")).unwrap()).unwrap();
    assert_eq!(lower["base"], json!("rp3-cone"));

    // Already on the left of the cut: the upper part is zero.
    let out = dir.path().join("left");
    let o = run(&["truncate", "--space", "circle", "--cut", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["upper_stalks"], json!({}));
    let upper: Value = serde_json::from_str(&fs::read_to_string(out.join("upper.json")).unwrap()).unwrap();
    assert!(upper["generators"].as_array().unwrap().iter().all(|g| g.as_array().unwrap().is_empty()));

    let o = run(&["truncate", "--space", "circle", "--sheaf", "constant+sky@0:Z/2", "--cut", "0"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["lower_stalks"], json!({"0": {"0": {"rank": 0, "torsion": [2]}}}));
    assert_eq!(r["upper_stalks"].as_object().unwrap().len(), 6);
}

#[test]
fn sections_over_regions() {
    let o = run(&["sections", "--space", "rp3-cone", "--over", "minus:c"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["sections"]["2"], json!({"rank": 0, "torsion": [2]}));
    assert_eq!(r["sections"]["3"], json!({"rank": 1, "torsion": []}));
    let o = run(&["sections", "--space", "circle"]);
    let r = report(&o);
    assert_eq!(r["sections"], r["compact"]);
    assert_eq!(code(&run(&["sections", "--space", "circle", "--over", "half"])), 2);
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--space", "interval", "--samples", "50", "--seed", "1", "--grid", "-2:2:1/4"];
    let a = run(&args);
    assert_eq!(code(&a), 0);
    let r = report(&a);
    assert_eq!(r["failures"], json!([]));
    assert!(r["checks"].as_object().unwrap().len() > 5);
    assert_eq!(a.stdout, run(&args).stdout);

    let o = run(&["verify", "--space", "circle", "--samples", "0"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["checks"], json!({}));
    assert_eq!(r["failures"], json!([]));
}

#[test]
fn worked_example() {
    let o = run(&["example", "rp3-cone"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(!text.contains("FAIL"));
    assert!(text.contains("25 of 25 match"), "{text}");
}
