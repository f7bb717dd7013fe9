use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mutlab"))
}

/// A fresh fixture directory for each test.
fn fixtures() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fixtures");
    let out = bin().args(["make-fixtures", "--out"]).arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (dir, path)
}

fn run(args: &[&str], fixtures: &Path) -> Output {
    bin().args(args).env("MUTLAB_FIXTURES", fixtures).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn statuses(report: &Value) -> Vec<(String, String)> {
    report["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["claim"].as_str().unwrap().to_string(), r["status"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn h1_of_the_tau_mapping_torus() {
    let (_d, fx) = fixtures();
    let out = run(&["h1", "--presentation", "maptorus_tau.json"], &fx);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    assert_eq!(compact, r#"{"torsion":[2,2,2,2],"free_rank":1}"#);
}

#[test]
fn missing_and_malformed_inputs_exit_2() {
    let (d, fx) = fixtures();
    assert_eq!(run(&["h1", "--presentation", "missing.json"], &fx).status.code(), Some(2));
    let bad = d.path().join("bad.json");
    std::fs::write(&bad, "{\"name\": \"x\", \"generators\": [\"a b\"], \"relators\": []}").unwrap();
    assert_eq!(run(&["h1", "--presentation", bad.to_str().unwrap()], &fx).status.code(), Some(2));
    let out = run(&["solve", "--presentation", "surface.json", "--family", "e8"], &fx);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["path-check", "--grid", "1"], &fx).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"], &fx).status.code(), Some(2));
    let out = run(&["mutate", "--splitting", "splitting_i0.json", "--rep", "rep_r167_0.json"], &fx);
    assert_eq!(out.status.code(), Some(2), "rep of another splitting is rejected");
}

#[test]
fn fixtures_are_complete_and_reproducible() {
    let (d, fx) = fixtures();
    let names: Vec<String> =
        std::fs::read_dir(&fx).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    for n in [
        "surface.json",
        "maptorus_tau.json",
        "seifert_2_2_2_2_2_2_e-3.json",
        "brieskorn_2_3_5.json",
        "brieskorn_2_3_7.json",
        "brieskorn_2_3_11.json",
        "splitting_i0.json",
        "random_splittings.json",
        "index.json",
    ] {
        assert!(names.iter().any(|x| x == n), "{n} missing");
    }
    let tau: Value = serde_json::from_str(&std::fs::read_to_string(fx.join("maptorus_tau.json")).unwrap()).unwrap();
    assert_eq!(tau["generators"].as_array().unwrap().len(), 5);
    assert_eq!(tau["relators"].as_array().unwrap().len(), 5);
    let again = d.path().join("again");
    assert!(bin().args(["make-fixtures", "--out"]).arg(&again).output().unwrap().status.success());
    for n in &names {
        assert_eq!(std::fs::read(fx.join(n)).unwrap(), std::fs::read(again.join(n)).unwrap(), "{n}");
    }
}

#[test]
fn euler_class_and_oracle() {
    let (_d, fx) = fixtures();
    let out = run(&["euler-class", "--presentation", "maptorus_tau.json"], &fx);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["summary"]["euler_class"], -3);
    let e2 = run(&["euler-class", "--presentation", "seifert_2_2_2_2_2_2_e-1.json"], &fx);
    assert_eq!(e2.status.code(), Some(1), "e = -1 and e = -5 share H1, so the scan is not unique");
    let out = run(&["oracle-count", "--presentation", "brieskorn_2_3_5.json", "--restarts", "1000"], &fx);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["summary"]["rotation_number_count"], 2);
    assert_eq!(statuses(&r), vec![("SU2-ORACLE".to_string(), "pass".to_string())]);
    let out = run(&["oracle-count", "--multiplicities", "2,4,5", "--no-solve"], &fx);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_writes_class_records() {
    let (d, fx) = fixtures();
    let classes = d.path().join("classes.json");
    let out = run(
        &["solve", "--presentation", "brieskorn_2_3_7.json", "--family", "su2", "--restarts", "500", "--out", classes.to_str().unwrap()],
        &fx,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["summary"]["irreducible"], 2);
    let recs: Value = serde_json::from_str(&std::fs::read_to_string(&classes).unwrap()).unwrap();
    let recs = recs.as_array().unwrap();
    assert_eq!(recs.len(), 3);
    for r in recs {
        assert!(r["residual"].as_f64().unwrap() <= 1e-8);
        assert_eq!(r["representative"]["family"], "su2");
    }
}

#[test]
fn su3_solve_of_sigma_2_3_7() {
    let (d, fx) = fixtures();
    let classes = d.path().join("su3.json");
    let out = run(
        &["solve", "--presentation", "brieskorn_2_3_7.json", "--family", "su3", "--out", classes.to_str().unwrap()],
        &fx,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["summary"]["irreducible"], 4);
    assert_eq!(statuses(&report), vec![("BODEN-SU3".to_string(), "pass".to_string())]);
    let orbits = run(&["su3-orbits", "--classes", classes.to_str().unwrap()], &fx);
    assert_eq!(orbits.status.code(), Some(0));
    let o = json(&orbits);
    assert_eq!(o["summary"]["orbits"]["fixed"].as_array().unwrap().len(), 2);
    assert_eq!(o["summary"]["orbits"]["swapped"].as_array().unwrap().len(), 1);
}

#[test]
fn mutate_then_z_order() {
    let (d, fx) = fixtures();
    let result = d.path().join("m.json");
    let out = run(
        &["mutate", "--splitting", "splitting_r167.json", "--rep", "rep_r167_0.json", "--out", result.to_str().unwrap()],
        &fx,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        statuses(&json(&out)),
        vec![
            ("EXTENSION-COUNT".to_string(), "pass".to_string()),
            ("MUTATION-INVOLUTION".to_string(), "pass".to_string())
        ]
    );
    let z = run(&["z-order", "--result", result.to_str().unwrap()], &fx);
    assert_eq!(z.status.code(), Some(0));
    let r = json(&z);
    assert!(r["records"][0]["residuals"]["so3_trace_gap"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn reducible_mutation_is_flagged_and_z_order_fails() {
    let (d, fx) = fixtures();
    let rep = d.path().join("trivial.json");
    let q = [1.0, 0.0, 0.0, 0.0];
    let body = serde_json::json!({ "family": "su2", "assignments": { "x": q, "y": q, "u": q, "v": q }, "residual": 0.0 });
    std::fs::write(&rep, body.to_string()).unwrap();
    let result = d.path().join("m.json");
    let out = run(
        &["mutate", "--splitting", "splitting_i0.json", "--rep", rep.to_str().unwrap(), "--out", result.to_str().unwrap()],
        &fx,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(statuses(&json(&out))[0], ("EXTENSION-COUNT".to_string(), "flag".to_string()));
    assert_eq!(run(&["z-order", "--result", result.to_str().unwrap()], &fx).status.code(), Some(1));
}

#[test]
fn symmetry_path_and_h1_reports_cover_the_registry() {
    let (_d, fx) = fixtures();
    let mut claims = std::collections::BTreeSet::new();
    let path = run(&["path-check", "--grid", "101"], &fx);
    assert_eq!(path.status.code(), Some(0));
    let first = String::from_utf8(path.stdout.clone()).unwrap();
    let again = run(&["path-check", "--grid", "101"], &fx);
    assert_eq!(first, String::from_utf8(again.stdout).unwrap(), "reports are byte-identical");
    assert_eq!(statuses(&json(&path)), vec![("PATH-CHECK".to_string(), "flag".to_string())]);
    let sym = run(&["verify-symmrep", "--samples", "100", "--seed", "4"], &fx);
    assert_eq!(sym.status.code(), Some(0));
    for out in [&path, &sym] {
        for (c, s) in statuses(&json(out)) {
            assert_ne!(s, "fail");
            claims.insert(c);
        }
    }
    let d = tempfile::tempdir().unwrap();
    let h1_report = d.path().join("h1.json");
    let split = run(&["h1", "--splitting", "splitting_r167.json", "--out", h1_report.to_str().unwrap()], &fx);
    assert_eq!(split.status.code(), Some(0));
    let h: Value = serde_json::from_slice(&split.stdout).unwrap();
    assert_eq!(h["wtau"]["free_rank"], 1);
    assert_eq!(h["amalgam_tau"]["torsion"].as_array().unwrap().len(), 0);
    let h1_report: Value = serde_json::from_str(&std::fs::read_to_string(&h1_report).unwrap()).unwrap();
    for (c, s) in statuses(&h1_report) {
        assert_eq!(s, "pass");
        claims.insert(c);
    }
    let regenerated = d.path().join("fx");
    for args in [
        &["make-fixtures", "--out", regenerated.to_str().unwrap()][..],
        &["euler-class", "--presentation", "maptorus_tau.json"][..],
        &["oracle-count", "--multiplicities", "2,3,7", "--restarts", "300"][..],
        &["solve", "--presentation", "brieskorn_2_3_7.json", "--family", "su3", "--restarts", "1500", "--seed", "1"][..],
    ] {
        let out = run(args, &fx);
        for (c, _) in statuses(&json(&out)) {
            claims.insert(c);
        }
    }
    let m = d.path().join("m.json");
    let out = run(&["mutate", "--splitting", "splitting_i0.json", "--rep", "rep_i0_0.json", "--out", m.to_str().unwrap()], &fx);
    for (c, _) in statuses(&json(&out)) {
        claims.insert(c);
    }
    let expected = [
        "TAU-RELATOR",
        "SYMMREP-TRACE",
        "F2-CONJUGATOR",
        "H1-MAPTORUS",
        "WTAU-H1",
        "EXTENSION-COUNT",
        "SU2-ORACLE",
        "BODEN-SU3",
        "HEEGAARD-INVARIANCE",
        "PATH-CHECK",
        "MUTATION-INVOLUTION",
    ];
    for c in expected {
        assert!(claims.contains(c), "{c} missing from every report");
    }
}
