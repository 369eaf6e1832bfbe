use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn patchkit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_patchkit"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn fig2_preset_conserves_energy_and_writes_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = patchkit(&["preset", "fig2", "--out", "f2"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("f2");
    let (header, rows) = read_csv(&dir.join("energy.csv"));
    assert_eq!(header, ["t", "kinetic", "potential", "total", "px", "py", "pz"]);
    let e0 = rows[0][3];
    let drift = rows.iter().map(|r| ((r[3] - e0) / e0).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-4, "energy drift {drift}");
    assert!((rows.last().unwrap()[0] - 3.0).abs() < 1e-12);

    let (header, _) = read_csv(&dir.join("trajectory.csv"));
    assert_eq!(header, ["t", "Tl", "Tc", "Tr", "ul", "vl", "wl", "uc", "vc", "wc", "ur", "vr", "wr"]);
    let (header, rows) = read_csv(&dir.join("snapshot_final.csv"));
    assert_eq!(header, ["atom", "x", "y", "z", "u", "v", "w"]);
    assert_eq!(rows.len(), 64);

    let m = manifest(&dir);
    assert_eq!(m["kind"], "isolated-md");
    assert_eq!(m["config"]["seed"], 1);
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    let files: Vec<&str> = m["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    for f in ["trajectory.csv", "energy.csv", "snapshot_final.csv"] {
        assert!(files.contains(&f), "{f} missing from manifest");
    }
    assert!(dir.join("plot.gp").exists());
    assert!(fs::read_dir(&dir).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".part")));
}

#[test]
fn same_seed_gives_identical_csv_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "md.json", r#"{"kind":"controlled-md","seed":7,"atoms":64,"mu":30,"t_end":0.4,"side":4.0}"#);
    for d in ["a", "b"] {
        assert!(patchkit(&["run", &cfg, "--out", d], tmp.path()).status.success());
    }
    for f in ["trajectory.csv", "energy.csv", "snapshot_final.csv"] {
        let a = fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between identical runs");
    }
    let c = patchkit(&["run", &cfg, "--out", "c", "--seed", "8"], tmp.path());
    assert!(c.status.success());
    assert_ne!(
        fs::read(tmp.path().join("a/trajectory.csv")).unwrap(),
        fs::read(tmp.path().join("c/trajectory.csv")).unwrap()
    );
    assert_eq!(manifest(&tmp.path().join("c"))["config"]["seed"], 8);
}

#[test]
fn optimal_mu_prints_the_three_optima() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "om.json", r#"{"kind":"optimal-mu"}"#);
    let out = patchkit(&["run", &cfg, "--out", "om"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("33.5"), "{text}");
    assert!(text.contains("0.02983"), "{text}");
    assert!(text.contains("29.0326"), "{text}");
    assert!(text.contains("= 24"), "{text}");
}

#[test]
fn presets_validate() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["fig2", "fig5", "fig8", "fig10"] {
        let printed = patchkit(&["preset", name, "--print"], tmp.path());
        assert!(printed.status.success());
        let file = write(tmp.path(), &format!("{name}.json"), &String::from_utf8(printed.stdout).unwrap());
        let v = patchkit(&["validate", &file], tmp.path());
        assert!(v.status.success(), "{name}: {}", String::from_utf8_lossy(&v.stderr));
        assert_eq!(String::from_utf8(v.stdout).unwrap().trim(), "ok");
    }
}

#[test]
fn validate_lists_cfl_and_alignment_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        r#"{"kind":"controlled-patch-pde","half_width":3.5,"macro_half_width":7,"n":100,"t_end":1,"dt":10}"#,
    );
    let out = patchkit(&["validate", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("multiple of 8"), "{err}");

    let cfg = write(
        tmp.path(),
        "cfl.json",
        r#"{"kind":"controlled-patch-pde","half_width":3.5,"macro_half_width":7,"n":64,"t_end":1,"dt":10}"#,
    );
    let out = patchkit(&["validate", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("stability"));

    let cfg = write(
        tmp.path(),
        "heat.json",
        r#"{"kind":"heat-reference","macro_half_width":7,"n":14,"t_end":1,"dt":5}"#,
    );
    assert_eq!(patchkit(&["validate", &cfg], tmp.path()).status.code(), Some(2));
}

#[test]
fn schema_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("noseed.json", r#"{"kind":"controlled-md","atoms":64,"mu":30}"#),
        ("unknown.json", r#"{"kind":"modes","half_width":1,"r":0.5,"mu":30,"count":2,"colour":"red"}"#),
        ("kind.json", r#"{"kind":"nope"}"#),
        ("syntax.json", "{"),
    ] {
        let cfg = write(tmp.path(), name, text);
        let out = patchkit(&["run", &cfg], tmp.path());
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
    assert_eq!(patchkit(&["preset", "fig99"], tmp.path()).status.code(), Some(2));
}

#[test]
fn io_errors_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(patchkit(&["run", "missing.json"], tmp.path()).status.code(), Some(4));
    fs::write(tmp.path().join("blocker"), "").unwrap();
    let cfg = write(tmp.path(), "om.json", r#"{"kind":"optimal-mu"}"#);
    assert_eq!(patchkit(&["run", &cfg, "--out", "blocker/sub"], tmp.path()).status.code(), Some(4));
}

#[test]
fn wall_clock_guard_aborts_with_exit_3_and_no_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "long.json", r#"{"kind":"controlled-md","seed":1,"atoms":343,"mu":30,"t_end":60}"#);
    let out = patchkit(&["run", &cfg, "--out", "long", "--max-wall", "0.2"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("wall-clock"));
    assert!(!tmp.path().join("long/trajectory.csv").exists());
    assert!(!tmp.path().join("long/manifest.json").exists());
}

#[test]
fn several_seeds_fan_out_into_subdirectories() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "seeds.json", r#"{"kind":"isolated-md","seeds":[3,4,5],"atoms":27,"t_end":0.2}"#);
    let out = patchkit(&["run", &cfg, "--out", "s", "--jobs", "2"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&tmp.path().join("s"));
    assert_eq!(m["results"]["runs"].as_array().unwrap().len(), 3);
    for s in [3, 4, 5] {
        assert!(tmp.path().join(format!("s/seed_{s}/trajectory.csv")).exists());
    }
    let single = write(tmp.path(), "one.json", r#"{"kind":"isolated-md","seed":4,"atoms":27,"t_end":0.2}"#);
    assert!(patchkit(&["run", &single, "--out", "one"], tmp.path()).status.success());
    assert_eq!(
        fs::read(tmp.path().join("s/seed_4/trajectory.csv")).unwrap(),
        fs::read(tmp.path().join("one/trajectory.csv")).unwrap()
    );
}

#[test]
fn continuum_and_analysis_kinds_write_their_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("heat.json", r#"{"kind":"heat-reference","macro_half_width":7,"n":28,"t_end":1,"output_interval":0.5}"#, "fields/field_0002.csv"),
        (
            "patch.json",
            r#"{"kind":"controlled-patch-pde","diffusivity":0.5,"half_width":3.5,"macro_half_width":7,"n":64,"t_end":2}"#,
            "equilibrium.csv",
        ),
        (
            "multi.json",
            r#"{"kind":"multipatch-pde","mu":24,"half_width":0.5,"spacing":1,"patches":8,"n":16,"t_end":0.2,"record_fields":true}"#,
            "fields/patch_08_0002.csv",
        ),
        ("modes.json", r#"{"kind":"modes","half_width":3.5,"r":0.5,"mu":30,"count":3}"#, "modes.csv"),
        ("sm.json", r#"{"kind":"slow-manifold","alpha":1,"mu":30,"r":1,"samples":11}"#, "fields.csv"),
    ];
    for (name, text, expect) in cases {
        let cfg = write(tmp.path(), name, text);
        let dir = name.trim_end_matches(".json");
        let out = patchkit(&["run", &cfg, "--out", dir], tmp.path());
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(tmp.path().join(dir).join(expect).exists(), "{name}: {expect} missing");
    }
    let mut r = csv::Reader::from_path(tmp.path().join("modes/modes.csv")).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["symmetry", "branch", "k", "kh", "lambda"]);
    assert_eq!(r.records().count(), 6);

    let (_, rows) = read_csv(&tmp.path().join("multi/amplitudes.csv"));
    assert_eq!(rows[0].len(), 9);

    let stencil = fs::read_to_string(tmp.path().join("sm/stencil.csv")).unwrap();
    let a_adv: f64 = stencil.lines().find(|l| l.starts_with("a_adv,")).unwrap()[6..].parse().unwrap();
    assert!((a_adv - 0.515_109_890_1).abs() < 1e-8);
}

#[test]
fn estimate_k_without_seeds_reports_the_heuristic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "k.json", r#"{"kind":"estimate-k","half_width":3.5}"#);
    let out = patchkit(&["run", &cfg, "--out", "k"], tmp.path());
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("0.551638"));
}
