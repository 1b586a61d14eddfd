use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nfkit(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nfkit"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("NFKIT_THREADS", t),
        None => cmd.env_remove("NFKIT_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = nfkit(args, None);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn header(csv: &str) -> &str {
    csv.lines().next().unwrap()
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"))
}

fn assert_valid(schema: &str, doc: &str) {
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(schema_path(schema)).unwrap()).unwrap();
    let doc: serde_json::Value = serde_json::from_str(doc).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(&doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    panic!("{schema}: {msgs:?}");
}

/// Small but non-trivial invocations of every command.
const SMALL_RUNS: &[&[&str]] = &[
    &["fraunhofer", "--n", "1,5,40", "--sweep", "0:180:37"],
    &["coverage", "--freq", "28e9", "--sweep", "0:300:7"],
    &["focus-profile", "--n", "24,60", "--model", "usw,nusw", "--target", "1", "--sweep", "0.2:2:200"],
    &["focus-solve", "--n", "60", "--target", "1"],
    &["kappa", "--n", "21,61"],
    &["nonrad", "--n", "1,3", "--set", "nonrad.ds_wl=0.1,0.25"],
    &["nonrad", "--n", "3", "--set", "nonrad.ds_wl=0.25", "--sweep", "0.05:1:5"],
];

#[test]
fn identical_config_gives_identical_bytes() {
    for args in SMALL_RUNS {
        let a = nfkit(args, Some("1"));
        let b = nfkit(args, Some("3"));
        let c = nfkit(args, None);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?} differs across thread counts");
        assert_eq!(a.stdout, c.stdout, "{args:?} differs between runs");
        let text = String::from_utf8(a.stdout).unwrap();
        assert!(!text.contains('\r'));
    }
}

#[test]
fn json_outputs_match_published_schemas() {
    for args in SMALL_RUNS {
        let mut with_json = args.to_vec();
        with_json.extend(["--format", "json"]);
        assert_valid(args[0], &stdout(&with_json));
    }
}

#[test]
fn csv_summary_file_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let out = dir.path().join("profile.csv");
    stdout(&[
        "focus-profile",
        "--n",
        "60",
        "--target",
        "1",
        "--out",
        out.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    let summary = std::fs::read_to_string(summary).unwrap();
    assert_valid("focus-profile", &summary);
    let v: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert!(v.get("profiles").is_none());
    assert_eq!(header(&std::fs::read_to_string(out).unwrap()), "n,model,r_m,mag_norm");
}

#[test]
fn headers_are_the_documented_columns() {
    let cases: &[(&[&str], &str)] = &[
        (&["fraunhofer", "--n", "5", "--sweep", "0:180:3"], "n,theta_deg,dF_over_lambda,branch"),
        (&["coverage", "--freq", "28e9", "--sweep", "0:1:2"], "f_hz,aperture_m,h_m,dbar_m"),
        (&["kappa", "--n", "11"], "n,kappa_direct,kappa_integral,agree_10pct"),
        (&["nonrad", "--n", "1", "--set", "nonrad.ds_wl=0.1"], "ds_over_lambda,n,phase_pattern,dnr_over_lambda"),
        (&["focus-solve", "--n", "60", "--target", "1", "--format", "csv"], "n,k,r_bar_m,y_hat,slope,focal_estimate_m"),
    ];
    for (args, expected) in cases {
        assert_eq!(header(&stdout(args)), *expected, "{args:?}");
    }
}

#[test]
fn fraunhofer_table_values() {
    let csv = stdout(&["fraunhofer", "--n", "1,5,40", "--sweep", "0:180:361"]);
    let rows = rows(&csv);
    assert_eq!(rows.len(), 3 * 361);
    let at = |n: &str, theta: &str| rows.iter().find(|r| r[0] == n && r[1] == theta).unwrap().clone();
    // D = 2λ for five half-wave elements
    assert_eq!(at("5", "90")[2], "8");
    assert_eq!(at("5", "90")[3], "TRANSITION");
    for theta in ["0", "180"] {
        assert_eq!(at("40", theta)[2], "0");
    }
    // a single element uses one spacing as its aperture: 2 (0.5)^2 sin^2
    for r in rows.iter().filter(|r| r[0] == "1") {
        let s = r[1].parse::<f64>().unwrap().to_radians().sin();
        let v: f64 = r[2].parse().unwrap();
        assert!((v - 0.5 * s * s).abs() <= 1e-11, "{r:?}");
        assert_eq!(r[3], "SINGLE");
    }
    // off-boresight plateau at four times the single-antenna value
    let d = 39.0 * 0.5;
    let r = at("40", "45");
    assert_eq!(r[3], "OFF_BORESIGHT");
    let v: f64 = r[2].parse().unwrap();
    assert!((v - 8.0 * d * d * 0.5).abs() / v < 1e-10);
}

#[test]
fn coverage_drops_to_zero_high_up() {
    let csv = stdout(&["coverage", "--freq", "28e9", "--sweep", "0:290:2"]);
    let r = rows(&csv);
    let d0: f64 = r[0][3].parse().unwrap();
    assert!((d0 - 183.0).abs() < 1.0, "{d0}");
    assert_eq!(r[1][3], "0");
}

#[test]
fn kappa_is_one_at_the_target_and_decreases() {
    let csv = stdout(&["kappa", "--n", "101,401,1601", "--set", "kappa.point_m=6"]);
    for r in rows(&csv) {
        let k: f64 = r[1].parse().unwrap();
        assert!((k - 1.0).abs() < 1e-11, "{r:?}");
    }
    let csv = stdout(&["kappa", "--n", "101,401,1601"]);
    let k: Vec<f64> = rows(&csv).iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(k[0] > k[1] && k[1] > k[2], "{k:?}");
    assert!(rows(&csv).iter().skip(1).all(|r| r[3] == "true"));
}

#[test]
fn planar_kappa_leaves_integral_blank() {
    let csv = stdout(&["kappa", "--kind", "upa", "--n", "11"]);
    let r = &rows(&csv)[0];
    assert_eq!((r[2].as_str(), r[3].as_str()), ("", ""));
}

#[test]
fn single_element_profile_is_monotone() {
    let csv = stdout(&["focus-profile", "--n", "1", "--sweep", "0.5:8:400"]);
    let m: Vec<f64> = rows(&csv).iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(m.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(m[0], 1.0);
}

#[test]
fn every_nonradiating_distance_is_under_half_a_wavelength() {
    let csv = stdout(&["nonrad", "--n", "1,5", "--set", "nonrad.ds_wl=0.01,0.25"]);
    for r in rows(&csv) {
        let d: f64 = r[3].parse().unwrap();
        assert!(d > 0.0 && d < 0.5, "{r:?}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "[array]\nn = 5\n\n[sweep]\nrange = 90:90:1\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(rows(&stdout(&["fraunhofer", "--config", p]))[0][2], "8");
    // nine half-wave elements: D = 4λ
    assert_eq!(rows(&stdout(&["fraunhofer", "--config", p, "--n", "9"]))[0][2], "32");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[array]\nelements = 5\n").unwrap();
    let code = |args: &[&str]| nfkit(args, None).status.code().unwrap();

    assert_eq!(code(&["fraunhofer", "--config", bad.to_str().unwrap()]), 2);
    assert_eq!(code(&["fraunhofer", "--config", "/nonexistent/run.cfg"]), 2);
    assert_eq!(code(&["fraunhofer", "--model", "ray"]), 2);
    assert_eq!(code(&["fraunhofer", "--sweep", "0:200:3"]), 2);
    assert_eq!(code(&["fraunhofer", "--bogus"]), 2);
    assert_eq!(code(&["kappa", "--freq", "1e9,2e9"]), 2);
    assert_eq!(nfkit(&["kappa"], Some("zero")).status.code(), Some(2));

    assert_eq!(code(&["focus-solve", "--n", "1"]), 3);
    assert_eq!(code(&["focus-solve", "--n", "60", "--target", "1000"]), 3);

    let numeric = [
        "nonrad",
        "--n",
        "1",
        "--set",
        "nonrad.ds_wl=0.01",
        "--set",
        "nonrad.pattern=in_phase",
        "--set",
        "nonrad.rel_tol=1e-300",
    ];
    assert_eq!(code(&numeric), 4);

    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["fraunhofer", "--sweep", "90:90:1"]), 0);
}

#[test]
fn diagnostics_go_to_stderr() {
    let out = nfkit(&["fraunhofer", "--model", "ray"], None);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown model"));
}
