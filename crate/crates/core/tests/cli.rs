use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_horoboundary"))
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out: Output = bin().args(args).output().expect("binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    });
    (
        out.status.code().unwrap_or(-1),
        json,
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn ok(args: &[&str]) -> Value {
    let (code, v, err) = run(args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    v
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn has_keys(v: &Value, keys: &[&str]) {
    for k in keys {
        assert!(v.get(k).is_some(), "missing key {k} in {v}");
    }
}

#[test]
fn classify_reports_every_field() {
    let v = ok(&["classify", "--g", "1", "--bu", "1"]);
    has_keys(
        &v,
        &[
            "iso_visual",
            "busemann_continuous",
            "global_section",
            "sigma",
            "dim_lower_bound",
            "signature",
        ],
    );
    assert_eq!(v["sigma"], "1/4");
    assert_eq!(v["iso_visual"], true);
    let v = ok(&["classify", "--g", "2"]);
    assert_eq!(v["iso_visual"], false);
    assert_eq!(v["sigma"], "0");
}

#[test]
fn dimfiber_reports_bound() {
    let v = ok(&["dimfiber", "--g", "2", "--p", "1"]);
    has_keys(&v, &["euler_characteristic", "sigma", "dim_lower_bound"]);
    assert_eq!(v["euler_characteristic"], -3);
}

#[test]
fn infusible_reads_spec() {
    let spec = scratch(
        "foliation.json",
        r#"{"proper_arc_count":0,"boundary_annulus_count":0,
            "interior_parts":[[{"kind":"interior_minimal","ergodic_count":1}]]}"#,
    );
    let v = ok(&["infusible", "--spec", spec.to_str().unwrap(), "--g", "2"]);
    has_keys(
        &v,
        &[
            "internally_indecomposable",
            "infusible",
            "indecomposables",
            "validation",
            "component_bound",
        ],
    );
    assert_eq!(v["indecomposables"], 1);
    assert_eq!(v["internally_indecomposable"], true);

    let bad = scratch("broken.json", "{\"proper_arc_count\": 0");
    let (code, v, _) = run(&["infusible", "--spec", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "invalid-input");
}

const TORUS_SYSTEM: &str = r#"{"system":{"labels":["a","b"],"intersections":[[0,1],[1,0]]},
    "qd":{"components":[{"a":1}],"horizontal":{"b":1}},"normalize":true"#;

#[test]
fn gm_busemann_and_minimal() {
    let input = scratch("gm.json", &format!("{TORUS_SYSTEM}}}"));
    let v = ok(&["gm", "busemann", "--input", input.to_str().unwrap()]);
    assert_eq!(v["area"], 1.0);
    assert_eq!(v["values"], serde_json::json!([0.0, 1.0]));

    let input = scratch(
        "gm-min.json",
        &format!("{TORUS_SYSTEM},\"groups\":[{{\"a\":1}}]}}"),
    );
    let v = ok(&["gm", "minimal", "--input", input.to_str().unwrap()]);
    has_keys(&v, &["values", "busemann", "ordered"]);
    assert_eq!(v["ordered"], true);

    // groups must partition the vertical foliation
    let input = scratch("gm-min-bad.json", &format!("{TORUS_SYSTEM}}}"));
    let (code, v, _) = run(&["gm", "minimal", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "invalid-input");
}

#[test]
fn gm_xialpha_and_fit() {
    let v = ok(&[
        "gm",
        "xialpha",
        "--c",
        "1",
        "--alpha",
        "0.2,0.3,0.5",
        "--at",
        "1,1,1",
    ]);
    has_keys(
        &v,
        &[
            "variables",
            "coefficients",
            "coefficient_sum",
            "eta",
            "derivative_check",
            "value",
        ],
    );
    assert!((v["coefficient_sum"].as_f64().unwrap() - 1.0).abs() < 1e-11);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-11);

    let (code, _, _) = run(&["gm", "xialpha", "--c", "1", "--alpha", "0.1,0.2,0.3"]);
    assert_eq!(code, 2);

    // exact quadratic form x^2 + x y + 2 y^2, supplied as square roots
    let pts: [[f64; 2]; 5] = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [1.0, 3.0]];
    let samples: Vec<String> = pts
        .iter()
        .map(|[x, y]| {
            format!(
                r#"{{"x":[{x},{y}],"value":{}}}"#,
                (x * x + x * y + 2.0 * y * y).sqrt()
            )
        })
        .collect();
    let input = scratch(
        "fit.json",
        &format!(r#"{{"samples":[{}]}}"#, samples.join(",")),
    );
    let v = ok(&["gm", "fit", "--input", input.to_str().unwrap()]);
    let c = &v["coefficients"];
    for (i, j, want) in [(0, 0, 1.0), (0, 1, 0.5), (1, 1, 2.0)] {
        assert!((c[i][j].as_f64().unwrap() - want).abs() < 1e-10, "{c}");
    }
    assert!(v["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn torus_commands() {
    let v = ok(&["torus", "dist", "--tau1", "0,1", "--tau2", "0,2"]);
    assert!((v["distance"].as_f64().unwrap() - 0.5 * 2f64.ln()).abs() < 1e-11);

    let v = ok(&["torus", "ray", "--t", "1"]);
    has_keys(&v, &["distance", "point"]);
    assert!((v["point"]["y"].as_f64().unwrap() - (-2.0f64).exp()).abs() < 1e-11);

    let v = ok(&["torus", "xi", "--x", "0.3,2"]);
    has_keys(&v, &["xi", "v_hat", "h_hat"]);

    let v = ok(&["torus", "horocycle", "--t", "100"]);
    assert!(v["deviation"].as_f64().unwrap() < 1e-2);

    let (code, v, _) = run(&["torus", "dist", "--tau1", "0,-1", "--tau2", "0,2"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "invalid-input");
}

#[test]
fn walsh_table_goes_to_csv() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("walsh.csv");
    let v = ok(&[
        "--csv",
        csv.to_str().unwrap(),
        "torus",
        "walsh",
        "--f",
        "1,1",
        "--n-max",
        "4",
        "--sequence",
        "constant",
    ]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["bounds_hold"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "{text}");
    assert_eq!(lines[0], "n,t,value,busemann_n,limit,bound_holds");
}

#[test]
fn pillow_solve_and_exit_codes() {
    let v = ok(&["pillow", "solve", "--t", "0.01"]);
    has_keys(
        &v,
        &["t", "a", "b", "l", "g", "ext", "iterations", "residuals"],
    );
    let l = v["l"].as_f64().unwrap();
    assert!(l > 0.0 && l < 1.0);

    let (code, v, err) = run(&["pillow", "solve", "--t", "2"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "invalid-input");
    assert!(!err.is_empty());

    let (code, v, _) = run(&["--max-iter", "1", "pillow", "solve", "--t", "0.5"]);
    assert_eq!(code, 3);
    assert_eq!(v["status"], "no-converge");
}

#[test]
fn pillow_scan_is_deterministic_across_jobs() {
    let args = [
        "pillow",
        "scan",
        "--tmin",
        "1e-3",
        "--tmax",
        "1e-2",
        "--per-decade",
        "3",
    ];
    let serial = ok(&args);
    let mut parallel_args = vec!["--jobs", "3"];
    parallel_args.extend_from_slice(&args);
    let parallel = ok(&parallel_args);
    assert_eq!(serial["rows"].as_array().unwrap().len(), 4);
    assert_eq!(serial, ok(&args));
    assert_eq!(parallel, ok(&parallel_args));
    // warm starts depend on the chunking, so only the solutions must agree
    for (a, b) in serial["rows"]
        .as_array()
        .unwrap()
        .iter()
        .zip(parallel["rows"].as_array().unwrap())
    {
        for k in ["t", "a", "b", "l", "g", "ext"] {
            let (x, y) = (a[k].as_f64().unwrap(), b[k].as_f64().unwrap());
            assert!((x - y).abs() <= 1e-10 * x.abs(), "{k}: {x} vs {y}");
        }
    }
}

#[test]
fn usage_errors_exit_two() {
    let (code, v, err) = run(&["classify", "--g", "x"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "invalid-input");
    assert!(err.contains("--g"));

    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("pillow"));
}
