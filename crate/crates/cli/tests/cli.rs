use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn hankel_hs_two_summations_agree() {
    let dir = TempDir::new().unwrap();
    let b = write(
        dir.path(),
        "b.json",
        "[[0,0],[1,0],[0.5,-0.5],[0,2],[0.25,0]]",
    );
    let out = dlab(&["hankel", "hs", "--symbol", &b]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["match"], Value::Bool(true));
    // sum_k |b_k|^2 sum_{i+j=k} (k+1)^2 / ((i+1)(j+1))
    let moduli_sq = [0.0, 1.0, 0.5, 4.0, 0.0625];
    let oracle: f64 = (2..=4usize)
        .map(|k| {
            let s: f64 = (1..k)
                .map(|i| ((k + 1) * (k + 1)) as f64 / ((i + 1) * (k - i + 1)) as f64)
                .sum();
            s * moduli_sq[k]
        })
        .sum();
    assert!((v["hs_by_weights"].as_f64().unwrap() - oracle).abs() < 1e-12 * oracle);
    assert!((v["hs_entrywise"].as_f64().unwrap() - oracle).abs() < 1e-10 * oracle);
}

#[test]
fn hfun_reports_value_reference_deviation() {
    let out = dlab(&["special", "hfun", "--zeta", "0.99"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let value = v["value"].as_f64().unwrap();
    let reference = v["reference"].as_f64().unwrap();
    assert!((reference - 100f64.ln().ln()).abs() < 1e-14);
    assert!((v["deviation"].as_f64().unwrap() - (value - reference)).abs() < 1e-15);
    assert_eq!(v.as_object().unwrap().len(), 3);
}

#[test]
fn verify_kernels_passes() {
    let out = dlab(&["verify", "kernels", "--tol", "1e-8"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json_of(&out);
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["tolerances"]["series"].as_f64(), Some(1e-8));
    assert!(v.get("wall_time").is_none());
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.json", "[[1,0],[0.5,0.25],[0,-1],[0.3,0]]");
    let args = [
        "weakprod",
        "optimize",
        "--coeffs",
        &h,
        "--seed",
        "7",
        "--restarts",
        "3",
    ];
    let a = dlab(&args);
    let b = dlab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let balayage = ["verify", "balayage", "--seed", "3"];
    assert_eq!(dlab(&balayage).stdout, dlab(&balayage).stdout);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = |jobs: &'static str| {
        dlab(&[
            "special",
            "bump",
            "--grid",
            "1e-6:1e-2:3:log",
            "--theta",
            "1,2",
            "--jobs",
            jobs,
        ])
        .stdout
    };
    assert_eq!(args("1"), args("4"));
    assert_eq!(
        dlab(&["verify", "xnorm", "--jobs", "0"]).status.code(),
        Some(1)
    );
}

#[test]
fn malformed_input_names_the_field() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        "[{\"arg\": 0.0, \"delta\": 0.5}, {\"arg\": 1.0}]",
    );
    let values = write(dir.path(), "v.json", "[[1,0],[1,0]]");
    let out = dlab(&["interp", "check", "--points", &bad, "--values", &values]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--points") && err.contains("delta"), "{err}");

    let out = dlab(&[
        "hankel",
        "hs",
        "--symbol",
        &dir.path().join("missing.json").to_string_lossy(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--symbol"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(dlab(&["verify", "nonsense"]).status.code(), Some(1));
    assert_eq!(dlab(&["hankel"]).status.code(), Some(1));
    assert_eq!(
        dlab(&["special", "bump", "--grid", "1:2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        dlab(&["special", "hfun", "--zeta", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(dlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_two() {
    // too few rows for the kernel tail at this zeta
    let out = dlab(&["hankel", "hzeta", "--zeta", "0.9", "--trunc", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let pts = write(
        dir.path(),
        "p.json",
        "[{\"arg\": 0.0, \"delta\": 0.75}, {\"arg\": 0.0, \"delta\": 0.19}]",
    );
    let vals = write(dir.path(), "v.json", "[[1,0],[2,0]]");
    let ok = dlab(&["interp", "check", "--points", &pts, "--values", &vals]);
    assert_eq!(ok.status.code(), Some(0));
    let strict = dlab(&[
        "interp", "check", "--points", &pts, "--values", &vals, "--tol", "1e-300",
    ]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn interp_check_fields() {
    let dir = TempDir::new().unwrap();
    let pts = write(
        dir.path(),
        "p.json",
        "[{\"arg\": 0.0, \"delta\": 0.75}, {\"arg\": 0.0, \"delta\": 0.19}]",
    );
    let vals = write(dir.path(), "v.json", "[[1,0],[-1,0]]");
    let v = json_of(&dlab(&[
        "interp",
        "check",
        "--points",
        &pts,
        "--values",
        &vals,
        "--product",
    ]));
    let expected = 19f64.ln() / (0.95f64 / 0.15).ln();
    assert!((v["C_Z"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert!(v["lambda_min"].as_f64().unwrap() > 0.0);
    assert!(v["C*"].as_f64().is_some());
    assert_eq!(v["residuals"].as_array().unwrap().len(), 2);
}

#[test]
fn csv_and_out_file() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("rows.csv");
    let out = dlab(&[
        "special",
        "powergrowth",
        "--n",
        "2",
        "--kmax",
        "3",
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(
        lines[0],
        "task,params.k,params.n,values.holds,values.lhs,values.rhs"
    );
    // k = 3, n = 2: lhs = 2 * 4, rhs = 16 * 2 * 6
    assert_eq!(lines[4], "powergrowth,3,2,true,8,192");
}

#[test]
fn module_commands_run() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "f.json", "[[1,0],[0,1],[0.5,0]]");
    let pts = write(
        dir.path(),
        "p.json",
        "[{\"arg\": 0.0, \"delta\": 1.0}, {\"arg\": 0.0, \"delta\": 0.75}]",
    );
    let radial = write(dir.path(), "mu.json", "[{\"r\": 0.0, \"w\": 1.0}]");
    let atomic = write(
        dir.path(),
        "nu.json",
        "[{\"arg\": 0.0, \"delta\": 1.0, \"w_re\": 1.0, \"w_im\": 0.0}]",
    );

    let norms = json_of(&dlab(&["series", "norms", "--coeffs", &f]));
    assert!((norms["dirichlet_norm_sq"].as_f64().unwrap() - (1.0 + 2.0 + 0.75)).abs() < 1e-15);

    let geo = json_of(&dlab(&["geometry", "--points", &pts]));
    assert!((geo["cells"][0]["values"]["rho"].as_f64().unwrap() - 0.5).abs() < 1e-15);

    let rep = json_of(&dlab(&[
        "kernels",
        "reproduce",
        "--coeffs",
        &f,
        "--points",
        &pts,
    ]));
    assert!(rep["cells"][1]["values"]["error"].as_f64().unwrap() < 1e-14);

    let cm = json_of(&dlab(&["carleson", "norm", "--measure", &radial]));
    assert_eq!(cm["norm"]["norm"].as_f64(), Some(1.0));
    let x = json_of(&dlab(&["carleson", "xnorm", "--n", "4"]));
    assert_eq!(x["norm"].as_f64(), Some(2.0));
    let bal = json_of(&dlab(&[
        "carleson",
        "balayage",
        "--measure",
        &atomic,
        "--points",
        &pts,
    ]));
    assert!(
        (bal["cells"][1]["values"]["balayage"].as_f64().unwrap() - std::f64::consts::PI).abs()
            < 1e-15
    );

    let z2 = write(dir.path(), "z2.json", "[[0,0],[0,0],[1,0]]");
    let built = json_of(&dlab(&["hankel", "build", "--symbol", &z2, "--trunc", "2"]));
    assert_eq!(built["entries"][0][0][0].as_f64(), Some(1.5));
    let svd = json_of(&dlab(&[
        "hankel", "svd", "--symbol", &z2, "--trunc", "4", "--p", "1",
    ]));
    assert!((svd["s_p"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    let hardy = json_of(&dlab(&[
        "hankel", "svd", "--symbol", &z2, "--trunc", "4", "--abg", "0", "0", "0",
    ]));
    assert!((hardy["s_p"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let fac = write(
        dir.path(),
        "fac.json",
        "{\"target\": [[1,0],[2,0],[1,0]], \"pairs\": [[[[1,0],[1,0]], [[1,0],[1,0]]]]}",
    );
    let bound = json_of(&dlab(&["weakprod", "bound", "--factorization", &fac]));
    assert!((bound["upper_bound"].as_f64().unwrap() - 3.0).abs() < 1e-15);

    let sq = json_of(&dlab(&["special", "sqrtk", "--delta", "1"]));
    assert_eq!(sq["value_sq"].as_f64(), Some(1.0));
}
