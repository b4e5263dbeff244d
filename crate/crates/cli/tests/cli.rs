use std::path::{Path, PathBuf};
use std::process::Command;

use opmod_cli::pretty::pretty_program;
use opmod_cli::{parse_program, run_source, SessionConfig};
use serde_json::Value;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn programs() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(golden_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "opm"))
        .collect();
    out.sort();
    out
}

fn opmod() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_opmod"));
    cmd.env_remove("OPMOD_TOL");
    cmd
}

fn golden(name: &str) -> Value {
    let text = std::fs::read_to_string(golden_dir().join(format!("{name}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn output(v: &Value, k: usize) -> &Value {
    &v["outputs"][k]["value"]
}

fn pair(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

/// Single-block operator as rows of `(re, im)`.
fn block(v: &Value) -> Vec<Vec<(f64, f64)>> {
    let blocks = v["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 1);
    blocks[0]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row.as_array().unwrap().iter().map(pair).collect())
        .collect()
}

fn assert_real_matrix(got: &Value, want: &[&[f64]], tol: f64) {
    let got = block(got);
    assert_eq!(got.len(), want.len());
    for (row, wrow) in got.iter().zip(want) {
        for ((re, im), w) in row.iter().zip(wrow.iter()) {
            assert!(
                (re - w).abs() <= tol && im.abs() <= tol,
                "{got:?} vs {want:?}"
            );
        }
    }
}

fn assert_points(got: &Value, want: &[(f64, f64)], tol: f64) {
    let got: Vec<(f64, f64)> = got.as_array().unwrap().iter().map(pair).collect();
    assert_eq!(got.len(), want.len(), "{got:?}");
    for (g, w) in got.iter().zip(want) {
        assert!(
            (g.0 - w.0).abs() <= tol && (g.1 - w.1).abs() <= tol,
            "{got:?} vs {want:?}"
        );
    }
}

#[test]
fn golden_sessions_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let all = programs();
    assert!(all.len() >= 10);
    for program in all {
        let out = dir.path().join("out.json");
        let status = opmod()
            .arg("run")
            .arg(&program)
            .arg("--json")
            .arg(&out)
            .output()
            .unwrap()
            .status;
        let expected = std::fs::read_to_string(program.with_extension("json")).unwrap();
        let got = std::fs::read_to_string(&out).unwrap();
        assert_eq!(got, expected, "{}", program.display());
        let v: Value = serde_json::from_str(&got).unwrap();
        assert_eq!(
            status.code(),
            v["status"].as_i64().map(|s| s as i32),
            "{}",
            program.display()
        );
    }
}

#[test]
fn exit_statuses_cover_every_outcome() {
    let code = |name: &str| {
        opmod()
            .arg("run")
            .arg(golden_dir().join(name))
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(code("z_transform.opm"), Some(0));
    assert_eq!(code("failing_check.opm"), Some(1));
    assert_eq!(code("log_of_zero.opm"), Some(2));
    assert_eq!(code("not_invertible.opm"), Some(2));
    assert_eq!(code("syntax_error.opm"), Some(3));
    assert_eq!(code("type_error.opm"), Some(3));
    assert_eq!(code("does_not_exist.opm"), Some(2));
}

#[test]
fn errors_carry_kind_and_position() {
    let v = golden("syntax_error");
    assert_eq!(v["error"]["kind"], "SyntaxError");
    assert_eq!(
        (v["error"]["line"].as_i64(), v["error"]["column"].as_i64()),
        (Some(2), Some(5))
    );
    let v = golden("log_of_zero");
    assert_eq!(v["error"]["kind"], "NotStrictlyPositive");
    assert_eq!(v["error"]["line"], 3);
    // The statement before the failure still produced its output.
    assert_eq!(v["outputs"].as_array().unwrap().len(), 1);
    assert_eq!(golden("type_error")["error"]["kind"], "TypeError");
}

#[test]
fn tolerance_comes_from_the_environment() {
    let file = golden_dir().join("failing_check.opm");
    let loose = Command::new(env!("CARGO_BIN_EXE_opmod"))
        .env("OPMOD_TOL", "0.01")
        .arg("run")
        .arg(&file)
        .output()
        .map(|o| o.status);
    assert_eq!(loose.unwrap().code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_opmod"))
        .env("OPMOD_TOL", "-1")
        .arg("run")
        .arg(&file)
        .output()
        .map(|o| o.status);
    assert_eq!(bad.unwrap().code(), Some(2));
}

// Closed forms computed here, independently of the library.

#[test]
fn z_transform_matches_the_closed_form() {
    // T = [[1,2],[3,4]], M = 1 + T*T = [[11,14],[14,21]]. For symmetric
    // positive 2x2 M, sqrt(M) = (M + sqrt(det M) 1) / sqrt(tr M + 2 sqrt(det M)).
    let (a, b, d) = (11.0f64, 14.0f64, 21.0f64);
    let s = (a * d - b * b).sqrt();
    let k = (a + d + 2.0 * s).sqrt();
    let (ra, rb, rd) = ((a + s) / k, b / k, (d + s) / k);
    let det = ra * rd - rb * rb;
    let (ia, ib, id) = (rd / det, -rb / det, ra / det);
    let z = [
        [ia + 2.0 * ib, ib + 2.0 * id],
        [3.0 * ia + 4.0 * ib, 3.0 * ib + 4.0 * id],
    ];
    let v = golden("z_transform");
    assert_real_matrix(output(&v, 0), &[&z[0], &z[1]], 1e-12);
    assert_real_matrix(output(&v, 2), &[&[3.0 / 10f64.sqrt()]], 1e-15);
}

#[test]
fn spectra_match_eigenvalues() {
    let v = golden("diagonal_spectrum");
    assert_points(output(&v, 0), &[(-1.0, 0.0), (0.0, 2.0), (3.0, 0.0)], 1e-12);
    let j = |x: f64| 1.0 / (1.0 + x * x).sqrt();
    assert_points(
        output(&v, 1),
        &[(-j(1.0), 0.0), (0.0, 2.0 * j(2.0)), (3.0 * j(3.0), 0.0)],
        1e-12,
    );
    let v = golden("tensor_products");
    assert_points(
        output(&v, 1),
        &[(-2.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
        1e-12,
    );
}

#[test]
fn functions_of_matrices_match_closed_forms() {
    let v = golden("exp_log");
    let (ch, sh) = (1f64.cosh(), 1f64.sinh());
    assert_real_matrix(output(&v, 0), &[&[ch, sh], &[sh, ch]], 1e-14);
    assert_real_matrix(output(&v, 1), &[&[0.0, 0.0], &[0.0, 1.0]], 1e-14);

    let v = golden("powers");
    let (p, q) = ((3f64.sqrt() + 1.0) / 2.0, (3f64.sqrt() - 1.0) / 2.0);
    assert_real_matrix(output(&v, 0), &[&[p, q], &[q, p]], 1e-14);
    let ln3 = 3f64.ln();
    assert_points(output(&v, 1), &[(ln3.cos(), ln3.sin()), (1.0, 0.0)], 1e-14);

    let v = golden("apply_sets");
    assert_real_matrix(output(&v, 0), &[&[2.0, 0.0], &[0.0, 3.0]], 1e-14);
    assert_real_matrix(output(&v, 1), &[&[0.25, 0.0], &[0.0, 1.0 / 9.0]], 1e-14);
    assert_real_matrix(output(&v, 2), &[&[0.5, 0.0], &[0.0, 1.0 / 3.0]], 1e-14);

    let v = golden("absolute_value");
    assert_real_matrix(output(&v, 0), &[&[0.0, 0.0], &[0.0, 2.0]], 1e-14);
    assert_eq!(pair(output(&v, 1)), (5.0, 0.0));
    // (a - 2i)^{-1} = (a + 2i) / (a² + 4)
    let res = block(output(&v, 2));
    for (k, a) in [1.0f64, 3.0].into_iter().enumerate() {
        let (re, im) = res[k][k];
        assert!((re - a / (a * a + 4.0)).abs() < 1e-14 && (im - 2.0 / (a * a + 4.0)).abs() < 1e-14);
    }
}

#[test]
fn symbol_arithmetic_matches_fractions() {
    let v = golden("symbols");
    let coeffs = |x: &Value, key: &str| -> Vec<(f64, f64)> {
        x[key].as_array().unwrap().iter().map(pair).collect()
    };
    // n · 1/(1+n) = n/(1+n)
    assert_eq!(coeffs(output(&v, 0), "num"), vec![(0.0, 0.0), (1.0, 0.0)]);
    assert_eq!(coeffs(output(&v, 0), "den"), vec![(1.0, 0.0), (1.0, 0.0)]);
    // n + 1/(1+n) = (1 + n + n²)/(1+n)
    assert_eq!(coeffs(output(&v, 1), "num"), vec![(1.0, 0.0); 3]);
    // adjoint conjugates the coefficients
    assert_eq!(coeffs(output(&v, 3), "num"), vec![(0.0, -1.0)]);
}

#[test]
fn pretty_printing_round_trips_the_corpus() {
    for program in programs() {
        let text = std::fs::read_to_string(&program).unwrap();
        let Ok(p) = parse_program(&text) else {
            continue;
        };
        let once = pretty_program(&p);
        let again = pretty_program(&parse_program(&once).unwrap());
        assert_eq!(once, again, "{}", program.display());
        // Same values and verdicts; only line numbers move.
        let strip = |text: &str| {
            run_source(text, SessionConfig::default()).map(|r| {
                let mut v: Value = serde_json::from_str(&r.to_json().render()).unwrap();
                for key in ["outputs", "checks"] {
                    for item in v[key].as_array_mut().unwrap() {
                        item["line"] = Value::Null;
                    }
                }
                v["error"]["line"] = Value::Null;
                v
            })
        };
        if let (Ok(a), Ok(b)) = (strip(&text), strip(&once)) {
            assert_eq!(a, b, "{}", program.display());
        }
    }
}

#[test]
fn verify_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let report = dir.path().join(format!("{tag}.json"));
        let csv = dir.path().join(format!("{tag}.csv"));
        let status = opmod()
            .args([
                "verify",
                "--suite",
                "ztransform,tensor",
                "--trials",
                "4",
                "--seed",
                "11",
                "--report",
            ])
            .arg(&report)
            .arg("--csv")
            .arg(&csv)
            .output()
            .unwrap()
            .status;
        assert_eq!(status.code(), Some(0));
        (
            std::fs::read(report).unwrap(),
            std::fs::read_to_string(csv).unwrap(),
        )
    };
    let (a, csv_a) = run("a");
    let (b, csv_b) = run("b");
    assert_eq!(a, b);
    assert_eq!(csv_a, csv_b);
    assert_eq!(csv_a.lines().count(), 1 + 4 * (5 + 5));
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["properties"][0].get("runtime").is_none());
}

#[test]
fn verify_edge_cases() {
    let unknown = opmod()
        .args(["verify", "--suite", "nonsense", "--trials", "1"])
        .output()
        .unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let zero = opmod()
        .args(["verify", "--suite", "all", "--trials", "0", "--report"])
        .arg(&report)
        .output()
        .map(|o| o.status);
    assert_eq!(zero.unwrap().code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["flags"][0], "no trials");
    let timed = opmod()
        .args([
            "verify",
            "--suite",
            "localization",
            "--trials",
            "1",
            "--timings",
            "--report",
        ])
        .arg(&report)
        .output()
        .map(|o| o.status);
    assert_eq!(timed.unwrap().code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["properties"][0]["runtime"].as_f64().is_some());
}

#[test]
fn spectrum_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let out = opmod()
        .args(["spectrum", "--expr", "mat([[0, 1], [1, 0]])", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let points: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_points(&points, &[(-1.0, 0.0), (1.0, 0.0)], 1e-14);
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().next(), Some("re,im,multiplicity"));
    assert_eq!(text.lines().count(), 3);
    let bad = opmod()
        .args(["spectrum", "--expr", "mat([[1, 0]"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}
