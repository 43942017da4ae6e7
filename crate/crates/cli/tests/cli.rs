use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use simroots::{Complex64, Polynomial};
use simroots_cli::report::{COMPARE_HEADER, TRACE_HEADER};
use simroots_cli::{CompareReport, SolveReport};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn simroots(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simroots"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Compares with the checked-in file, or rewrites it when `UPDATE_GOLDEN` is set.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected =
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_quad_matches_golden_report_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let report = dir.path().join("r.json");
    let out = simroots(&[
        "solve",
        "--input",
        s(&data("quad.json")),
        "--method",
        "dk",
        "--trace",
        s(&trace),
        "--output",
        s(&report),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv_text = std::fs::read_to_string(&trace).unwrap();
    assert!(csv_text.starts_with("iter,max_residual,max_step,max_error\n"));
    assert!(!csv_text.contains('\r'));
    check_golden("quad_dk_trace.csv", &csv_text);
    check_golden(
        "quad_dk_report.json",
        &std::fs::read_to_string(&report).unwrap(),
    );
}

#[test]
fn solve_with_known_roots_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let out = simroots(&[
        "solve",
        "--input",
        s(&data("sextic.json")),
        "--method",
        "householder",
        "--d",
        "2",
        "--trace",
        s(&trace),
    ]);
    assert_eq!(code(&out), 0);
    check_golden(
        "sextic_h2_report.json",
        &String::from_utf8(out.stdout).unwrap(),
    );
    check_golden(
        "sextic_h2_trace.csv",
        &std::fs::read_to_string(&trace).unwrap(),
    );
}

#[test]
fn trace_csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let trace_path = dir.path().join("t.csv");
    let out = simroots(&[
        "solve",
        "--input",
        s(&data("sextic.json")),
        "--method",
        "aberth",
        "--trace",
        s(&trace_path),
    ]);
    assert_eq!(code(&out), 0);

    // the same run through the library
    let file = simroots_cli::ProblemFile::load(&data("sextic.json")).unwrap();
    let problem = file.validate().unwrap();
    let trace = simroots::driver::solve(
        simroots::MethodSpec::Aberth,
        &problem.polynomial,
        &simroots::SolveConfig::default(),
        problem.known_roots.as_deref(),
    )
    .unwrap();

    let mut reader = csv::Reader::from_path(&trace_path).unwrap();
    assert_eq!(reader.headers().unwrap(), TRACE_HEADER.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), trace.per_iteration.len());
    let parse = |f: &str| (!f.is_empty()).then(|| f.parse::<f64>().unwrap());
    for (row, rec) in rows.iter().zip(&trace.per_iteration) {
        assert_eq!(row[0].parse::<usize>().unwrap(), rec.iteration);
        // bit-identical after the decimal round trip
        assert_eq!(
            row[1].parse::<f64>().unwrap().to_bits(),
            rec.max_residual.to_bits()
        );
        assert_eq!(
            parse(&row[2]).map(f64::to_bits),
            rec.max_step.map(f64::to_bits)
        );
        assert_eq!(
            parse(&row[3]).map(f64::to_bits),
            rec.max_error.map(f64::to_bits)
        );
        // 17 significant digits
        assert_eq!(
            row[1]
                .split('e')
                .next()
                .unwrap()
                .replace(['.', '-'], "")
                .len(),
            17
        );
    }
    assert!(rows[0][2].is_empty());
}

#[test]
fn trace_without_known_roots_has_empty_error_column() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let out = simroots(&[
        "solve",
        "--input",
        s(&data("quad.json")),
        "--method",
        "aberth",
        "--trace",
        s(&trace),
    ]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_path(&trace).unwrap();
    for row in reader.records() {
        assert!(row.unwrap()[3].is_empty());
    }
}

#[test]
fn report_round_trip_reproduces_the_residual() {
    for (method, extra) in [
        ("dk", None),
        ("mroot", Some(("--m", "3"))),
        ("wquad", Some(("--m", "2"))),
    ] {
        let mut args = vec![
            "solve",
            "--input",
            s(&data("sextic.json")).to_owned().leak(),
            "--method",
            method,
        ];
        if let Some((flag, v)) = extra {
            args.extend([flag, v]);
        }
        let out = simroots(&args);
        assert_eq!(code(&out), 0);
        let rep: SolveReport = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(rep.approximations.len(), rep.degree);

        // feed the approximations back as known roots of the same polynomial
        let file = simroots_cli::ProblemFile::load(&data("sextic.json")).unwrap();
        let fed = simroots_cli::ProblemFile {
            known_roots: Some(rep.approximations.clone()),
            ..file
        };
        let problem = fed.validate().unwrap();
        let p: &Polynomial = &problem.polynomial;
        let recomputed = problem
            .known_roots
            .unwrap()
            .iter()
            .map(|z: &Complex64| p.eval(*z).norm())
            .fold(0.0, f64::max);
        assert!((recomputed - rep.max_residual).abs() <= 1e-12, "{method}");
    }
}

#[test]
fn wilkinson6_householder_succeeds() {
    let out = simroots(&[
        "solve",
        "--input",
        s(&data("wilkinson6.json")),
        "--method",
        "householder",
        "--d",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let rep: SolveReport = serde_json::from_slice(&out.stdout).unwrap();
    // the unscaled residual floor near z = 6 sits around 1e-11, so the
    // iteration settles on rounding noise rather than meeting tol = 1e-12
    assert!(
        ["ResidualMet", "StepMet", "Stagnated"].contains(&rep.termination.as_str()),
        "{}",
        rep.termination
    );
    assert!(rep.final_max_error.unwrap() < 1e-11);
    let loose = simroots(&[
        "solve",
        "--input",
        s(&data("wilkinson6.json")),
        "--method",
        "householder",
        "--d",
        "2",
        "--tol",
        "1e-9",
    ]);
    let rep: SolveReport = serde_json::from_slice(&loose.stdout).unwrap();
    assert_eq!(rep.termination, "ResidualMet");
}

#[test]
fn exit_codes() {
    let quad = data("quad.json");
    // missing parameter, wrong parameter, unknown method
    assert_eq!(
        code(&simroots(&[
            "solve",
            "--input",
            s(&quad),
            "--method",
            "mroot"
        ])),
        2
    );
    assert_eq!(
        code(&simroots(&[
            "solve",
            "--input",
            s(&quad),
            "--method",
            "dk",
            "--d",
            "2"
        ])),
        2
    );
    let out = simroots(&["solve", "--input", s(&quad), "--method", "newton"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("householder"));
    // parameter out of range for the degree
    assert_eq!(
        code(&simroots(&[
            "solve",
            "--input",
            s(&quad),
            "--method",
            "wlin",
            "--m",
            "5"
        ])),
        2
    );
    // bad files
    assert_eq!(
        code(&simroots(&[
            "solve",
            "--input",
            "/nonexistent.json",
            "--method",
            "dk"
        ])),
        2
    );
    assert_eq!(
        code(&simroots(&[
            "solve",
            "--input",
            s(&data("malformed.json")),
            "--method",
            "dk"
        ])),
        2
    );
    assert_eq!(
        code(&simroots(&[
            "solve",
            "--input",
            s(&data("zero_leading.json")),
            "--method",
            "dk"
        ])),
        2
    );
    assert_eq!(
        code(&simroots(&[
            "solve",
            "--input",
            s(&quad),
            "--method",
            "dk",
            "--tol",
            "-1"
        ])),
        2
    );
    // non-convergence still writes the report
    let out = simroots(&[
        "solve",
        "--input",
        s(&data("sextic.json")),
        "--method",
        "dk",
        "--max-iter",
        "2",
    ]);
    assert_eq!(code(&out), 1);
    let rep: SolveReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep.termination, "MaxIterReached");
    assert_eq!(rep.iterations, 2);
}

#[test]
fn compare_matches_golden_and_orders_ascend() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("c.csv");
    let out = simroots(&[
        "compare",
        "--input",
        s(&data("sextic.json")),
        "--methods",
        "dk,aberth,householder:2",
        "--csv",
        s(&csv_path),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep: CompareReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep.rows.len(), 3);
    let orders: Vec<f64> = rep
        .rows
        .iter()
        .map(|r| r.estimated_order.unwrap())
        .collect();
    assert!(orders.windows(2).all(|w| w[0] < w[1]), "{orders:?}");
    check_golden(
        "sextic_compare.json",
        &String::from_utf8(out.stdout).unwrap(),
    );

    let text = std::fs::read_to_string(&csv_path).unwrap();
    check_golden("sextic_compare.csv", &text);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), COMPARE_HEADER.as_slice());
    let methods: Vec<String> = reader.records().map(|r| r.unwrap()[0].to_owned()).collect();
    assert_eq!(methods, ["dk", "aberth", "householder:2"]);
}

#[test]
fn compare_input_errors() {
    let sextic = data("sextic.json");
    let out = simroots(&["compare", "--input", s(&sextic), "--methods", "dk,bogus"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("valid names: dk, aberth, gargantini, mroot, householder, wlin, wquad"),
        "{err}"
    );
    assert_eq!(
        code(&simroots(&[
            "compare",
            "--input",
            s(&data("quad.json")),
            "--methods",
            "dk"
        ])),
        2
    );
    assert_eq!(
        code(&simroots(&[
            "compare",
            "--input",
            s(&data("duplicate_roots.json")),
            "--methods",
            "dk"
        ])),
        2
    );
    assert_eq!(
        code(&simroots(&[
            "compare",
            "--input",
            s(&sextic),
            "--methods",
            "dk",
            "--init-error",
            "0"
        ])),
        2
    );
}

#[test]
fn selftest_passes_and_is_seeded() {
    let a = simroots(&["selftest"]);
    assert_eq!(code(&a), 0);
    let text = String::from_utf8(a.stdout).unwrap();
    let suites: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
        .collect();
    assert_eq!(suites.len(), 7);
    assert!(suites.iter().all(|l| l.starts_with("PASS")));
    let b = simroots(&["selftest", "--seed", "7"]);
    assert_eq!(code(&b), 0);
    assert_ne!(text, String::from_utf8(b.stdout).unwrap());
}
