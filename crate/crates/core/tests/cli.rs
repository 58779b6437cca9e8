use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use capedu::scenario_io::read_csv_table;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_capedu"))
}

fn scenario(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name]
        .iter()
        .collect()
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env_remove("CAPEDU_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn value_after(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|v| v.split(',').next())
        .unwrap_or_else(|| panic!("{key} missing in {text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn simulate_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("control.csv");
    let svg = dir.path().join("control.svg");
    let o = run(&[
        "simulate",
        "--scenario",
        path_str(&scenario("control_p040.json")),
        "--out",
        path_str(&out),
        "--svg",
        path_str(&svg),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = read_csv_table(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(table.header, ["t", "K", "E", "s_r", "Y", "C", "I_k", "I_r"]);
    let y = table.column("Y").unwrap();
    assert!((y.last().unwrap() - 1.942).abs() < 0.02);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn simulate_to_stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    let path = scenario("education_share_010.json");
    let a = run(&["simulate", "--scenario", path_str(&path)]);
    let b = run(&[
        "simulate",
        "--scenario",
        path_str(&path),
        "--out",
        path_str(&out),
    ]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), std::fs::read_to_string(&out).unwrap());
}

#[test]
fn equilibrium_reports_closed_form() {
    let o = run(&[
        "equilibrium",
        "--scenario",
        path_str(&scenario("basic_reference.json")),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!((value_after(&text, "K0 = ") - 3.805533244216555).abs() < 1e-12);
    assert!((value_after(&text, "E0 = ") - 0.5708299866324831).abs() < 1e-12);
    assert!((value_after(&text, "eigenvalues = ") + 0.0762823).abs() < 1e-6);
    assert!(text.contains("class = StableNode"));
}

#[test]
fn equilibrium_of_controlled_scenario_includes_target() {
    let o = run(&[
        "equilibrium",
        "--scenario",
        path_str(&scenario("control_p040.json")),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!((value_after(&text, "Y0 = ") - 1.94195).abs() < 1e-4);
}

#[test]
fn tipping_finds_threshold() {
    let o = run(&[
        "tipping",
        "--scenario",
        path_str(&scenario("control_tipping.json")),
        "--p-min",
        "0.4",
        "--p-max",
        "0.55",
    ]);
    assert!(o.status.success());
    let p = value_after(&stdout(&o), "p_star = ");
    assert!((p - 0.466).abs() < 0.005, "{p}");
}

#[test]
fn tipping_without_sign_change_is_numeric_failure() {
    let o = run(&[
        "tipping",
        "--scenario",
        path_str(&scenario("control_tipping.json")),
        "--p-min",
        "0.5",
        "--p-max",
        "0.55",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_is_independent_of_job_count() {
    let args = |jobs: &'static str| {
        run(&[
            "sweep",
            "--scenario",
            path_str(&scenario("depreciation_sweep.json")),
            "--param",
            "delta_r",
            "--values",
            "0.25,0.23,0.21,0.19,0.17,0.15",
            "--at",
            "200",
            "--jobs",
            jobs,
        ])
    };
    let one = args("1");
    let four = args("4");
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let table = stdout(&one);
    assert!(table.starts_with("value,Y,C,error\n"));
    assert_eq!(table.lines().count(), 7);
}

#[test]
fn sweep_accepts_negative_values() {
    let o = run(&[
        "sweep",
        "--scenario",
        path_str(&scenario("chaos_c_zero.json")),
        "--param",
        "c",
        "--values",
        "-0.1,0.1",
        "--at",
        "10",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("\n-0.1,"));
}

#[test]
fn chaos_prints_running_average() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ne9.csv");
    let o = run(&["chaos", "--out", path_str(&out)]);
    assert!(o.status.success());
    let a = value_after(&stdout(&o), "A(100) = ");
    assert!((a - 0.14).abs() < 0.05);
    let table = read_csv_table(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(table.header, ["t", "x", "y", "z", "A"]);
    assert_eq!(*table.column("t").unwrap().last().unwrap(), 100.0);
}

#[test]
fn phase_writes_field_orbits_and_chart() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("field.csv");
    let orbits = dir.path().join("orbits.csv");
    let svg = dir.path().join("phase.svg");
    let o = run(&[
        "phase",
        "--scenario",
        path_str(&scenario("basic_reference.json")),
        "--grid",
        "4,3",
        "--horizon",
        "50",
        "--out",
        path_str(&field),
        "--trajectories",
        path_str(&orbits),
        "--svg",
        path_str(&svg),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = read_csv_table(&std::fs::read_to_string(&field).unwrap()).unwrap();
    assert_eq!(f.header, ["K", "E", "dK", "dE"]);
    assert_eq!(f.rows.len(), 12);
    let t = read_csv_table(&std::fs::read_to_string(&orbits).unwrap()).unwrap();
    assert_eq!(t.header, ["orbit", "t", "K", "E"]);
    assert!(std::fs::metadata(&svg).unwrap().len() > 0);
}

#[test]
fn plot_draws_series_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let svg = dir.path().join("run.svg");
    let o = run(&[
        "simulate",
        "--scenario",
        path_str(&scenario("basic_unit_start.json")),
        "--out",
        path_str(&csv),
    ]);
    assert!(o.status.success());
    let o = run(&[
        "plot",
        "--csv",
        path_str(&csv),
        "--columns",
        "K,E",
        "--title",
        "a<b",
        "--out",
        path_str(&svg),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polyline").count(), 2);
    assert!(text.contains("a&lt;b"));
}

#[test]
fn invalid_scenario_exits_2_without_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &bad,
        r#"{"kind":"basic","params":{"s_k":0.7,"s_r":0.5,"delta_k":0.1,"delta_r":0.1,"alpha":0.2,"beta":0.3},"initial":{"K":1,"E":1},"horizon":10,"sample_step":1}"#,
    )
    .unwrap();
    let o = run(&[
        "simulate",
        "--scenario",
        path_str(&bad),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(!o.stderr.is_empty());

    std::fs::write(&bad, "{ not json").unwrap();
    let o = run(&["simulate", "--scenario", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3_without_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("short.json");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &bad,
        r#"{"kind":"basic","params":{"s_k":0.4,"s_r":0.1,"delta_k":0.15,"delta_r":0.25,"alpha":0.2,"beta":0.35},"initial":{"K":4,"E":1},"horizon":100,"sample_step":1,"integrator":{"rel_tol":1e-8,"abs_tol":1e-10,"max_steps":3}}"#,
    )
    .unwrap();
    let o = run(&[
        "simulate",
        "--scenario",
        path_str(&bad),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["simulate"]).status.code(), Some(1));
    assert_eq!(
        run(&["simulate", "--scenario", "/nonexistent/x.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn phase_rejects_malformed_ranges() {
    let o = run(&[
        "phase",
        "--scenario",
        path_str(&scenario("basic_reference.json")),
        "--grid",
        "4,3,2",
    ]);
    assert_eq!(o.status.code(), Some(1));
}
