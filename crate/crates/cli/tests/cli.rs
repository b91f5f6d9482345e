use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tacton-sim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_tacton(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p
}

const AM_STM: &str = r#"{
  "amplitude": 0.8,
  "am_frequencies": [140],
  "total_duration_s": 0.25,
  "shape": "circle",
  "size_mm": 20,
  "drawing_speed_mps": 12
}"#;

const DEGENERATE: &str = r#"{
  "amplitude": 1,
  "am_frequencies": [0],
  "total_duration_s": 1,
  "shape": "point",
  "size_mm": 0
}"#;

fn simulate(dir: &Path, tacton: &Path, extra: &[&str]) -> Output {
    let out = dir.join("out");
    let mut args = vec![
        "simulate",
        "--tacton",
        tacton.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    run(&args)
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn degenerate_tacton_exits_2() {
    let tmp = TempDir::new().unwrap();
    let t = write_tacton(tmp.path(), "silent.json", DEGENERATE);
    let o = simulate(tmp.path(), &t, &["--points", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("silent.json"), "{err}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn missing_file_exits_3_and_bad_points_exit_2() {
    let tmp = TempDir::new().unwrap();
    let o = simulate(
        tmp.path(),
        &tmp.path().join("nope.json"),
        &["--points", "0,0"],
    );
    assert_eq!(o.status.code(), Some(3));
    let t = write_tacton(tmp.path(), "a.json", AM_STM);
    assert_eq!(
        simulate(tmp.path(), &t, &["--points", "0;1"]).status.code(),
        Some(2)
    );
    assert_eq!(simulate(tmp.path(), &t, &[]).status.code(), Some(2));
    assert_eq!(
        simulate(tmp.path(), &t, &["--points", "99,0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn quarter_second_gives_5000_rows() {
    let tmp = TempDir::new().unwrap();
    let t = write_tacton(tmp.path(), "amstm.json", AM_STM);
    let o = simulate(
        tmp.path(),
        &t,
        &["--points", "10,0;0,0", "--floor-db", "-40"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = tmp.path().join("out");
    let wave = fs::read_to_string(out.join("amstm_p0_waveform.csv")).unwrap();
    let mut lines = wave.lines();
    assert_eq!(lines.next(), Some("t_s,p"));
    assert_eq!(lines.count(), 5000);
    let spec = fs::read_to_string(out.join("amstm_p0_spectrum.csv")).unwrap();
    assert!(spec.starts_with("f_hz,magnitude\n"));
    assert_eq!(spec.lines().count(), 1 + 2501);
    let analysis: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("amstm_analysis.json")).unwrap())
            .unwrap();
    assert_eq!(analysis["points"][0]["classification"], "AMSTMLike");
    let f_d = analysis["derived"]["drawing_frequency_hz"]
        .as_f64()
        .unwrap();
    assert!((f_d - 190.985_931_710_274_4).abs() < 1e-9);
}

#[test]
fn optional_outputs() {
    let tmp = TempDir::new().unwrap();
    let t = write_tacton(tmp.path(), "amstm.json", AM_STM);
    let o = simulate(
        tmp.path(),
        &t,
        &["--grid", "2", "--command", "--trajectory"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = tmp.path().join("out");
    let grid: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("amstm_grid.json")).unwrap()).unwrap();
    assert_eq!(grid["spacing_mm"], 2.0);
    let command = fs::read_to_string(out.join("amstm_command.csv")).unwrap();
    assert_eq!(command.lines().count(), 1 + 80_000);
    let traj = fs::read_to_string(out.join("amstm_trajectory.csv")).unwrap();
    assert!(
        traj.starts_with("t_s,x_mm,y_mm\n0,10,0\n"),
        "{}",
        &traj[..40]
    );
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let t = write_tacton(tmp.path(), "amstm.json", AM_STM);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4", "4"].iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let o = bin()
            .env("TACTON_SIM_THREADS", threads)
            .args([
                "simulate",
                "--tacton",
                t.to_str().unwrap(),
                "--points",
                "10,0;5,0",
                "--grid",
                "1",
            ])
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(o.status.success());
        outputs.push(read_dir_sorted(&out));
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = bin()
        .env("TACTON_SIM_THREADS", "many")
        .arg("shapes")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shapes_lists_five() {
    let o = run(&["shapes"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "point",
            "horizontal_line",
            "circle",
            "regular_triangle",
            "square"
        ]
    );
}

fn compare(sim: &Path, measured: &Path, out: &Path) -> Output {
    bin()
        .args(["compare", "--sim"])
        .arg(sim)
        .arg("--measured")
        .arg(measured)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn compare_round_trip_and_errors() {
    let tmp = TempDir::new().unwrap();
    let t = write_tacton(tmp.path(), "amstm.json", AM_STM);
    assert!(simulate(tmp.path(), &t, &["--points", "10,0"])
        .status
        .success());
    let sim = tmp.path().join("out");
    let measured = tmp.path().join("measured");
    fs::create_dir(&measured).unwrap();
    fs::copy(
        sim.join("amstm_p0_waveform.csv"),
        measured.join("amstm_p0_waveform.csv"),
    )
    .unwrap();
    fs::copy(
        sim.join("amstm_p0_spectrum.csv"),
        measured.join("amstm_p0_spectrum.csv"),
    )
    .unwrap();
    fs::write(
        measured.join("amstm_p0_spectrum.json"),
        r#"{"notes": "copied"}"#,
    )
    .unwrap();

    let reports = tmp.path().join("reports");
    let o = compare(&sim, &measured, &reports);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for stem in ["amstm_p0_waveform", "amstm_p0_spectrum"] {
        let r: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(reports.join(format!("{stem}.comparison.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(r["report"]["explained_fraction"], 1.0, "{stem}");
    }
    let md = fs::read_to_string(reports.join("comparison.md")).unwrap();
    assert_eq!(md.lines().count(), 4);

    // a measurement without a simulated counterpart
    fs::write(
        measured.join("orphan.csv"),
        "t_s,displacement_um\n0,1\n0.001,2\n",
    )
    .unwrap();
    let o = compare(&sim, &measured, &reports);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("orphan"));
    fs::remove_file(measured.join("orphan.csv")).unwrap();

    // malformed measurement
    fs::write(
        measured.join("amstm_p0_spectrum.csv"),
        "f_hz,magnitude\n0,1\nabc,2\n",
    )
    .unwrap();
    let o = compare(&sim, &measured, &reports);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("amstm_p0_spectrum.csv"));

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(compare(&sim, &empty, &reports).status.code(), Some(2));
}
