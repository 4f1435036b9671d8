use std::path::Path;
use std::process::{Command, Output};

fn ridgephase(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridgephase"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn summary_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().parse().unwrap()))
        .unwrap_or_else(|| panic!("{key} missing in {text}"))
}

fn verdicts(summary: &str) -> Vec<(String, String)> {
    summary
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut parts = l.split_whitespace();
            (parts.next().unwrap().to_owned(), parts.next().unwrap().to_owned())
        })
        .collect()
}

#[test]
fn default_config_writes_a_ccd_sized_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridgephase(dir.path(), &["simulate", "--out", "sim"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pgm = std::fs::read(dir.path().join("sim/interferogram.pgm")).unwrap();
    let header = String::from_utf8_lossy(&pgm[..120]);
    assert!(header.starts_with("P5\n"));
    assert!(header.contains("\n640 480\n65535\n"), "{header}");
    assert_eq!(pgm.len() - header.find("65535\n").unwrap() - 6, 640 * 480 * 2);
    assert!(dir.path().join("sim/interferogram.rphase").exists());
    assert!(dir.path().join("sim/validity.txt").exists());
}

#[test]
fn collinear_pinholes_exit_with_physics_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "pinhole1 = 0, 0\npinhole2 = 1mm, 0\npinhole3 = 2mm, 0\n");
    let out = ridgephase(dir.path(), &["--config", &cfg, "simulate"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("collinear"));
}

#[test]
fn config_errors_exit_with_config_code_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "nx = 64\nwavelenght = 532nm\n");
    let out = ridgephase(dir.path(), &["--config", &cfg, "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn shorthand_states_match_explicit_components() {
    let dir = tempfile::tempdir().unwrap();
    let s = 3.0_f64.sqrt() / 2.0;
    let c = 90.0_f64.to_radians().cos();
    let grid = "nx = 96\nny = 64\ndx = 36um\ndy = 32um\n";
    let shorthand = write_config(dir.path(), &format!("{grid}states = paper:90\n"));
    let a = ridgephase(dir.path(), &["--config", &shorthand, "simulate", "--out", "a"]);
    assert!(a.status.success());
    let explicit = write_config(
        dir.path(),
        &format!("{grid}state1 = {s}, 0, 0, 0.5\nstate2 = 0, {s}, 0.5, 0\nstate3 = {c}, 0, 1, 0\n"),
    );
    let b = ridgephase(dir.path(), &["--config", &explicit, "simulate", "--out", "b"]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    for name in ["interferogram.pgm", "interferogram.rphase"] {
        let x = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert!(x == y, "{name} differs");
    }
}

#[test]
fn extract_round_trip_recovers_pi() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ridgephase(dir.path(), &["simulate", "--out", "sim"]).status.success());
    let out = ridgephase(dir.path(), &["extract", "sim/interferogram.rphase", "--out", "ext"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("ext/summary.txt")).unwrap();
    let phase = summary_value(&summary, "delta3_phase_route");
    let area = summary_value(&summary, "delta3_area_route");
    assert!((phase - std::f64::consts::PI).abs() < 1e-3, "{summary}");
    assert!((area - std::f64::consts::PI).abs() < 1e-3, "{summary}");
    for name in ["families.csv", "triangles.csv", "ridges.pgm"] {
        assert!(dir.path().join("ext").join(name).exists(), "{name}");
    }
}

#[test]
fn truncated_input_exits_with_format_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "nx = 64\nny = 48\ndx = 36um\ndy = 32um\n");
    assert!(ridgephase(dir.path(), &["--config", &cfg, "simulate", "--out", "sim"]).status.success());
    let full = std::fs::read(dir.path().join("sim/interferogram.rphase")).unwrap();
    std::fs::write(dir.path().join("cut.rphase"), &full[..full.len() / 2]).unwrap();
    let out = ridgephase(dir.path(), &["extract", "cut.rphase"]);
    assert_eq!(out.status.code(), Some(4));
    std::fs::write(dir.path().join("bad.rphase"), b"P5\n1 1\n255\n\0").unwrap();
    assert_eq!(ridgephase(dir.path(), &["extract", "bad.rphase"]).status.code(), Some(4));
}

#[test]
fn orthogonal_pair_warns_with_the_fringe_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "nx = 160\nny = 120\ndx = 36um\ndy = 32um\nstate1 = 1, 0, 0, 0\nstate2 = 0, 0, 1, 0\nstate3 = 0.7071067811865476, 0, 0.7071067811865476, 0\n",
    );
    assert!(ridgephase(dir.path(), &["--config", &cfg, "simulate", "--out", "sim"]).status.success());
    let out = ridgephase(dir.path(), &["--config", &cfg, "extract", "sim/interferogram.rphase", "--out", "ext"]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("warning") && stderr.contains("(1,2)"), "{stderr}");
}

#[test]
fn sweep_writes_one_row_per_angle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "nx = 320\nny = 240\ndx = 18um\ndy = 16um\nsweep_thetas_deg = 0:175:25\n");
    let out = ridgephase(dir.path(), &["--config", &cfg, "sweep", "--out", "sw"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sw/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8);
    for stem in ["theta_000.000", "theta_050.000", "theta_175.000"] {
        for suffix in ["_interferogram.pgm", "_ridges.pgm", "_families.csv", "_triangles.csv"] {
            assert!(dir.path().join("sw").join(format!("{stem}{suffix}")).exists(), "{stem}{suffix}");
        }
    }
    let summary = std::fs::read_to_string(dir.path().join("sw/summary.txt")).unwrap();
    assert!(summary.starts_with("# runs 8\n"));
    assert!(verdicts(&summary).iter().all(|(v, _)| v == "PASS"), "{summary}");

    let again = ridgephase(dir.path(), &["--config", &cfg, "sweep", "--out", "sw2"]);
    assert!(again.status.success());
    let csv2 = std::fs::read_to_string(dir.path().join("sw2/sweep.csv")).unwrap();
    assert_eq!(csv, csv2);
}

#[test]
fn empty_sweep_is_not_success() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep_thetas_deg =\n");
    let out = ridgephase(dir.path(), &["--config", &cfg, "sweep", "--out", "sw"]);
    assert_eq!(out.status.code(), Some(2));
    let summary = std::fs::read_to_string(dir.path().join("sw/summary.txt")).unwrap();
    assert_eq!(summary, "# runs 0\n");
}

#[test]
fn zero_gauge_shifts_leave_the_triangle_in_place() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "nx = 320\nny = 240\ndx = 18um\ndy = 16um\ngauge_shifts = 1:0, 2:0, 3:0\n");
    let out = ridgephase(dir.path(), &["--config", &cfg, "gauge", "--out", "g"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("g/gauge.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        for name in ["displacement_x", "displacement_y", "area_deviation"] {
            assert_eq!(row[col(name) - 1], 0.0, "{name}");
        }
    }
}

#[test]
fn seed_changes_pixels_but_not_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "nx = 320\nny = 240\ndx = 18um\ndy = 16um\nnoise_mean_counts = 2000\nnoise_seed = 1\nsweep_thetas_deg = 50, 90, 130\n",
    );
    let a = ridgephase(dir.path(), &["--config", &cfg, "sweep", "--out", "a"]);
    let b = ridgephase(dir.path(), &["--config", &cfg, "--seed", "99", "sweep", "--out", "b"]);
    assert!(a.status.success() && b.status.success());
    let pa = std::fs::read(dir.path().join("a/theta_090.000_interferogram.pgm")).unwrap();
    let pb = std::fs::read(dir.path().join("b/theta_090.000_interferogram.pgm")).unwrap();
    assert_ne!(pa, pb);
    let sa = std::fs::read_to_string(dir.path().join("a/summary.txt")).unwrap();
    let sb = std::fs::read_to_string(dir.path().join("b/summary.txt")).unwrap();
    assert_eq!(verdicts(&sa), verdicts(&sb));
    assert!(verdicts(&sa).iter().all(|(v, _)| v == "PASS"), "{sa}");
}

#[test]
fn unknown_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridgephase(dir.path(), &["simulate", "--bogus"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
}

#[test]
fn help_lists_every_global_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridgephase(dir.path(), &["--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--config", "--out", "--seed", "--threads", "simulate", "extract", "sweep", "gauge"] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
}
