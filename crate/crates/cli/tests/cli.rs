use std::path::Path;
use std::process::{Command, Output};

fn nearfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nearfield"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// d_F reported for `method` in `solve` output.
fn solved(text: &str, method: &str) -> f64 {
    text.lines()
        .find_map(|l| {
            let mut parts = l.split_whitespace();
            (parts.next() == Some(method)).then(|| parts.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no `{method}` row in\n{text}"))
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn solve_reproduces_aligned_baselines() {
    let o = nearfield(&["solve", "--wavelength", "1e-3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(solved(&text, "approx"), 90.0);
    assert_eq!(solved(&text, "exact"), 90.0);
    assert!((solved(&text, "sim") - 90.0).abs() / 90.0 < 0.02);

    let o = nearfield(&[
        "solve",
        "--scenario",
        "ula",
        "--wavelength",
        "1e-3",
        "--method",
        "approx",
    ]);
    assert!(o.status.success());
    assert_eq!(solved(&stdout(&o), "approx"), 45.0);
}

#[test]
fn ula_quarter_turn_accepts_rounded_angle() {
    let o = nearfield(&[
        "solve",
        "--scenario",
        "ula",
        "--wavelength",
        "1e-3",
        "--theta",
        "1.5708",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!((solved(&text, "approx") - 20.0).abs() < 1e-6);
    assert!((solved(&text, "sim") - 20.0).abs() / 20.0 < 0.02);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["solve", "--bogus"][..],
        &["solve", "--scenario", "hex"],
        &["solve", "--theta", "2.0"],
        &["solve", "--scenario", "ula", "--phi", "0.1"],
        &["solve", "--d1", "0.1", "--preset-ap", "wifi"],
        &["solve", "--freq", "1e9", "--wavelength", "0.3"],
        &["solve", "--rel-tol", "0"],
        &["solve", "--theta", "0.2", "--phi", "0.2", "--method", "exact"],
        &["sweep", "--kind", "df-vs-d2", "--count", "1"],
        &["sweep", "--kind", "df-vs-d2", "--start", "0.05", "--stop", "0.01"],
        &["heatmap", "--scenario", "ula"],
    ] {
        let o = nearfield(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn computation_failures_exit_with_one() {
    // Closer than the rotated UE reaches.
    let o = nearfield(&["spread", "--separation", "0.001", "--theta", "1.0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn preset_theta_variation() {
    for (ue, want) in [("tablet", 0.180), ("smartphone", 0.067)] {
        let o = nearfield(&[
            "sweep",
            "--kind",
            "df-vs-theta",
            "--preset-ap",
            "cellular",
            "--preset-ue",
            ue,
            "--wavelength",
            "1e-3",
            "--method",
            "approx",
        ]);
        assert!(o.status.success());
        let (header, rows) = csv_rows(&stdout(&o));
        assert_eq!(header, ["theta_rad", "df_approx_m"]);
        assert_eq!(rows.len(), 181);
        let values: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        let min = values.iter().copied().fold(f64::MAX, f64::min);
        assert!(((max - min) / max - want).abs() <= 0.002, "{ue}: {}", (max - min) / max);
    }
}

#[test]
fn heatmap_corners() {
    let o = nearfield(&["heatmap", "--wavelength", "1e-3", "--method", "approx", "--count", "5"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["theta_rad", "phi_rad", "df_approx_m"]);
    assert_eq!(rows.len(), 25);
    let at = |t: f64, p: f64| -> f64 {
        rows.iter()
            .find(|r| {
                (r[0].parse::<f64>().unwrap() - t).abs() < 1e-6 && (r[1].parse::<f64>().unwrap() - p).abs() < 1e-6
            })
            .map(|r| r[2].parse().unwrap())
            .unwrap()
    };
    let h = std::f64::consts::FRAC_PI_2;
    assert!((at(0.0, 0.0) - 90.0).abs() < 1e-6);
    for (t, p) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
        assert!((at(t, p) - 65.0).abs() < 1e-6, "({t}, {p})");
    }
}

#[test]
fn heatmap_leaves_exact_blank_off_axis() {
    let o = nearfield(&[
        "heatmap",
        "--wavelength",
        "1e-3",
        "--d1",
        "0.01",
        "--d2",
        "0.005",
        "--count",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(
        header,
        ["theta_rad", "phi_rad", "df_sim_m", "df_exact_m", "df_approx_m"]
    );
    for r in rows {
        let phi: f64 = r[1].parse().unwrap();
        assert_eq!(r[3].is_empty(), phi != 0.0, "{r:?}");
        assert!(!r[2].is_empty() && !r[4].is_empty());
    }
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = nearfield(&[
            "sweep",
            "--kind",
            "df-vs-d2",
            "--d1",
            "0.03",
            "--theta",
            "0.4",
            "--count",
            "6",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(&path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(
        text.lines().next().unwrap(),
        "d2_m,d2_effective_m,df_sim_m,df_exact_m,df_approx_m"
    );
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn spread_sweep_tracks_closed_form() {
    let o = nearfield(&[
        "sweep",
        "--kind",
        "spread-vs-d",
        "--scenario",
        "ula",
        "--theta",
        "0.7",
        "--count",
        "9",
    ]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    for r in rows {
        let v: Vec<f64> = r.iter().map(|c| c.parse().unwrap()).collect();
        assert!((v[1] - v[2]).abs() / v[2] < 0.02, "{v:?}");
    }
}

#[test]
fn dump_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.conf");
    let o = nearfield(&[
        "solve",
        "--dump-config",
        "--preset-ap",
        "wifi",
        "--d2",
        "0.0123",
        "--theta",
        "-17.3",
        "--phi",
        "61",
        "--degrees",
        "--mode",
        "full",
        "--rel-tol",
        "3e-5",
        "--freq",
        "2.875e11",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let dumped = std::fs::read_to_string(&first).unwrap();

    let o = nearfield(&["solve", "--dump-config", "--config", first.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), dumped);

    // Flags override file values.
    let o = nearfield(&[
        "solve",
        "--dump-config",
        "--config",
        first.to_str().unwrap(),
        "--d1",
        "0.2",
    ]);
    assert!(stdout(&o).contains("d1=0.2\n"));
}

#[test]
fn config_file_drives_solve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ula.conf");
    std::fs::write(
        &path,
        "# linear baseline\nscenario=ula\nwavelength=0.001\nmethod=exact\n",
    )
    .unwrap();
    let o = nearfield(&["solve", "--config", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(solved(&stdout(&o), "exact"), 45.0);

    std::fs::write(&path, "colour=blue\n").unwrap();
    assert_eq!(
        nearfield(&["solve", "--config", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    assert!(!Path::new(&path).parent().unwrap().exists());
    let o = nearfield(&["solve", "--method", "approx", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_passes_and_detects_a_perturbed_formula() {
    let o = nearfield(&["validate"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 9, "{text}");

    let o = nearfield(&["validate", "--perturb", "0.01"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    for id in ["#1", "#4"] {
        assert!(
            text.lines().any(|l| l.starts_with("FAIL") && l.contains(id)),
            "{id} should fail:\n{text}"
        );
    }
}
