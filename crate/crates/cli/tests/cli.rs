use std::path::Path;
use std::process::{Command, Output};

fn biharm(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biharm"))
        .args(args)
        .env("BIHARM_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn iota_prints_six_digits() {
    let dir = tempfile::tempdir().unwrap();
    let o = biharm(&["iota"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("R_star=0.533543\n"), "{s}");
    assert!(s.contains("iota=0.112814\n"), "{s}");
    assert!(s.contains("lambert_residual="));
}

#[test]
fn radial_reports_branch() {
    let dir = tempfile::tempdir().unwrap();
    let s = stdout(&biharm(&["radial", "--u0", "0.1"], dir.path()));
    assert!(s.starts_with("u0=0.1 R=0.58237"), "{s}");
    assert!(s.contains("branch=two-phase"));
    let s = stdout(&biharm(&["radial", "--u0", "0.3"], dir.path()));
    assert!(s.contains("R=constant"), "{s}");
    assert!(s.contains("energy=3.14159265"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = biharm(&["radial", "--u0", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).trim(), "error: u0 must be positive");

    let o = biharm(&["radial", "--u0", "x1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("malformed number"));

    let o = biharm(&["radial"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing required field u0"));

    let o = biharm(&["radial", "--u0", "0.1", "--nope"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(biharm(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn sweep_matches_table_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = biharm(&["sweep", "--u0-range", "0.01:0.112:0.001"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let rows: Vec<Vec<&str>> = s.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(s.lines().next(), Some("u0,R,energy,branch"));
    assert_eq!(rows.len(), 103);
    for (u0, r, e) in [(0.01, 0.924036, 0.682707), (0.08, 0.654679, 2.56739), (0.112, 0.536733, 3.12866)] {
        let row = rows
            .iter()
            .find(|row| (row[0].parse::<f64>().unwrap() - u0).abs() < 1e-9)
            .expect("table u0 on the sweep");
        assert!((row[1].parse::<f64>().unwrap() - r).abs() <= 1e-5);
        assert!((row[2].parse::<f64>().unwrap() - e).abs() <= 1e-4);
        assert_eq!(row[3], "two-phase");
    }
}

#[test]
fn sweep_output_is_stable_and_config_file_works() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep settings\nu0_range = 0.005:0.115:0.005\nformat = csv\n").unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let o = biharm(&["sweep", "--config", cfg.to_str().unwrap(), "--output", path.to_str().unwrap()], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert_eq!(text.lines().count(), 24);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    // The last points lie above the nonuniqueness level.
    assert!(text.lines().last().unwrap().ends_with(",constant"));

    std::fs::write(&cfg, "u0 = 0.1\nspeed = 3\n").unwrap();
    let o = biharm(&["radial", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown key `speed`"));

    // Flags override file values.
    std::fs::write(&cfg, "u0 = 0.3\n").unwrap();
    let o = biharm(&["radial", "--config", cfg.to_str().unwrap(), "--u0", "0.1"], dir.path());
    assert!(stdout(&o).starts_with("u0=0.1 "));
}

#[test]
fn profile_has_one_interior_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = biharm(&["profile", "--u0", "0.07"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().next(), Some("r,u,laplacian"));
    let rows: Vec<[f64; 3]> = s
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    assert!(rows.len() >= 1000);
    let changes = rows.windows(2).filter(|w| (w[0][1] > 0.0) != (w[1][1] > 0.0)).count();
    assert_eq!(changes, 1);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert!((last[1] - 0.07).abs() < 1e-9);
    assert!(last[2].abs() < 1e-9);
}

#[test]
fn grid_writes_field_and_contour() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = biharm(&["grid", "--u0", "0.05", "--n", "401", "--output", out.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("components=1"));
    let field = std::fs::read_to_string(out.join("field.csv")).unwrap();
    assert_eq!(field.lines().next(), Some("r,u"));
    assert_eq!(field.lines().count(), 402);
    let contour = std::fs::read_to_string(out.join("contour.csv")).unwrap();
    let mut lines = contour.lines();
    assert_eq!(lines.next(), Some("component,r"));
    let r: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((r - 0.761027).abs() < 1e-3, "{r}");

    // Disk grid through the environment output directory.
    let o = biharm(&["grid", "--u0", "0.05", "--n", "33", "--domain", "disk"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let contour = std::fs::read_to_string(dir.path().join("contour.csv")).unwrap();
    assert_eq!(contour.lines().next(), Some("component,x,y"));
    assert!(contour.lines().count() > 10);
}

#[test]
fn grid_non_convergence_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = biharm(&["grid", "--u0", "0.05", "--n", "401", "--max-iters", "1", "--grad-tol", "1e-14"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(dir.path().join("field.csv").exists());
}

#[test]
fn verify_structural_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = biharm(&["verify", "--preset", "structural", "--n", "401", "--output", report.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("\"checks\""));
    assert!(text.contains("\"environment\""));
    assert!(text.contains("\"anchor\""));
    assert!(stdout(&o).contains("PASS table-row-u0=0.112"));
}

#[test]
fn verify_failure_exits_two_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    // The coarse preset misses several grid tolerances.
    let o = biharm(&["verify", "--preset", "coarse"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL "));
    assert!(dir.path().join("report.json").exists());
}
