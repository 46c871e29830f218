use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_switchover");

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

/// Header and data rows of a CSV written by the tool, skipping `#` lines.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = run(&["landscape", "--theta-deg", "95", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    let o = run(&["spectrum", "--intensity-wcm2", "4e14", "--intensity-au", "0.01"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn landscape_places_b_near_the_field_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["landscape", "--theta-deg", "45", "--grid-res", "20", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let (h, rows) = read_csv(&dir.path().join("saddles.csv"));
    let b = rows.iter().find(|r| r[col(&h, "label")] == "B").expect("B saddle");
    let re: f64 = b[col(&h, "re_wt")].parse().unwrap();
    let im: f64 = b[col(&h, "im_wt")].parse().unwrap();
    assert!(re.abs() < 0.02 && (im - 1.05).abs() < 0.05, "{re} {im}");
    let contributing = rows.iter().filter(|r| r[col(&h, "contributes")] == "1").count();
    assert_eq!(contributing, 4);

    let (h, rows) = read_csv(&dir.path().join("landscape.csv"));
    assert_eq!(h, ["re_wt", "im_wt", "imS", "reS"]);
    assert_eq!(rows.len(), 20 * 10);
}

#[test]
fn small_angle_contour_has_two_saddles() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["landscape", "--theta-deg", "8", "--grid-res", "4", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let (h, rows) = read_csv(&dir.path().join("saddles.csv"));
    let on: Vec<&str> = rows
        .iter()
        .filter(|r| r[col(&h, "contributes")] == "1")
        .map(|r| r[col(&h, "label")].as_str())
        .collect();
    assert_eq!(on, ["A", "D"]);
}

#[test]
fn json_output_carries_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "switchover",
        "--theta-list",
        "10,30",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("switchover.json")).unwrap();
    assert!(text.contains("\"schema_version\""));
    assert!(text.contains("theta_star_deg"));
    assert!(text.contains("\"command\""));
}

#[test]
fn single_angle_sweep_reports_no_coalescence() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["switchover", "--theta-list", "30", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("switchover.csv")).unwrap();
    assert!(text.contains("# coalescence: none"), "{text}");
    let (h, rows) = read_csv(&dir.path().join("switchover.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][col(&h, "theta_deg")].parse::<f64>().unwrap(), 30.0);
}

#[test]
fn trajectories_start_at_the_saddle() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["trajectories", "--p-min", "0", "--p-max", "0", "--p-count", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = read_csv(&dir.path().join("trajectory_exits.csv"));
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let x: f64 = r[col(&h, "x_exit")].parse().unwrap();
        assert!(x.abs() > 1e-6);
    }
}
