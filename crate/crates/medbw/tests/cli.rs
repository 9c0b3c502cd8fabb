use std::path::Path;
use std::process::{Command, Output};

fn medbw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medbw")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Header and data rows of a CSV file, metadata stripped.
fn rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let body = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, body)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, body) = rows(path);
    let i = header.iter().position(|h| h == name).unwrap();
    body.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn dry_run_prints_config_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2.csv");
    let o = medbw(&["figure2", "--dry-run", "--mu", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("command = figure2"));
    assert!(text.contains("mu = 3"));
    assert!(text.contains("seed = "));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn bad_configuration_exits_with_two_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# comment\nalpha = 0.5\nreplicates = many\n").unwrap();
    let o = medbw(&["gap-check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("replicates"), "{}", stderr(&o));

    let o = medbw(&["figure2", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha"));

    let o = medbw(&["figure2", "--grid-mu", "3,2,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid-mu"));

    let o = medbw(&["figure2", "--format", "xml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "mu = 4\nalpha = 0.3\n").unwrap();
    let o = medbw(&["figure2", "--dry-run", "--config", cfg.to_str().unwrap(), "--mu", "6"]);
    let text = stdout(&o);
    assert!(text.contains("mu = 6") && text.contains("alpha = 0.3"), "{text}");
}

#[test]
fn dry_run_output_is_a_valid_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("resolved.cfg");
    let first = stdout(&medbw(&["figure5", "--dry-run", "--grid-sigma2", "2,3"]));
    std::fs::write(&cfg, &first).unwrap();
    let second = stdout(&medbw(&["figure5", "--dry-run", "--config", cfg.to_str().unwrap()]));
    assert_eq!(first, second);
}

#[test]
fn csv_output_carries_metadata_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = medbw(&["figure2", "--scenario", "mean", "--grid-mu", "1,2,5", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("# medbw "));
    assert!(text.contains("# grid-mu = 1,2,5"));
    let (header, body) = rows(&a);
    assert_eq!(header[..4], ["mu", "nu_med", "nu_u", "nu_lin"]);
    assert_eq!(body.len(), 3);
    let strip = |t: &str| t.lines().filter(|l| !l.starts_with("# out = ")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&text), strip(&std::fs::read_to_string(&b).unwrap()));
}

#[test]
fn json_output_has_config_and_panels() {
    let o = medbw(&["gap-check", "--format", "json", "--replicates", "1000", "--grid-lambda", "100,400"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "gap-check");
    assert_eq!(v["config"]["replicates"], 1000);
    assert_eq!(v["panels"][0]["rows"].as_array().unwrap().len(), 2);
    assert!(v["version"].is_string());
}

#[test]
fn figure2_null_row_is_flagged_but_has_a_median_bandwidth() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2.csv");
    let o = medbw(&["figure2", "--scenario", "mean", "--grid-mu", "0,0.05,1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("flat"));
    let (header, body) = rows(&out);
    let flat = header.iter().position(|h| h == "flat_u").unwrap();
    assert_eq!(body[0][flat], "true");
    assert!(column(&out, "nu_med").iter().all(|v| v.is_finite() && *v > 0.0));
}

#[test]
fn figure4_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f4.csv");
    let o = medbw(&["figure4", "--grid-mu", "0.1,10", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cdf_path = dir.path().join("f4_cdf.csv");
    let mu = column(&cdf_path, "mu");
    let t = column(&cdf_path, "t");
    let f = column(&cdf_path, "cdf");
    for target in [0.1, 10.0] {
        let curve: Vec<(f64, f64)> =
            mu.iter().zip(t.iter().zip(&f)).filter(|(m, _)| **m == target).map(|(_, (t, f))| (*t, *f)).collect();
        assert!(curve.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(curve.last().unwrap().1 >= 0.999);
        if target == 10.0 {
            // Between the two rises the CDF sits at the intra-segment mass 1/2.
            let mid: Vec<f64> = curve.iter().filter(|(t, _)| (20.0..=30.0).contains(t)).map(|c| c.1).collect();
            assert!(mid.iter().all(|v| (v - 0.5).abs() < 1e-3), "{mid:?}");
        }
    }
    let rq = dir.path().join("f4_rquad.csv");
    let mu = column(&rq, "mu");
    let ratio = column(&rq, "ratio");
    let peak = |m: f64| mu.iter().zip(&ratio).filter(|(x, _)| **x == m).map(|(_, r)| *r).fold(0.0, f64::max);
    assert!(peak(10.0) > 100.0 * peak(0.1));
}

#[test]
fn figure1_single_replicate_has_zero_spread() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f1.csv");
    let o = medbw(&["figure1", "--replicates", "1", "--n", "100", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    for panel in ["mean", "var"] {
        let p = dir.path().join(format!("f1_{panel}.csv"));
        assert!(column(&p, "sd_count").iter().all(|&v| v == 0.0));
        assert_eq!(column(&p, "mean_count").iter().sum::<f64>(), 4950.0);
    }
}

#[test]
fn figure3_null_parameter_gives_zero_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f3.csv");
    let o = medbw(&[
        "figure3", "--scenario", "mean", "--grid-mu", "0,2", "--lambda1-points", "100", "--lambda1-reps", "2", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["abs_quad_med_mean", "abs_quad_pow_mean", "abs_lin_med", "abs_lin_pow"] {
        let c = column(&out, name);
        assert_eq!(c[0], 0.0);
        assert!(c[1] > 0.0);
    }
}

#[test]
fn bandwidth_from_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("points.csv");
    std::fs::write(&input, "x\n0\n1\n2\n").unwrap();
    let o = medbw(&["bandwidth", "--input", input.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("input,")).unwrap();
    // Pairwise squared distances {1, 1, 4}: H = 1 and ν = √(1/2).
    assert_eq!(row, format!("input,median_heuristic,3,1,1.0,{:?}", 0.5f64.sqrt()));
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("same.csv");
    std::fs::write(&input, "x,y\n1,1\n1,1\n1,1\n").unwrap();
    let o = medbw(&["bandwidth", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let o = medbw(&["figure2", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/run.cfg"));
}

#[test]
fn default_clt_suite_passes_its_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("clt.csv");
    let o = medbw(&["clt-suite", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = dir.path().join("clt_summary.csv");
    let (header, body) = rows(&summary);
    let passed = header.iter().position(|h| h == "passed").unwrap();
    let failed: Vec<_> = body.iter().filter(|r| r[passed] != "true").collect();
    assert!(failed.is_empty(), "{failed:?}");
}
