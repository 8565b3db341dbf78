use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_forest-spectra"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["estimate"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let missing = dir.path().join("missing.txt");
    let o = run(&["estimate", "--graph", p(&missing), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["estimate", "--generator", "path:n=5", "--mode", "bogus", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["exact", "--generator", "path:n=50", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["sample", "--generator", "path:n=5", "--qmin", "1", "--qmax", "2", "--grid", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_then_exact() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("star.txt");
    let o = run(&["generate", "star", "n=5", "-o", p(&g)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["exact", "--graph", p(&g)]);
    assert!(o.status.success());
    let eigs: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    let expected = [0.0, 1.0, 1.0, 1.0, 5.0];
    assert_eq!(eigs.len(), 5);
    for (a, b) in eigs.iter().zip(expected) {
        assert!((a - b).abs() < 1e-9, "{eigs:?}");
    }
}

#[test]
fn estimate_writes_report_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for (i, extra) in [["--sequential"], ["--isotonic"]].iter().enumerate() {
        let out = dir.path().join(format!("r{i}.csv"));
        let mut args = vec![
            "estimate", "--generator", "er:n=40,p=0.2", "--samples", "40", "--eps0", "0.1", "--seed", "3",
            "--exact", "-o", p(&out),
        ];
        args.extend(extra.iter());
        let o = run(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(dir.path().join(format!("r{i}.json")).exists());
        assert!(dir.path().join(format!("r{i}.moments.csv")).exists());
        csvs.push(fs::read_to_string(&out).unwrap());
    }
    let header = csvs[0].lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("q,abscissa,a,k_valid,k_used,method"));
    let rows = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| {
                // Drop prediction_isotonic, which only the second run fills.
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(12);
                f.join(",")
            })
            .collect()
    };
    assert_eq!(rows(&csvs[0]), rows(&csvs[1]));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r0.json")).unwrap()).unwrap();
    assert_eq!(json["report"]["n"], 40);
}

#[test]
fn symmetric_embed_and_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.mtx");
    fs::write(
        &m,
        "%%MatrixMarket matrix coordinate real symmetric\n4 4 7\n1 1 -3\n2 2 -2\n3 3 -4\n4 4 -1\n2 1 1.5\n3 2 -1\n4 3 0.5\n",
    )
    .unwrap();
    let prefix = dir.path().join("cover");
    let o = run(&["embed", "--matrix", p(&m), "-o", p(&prefix)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("shift "));
    assert!(dir.path().join("cover.l1.txt").exists());
    assert!(dir.path().join("cover.l2.txt").exists());

    let out = dir.path().join("s.csv");
    let o = run(&[
        "estimate", "--graph", p(&m), "--mode", "symmetric", "--samples", "40", "--eps0", "0.2", "--exact",
        "-o", p(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("s.l1.moments.csv").exists());
    assert!(dir.path().join("s.l2.moments.csv").exists());
}

#[test]
fn moments_check_reports_interval() {
    let dir = tempfile::tempdir().unwrap();
    let j = dir.path().join("m.json");
    fs::write(&j, r#"{"a": 0, "b": 1, "moments": [1, 0.5, 0.3]}"#).unwrap();
    let o = run(&["moments", "check", "--json", p(&j)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["regularity"], "Regular");
    assert_eq!(v["k_valid"], 2);
    // Next-moment window for (1/2, 3/10) on [0, 1].
    let (lo, hi) = (v["next_moment_interval"][0].as_f64().unwrap(), v["next_moment_interval"][1].as_f64().unwrap());
    assert!((lo - 0.18).abs() < 1e-12 && (hi - 0.22).abs() < 1e-12);
}

#[test]
fn bench_and_sample_emit_costs() {
    let o = run(&["bench", "--generator", "complete:n=2", "--q0", "1", "--trajectories", "200"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["expected_sampled"].as_f64().unwrap() - 8.0 / 3.0).abs() < 1e-9);

    let o = run(&["sample", "--generator", "path:n=6", "--qmin", "0.1", "--qmax", "10", "--grid", "0.5,2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("q,roots\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
}
