use std::path::Path;
use std::process::{Command, Output};

fn hypconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypconv")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn hull_with_no_iterations_returns_seeds() {
    let out = hypconv(&["hull", "--space", "e2", "--seeds", "0,0;1,0;0,1", "--iterations", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "kind,x,y,h,gen,parent1,parent2\ne2,0,0,,1,,\ne2,1,0,,1,,\ne2,0,1,,1,,\n");
}

#[test]
fn triangle_cloud_stays_in_triangle() {
    let out = hypconv(&["hull", "--space", "e2", "--seeds", "0,0;1,0;0,1", "--iterations", "2", "--res", "0.05"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows.len() > 100);
    for row in rows {
        let c: Vec<&str> = row.split(',').collect();
        let (x, y): (f64, f64) = (c[1].parse().unwrap(), c[2].parse().unwrap());
        assert!(x >= -1e-9 && y >= -1e-9 && x + y <= 1.0 + 1e-9, "{row}");
    }
}

#[test]
fn threads_do_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let runs = [("4", "a.csv"), ("4", "b.csv"), ("1", "c.csv")];
    let mut outputs = Vec::new();
    for (threads, name) in runs {
        let file = path(dir.path(), name);
        let out = hypconv(&[
            "--threads", threads, "hull", "--space", "h2xr", "--seeds", "0,3,0;4,5,1;-4,5,1", "--iterations", "2",
            "--res", "0.02", "--out", &file,
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&file).unwrap());
    }
    assert!(outputs[0].len() > 1000);
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn seeds_file_and_slices() {
    let dir = tempfile::tempdir().unwrap();
    let seeds = path(dir.path(), "exotic.csv");
    std::fs::write(&seeds, "kind,x,y,h,gen,parent1,parent2\nh2xr,0,3,0,1,,\nh2xr,4,5,1,1,,\nh2xr,-4,5,1,1,,\n").unwrap();
    let cloud = path(dir.path(), "cloud.csv");
    let out = hypconv(&["hull", "--seeds-file", &seeds, "--iterations", "2", "--res", "0.03", "--out", &cloud]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let out = hypconv(&["slice", "--cloud", &cloud, "--plane", "0,3;0,6.4031242374328485", "--plane-tol", "0.01"]);
    assert_eq!(code(&out), 0);
    let ar = stdout(&out);
    assert!(ar.starts_with("s,h\n") && ar.lines().count() > 10);

    let out = hypconv(&["slice", "--cloud", &cloud, "--plane", "1,4;-1,4", "--plane-tol", "0.01"]);
    let eps1 = 1.0 - 2f64.ln() / 3f64.ln();
    let pq = stdout(&out);
    let heights: Vec<f64> = pq.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(!heights.is_empty());
    // Sparse clouds sit close to the level eps1 over [p, q], never far below it.
    assert!(heights.iter().all(|h| *h > eps1 - 0.02), "{heights:?}");

    let out = hypconv(&["slice", "--cloud", &cloud, "--plane", "1,4;-1,4", "--plane-tol", "0"]);
    assert_eq!(stdout(&out), "s,h\n");

    let out = hypconv(&["slice", "--cloud", &cloud, "--plane", "1,4;1,4"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn convert_round_trip() {
    let out = hypconv(&["convert", "--to", "klein", "--points", "0,1"]);
    assert_eq!(stdout(&out), "u,v\n0,0\n");
    let dir = tempfile::tempdir().unwrap();
    let input = path(dir.path(), "k.csv");
    std::fs::write(&input, "u,v\n0,0\n0.5,-0.25\n").unwrap();
    let out = hypconv(&["convert", "--to", "half-plane", "--input", &input]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("x,y\n0,1\n"), "{text}");
    assert_eq!(code(&hypconv(&["convert", "--to", "half-plane", "--points", "1,0"])), 1);
}

#[test]
fn axioms_pass() {
    for space in ["e2", "h2", "h2xr"] {
        let out = hypconv(&["axioms", "--space", space, "--samples", "1000", "--seed", "42"]);
        assert_eq!(code(&out), 0, "{space}: {}", stdout(&out));
        assert_eq!(stdout(&out).matches(" 0 violations").count(), 3);
    }
}

#[test]
fn counterexample_exit_codes() {
    let out = hypconv(&["counterexample", "--iterations", "0", "--res", "0.05", "--delta", "0.1"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("[FAIL] X1 covered by the hull"));

    // Coarse sampling leaves no drop point over the window: the gap is inconclusive.
    let out = hypconv(&["counterexample", "--iterations", "1", "--res", "0.5", "--delta", "0.6"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("inconclusive"));

    assert_eq!(code(&hypconv(&["counterexample", "--res", "0.05", "--delta", "0.01"])), 1);
    let out = hypconv(&["counterexample", "--res", "0.006", "--delta", "0.01", "--max-points", "1000"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn counterexample_report_record() {
    let dir = tempfile::tempdir().unwrap();
    let report = path(dir.path(), "report.json");
    let out = hypconv(&["counterexample", "--iterations", "1", "--res", "0.02", "--delta", "0.05", "--report", &report]);
    let text = stdout(&out);
    assert!(text.contains("eps1 < 2/5") && text.contains("eps2 > 2/5"));
    let record: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(record["parameters"]["res"], 0.02);
    assert_eq!(record["epsilons"]["eps1"], 1.0 - 2f64.ln() / 3f64.ln());
    assert_eq!(record["incidences"]["stated_pair_intersects"], false);
    assert_eq!(record["passed"].as_bool().unwrap(), code(&out) == 0);
}

fn write_fn(dir: &Path, name: &str, f: impl Fn(f64) -> f64) -> String {
    let mut text = String::from("x1,value\n");
    for k in 0..=40 {
        let x = -1.0 + 0.05 * k as f64;
        text.push_str(&format!("{x},{}\n", f(x)));
    }
    let p = path(dir, name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn separate_square() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_fn(dir.path(), "f.csv", |x| x * x);
    let g = write_fn(dir.path(), "g.csv", |x| x * x);
    let phi = path(dir.path(), "phi.csv");
    let report = path(dir.path(), "sep.json");
    let out = hypconv(&["separate", "--f", &f, "--g", &g, "--phi-out", &phi, "--report", &report, "--sep2-tuples", "200"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = std::fs::read_to_string(&phi).unwrap();
    assert!(text.starts_with("x1,value\n"));
    assert_eq!(text.lines().count(), 42);

    let upper = write_fn(dir.path(), "upper.csv", |x| x * x + 1.0);
    let out = hypconv(&["separate", "--f", &upper, "--g", &g, "--phi-out", &phi]);
    assert_eq!(code(&out), 3);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config = path(dir.path(), "run.toml");
    std::fs::write(&config, "space = \"e2\"\nseeds = \"0,0;1,0\"\niterations = 1\nres = 0.25\ndedup_tol = 0.0\n").unwrap();
    let out = hypconv(&["--config", &config, "hull"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 6);
    // Command-line flags win over the file.
    let out = hypconv(&["--config", &config, "hull", "--iterations", "0"]);
    assert_eq!(stdout(&out).lines().count(), 3);

    std::fs::write(&config, "bogus = 1\n").unwrap();
    assert_eq!(code(&hypconv(&["--config", &config, "hull"])), 1);
}

#[test]
fn help_lists_flags() {
    let out = hypconv(&["hull", "--help"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for flag in ["--space", "--seeds", "--seeds-file", "--iterations", "--res", "--dedup-tol", "--max-points", "--threads"] {
        assert!(text.contains(flag), "{flag}");
    }
    assert!(text.contains("[default: 0.006]"));
    for sub in ["slice", "counterexample", "separate", "axioms", "convert"] {
        assert_eq!(code(&hypconv(&[sub, "--help"])), 0);
    }
}

#[test]
fn bad_input_is_a_config_error() {
    assert_eq!(code(&hypconv(&["hull", "--space", "h2", "--seeds", "0,-1"])), 1);
    assert_eq!(code(&hypconv(&["hull", "--space", "e2"])), 1);
    assert_eq!(code(&hypconv(&["hull", "--space", "e2", "--seeds", "0,0", "--res", "0"])), 1);
    assert_eq!(code(&hypconv(&["--threads", "0", "axioms"])), 1);
}
