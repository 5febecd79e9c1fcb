use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_histories")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("histories-cli-{}-{name}", std::process::id()))
}

#[test]
fn particle_sweep_reproduces_reference_values() {
    let o = run(&["sweep", "--kind", "particle-factors", "--grid", "0:3:0.01"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("arg,I,J"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 301);
    let r = rows.iter().find(|r| (r[0].parse::<f64>().unwrap() - 1.72).abs() < 1e-9).unwrap();
    let (i, j): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
    assert!((i - 1.25).abs() < 0.01 && (j - 2.49).abs() < 0.01, "{r:?}");
}

#[test]
fn pointer_sweep_with_oracle() {
    let o = run(&["sweep", "--kind", "pointer-factors", "--grid", "0:3:0.5", "--with-oracle"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("arg,F,G,F_oracle,G_oracle,dF,dG"));
    for r in rows(&text) {
        assert_eq!(r.len(), 7);
        assert!(r[5].parse::<f64>().unwrap() < 1e-6 && r[6].parse::<f64>().unwrap() < 1e-6, "{r:?}");
        if r[0].parse::<f64>().unwrap() == 1.5 {
            assert!((r[1].parse::<f64>().unwrap() - 0.5).abs() < 0.01);
            assert!((r[2].parse::<f64>().unwrap() - 0.33).abs() < 0.01);
        }
    }
}

#[test]
fn sweep_output_is_deterministic_and_written_to_file() {
    let path = scratch("sweep.csv");
    let args = ["sweep", "--kind", "probability-kernels", "--grid", "0:2:0.05", "--with-oracle"];
    let first = stdout(&run(&args));
    let o = run(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(o.status.success() && o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
    std::fs::remove_file(path).ok();
}

#[test]
fn bad_grid_and_kind_are_config_errors() {
    for args in [
        &["sweep", "--kind", "particle-factors", "--grid", "0:3:0"][..],
        &["sweep", "--kind", "particle-factors", "--grid", "0:3:-0.1"],
        &["sweep", "--kind", "nothing", "--grid", "0:1:0.1"],
        &["sweep", "--grid", "0:1:0.1"],
        &["verify", "--j-form", "sideways"],
        &["not-a-command"],
    ] {
        assert_eq!(run(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn verify_defaults_pass() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",PASS")));
    assert!(text.contains("J adjudication") && text.contains("sum rule (N=6)") && text.contains("erf product"));
}

#[test]
fn verify_with_impossible_tolerance_fails() {
    let o = run(&["verify", "--tolerance", "1e-15"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains(",FAIL"));
}

#[test]
fn verify_main_text_j_fails_adjudication() {
    let o = run(&["verify", "--j-form", "main-text"]);
    assert_eq!(o.status.code(), Some(2));
    let line = stdout(&o).lines().find(|l| l.starts_with("J adjudication")).unwrap().to_string();
    assert!(line.ends_with(",FAIL"), "{line}");
}

fn prob(extra: &[&str]) -> Vec<Vec<String>> {
    let base = [
        "prob",
        "--set",
        "mass=1",
        "--set",
        "omega=1",
        "--set",
        "duration=pi/2",
        "--set",
        "delta=0.1",
        "--window",
        "3",
    ];
    let o = run(&[&base[..], extra].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().next(), Some("alpha,p,regime,valid"));
    rows(&stdout(&o))
}

#[test]
fn sharp_state_probability_tables() {
    let particle = prob(&["--set", "state=sharp-particle"]);
    assert_eq!(particle.len(), 7);
    for r in &particle {
        assert!((r[1].parse::<f64>().unwrap() - 0.0318310).abs() < 1e-7);
        assert_eq!(r[1], particle[0][1]);
    }
    let pointer = prob(&["--set", "state=sharp-pointer"]);
    for r in &pointer {
        assert!((r[1].parse::<f64>().unwrap() - 0.05).abs() < 1e-12);
    }
    let product = prob(&["--set", "state=product", "--set", "pointer_norm=delta", "--set", "ell=0.001"]);
    for (a, b) in product.iter().zip(&pointer) {
        assert_eq!(a[1], b[1]);
        assert_eq!(a[2], "narrow-pointer");
    }
}

#[test]
fn config_file_is_read_and_overridden() {
    let path = scratch("run.cfg");
    std::fs::write(&path, "# sharp pointer run\nstate = sharp-pointer\ndelta = 0.2\nwindow = 1\n").unwrap();
    let o = run(&["prob", "--config", path.to_str().unwrap(), "--set", "delta=0.1"]);
    assert!(o.status.success());
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert!((rows[0][1].parse::<f64>().unwrap() - 0.05).abs() < 1e-12);
    std::fs::remove_file(path).ok();
    assert_eq!(run(&["prob", "--config", "/nonexistent/histories.cfg"]).status.code(), Some(1));
}

#[test]
fn physical_errors_exit_nonzero() {
    let singular = run(&["prob", "--set", "duration=pi"]);
    assert_eq!(singular.status.code(), Some(1));
    let decoupled = run(&["prob", "--set", "state=sharp-pointer", "--set", "coupling=zero"]);
    assert_eq!(decoupled.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&decoupled.stderr).contains("decoupled"));
}

#[test]
fn gaussian_regimes_report_validity() {
    let rows = prob(&["--set", "sigma=0.01", "--set", "ell=0.05", "--set", "regime=narrow-particle"]);
    assert!(rows.iter().all(|r| r[2] == "narrow-particle" && r[3] == "true"));
    let oracle = prob(&["--set", "sigma=0.02", "--set", "ell=0.05", "--set", "regime=oracle"]);
    assert_eq!(oracle.len(), 7);
    assert!(oracle.iter().all(|r| r[1].parse::<f64>().unwrap() > 0.0));
}
