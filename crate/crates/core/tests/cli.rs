use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rmcif(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmcif")).args(args).current_dir(cwd).output().unwrap()
}

fn ok(out: Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const GEN: &[&str] = &["generate", "--layers", "3", "--width", "2", "--scenarios", "3", "--cap", "1:3", "--seed", "4"];

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = ok(rmcif(GEN, dir.path()));
    let b = ok(rmcif(GEN, dir.path()));
    assert_eq!(a, b);
    assert!(a.starts_with("p rmcif 8 "));
}

#[test]
fn solve_export_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::create_dir(d.join("inst")).unwrap();
    ok(rmcif(&[GEN, &["-o", "inst/a.rmcif"]].concat(), d));

    let exact = ok(rmcif(&["solve", "--instance", "inst/a.rmcif", "--variant", "abs", "--solver", "exact"], d));
    let exact_cost: i64 = exact.split_whitespace().nth(3).unwrap().parse().unwrap();
    ok(rmcif(
        &[
            "solve",
            "--instance",
            "inst/a.rmcif",
            "--variant",
            "abs",
            "--solver",
            "ec9",
            "--seed",
            "7",
            "--param",
            "population_size=10",
            "-o",
            "run.sol",
        ],
        d,
    ));
    let sol = fs::read_to_string(d.join("run.sol")).unwrap();
    assert!(sol.starts_with("o absolute ec9 "));
    let cost: i64 = sol.split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!(cost >= exact_cost);

    let lp = ok(rmcif(&["export-lp", "--instance", "inst/a.rmcif", "--variant", "dev"], d));
    assert!(lp.starts_with("Minimize\n obj: y\nSubject To\n"));
    assert!(lp.ends_with("End\n"));

    ok(rmcif(&["bench", "--dir", "inst", "--solvers", "ls1,ec1", "--seeds", "1:2", "--out", "r.csv"], d));
    let csv = fs::read_to_string(d.join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
    assert_eq!(fs::read_dir(d.join("r.csv.runs")).unwrap().count(), 8);
}

#[test]
fn config_file_and_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(rmcif(&[GEN, &["-o", "a.rmcif"]].concat(), d));
    fs::write(d.join("p.toml"), "population_size = 6\nno_improvement_limit = 20\n").unwrap();
    ok(rmcif(&["solve", "--instance", "a.rmcif", "--variant", "dev", "--solver", "ec2", "--config", "p.toml"], d));

    let bad = rmcif(&["solve", "--instance", "a.rmcif", "--variant", "dev", "--solver", "ls1", "--param", "nope=1"], d);
    assert!(!bad.status.success());
    fs::write(d.join("broken.rmcif"), "p rmcif 2 1 1 1\na 1 2 0\ns 1 3\n").unwrap();
    let out = rmcif(&["solve", "--instance", "broken.rmcif", "--variant", "abs", "--solver", "ls1"], d);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}
