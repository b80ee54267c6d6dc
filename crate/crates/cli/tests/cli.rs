use std::path::Path;
use std::process::{Command, Output};

fn obcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obcm")).args(args).output().unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_solve_every_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.obcm");
    ok(&obcm(&["gen", "--n1", "9", "--n2", "8", "--p", "0.3", "--seed", "4", "--out", p(&inst)]));
    assert!(std::fs::read_to_string(&inst).unwrap().starts_with("obcm 1\n9 8 "));

    let exact = obcm(&["solve", "--instance", p(&inst), "--algo", "exact"]);
    let opt: u64 = String::from_utf8_lossy(&exact.stderr)
        .trim()
        .strip_prefix("crossings ")
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(ok(&exact).lines().count(), 8);

    for algo in [
        "barycenter", "median", "sifting", "rls-swap", "rls-exchange", "rls-jump", "ea-swap", "ea-exchange",
        "ea-jump", "jfirls", "jrirls", "jsrls",
    ] {
        let ord = dir.path().join(format!("{algo}.ord"));
        let out = ok(&obcm(&[
            "solve", "--instance", p(&inst), "--algo", algo, "--seed", "3", "--max-generations", "2000", "--out", p(&ord),
        ]));
        let k: u64 = out.trim().strip_prefix("crossings ").unwrap().parse().unwrap();
        assert!(k >= opt, "{algo}: {k} < optimum {opt}");
        let lines: Vec<usize> = std::fs::read_to_string(&ord).unwrap().lines().map(|l| l.parse().unwrap()).collect();
        let mut sorted = lines.clone();
        sorted.sort();
        assert_eq!(sorted, (0..8).collect::<Vec<_>>());
    }
}

#[test]
fn solve_from_start_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.obcm");
    std::fs::write(&inst, "obcm 1\n4 3 4\n0 2\n0 3\n1 1\n2 0\n").unwrap();
    let start = dir.path().join("start.ord");
    std::fs::write(&start, "0\n1\n2\n").unwrap();
    let run = || ok(&obcm(&["solve", "--instance", p(&inst), "--algo", "jsrls", "--start", p(&start), "--seed", "1"]));
    let first = run();
    assert_eq!(first, "2\n1\n0\n");
    assert_eq!(first, run());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bad.obcm");
    std::fs::write(&inst, "obcm 1\n2 2 1\n0 5\n").unwrap();
    let out = obcm(&["solve", "--instance", p(&inst), "--algo", "median"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":3:"));

    let missing = obcm(&["solve", "--instance", "/nonexistent.obcm", "--algo", "median"]);
    assert_eq!(missing.status.code(), Some(3));

    let good = dir.path().join("good.obcm");
    std::fs::write(&good, "obcm 1\n2 2 2\n0 1\n1 0\n").unwrap();
    assert_eq!(obcm(&["solve", "--instance", p(&good), "--algo", "nagamochi"]).status.code(), Some(2));
    assert_eq!(
        obcm(&["gen", "--n1", "2", "--n2", "2", "--p", "1.5", "--out", p(&dir.path().join("x"))]).status.code(),
        Some(2)
    );
    assert_eq!(obcm(&["gen", "--n1", "two"]).status.code(), Some(2));

    let big = dir.path().join("big.obcm");
    ok(&obcm(&["gen", "--n1", "3", "--n2", "30", "--p", "0.2", "--out", p(&big)]));
    assert_eq!(obcm(&["solve", "--instance", p(&big), "--algo", "exact"]).status.code(), Some(2));
}

const CONFIG: &str = r#"
master_seed = 5
repetitions = 2
algorithms = ["barycenter", "sifting", "rls-jump", { name = "jsrls", max_generations = 50 }]

[instances]
n1 = 10
n2 = 10
p = 0.3
count = 3
"#;

#[test]
fn bench_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let table = ok(&obcm(&["bench", "--config", p(&cfg), "--out", p(&a)]));
    assert!(table.contains("rls-jump"));
    ok(&obcm(&["bench", "--config", p(&cfg), "--out", p(&b), "--threads", "3"]));
    for f in ["runs.csv", "instances.csv", "summary.csv", "comparisons.csv", "convergence.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let trace = std::fs::read_to_string(a.join("traces/inst002_jsrls_1.trace.csv")).unwrap();
    assert!(trace.starts_with("obcm-bench 1\ngeneration,crossings\n0,"));

    let runs = a.join("runs.csv");
    let out = ok(&obcm(&["stats", "--a", p(&runs), "--b", p(&runs), "--column", "crossings"]));
    assert!(out.contains("p_two_sided 1\n"), "{out}");
    assert_eq!(obcm(&["stats", "--a", p(&runs), "--b", p(&runs), "--column", "nope"]).status.code(), Some(2));
}

#[test]
fn bench_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    std::fs::write(&cfg, CONFIG.replace("rls-jump", "rls-hop")).unwrap();
    assert_eq!(obcm(&["bench", "--config", p(&cfg)]).status.code(), Some(2));
    std::fs::write(&cfg, "master_seed = [").unwrap();
    assert_eq!(obcm(&["bench", "--config", p(&cfg)]).status.code(), Some(3));
}

#[test]
fn gen_many_into_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("suite");
    ok(&obcm(&["gen", "--n1", "5", "--n2", "5", "--p", "0.5", "--count", "3", "--seed", "2", "--out", p(&out)]));
    let mut names: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names, ["inst000.obcm", "inst001.obcm", "inst002.obcm"]);
}
