use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sha(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sha"))
        .args(args)
        .env_remove("SHA_OUTPUT_ROOT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = sha(&["generate", "--n", "4", "--p", "0.6", "--seed", "3", "--count", "2", "--connected", "--out", arg(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fixture = dir.path().join("graph-01.txt");
    assert!(fixture.exists() && dir.path().join("graph-02.txt").exists());

    let text = fs::read_to_string(&fixture).unwrap();
    let edges = text.lines().filter(|l| l.starts_with("edge")).count();
    let out = sha(&["export-hamiltonian", arg(&fixture)]);
    assert!(out.status.success());
    let terms = stdout(&out).lines().count();
    assert_eq!(terms, 4 * edges);

    let out = sha(&["export-hamiltonian", arg(&fixture), "--partition", "chronological", "--partitions", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("# block")).count(), 2);

    let out = sha(&["export-hamiltonian", arg(&fixture), "--simplified"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().count() <= terms);
}

#[test]
fn bad_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    assert_eq!(sha(&["run", arg(&missing)]).status.code(), Some(1));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "output_dir = \"x\"\nseeds = [0]\narchitectures = [\"A99\"]\n[[strategies]]\nkind = \"SVQE\"\n").unwrap();
    let out = sha(&["run", arg(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let out = sha(&["generate", "--n", "3", "--k", "3", "--out", arg(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(sha(&["report", arg(dir.path())]).status.code(), Some(1));
}

#[test]
fn run_report_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        r#"output_dir = "results"
shots = 0
n_layers = 1
max_iters = 40
seeds = [0, 1]
architectures = ["A1"]

[[generate]]
n = 3
p = 0.9
seed = 4
k = 2

[[strategies]]
kind = "SVQE"

[[strategies]]
kind = "SHA"
partition = "NODEWISE"
partitions = 2
"#,
    )
    .unwrap();
    let out = sha(&["run", arg(&cfg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("SHA-NW2"));
    let results = dir.path().join("results");
    let rows = fs::read(results.join("rows.csv")).unwrap();

    let out = sha(&["run", arg(&cfg), "--resume"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("(4 resumed)"));
    assert_eq!(fs::read(results.join("rows.csv")).unwrap(), rows);

    let out = sha(&["report", arg(&results)]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("SVQE"));

    let out = sha(&["plot", arg(&results)]);
    assert!(out.status.success());
    for f in ["accuracy_box.svg", "most_likely_box.svg", "iterations_bar.svg"] {
        assert!(results.join(f).exists());
    }
    assert_eq!(sha(&["plot", arg(&results), "--kind", "pie"]).status.code(), Some(1));
}

#[test]
fn failed_cells_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // node 2 is isolated, so a nodewise split has a block with no terms
    fs::write(
        dir.path().join("iso.txt"),
        "nodes=3 colors=2 p=0.5 seed=0\nedge 0 1\nsolutions=4 ratio=0.5\n",
    )
    .unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        r#"output_dir = "results"
shots = 0
n_layers = 1
max_iters = 20
seeds = [0]
architectures = ["A1"]
instances = ["iso.txt"]

[[strategies]]
kind = "SVQE"

[[strategies]]
kind = "SHA"
partition = "NODEWISE"
partitions = 3
"#,
    )
    .unwrap();
    let out = sha(&["run", arg(&cfg)]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("failed"));
    let rows = fs::read_to_string(dir.path().join("results/rows.csv")).unwrap();
    assert_eq!(rows.lines().count(), 2);
}
