//! End-to-end checks of the command-line interface: the running example
//! through files, exit codes, and the reduce manifest.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bagcq"))
}

struct Workdir(PathBuf);

impl Workdir {
    fn new(tag: &str) -> Workdir {
        let dir = std::env::temp_dir().join(format!("bagcq-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Workdir(dir)
    }

    fn file(&self, name: &str, content: &str) -> PathBuf {
        let path = self.0.join(name);
        fs::write(&path, content).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Workdir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

const GOLDEN_STRUCTURE: &str = "sig E1/2, E2/2, E3/2 ;
E1(a,b)\nE1(b,a)\nE2(a,b)\nE2(b,a)\nE3(a,b)\nE3(b,a)\n";

const GOLDEN_QUERY: &str = "sig E1/2, E2/2, E3/2 ;
E1(y1,z1) | E2(y2,z2) | E3(y3,z3)\n";

#[test]
fn running_example_through_files() {
    let w = Workdir::new("golden");
    let d = w.file("d.st", GOLDEN_STRUCTURE);
    let psi = w.file("psi.ucq", GOLDEN_QUERY);

    let out = run(bin().args(["eval", "--query"]).arg(&psi).arg("--structure").arg(&d));
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "6");

    let out = run(bin()
        .args(["eval", "--naive", "--query"])
        .arg(&psi)
        .arg("--structure")
        .arg(&d));
    assert_eq!(stdout(&out).trim(), "6");

    let m = w.path("m.st");
    assert!(run(bin().arg("marsify").arg("--in").arg(&d).arg("--out").arg(&m))
        .status
        .success());
    let cq = w.path("cq.ucq");
    assert!(run(bin().arg("cqize").arg("--in").arg(&psi).arg("--out").arg(&cq))
        .status
        .success());
    let out = run(bin().args(["eval", "--query"]).arg(&cq).arg("--structure").arg(&m));
    assert_eq!(stdout(&out).trim(), "7");

    let out = run(bin()
        .args(["trips", "--arity", "3", "--in"])
        .arg(&m)
        .args(["--format", "tsv"]));
    let lines: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("mars\tvenus\tvenus\tone-away"));
    assert!(lines[3].starts_with("venus\tvenus\tvenus\tall-venus"));
}

#[test]
fn contain_exit_codes() {
    let w = Workdir::new("contain");
    let d = w.file("d.st", GOLDEN_STRUCTURE);
    let psi = w.file("psi.ucq", GOLDEN_QUERY);

    let out = run(bin()
        .args(["contain", "--r", "1", "--qs"])
        .arg(&psi)
        .arg("--qb")
        .arg(&psi)
        .arg("--structure")
        .arg(&d));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("HOLDS"));

    let out = run(bin()
        .args(["contain", "--r", "2", "--qs"])
        .arg(&psi)
        .arg("--qb")
        .arg(&psi)
        .arg("--structure")
        .arg(&d)
        .args(["--format", "tsv"]));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "VIOLATED\t2\t6\t6");
}

#[test]
fn search_finds_the_well_of_positivity() {
    let w = Workdir::new("search");
    let twice = w.file("twice.ucq", "sig E/2 ;\nE(y,z) | E(u,w)\n");
    let once = w.file("once.ucq", "sig E/2 ;\nE(y,z)\n");
    let out = run(bin()
        .args(["search", "--qs"])
        .arg(&twice)
        .arg("--qb")
        .arg(&once)
        .args(["--max-size", "2"]));
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("COUNTEREXAMPLE"));
    assert!(text.contains("small: 2"));
    assert!(text.contains("big: 1"));
}

#[test]
fn check_lemma_runs_and_reports() {
    let out = run(bin().args([
        "check-lemma",
        "--name",
        "obs1",
        "--seed",
        "3",
        "--samples",
        "25",
        "--format",
        "tsv",
    ]));
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    assert!(line.starts_with("obs1\t25\t25\t"), "got: {line}");

    let out = run(bin().args(["check-lemma", "--name", "nope"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_emits_instance_files_and_manifest() {
    let w = Workdir::new("reduce");
    let ps = w.file("ps.poly", "x1*x1 + x2 + 1\n");
    let pb = w.file("pb.poly", "x1*x2 + 1\n");
    let prefix = w.path("inst");
    let out = run(bin()
        .args(["reduce", "thm3", "--eps", "1/2", "--in"])
        .arg(&ps)
        .arg("--in")
        .arg(&pb)
        .arg("--out")
        .arg(&prefix));
    assert!(out.status.success());
    let manifest = fs::read_to_string(w.path("inst.manifest")).unwrap();
    assert!(manifest.contains("\"theorem\": \"thm3\""));
    assert!(manifest.contains("\"c\": \"3/2\""));
    assert!(manifest.contains("\"cent\": \"4/3\""));
    assert!(manifest.contains("\"mode\": \"non-trivial-only\""));

    // the emitted queries are self-contained and evaluable
    for name in ["inst.qs.ucq", "inst.qb.ucq"] {
        let text = fs::read_to_string(w.path(name)).unwrap();
        assert!(text.starts_with("sig "));
    }

    let out = run(bin()
        .args(["reduce", "thm3", "--in"])
        .arg(&ps)
        .arg("--out")
        .arg(&prefix));
    assert_eq!(out.status.code(), Some(2), "missing --eps and an input file");
}

#[test]
fn parse_errors_exit_with_usage_code() {
    let w = Workdir::new("badparse");
    let bad = w.file("bad.ucq", "E1(y,\n");
    let d = w.file("d.st", GOLDEN_STRUCTURE);
    let out = run(bin().args(["eval", "--query"]).arg(&bad).arg("--structure").arg(&d));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("line"), "position in: {err}");
}

#[test]
fn pleasantize_via_cli() {
    let w = Workdir::new("pleasantize");
    let q = w.file("q.ucq", "A(@a) | B(@a, x)\n");
    let prefix = w.path("nice");
    let out = run(bin()
        .args(["reduce", "pleasantize", "--in"])
        .arg(&q)
        .arg("--out")
        .arg(&prefix));
    assert!(out.status.success());
    let text = fs::read_to_string(w.path("nice.ucq")).unwrap();
    assert!(text.contains("A_b("));
    assert!(text.contains("B_b("));
}

