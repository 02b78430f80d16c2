use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circuitlp"))
        .args(args)
        .current_dir(dir)
        .env_remove("CIRCUITLP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

const SMALL: &str = "n=3 m=1\nA:\n1 1 1\nb: 4\nc: -1 -2 0\n";

#[test]
fn solve_small_lp() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "small.txt", SMALL);
    let o = run(&["solve", "small.txt", "--trace", "t.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("x: 0 4 0"));
    assert!(out.contains("objective: -8"));
    let trace = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(trace.starts_with("run_id,algorithm,iteration,phase,oracle,step_size,potential,set_sizes\n"));
    assert!(trace.lines().skip(1).all(|l| l.starts_with("small,")));
}

#[test]
fn infeasible_phase_one_prints_certificate() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "inf.txt", "n=2 m=1\nA: 1 1\nb: -1\nc: 0 0\n");
    let o = run(&["feas", "inf.txt", "--aux"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("status: infeasible"));
    assert!(out.contains("<b,y>: -1"));
}

#[test]
fn unbounded_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "unb.txt", "n=2 m=1\nA: 1 -1\nb: 0\nc: -1 0\n");
    let o = run(&["solve", "unb.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("unbounded"));
}

#[test]
fn bad_usage_and_input_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "small.txt", SMALL);
    write(dir.path(), "broken.txt", "n=3 m=1\nA:\n1 x 1\nb: 4\nc: 0 0 0\n");
    assert_eq!(run(&["solve", "small.txt", "--frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["solve", "missing.txt"], dir.path()).status.code(), Some(2));
    let o = run(&["solve", "broken.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(run(&["walk", "small.txt", "--target-basis", "9", "--start", "4,0,0"], dir.path()).status.code(), Some(2));
}

#[test]
fn kappa_and_circuits() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.txt", "n=3 m=1\nA: 1 2 0\nb: 2\nc: 0 0 0\n");
    let o = run(&["kappa", "a.txt"], dir.path());
    assert_eq!(stdout(&o), "kappa: 2\n");
    let o = run(&["circuits", "a.txt"], dir.path());
    assert!(stdout(&o).starts_with("elementary vectors: 2"));
    let o = run(&["decompose", "a.txt", "--vector", "-2,1,5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("parts: 2"));
}

#[test]
fn generated_walk_reaches_target() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gen", "--kind", "tu", "--n", "6", "--m", "3", "--seed", "7", "-o", "g.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("g.txt")).unwrap();
    let field = |key: &str| {
        text.lines()
            .find_map(|l| l.strip_prefix(key))
            .unwrap()
            .trim()
            .to_string()
    };
    let (start, basis) = (field("# start:"), field("# target basis:"));
    let o = run(&["walk", "g.txt", "--target-basis", &basis, "--start", &start, "--trace", "w.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("lemma checks: all hold"));
    assert!(dir.path().join("w.csv").exists());
}

#[test]
fn generated_capacitated_walk() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gen", "--kind", "cap", "--n", "6", "--m", "2", "--seed", "3", "-o", "c.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("c.txt")).unwrap();
    let field = |key: &str| text.lines().find_map(|l| l.strip_prefix(key)).unwrap().trim().to_string();
    let (start, part) = (field("# start:"), field("# partition:"));
    let o = run(&["cap-walk", "c.txt", "--partition", &part, "--start", &start], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["solve", "c.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn reduce_general_box() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "box.txt", "n=2 m=0 k=2 general\nB:\n1 0\n0 1\nd: 3 4\n");
    let o = run(&["reduce-general", "box.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("M: 1 0 1 0"));
    assert!(out.contains("no equations"));
}

#[test]
fn gen_seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let with_env = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_circuitlp"))
            .args(["gen", "--kind", "generic", "--n", "5", "--m", "2"])
            .env("CIRCUITLP_SEED", seed)
            .current_dir(dir.path())
            .output()
            .unwrap()
    };
    let a = with_env("11");
    let explicit = run(&["gen", "--kind", "generic", "--n", "5", "--m", "2", "--seed", "11"], dir.path());
    assert_eq!(a.stdout, explicit.stdout);
    assert_eq!(with_env("oops").status.code(), Some(2));
}
