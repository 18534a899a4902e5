use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tdtsp(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_tdtsp")).args(args).output().expect("binary runs");
    assert!(out.status.success(), "tdtsp {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(tdtsp(args).stdout).unwrap()
}

fn arrival(text: &str) -> &str {
    text.lines().find_map(|l| l.strip_prefix("arrival ")).expect("arrival line")
}

fn small_instance(dir: &Path, seed: u64) -> String {
    let path = dir.join(format!("inst{seed}.tdtsp"));
    let p = path.to_str().unwrap().to_string();
    let seed = seed.to_string();
    tdtsp(&[
        "generate", "--n", "7", "--theta-max", "150", "--breakpoints", "15", "--coord-range", "30", "--seed", &seed,
        "--out", &p,
    ]);
    p
}

#[test]
fn methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..3 {
        let inst = small_instance(dir.path(), seed);
        let dp = stdout(&["solve", &inst, "--method", "dp"]);
        let brute = stdout(&["solve", &inst, "--method", "brute"]);
        let bnp = stdout(&["solve", &inst, "--cuts", "all"]);
        assert_eq!(arrival(&dp), arrival(&brute));
        assert_eq!(arrival(&dp), arrival(&bnp));
        assert!(bnp.contains("solved true"));
    }
}

#[test]
fn expansion_dump_lists_timed_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path(), 4);
    let dump = dir.path().join("arcs.txt");
    tdtsp(&["solve", &inst, "--method", "dp", "--dump-expansion", dump.to_str().unwrap()]);
    let text = fs::read_to_string(dump).unwrap();
    assert!(!text.is_empty());
    for line in text.lines() {
        let f: Vec<u32> = line.split(' ').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f.len(), 4);
        assert!(f[0] != f[1] && f[2] < f[3]);
    }
}

#[test]
fn generate_writes_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("set");
    tdtsp(&["generate", "--n", "6", "--theta-max", "150", "--coord-range", "30", "--count", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(fs::read_dir(&out).unwrap().count(), 3);
    let csv = stdout(&["benchmark", "--instances", out.to_str().unwrap()]);
    assert_eq!(csv.lines().count(), 1 + 3 + 1);
    assert!(csv.starts_with("instance,config,solved,gap,time,nodes,cols,rows,cuts_SEC,cuts_LSEC,cuts_DK,cuts_ODDCAT,cuts_ODDPF,cuts_CYCLE,cuts_UAFC"));
}

#[test]
fn benchmark_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        tdtsp(&[
            "benchmark", "--n", "12", "--count", "2", "--theta-max", "400", "--breakpoints", "10", "--coord-range",
            "50", "--cuts", "all", "--seed", "5", "--work-limit", "100000000", "--out", path.to_str().unwrap(),
        ]);
        fs::read(path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    // the limit binds, so the runs stop early
    assert!(String::from_utf8(a).unwrap().contains(",0/2,"));
}

#[test]
fn branching_data_is_ranking_format() {
    let text = stdout(&[
        "export-branching-data", "--n", "8", "--count", "4", "--theta-max", "200", "--breakpoints", "10",
        "--coord-range", "30", "--cuts", "none", "--heuristics", "off",
    ]);
    assert!(!text.is_empty(), "no branching happened");
    for line in text.lines() {
        let mut f = line.split(' ');
        let label: u8 = f.next().unwrap().parse().unwrap();
        assert!(label <= 2);
        assert!(f.next().unwrap().starts_with("qid:"));
        assert_eq!(f.count(), 13);
    }
}

#[test]
fn invalid_combination_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path(), 1);
    let out = Command::new(env!("CARGO_BIN_EXE_tdtsp"))
        .args(["solve", &inst, "--formulation", "path", "--pricing", "arc"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("path"));
}
