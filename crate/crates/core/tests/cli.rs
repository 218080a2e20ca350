//! End-to-end checks of the command-line surface.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::OnceLock;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cliffopt")
}

fn workdir() -> &'static PathBuf {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        dir
    })
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(workdir())
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Generates the n=2 and n=3 databases once for all CLI tests.
fn ensure_db() {
    static DONE: OnceLock<()> = OnceLock::new();
    DONE.get_or_init(|| {
        for n in ["2", "3"] {
            let out = run(&["generate", "--qubits", n, "--db", "db"]);
            assert!(out.status.success(), "generate failed: {out:?}");
        }
    });
}

#[test]
fn generate_then_stats_prints_class_counts() {
    ensure_db();
    let out = run(&["stats", "--qubits", "3", "--db", "db"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let counts: Vec<&str> = text
        .lines()
        .filter(|l| l.trim().starts_with(|c: char| c.is_ascii_digit()))
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(counts, vec!["1", "1", "3", "8", "10", "3", "1"]);
    assert!(text.contains("total 27 classes, 432 bytes"));
}

#[test]
fn cost_of_swap_tableau_is_three() {
    ensure_db();
    // SWAP as a tableau text file: permutation matrix exchanging both qubits
    let swap = "0100\n1000\n0001\n0010\n";
    let path = workdir().join("swap.txt");
    std::fs::write(&path, swap).unwrap();
    let out = run(&["cost", "--qubits", "2", "--db", "db", "--tableau", "swap.txt"]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(stdout(&out).trim(), "3");
}

#[test]
fn synth_random_round_trips() {
    ensure_db();
    let out = run(&[
        "synth", "--qubits", "3", "--db", "db", "--random", "--seed", "7", "--count", "3",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("# cnot count"));
    assert!(text.lines().any(|l| l.starts_with("cx ")));
}

#[test]
fn synth_rejects_non_symplectic_input() {
    ensure_db();
    let path = workdir().join("bad.txt");
    std::fs::write(&path, "1100\n1100\n0010\n0001\n").unwrap();
    let out = run(&["synth", "--qubits", "2", "--db", "db", "--tableau", "bad.txt"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not symplectic"));
}

#[test]
fn verify_passes_on_fresh_database() {
    ensure_db();
    let out = run(&["verify", "--qubits", "2", "--db", "db"]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("checksums ok"));
    assert!(text.contains("total 720 matches group order 720"));
    assert!(text.contains("average cost 3/2"));
}

#[test]
fn verify_fails_on_corrupt_database() {
    ensure_db();
    let dir = workdir().join("corrupt-db");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let out = run(&["generate", "--qubits", "2", "--db", "corrupt-db"]);
    assert!(out.status.success());
    let shard = dir.join("r2_1.bin");
    let mut bytes = std::fs::read(&shard).unwrap();
    bytes[3] ^= 0x40;
    std::fs::write(&shard, bytes).unwrap();
    let out = run(&["verify", "--qubits", "2", "--db", "corrupt-db"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum mismatch"));
}

#[test]
fn design_exact_n2_reports_three_halves() {
    ensure_db();
    let out = run(&["design", "--qubits", "2", "--db", "db", "--exact"]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("\"average_cost\": \"3/2\""));
    assert!(text.contains("\"max_mixing_residual\": \"0\""));
    assert!(text.contains("\"circuit\""));
}

#[test]
fn advantage_scan_runs() {
    ensure_db();
    let out = run(&["advantage", "--qubits", "3", "--db", "db"]);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).contains("# scanned 168 invertible matrices"));
}

#[test]
fn file_backed_queries_work() {
    ensure_db();
    let out = run(&[
        "cost", "--qubits", "3", "--db", "db", "--random", "--seed", "5", "--count", "4",
        "--file-backed",
    ]);
    assert!(out.status.success(), "{out:?}");
    let costs: Vec<usize> = stdout(&out)
        .lines()
        .map(|l| l.trim().parse().unwrap())
        .collect();
    assert_eq!(costs.len(), 4);
    // must agree with the in-RAM path
    let ram = run(&["cost", "--qubits", "3", "--db", "db", "--random", "--seed", "5", "--count", "4"]);
    let ram_costs: Vec<usize> = stdout(&ram)
        .lines()
        .map(|l| l.trim().parse().unwrap())
        .collect();
    assert_eq!(costs, ram_costs);
}

#[test]
fn generate_is_idempotent_on_rerun() {
    ensure_db();
    let before = std::fs::read(workdir().join("db/r2_2.bin")).unwrap();
    let out = run(&["generate", "--qubits", "2", "--db", "db", "--threads", "2"]);
    assert!(out.status.success());
    let after = std::fs::read(workdir().join("db/r2_2.bin")).unwrap();
    assert_eq!(before, after);
}

#[test]
fn missing_database_is_reported() {
    let out = run(&["cost", "--qubits", "4", "--db", "no-such-dir", "--random"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("manifest"));
}

#[test]
fn n6_generation_refused() {
    let out = run(&["generate", "--qubits", "6", "--db", "db6"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("override"));
}

#[test]
fn bench_reports_latencies() {
    ensure_db();
    let out = run(&[
        "bench", "--qubits", "3", "--db", "db", "--count", "200", "--seed", "3",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("reduce_full: mean"));
    assert!(text.contains("synthesize:  mean"));
}
