//! End-to-end tests of the `smc` binary: exit codes, report formats,
//! round-trips and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn smc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn solve_exact_thresh_on_motivating() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&smc(
            dir.path(),
            &["gen", "--family", "motivating", "--out", "motivating.smc"]
        )),
        0
    );
    let out = smc(
        dir.path(),
        &[
            "solve",
            "--in",
            "motivating.smc",
            "--method",
            "exact-thresh",
            "--no-time",
        ],
    );
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("report v1"));
    assert!(text.contains("welfare=15/2"));
    assert!(dir.path().join("motivating.matching").exists());
    assert!(dir.path().join("motivating.certificate").exists());
}

#[test]
fn solve_binary_rejects_nonbinary_input() {
    let dir = tempfile::tempdir().unwrap();
    smc(
        dir.path(),
        &["gen", "--family", "motivating", "--out", "motivating.smc"],
    );
    let out = smc(
        dir.path(),
        &["solve", "--in", "motivating.smc", "--method", "binary"],
    );
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not binary"));
}

#[test]
fn solve_blend_half_on_motivating() {
    let dir = tempfile::tempdir().unwrap();
    smc(
        dir.path(),
        &["gen", "--family", "motivating", "--out", "motivating.smc"],
    );
    let out = smc(
        dir.path(),
        &[
            "solve",
            "--in",
            "motivating.smc",
            "--method",
            "blend",
            "--eps",
            "1/2",
            "--no-time",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("welfare=15/2"));
}

#[test]
fn solve_remaining_methods_on_motivating() {
    let dir = tempfile::tempdir().unwrap();
    smc(
        dir.path(),
        &["gen", "--family", "motivating", "--out", "motivating.smc"],
    );
    let milp = smc(
        dir.path(),
        &[
            "solve",
            "--in",
            "motivating.smc",
            "--method",
            "exact-milp",
            "--no-time",
        ],
    );
    assert_eq!(code(&milp), 0);
    assert!(stdout(&milp).contains("welfare=15/2"));

    let half = smc(
        dir.path(),
        &[
            "solve",
            "--in",
            "motivating.smc",
            "--method",
            "half-stable",
            "--no-time",
        ],
    );
    assert_eq!(code(&half), 0);
    let check = smc(
        dir.path(),
        &[
            "check",
            "--in",
            "motivating.smc",
            "--matching",
            "motivating.matching",
            "--notion",
            "eps-stable",
            "--eps",
            "1/2",
        ],
    );
    assert_eq!(code(&check), 0);

    let hl = smc(
        dir.path(),
        &[
            "solve",
            "--in",
            "motivating.smc",
            "--method",
            "heavy-light",
            "--no-time",
        ],
    );
    assert_eq!(code(&hl), 0);
    let check = smc(
        dir.path(),
        &[
            "check",
            "--in",
            "motivating.smc",
            "--matching",
            "motivating.matching",
            "--notion",
            "stable",
        ],
    );
    assert_eq!(code(&check), 0);
}

#[test]
fn cap_exceeded_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    smc(
        dir.path(),
        &[
            "gen",
            "--family",
            "random-binary",
            "--n",
            "7",
            "--seed",
            "1",
            "--out",
            "big.smc",
        ],
    );
    let out = smc(
        dir.path(),
        &["solve", "--in", "big.smc", "--method", "exact-thresh"],
    );
    assert_eq!(code(&out), 2);
    // SMC_CAP can lift the default.
    let out = Command::new(env!("CARGO_BIN_EXE_smc"))
        .current_dir(dir.path())
        .env("SMC_CAP", "7")
        .args([
            "solve",
            "--in",
            "big.smc",
            "--method",
            "exact-thresh",
            "--no-time",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn check_notions_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    smc(
        dir.path(),
        &["gen", "--family", "motivating", "--out", "motivating.smc"],
    );
    let stable = smc(
        dir.path(),
        &[
            "check",
            "--in",
            "motivating.smc",
            "--matching",
            "motivating.smc.witness",
            "--notion",
            "stable",
        ],
    );
    assert_eq!(code(&stable), 0);
    assert!(stdout(&stable).contains("result=holds"));

    let fractional = smc(
        dir.path(),
        &[
            "check",
            "--in",
            "motivating.smc",
            "--matching",
            "motivating.smc.witness",
            "--notion",
            "fractional",
        ],
    );
    assert_eq!(code(&fractional), 3);
    assert!(stdout(&fractional).contains("fractional-violation m1 w3 mass=1/2"));

    let expost = smc(
        dir.path(),
        &[
            "check",
            "--in",
            "motivating.smc",
            "--matching",
            "motivating.smc.witness",
            "--notion",
            "expost",
        ],
    );
    assert_eq!(code(&expost), 3);

    std::fs::write(
        dir.path().join("broken.matching"),
        "matching v1\nn=2\n1 x\n0 0\n",
    )
    .unwrap();
    let malformed = smc(
        dir.path(),
        &[
            "check",
            "--in",
            "motivating.smc",
            "--matching",
            "broken.matching",
            "--notion",
            "stable",
        ],
    );
    assert_eq!(code(&malformed), 1);
}

#[test]
fn written_matchings_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    smc(
        dir.path(),
        &[
            "gen",
            "--family",
            "unstable-support",
            "--alpha",
            "3",
            "--out",
            "u.smc",
        ],
    );
    let solve = smc(
        dir.path(),
        &[
            "solve",
            "--in",
            "u.smc",
            "--method",
            "exact-thresh",
            "--no-time",
        ],
    );
    assert_eq!(code(&solve), 0);
    // The emitted matching re-verifies as stable.
    let check = smc(
        dir.path(),
        &[
            "check",
            "--in",
            "u.smc",
            "--matching",
            "u.matching",
            "--notion",
            "stable",
        ],
    );
    assert_eq!(code(&check), 0);
    // Re-solving after a parse round-trip is byte-identical.
    let text = std::fs::read_to_string(dir.path().join("u.matching")).unwrap();
    std::fs::write(dir.path().join("copy.matching"), &text).unwrap();
    let second = std::fs::read_to_string(dir.path().join("copy.matching")).unwrap();
    assert_eq!(text, second);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    smc(
        dir.path(),
        &["gen", "--family", "motivating", "--out", "motivating.smc"],
    );
    let run = |jobs: &str| {
        stdout(&smc(
            dir.path(),
            &[
                "solve",
                "--in",
                "motivating.smc",
                "--method",
                "exact-thresh",
                "--jobs",
                jobs,
                "--no-time",
            ],
        ))
    };
    let a = run("1");
    let b = run("4");
    assert_eq!(a, b);
    let first = std::fs::read_to_string(dir.path().join("motivating.matching")).unwrap();
    smc(
        dir.path(),
        &[
            "solve",
            "--in",
            "motivating.smc",
            "--method",
            "exact-thresh",
            "--no-time",
        ],
    );
    let again = std::fs::read_to_string(dir.path().join("motivating.matching")).unwrap();
    assert_eq!(first, again);
}

#[test]
fn bench_csv_is_seed_stable() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let status = smc(
            dir.path(),
            &[
                "bench",
                "--suite",
                "random",
                "--seed",
                "11",
                "--out",
                out,
                "--no-time",
            ],
        );
        assert_eq!(code(&status), 0);
        std::fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a, b);
    for line in a.lines().skip(1) {
        assert!(line.contains(",true,"), "all checks pass: {line}");
    }
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = smc(dir.path(), &["bench", "--suite", "bogus", "--out", "x.csv"]);
    assert_eq!(code(&out), 1);
    let out = smc(dir.path(), &["bench", "--out", "x.csv"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn bench_paper_tables_all_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = smc(
        dir.path(),
        &[
            "bench",
            "--suite",
            "paper-tables",
            "--out",
            "p.csv",
            "--no-time",
        ],
    );
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 7);
    for row in rows {
        assert!(row.contains(",true,"), "{row}");
    }
}

#[test]
fn reduce_emits_instance_and_bindings() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("f.cnf"),
        "c 2P2N\np cnf 3 4\n1 2 3 0\n1 -2 -3 0\n-1 2 -3 0\n-1 -2 3 0\n",
    )
    .unwrap();
    let out = smc(
        dir.path(),
        &[
            "reduce",
            "--cnf",
            "f.cnf",
            "--variant",
            "thm6",
            "--alpha",
            "7/4",
            "--k",
            "3",
            "--out",
            "red.smc",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("variant=thm6-small"));
    let bindings = std::fs::read_to_string(dir.path().join("red.smc.bindings")).unwrap();
    assert!(bindings.starts_with("bindings v1\n"));
    assert!(bindings.contains("agent var:x1:m1=man:0"));
    assert!(bindings.contains("cell tine:c1="));
    // The emitted instance parses back.
    let check = smc(
        dir.path(),
        &[
            "solve",
            "--in",
            "red.smc",
            "--method",
            "heavy-light",
            "--no-time",
        ],
    );
    assert_eq!(code(&check), 0);

    let appc = smc(
        dir.path(),
        &[
            "reduce",
            "--cnf",
            "f.cnf",
            "--variant",
            "appC",
            "--eps",
            "1/40",
            "--delta",
            "1",
            "--out",
            "eps.smc",
        ],
    );
    assert_eq!(code(&appc), 0);
    assert!(stdout(&appc).contains("separated=true"));

    let bad = smc(
        dir.path(),
        &[
            "reduce",
            "--cnf",
            "f.cnf",
            "--variant",
            "thm6",
            "--alpha",
            "1",
            "--k",
            "3",
            "--out",
            "x.smc",
        ],
    );
    assert_eq!(code(&bad), 1);
}

#[test]
fn generated_witnesses_verify_and_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let gen = smc(
        dir.path(),
        &[
            "gen",
            "--family",
            "support-lb",
            "--n",
            "5",
            "--rho",
            "1",
            "--out",
            "lb.smc",
        ],
    );
    assert_eq!(code(&gen), 0);
    let check = smc(
        dir.path(),
        &[
            "check",
            "--in",
            "lb.smc",
            "--matching",
            "lb.smc.witness",
            "--notion",
            "stable",
        ],
    );
    assert_eq!(code(&check), 0);
    let decompose = smc(
        dir.path(),
        &[
            "decompose",
            "--in",
            "lb.smc",
            "--matching",
            "lb.smc.witness",
            "--out",
            "lb.bvn",
        ],
    );
    assert_eq!(code(&decompose), 0);
    assert!(stdout(&decompose).contains("terms=4"));
    let bvn = std::fs::read_to_string(dir.path().join("lb.bvn")).unwrap();
    assert!(bvn.starts_with("bvn v1\n"));
    assert_eq!(bvn.lines().count(), 5);

    let gap = smc(
        dir.path(),
        &[
            "gen", "--family", "gap", "--alpha", "3", "--k", "4", "--out", "gap.smc",
        ],
    );
    assert_eq!(code(&gap), 0);
    let check = smc(
        dir.path(),
        &[
            "check",
            "--in",
            "gap.smc",
            "--matching",
            "gap.smc.witness",
            "--notion",
            "stable",
        ],
    );
    assert_eq!(code(&check), 0);
}
