use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tfnp_core::instance_file::parse_instance;
use tfnp_core::ProblemKind;

fn tfnp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfnp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn gen(dir: &Path, kind: &str, n: usize, seed: u64) -> PathBuf {
    let o = tfnp(&[
        "gen",
        "--kind",
        kind,
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let path = dir.join(format!("{kind}-{n}-{seed}.inst"));
    std::fs::write(&path, &o.stdout).unwrap();
    path
}

#[test]
fn generated_files_parse_and_verify_their_solutions() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ProblemKind::ALL {
        for seed in 0..3 {
            let path = gen(dir.path(), kind.name(), 3, seed);
            let inst = parse_instance(&std::fs::read_to_string(&path).unwrap()).unwrap();
            assert!(inst.well_formed());
            for extra in [&[][..], &["--exhaustive"][..]] {
                let mut args = vec!["solve", path.to_str().unwrap()];
                args.extend_from_slice(extra);
                let sol = stdout(&tfnp(&args)).trim().to_string();
                let o = tfnp(&["verify", path.to_str().unwrap(), "--candidate", &sol]);
                assert_eq!(o.status.code(), Some(0), "{kind} {sol}");
                assert_eq!(stdout(&o), "true\n");
            }
        }
    }
}

#[test]
fn wrong_candidate_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "iter", 3, 1);
    let inst = parse_instance(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let bad = tfnp_core::BitString::all(3)
        .find(|c| !inst.verify_solution(c).unwrap())
        .unwrap();
    let o = tfnp(&[
        "verify",
        path.to_str().unwrap(),
        "--candidate",
        &bad.to_string(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn fixture_walk_has_pi_minus_one_steps() {
    let o = tfnp(&[
        "walk",
        "--problem",
        "fixture:recursive-combine",
        "--x",
        "1011",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    // Π(4) = 30 states, 29 steps.
    assert_eq!(lines.len(), 31);
    assert!(lines[0].starts_with("step=0 pi=1 "));
    assert!(lines[29].starts_with("step=29 pi=30 "));
    assert!(lines[30].starts_with("sink steps=29 x=1011 "));
    assert!(lines[30].ends_with("verified=true"));
}

#[test]
fn dsr_trace_shrinks_every_query() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "iter-with-source", 4, 5);
    let o = tfnp(&["dsr-run", path.to_str().unwrap(), "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let field = |l: &str, part: usize, key: &str| -> usize {
        let seg = l.split('[').nth(part).unwrap();
        let v = seg
            .split_whitespace()
            .find_map(|t| t.strip_prefix(key))
            .unwrap();
        v.trim_end_matches(']').parse().unwrap()
    };
    let mut per_depth = std::collections::BTreeMap::new();
    for l in out.lines().filter(|l| l.starts_with("depth=")) {
        assert!(field(l, 2, "n=") < field(l, 1, "n="), "{l}");
        assert!(!l.contains("VIOLATION"));
        *per_depth
            .entry(l.split_whitespace().next().unwrap().to_string())
            .or_insert(0) += 1;
    }
    assert!(per_depth.get("depth=1").copied().unwrap_or(0) <= 2);
    assert!(out.contains("violations=0"));
}

#[test]
fn inflated_queries_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = (0..)
        .map(|seed| gen(dir.path(), "iter-with-source", 3, seed))
        .find(|p| stdout(&tfnp(&["dsr-run", p.to_str().unwrap(), "--trace"])).starts_with("depth="))
        .unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(
        tfnp(&["dsr-run", p, "--mode", "dsr"]).status.code(),
        Some(0)
    );
    let o = tfnp(&["dsr-run", p, "--mode", "dsr", "--inflate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("discipline violated"));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(tfnp(&["bogus"]).status.code(), Some(3));
    assert_eq!(tfnp(&["gen", "--kind", "iter"]).status.code(), Some(3));
    assert_eq!(
        tfnp(&["gen", "--kind", "nope", "--n", "2"]).status.code(),
        Some(3)
    );
    assert_eq!(tfnp(&["solve", "/nonexistent/file"]).status.code(), Some(3));
    assert_eq!(tfnp(&["factor", "1"]).status.code(), Some(3));
    assert_eq!(
        tfnp(&["walk", "--problem", "unknown", "--x", "1"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(tfnp(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = tfnp(&[
        "gen",
        "--kind",
        "sink-of-dag-with-source",
        "--n",
        "4",
        "--seed",
        "9",
    ]);
    let b = tfnp(&[
        "gen",
        "--kind",
        "sink-of-dag-with-source",
        "--n",
        "4",
        "--seed",
        "9",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let path = gen(dir.path(), "iter-with-source", 3, 4);
    let p = path.to_str().unwrap();
    for args in [
        &["dsr-run", p, "--trace"][..],
        &[
            "svl-check",
            "--problem",
            "fixture:recursive-combine",
            "--x",
            "010",
        ][..],
        &["walk", p][..],
    ] {
        let (x, y) = (tfnp(args), tfnp(args));
        assert_eq!(x.stdout, y.stdout);
        assert_eq!(x.status.code(), y.status.code());
    }
}

#[test]
fn reduce_emits_a_parseable_target_and_transcript() {
    let dir = tempfile::tempdir().unwrap();
    for (from, to) in [
        ("iter", "sink-of-dag"),
        ("sink-of-dag", "iter-with-source"),
        ("sink-of-dag", "sink-of-dag-with-source"),
        ("iter", "iter-with-source"),
        ("iter-with-source", "iter"),
        ("sink-of-dag-with-source", "sink-of-dag"),
    ] {
        let path = gen(dir.path(), from, 3, 6);
        let o = tfnp(&["reduce", path.to_str().unwrap(), "--to", to]);
        assert_eq!(o.status.code(), Some(0), "{from} -> {to}");
        let out = stdout(&o);
        let target = parse_instance(&out).unwrap();
        assert_eq!(target.kind().name(), to);
        assert!(out.contains("# verified true"));
    }
    let path = gen(dir.path(), "end-of-line", 2, 0);
    assert_eq!(
        tfnp(&["reduce", path.to_str().unwrap(), "--to", "iter"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn svl_check_reports() {
    let o = tfnp(&[
        "svl-check",
        "--problem",
        "fixture:recursive-combine",
        "--x",
        "0110",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("T=30 checked=30 complete=true"));
    let o = tfnp(&[
        "svl-check",
        "--problem",
        "fixture:recursive-combine",
        "--x",
        "0110",
        "--budget",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn non_unique_iter_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // S(x) = (x0 | x1, 1): 00 -> 01 -> 11 and 10 -> 11, so 01 and 10 both solve.
    let text = "problem iter-with-source\nsource=10\nbegin successor\ncircuit s inputs=2 outputs=2\ng0 = INPUT 0\ng1 = INPUT 1\ng2 = OR g0 g1\ng3 = CONST 1\noutput 0 = g2\noutput 1 = g3\nend\n";
    let path = dir.path().join("two.inst");
    std::fs::write(&path, text).unwrap();
    let inst = parse_instance(text).unwrap();
    assert!(tfnp_core::solvers::all_solutions(&inst).unwrap().len() >= 2);
    let o = tfnp(&["svl-check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("promise violated"));
}

#[test]
fn factor_outputs() {
    assert_eq!(stdout(&tfnp(&["factor", "91"])), "7\n");
    assert_eq!(stdout(&tfnp(&["factor", "97"])), "prime\n");
    assert_eq!(stdout(&tfnp(&["factor", "12", "--all"])), "2 3 4 6\n");
    let out = stdout(&tfnp(&["factor", "12", "--all", "--via-oracle"]));
    assert!(out.starts_with("2 3 4 6\n# oracle queries: "));
    assert_eq!(
        stdout(&tfnp(&["factor", "91", "--via-oracle"])),
        "7\n# oracle queries: 13\n"
    );
}
