mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use exact_lu::cli::{run, CliOutput};
use exact_lu::failure_degree;
use exact_lu::format::{parse_blocks, AnyMatrix, Block};
use serde_json::Value;
use tempfile::TempDir;

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn exec(args: &[&str]) -> CliOutput {
    let mut full = vec!["exact-lu"];
    full.extend_from_slice(args);
    run(full)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SWAP: &str = "2 2 Q\n0 1\n1 0\n";

#[test]
fn check_counterexample() {
    let files = Files::new();
    let p = files.write("swap.txt", SWAP);
    let out = exec(&["check", path_str(&p)]);
    assert_eq!(out.code, 1);
    assert!(out
        .stdout
        .ends_with("verdict: no LU factorization\nfailure degree: 1\n"));
    let first_row = out.stdout.lines().nth(1).unwrap();
    assert_eq!(
        first_row.split_whitespace().collect::<Vec<_>>(),
        ["1", "0", "1", "1", "1"]
    );
    assert!(out
        .stdout
        .lines()
        .next()
        .unwrap()
        .contains("rank A[{1..k},{1..2}]"));
}

#[test]
fn check_json() {
    let files = Files::new();
    let p = files.write("swap.txt", SWAP);
    let out = exec(&["check", "--json", path_str(&p)]);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["failure_degree"], 1);
    assert_eq!(v["verdict"], "does-not-exist");
    assert_eq!(v["per_k"][0]["deficiency"], 1);
    assert_eq!(v["per_k"][0]["rank_leading"], 0);
    assert_eq!(v["factors"], Value::Array(vec![]));
    assert!(v.get("trace").is_none());
}

#[test]
fn lu_identity() {
    let files = Files::new();
    let p = files.write("id.txt", "3 3 Q\n1 0 0\n0 1 0\n0 0 1\n");
    let out = exec(&["lu", path_str(&p)]);
    assert_eq!(out.code, 0);
    let blocks = parse_blocks(&out.stdout).unwrap();
    assert_eq!(blocks.len(), 2);
    let v = exec(&[
        "verify",
        path_str(&p),
        path_str(&files.write("f.txt", &out.stdout)),
    ]);
    assert_eq!(v.code, 0, "{}", v.stdout);
}

#[test]
fn lu_refused_with_report() {
    let files = Files::new();
    let p = files.write("swap.txt", SWAP);
    let out = exec(&["lu", path_str(&p)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("no LU factorization"));
    assert!(out.stdout.contains("failure degree: 1"));
}

#[test]
fn kw_blocks() {
    let files = Files::new();
    let p = files.write("swap.txt", SWAP);
    let out = exec(&["kw", "--extra", "1", path_str(&p)]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "2 2 Q\n1 0\n0 1\n---\n2 2 Q\n0 1\n1 0\n");
    assert_eq!(exec(&["kw", "--extra", "0", path_str(&p)]).code, 1);
}

#[test]
fn hv_blocks() {
    let files = Files::new();
    let p = files.write("swap.txt", SWAP);
    let out = exec(&["hv", "--extra", "1", path_str(&p)]);
    assert_eq!(out.code, 0);
    assert_eq!(
        out.stdout,
        "2 3 Q\n1 0 0\n0 1 0\n---\n3 2 Q\n0 1\n1 0\n0 0\n"
    );
    assert_eq!(exec(&["hv", "--extra", "0", path_str(&p)]).code, 1);
}

#[test]
fn plu_prints_permutation_first() {
    let files = Files::new();
    let p = files.write("swap.txt", SWAP);
    let out = exec(&["plu", path_str(&p)]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("[2 1]\n---\n"));
    let out = exec(&["lup", path_str(&p)]);
    assert!(out.stdout.ends_with("---\n[2 1]\n"));
}

#[test]
fn trace_lines() {
    let files = Files::new();
    let p = files.write("swap.txt", SWAP);
    let out = exec(&["kw", "--extra", "1", "--trace", path_str(&p)]);
    assert!(out
        .stdout
        .starts_with("k=1 pivot=(1,2) priority=2\nk=2 pivot=(2,1) priority=2\n"));
    // trace lines are skipped by the block reader, so the output still verifies
    let f = files.write("f.txt", &out.stdout);
    assert_eq!(exec(&["verify", path_str(&p), path_str(&f)]).code, 0);

    let z = files.write("z.txt", "2 2 F3\n0 0\n0 0\n");
    let out = exec(&["lu", "--trace", "--json", path_str(&z)]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["trace"][1], "k=2 pivot=none");
}

#[test]
fn extra_flag_rules() {
    let files = Files::new();
    let p = files.write("swap.txt", SWAP);
    assert_eq!(exec(&["kw", path_str(&p)]).code, 2);
    assert_eq!(exec(&["hv", path_str(&p)]).code, 2);
    assert_eq!(exec(&["lu", "--extra", "1", path_str(&p)]).code, 2);
    assert_eq!(exec(&["check", "--extra", "1", path_str(&p)]).code, 2);
}

#[test]
fn parse_errors_exit_2() {
    let files = Files::new();
    let short = files.write("short.txt", "2 2 Q\n0 1\n1\n");
    let out = exec(&["check", path_str(&short)]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 3, column 2"), "{}", out.stderr);

    let bad_mod = files.write("f6.txt", "1 1 F6\n1\n");
    let out = exec(&["lu", path_str(&bad_mod)]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("not prime"));

    let frac = files.write("frac.txt", "1 1 F5\n1/2\n");
    assert_eq!(exec(&["lu", path_str(&frac)]).code, 2);

    let rect = files.write("rect.txt", "1 2 Q\n1 2\n");
    assert_eq!(exec(&["check", path_str(&rect)]).code, 2);

    assert_eq!(exec(&["check", "/nonexistent/matrix.txt"]).code, 2);
    assert_eq!(exec(&["frobnicate"]).code, 2);
}

#[test]
fn reduces_mod_p_in_files() {
    let files = Files::new();
    let p = files.write("f5.txt", "1 1 F5\n9\n");
    let out = exec(&["lu", path_str(&p)]);
    assert_eq!(out.stdout, "1 1 F5\n4\n---\n1 1 F5\n1\n");
}

#[test]
fn zero_matrix_json_factors() {
    let files = Files::new();
    let p = files.write("z.txt", "2 2 Q\n0 0\n0 0\n");
    let out = exec(&["lu", "--json", path_str(&p)]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(
        v["factors"],
        serde_json::json!([[["0", "0"], ["0", "0"]], [["0", "0"], ["0", "0"]]])
    );
}

#[test]
fn json_factors_round_trip_over_f7() {
    let files = Files::new();
    let text = "3 3 F7\n0 3 5\n2 0 6\n4 6 0\n";
    let p = files.write("a.txt", text);
    let out = exec(&["hv", "--extra", "1", "--json", path_str(&p)]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    // rebuild matrix files from the JSON rows and verify them
    let blocks: Vec<String> = v["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| {
            let rows = m.as_array().unwrap();
            let cols = rows[0].as_array().unwrap().len();
            let mut s = format!("{} {} F7\n", rows.len(), cols);
            for r in rows {
                let toks: Vec<&str> = r
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|x| x.as_str().unwrap())
                    .collect();
                s.push_str(&toks.join(" "));
                s.push('\n');
            }
            s
        })
        .collect();
    let f = files.write("f.txt", &blocks.join("---\n"));
    assert_eq!(exec(&["verify", path_str(&p), path_str(&f)]).code, 0);
}

#[test]
fn verify_reports_first_difference() {
    let files = Files::new();
    let stream = files.write(
        "s.txt",
        "2 2 Q\n0 1\n1 0\n---\n2 2 Q\n1 0\n0 1\n---\n2 2 Q\n0 1\n1 1/2\n",
    );
    let out = exec(&["verify", path_str(&stream)]);
    assert_eq!(out.code, 1);
    assert_eq!(
        out.stdout,
        "mismatch: first difference at (2,2): expected 0, got 1/2\n"
    );

    let ok = files.write("ok.txt", "2 2 Q\n0 1\n1 0\n---\n[2 1]\n");
    assert_eq!(exec(&["verify", path_str(&ok)]).code, 0);

    let bad_dims = files.write(
        "bd.txt",
        "2 2 Q\n0 1\n1 0\n---\n1 1 Q\n1\n---\n2 2 Q\n1 0\n0 1\n",
    );
    assert_eq!(exec(&["verify", path_str(&bad_dims)]).code, 2);

    let mixed = files.write("mx.txt", "1 1 Q\n1\n---\n1 1 F5\n1\n");
    assert_eq!(exec(&["verify", path_str(&mixed)]).code, 2);
}

/// Every factorization verb, re-multiplied by `verify`, reproduces its input.
#[test]
fn factor_outputs_verify() {
    use common::{corpus, f5, Sample};
    use exact_lu::Rationals;

    fn sweep<F: Sample>(field: &F, seed: u64, files: &Files) {
        for (idx, a) in corpus(field, 25, 6, seed).into_iter().enumerate() {
            let p = files.write(&format!("a{seed}_{idx}.txt"), &a.to_string());
            let m = failure_degree(&a).unwrap().to_string();
            let verbs: Vec<Vec<&str>> = vec![
                vec!["lu"],
                vec!["kw", "--extra", &m],
                vec!["hv", "--extra", &m],
                vec!["ulu"],
                vec!["lul"],
                vec!["plu"],
                vec!["lup"],
            ];
            for verb in verbs {
                let mut args = verb.clone();
                args.push(path_str(&p));
                let out = exec(&args);
                if verb[0] == "lu" && m != "0" {
                    assert_eq!(out.code, 1);
                    continue;
                }
                assert_eq!(out.code, 0, "{verb:?} on\n{a}");
                let f = files.write("factors.txt", &out.stdout);
                let v = exec(&["verify", path_str(&p), path_str(&f)]);
                assert_eq!(v.code, 0, "{verb:?}: {}", v.stdout);
                // byte-deterministic
                assert_eq!(exec(&args), out);
            }
        }
    }

    let files = Files::new();
    sweep(&Rationals, 21, &files);
    sweep(&f5(), 22, &files);
}

#[test]
fn blocks_carry_fields() {
    let blocks = parse_blocks("1 1 F7\n3\n").unwrap();
    assert!(matches!(&blocks[0], Block::Matrix(AnyMatrix::Prime(m)) if m.field().modulus() == 7));
}

#[test]
fn selftest_passes() {
    let out = exec(&["selftest"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out
        .stdout
        .contains("ok   lu-existence GF(2) n=3: 512/512 agree"));
    assert!(out.stdout.ends_with("selftest: pass\n"));
}

#[test]
fn binary_exit_codes() {
    let files = Files::new();
    let p = files.write("swap.txt", SWAP);
    let bin = env!("CARGO_BIN_EXE_exact-lu");
    let status = Command::new(bin)
        .args(["check", path_str(&p)])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    let status = Command::new(bin)
        .args(["kw", "--extra", "1", path_str(&p)])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(status.stdout).unwrap(),
        "2 2 Q\n1 0\n0 1\n---\n2 2 Q\n0 1\n1 0\n"
    );
    let status = Command::new(bin)
        .args(["kw", path_str(&p)])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}
