use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

struct Run {
    code: i32,
    stdout: String,
}

fn linfactor<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_linfactor"))
        .args(args)
        .current_dir(workspace_root())
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
    }
}

fn json(run: &Run) -> Value {
    serde_json::from_str(&run.stdout).unwrap_or_else(|e| panic!("{e}: {}", run.stdout))
}

fn forms(v: &Value) -> Vec<Vec<String>> {
    let mut f: Vec<Vec<String>> = v["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| {
            f["coeffs"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| c.as_str().unwrap().to_owned())
                .collect()
        })
        .collect();
    f.sort();
    f
}

fn strings(s: &[&[&str]]) -> Vec<Vec<String>> {
    s.iter()
        .map(|r| r.iter().map(|c| c.to_string()).collect())
        .collect()
}

/// Split a command line on whitespace, keeping double-quoted runs together.
fn split_command(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut any = false;
    for ch in line.chars() {
        match ch {
            '"' => {
                quoted = !quoted;
                any = true;
            }
            c if c.is_whitespace() && !quoted => {
                if any {
                    out.push(std::mem::take(&mut cur));
                    any = false;
                }
            }
            c => {
                cur.push(c);
                any = true;
            }
        }
    }
    if any {
        out.push(cur);
    }
    out
}

/// Every `linfactor ...` line inside a fenced block of the README.
fn documented_commands() -> Vec<Vec<String>> {
    let readme = std::fs::read_to_string(workspace_root().join("README.md")).unwrap();
    let mut fenced = false;
    let mut cmds = Vec::new();
    for line in readme.lines() {
        let t = line.trim();
        if t.starts_with("```") {
            fenced = !fenced;
            continue;
        }
        if let Some(rest) = t
            .strip_prefix("$ linfactor ")
            .or_else(|| t.strip_prefix("linfactor "))
        {
            if fenced {
                cmds.push(split_command(rest));
            }
        }
    }
    cmds
}

#[test]
fn difference_of_squares_with_lie() {
    let run = linfactor(&["--expr", "x1^2 - x2^2", "--algorithm", "lie"]);
    assert_eq!(run.code, 0);
    let v = json(&run);
    assert_eq!(v["status"], "factored");
    assert_eq!(v["lambda"], "1/1");
    assert_eq!(forms(&v), strings(&[&["1/1", "-1/1"], &["1/1", "1/1"]]));
    assert_eq!(v["algorithm"], "lie");
    assert_eq!(v["seed"], 0);
}

#[test]
fn sum_of_squares_exists_over_closure() {
    let run = linfactor(&["--expr", "x1^2 + x2^2", "--algorithm", "lie"]);
    assert_eq!(run.code, 0);
    let v = json(&run);
    assert_eq!(v["status"], "exists-over-closure");
    assert_eq!(v["lambda"], Value::Null);
    assert_eq!(v["factors"], serde_json::json!([]));
}

#[test]
fn three_lines_with_hyperplane() {
    let run = linfactor(&["--expr", "x1*x2*(x1+x2)", "--algorithm", "hyperplane"]);
    assert_eq!(run.code, 0);
    let v = json(&run);
    assert_eq!(v["status"], "factored");
    assert_eq!(
        forms(&v),
        strings(&[&["0/1", "1/1"], &["1/1", "0/1"], &["1/1", "1/1"]])
    );
    assert!(v["blackbox_calls"].as_u64().unwrap() > 0);
}

#[test]
fn not_product_exits_one() {
    let run = linfactor(&[
        "--sparse",
        "samples/sum_of_cubes.sparse",
        "--algorithm",
        "lie",
    ]);
    assert_eq!(run.code, 1);
    assert_eq!(json(&run)["status"], "not-product");
}

#[test]
fn input_errors_exit_two() {
    let run = linfactor(&["--expr", "x1 +* x2"]);
    assert_eq!(run.code, 2);
    assert_eq!(json(&run)["status"], "error");
    let run = linfactor(&["--circuit", "samples/missing.circuit"]);
    assert_eq!(run.code, 2);
    assert_eq!(linfactor::<&str>(&[]).code, 2);
}

#[test]
fn circuit_and_sparse_files() {
    let v = json(&linfactor(&[
        "--circuit",
        "samples/f1.circuit",
        "--algorithm",
        "bivariate",
    ]));
    assert_eq!(v["status"], "factored");
    assert_eq!(
        forms(&v),
        strings(&[&["1/1", "1/1", "1/1", "1/1"], &["1/1", "2/1", "2/1", "1/1"]])
    );
    let v = json(&linfactor(&["--sparse", "samples/three_lines.sparse"]));
    assert_eq!(v["status"], "factored");
    assert_eq!(
        forms(&v),
        strings(&[&["0/1", "1/1"], &["1/1", "-1/1"], &["1/1", "1/1"]])
    );
}

#[test]
fn temp_circuit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.circuit");
    std::fs::write(
        &path,
        "vars 2\ninput 1\ninput 2\nadd 0 1\nmul 2 2\nmul 3 0\noutput 4\n",
    )
    .unwrap();
    let run = linfactor(&["--circuit".as_ref(), path.as_os_str()]);
    let v = json(&run);
    assert_eq!(v["status"], "factored");
    assert_eq!(forms(&v), strings(&[&["1/1", "0/1"], &["1/1", "1/1"]]));
}

#[test]
fn blackbox_calls_track_the_seed_and_flags() {
    let a = json(&linfactor(&[
        "--expr",
        "x1*x2*(x1+x2)",
        "--algorithm",
        "hyperplane",
    ]));
    let b = json(&linfactor(&[
        "--expr",
        "x1*x2*(x1+x2)",
        "--algorithm",
        "hyperplane",
        "--deterministic-line-test",
    ]));
    assert_eq!(a["factors"], b["factors"]);
    assert!(b["blackbox_calls"].as_u64().unwrap() >= a["blackbox_calls"].as_u64().unwrap());
}

#[test]
fn documented_examples_are_deterministic() {
    let cmds = documented_commands();
    assert!(cmds.len() >= 6, "README lists {} examples", cmds.len());
    let mut passed = 0;
    for cmd in &cmds {
        let first = linfactor(cmd);
        let second = linfactor(cmd);
        assert_eq!(first.stdout, second.stdout, "linfactor {}", cmd.join(" "));
        assert_eq!(first.code, second.code);
        assert_ne!(
            first.code,
            2,
            "linfactor {}: {}",
            cmd.join(" "),
            first.stdout
        );
        passed += 1;
    }
    println!(
        "criterion 9 (CLI determinism): PASS ({passed}/{} documented commands byte-identical)",
        cmds.len()
    );
}
