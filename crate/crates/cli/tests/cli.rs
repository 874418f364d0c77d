use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use spanforge::formula::{metrics, parse, StandardBounds};
use spanforge::sweep::CSV_HEADER;
use spanforge::{Registry, SpanProgram};
use tempfile::TempDir;

const BALANCED4: &str = "AND(OR(x1,x2),OR(x3,x4))";
const SKEW4: &str = "OR(AND(OR(x1,x2),x3),x4)";

fn spanforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spanforge"))
        .args(args)
        .env_remove("SPANFORGE_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    assert_eq!(
        code(out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn metrics_of_balanced_four() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bal.txt", BALANCED4);
    let m = json(&spanforge(&["metrics", s(&f)]));
    assert!((m["adv"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(m["n"], 4);
    assert_eq!(m["depth"], 2);
    assert_eq!(m["k_max"], 2);
}

#[test]
fn metrics_of_a_single_leaf_are_one() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "leaf.txt", "x1\n");
    let m = json(&spanforge(&["metrics", s(&f)]));
    for key in ["adv", "sigma_minus", "sigma_plus", "beta"] {
        assert_eq!(m[key].as_f64(), Some(1.0), "{key}");
    }
    assert_eq!(m["n"], 1);
}

#[test]
fn metrics_sigma_matches_library() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "skew.txt", SKEW4);
    let m = json(&spanforge(&["metrics", s(&f)]));
    let lib = metrics(
        &parse(SKEW4, &Registry::standard()).unwrap(),
        &StandardBounds::default(),
    )
    .unwrap();
    assert!((m["sigma_minus"].as_f64().unwrap() - lib.root_sigma_minus()).abs() < 1e-12);
}

#[test]
fn metrics_table_lists_every_field() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bal.txt", BALANCED4);
    let out = spanforge(&["metrics", s(&f), "--format", "table"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for key in [
        "n ",
        "depth",
        "adv",
        "sigma_minus",
        "sigma_plus",
        "beta",
        "k_max",
    ] {
        assert!(text.contains(key), "{text}");
    }
}

#[test]
fn parse_errors_carry_file_and_line() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.txt", "AND(x1,\n  FOO(x2,x3))\n");
    let out = spanforge(&["metrics", s(&f)]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.txt") && err.contains("2:"), "{err}");
}

#[test]
fn compose_round_trips() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bal.txt", BALANCED4);
    let out_path = dir.path().join("p.json");
    assert_eq!(
        code(&spanforge(&["compose", s(&f), "--out", s(&out_path)])),
        0
    );
    let text = std::fs::read_to_string(&out_path).unwrap();
    let program = SpanProgram::from_json_str(&text).unwrap();
    assert_eq!(program.n(), 4);
    let labels: Value = serde_json::from_str::<Value>(&text).unwrap()["labels"].clone();
    assert_eq!(labels.as_array().unwrap().len(), program.matrix().ncols());

    let or2 = write(&dir, "or2.txt", "OR(x1,x2)");
    let p = json(&spanforge(&["compose", s(&or2)]));
    assert_eq!(p["dim"], 1);
    assert_eq!(p["free"].as_array().unwrap().len(), 0);
}

#[test]
fn compose_rejects_gates_without_programs() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "maj.txt", "MAJ3(x1,x2,x3)");
    assert_eq!(code(&spanforge(&["compose", s(&f)])), 2);
}

#[test]
fn wsize_over_all_inputs() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bal.txt", BALANCED4);
    let r = json(&spanforge(&["wsize", s(&f), "--all"]));
    assert_eq!(r["rows"].as_array().unwrap().len(), 16);
    for side in ["true", "false"] {
        assert!((r["max_wsize"][side].as_f64().unwrap() - 2.0).abs() < 1e-8);
    }
    let one = json(&spanforge(&["wsize", s(&f), "--input", "1111"]));
    assert_eq!(one["rows"][0]["value"], true);
    assert_eq!(code(&spanforge(&["wsize", s(&f), "--input", "111"])), 2);
    assert_eq!(code(&spanforge(&["wsize", s(&f)])), 1);
}

#[test]
fn check_gap_on_four_leaves_passes() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bal.txt", BALANCED4);
    let out = spanforge(&["check", s(&f), "--lemma", "gap"]);
    let reports = json(&out);
    assert_eq!(reports.as_array().unwrap().len(), 1);
    assert_eq!(reports[0]["lemma"], "gap");
    assert_eq!(reports[0]["pass"], true);
}

#[test]
fn check_all_aggregates_formula_lemmas() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "skew.txt", SKEW4);
    let reports = json(&spanforge(&["check", s(&f), "--lemma", "all"]));
    let lemmas: Vec<&str> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["lemma"].as_str().unwrap())
        .collect();
    for lemma in ["compose", "dsnorm", "witness", "balance", "gap"] {
        assert!(lemmas.contains(&lemma), "{lemmas:?}");
    }
    assert!(reports
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["pass"] == true));
}

#[test]
fn check_program_lemmas() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "or2.txt", "OR(x1,x2)");
    let program = dir.path().join("or2.json");
    assert_eq!(
        code(&spanforge(&["compose", s(&f), "--out", s(&program)])),
        0
    );
    let reports = json(&spanforge(&[
        "check",
        s(&program),
        "--lemma",
        "all",
        "--costs",
        "1,2",
    ]));
    assert_eq!(reports.as_array().unwrap().len(), 2);
    assert_eq!(
        code(&spanforge(&["check", s(&program), "--lemma", "gap"])),
        1
    );
    assert_eq!(code(&spanforge(&["check", s(&f), "--lemma", "norm"])), 1);
    assert_eq!(code(&spanforge(&["check", s(&f), "--lemma", "nope"])), 1);
    assert_eq!(
        code(&spanforge(&["check", s(&program), "--costs", "1,2,3"])),
        2
    );
}

#[test]
fn corrupted_program_json_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "p.json",
        "{\"n\": 2, \"dim\": 1, \"target\": [1.0], \"inputs\": [",
    );
    let out = spanforge(&["check", s(&f), "--lemma", "norm"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("schema"));
    let f = write(
        &dir,
        "q.json",
        "{\"n\": 2, \"dim\": 1, \"target\": [1.0, 2.0], \"inputs\": []}",
    );
    assert_eq!(code(&spanforge(&["check", s(&f), "--lemma", "norm"])), 2);
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = [
        "sweep",
        "--family",
        "random-andor",
        "--sizes",
        "3..=9",
        "--seed",
        "7",
    ];
    let run = |csv: &Path, jobs: &str| {
        let mut args = base.to_vec();
        args.extend(["--csv", s(csv), "--jobs", jobs]);
        assert_eq!(code(&spanforge(&args)), 0);
        std::fs::read(csv).unwrap()
    };
    let first = run(&a, "1");
    assert_eq!(first, run(&b, "3"));
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));

    let other = spanforge(&[
        "sweep",
        "--family",
        "random-andor",
        "--sizes",
        "3..=9",
        "--seed",
        "8",
    ]);
    assert_ne!(other.stdout, text.as_bytes());
}

#[test]
fn empty_size_range_gives_header_only() {
    let out = spanforge(&["sweep", "--family", "balanced-andor", "--sizes", "6..5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        format!("{CSV_HEADER}\n")
    );
}

#[test]
fn balanced_sweep_estimate_over_sqrt_n_is_bounded() {
    let out = spanforge(&["sweep", "--family", "balanced-andor", "--sizes", "2,4,8,16"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (n_col, t_col) = (col("n"), col("t_est"));
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let n: f64 = cells[n_col].parse().unwrap();
        let t: f64 = cells[t_col].parse().unwrap();
        assert!(t / n.sqrt() < 10.0, "{line}");
    }
}

#[test]
fn seed_precedence_file_flag_env() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "run.cfg",
        "# sweep settings\nfamily = random-andor\nsizes = 4..=7\nseed = 3\n",
    );
    let by_flag = spanforge(&[
        "sweep",
        "--sizes",
        "4..=7",
        "--family",
        "random-andor",
        "--seed",
        "5",
    ]);
    let by_file = spanforge(&["--config", s(&cfg), "sweep"]);
    let file_then_flag = spanforge(&["--config", s(&cfg), "sweep", "--seed", "5"]);
    let env = Command::new(env!("CARGO_BIN_EXE_spanforge"))
        .args(["--config", s(&cfg), "sweep", "--seed", "9"])
        .env("SPANFORGE_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(code(&by_file), 0);
    assert_eq!(file_then_flag.stdout, by_flag.stdout);
    assert_eq!(env.stdout, by_flag.stdout);
    assert_ne!(by_file.stdout, by_flag.stdout);
}

#[test]
fn bad_config_and_usage_codes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.cfg", "colour = red\n");
    assert_eq!(code(&spanforge(&["--config", s(&cfg), "sweep"])), 2);
    assert_eq!(code(&spanforge(&["sweep", "--sizes", "2..4"])), 1);
    assert_eq!(code(&spanforge(&["frobnicate"])), 1);
    assert_eq!(code(&spanforge(&["metrics", "/nonexistent/file.txt"])), 2);
    assert_eq!(code(&spanforge(&["--help"])), 0);
}

#[test]
fn graph_outputs() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bal.txt", BALANCED4);
    let g = json(&spanforge(&["graph", s(&f)]));
    let abs = g["abs_norm"].as_f64().unwrap();
    let q = &g["query_estimate"];
    assert!(
        (q["t_est"].as_f64().unwrap() - abs * q["full_witness_size"].as_f64().unwrap()).abs()
            < 1e-9
    );
    let dot = spanforge(&["graph", s(&f), "--dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("graph"));
    let tree = json(&spanforge(&[
        "graph",
        s(&f),
        "--nand-tree",
        "--input",
        "1010",
    ]));
    assert_eq!(tree["root_zero_mode"], true);
    assert_eq!(tree["root_nand"], false);
}

#[test]
fn adversary_of_and_or_gates() {
    let a = json(&spanforge(&[
        "adversary",
        "--gate",
        "0001",
        "--costs",
        "1,2",
    ]));
    assert!((a["adv"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-3);
    let m = json(&spanforge(&["adversary", "--gate", "MAJ3"]));
    assert!((m["adv"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    assert_eq!(code(&spanforge(&["adversary", "--gate", "NOPE"])), 2);
}
