use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_structbias");

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Scratch {
        let dir = std::env::temp_dir().join(format!("structbias-cli-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let path = self.0.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# structbias-csv v1"));
    let body: String = lines.collect::<Vec<_>>().join("\n");
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

const MATCHING_TRIANGLE: &str = r#"
n = 10
family = "matching"
bias = "n/2"
win = "triangle"
maker = "maker.triangle.matching"
breaker = "breaker.baseline.random"
first = "maker"
seeds = 1000
"#;

#[test]
fn matching_triangle_match_is_all_maker_in_four_moves() {
    let dir = Scratch::new("match");
    let config = dir.file("m.toml", MATCHING_TRIANGLE);
    let out = dir.path("m.csv");
    let result = run(&["play", "--config", arg(&config), "--out", arg(&out)]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1000);
    // columns: winner is 9, maker_moves 11
    assert!(rows
        .iter()
        .all(|r| r[9] == "maker" && r[11].parse::<usize>().unwrap() <= 4));

    let replay = run(&["record", arg(&out)]);
    assert!(replay.status.success());
    assert!(String::from_utf8_lossy(&replay.stdout).contains("1000 of 1000 records replay legally"));
}

#[test]
fn csv_is_byte_identical_across_job_counts() {
    let dir = Scratch::new("jobs");
    let config = dir.file("m.toml", &MATCHING_TRIANGLE.replace("seeds = 1000", "seeds = 200"));
    let (one, four) = (dir.path("one.csv"), dir.path("four.csv"));
    assert!(
        run(&["play", "--config", arg(&config), "--jobs", "1", "--out", arg(&one)])
            .status
            .success()
    );
    assert!(
        run(&["play", "--config", arg(&config), "--jobs", "4", "--out", arg(&four)])
            .status
            .success()
    );
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&four).unwrap());

    let shifted = dir.path("shifted.csv");
    assert!(run(&[
        "play",
        "--config",
        arg(&config),
        "--seed",
        "50",
        "--seeds",
        "10",
        "--out",
        arg(&shifted)
    ])
    .status
    .success());
    let rows = csv_rows(&shifted);
    assert_eq!(
        rows.iter().map(|r| r[8].as_str()).collect::<Vec<_>>(),
        (50..60).map(|s| s.to_string()).collect::<Vec<_>>()
    );
}

#[test]
fn tree_growth_and_factorization_matches() {
    let dir = Scratch::new("connect");
    let tree = dir.file(
        "tree.toml",
        r#"
        n = 8
        family = "matching"
        bias = "n/2"
        win = "connectivity"
        maker = "maker.connectivity.tree"
        breaker = "breaker.baseline.greedy"
        first = "maker"
        seeds = 20
        "#,
    );
    let out = dir.path("tree.csv");
    assert!(run(&["play", "--config", arg(&tree), "--out", arg(&out)])
        .status
        .success());
    assert!(csv_rows(&out).iter().all(|r| r[9] == "maker" && r[11] == "7"));

    let fact = dir.file(
        "fact.toml",
        r#"
        n = 8
        family = "matching"
        bias = "4"
        win = "connectivity"
        maker = "maker.baseline.random"
        breaker = "breaker.matching.factorization"
        first = "breaker"
        seeds = 20
        "#,
    );
    assert!(run(&["play", "--config", arg(&fact), "--out", arg(&out)])
        .status
        .success());
    assert!(csv_rows(&out).iter().all(|r| r[9] == "breaker"));
}

#[test]
fn star_scan_rates() {
    let dir = Scratch::new("scan");
    let config = dir.file(
        "scan.toml",
        r#"
        n = 12
        family = "star"
        scan = { from = "1", to = "5" }
        win = "triangle"
        maker = "maker.triangle.star"
        breaker = ["breaker.baseline.random", "breaker.baseline.greedy"]
        seeds = 50
        "#,
    );
    let out = dir.path("scan.csv");
    assert!(run(&["scan", "--config", arg(&config), "--out", arg(&out)])
        .status
        .success());
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 10);
    for r in &rows {
        let (b, rate): (usize, f64) = (r[2].parse().unwrap(), r[7].parse().unwrap());
        if b <= 3 {
            assert_eq!(rate, 1.0, "{r:?}");
        }
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = Scratch::new("errors");
    let empty = dir.file("empty.toml", &MATCHING_TRIANGLE.replace("n = 10", "n = [12, 10]"));
    let unknown = dir.file(
        "unknown.toml",
        &MATCHING_TRIANGLE.replace("maker.triangle.matching", "maker.nope"),
    );
    let garbled = dir.file("garbled.toml", "n = [");
    for path in [&empty, &unknown, &garbled, &dir.path("missing.toml")] {
        let out = run(&["play", "--config", arg(path)]);
        assert_eq!(out.status.code(), Some(2), "{}", path.display());
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(run(&["play"]).status.code(), Some(2));
    assert_eq!(
        run(&["solve", "--n", "4", "--bias", "ring:1", "--win", "triangle"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn solver_verdicts_on_tiny_boards() {
    let k4 = run(&["solve", "--n", "4", "--bias", "free:1", "--win", "triangle"]);
    assert!(k4.status.success());
    let json: serde_json::Value = serde_json::from_slice(&k4.stdout).unwrap();
    assert_eq!(json["winner"], "breaker");
    assert_eq!(json["first"], "breaker");

    let k5 = run(&[
        "solve",
        "--n",
        "5",
        "--bias",
        "free:1",
        "--win",
        "triangle",
        "--no-memo",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&k5.stdout).unwrap();
    assert_eq!(json["winner"], "maker");
    assert!(json["nodes"].as_u64().unwrap() > 0);

    let starved = run(&[
        "solve",
        "--n",
        "6",
        "--bias",
        "star:2",
        "--win",
        "connectivity",
        "--budget",
        "10",
    ]);
    assert_eq!(starved.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&starved.stderr).contains("budget"));
}

#[test]
fn solve_continues_from_a_record() {
    let dir = Scratch::new("solve-record");
    let record = dir.file(
        "r.json",
        r#"{"version":1,"n":5,"bias":{"family":"free","size":1},"win":"triangle","first":"B","moves":[{"p":"B","e":[[0,1]]}]}"#,
    );
    let out = run(&["solve", "--record", arg(&record)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["moves_played"], 1);
    assert_eq!(json["to_move"], "maker");
}

#[test]
fn tampered_records_exit_with_one() {
    let dir = Scratch::new("tamper");
    let good = r#"{"version":1,"n":6,"bias":{"family":"matching","size":2},"win":"connectivity","first":"M","moves":[{"p":"M","e":[[0,1]]},{"p":"B","e":[[2,3],[4,5]]}]}"#;
    let path = dir.file("good.jsonl", &format!("{good}\n{good}\n"));
    let out = run(&["record", arg(&path), "--moves"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("line 2: K_6 matching:2 connectivity, maker first, 2 moves, maker to move"),
        "{text}"
    );
    assert!(text.contains("B: (2,3) (4,5)"));

    let bad = good.replace("[[2,3],[4,5]]", "[[1,2],[2,3]]");
    let path = dir.file("bad.json", &bad);
    let out = run(&["record", arg(&path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("illegal replay at move 1"));
}

#[test]
fn lemma_suites_report_and_pass() {
    let dir = Scratch::new("lemmas");
    let out = dir.path("lemmas.json");
    let result = run(&[
        "lemmas",
        "deletion",
        "box",
        "expander",
        "--graphs",
        "200",
        "--out",
        arg(&out),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stdout));
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("deletion: pass, 5470 cases, 0 violations"));
    let reports: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 3);
    assert_eq!(run(&["lemmas", "bogus"]).status.code(), Some(2));
}

#[test]
fn serve_answers_http() {
    let mut child = Command::new(BIN)
        .args(["serve", "--port", "0"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut banner = String::new();
    BufReader::new(child.stderr.take().unwrap())
        .read_line(&mut banner)
        .unwrap();
    let addr = banner.trim().rsplit("http://").next().unwrap().to_string();
    let mut stream = TcpStream::connect(&addr).unwrap();
    write!(
        stream,
        "GET /strategies HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n"
    )
    .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("breaker.matching.factorization"));
}
