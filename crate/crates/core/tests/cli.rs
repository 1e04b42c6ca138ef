mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqmine::io::write_event_table;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn seqmine(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqmine"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn write_table(dir: &Path, name: &str, db: &seqmine::SequenceDatabase) -> PathBuf {
    let path = dir.join(name);
    let mut out = Vec::new();
    write_event_table(db, &mut out).unwrap();
    fs::write(&path, out).unwrap();
    path
}

#[test]
fn mine_learner_log() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("learner.txt");
    let out = seqmine(
        &[
            "mine",
            "--input",
            input.to_str().unwrap(),
            "--format",
            "basket",
            "--min-support",
            "0.5",
            "--max-gap",
            "1",
            "--min-items",
            "2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(
        text(&out.stdout),
        "pattern\tsupport_count\tf_support\ti_support_total\n\
         {attempt} -> {note}\t2\t0.500000\t2\n\
         {note} -> {attempt}\t2\t0.500000\t2\n\
         {read} -> {attempt}\t3\t0.750000\t3\n\
         {attempt} -> {note} -> {attempt}\t2\t0.500000\t2\n"
    );
}

#[test]
fn mine_writes_instance_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("itemsets.txt");
    let out = seqmine(
        &[
            "mine",
            "--input",
            input.to_str().unwrap(),
            "--min-count",
            "1",
            "--max-items",
            "2",
            "--instances",
            "--out",
            "p.tsv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    let raw = fs::read_to_string(dir.path().join("p.tsv.instances.csv")).unwrap();
    // itemset headers such as {b,c} contain commas and come out quoted
    assert!(raw.contains("\"{b,c}\""));
    let mut reader = csv::Reader::from_reader(raw.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .unwrap()
        .iter()
        .map(str::to_owned)
        .collect();
    assert_eq!(header[0], "sequence_id");
    let patterns = fs::read_to_string(dir.path().join("p.tsv")).unwrap();
    assert_eq!(header.len(), patterns.lines().count());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let col = |name: &str| -> Vec<String> {
        let k = header.iter().position(|h| h == name).unwrap();
        rows.iter().map(|r| r[k].to_owned()).collect()
    };
    assert_eq!(col("{b} -> {c}"), ["1", "0", "2", "0"]);
    assert_eq!(col("{b,c}"), ["0", "0", "0", "1"]);
}

#[test]
fn mine_closed_and_generators() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("learner.txt");
    let base = [
        "mine",
        "--input",
        input.to_str().unwrap(),
        "--min-support",
        "0.5",
        "--max-gap",
        "1",
    ];
    let closed = seqmine(&[&base[..], &["--closed"]].concat(), dir.path());
    let rows: Vec<String> = text(&closed.stdout)
        .lines()
        .skip(1)
        .map(|l| l.split('\t').next().unwrap().to_owned())
        .collect();
    assert_eq!(
        rows,
        ["{read} -> {attempt}", "{attempt} -> {note} -> {attempt}"]
    );
    let gens = seqmine(&[&base[..], &["--generators"]].concat(), dir.path());
    assert!(text(&gens.stdout).contains("{read} -> {attempt}\t3"));
    let both = seqmine(
        &[&base[..], &["--closed", "--generators"]].concat(),
        dir.path(),
    );
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("learner.txt");
    let missing = seqmine(&["mine", "--input", "no-such-file.txt"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(text(&missing.stderr).lines().count(), 1);
    let range = seqmine(
        &[
            "mine",
            "--input",
            input.to_str().unwrap(),
            "--min-support",
            "1.5",
        ],
        dir.path(),
    );
    assert_eq!(range.status.code(), Some(3));
    let both = seqmine(
        &[
            "mine",
            "--input",
            input.to_str().unwrap(),
            "--min-support",
            "0.5",
            "--min-count",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(both.status.code(), Some(2));
    let gap = seqmine(
        &["mine", "--input", input.to_str().unwrap(), "--max-gap", "0"],
        dir.path(),
    );
    assert_eq!(gap.status.code(), Some(3));
    let instances = seqmine(
        &["mine", "--input", input.to_str().unwrap(), "--instances"],
        dir.path(),
    );
    assert_eq!(instances.status.code(), Some(2));
    assert_eq!(seqmine(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn preprocess_collapse_all() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.txt"), "s;1;read\ns;2;read\ns;3;quiz\n").unwrap();
    let out = seqmine(
        &["preprocess", "--input", "in.txt", "--collapse", "all"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(text(&out.stdout), "s;1;read-MULT\ns;2;quiz\n");
}

#[test]
fn preprocess_without_transforms_copies() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("learner.txt");
    let out = seqmine(
        &[
            "preprocess",
            "--input",
            input.to_str().unwrap(),
            "--out",
            "copy.txt",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let copy = fs::read_to_string(dir.path().join("copy.txt")).unwrap();
    let again = seqmine(&["preprocess", "--input", "copy.txt"], dir.path());
    assert_eq!(text(&again.stdout), copy);
    assert_eq!(copy.lines().count(), 17);
}

#[test]
fn preprocess_five_bins() {
    let dir = tempfile::tempdir().unwrap();
    let mut basket = String::new();
    for s in ["x", "y"] {
        for k in 1..=10 {
            basket.push_str(&format!("{s};{k};e{k}\n"));
        }
    }
    fs::write(dir.path().join("ten.txt"), basket).unwrap();
    let out = seqmine(
        &[
            "preprocess",
            "--input",
            "ten.txt",
            "--segment",
            "bins:5",
            "--out",
            "ten.out",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    for k in 1..=5 {
        let bin = fs::read_to_string(dir.path().join(format!("ten.out.bin{k}"))).unwrap();
        let want = format!(
            "x;1;e{}\nx;2;e{}\ny;1;e{}\ny;2;e{}\n",
            2 * k - 1,
            2 * k,
            2 * k - 1,
            2 * k
        );
        assert_eq!(bin, want);
    }
    assert!(!dir.path().join("ten.out.bin6").exists());
}

#[test]
fn preprocess_applies_flags_in_order() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.txt"), "s;1;hint\ns;2;read\ns;3;read\n").unwrap();
    fs::write(
        dir.path().join("rules.txt"),
        "# merge help-seeking\nhint|read-MULT -> help\n",
    )
    .unwrap();
    let first = seqmine(
        &[
            "preprocess",
            "--input",
            "in.txt",
            "--collapse",
            "--abstract",
            "rules.txt",
        ],
        dir.path(),
    );
    assert_eq!(text(&first.stdout), "s;1;help\n");
    let second = seqmine(
        &[
            "preprocess",
            "--input",
            "in.txt",
            "--abstract",
            "rules.txt",
            "--collapse",
        ],
        dir.path(),
    );
    assert_eq!(text(&second.stdout), "s;1;hint\ns;2;read-MULT\n");
    let filtered = seqmine(
        &[
            "preprocess",
            "--input",
            "in.txt",
            "--filter",
            "read",
            "--collapse",
        ],
        dir.path(),
    );
    assert_eq!(text(&filtered.stdout), "s;1;hint\n");
}

#[test]
fn preprocess_context_and_sessions() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("log.csv"),
        "sequence_id,event_id,label,timestamp,duration\n\
         u,1,read,0,10\nu,2,read,30,90\nu,3,quiz,5000,40\n",
    )
    .unwrap();
    fs::write(dir.path().join("ctx.txt"), "duration,60\n").unwrap();
    let out = seqmine(
        &[
            "preprocess",
            "--input",
            "log.csv",
            "--format",
            "table",
            "--context",
            "ctx.txt",
            "--segment",
            "by-session:600",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    let body = text(&out.stdout);
    let labels: Vec<&str> = body
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(labels, ["read-short", "read-long", "quiz-short"]);
    let ids: Vec<&str> = body
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(ids, ["u:1", "u:1", "u:2"]);
    let missing = seqmine(
        &[
            "preprocess",
            "--input",
            "log.csv",
            "--format",
            "table",
            "--segment",
            "by-actor",
        ],
        dir.path(),
    );
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn diff_planted_fixture() {
    let dir = tempfile::tempdir().unwrap();
    write_table(dir.path(), "groups.csv", &common::planted_differential());
    let out = seqmine(
        &[
            "diff",
            "--input",
            "groups.csv",
            "--format",
            "table",
            "--out",
            "d.tsv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    let summary = text(&out.stdout);
    let table = fs::read_to_string(dir.path().join("d.tsv")).unwrap();
    assert!(table.starts_with('#'));
    let header: Vec<&str> = table.lines().nth(1).unwrap().split('\t').collect();
    let q = |row: &&str, col: &str| -> f64 {
        row.split('\t')
            .nth(header.iter().position(|h| *h == col).unwrap())
            .unwrap()
            .parse()
            .unwrap()
    };
    let rows: Vec<&str> = table.lines().skip(2).collect();
    let x = rows
        .iter()
        .find(|r| r.starts_with("{quiz} -> {read}\t"))
        .unwrap();
    assert!(q(x, "q_support") < 0.05);
    assert_eq!(
        (q(x, "mean_instances_a"), q(x, "mean_instances_b")),
        (2.0, 0.0)
    );
    let significant = rows
        .iter()
        .filter(|r| q(r, "q_support").min(q(r, "q_instance")) < 0.05)
        .count();
    assert_eq!(
        summary.trim(),
        format!("# patterns tested: {}; q < 0.05: {significant}", rows.len())
    );
}

#[test]
fn diff_identical_groups_and_wrong_format() {
    let dir = tempfile::tempdir().unwrap();
    let db = common::db_from(&[
        ("1", Some("x"), &["read", "quiz", "read"]),
        ("2", Some("x"), &["quiz", "hint"]),
        ("3", Some("y"), &["read", "quiz", "read"]),
        ("4", Some("y"), &["quiz", "hint"]),
    ]);
    write_table(dir.path(), "same.csv", &db);
    let out = seqmine(
        &[
            "diff",
            "--input",
            "same.csv",
            "--format",
            "table",
            "--min-items",
            "1",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(text(&out.stdout).trim_end().ends_with("q < 0.05: 0"));
    let basket = seqmine(
        &[
            "diff",
            "--input",
            data("learner.txt").to_str().unwrap(),
            "--format",
            "basket",
        ],
        dir.path(),
    );
    assert_eq!(basket.status.code(), Some(2));
}

#[test]
fn evolve_planted_fixture() {
    let dir = tempfile::tempdir().unwrap();
    write_table(
        dir.path(),
        "bins.csv",
        &common::planted_evolution(&mut ChaCha8Rng::seed_from_u64(3)),
    );
    let out = seqmine(
        &[
            "evolve", "--input", "bins.csv", "--format", "table", "--bins", "5", "--out", "e.tsv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    let table = fs::read_to_string(dir.path().join("e.tsv")).unwrap();
    let first: Vec<&str> = table.lines().nth(2).unwrap().split('\t').collect();
    assert_eq!(&first[..3], ["1", "{quiz} -> {submit}", "1.000000"]);
    assert!(text(&out.stdout).starts_with("# patterns tested: "));
    let none = seqmine(
        &["evolve", "--input", "bins.csv", "--format", "table"],
        dir.path(),
    );
    assert_eq!(none.status.code(), Some(2));
    let one = seqmine(
        &[
            "evolve", "--input", "bins.csv", "--format", "table", "--bins", "1",
        ],
        dir.path(),
    );
    assert_eq!(one.status.code(), Some(3));
}
