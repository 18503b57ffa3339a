use std::path::Path;
use std::process::{Command, Output};

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itercurve"))
        .args(args)
        .env("ITERCURVE_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn eval_warm_and_cold_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let args = ["eval", "--curve", "g", "--word", "2,0", "--prec", "40"];
    let cold = run(&cache, &args);
    assert_eq!(cold.status.code(), Some(0), "{}", stderr(&cold));
    let lines = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(lines.lines().count(), 1);
    assert!(lines.contains("\"schema_version\":1"));
    let warm = run(&cache, &args);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(std::fs::read_to_string(&cache).unwrap().lines().count(), 1);
    assert!(stdout(&cold).contains("value = 1.0887930451518010652503444491188069736693"));
}

#[test]
fn corrupt_cache_lines_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    std::fs::write(&cache, "{not json\n").unwrap();
    let o = run(&cache, &["constants", "pi", "--prec", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("skipping corrupt cache line"));
    assert!(stdout(&o).contains("value = 3.14159265358979323846"));
    let again = run(&cache, &["constants", "pi", "--prec", "20"]);
    assert_eq!(o.stdout, again.stdout);
    assert_eq!(std::fs::read_to_string(&cache).unwrap().lines().count(), 2);
}

#[test]
fn constants_with_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c");
    let z = run(&cache, &["constants", "zeta", "3", "--prec", "25"]);
    assert!(stdout(&z).contains("1.202056903159594285399738"));
    let l = run(&cache, &["constants", "lchi3", "2", "--prec", "20"]);
    assert!(stdout(&l).contains("0.7813024128964862968"));
    assert_eq!(run(&cache, &["constants", "zeta"]).status.code(), Some(1));
}

#[test]
fn p1_words_print_both_parts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &dir.path().join("c"),
        &["eval", "--p1", "i,0", "--level", "4", "--prec", "20"],
    );
    let s = stdout(&o);
    // Re = π²/48, Im = Catalan
    assert!(s.contains("re  = 0.2056167583560283045"), "{s}");
    assert!(s.contains("im  = 0.9159655941772190150"), "{s}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c");
    assert_eq!(run(&c, &["--help"]).status.code(), Some(0));
    assert_eq!(run(&c, &["--version"]).status.code(), Some(0));
    assert_eq!(run(&c, &["nonsense"]).status.code(), Some(1));
    assert_eq!(
        run(&c, &["eval", "--curve", "g", "--word", "0,2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&c, &["eval", "--curve", "q", "--word", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&c, &["verify", "arc-lemma", "--z0", "1"]).status.code(),
        Some(0)
    );
    // the first arc identity fails off the real axis
    assert_eq!(
        run(&c, &["verify", "arc-lemma", "--z0", "i"]).status.code(),
        Some(3)
    );
}

#[test]
fn verify_commands_pass() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c");
    let o = run(
        &c,
        &[
            "verify",
            "special-case",
            "--curve",
            "g",
            "--k",
            "3",
            "--prec",
            "40",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 3);
    let o = run(&c, &["verify", "shuffle", "--curve", "h", "--weight", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1 identities, rank 1"));
    let o = run(
        &c,
        &["verify", "distribution", "--level", "4", "--kmax", "4"],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = run(
        &c,
        &[
            "verify",
            "ammv-cross",
            "--max-weight",
            "2",
            "--terms",
            "5000",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn dims_table_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c");
    let file = dir.path().join("g.csv");
    let o = run(
        &c,
        &[
            "table",
            "dims",
            "--curve",
            "g",
            "--max-weight",
            "2",
            "--prec",
            "60",
            "--file",
            file.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&file).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("curve,k,count_B,D,rank,rank_parity0,rank_parity1,precision,status")
    );
    assert_eq!(lines.nth(2), Some("g,2,6,4,3,1,2,60,experimental"));
    assert!(stderr(&o).contains("yes"));

    let o = run(
        &c,
        &[
            "table",
            "dims",
            "--curve",
            "h",
            "--max-weight",
            "2",
            "--prec",
            "60",
            "--out",
            "json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    let row = &v["rows"][2];
    assert_eq!(row["count_B"], 9);
    assert_eq!(row["D"], 8);
    assert_eq!(row["rank"], 5);
    assert_eq!(row["status"], "experimental");

    let o = run(&c, &["table", "dims", "--curve", "h", "--max-weight", "5"]);
    assert_eq!(o.status.code(), Some(1));
}
