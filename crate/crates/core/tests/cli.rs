use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use entrocat::ingest::{self, CsvSpec, MatrixFormat};
use entrocat::metric::DistanceMatrix;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn entrocat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entrocat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}\t")))
        .unwrap_or_else(|| panic!("no `{key}` line in {out}"))
        .to_string()
}

fn internship() -> String {
    fixture("internship.csv").to_string_lossy().into_owned()
}

#[test]
fn su_creativity_gothired() {
    let o = entrocat(&["su", &internship(), "Creativity", "GotHired"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(value(&out, "SU"), "0.4627");
    assert_eq!(value(&out, "distance"), "0.5373");
    assert_eq!(out.lines().count(), 7);
}

#[test]
fn su_attention_gothired() {
    let o = entrocat(&["su", &internship(), "AttentionType", "GotHired"]);
    assert_eq!(value(&stdout(&o), "SU"), "0.0192");
}

#[test]
fn su_full_precision_is_consistent() {
    let o = entrocat(&["--full", "su", &internship(), "Creativity", "GotHired"]);
    let out = stdout(&o);
    let su: f64 = value(&out, "SU").parse().unwrap();
    let dist: f64 = value(&out, "distance").parse().unwrap();
    let ratio: f64 = value(&out, "entropic_ratio").parse().unwrap();
    let mi: f64 = value(&out, "MI").parse().unwrap();
    let ha: f64 = value(&out, "H(Creativity)").parse().unwrap();
    let hb: f64 = value(&out, "H(GotHired)").parse().unwrap();
    let hab: f64 = value(&out, "H(Creativity,GotHired)").parse().unwrap();
    assert!((su - 0.462_689_377_553_847_03).abs() < 1e-12);
    assert!((su + dist - 1.0).abs() < 1e-12);
    assert!((su - 2.0 * (1.0 - ratio)).abs() < 1e-12);
    assert!((mi - (ha + hb - hab)).abs() < 1e-12);
    assert!((su - 2.0 * mi / (ha + hb)).abs() < 1e-12);
}

#[test]
fn su_column_with_itself() {
    let o = entrocat(&["su", &internship(), "Neatness", "Neatness"]);
    let out = stdout(&o);
    assert_eq!(value(&out, "SU"), "1.0000");
    assert_eq!(value(&out, "distance"), "0.0000");
}

#[test]
fn unknown_column_exits_2() {
    let o = entrocat(&["su", &internship(), "Nope", "GotHired"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Nope"));
    let o = entrocat(&["rank", &internship(), "Nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_file_exits_2() {
    let o = entrocat(&["su", "/nonexistent/file.csv", "a", "b"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ragged_csv_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "a,b\n1,2\n3,4,5\n").unwrap();
    let o = entrocat(&["classes", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn rank_orders_and_breaks_ties_by_name() {
    let o = entrocat(&["rank", &internship(), "GotHired"]);
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<String> = stdout(&o)
        .lines()
        .map(|l| l.split('\t').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(
        names,
        [
            "Creativity",
            "IQuotient",
            "Neatness",
            "Punctuality",
            "AttentionType"
        ]
    );
}

#[test]
fn rank_single_feature() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("two.csv");
    std::fs::write(&p, "f,c\na,x\nb,y\n").unwrap();
    let o = entrocat(&["rank", p.to_str().unwrap(), "c"]);
    assert_eq!(stdout(&o), "1\tf\t1.0000\n");
}

#[test]
fn stdin_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_entrocat"))
        .args(["classes", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(
            std::fs::read(fixture("indiscernibles.csv"))
                .unwrap()
                .as_slice(),
        )
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "X1\tX2\n");
}

#[test]
fn classes_on_internship() {
    // Neatness, Punctuality and IQuotient are relabelings of one another.
    let o = entrocat(&["classes", &internship()]);
    assert_eq!(
        stdout(&o),
        "Neatness\tPunctuality\tIQuotient\nCreativity\nAttentionType\nGotHired\n"
    );
}

#[test]
fn dist_json_round_trips() {
    let o = entrocat(&["dist", &internship(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let m: DistanceMatrix = ingest::parse_matrix(&stdout(&o), MatrixFormat::Json).unwrap();
    assert_eq!(m.len(), 6);
    let d = m.get("GotHired", "Creativity").unwrap();
    assert!((d - (1.0 - 0.462_689_377_553_847_03)).abs() < 1e-12);
}

#[test]
fn dist_tsv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.tsv");
    let o = entrocat(&[
        "dist",
        &internship(),
        "Creativity",
        "GotHired",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let m: DistanceMatrix =
        ingest::parse_matrix(&std::fs::read_to_string(&p).unwrap(), MatrixFormat::Tsv).unwrap();
    assert_eq!(m.names, ["Creativity", "GotHired"]);
    assert_eq!(m.values[0][0], 0.0);
}

#[test]
fn joint_appends_column() {
    let o = entrocat(&["joint", &internship(), "Creativity", "GotHired"]);
    assert_eq!(o.status.code(), Some(0));
    let d = ingest::load_csv_str(&stdout(&o), &CsvSpec::default()).unwrap();
    assert_eq!(d.column_count(), 7);
    let j = d.column("Creativity*GotHired").unwrap();
    assert_eq!(j.alphabet().len(), 5);
    assert_eq!(j.label(0), "(D,N)");
}

#[test]
fn joint_of_three_with_name() {
    let o = entrocat(&[
        "joint",
        &internship(),
        "Neatness",
        "Creativity",
        "GotHired",
        "--name",
        "NCG",
    ]);
    let d = ingest::load_csv_str(&stdout(&o), &CsvSpec::default()).unwrap();
    assert_eq!(d.column("NCG").unwrap().label(0), "((R,D),N)");
}

#[test]
fn check_metric_on_internship_passes() {
    let o = entrocat(&["check-metric", &internship()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn check_monoid_and_lemma_on_internship_pass() {
    for cmd in ["check-monoid", "check-lemma2"] {
        let o = entrocat(&[cmd, &internship()]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stdout(&o));
    }
}

#[test]
fn check_json_report() {
    let o = entrocat(&["check-lemma2", "--random", "1", "-n", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().len() >= 7);
}

#[test]
fn check_runs_are_deterministic() {
    let a = entrocat(&["check-monoid", "--random", "11", "-n", "20"]);
    let b = entrocat(&["check-monoid", "--random", "11", "-n", "20"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn demo_is_positive_and_decreasing() {
    let o = entrocat(&["--full", "demo-nondiscrete", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let ds: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ds.len(), 10);
    assert!(ds.iter().all(|&d| d > 0.0));
    assert!(ds.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn semicolon_delimiter_and_drop_policy() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    std::fs::write(&p, "a;b\nx;1\n;2\ny;2\n").unwrap();
    let o = entrocat(&[
        "--delimiter",
        ";",
        "--na",
        "drop",
        "su",
        p.to_str().unwrap(),
        "a",
        "b",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "SU"), "1.0000");
    let o = entrocat(&["--delimiter", ";", "su", p.to_str().unwrap(), "a", "b"]);
    assert_ne!(value(&stdout(&o), "SU"), "1.0000");
}

#[test]
fn bad_flag_value_exits_2() {
    let o = entrocat(&["dist", &internship(), "--format", "xml"]);
    assert_eq!(o.status.code(), Some(2));
    let o = entrocat(&["check-metric", "--random", "0", "--mode", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}
