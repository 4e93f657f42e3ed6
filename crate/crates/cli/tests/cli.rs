use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn itt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itt"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn reduce_reports_normal_forms_and_divergence() {
    let o = itt(&["reduce", "(\\x.\\y.x) a b"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains('a'));
    let o = itt(&["reduce", "(\\x.x x) (\\x.x x)", "--fuel", "100"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn subtype_exit_codes() {
    assert_eq!(itt(&["subtype", "T0", "c0 -> c0 <= c1 -> c0"]).status.code(), Some(0));
    assert_eq!(itt(&["subtype", "T0", "c1 -> c0 <= c0 -> c0"]).status.code(), Some(2));
    assert_eq!(itt(&["subtype", "T0", "c0 <="]).status.code(), Some(3));
}

#[test]
fn golden_derivation_checks() {
    let o = itt(&["check", "corpus/T4.itt", "corpus/derivations/omega2omega2_c3.drv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("Valid"));
    let o = itt(&["check", "T0", "corpus/derivations/omega2omega2_c3.drv"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn infer_uses_the_basis() {
    let o = itt(&["infer", "CDZ", "(\\x.x) y", "c3", "--basis", "y:c3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("Found"));
}

#[test]
fn polarity_prints_stages() {
    let o = itt(&["polarity", "ep"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("stage 1: c1+ c2-"), "{out}");
    assert!(out.contains("stage 2: c3+ c4+ c5+"), "{out}");
    assert_eq!(itt(&["polarity", "Tsharp"]).status.code(), Some(1));
}

#[test]
fn embed_and_sensibility() {
    let o = itt(&["embed", "T3", "CDZ", "corpus/maps/T3_CDZ.map"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(itt(&["sensibility", "Park", "--fuel", "500"]).status.code(), Some(1));
    assert_eq!(itt(&["sensibility", "T0", "--fuel", "500"]).status.code(), Some(2));
}

#[test]
fn corpus_matches_golden() {
    let o = itt(&["corpus", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["--json", "sensibility", "T2park"];
    let a = itt(&args);
    let b = itt(&args);
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
    let seq = itt(&["--json", "--sequential", "sensibility", "T2park"]);
    assert_eq!(a.stdout, seq.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"]["summary"], "NonSensible/EmbeddingFrom");
    assert_eq!(v["verdict"]["evidence_revalidated"], true);
}

#[test]
fn unknown_theories_are_errors() {
    let o = itt(&["polarity", "NoSuchTheory"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}
