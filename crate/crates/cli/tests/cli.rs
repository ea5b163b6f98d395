use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use watson_core::domain::Domain;
use watson_core::precedent::{PrecedentDraft, PrecedentStore};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn watson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_watson")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture_json(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

#[test]
fn validate_accepts_the_fixture() {
    let o = watson(&["validate", path_str(&fixture("respiratory.json"))]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("valid domain `respiratory`"));
}

#[test]
fn validate_names_the_bad_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = fixture_json("respiratory.json");
    doc["parameters"][0]["norm"] = json!([43.0, 44.0]);
    let p = write_json(dir.path(), "norm.json", &doc);
    let o = watson(&["validate", path_str(&p)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("parameter `temperature`"), "{}", stdout(&o));

    let mut doc = fixture_json("respiratory.json");
    let dup = doc["parameters"][1].clone();
    doc["parameters"].as_array_mut().unwrap().push(dup);
    let p = write_json(dir.path(), "dup.json", &doc);
    let o = watson(&["validate", path_str(&p)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("headache"), "{}", stdout(&o));
}

#[test]
fn replay_is_deterministic_and_passes() {
    let (domain, script) = (fixture("respiratory.json"), fixture("walkthrough.json"));
    let args = [
        "replay",
        path_str(&domain),
        path_str(&script),
        "--seed",
        "42",
        "--json",
    ];
    let a = watson(&args);
    let b = watson(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let report: Value = serde_json::from_slice(&a.stdout).unwrap();
    let kinds: Vec<&str> = report["lines"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["kind"].as_str().unwrap())
        .collect();
    assert_eq!(
        kinds,
        ["inconsistency", "value_request", "value_request", "remeasure_request", "precedent_review"]
    );
    assert_eq!(report["precedent"]["decision"], "flu");
}

#[test]
fn replay_fails_on_a_wrong_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let mut script = fixture_json("walkthrough.json");
    script["steps"][0]["expect"]["kind"] = json!("value_request");
    let p = write_json(dir.path(), "wrong.json", &script);
    let o = watson(&["replay", path_str(&fixture("respiratory.json")), path_str(&p)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("mismatch: q-1"), "{}", stdout(&o));
    assert!(stdout(&o).contains("no precedent recorded"));
}

#[test]
fn mine_matches_the_oracle() {
    let o = watson(&[
        "mine",
        path_str(&fixture("respiratory.json")),
        path_str(&fixture("flu_sample.json")),
        "--kmax",
        "2",
        "--oracle",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let set: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(set["solution"], "flu");
    assert_eq!(set["k_max"], 2);
    // no flu case has a temperature below 37
    assert!(set["entries"]
        .as_array()
        .unwrap()
        .contains(&json!({"temperature": [35.0, 36.9]})));
}

#[test]
fn mine_rejects_a_zero_kmax() {
    let o = watson(&[
        "mine",
        path_str(&fixture("respiratory.json")),
        path_str(&fixture("flu_sample.json")),
        "--kmax",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inspect_lists_a_users_precedents() {
    let dir = tempfile::tempdir().unwrap();
    let domain = Domain::<f64>::from_path(fixture("respiratory.json")).unwrap();
    {
        let store = PrecedentStore::<f64>::open(dir.path()).unwrap();
        store.register_user("dr_watson").unwrap();
        let draft = PrecedentDraft {
            user: "dr_watson".into(),
            domain: "respiratory".into(),
            session: None,
            case: domain.schema().parse_vector(&serde_json::from_value(json!({"cough": "yes"})).unwrap()).unwrap(),
            decision: "cold".into(),
            prognosis: "Rest".into(),
        };
        let p = store.record_precedent("dr_watson", draft, domain.schema()).unwrap();
        store.update_error_explanation("dr_watson", &p.id, "Ask about sneezing").unwrap();
    }
    let o = watson(&["inspect", path_str(dir.path()), "--user", "dr_watson"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("1 precedent(s) for dr_watson"));
    assert!(text.contains("cold  [pending]"), "{text}");
    assert!(text.contains("error explanation: Ask about sneezing"));

    let o = watson(&["inspect", path_str(dir.path()), "--user", "nobody"]);
    assert_eq!(o.status.code(), Some(2));
}
