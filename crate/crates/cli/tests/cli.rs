use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn cayley(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cayley"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.unwrap_or("").as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const SO4: &str = r#"{"factors":[{"family":"A","n":1},{"family":"A","n":1}],"subgroup":[[1,1]]}"#;
const A2A2: &str = r#"{"factors":[{"family":"A","n":2},{"family":"A","n":2}],"subgroup":[[1,1]]}"#;
const B2B1: &str = r#"{"factors":[{"family":"B","n":2},{"family":"B","n":1}],"subgroup":[[1,1]]}"#;

#[test]
fn classify_so4_pair() {
    let o = cayley(&["classify", "--json"], Some(SO4));
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["status"], "quasi_permutation");
    let blocks = v["certificate"]["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 1);
    assert_eq!(blocks[0]["kind"], "so4_pair");
    assert_eq!(blocks[0]["indices"], serde_json::json!([0, 1]));
}

#[test]
fn classify_exit_codes() {
    let o = cayley(&["classify"], Some(A2A2));
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("not_quasi_permutation"));
    let o = cayley(
        &["classify", "--json"],
        Some(r#"{"factors":[{"family":"E","n":6}]}"#),
    );
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["error"], "UnsupportedType");
    let o = cayley(&["classify", "--json"], Some(r#"{"group":"SO","param":7}"#));
    assert_eq!(code(&o), 0);
}

#[test]
fn schema_errors_name_the_field() {
    let o = cayley(
        &["classify"],
        Some(r#"{"factors":[{"family":"A","n":1},{"family":"A"}]}"#),
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("factors[1].n"));
    let o = cayley(
        &["classify"],
        Some("{\n\"factors\": [\n  {\"family\": \"A\", \"n\": \"x\"}\n]}"),
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn certificates_round_trip_byte_for_byte() {
    for input in [SO4, A2A2, B2B1, r#"{"group":"SO","param":6}"#] {
        let first = cayley(&["classify", "--json"], Some(input));
        let again = cayley(&["classify", "--json"], Some(input));
        assert_eq!(first.stdout, again.stdout, "not deterministic");
        let text = String::from_utf8(first.stdout).unwrap();
        let parsed: cayley_lattice::classify::Verdict =
            cayley_lattice::json::from_document(&text).unwrap();
        assert_eq!(cayley_lattice::json::to_document(&parsed).unwrap(), text);
        let v = cayley(&["verify", "--json"], Some(&text));
        assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stdout));
        assert_eq!(json(&v)["ok"], true);
    }
}

#[test]
fn verify_rejects_tampering() {
    let o = cayley(&["classify", "--json"], Some(SO4));
    let mut v = json(&o);
    let pi = &mut v["certificate"]["blocks"][0]["resolution"]["pi"][0][0];
    *pi = Value::from(pi.as_i64().unwrap() + 1);
    let o = cayley(&["verify"], Some(&v.to_string()));
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("rejected"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("cayley-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("verdict.json");
    let o = cayley(
        &["classify", "--json", "-o", path.to_str().unwrap()],
        Some(B2B1),
    );
    assert_eq!(code(&o), 3);
    assert_eq!(std::fs::read(&path).unwrap(), o.stdout);
    let v = cayley(&["verify", path.to_str().unwrap()], None);
    assert_eq!(code(&v), 0);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn sha2_builtins() {
    let o = cayley(&["sha2", "--json", "jgamma", "--p", "2", "--m", "2"], None);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["sha2"]["factors"], serde_json::json!([2]));
    let o = cayley(&["sha2", "--json", "regular", "--order", "4"], None);
    assert_eq!(json(&o)["sha2"]["factors"], serde_json::json!([]));
    let o = cayley(
        &[
            "sha2",
            "--max-cells",
            "10",
            "jgamma",
            "--p",
            "2",
            "--m",
            "3",
        ],
        None,
    );
    assert_eq!(code(&o), 2);
    let o = cayley(
        &[
            "sha2",
            "--max-group-order",
            "100",
            "jgamma",
            "--p",
            "3",
            "--m",
            "5",
        ],
        None,
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn sha2_of_a_document_with_gamma() {
    let o = cayley(&["classify", "--json"], Some(B2B1));
    let w = &json(&o)["certificate"]["witness"];
    let doc = serde_json::json!({
        "factors": w["types"],
        "subgroup": w["s_generators"],
        "gamma": w["gamma"],
    });
    let o = cayley(&["sha2", "--json", "input"], Some(&doc.to_string()));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["sha2"]["factors"], serde_json::json!([2]));
}

#[test]
fn cohomology_engines_agree() {
    let mut seen = Vec::new();
    for method in ["bar", "periodic", "crossed"] {
        let o = cayley(
            &[
                "cohomology",
                "--json",
                "--degree",
                "2",
                "--method",
                method,
                "jgamma",
                "--p",
                "2",
                "--m",
                "2",
            ],
            None,
        );
        assert_eq!(code(&o), 0);
        seen.push(json(&o)["cohomology"].clone());
    }
    assert!(seen.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn constructions() {
    let o = cayley(
        &["construct", "--json", "section2", "--factors", "B2,B1"],
        None,
    );
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(
        (v["rank"].as_i64(), v["index_over_l_prime"].as_i64()),
        (Some(3), Some(2))
    );
    assert_eq!(v["analysis"]["sha2"]["factors"], serde_json::json!([2]));
    let o = cayley(
        &["construct", "--json", "lnu", "--n", "3,3", "--d", "3"],
        None,
    );
    let v = json(&o);
    assert_eq!(v["index_over_q"], 3);
    assert_eq!(v["lambda"]["phi_image_equals_n"], true);
    let o = cayley(
        &["construct", "--json", "jgamma", "--p", "2", "--m", "2"],
        None,
    );
    assert_eq!(json(&o)["rank"], 3);
    let o = cayley(
        &[
            "construct",
            "--json",
            "rootdatum",
            "--group",
            "SO",
            "--param",
            "6",
        ],
        None,
    );
    let v = json(&o);
    assert_eq!(
        (v["index_over_q"].as_i64(), v["index_in_p"].as_i64()),
        (Some(2), Some(2))
    );
    let o = cayley(
        &[
            "construct",
            "rootdatum",
            "--factors",
            "A1,A1",
            "--subgroup",
            "1,1",
        ],
        None,
    );
    assert_eq!(code(&o), 0);
    let o = cayley(&["construct", "section2", "--factors", "A2"], None);
    assert_eq!(code(&o), 1);
}

#[test]
fn demo_paper_filter() {
    let o = cayley(&["demo-paper", "--json", "--filter", "section2"], None);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["group"] == "section2"));
}

#[test]
fn demo_paper_full_run() {
    let o = cayley(&["demo-paper", "--seed", "3"], None);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{text}");
    assert!(!text.contains("FAIL"));
}
