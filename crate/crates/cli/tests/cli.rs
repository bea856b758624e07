use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ghz-anon"));
    c.env_remove("GHZ_ANON_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

#[test]
fn documented_examples() {
    let o = run(&["anon", "--n", "5", "--sender", "2", "--d", "1", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "decoded=1"));

    let o = run(&["collision", "--n", "8", "--wishers", "1,4,6", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "first_odd_round=1"));

    let o = run(&[
        "verdict",
        "--protocol",
        "anon",
        "--target",
        "sender",
        "--t",
        "0",
        "--mode",
        "exact",
        "--n",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "posterior_max=0.25 baseline=0.25 PASS");
}

#[test]
fn exit_codes_and_machine_readable_errors() {
    let o = run(&["anon", "--n", "4", "--sender", "7", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("sender"));

    // missing seed on a stochastic run
    let o = run(&["ae", "--n", "4", "--sender", "0", "--receiver", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(serde_json::from_slice::<Value>(&o.stderr).is_ok());

    let o = run(&["bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(serde_json::from_slice::<Value>(&o.stderr).is_ok());

    let o = run(&[
        "verdict",
        "--protocol",
        "dcnet",
        "--graph",
        "star:5",
        "--colluders",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn abort_saves_partial_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("abort.json");
    let o = run(&[
        "anon",
        "--n",
        "4",
        "--sender",
        "0",
        "--d",
        "1",
        "--seed",
        "2",
        "--withhold",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["status"], "aborted");
    let record = &report["records"][0];
    assert_eq!(record["aborted"], true);
    assert_eq!(record["rounds"][0].as_array().unwrap().len(), 3);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let o = bin()
            .args([
                "anonq",
                "--n",
                "4",
                "--sender",
                "1",
                "--receiver",
                "3",
                "--seed",
                "9",
                "--trials",
                "3",
            ])
            .env("GHZ_ANON_OUT_DIR", dir.path().join(name.trim_end_matches(".json")))
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        let written = dir
            .path()
            .join(name.trim_end_matches(".json"))
            .join("anonq-n4-seed9.json");
        std::fs::rename(&written, &path).unwrap();
        outputs.push(std::fs::read(path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn reports_match_schema() {
    let validator = schema();
    let dir = tempfile::tempdir().unwrap();
    let edge_file = dir.path().join("g.txt");
    std::fs::write(&edge_file, "# nodes 5\n0 1\n1 2\n2 3\n3 4\n4 0\n").unwrap();
    let adj_file = dir.path().join("g.json");
    std::fs::write(&adj_file, r#"{"n":4,"adjacency":[[1,2,3],[0,2,3],[0,1,3],[0,1,2]]}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["anon", "--n", "5", "--sender", "2", "--d", "1", "--seed", "7"],
        vec!["anon", "--n", "4", "--sender", "0", "--seed", "1", "--withhold", "1"],
        vec!["ae", "--n", "4", "--sender", "0", "--receiver", "2", "--seed", "1"],
        vec![
            "anonq",
            "--n",
            "3",
            "--sender",
            "0",
            "--receiver",
            "2",
            "--seed",
            "1",
            "--qubit",
            "0.6,0,0,0.8",
        ],
        vec!["collision", "--n", "8", "--wishers", "1,4,6", "--seed", "3"],
        vec![
            "dcnet",
            "--graph",
            edge_file.to_str().unwrap(),
            "--sender",
            "1",
            "--seed",
            "4",
        ],
        vec![
            "keygraph",
            "--graph",
            adj_file.to_str().unwrap(),
            "--colluders",
            "0,1",
            "--t",
            "1",
        ],
        vec!["keygraph", "--n", "6", "--t", "0"],
        vec![
            "verdict",
            "--protocol",
            "ae",
            "--n",
            "4",
            "--t",
            "1",
            "--traceless",
            "--target",
            "receiver",
        ],
        vec![
            "verdict",
            "--protocol",
            "anon",
            "--n",
            "4",
            "--mode",
            "sampled",
            "--seed",
            "2",
            "--trials",
            "2000",
        ],
        vec!["aloha", "--n", "6", "--wishers", "0,2,4", "--seed", "1"],
        vec!["elect", "--n", "5", "--senders", "1", "--receivers", "3", "--seed", "1"],
        vec!["keyx", "--n", "4", "--i", "0", "--j", "3", "--len", "8", "--seed", "2"],
    ];
    for args in cases {
        let mut full = vec!["--json"];
        full.extend(&args);
        let o = run(&full);
        assert!(
            matches!(o.status.code(), Some(0 | 3 | 4)),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let report: Value = serde_json::from_slice(&o.stdout).unwrap();
        let errors: Vec<String> = validator
            .iter_errors(&report)
            .map(|e| format!("{e} at {}", e.instance_path()))
            .collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
}

#[test]
fn config_file_and_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"protocol":"collision","n":8,"seed":3,"wishers":[1,4,6]}"#).unwrap();
    let o = bin()
        .args(["run", "--config", config.to_str().unwrap()])
        .env("GHZ_ANON_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("first_odd_round=1"));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("collision-n8-seed3.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["wishers"], serde_json::json!([1, 4, 6]));

    std::fs::write(&config, r#"{"protocol":"collision","n":8,"seed":3,"extra":true}"#).unwrap();
    let o = run(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweeps_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("collision.csv");
    let o = run(&["sweep", "collision", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mismatches=0"));
    let mut reader = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(
        header,
        [
            "n",
            "k",
            "wishers",
            "predicted_round",
            "verdict",
            "first_odd_round",
            "rounds",
            "match",
            "error"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 150);
    assert!(rows.iter().all(|r| &r[7] == "true"));

    let o = run(&["sweep", "anon", "--seed", "1", "--trials", "20", "--n-max", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,sender,d,trials,decoded_ok,aborted,match,error\n"));
    assert_eq!(text.lines().count(), 1 + 2 * (3 + 4 + 5 + 6));

    let o = run(&["sweep", "tolerance", "--seed", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1025);
    assert!(stdout(&o).lines().skip(1).all(|l| l.contains(",true,")));
}
