use std::collections::BTreeMap;
use std::process::{Command, Output};

fn pppkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pppkit"))
        .args(args)
        .env_remove("PPPKIT_SEED")
        .output()
        .expect("binary runs")
}

const SAMPLE: &[&str] = &[
    "sample",
    "--region",
    "box:0,0;1,1",
    "--mu",
    "100",
    "--seed",
    "42",
];

#[test]
fn sample_csv_header_and_rows() {
    let out = pppkit(SAMPLE);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x0,x1"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(!rows.is_empty());
    for r in &rows {
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = pppkit(SAMPLE);
    let b = pppkit(SAMPLE);
    assert_eq!(a.stdout, b.stdout);
    let c = pppkit(&[
        "sample",
        "--region",
        "box:0,0;1,1",
        "--mu",
        "100",
        "--seed",
        "43",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pppkit"));
        cmd.args(["sample", "--region", "box:0,0;1,1", "--mu", "50"])
            .args(extra);
        match env {
            Some(s) => cmd.env("PPPKIT_SEED", s),
            None => cmd.env_remove("PPPKIT_SEED"),
        };
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("9"), &[]), run(None, &["--seed", "9"]));
    assert_eq!(
        run(Some("1"), &["--seed", "9"]),
        run(None, &["--seed", "9"])
    );
}

#[test]
fn malformed_input_exits_2() {
    for args in [
        &["sample", "--region", "box:0,0;1,1", "--mu", "-1"][..],
        &["sample", "--region", "box:1,0;0,1", "--mu", "1"],
        &["sample", "--region", "blob(1)", "--mu", "1"],
        &[
            "sample",
            "--dim",
            "3",
            "--region",
            "box:0,0;1,1",
            "--mu",
            "1",
        ],
        &[
            "thin",
            "--region",
            "box:0,0;1,1",
            "--mu",
            "1",
            "--probs",
            "0.5,0.6",
        ],
        &["frobnicate"],
    ] {
        let out = pppkit(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_0() {
    let out = pppkit(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("sample"));
}

#[test]
fn verify_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = pppkit(&["verify", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["replications"], 20_000);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "count_law",
            "independence",
            "conditioning",
            "superposition",
            "thinning",
            "exp_gaps_1d"
        ]
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("count_law") && stderr.contains("PASS"));
}

fn multiset(points: impl Iterator<Item = Vec<f64>>) -> BTreeMap<Vec<u64>, usize> {
    let mut m = BTreeMap::new();
    for p in points {
        *m.entry(p.iter().map(|v| v.to_bits()).collect())
            .or_insert(0) += 1;
    }
    m
}

#[test]
fn csv_and_json_describe_the_same_points() {
    let csv = String::from_utf8(pppkit(SAMPLE).stdout).unwrap();
    let json_out = pppkit(&[SAMPLE, &["--format", "json"]].concat());
    let record: serde_json::Value = serde_json::from_slice(&json_out.stdout).unwrap();
    assert_eq!(record["dim"], 2);
    assert_eq!(record["seed"], 42);
    assert_eq!(record["intensity"], 100.0);
    assert_eq!(record["region"], "box:0,0;1,1");

    let from_csv = multiset(
        csv.lines()
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()),
    );
    let from_json = multiset(record["points"].as_array().unwrap().iter().map(|p| {
        p.as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect()
    }));
    assert_eq!(from_csv, from_json);
}

#[test]
fn replications_to_separate_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.csv");
    let out = pppkit(&[
        "sample",
        "--region",
        "ball:0,0,0;1",
        "--mu",
        "5",
        "--reps",
        "3",
        "--seed",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for i in 0..3 {
        let text = std::fs::read_to_string(dir.path().join(format!("pts_{i:04}.csv"))).unwrap();
        assert!(text.starts_with("x0,x1,x2\n"));
    }
    assert!(!path.exists());
}

#[test]
fn thin_emits_marks() {
    let out = pppkit(&[
        "thin",
        "--region",
        "box:0,0;1,1",
        "--mu",
        "30",
        "--probs",
        "0.25,0.75",
        "--seed",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x0,x1,mark"));
    assert!(lines.all(|l| l.ends_with(",0") || l.ends_with(",1")));
}

#[test]
fn conditional_and_superpose() {
    let out = pppkit(&[
        "conditional",
        "--region",
        "box:0,0;1,1",
        "--n",
        "8",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 9);

    let out = pppkit(&[
        "superpose",
        "--region",
        "box:0,0;1,1",
        "--mu",
        "2,3",
        "--seed",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["intensity"], 5.0);
    let n = record["points"].as_array().unwrap().len();
    assert_eq!(record["marks"].as_array().unwrap().len(), n);
}
