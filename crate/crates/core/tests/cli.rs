use std::fs;
use std::process::{Command, Output};

use uplink_secrecy::channel::ComplexMatrix;
use uplink_secrecy::montecarlo::Dataset;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_uplink-secrecy"));
    c.env_remove("UPLINK_SECRECY_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const BASE: [&str; 11] = [
    "essr", "--M", "20", "--N", "20", "--K", "400", "--snr-db", "30", "--trials", "400",
];

#[test]
fn essr_prints_summary_and_dataset() {
    let o = run(&[&BASE[..], &["--k", "20", "--strategy", "random"]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("k=20: mc "), "{err}");
    assert!(err.contains("peak closed form 1.199703"), "{err}");
    let data = Dataset::read_csv(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(data.rows.len(), 1);
    assert_eq!(data.rows[0].trials, 400);
}

#[test]
fn greedy_with_k_above_m_is_a_config_error() {
    let o = run(&[&BASE[..], &["--k", "25", "--strategy", "greedy-main"]].concat());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("k exceeds M"));
}

#[test]
fn invalid_field_names_the_field() {
    let o = run(&[&BASE[..], &["--k", "2", "--xi", "1.5"]].concat());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("xi"), "{}", stderr(&o));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"M": 10, "N": 10, "K": 10, "k": 3, "snr_db": -30, "trials": 300, "unit": "bits"}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[
        "essr",
        "--config",
        cfg.to_str().unwrap(),
        "--k",
        "4",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["spec"]["unit"], "bits");
    let series = &v["spec"]["series"][0]["spec"];
    assert_eq!(series["config"]["k"], 4);
    assert_eq!(series["regime"], "low-snr");
    assert_eq!(series["trials"], 300);

    fs::write(&cfg, r#"{"M": 10, "typo": 1}"#).unwrap();
    let o = run(&["essr", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown field `typo`"));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = [
        "sweep",
        "--M",
        "8",
        "--N",
        "10",
        "--K",
        "40",
        "--k",
        "1",
        "--snr-db",
        "20",
        "--strategy",
        "greedy-full",
        "--axis",
        "k",
        "--values",
        "1,2,4",
        "--trials",
        "300",
    ];
    assert!(
        run(&[&args[..], &["-o", a.to_str().unwrap(), "--threads", "1"]].concat())
            .status
            .success()
    );
    assert!(
        run(&[&args[..], &["-o", b.to_str().unwrap(), "--threads", "4"]].concat())
            .status
            .success()
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn env_var_sets_default_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["table1", "--M", "10", "--trials", "200", "--format", "json"])
        .env("UPLINK_SECRECY_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("table1.json")).unwrap()).unwrap();
    assert_eq!(v["rows"][0]["M"], 10);
}

#[test]
fn dump_channels_writes_trial_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "essr",
        "--M",
        "4",
        "--N",
        "3",
        "--K",
        "6",
        "--k",
        "2",
        "--snr-db",
        "10",
        "--trials",
        "5",
        "--dump-channels",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let h = ComplexMatrix::read_le(fs::File::open(dir.path().join("main.bin")).unwrap()).unwrap();
    let g =
        ComplexMatrix::read_le(fs::File::open(dir.path().join("wiretap.bin")).unwrap()).unwrap();
    assert_eq!((h.rows(), h.cols()), (4, 6));
    assert_eq!((g.rows(), g.cols()), (3, 6));
}

#[test]
fn figure_rejects_unknown_id_and_runs_known() {
    assert_eq!(run(&["figure", "12"]).status.code(), Some(2));
    let o = run(&["figure", "2", "--trials", "50", "--unit", "bits"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let data = Dataset::read_csv(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(data.spec.series.len(), 3);
}

#[test]
fn validate_subset_reports_and_is_deterministic() {
    let a = run(&["validate", "--quick", "--criterion", "4,8"]);
    let b = run(&["validate", "--quick", "--criterion", "4,8"]);
    assert_eq!(a.status.code(), Some(0));
    let strip = |o: &Output| -> String {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .map(|l| l.split(" (").next().unwrap().to_string())
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
    assert!(strip(&a).contains("[PASS]  8. exact identities"));
}

#[test]
fn bad_flag_value_exits_with_usage_error() {
    let o = run(&[&BASE[..], &["--k", "2", "--strategy", "bogus"]].concat());
    assert_eq!(o.status.code(), Some(2));
}
