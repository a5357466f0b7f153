mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use vulnseed::cli::{run, Console, EXIT_FATAL, EXIT_OK, EXIT_PARTIAL};
use vulnseed::detection::mutant_report_path;

use common::{corpus, stub_analyzer};

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn vulnseed(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["vulnseed"];
    full.extend_from_slice(args);
    let code = run(full, &mut Console { out: &mut out, err: &mut err });
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stub_cmd() -> String {
    format!("sh {} {{input}}", stub_analyzer().display())
}

const FIXTURE_TABLE: &str = "\
operator mutated_contracts   mutants injection_rate
CL                      13        27         65.00%
TX                      12        17         60.00%
US                       6         6         30.00%
UR                       5        12         25.00%
UC                       2         2         10.00%
DTU                      2         4         10.00%
TOTAL                   18        68         33.33%
corpus 21  parsed 20  skipped_invalid 1  no_pattern 2  quarantined 0
";

#[test]
fn mutate_prints_the_injection_table() {
    let out = tempfile::tempdir().unwrap();
    let r = vulnseed(&["mutate", "--corpus", s(&corpus()), "--out", s(out.path()), "--workers", "3"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(r.stdout, FIXTURE_TABLE);
    assert!(r.stderr.is_empty());
}

#[test]
fn operator_filter_limits_rows() {
    let out = tempfile::tempdir().unwrap();
    let r = vulnseed(&["mutate", "--corpus", s(&corpus()), "--out", s(out.path()), "--operators", "TX"]);
    assert_eq!(r.code, EXIT_OK);
    let rows: Vec<&str> = r.stdout.lines().skip(1).map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(rows, ["TX", "TOTAL", "corpus"]);
    let csv = fs::read_to_string(out.path().join("stats.csv")).unwrap();
    assert_eq!(csv, "operator,mutated_contracts,mutants,injection_rate\nTX,12,17,0.6000\nTOTAL,12,17,0.6000\n");
}

#[test]
fn missing_corpus_is_fatal() {
    let out = tempfile::tempdir().unwrap();
    let missing = out.path().join("nope");
    let r = vulnseed(&["mutate", "--corpus", s(&missing), "--out", s(out.path())]);
    assert_eq!(r.code, EXIT_FATAL);
    assert!(r.stderr.contains("nope"), "{}", r.stderr);
    let r = vulnseed(&["mutate", "--out", s(out.path())]);
    assert_eq!(r.code, EXIT_FATAL);
    assert!(r.stderr.contains("corpus"), "{}", r.stderr);
}

#[test]
fn bad_arguments_are_fatal_and_help_is_not() {
    assert_eq!(vulnseed(&["mutate", "--operators", "XX"]).code, EXIT_FATAL);
    assert_eq!(vulnseed(&["frobnicate"]).code, EXIT_FATAL);
    let help = vulnseed(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    for sub in ["mutate", "validate", "diff", "score", "run"] {
        assert!(help.stdout.contains(sub), "{sub}");
    }
}

#[test]
fn validate_without_a_campaign_is_fatal() {
    let out = tempfile::tempdir().unwrap();
    let r = vulnseed(&["validate", "--out", s(out.path())]);
    assert_eq!(r.code, EXIT_FATAL);
    assert!(r.stderr.contains("campaign.json"), "{}", r.stderr);
}

#[test]
fn mutate_then_validate() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(vulnseed(&["mutate", "--corpus", s(&corpus()), "--out", s(out.path())]).code, EXIT_OK);
    let r = vulnseed(&["validate", "--out", s(out.path())]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(
        r.stdout,
        "step                checked  failed\n\
         reparse                  68       0\n\
         log_cross_check          68       0\n\
         pattern_adherence        68       0\n\
         mutants 68  failure_rate 0.0000\n"
    );
    assert!(out.path().join("validation.json").exists());
}

#[test]
fn failed_validation_is_partial() {
    let out = tempfile::tempdir().unwrap();
    vulnseed(&["mutate", "--corpus", s(&corpus()), "--out", s(out.path()), "--operators", "UC"]);
    let mutant = out.path().join("legacy/wallet/UC/legacy__wallet-UC-0.sol");
    fs::write(&mutant, "contract {").unwrap();
    let r = vulnseed(&["validate", "--out", s(out.path())]);
    assert_eq!(r.code, EXIT_PARTIAL);
    assert!(r.stderr.contains("legacy__wallet-UC-0"), "{}", r.stderr);
}

#[test]
fn diff_and_score_with_stub_analyzer() {
    let out = tempfile::tempdir().unwrap();
    vulnseed(&["mutate", "--corpus", s(&corpus()), "--out", s(out.path()), "--operators", "TX,US"]);
    let diff = vulnseed(&["diff", "--out", s(out.path()), "--run-cmd", &stub_cmd()]);
    assert_eq!(diff.code, EXIT_OK, "{}", diff.stderr);
    assert!(diff.stdout.starts_with("operator        tp        fn  recall     fnr\n"), "{}", diff.stdout);
    assert!(diff.stdout.contains("\nTX              17         0   1.000   0.000\n"), "{}", diff.stdout);
    assert!(diff.stdout.contains("analyzer_failed 0"));
    let score = vulnseed(&["score", "--out", s(out.path())]);
    assert_eq!(score.code, EXIT_OK);
    assert_eq!(score.stdout, diff.stdout);
}

#[test]
fn missing_report_is_not_fatal() {
    let out = tempfile::tempdir().unwrap();
    vulnseed(&["mutate", "--corpus", s(&corpus()), "--out", s(out.path()), "--operators", "UC"]);
    assert_eq!(vulnseed(&["diff", "--out", s(out.path()), "--run-cmd", &stub_cmd()]).code, EXIT_OK);
    fs::remove_file(mutant_report_path(&out.path().join("reports"), "legacy__wallet-UC-0")).unwrap();
    let r = vulnseed(&["diff", "--out", s(out.path())]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("analyzer_failed 1"), "{}", r.stdout);
}

#[test]
fn malformed_report_is_fatal() {
    let out = tempfile::tempdir().unwrap();
    vulnseed(&["mutate", "--corpus", s(&corpus()), "--out", s(out.path()), "--operators", "UC"]);
    assert_eq!(vulnseed(&["diff", "--out", s(out.path()), "--run-cmd", &stub_cmd()]).code, EXIT_OK);
    let report = mutant_report_path(&out.path().join("reports"), "legacy__wallet-UC-0");
    fs::write(&report, r#"{"file":"x.sol","findings":[{"detector":"","lines":[1]}]}"#).unwrap();
    let r = vulnseed(&["diff", "--out", s(out.path())]);
    assert_eq!(r.code, EXIT_FATAL);
    assert!(r.stderr.contains("legacy__wallet-UC-0.json"), "{}", r.stderr);
}

#[test]
fn config_file_drives_a_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("campaign.toml");
    fs::write(
        &config,
        format!(
            "corpus_dir = {:?}\nout_dir = \"out\"\noperators = [\"CL\", \"DTU\"]\nworkers = 2\nrun_cmd = {:?}\n",
            s(&corpus()),
            stub_cmd()
        ),
    )
    .unwrap();
    let r = vulnseed(&["run", "--config", s(&config)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let out = dir.path().join("out");
    for file in ["mutations.jsonl", "stats.csv", "campaign.json", "validation.json", "outcomes.jsonl", "scores.csv"] {
        assert!(out.join(file).exists(), "{file}");
    }
    assert!(r.stdout.contains("\nCL              27         0   1.000   0.000\n"), "{}", r.stdout);
    // Flags override the file.
    let r = vulnseed(&["mutate", "--config", s(&config), "--operators", "UC"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("\nUC "));
    assert!(!r.stdout.contains("\nCL "));
}

#[test]
fn unknown_config_key_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(&config, "corpus_directory = \"x\"\n").unwrap();
    let r = vulnseed(&["mutate", "--config", s(&config)]);
    assert_eq!(r.code, EXIT_FATAL);
    assert!(r.stderr.contains("corpus_directory"), "{}", r.stderr);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_vulnseed");
    let out = tempfile::tempdir().unwrap();
    let ok = Command::new(bin)
        .args(["mutate", "--corpus", s(&corpus()), "--out", s(out.path()), "--operators", "DTU"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("DTU "));
    let bad = Command::new(bin).args(["score", "--out", s(&out.path().join("missing"))]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_FATAL));
}
