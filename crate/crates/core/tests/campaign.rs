mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use vulnseed::campaign::{
    corpus_files, read_log, run_campaign, validate_mutants, write_log, CampaignError, Manifest, LOG_FILE,
    MANIFEST_FILE, STATS_FILE,
};
use vulnseed::operators::{OperatorConfig, OperatorId};
use vulnseed::syntax::parse_str;

use common::{corpus, fixtures, site_table, snapshot};

fn counts_by_file(out: &Path) -> BTreeMap<PathBuf, BTreeMap<OperatorId, usize>> {
    let mut got: BTreeMap<PathBuf, BTreeMap<OperatorId, usize>> = BTreeMap::new();
    for m in read_log(out).unwrap() {
        *got.entry(m.source_path).or_default().entry(m.operator).or_default() += 1;
    }
    got
}

#[test]
fn fixture_corpus_matches_hand_enumerated_sites() {
    let out = tempfile::tempdir().unwrap();
    let stats = run_campaign(&corpus(), &OperatorConfig::default(), out.path(), 4).unwrap();
    let table = site_table();
    let got = counts_by_file(out.path());
    for (file, row) in &table {
        for (op, &expected) in row {
            let actual = got.get(file).and_then(|r| r.get(op)).copied().unwrap_or(0);
            assert_eq!(actual, expected, "{} {op}", file.display());
        }
    }
    // Every file in the log is in the table.
    assert!(got.keys().all(|f| table.contains_key(f)));

    assert_eq!(stats.parsed, 20);
    assert_eq!(stats.skipped_invalid, 1);
    assert_eq!(stats.corpus_size(), 21);
    let no_sites = table.values().filter(|r| r.values().all(|&n| n == 0)).count();
    assert_eq!(stats.no_pattern, no_sites);
    for op in OperatorId::ALL {
        let row = stats.row(op).unwrap();
        let files = table.values().filter(|r| r[&op] > 0).count();
        let sites: usize = table.values().map(|r| r[&op]).sum();
        assert_eq!(row.mutated_contracts, files, "{op}");
        assert_eq!(row.mutants, sites, "{op}");
        assert!((row.injection_rate - files as f64 / 20.0).abs() < 1e-12);
    }
    assert_eq!(stats.total_mutants(), table.values().flat_map(|r| r.values()).sum::<usize>());
}

#[test]
fn every_mutant_file_exists_and_reparses() {
    let out = tempfile::tempdir().unwrap();
    run_campaign(&corpus(), &OperatorConfig::default(), out.path(), 2).unwrap();
    let log = read_log(out.path()).unwrap();
    assert!(!log.is_empty());
    let mut ids = std::collections::BTreeSet::new();
    for m in &log {
        assert!(ids.insert(m.id.clone()), "duplicate id {}", m.id);
        let text = fs::read_to_string(out.path().join(&m.output_path)).unwrap();
        assert!(text.contains(&m.mutated_snippet));
        assert!(parse_str(&text).is_parsed(), "{}", m.id);
    }
}

#[test]
fn mutant_ids_follow_layout() {
    let out = tempfile::tempdir().unwrap();
    run_campaign(&corpus(), &OperatorConfig::default(), out.path(), 1).unwrap();
    let log = read_log(out.path()).unwrap();
    let m = log.iter().find(|m| m.id == "legacy__privileged-TX-5").unwrap();
    assert_eq!(m.source_path, Path::new("legacy/privileged.sol"));
    assert_eq!(m.output_path, Path::new("legacy/privileged/TX/legacy__privileged-TX-5.sol"));
    assert_eq!(m.original_snippet, "msg.sender");
    assert_eq!(m.mutated_snippet, "tx.origin");
    assert_eq!(m.line, 37);
}

#[test]
fn log_is_sorted_by_file_operator_ordinal() {
    let out = tempfile::tempdir().unwrap();
    run_campaign(&corpus(), &OperatorConfig::default(), out.path(), 8).unwrap();
    let log = read_log(out.path()).unwrap();
    let keys: Vec<_> = log.iter().map(|m| (m.source_path.clone(), m.operator, m.ordinal().unwrap())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn output_is_identical_for_any_worker_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_campaign(&corpus(), &OperatorConfig::default(), a.path(), 1).unwrap();
    run_campaign(&corpus(), &OperatorConfig::default(), b.path(), 8).unwrap();
    assert_eq!(snapshot(a.path()), snapshot(b.path()));
}

#[test]
fn operator_filter_and_loop_options() {
    let out = tempfile::tempdir().unwrap();
    let cfg = OperatorConfig::default().only([OperatorId::TX]);
    let stats = run_campaign(&corpus(), &cfg, out.path(), 2).unwrap();
    assert_eq!(stats.rows().len(), 1);
    assert!(read_log(out.path()).unwrap().iter().all(|m| m.operator == OperatorId::TX));
    let csv = fs::read_to_string(out.path().join(STATS_FILE)).unwrap();
    assert_eq!(csv.lines().count(), 3, "{csv}");

    // Skipping statements already in a loop drops the seven loop-body calls
    // (multisend x2, payout, payroll for-body, payroll do-while body,
    // lottery, loop_collision batch).
    let out2 = tempfile::tempdir().unwrap();
    let cfg = OperatorConfig { cl_skip_inside_loop: true, ..OperatorConfig::default() }.only([OperatorId::CL]);
    let stats = run_campaign(&corpus(), &cfg, out2.path(), 2).unwrap();
    let all: usize = site_table().values().map(|r| r[&OperatorId::CL]).sum();
    assert_eq!(stats.total_mutants(), all - 7);

    let out3 = tempfile::tempdir().unwrap();
    run_campaign(&corpus(), &OperatorConfig::default().with_loop_bound(5).only([OperatorId::CL]), out3.path(), 1)
        .unwrap();
    let log = read_log(out3.path()).unwrap();
    assert!(log.iter().all(|m| m.mutated_snippet.contains("<= 5;")));
}

#[test]
fn empty_corpus_gives_zero_stats() {
    let corpus = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let stats = run_campaign(corpus.path(), &OperatorConfig::default(), out.path(), 1).unwrap();
    assert_eq!(stats.corpus_size(), 0);
    assert_eq!(stats.total_mutants(), 0);
    assert!(stats.rows().iter().all(|r| r.injection_rate == 0.0 && r.mutated_contracts == 0));
    assert_eq!(fs::read_to_string(out.path().join(LOG_FILE)).unwrap(), "");
    let report = validate_mutants(out.path(), None).unwrap();
    assert_eq!(report.total, 0);
}

#[test]
fn missing_corpus_is_fatal() {
    let out = tempfile::tempdir().unwrap();
    let err = run_campaign(Path::new("/nonexistent/corpus"), &OperatorConfig::default(), out.path(), 1).unwrap_err();
    assert!(matches!(err, CampaignError::Corpus { .. }), "{err}");
}

#[test]
fn invalid_config_is_rejected() {
    let out = tempfile::tempdir().unwrap();
    let err = run_campaign(&corpus(), &OperatorConfig::default().with_loop_bound(0), out.path(), 1).unwrap_err();
    assert!(matches!(err, CampaignError::Config(_)));
}

#[test]
fn manifest_records_the_run() {
    let out = tempfile::tempdir().unwrap();
    run_campaign(&corpus(), &OperatorConfig::default(), out.path(), 1).unwrap();
    let manifest = Manifest::read(out.path()).unwrap();
    assert_eq!(manifest.skipped_invalid, [PathBuf::from("artifact.sol")]);
    assert_eq!(manifest.corpus_size, 21);
    assert_eq!(manifest.corpus, fs::canonicalize(corpus()).unwrap());
    assert!(manifest.quarantined.is_empty());
    assert!(out.path().join(MANIFEST_FILE).exists());
}

#[test]
fn corpus_listing_is_sorted_and_relative() {
    let files = corpus_files(&corpus()).unwrap();
    assert_eq!(files.len(), 21);
    assert!(files.windows(2).all(|w| w[0] < w[1]));
    assert!(files.iter().all(|f| f.is_relative()));
}

#[test]
fn fixture_campaign_validates_cleanly() {
    let out = tempfile::tempdir().unwrap();
    run_campaign(&corpus(), &OperatorConfig::default(), out.path(), 4).unwrap();
    let report = validate_mutants(out.path(), None).unwrap();
    assert!(report.total > 0);
    assert_eq!(report.structural_failures(), 0, "{:?}", report.failed().collect::<Vec<_>>());
    assert_eq!(report.failure_rate, 0.0);
    assert!(report.compile.is_none());
    assert!(out.path().join("validation.json").exists());
}

#[test]
fn wrong_line_in_log_is_flagged() {
    let out = tempfile::tempdir().unwrap();
    run_campaign(&corpus(), &OperatorConfig::default(), out.path(), 1).unwrap();
    let mut log = read_log(out.path()).unwrap();
    log[3].line += 2;
    let victim = log[3].id.clone();
    write_log(&out.path().join(LOG_FILE), &log).unwrap();
    let report = validate_mutants(out.path(), None).unwrap();
    let failed: Vec<_> = report.failed().collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].id, victim);
    assert!(!failed[0].log_cross_check);
    assert!(failed[0].reparse);
    assert_eq!(report.log_cross_check.failed, 1);
}

#[test]
fn tampered_mutant_fails_reparse_and_adherence() {
    let out = tempfile::tempdir().unwrap();
    run_campaign(&corpus(), &OperatorConfig::default(), out.path(), 1).unwrap();
    let log = read_log(out.path()).unwrap();
    let path = out.path().join(&log[0].output_path);
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replacen(';', "", 1)).unwrap();
    let report = validate_mutants(out.path(), None).unwrap();
    let v = &report.mutants[0];
    assert!(!v.reparse);
    assert!(!v.pattern_adherence);
    assert!(!v.problems.is_empty());
}

#[test]
fn compile_command_is_run_per_mutant() {
    let out = tempfile::tempdir().unwrap();
    run_campaign(&corpus(), &OperatorConfig::default().only([OperatorId::DTU]), out.path(), 1).unwrap();
    let report = validate_mutants(out.path(), Some("grep -q 'address public delegate' {input}")).unwrap();
    let compile = report.compile.unwrap();
    assert_eq!(compile.checked, 4);
    assert_eq!(compile.failed, 0);
    let report = validate_mutants(out.path(), Some("false")).unwrap();
    assert_eq!(report.compile.as_ref().unwrap().failed, 4);
    // Compilation does not count as a structural failure.
    assert_eq!(report.structural_failures(), 0);
}

#[test]
fn missing_log_is_fatal() {
    let out = tempfile::tempdir().unwrap();
    assert!(validate_mutants(out.path(), None).is_err());
    run_campaign(&corpus(), &OperatorConfig::default(), out.path(), 1).unwrap();
    fs::remove_file(out.path().join(LOG_FILE)).unwrap();
    assert!(matches!(validate_mutants(out.path(), None), Err(CampaignError::MissingInput { .. })));
}

#[test]
fn listings_as_a_corpus() {
    let corpus = tempfile::tempdir().unwrap();
    for name in ["uc", "us", "tx", "ur", "cl", "dtu"] {
        fs::copy(fixtures().join(format!("listings/{name}.sol")), corpus.path().join(format!("{name}.sol"))).unwrap();
    }
    let out = tempfile::tempdir().unwrap();
    run_campaign(corpus.path(), &OperatorConfig::default(), out.path(), 2).unwrap();
    let got = counts_by_file(out.path());
    let count = |file: &str, op| got.get(Path::new(file)).and_then(|r| r.get(&op)).copied().unwrap_or(0);
    // Each listing yields its own operator once; CL also wraps the send and
    // call statements of the UC, US and CL listings; the CL listing's
    // require(send) is a US site as well.
    for (file, op) in [
        ("uc.sol", OperatorId::UC),
        ("us.sol", OperatorId::US),
        ("tx.sol", OperatorId::TX),
        ("ur.sol", OperatorId::UR),
        ("cl.sol", OperatorId::CL),
        ("dtu.sol", OperatorId::DTU),
    ] {
        assert_eq!(count(file, op), 1, "{file}");
    }
    assert_eq!(count("uc.sol", OperatorId::CL), 1);
    assert_eq!(count("us.sol", OperatorId::CL), 1);
    assert_eq!(count("cl.sol", OperatorId::US), 1);
    let total: usize = got.values().flat_map(|r| r.values()).sum();
    assert_eq!(total, 9);
}
