//! Fixture access shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use vulnseed::campaign::Mutant;
use vulnseed::detection::{Classifier, DetectionOutcome, Finding, InjectionFootprint, Verdict};
use vulnseed::operators::OperatorId;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn corpus() -> PathBuf {
    fixtures().join("corpus")
}

pub fn stub_analyzer() -> PathBuf {
    fixtures().join("stub_analyzer.sh")
}

/// The hand-enumerated site table: file → operator → count.
pub fn site_table() -> BTreeMap<PathBuf, BTreeMap<OperatorId, usize>> {
    let mut reader = csv::Reader::from_path(fixtures().join("corpus_sites.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let mut table = BTreeMap::new();
    for record in reader.records() {
        let record = record.unwrap();
        let mut row = BTreeMap::new();
        for (h, v) in headers.iter().zip(record.iter()).skip(1) {
            row.insert(h.parse::<OperatorId>().unwrap(), v.parse::<usize>().unwrap());
        }
        table.insert(PathBuf::from(&record[0]), row);
    }
    table
}

/// Every file under `dir`, relative, with its bytes.
pub fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    walkdir::WalkDir::new(dir)
        .into_iter()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().is_file())
        .map(|e| (e.path().strip_prefix(dir).unwrap().to_path_buf(), fs::read(e.path()).unwrap()))
        .collect()
}

#[derive(Debug, Deserialize)]
pub struct OracleCase {
    pub id: String,
    pub op: OperatorId,
    pub inj: Vec<usize>,
    pub orig: Option<Vec<(String, Vec<usize>)>>,
    #[serde(rename = "mut")]
    pub mutated: Option<Vec<(String, Vec<usize>)>>,
    pub verdict: Verdict,
    pub added: Vec<String>,
    pub removed: Vec<String>,
    pub note: String,
}

pub fn oracle_cases() -> Vec<OracleCase> {
    fs::read_to_string(fixtures().join("classifier_oracle.jsonl"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

pub fn findings(raw: &[(String, Vec<usize>)]) -> Vec<Finding> {
    raw.iter().map(|(d, lines)| Finding::new(d.clone(), "c.sol", lines.iter().copied())).collect()
}

pub fn synthetic_mutant(id: &str, op: OperatorId) -> Mutant {
    Mutant {
        id: id.to_string(),
        operator: op,
        source_path: "c.sol".into(),
        output_path: format!("c/{op}/{id}.sol").into(),
        line: 1,
        original_snippet: String::new(),
        mutated_snippet: String::new(),
    }
}

pub fn classify_case(c: &OracleCase, classifier: &Classifier) -> DetectionOutcome {
    let orig = c.orig.as_deref().map(findings);
    let mutated = c.mutated.as_deref().map(findings);
    classifier.classify(
        &synthetic_mutant(&c.id, c.op),
        &InjectionFootprint::from_lines(c.inj.iter().copied()),
        orig.as_deref(),
        mutated.as_deref(),
    )
}

/// `n_tp` detected and `n_fn` missed mutants of `op`. One report pair of
/// each kind is classified; the rest are copies under fresh ids.
pub fn synthetic_outcomes(op: OperatorId, n_tp: usize, n_fn: usize) -> Vec<DetectionOutcome> {
    let classifier = Classifier::default();
    let expected = classifier.detectors.expected(op).to_string();
    let footprint = InjectionFootprint::from_lines([10]);
    let hit = vec![Finding::new(expected, "c.sol", [10])];
    let m = synthetic_mutant(&format!("c-{op}-0"), op);
    let tp = classifier.classify(&m, &footprint, Some(&[]), Some(&hit));
    let fn_ = classifier.classify(&m, &footprint, Some(&[]), Some(&[]));
    assert_eq!((tp.verdict, fn_.verdict), (Verdict::TP, Verdict::FN));
    (0..n_tp + n_fn)
        .map(|k| {
            let template = if k < n_tp { &tp } else { &fn_ };
            DetectionOutcome { mutant_id: format!("c-{op}-{k}"), ..template.clone() }
        })
        .collect()
}
