//! Score a static analyzer on a campaign: compare its findings on each
//! original with its findings on every mutant, credit detections of the
//! injected class, and tally side effects.
//!
//! Reports live under a reports directory:
//!
//! ```text
//! <reports>/original/<relative-source-stem>.json
//! <reports>/mutants/<mutant-id>.json
//! ```
//!
//! They are either supplied up front or produced by running an analyzer
//! command template per file (see [`DiffOptions::run_cmd`]).

mod classify;
mod report;
mod score;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::campaign::{read_log, relative_stem, CampaignError, Manifest, Mutant};
use crate::operators::OperatorId;

pub use classify::{Classifier, DetectionOutcome, InjectionFootprint, Verdict};
pub use report::{ingest_optional, ingest_report, parse_report, sort_findings, Finding};
pub use score::{format_ratio, score, side_effects, write_side_effects, ScoreRow, ScoreTable, SideEffectRow};

pub const OUTCOMES_FILE: &str = "outcomes.jsonl";
pub const SCORES_FILE: &str = "scores.csv";
pub const SIDE_EFFECTS_FILE: &str = "side_effects.csv";

#[derive(Debug, Error)]
pub enum DetectionError {
    #[error(transparent)]
    Campaign(#[from] CampaignError),
    #[error("malformed findings report {}: {reason}", path.display())]
    MalformedReport { path: PathBuf, reason: String },
    #[error("malformed outcome log {} line {line}: {reason}", path.display())]
    MalformedOutcomes { path: PathBuf, line: usize, reason: String },
    #[error("cannot read {}: {source}", path.display())]
    MissingInput { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("score output: {0}")]
    Csv(#[from] csv::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Which analyzer detector is expected to flag each operator's injection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "BTreeMap<OperatorId, String>", into = "BTreeMap<OperatorId, String>")]
pub struct DetectorMap(BTreeMap<OperatorId, String>);

impl Default for DetectorMap {
    fn default() -> Self {
        DetectorMap(
            [
                (OperatorId::UC, "unchecked-lowlevel"),
                (OperatorId::US, "unchecked-send"),
                (OperatorId::TX, "tx-origin"),
                (OperatorId::UR, "unused-return"),
                (OperatorId::CL, "calls-loop"),
                (OperatorId::DTU, "controlled-delegatecall"),
            ]
            .into_iter()
            .map(|(op, d)| (op, d.to_string()))
            .collect(),
        )
    }
}

/// Entries override the defaults; operators left out keep theirs.
impl From<BTreeMap<OperatorId, String>> for DetectorMap {
    fn from(overrides: BTreeMap<OperatorId, String>) -> Self {
        let mut map = DetectorMap::default();
        map.0.extend(overrides);
        map
    }
}

impl From<DetectorMap> for BTreeMap<OperatorId, String> {
    fn from(map: DetectorMap) -> Self {
        map.0
    }
}

impl DetectorMap {
    pub fn expected(&self, op: OperatorId) -> &str {
        &self.0[&op]
    }

    pub fn with(mut self, op: OperatorId, detector: impl Into<String>) -> DetectorMap {
        self.0.insert(op, detector.into());
        self
    }
}

pub fn original_report_path(reports: &Path, source: &Path) -> PathBuf {
    reports.join("original").join(relative_stem(source).with_extension("json"))
}

pub fn mutant_report_path(reports: &Path, mutant_id: &str) -> PathBuf {
    reports.join("mutants").join(format!("{mutant_id}.json"))
}

#[derive(Clone, Debug)]
pub struct DiffOptions {
    pub reports_dir: PathBuf,
    /// Analyzer command run through `sh -c` once per original and once per
    /// mutant. `{input}` becomes the contract path and `{output}` the report
    /// path; without `{output}` the command's standard output is saved as
    /// the report. Exit status is ignored (analyzers commonly exit non-zero
    /// when they find something); a missing or empty report counts as an
    /// analyzer failure.
    pub run_cmd: Option<String>,
    pub classifier: Classifier,
    pub workers: usize,
}

impl DiffOptions {
    pub fn new(reports_dir: impl Into<PathBuf>) -> DiffOptions {
        DiffOptions { reports_dir: reports_dir.into(), run_cmd: None, classifier: Classifier::default(), workers: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct DiffSummary {
    pub outcomes: Vec<DetectionOutcome>,
    pub table: ScoreTable,
    pub side_effects: Vec<SideEffectRow>,
}

fn run_analyzer(template: &str, input: &Path, output: &Path) {
    if let Some(parent) = output.parent() {
        let _ = fs::create_dir_all(parent);
    }
    let _ = fs::remove_file(output);
    let cmd = crate::campaign::command_line(template, &[("input", input), ("output", output)]);
    let captures_stdout = !template.contains("{output}");
    let result = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .stdin(Stdio::null())
        .stdout(if captures_stdout { Stdio::piped() } else { Stdio::null() })
        .stderr(Stdio::null())
        .output();
    if let Ok(out) = result {
        if captures_stdout && !out.stdout.is_empty() {
            let _ = fs::write(output, out.stdout);
        }
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, DetectionError> {
    rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().map_err(|e| DetectionError::Pool(e.to_string()))
}

/// Run `opts.run_cmd` on every original and mutant of the campaign in
/// `out_dir`, writing reports under `opts.reports_dir`.
pub fn analyze_campaign(out_dir: &Path, opts: &DiffOptions) -> Result<(), DetectionError> {
    let Some(template) = &opts.run_cmd else { return Ok(()) };
    let manifest = Manifest::read(out_dir)?;
    let mutants = read_log(out_dir)?;
    let mut jobs: Vec<(PathBuf, PathBuf)> = Vec::new();
    let sources: std::collections::BTreeSet<&Path> = mutants.iter().map(|m| m.source_path.as_path()).collect();
    for rel in sources {
        jobs.push((manifest.corpus.join(rel), original_report_path(&opts.reports_dir, rel)));
    }
    for m in &mutants {
        jobs.push((out_dir.join(&m.output_path), mutant_report_path(&opts.reports_dir, &m.id)));
    }
    pool(opts.workers)?.install(|| jobs.par_iter().for_each(|(input, output)| run_analyzer(template, input, output)));
    Ok(())
}

fn read_text(path: &Path) -> Result<String, DetectionError> {
    fs::read_to_string(path).map_err(|source| DetectionError::MissingInput { path: path.to_path_buf(), source })
}

/// Classify every mutant of the campaign in `out_dir` against the reports,
/// running the analyzer first when a command is configured. Writes
/// `outcomes.jsonl`, `scores.csv` and `side_effects.csv` into `out_dir`.
pub fn diff_campaign(out_dir: &Path, opts: &DiffOptions) -> Result<DiffSummary, DetectionError> {
    analyze_campaign(out_dir, opts)?;
    let manifest = Manifest::read(out_dir)?;
    let mutants = read_log(out_dir)?;

    let mut by_source: BTreeMap<&Path, Vec<&Mutant>> = BTreeMap::new();
    for m in &mutants {
        by_source.entry(m.source_path.as_path()).or_default().push(m);
    }
    let groups: Vec<(&Path, Vec<&Mutant>)> = by_source.into_iter().collect();
    let classifier = &opts.classifier;
    let per_group: Vec<Result<Vec<DetectionOutcome>, DetectionError>> = pool(opts.workers)?.install(|| {
        groups
            .par_iter()
            .map(|(rel, group)| {
                let original_text = read_text(&manifest.corpus.join(rel))?;
                let original = ingest_optional(&original_report_path(&opts.reports_dir, rel))?;
                group
                    .iter()
                    .map(|m| {
                        let mutant_text = read_text(&out_dir.join(&m.output_path))?;
                        let footprint = InjectionFootprint::from_texts(&original_text, &mutant_text);
                        let mutated = ingest_optional(&mutant_report_path(&opts.reports_dir, &m.id))?;
                        Ok(classifier.classify(m, &footprint, original.as_deref(), mutated.as_deref()))
                    })
                    .collect()
            })
            .collect()
    });
    let mut by_id: BTreeMap<String, DetectionOutcome> = BTreeMap::new();
    for group in per_group {
        for o in group? {
            by_id.insert(o.mutant_id.clone(), o);
        }
    }
    // Keep log order.
    let outcomes: Vec<DetectionOutcome> = mutants.iter().filter_map(|m| by_id.remove(&m.id)).collect();
    write_outcomes(&out_dir.join(OUTCOMES_FILE), &outcomes)?;
    let (table, effects) = write_scores(out_dir, &outcomes)?;
    Ok(DiffSummary { outcomes, table, side_effects: effects })
}

/// Score the outcomes recorded by [`diff_campaign`] and rewrite the CSVs.
pub fn score_campaign(out_dir: &Path) -> Result<DiffSummary, DetectionError> {
    let outcomes = read_outcomes(&out_dir.join(OUTCOMES_FILE))?;
    let (table, effects) = write_scores(out_dir, &outcomes)?;
    Ok(DiffSummary { outcomes, table, side_effects: effects })
}

fn write_scores(
    out_dir: &Path,
    outcomes: &[DetectionOutcome],
) -> Result<(ScoreTable, Vec<SideEffectRow>), DetectionError> {
    let table = score(outcomes);
    table.write_csv(&out_dir.join(SCORES_FILE))?;
    let effects = side_effects(outcomes);
    write_side_effects(&effects, &out_dir.join(SIDE_EFFECTS_FILE))?;
    Ok((table, effects))
}

pub fn write_outcomes(path: &Path, outcomes: &[DetectionOutcome]) -> Result<(), DetectionError> {
    let werr = |source| DetectionError::Write { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(fs::File::create(path).map_err(werr)?);
    for o in outcomes {
        writeln!(w, "{}", serde_json::to_string(o).expect("outcome serializes")).map_err(werr)?;
    }
    w.flush().map_err(werr)
}

pub fn read_outcomes(path: &Path) -> Result<Vec<DetectionOutcome>, DetectionError> {
    let file =
        fs::File::open(path).map_err(|source| DetectionError::MissingInput { path: path.to_path_buf(), source })?;
    let mut outcomes = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| DetectionError::MissingInput { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let o = serde_json::from_str(&line).map_err(|e| DetectionError::MalformedOutcomes {
            path: path.to_path_buf(),
            line: k + 1,
            reason: e.to_string(),
        })?;
        outcomes.push(o);
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detector_defaults_and_overrides() {
        let map = DetectorMap::default();
        assert_eq!(map.expected(OperatorId::DTU), "controlled-delegatecall");
        let parsed: DetectorMap = serde_json::from_str(r#"{"TX":"my-tx"}"#).unwrap();
        assert_eq!(parsed.expected(OperatorId::TX), "my-tx");
        assert_eq!(parsed.expected(OperatorId::UC), "unchecked-lowlevel");
    }

    #[test]
    fn report_layout() {
        let r = Path::new("/r");
        assert_eq!(original_report_path(r, Path::new("a/b.sol")), Path::new("/r/original/a/b.json"));
        assert_eq!(mutant_report_path(r, "a__b-TX-0"), Path::new("/r/mutants/a__b-TX-0.json"));
    }
}
