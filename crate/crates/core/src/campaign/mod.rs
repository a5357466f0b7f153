//! Corpus-scale driver: enumerate `.sol` files, run every enabled operator,
//! write one mutant per site plus a JSON Lines log, and account injection
//! rates per operator.
//!
//! Output layout under the campaign directory:
//!
//! ```text
//! <out>/<relative-source-stem>/<OP>/<id>.sol   one file per mutant
//! <out>/mutations.jsonl                        one record per mutant
//! <out>/stats.csv                              per-operator injection rates
//! <out>/campaign.json                          corpus, config and counts
//! <out>/validation.json                        written by `validate_mutants`
//! ```
//!
//! Files are processed on a worker pool; results are merged in corpus order
//! before anything is written, so output is identical for any worker count.

mod stats;
mod validate;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::operators::{match_sites, mutate, OperatorConfig, OperatorError, OperatorId};
use crate::syntax::{parse, SourceFile};

pub use stats::{CampaignStats, OperatorRow};
pub(crate) use validate::command_line;
pub use validate::{validate_mutants, MutantValidation, StepSummary, ValidationReport};

pub const LOG_FILE: &str = "mutations.jsonl";
pub const STATS_FILE: &str = "stats.csv";
pub const MANIFEST_FILE: &str = "campaign.json";
pub const VALIDATION_FILE: &str = "validation.json";

/// One generated mutant, as logged in `mutations.jsonl`.
///
/// `source_path` is relative to the corpus directory and `output_path`
/// relative to the campaign directory, so logs do not depend on where the
/// campaign ran.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutant {
    pub id: String,
    pub operator: OperatorId,
    pub source_path: PathBuf,
    pub output_path: PathBuf,
    /// 1-based line of the mutation anchor in the original file.
    pub line: usize,
    pub original_snippet: String,
    pub mutated_snippet: String,
}

impl Mutant {
    /// Position of this mutant among its operator's sites in the file.
    pub fn ordinal(&self) -> Option<usize> {
        self.id.rsplit('-').next()?.parse().ok()
    }
}

/// A site whose transformation failed. The rest of the file and corpus are
/// still processed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quarantined {
    pub source_path: PathBuf,
    pub operator: OperatorId,
    pub ordinal: usize,
    pub line: usize,
    pub reason: String,
}

/// What `campaign.json` records about a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub corpus: PathBuf,
    pub config: OperatorConfig,
    pub corpus_size: usize,
    pub parsed: usize,
    pub skipped_invalid: Vec<PathBuf>,
    pub no_pattern: usize,
    pub mutants: usize,
    pub quarantined: Vec<Quarantined>,
}

impl Manifest {
    pub fn read(out_dir: &Path) -> Result<Manifest, CampaignError> {
        let path = out_dir.join(MANIFEST_FILE);
        let text =
            fs::read_to_string(&path).map_err(|source| CampaignError::MissingInput { path: path.clone(), source })?;
        serde_json::from_str(&text).map_err(|source| CampaignError::Malformed { path, line: None, source })
    }
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("corpus directory {} is not readable: {reason}", path.display())]
    Corpus { path: PathBuf, reason: String },
    #[error("cannot read {}: {source}", path.display())]
    MissingInput { path: PathBuf, source: io::Error },
    #[error("malformed {}{}: {source}", path.display(), line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Malformed { path: PathBuf, line: Option<usize>, source: serde_json::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("mutant id {id} is produced by both {} and {}", first.display(), second.display())]
    DuplicateId { id: String, first: PathBuf, second: PathBuf },
    #[error(transparent)]
    Config(#[from] OperatorError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("stats output: {0}")]
    Csv(#[from] csv::Error),
}

/// All `.sol` files under `corpus`, relative to it, in sorted order.
pub fn corpus_files(corpus: &Path) -> Result<Vec<PathBuf>, CampaignError> {
    let corpus_err = |reason: String| CampaignError::Corpus { path: corpus.to_path_buf(), reason };
    if !corpus.is_dir() {
        return Err(corpus_err("not a directory".into()));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(corpus).follow_links(true) {
        let entry = entry.map_err(|e| corpus_err(e.to_string()))?;
        let path = entry.path();
        if entry.file_type().is_file() && path.extension().is_some_and(|e| e == "sol") {
            let rel = path.strip_prefix(corpus).expect("walkdir yields paths under its root");
            files.push(rel.to_path_buf());
        }
    }
    files.sort();
    Ok(files)
}

/// `token/ERC20.sol` → `token/ERC20`.
pub fn relative_stem(rel: &Path) -> PathBuf {
    rel.with_extension("")
}

/// `token/ERC20.sol`, TX, 2 → `token__ERC20-TX-2`.
pub fn mutant_id(rel: &Path, op: OperatorId, ordinal: usize) -> String {
    let stem: Vec<String> =
        relative_stem(rel).components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
    format!("{}-{op}-{ordinal}", stem.join("__"))
}

/// Where a mutant lives, relative to the campaign directory.
pub fn mutant_path(rel: &Path, op: OperatorId, id: &str) -> PathBuf {
    relative_stem(rel).join(op.as_str()).join(format!("{id}.sol"))
}

/// Per-file result of matching and mutating.
#[derive(Debug)]
pub(crate) enum FileOutcome {
    Invalid,
    Parsed { sites: BTreeMap<OperatorId, usize>, mutants: Vec<(Mutant, String)>, quarantined: Vec<Quarantined> },
}

pub(crate) fn process_file(corpus: &Path, rel: &Path, cfg: &OperatorConfig) -> FileOutcome {
    // Unreadable or non-UTF-8 files are counted with the unparseable ones.
    let Ok(text) = fs::read_to_string(corpus.join(rel)) else { return FileOutcome::Invalid };
    let file = SourceFile::new(rel, text);
    let Some(tree) = parse(&file).into_tree() else { return FileOutcome::Invalid };

    let mut sites = BTreeMap::new();
    let mut mutants = Vec::new();
    let mut quarantined = Vec::new();
    for &op in &cfg.enabled {
        let found = match_sites(op, &file, &tree, cfg);
        sites.insert(op, found.len());
        for site in found {
            match mutate(&site, &file, &tree, cfg) {
                Ok(m) => {
                    let id = mutant_id(rel, op, site.ordinal);
                    let mutant = Mutant {
                        output_path: mutant_path(rel, op, &id),
                        id,
                        operator: op,
                        source_path: rel.to_path_buf(),
                        line: site.line,
                        original_snippet: site.original_snippet,
                        mutated_snippet: m.mutated_snippet,
                    };
                    mutants.push((mutant, m.text));
                }
                Err(e) => quarantined.push(Quarantined {
                    source_path: rel.to_path_buf(),
                    operator: op,
                    ordinal: site.ordinal,
                    line: site.line,
                    reason: e.to_string(),
                }),
            }
        }
    }
    FileOutcome::Parsed { sites, mutants, quarantined }
}

fn write_err(path: &Path) -> impl FnOnce(io::Error) -> CampaignError + '_ {
    move |source| CampaignError::Write { path: path.to_path_buf(), source }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CampaignError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(write_err(parent))?;
    }
    fs::write(path, contents).map_err(write_err(path))
}

/// Run every enabled operator over `corpus`, writing mutants, the log,
/// `stats.csv` and `campaign.json` into `out`.
pub fn run_campaign(
    corpus: &Path,
    cfg: &OperatorConfig,
    out: &Path,
    workers: usize,
) -> Result<CampaignStats, CampaignError> {
    cfg.validate()?;
    let files = corpus_files(corpus)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CampaignError::Pool(e.to_string()))?;
    let outcomes: Vec<FileOutcome> =
        pool.install(|| files.par_iter().map(|rel| process_file(corpus, rel, cfg)).collect());

    let mut stats = CampaignStats::new(cfg.enabled.iter().copied());
    let mut mutants = Vec::new();
    let mut skipped_invalid = Vec::new();
    let mut quarantined = Vec::new();
    let mut seen: BTreeMap<String, PathBuf> = BTreeMap::new();
    for (rel, outcome) in files.iter().zip(outcomes) {
        match outcome {
            FileOutcome::Invalid => {
                stats.record_invalid();
                skipped_invalid.push(rel.clone());
            }
            FileOutcome::Parsed { sites, mutants: made, quarantined: q } => {
                stats.record_parsed(&sites);
                for (m, text) in made {
                    if let Some(first) = seen.insert(m.id.clone(), m.source_path.clone()) {
                        return Err(CampaignError::DuplicateId { id: m.id, first, second: m.source_path });
                    }
                    mutants.push((m, text));
                }
                quarantined.extend(q);
            }
        }
    }
    mutants.sort_by(|(a, _), (b, _)| {
        (&a.source_path, a.operator, a.ordinal()).cmp(&(&b.source_path, b.operator, b.ordinal()))
    });
    stats.set_mutants(mutants.iter().map(|(m, _)| m.operator));
    stats.quarantined = quarantined.len();

    fs::create_dir_all(out).map_err(write_err(out))?;
    for (m, text) in &mutants {
        write_file(&out.join(&m.output_path), text.as_bytes())?;
    }
    write_log(&out.join(LOG_FILE), mutants.iter().map(|(m, _)| m))?;
    stats.write_csv(&out.join(STATS_FILE))?;

    let manifest = Manifest {
        corpus: fs::canonicalize(corpus).unwrap_or_else(|_| corpus.to_path_buf()),
        config: cfg.clone(),
        corpus_size: files.len(),
        parsed: stats.parsed,
        skipped_invalid,
        no_pattern: stats.no_pattern,
        mutants: mutants.len(),
        quarantined,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&out.join(MANIFEST_FILE), format!("{json}\n").as_bytes())?;
    Ok(stats)
}

pub fn write_log<'a>(path: &Path, mutants: impl IntoIterator<Item = &'a Mutant>) -> Result<(), CampaignError> {
    let file = fs::File::create(path).map_err(write_err(path))?;
    let mut w = BufWriter::new(file);
    for m in mutants {
        let line = serde_json::to_string(m).expect("mutant serializes");
        writeln!(w, "{line}").map_err(write_err(path))?;
    }
    w.flush().map_err(write_err(path))
}

/// Read `<out>/mutations.jsonl`.
pub fn read_log(out_dir: &Path) -> Result<Vec<Mutant>, CampaignError> {
    let path = out_dir.join(LOG_FILE);
    let file = fs::File::open(&path).map_err(|source| CampaignError::MissingInput { path: path.clone(), source })?;
    let mut mutants = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| CampaignError::MissingInput { path: path.clone(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let m = serde_json::from_str(&line).map_err(|source| CampaignError::Malformed {
            path: path.clone(),
            line: Some(k + 1),
            source,
        })?;
        mutants.push(m);
    }
    Ok(mutants)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_and_paths() {
        let rel = Path::new("token/ERC20.sol");
        let id = mutant_id(rel, OperatorId::TX, 2);
        assert_eq!(id, "token__ERC20-TX-2");
        assert_eq!(mutant_path(rel, OperatorId::TX, &id), Path::new("token/ERC20/TX/token__ERC20-TX-2.sol"));
    }

    #[test]
    fn ordinal_from_id() {
        let m = Mutant {
            id: "a-b-UC-12".into(),
            operator: OperatorId::UC,
            source_path: "a-b.sol".into(),
            output_path: "x".into(),
            line: 1,
            original_snippet: String::new(),
            mutated_snippet: String::new(),
        };
        assert_eq!(m.ordinal(), Some(12));
    }

    #[test]
    fn log_field_order_is_fixed() {
        let m = Mutant {
            id: "c-TX-0".into(),
            operator: OperatorId::TX,
            source_path: "c.sol".into(),
            output_path: "c/TX/c-TX-0.sol".into(),
            line: 3,
            original_snippet: "msg.sender".into(),
            mutated_snippet: "tx.origin".into(),
        };
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            r#"{"id":"c-TX-0","operator":"TX","source_path":"c.sol","output_path":"c/TX/c-TX-0.sol","line":3,"original_snippet":"msg.sender","mutated_snippet":"tx.origin"}"#
        );
    }
}
