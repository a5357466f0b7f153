//! Analyzer findings reports.
//!
//! One JSON document per analyzed file:
//!
//! ```json
//! {"file": "token/ERC20.sol", "findings": [{"detector": "tx-origin", "lines": [12]}]}
//! ```
//!
//! A document may also be an array of such objects when an analyzer run
//! covers several files; each finding then belongs to its object's `file`.
//! Unknown fields are ignored.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::DetectionError;

/// One analyzer finding.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Finding {
    pub detector: String,
    pub file: PathBuf,
    /// 1-based, never empty.
    pub lines: BTreeSet<usize>,
}

impl Finding {
    pub fn new(
        detector: impl Into<String>,
        file: impl Into<PathBuf>,
        lines: impl IntoIterator<Item = usize>,
    ) -> Finding {
        Finding { detector: detector.into(), file: file.into(), lines: lines.into_iter().collect() }
    }

    fn min_line(&self) -> usize {
        self.lines.first().copied().unwrap_or(0)
    }
}

#[derive(Deserialize)]
struct RawFinding {
    detector: String,
    lines: Vec<usize>,
}

#[derive(Deserialize)]
struct RawReport {
    file: PathBuf,
    findings: Vec<RawFinding>,
}

/// Parse report text; `origin` names the source in error messages.
pub fn parse_report(text: &str, origin: &Path) -> Result<Vec<Finding>, DetectionError> {
    let malformed = |reason: String| DetectionError::MalformedReport { path: origin.to_path_buf(), reason };
    let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let reports: Vec<RawReport> = match doc {
        serde_json::Value::Object(_) => serde_json::from_value(doc).map(|r| vec![r]),
        serde_json::Value::Array(_) => serde_json::from_value(doc),
        _ => return Err(malformed("expected an object or an array of objects".into())),
    }
    .map_err(|e| malformed(e.to_string()))?;
    let mut findings = Vec::new();
    for report in reports {
        for f in report.findings {
            if f.detector.trim().is_empty() {
                return Err(malformed("finding with an empty detector name".into()));
            }
            if f.lines.is_empty() {
                return Err(malformed(format!("`{}` finding without lines", f.detector)));
            }
            if f.lines.contains(&0) {
                return Err(malformed(format!("`{}` finding with line 0 (lines are 1-based)", f.detector)));
            }
            findings.push(Finding::new(f.detector, report.file.clone(), f.lines));
        }
    }
    sort_findings(&mut findings);
    Ok(findings)
}

/// Read the report at `path`, sorted by (file, detector, first line).
pub fn ingest_report(path: &Path) -> Result<Vec<Finding>, DetectionError> {
    let text = fs::read_to_string(path)
        .map_err(|e| DetectionError::MalformedReport { path: path.to_path_buf(), reason: e.to_string() })?;
    parse_report(&text, path)
}

/// Like [`ingest_report`], but a missing file is `Ok(None)`: the analyzer
/// did not produce a report.
pub fn ingest_optional(path: &Path) -> Result<Option<Vec<Finding>>, DetectionError> {
    if !path.exists() {
        return Ok(None);
    }
    ingest_report(path).map(Some)
}

pub fn sort_findings(findings: &mut [Finding]) {
    findings.sort_by(|a, b| {
        (&a.file, &a.detector, a.min_line(), &a.lines).cmp(&(&b.file, &b.detector, b.min_line(), &b.lines))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("r.json")
    }

    #[test]
    fn one_finding() {
        let f =
            parse_report(r#"{"file":"a.sol","findings":[{"detector":"unchecked-send","lines":[7]}]}"#, p()).unwrap();
        assert_eq!(f, vec![Finding::new("unchecked-send", "a.sol", [7])]);
    }

    #[test]
    fn empty_findings() {
        assert!(parse_report(r#"{"file":"a.sol","findings":[]}"#, p()).unwrap().is_empty());
    }

    #[test]
    fn unknown_fields_ignored_and_sorted() {
        let text = r#"{"file":"a.sol","tool":"x","findings":[
            {"detector":"tx-origin","lines":[9],"impact":"High"},
            {"detector":"calls-loop","lines":[12, 4]},
            {"detector":"calls-loop","lines":[3]}]}"#;
        let f = parse_report(text, p()).unwrap();
        let order: Vec<(&str, usize)> = f.iter().map(|f| (f.detector.as_str(), f.min_line())).collect();
        assert_eq!(order, [("calls-loop", 3), ("calls-loop", 4), ("tx-origin", 9)]);
    }

    #[test]
    fn mixing_two_files() {
        let text = r#"[{"file":"b.sol","findings":[{"detector":"tx-origin","lines":[2]}]},
                       {"file":"a.sol","findings":[{"detector":"tx-origin","lines":[5]}]}]"#;
        let f = parse_report(text, p()).unwrap();
        assert_eq!(f[0].file, Path::new("a.sol"));
        assert_eq!(f[1].file, Path::new("b.sol"));
    }

    #[test]
    fn malformed_names_the_path() {
        for bad in [
            "{not json",
            r#"{"file":"a.sol"}"#,
            r#"{"file":"a.sol","findings":[{"detector":"x","lines":[]}]}"#,
            r#"{"file":"a.sol","findings":[{"detector":"","lines":[1]}]}"#,
            r#"{"file":"a.sol","findings":[{"detector":"x","lines":[0]}]}"#,
        ] {
            let err = parse_report(bad, Path::new("reports/r7.json")).unwrap_err();
            assert!(err.to_string().contains("reports/r7.json"), "{err}");
        }
    }
}
