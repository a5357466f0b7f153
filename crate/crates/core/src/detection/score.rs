//! Recall / false-negative-rate tables and side-effect summaries.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use super::{DetectionError, DetectionOutcome, Verdict};
use crate::operators::OperatorId;

/// `num / den` to three decimals, truncated, computed on integers so that
/// printed values never depend on float rounding. `-` when `den` is 0.
///
/// Truncation is what reproduces published tables: 42,937 / 64,702 is
/// 0.66361…, printed as 0.663.
pub fn format_ratio(num: u64, den: u64) -> String {
    if den == 0 {
        return "-".to_string();
    }
    let milli = (num as u128 * 1000) / den as u128;
    format!("{}.{:03}", milli / 1000, milli % 1000)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScoreRow {
    /// `None` for the totals row.
    pub operator: Option<OperatorId>,
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub analyzer_failed: u64,
}

impl ScoreRow {
    pub fn new(operator: OperatorId, tp: u64, fn_: u64) -> ScoreRow {
        ScoreRow { operator: Some(operator), tp, fn_, analyzer_failed: 0 }
    }

    pub fn analyzed(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn recall(&self) -> String {
        format_ratio(self.tp, self.analyzed())
    }

    pub fn fnr(&self) -> String {
        format_ratio(self.fn_, self.analyzed())
    }

    pub fn label(&self) -> &'static str {
        self.operator.map_or("TOTAL", OperatorId::as_str)
    }

    /// Higher recall first; rows with undefined recall last.
    fn by_recall(&self, other: &ScoreRow) -> Ordering {
        match (self.analyzed(), other.analyzed()) {
            (0, 0) => Ordering::Equal,
            (0, _) => Ordering::Greater,
            (_, 0) => Ordering::Less,
            (a, b) => (other.tp as u128 * a as u128).cmp(&(self.tp as u128 * b as u128)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScoreTable {
    /// Operators with at least one outcome, by recall (highest first).
    pub rows: Vec<ScoreRow>,
    pub total: ScoreRow,
}

impl ScoreTable {
    pub fn from_rows(rows: impl IntoIterator<Item = ScoreRow>) -> ScoreTable {
        let mut rows: Vec<ScoreRow> = rows.into_iter().collect();
        rows.sort_by(|a, b| a.by_recall(b).then(a.operator.cmp(&b.operator)));
        let total = rows.iter().fold(ScoreRow::default(), |mut t, r| {
            t.tp += r.tp;
            t.fn_ += r.fn_;
            t.analyzer_failed += r.analyzer_failed;
            t
        });
        ScoreTable { rows, total }
    }

    pub fn row(&self, op: OperatorId) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.operator == Some(op))
    }

    /// `operator,tp,fn,recall,fnr` plus a `TOTAL` row.
    pub fn write_csv(&self, path: &Path) -> Result<(), DetectionError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["operator", "tp", "fn", "recall", "fnr"])?;
        for r in self.rows.iter().chain(std::iter::once(&self.total)) {
            w.write_record([r.label().to_string(), r.tp.to_string(), r.fn_.to_string(), r.recall(), r.fnr()])?;
        }
        w.flush().map_err(|e| DetectionError::Write { path: path.to_path_buf(), source: e })
    }
}

impl fmt::Display for ScoreTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:>9} {:>9} {:>7} {:>7}", "operator", "tp", "fn", "recall", "fnr")?;
        for r in self.rows.iter().chain(std::iter::once(&self.total)) {
            writeln!(f, "{:<8} {:>9} {:>9} {:>7} {:>7}", r.label(), r.tp, r.fn_, r.recall(), r.fnr())?;
        }
        write!(f, "analyzer_failed {}", self.total.analyzer_failed)
    }
}

/// Count verdicts per operator. Analyzer failures are tallied but never
/// enter recall or FNR.
pub fn score(outcomes: &[DetectionOutcome]) -> ScoreTable {
    let mut rows: BTreeMap<OperatorId, ScoreRow> = BTreeMap::new();
    for o in outcomes {
        let row =
            rows.entry(o.operator).or_insert_with(|| ScoreRow { operator: Some(o.operator), ..ScoreRow::default() });
        match o.verdict {
            Verdict::TP => row.tp += 1,
            Verdict::FN => row.fn_ += 1,
            Verdict::AnalyzerFailed => row.analyzer_failed += 1,
        }
    }
    ScoreTable::from_rows(rows.into_values())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideEffectRow {
    pub operator: OperatorId,
    pub detector: String,
    pub added: u64,
    pub removed: u64,
}

/// Added/removed finding counts per (operator, detector), sorted by both.
pub fn side_effects(outcomes: &[DetectionOutcome]) -> Vec<SideEffectRow> {
    let mut acc: BTreeMap<(OperatorId, &str), (u64, u64)> = BTreeMap::new();
    for o in outcomes {
        for d in &o.side_effects_added {
            acc.entry((o.operator, d)).or_default().0 += 1;
        }
        for d in &o.side_effects_removed {
            acc.entry((o.operator, d)).or_default().1 += 1;
        }
    }
    acc.into_iter()
        .map(|((operator, detector), (added, removed))| SideEffectRow {
            operator,
            detector: detector.to_string(),
            added,
            removed,
        })
        .collect()
}

/// `operator,detector,added,removed`.
pub fn write_side_effects(rows: &[SideEffectRow], path: &Path) -> Result<(), DetectionError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["operator", "detector", "added", "removed"])?;
    for r in rows {
        w.write_record([r.operator.to_string(), r.detector.clone(), r.added.to_string(), r.removed.to_string()])?;
    }
    w.flush().map_err(|e| DetectionError::Write { path: path.to_path_buf(), source: e })
}
