//! Line-level comparison of an original file with one of its mutants.
//!
//! The campaign log records a single anchor line per mutant; the diff
//! recovers everything else the mutation touched (inserted declarations,
//! lines shifted by them) without re-running the operator.

use std::collections::{BTreeMap, BTreeSet};

use similar::{DiffOp, TextDiff};

/// 1-based line bookkeeping between an original text and a mutant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LineDiff {
    changed_old: BTreeSet<usize>,
    changed_new: BTreeSet<usize>,
    old_to_new: BTreeMap<usize, BTreeSet<usize>>,
}

impl LineDiff {
    pub fn new(old: &str, new: &str) -> LineDiff {
        let diff = TextDiff::from_lines(old, new);
        let new_len = new.lines().count().max(1);
        let mut out = LineDiff::default();
        for op in diff.ops() {
            match *op {
                DiffOp::Equal { old_index, new_index, len } => {
                    for k in 0..len {
                        out.old_to_new.entry(old_index + k + 1).or_default().insert(new_index + k + 1);
                    }
                }
                DiffOp::Insert { new_index, new_len: n, .. } => {
                    out.changed_new.extend((new_index + 1)..=(new_index + n));
                }
                DiffOp::Delete { old_index, old_len, new_index } => {
                    // Nothing new to point at; the line that now sits where
                    // the deleted lines were is the closest witness.
                    let at = (new_index + 1).min(new_len);
                    out.changed_new.insert(at);
                    for k in 0..old_len {
                        out.changed_old.insert(old_index + k + 1);
                        out.old_to_new.entry(old_index + k + 1).or_default().insert(at);
                    }
                }
                DiffOp::Replace { old_index, old_len, new_index, new_len: n } => {
                    let replaced: BTreeSet<usize> = ((new_index + 1)..=(new_index + n)).collect();
                    out.changed_new.extend(replaced.iter().copied());
                    for k in 0..old_len {
                        out.changed_old.insert(old_index + k + 1);
                        out.old_to_new.entry(old_index + k + 1).or_default().extend(replaced.iter().copied());
                    }
                }
            }
        }
        out
    }

    /// Original lines that were rewritten or removed.
    pub fn changed_old_lines(&self) -> &BTreeSet<usize> {
        &self.changed_old
    }

    /// Mutant lines that were inserted or rewritten.
    pub fn changed_new_lines(&self) -> &BTreeSet<usize> {
        &self.changed_new
    }

    /// Where original line `line` went in the mutant: one line when it is
    /// unchanged, the whole rewritten block when it was part of a change.
    pub fn map_old_line(&self, line: usize) -> BTreeSet<usize> {
        self.old_to_new.get(&line).cloned().unwrap_or_default()
    }

    pub fn is_identical(&self) -> bool {
        self.changed_old.is_empty() && self.changed_new.is_empty()
    }
}
