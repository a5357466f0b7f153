//! Crediting one mutant: did the analyzer report the injected class at the
//! injected lines, and what else changed in its findings?

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{DetectorMap, Finding};
use crate::campaign::Mutant;
use crate::linediff::LineDiff;
use crate::operators::OperatorId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    TP,
    FN,
    AnalyzerFailed,
}

/// Lines of a mutant that carry the injection, and how original lines map
/// onto the mutant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InjectionFootprint {
    /// 1-based mutant lines inserted or rewritten by the mutation.
    pub injected_lines: BTreeSet<usize>,
    diff: LineDiff,
}

impl InjectionFootprint {
    pub fn from_texts(original: &str, mutant: &str) -> InjectionFootprint {
        let diff = LineDiff::new(original, mutant);
        InjectionFootprint { injected_lines: diff.changed_new_lines().clone(), diff }
    }

    /// A footprint with explicit injected lines and original lines equal to
    /// mutant lines (for synthetic reports that do not shift code).
    pub fn from_lines(lines: impl IntoIterator<Item = usize>) -> InjectionFootprint {
        InjectionFootprint { injected_lines: lines.into_iter().collect(), diff: LineDiff::default() }
    }

    /// Mutant lines that original line `line` corresponds to.
    fn map_original(&self, line: usize) -> BTreeSet<usize> {
        if self.diff.is_identical() {
            return BTreeSet::from([line]);
        }
        self.diff.map_old_line(line)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionOutcome {
    pub mutant_id: String,
    pub operator: OperatorId,
    pub verdict: Verdict,
    pub injected_lines: BTreeSet<usize>,
    pub side_effects_added: Vec<String>,
    pub side_effects_removed: Vec<String>,
}

/// Verdict rules with their knobs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classifier {
    pub detectors: DetectorMap,
    /// A finding covers the injection when one of its lines is within this
    /// many lines of an injected line.
    pub line_tolerance: usize,
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier { detectors: DetectorMap::default(), line_tolerance: 1 }
    }
}

impl Classifier {
    fn window(&self, footprint: &InjectionFootprint) -> BTreeSet<usize> {
        footprint
            .injected_lines
            .iter()
            .flat_map(|&l| l.saturating_sub(self.line_tolerance).max(1)..=l + self.line_tolerance)
            .collect()
    }

    /// TP when the mutant's report has more findings of the expected
    /// detector covering the injection than the original's report had at
    /// the same (mapped) lines. That is plain presence when the original
    /// was clean there, and a new overlapping finding when the weakness
    /// already existed before the mutation.
    ///
    /// Either report missing means the analyzer failed. Side effects are
    /// the multiset difference of detector names, excluding the expected
    /// detector. The result does not depend on finding order.
    pub fn classify(
        &self,
        mutant: &Mutant,
        footprint: &InjectionFootprint,
        original: Option<&[Finding]>,
        mutated: Option<&[Finding]>,
    ) -> DetectionOutcome {
        let mut outcome = DetectionOutcome {
            mutant_id: mutant.id.clone(),
            operator: mutant.operator,
            verdict: Verdict::AnalyzerFailed,
            injected_lines: footprint.injected_lines.clone(),
            side_effects_added: Vec::new(),
            side_effects_removed: Vec::new(),
        };
        let (Some(original), Some(mutated)) = (original, mutated) else { return outcome };
        let expected = self.detectors.expected(mutant.operator);
        let window = self.window(footprint);

        let after =
            mutated.iter().filter(|f| f.detector == expected && f.lines.iter().any(|l| window.contains(l))).count();
        let before = original
            .iter()
            .filter(|f| {
                f.detector == expected
                    && f.lines.iter().any(|&l| footprint.map_original(l).iter().any(|m| window.contains(m)))
            })
            .count();
        outcome.verdict = if after > before { Verdict::TP } else { Verdict::FN };

        let (o, n) = (detector_counts(original, expected), detector_counts(mutated, expected));
        let detectors: BTreeSet<&str> = o.keys().chain(n.keys()).copied().collect();
        for d in detectors {
            let (a, b) = (o.get(d).copied().unwrap_or(0), n.get(d).copied().unwrap_or(0));
            outcome.side_effects_added.extend(std::iter::repeat_n(d.to_string(), b.saturating_sub(a)));
            outcome.side_effects_removed.extend(std::iter::repeat_n(d.to_string(), a.saturating_sub(b)));
        }
        outcome
    }
}

fn detector_counts<'a>(findings: &'a [Finding], excluded: &str) -> BTreeMap<&'a str, usize> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for f in findings.iter().filter(|f| f.detector != excluded) {
        *counts.entry(f.detector.as_str()).or_default() += 1;
    }
    counts
}
