//! Injection-rate accounting in the shape of a per-operator results table.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use super::CampaignError;
use crate::operators::OperatorId;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorRow {
    pub operator: OperatorId,
    /// Parsed files with at least one site.
    pub mutated_contracts: usize,
    /// Mutants written.
    pub mutants: usize,
    pub injection_rate: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CampaignStats {
    per_operator: BTreeMap<OperatorId, (usize, usize)>,
    /// Parsed files with a site for at least one enabled operator.
    pub mutated_any: usize,
    pub parsed: usize,
    pub skipped_invalid: usize,
    /// Parsed files without a single site.
    pub no_pattern: usize,
    /// Sites whose transformation failed; they have no mutant.
    pub quarantined: usize,
}

impl CampaignStats {
    pub fn new(enabled: impl IntoIterator<Item = OperatorId>) -> CampaignStats {
        CampaignStats { per_operator: enabled.into_iter().map(|op| (op, (0, 0))).collect(), ..CampaignStats::default() }
    }

    pub(crate) fn record_invalid(&mut self) {
        self.skipped_invalid += 1;
    }

    pub(crate) fn record_parsed(&mut self, sites: &BTreeMap<OperatorId, usize>) {
        self.parsed += 1;
        let mut any = false;
        for (op, &n) in sites {
            if n > 0 {
                any = true;
                self.per_operator.entry(*op).or_default().0 += 1;
            }
        }
        if any {
            self.mutated_any += 1;
        } else {
            self.no_pattern += 1;
        }
    }

    pub(crate) fn set_mutants(&mut self, ops: impl IntoIterator<Item = OperatorId>) {
        for counts in self.per_operator.values_mut() {
            counts.1 = 0;
        }
        for op in ops {
            self.per_operator.entry(op).or_default().1 += 1;
        }
    }

    pub fn corpus_size(&self) -> usize {
        self.parsed + self.skipped_invalid
    }

    fn rate(&self, mutated: usize) -> f64 {
        if self.parsed == 0 {
            0.0
        } else {
            mutated as f64 / self.parsed as f64
        }
    }

    /// One row per enabled operator, highest injection rate first; ties
    /// keep the canonical operator order.
    pub fn rows(&self) -> Vec<OperatorRow> {
        let mut rows: Vec<OperatorRow> = self
            .per_operator
            .iter()
            .map(|(&operator, &(mutated_contracts, mutants))| OperatorRow {
                operator,
                mutated_contracts,
                mutants,
                injection_rate: self.rate(mutated_contracts),
            })
            .collect();
        // Sorting on the integer count is the same order as on the rate and
        // avoids comparing floats.
        rows.sort_by(|a, b| b.mutated_contracts.cmp(&a.mutated_contracts).then(a.operator.cmp(&b.operator)));
        rows
    }

    pub fn row(&self, op: OperatorId) -> Option<OperatorRow> {
        self.rows().into_iter().find(|r| r.operator == op)
    }

    pub fn total_mutants(&self) -> usize {
        self.per_operator.values().map(|c| c.1).sum()
    }

    /// Mean of the per-operator injection rates (the average a results
    /// table reports under its operator rows).
    pub fn average_injection_rate(&self) -> f64 {
        if self.per_operator.is_empty() {
            return 0.0;
        }
        let sum: f64 = self.per_operator.values().map(|c| self.rate(c.0)).sum();
        sum / self.per_operator.len() as f64
    }

    /// `operator,mutated_contracts,mutants,injection_rate`, rows by rate,
    /// then a `TOTAL` row.
    pub fn write_csv(&self, path: &Path) -> Result<(), CampaignError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["operator", "mutated_contracts", "mutants", "injection_rate"])?;
        for r in self.rows() {
            w.write_record([
                r.operator.to_string(),
                r.mutated_contracts.to_string(),
                r.mutants.to_string(),
                format!("{:.4}", r.injection_rate),
            ])?;
        }
        w.write_record([
            "TOTAL".to_string(),
            self.mutated_any.to_string(),
            self.total_mutants().to_string(),
            format!("{:.4}", self.average_injection_rate()),
        ])?;
        w.flush().map_err(|source| CampaignError::Write { path: path.to_path_buf(), source })
    }
}

/// Fixed-width table for terminals, one row per operator plus totals and
/// the corpus breakdown.
impl fmt::Display for CampaignStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:>17} {:>9} {:>14}", "operator", "mutated_contracts", "mutants", "injection_rate")?;
        for r in self.rows() {
            writeln!(
                f,
                "{:<8} {:>17} {:>9} {:>13.2}%",
                r.operator.as_str(),
                r.mutated_contracts,
                r.mutants,
                r.injection_rate * 100.0
            )?;
        }
        writeln!(
            f,
            "{:<8} {:>17} {:>9} {:>13.2}%",
            "TOTAL",
            self.mutated_any,
            self.total_mutants(),
            self.average_injection_rate() * 100.0
        )?;
        write!(
            f,
            "corpus {}  parsed {}  skipped_invalid {}  no_pattern {}  quarantined {}",
            self.corpus_size(),
            self.parsed,
            self.skipped_invalid,
            self.no_pattern,
            self.quarantined
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sites(pairs: &[(OperatorId, usize)]) -> BTreeMap<OperatorId, usize> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn empty_corpus_is_all_zero() {
        let s = CampaignStats::new(OperatorId::ALL);
        assert!(s.rows().iter().all(|r| r.mutants == 0 && r.injection_rate == 0.0));
        assert_eq!(s.total_mutants(), 0);
        assert_eq!(s.average_injection_rate(), 0.0);
    }

    #[test]
    fn rates_and_ordering() {
        let mut s = CampaignStats::new([OperatorId::TX, OperatorId::UR, OperatorId::DTU]);
        s.record_parsed(&sites(&[(OperatorId::TX, 2), (OperatorId::UR, 1), (OperatorId::DTU, 0)]));
        s.record_parsed(&sites(&[(OperatorId::TX, 0), (OperatorId::UR, 3), (OperatorId::DTU, 0)]));
        s.record_parsed(&sites(&[(OperatorId::TX, 0), (OperatorId::UR, 0), (OperatorId::DTU, 0)]));
        s.record_invalid();
        s.set_mutants([OperatorId::TX, OperatorId::TX, OperatorId::UR, OperatorId::UR, OperatorId::UR, OperatorId::UR]);
        let rows = s.rows();
        assert_eq!(
            rows.iter().map(|r| r.operator).collect::<Vec<_>>(),
            [OperatorId::UR, OperatorId::TX, OperatorId::DTU]
        );
        assert_eq!(rows[0].mutated_contracts, 2);
        assert_eq!(rows[0].mutants, 4);
        assert!((rows[0].injection_rate - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.corpus_size(), 4);
        assert_eq!(s.no_pattern, 1);
        assert_eq!(s.mutated_any, 2);
        assert!((s.average_injection_rate() - (2.0 / 3.0 + 1.0 / 3.0) / 3.0).abs() < 1e-12);
    }
}
