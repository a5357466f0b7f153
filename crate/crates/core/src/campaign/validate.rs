//! Post-hoc checks over a finished campaign: every mutant re-parses, its
//! log record agrees with the actual file difference, its anchor still
//! satisfies the operator's predicate, and (optionally) it compiles.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Stdio};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mutant_id, mutant_path, read_log, write_file, CampaignError, Manifest, Mutant, VALIDATION_FILE};
use crate::linediff::LineDiff;
use crate::operators::{match_sites, mutate, OperatorConfig};
use crate::syntax::{parse, parse_str, SourceFile, SyntaxTree};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepSummary {
    pub checked: usize,
    pub failed: usize,
}

impl StepSummary {
    fn record(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantValidation {
    pub id: String,
    pub reparse: bool,
    pub log_cross_check: bool,
    pub pattern_adherence: bool,
    /// Exit status of the compile command was zero; absent without one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compile: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub problems: Vec<String>,
}

impl MutantValidation {
    /// Passed the three structural checks (compilation is reported apart).
    pub fn is_clean(&self) -> bool {
        self.reparse && self.log_cross_check && self.pattern_adherence
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub total: usize,
    pub reparse: StepSummary,
    pub log_cross_check: StepSummary,
    pub pattern_adherence: StepSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compile: Option<StepSummary>,
    /// Share of mutants failing at least one structural check.
    pub failure_rate: f64,
    pub mutants: Vec<MutantValidation>,
}

impl ValidationReport {
    pub fn structural_failures(&self) -> usize {
        self.mutants.iter().filter(|m| !m.is_clean()).count()
    }

    pub fn failed(&self) -> impl Iterator<Item = &MutantValidation> {
        self.mutants.iter().filter(|m| !m.is_clean())
    }
}

/// The original file of a group of mutants, parsed once.
struct Original {
    file: SourceFile,
    tree: Option<SyntaxTree>,
}

fn load_original(corpus: &Path, rel: &Path) -> Option<Original> {
    let file = SourceFile::read(corpus.join(rel)).ok()?;
    let tree = parse(&file).into_tree();
    Some(Original { file: SourceFile::new(rel, file.text()), tree })
}

/// Does `snippet` occur in `text` starting on 1-based `line`?
fn occurs_on_line(file: &SourceFile, line: usize, snippet: &str) -> bool {
    let Some(start) = file.line_start(line) else { return false };
    let end = file.line_start(line + 1).unwrap_or(file.len());
    file.text()[start..].match_indices(snippet).next().is_some_and(|(i, _)| start + i < end)
}

fn check_log(m: &Mutant, original: &Original, mutant_text: &str, problems: &mut Vec<String>) -> bool {
    let mut ok = true;
    let ordinal = m.ordinal();
    if ordinal.map(|o| mutant_id(&m.source_path, m.operator, o)) != Some(m.id.clone()) {
        problems.push(format!("id {} does not name {} / {}", m.id, m.source_path.display(), m.operator));
        ok = false;
    }
    if m.output_path != mutant_path(&m.source_path, m.operator, &m.id) {
        problems.push(format!("output path {} is not the layout path", m.output_path.display()));
        ok = false;
    }
    let diff = LineDiff::new(original.file.text(), mutant_text);
    if !diff.changed_old_lines().contains(&m.line) {
        problems.push(format!("logged line {} is not among the changed lines {:?}", m.line, diff.changed_old_lines()));
        ok = false;
    }
    if !occurs_on_line(&original.file, m.line, &m.original_snippet) {
        problems.push(format!("original snippet does not start on line {}", m.line));
        ok = false;
    }
    if !mutant_text.contains(&m.mutated_snippet) {
        problems.push("mutated snippet not found in the mutant".to_string());
        ok = false;
    }
    ok
}

fn check_pattern(
    m: &Mutant,
    original: &Original,
    mutant_text: &str,
    cfg: &OperatorConfig,
    problems: &mut Vec<String>,
) -> bool {
    let Some(tree) = &original.tree else {
        problems.push("original no longer parses".to_string());
        return false;
    };
    let sites = match_sites(m.operator, &original.file, tree, cfg);
    let Some(site) = m.ordinal().and_then(|o| sites.get(o)) else {
        problems.push(format!("{} has no site #{:?} (found {})", m.operator, m.ordinal(), sites.len()));
        return false;
    };
    if site.line != m.line || site.original_snippet != m.original_snippet {
        problems.push(format!("site #{} is at line {}, log says {}", site.ordinal, site.line, m.line));
        return false;
    }
    match mutate(site, &original.file, tree, cfg) {
        Ok(again) if again.text == mutant_text => true,
        Ok(_) => {
            problems.push("re-applying the operator gives a different mutant".to_string());
            false
        }
        Err(e) => {
            problems.push(format!("re-applying the operator fails: {e}"));
            false
        }
    }
}

/// Substitute each `{key}` placeholder with its shell-quoted path, appending
/// the first path when the template has no placeholder at all.
pub(crate) fn command_line(template: &str, placeholders: &[(&str, &Path)]) -> String {
    let mut cmd = template.to_string();
    let mut used = false;
    for (key, path) in placeholders {
        let quoted = shlex::try_quote(&path.to_string_lossy()).map(|q| q.into_owned()).unwrap_or_default();
        let pattern = format!("{{{key}}}");
        if cmd.contains(&pattern) {
            cmd = cmd.replace(&pattern, &quoted);
            used = true;
        }
    }
    if !used {
        if let Some((_, path)) = placeholders.first() {
            let quoted = shlex::try_quote(&path.to_string_lossy()).map(|q| q.into_owned()).unwrap_or_default();
            cmd = format!("{cmd} {quoted}");
        }
    }
    cmd
}

pub(crate) fn run_shell(cmd: &str) -> bool {
    Command::new("sh")
        .arg("-c")
        .arg(cmd)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .is_ok_and(|s| s.success())
}

fn validate_one(
    m: &Mutant,
    out_dir: &Path,
    original: Option<&Original>,
    cfg: &OperatorConfig,
    compile_cmd: Option<&str>,
) -> MutantValidation {
    let mut problems = Vec::new();
    let mutant_file = out_dir.join(&m.output_path);
    let text = fs::read_to_string(&mutant_file);
    let reparse = match &text {
        Ok(t) => {
            let outcome = parse_str(t);
            if let Some(d) = outcome.diagnostics.first() {
                problems.push(format!("mutant does not parse: {} at {}", d.message, d.span));
            }
            outcome.is_parsed()
        }
        Err(e) => {
            problems.push(format!("cannot read {}: {e}", mutant_file.display()));
            false
        }
    };
    let (log_cross_check, pattern_adherence) = match (original, &text) {
        (Some(orig), Ok(t)) => (check_log(m, orig, t, &mut problems), check_pattern(m, orig, t, cfg, &mut problems)),
        (None, _) => {
            problems.push(format!("original {} is missing", m.source_path.display()));
            (false, false)
        }
        (_, Err(_)) => (false, false),
    };
    let compile = compile_cmd.map(|c| run_shell(&command_line(c, &[("input", &mutant_file)])));
    MutantValidation { id: m.id.clone(), reparse, log_cross_check, pattern_adherence, compile, problems }
}

/// Validate every mutant listed in `<out>/mutations.jsonl` and write
/// `<out>/validation.json`. A missing log or manifest is fatal.
pub fn validate_mutants(out_dir: &Path, compile_cmd: Option<&str>) -> Result<ValidationReport, CampaignError> {
    let manifest = Manifest::read(out_dir)?;
    let mutants = read_log(out_dir)?;

    let mut by_source: BTreeMap<&Path, Vec<usize>> = BTreeMap::new();
    for (k, m) in mutants.iter().enumerate() {
        by_source.entry(m.source_path.as_path()).or_default().push(k);
    }
    let groups: Vec<(&Path, Vec<usize>)> = by_source.into_iter().collect();
    let mut checked: Vec<(usize, MutantValidation)> = groups
        .par_iter()
        .flat_map_iter(|(rel, indices)| {
            let original = load_original(&manifest.corpus, rel);
            indices
                .iter()
                .map(|&k| (k, validate_one(&mutants[k], out_dir, original.as_ref(), &manifest.config, compile_cmd)))
                .collect::<Vec<_>>()
        })
        .collect();
    checked.sort_by_key(|(k, _)| *k);

    let mut report = ValidationReport { total: mutants.len(), ..ValidationReport::default() };
    if compile_cmd.is_some() {
        report.compile = Some(StepSummary::default());
    }
    for (_, v) in checked {
        report.reparse.record(v.reparse);
        report.log_cross_check.record(v.log_cross_check);
        report.pattern_adherence.record(v.pattern_adherence);
        if let (Some(summary), Some(ok)) = (report.compile.as_mut(), v.compile) {
            summary.record(ok);
        }
        report.mutants.push(v);
    }
    if report.total > 0 {
        report.failure_rate = report.structural_failures() as f64 / report.total as f64;
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&out_dir.join(VALIDATION_FILE), format!("{json}\n").as_bytes())?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placeholder_substitution_quotes_paths() {
        let p = Path::new("/tmp/a b.sol");
        assert_eq!(command_line("solc {input}", &[("input", p)]), "solc '/tmp/a b.sol'");
        assert_eq!(command_line("solc", &[("input", p)]), "solc '/tmp/a b.sol'");
        let o = Path::new("/r/o.json");
        assert_eq!(
            command_line("an {input} > {output}", &[("input", p), ("output", o)]),
            "an '/tmp/a b.sol' > /r/o.json"
        );
    }

    #[test]
    fn snippet_line_check() {
        let f = SourceFile::new("x.sol", "a\n  msg.sender == b\nc\n");
        assert!(occurs_on_line(&f, 2, "msg.sender"));
        assert!(!occurs_on_line(&f, 1, "msg.sender"));
        assert!(!occurs_on_line(&f, 3, "msg.sender"));
    }
}
