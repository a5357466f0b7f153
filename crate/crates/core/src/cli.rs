//! Command-line front end: `mutate`, `validate`, `diff`, `score` and the
//! one-shot `run`.
//!
//! Settings come from flags, optionally layered over a TOML config file
//! (`--config`); flags win. Exit codes: 0 success, 1 partial failure
//! (quarantined sites, failed validation), 2 bad configuration or missing
//! input.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use thiserror::Error;

use crate::campaign::{run_campaign, validate_mutants, CampaignError, ValidationReport};
use crate::detection::{
    diff_campaign, score_campaign, Classifier, DetectionError, DetectorMap, DiffOptions, DiffSummary,
};
use crate::operators::{OperatorConfig, OperatorId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_FATAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "vulnseed",
    version,
    about = "Seed vulnerabilities into Solidity contracts and score analyzers on them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inject every enabled operator at every site of every corpus file.
    Mutate(Flags),
    /// Re-check a campaign: re-parse, log cross-check, pattern adherence.
    Validate(Flags),
    /// Classify each mutant against analyzer reports (running the analyzer
    /// first with --run-cmd) and write scores.
    Diff(Flags),
    /// Rebuild the score tables from recorded outcomes.
    Score(Flags),
    /// mutate, validate, diff and score in one go.
    Run(Flags),
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// TOML file with defaults for any of the other flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory of .sol files to mutate.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Campaign output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated operators to enable (UC,US,TX,UR,CL,DTU).
    #[arg(long, value_delimiter = ',')]
    pub operators: Option<Vec<OperatorId>>,
    /// Iterations of the loop CL wraps around a call.
    #[arg(long)]
    pub cl_loop_bound: Option<u64>,
    /// Do not let CL wrap statements already inside a loop.
    #[arg(long)]
    pub cl_skip_inside_loop: bool,
    /// Worker threads for matching, analysis and ingestion.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Lines of slack when matching findings to injected lines.
    #[arg(long)]
    pub line_tolerance: Option<usize>,
    /// Analyzer command template with {input} and {output} placeholders.
    #[arg(long)]
    pub run_cmd: Option<String>,
    /// Compiler command template with an {input} placeholder, run per mutant
    /// during validation.
    #[arg(long)]
    pub compile_cmd: Option<String>,
    /// Findings reports directory (default: <out>/reports).
    #[arg(long)]
    pub reports: Option<PathBuf>,
}

/// The config file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub corpus_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub operators: Option<Vec<OperatorId>>,
    pub cl_loop_bound: Option<u64>,
    pub cl_skip_inside_loop: Option<bool>,
    pub workers: Option<usize>,
    pub line_tolerance: Option<usize>,
    pub run_cmd: Option<String>,
    pub compile_cmd: Option<String>,
    pub reports_dir: Option<PathBuf>,
    pub detectors: Option<DetectorMap>,
}

/// Settings after merging the config file with flags.
#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub corpus_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub operators: OperatorConfig,
    pub workers: usize,
    pub line_tolerance: usize,
    pub run_cmd: Option<String>,
    pub compile_cmd: Option<String>,
    pub reports_dir: Option<PathBuf>,
    pub detectors: DetectorMap,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {}: {source}", path.display())]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("{0}")]
    Invalid(String),
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl CampaignConfig {
    /// Merge `flags` over the config file they name. Relative paths in the
    /// file are taken relative to the file's directory.
    pub fn resolve(flags: &Flags) -> Result<CampaignConfig, ConfigError> {
        let (file, base) = match &flags.config {
            Some(path) => {
                let text =
                    fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.clone(), source })?;
                let file: ConfigFile =
                    toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.clone(), source })?;
                (file, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };
        let rebase = |p: Option<PathBuf>| p.map(|p| if p.is_absolute() { p } else { base.join(p) });

        let mut operators = OperatorConfig::default();
        if let Some(ops) = flags.operators.clone().or(file.operators) {
            operators.enabled = ops.into_iter().collect();
        }
        if let Some(bound) = flags.cl_loop_bound.or(file.cl_loop_bound) {
            operators.cl_loop_bound = bound;
        }
        operators.cl_skip_inside_loop = flags.cl_skip_inside_loop || file.cl_skip_inside_loop.unwrap_or(false);

        let cfg = CampaignConfig {
            corpus_dir: flags.corpus.clone().or(rebase(file.corpus_dir)),
            out_dir: flags.out.clone().or(rebase(file.out_dir)),
            operators,
            workers: flags.workers.or(file.workers).unwrap_or_else(default_workers),
            line_tolerance: flags.line_tolerance.or(file.line_tolerance).unwrap_or(1),
            run_cmd: flags.run_cmd.clone().or(file.run_cmd),
            compile_cmd: flags.compile_cmd.clone().or(file.compile_cmd),
            reports_dir: flags.reports.clone().or(rebase(file.reports_dir)),
            detectors: file.detectors.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.workers == 0 {
            return Err(ConfigError::Invalid("workers must be at least 1".into()));
        }
        self.operators.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    fn corpus(&self) -> Result<&Path, ConfigError> {
        self.corpus_dir.as_deref().ok_or_else(|| ConfigError::Invalid("--corpus is required".into()))
    }

    fn out(&self) -> Result<&Path, ConfigError> {
        self.out_dir.as_deref().ok_or_else(|| ConfigError::Invalid("--out is required".into()))
    }

    pub fn diff_options(&self) -> Result<DiffOptions, ConfigError> {
        let out = self.out()?;
        Ok(DiffOptions {
            reports_dir: self.reports_dir.clone().unwrap_or_else(|| out.join("reports")),
            run_cmd: self.run_cmd.clone(),
            classifier: Classifier { detectors: self.detectors.clone(), line_tolerance: self.line_tolerance },
            workers: self.workers,
        })
    }
}

/// Where output goes; tests capture both streams.
pub struct Console<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl Console<'_> {
    fn say(&mut self, text: &str) {
        let _ = writeln!(self.out, "{text}");
    }

    fn fail(&mut self, text: impl std::fmt::Display) {
        let _ = writeln!(self.err, "error: {text}");
    }
}

fn fatal(console: &mut Console<'_>, e: impl std::fmt::Display) -> i32 {
    console.fail(e);
    EXIT_FATAL
}

fn campaign_code(e: &CampaignError) -> i32 {
    match e {
        CampaignError::Write { .. }
        | CampaignError::Pool(_)
        | CampaignError::Csv(_)
        | CampaignError::DuplicateId { .. } => EXIT_PARTIAL,
        _ => EXIT_FATAL,
    }
}

fn detection_code(e: &DetectionError) -> i32 {
    match e {
        DetectionError::Campaign(c) => campaign_code(c),
        DetectionError::Write { .. } | DetectionError::Csv(_) | DetectionError::Pool(_) => EXIT_PARTIAL,
        _ => EXIT_FATAL,
    }
}

pub fn cmd_mutate(cfg: &CampaignConfig, console: &mut Console<'_>) -> i32 {
    let (corpus, out) = match (cfg.corpus(), cfg.out()) {
        (Ok(c), Ok(o)) => (c, o),
        (Err(e), _) | (_, Err(e)) => return fatal(console, e),
    };
    match run_campaign(corpus, &cfg.operators, out, cfg.workers) {
        Ok(stats) => {
            console.say(&stats.to_string());
            if stats.quarantined > 0 {
                console.fail(format!(
                    "{} site(s) quarantined; see {}",
                    stats.quarantined,
                    out.join(crate::campaign::MANIFEST_FILE).display()
                ));
                EXIT_PARTIAL
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let code = campaign_code(&e);
            console.fail(e);
            code
        }
    }
}

pub fn render_validation(report: &ValidationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<18} {:>8} {:>7}", "step", "checked", "failed");
    let mut steps = vec![
        ("reparse", &report.reparse),
        ("log_cross_check", &report.log_cross_check),
        ("pattern_adherence", &report.pattern_adherence),
    ];
    if let Some(compile) = &report.compile {
        steps.push(("compile", compile));
    }
    for (name, step) in steps {
        let _ = writeln!(s, "{:<18} {:>8} {:>7}", name, step.checked, step.failed);
    }
    let _ = write!(s, "mutants {}  failure_rate {:.4}", report.total, report.failure_rate);
    s
}

pub fn cmd_validate(cfg: &CampaignConfig, console: &mut Console<'_>) -> i32 {
    let out = match cfg.out() {
        Ok(o) => o,
        Err(e) => return fatal(console, e),
    };
    match validate_mutants(out, cfg.compile_cmd.as_deref()) {
        Ok(report) => {
            console.say(&render_validation(&report));
            for m in report.failed() {
                console.fail(format!("{}: {}", m.id, m.problems.join("; ")));
            }
            if report.structural_failures() == 0 {
                EXIT_OK
            } else {
                EXIT_PARTIAL
            }
        }
        Err(e) => {
            let code = campaign_code(&e);
            console.fail(e);
            code
        }
    }
}

pub fn render_scores(summary: &DiffSummary) -> String {
    let mut s = summary.table.to_string();
    if !summary.side_effects.is_empty() {
        let _ = write!(s, "\n{:<8} {:<32} {:>7} {:>7}", "operator", "side_effect", "added", "removed");
        for r in &summary.side_effects {
            let _ = write!(s, "\n{:<8} {:<32} {:>7} {:>7}", r.operator.as_str(), r.detector, r.added, r.removed);
        }
    }
    s
}

fn report_scores(result: Result<DiffSummary, DetectionError>, console: &mut Console<'_>) -> i32 {
    match result {
        Ok(summary) => {
            console.say(&render_scores(&summary));
            EXIT_OK
        }
        Err(e) => {
            let code = detection_code(&e);
            console.fail(e);
            code
        }
    }
}

pub fn cmd_diff(cfg: &CampaignConfig, console: &mut Console<'_>) -> i32 {
    let opts = match cfg.diff_options() {
        Ok(o) => o,
        Err(e) => return fatal(console, e),
    };
    report_scores(diff_campaign(cfg.out_dir.as_deref().expect("checked by diff_options"), &opts), console)
}

pub fn cmd_score(cfg: &CampaignConfig, console: &mut Console<'_>) -> i32 {
    match cfg.out() {
        Ok(out) => report_scores(score_campaign(out), console),
        Err(e) => fatal(console, e),
    }
}

pub fn cmd_run(cfg: &CampaignConfig, console: &mut Console<'_>) -> i32 {
    let mut worst = EXIT_OK;
    for step in [cmd_mutate, cmd_validate, cmd_diff] {
        let code = step(cfg, console);
        if code == EXIT_FATAL {
            return code;
        }
        worst = worst.max(code);
    }
    worst
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, console: &mut Console<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FATAL } else { EXIT_OK };
            let _ = write!(if e.use_stderr() { &mut *console.err } else { &mut *console.out }, "{}", e.render());
            return code;
        }
    };
    let (flags, cmd): (&Flags, fn(&CampaignConfig, &mut Console<'_>) -> i32) = match &cli.command {
        Command::Mutate(f) => (f, cmd_mutate),
        Command::Validate(f) => (f, cmd_validate),
        Command::Diff(f) => (f, cmd_diff),
        Command::Score(f) => (f, cmd_score),
        Command::Run(f) => (f, cmd_run),
    };
    match CampaignConfig::resolve(flags) {
        Ok(cfg) => cmd(&cfg, console),
        Err(e) => fatal(console, e),
    }
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run(std::env::args_os(), &mut Console { out: &mut out, err: &mut err })
}
