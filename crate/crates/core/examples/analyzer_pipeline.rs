//! Run an analyzer over a campaign's originals and mutants, then classify
//! and score. The bundled stub analyzer is a small awk script that stands
//! in for a real tool.
//!
//!     cargo run --example analyzer_pipeline [RUN_CMD]
//!
//! RUN_CMD is a shell template; `{input}` is the contract and `{output}`
//! the report path (stdout is the report when `{output}` is absent).

use std::path::PathBuf;

use vulnseed::campaign::run_campaign;
use vulnseed::cli::render_scores;
use vulnseed::detection::{diff_campaign, DiffOptions, Verdict};
use vulnseed::operators::OperatorConfig;

fn main() {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let run_cmd = std::env::args()
        .nth(1)
        .unwrap_or_else(|| format!("sh {} {{input}}", fixtures.join("stub_analyzer.sh").display()));

    let out = tempfile::tempdir().expect("temporary directory");
    run_campaign(&fixtures.join("corpus"), &OperatorConfig::default(), out.path(), 4).expect("campaign runs");

    let mut opts = DiffOptions::new(out.path().join("reports"));
    opts.run_cmd = Some(run_cmd);
    opts.workers = 4;
    let summary = diff_campaign(out.path(), &opts).unwrap_or_else(|e| panic!("{e}"));
    println!("{}\n", render_scores(&summary));

    println!("missed mutants:");
    for o in summary.outcomes.iter().filter(|o| o.verdict == Verdict::FN).take(8) {
        println!("  {:<36} injected at {:?}", o.mutant_id, o.injected_lines);
    }
}
