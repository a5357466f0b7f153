//! Mutate a whole corpus: one mutant per operator site, written to a
//! deterministic layout with a JSONL log and an injection table.
//!
//!     cargo run --example run_campaign [CORPUS_DIR [OUT_DIR]]

use std::path::PathBuf;

use vulnseed::campaign::{read_log, run_campaign, Manifest, LOG_FILE, STATS_FILE};
use vulnseed::operators::OperatorConfig;

fn main() {
    let mut args = std::env::args().skip(1);
    let corpus = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus"));
    let scratch = tempfile::tempdir().expect("temporary directory");
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| scratch.path().to_path_buf());

    let stats = run_campaign(&corpus, &OperatorConfig::default(), &out, 4).unwrap_or_else(|e| panic!("{e}"));
    println!("{stats}");

    let log = read_log(&out).expect("log was just written");
    println!("\nfirst entries of {LOG_FILE}:");
    for m in log.iter().take(5) {
        println!("  {:<36} line {:>3}  {}", m.id, m.line, m.output_path.display());
    }
    let manifest = Manifest::read(&out).expect("manifest was just written");
    println!("\nskipped as invalid: {:?}", manifest.skipped_invalid);
    println!("without any site: {}", manifest.no_pattern);
    println!("\n{STATS_FILE}:\n{}", std::fs::read_to_string(out.join(STATS_FILE)).expect("stats were just written"));
}
