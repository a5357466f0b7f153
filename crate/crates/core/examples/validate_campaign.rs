//! Check a campaign after the fact: every mutant re-parses, matches its
//! log entry and is exactly what its operator produces. A tampered mutant
//! is caught.
//!
//!     cargo run --example validate_campaign

use std::fs;
use std::path::PathBuf;

use vulnseed::campaign::{read_log, run_campaign, validate_mutants};
use vulnseed::cli::render_validation;
use vulnseed::operators::OperatorConfig;

fn main() {
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus");
    let out = tempfile::tempdir().expect("temporary directory");
    run_campaign(&corpus, &OperatorConfig::default(), out.path(), 4).expect("campaign runs");

    let report = validate_mutants(out.path(), None).expect("campaign validates");
    println!("{}\n", render_validation(&report));

    // Hand-edit one mutant; the pattern-adherence step notices.
    let victim = &read_log(out.path()).expect("log exists")[0];
    let path = out.path().join(&victim.output_path);
    let text = fs::read_to_string(&path).expect("mutant exists");
    fs::write(&path, text.replacen("pragma", "// tampered\npragma", 1)).expect("mutant is writable");

    let report = validate_mutants(out.path(), None).expect("campaign validates");
    println!("{}", render_validation(&report));
    for m in report.failed() {
        println!("{}: {}", m.id, m.problems.join("; "));
    }

    // An optional compiler check runs per mutant; `true` accepts everything.
    let report = validate_mutants(out.path(), Some("true {input}")).expect("campaign validates");
    println!("\ncompile step: {:?}", report.compile);
}
