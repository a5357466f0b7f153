//! Read analyzer findings reports: a single-file object or an array of
//! per-file objects, each finding a detector name and 1-based lines.
//!
//!     cargo run --example ingest_reports [REPORT.json]

use std::path::Path;

use vulnseed::detection::{ingest_report, parse_report};

const SINGLE: &str = r#"{"file": "bank.sol", "findings": [
    {"detector": "unchecked-send", "lines": [14]},
    {"detector": "tx-origin", "lines": [9, 10]}
]}"#;

const MULTI: &str = r#"[
    {"file": "b.sol", "findings": [{"detector": "calls-loop", "lines": [22]}]},
    {"file": "a.sol", "findings": []}
]"#;

fn main() {
    if let Some(path) = std::env::args().nth(1) {
        match ingest_report(Path::new(&path)) {
            Ok(findings) => findings.iter().for_each(|f| println!("{f:?}")),
            Err(e) => println!("{e}"),
        }
        return;
    }
    for (name, text) in [("single.json", SINGLE), ("multi.json", MULTI)] {
        println!("== {name}");
        for f in parse_report(text, Path::new(name)).expect("well-formed report") {
            println!("{:<16} {:<10} {:?}", f.detector, f.file.display(), f.lines);
        }
    }
    // Problems name the offending report.
    for bad in [r#"{"file": "a.sol"}"#, r#"{"file": "a.sol", "findings": [{"detector": "x", "lines": [0]}]}"#] {
        println!("{}", parse_report(bad, Path::new("reports/bad.json")).unwrap_err());
    }
}
