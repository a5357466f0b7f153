//! The command-line front end driven in-process: mutate, validate, diff
//! and score, exactly as `vulnseed <command> ...` would run them.
//!
//!     cargo run --example cli_pipeline

use std::path::PathBuf;

use vulnseed::cli::{run, Console};

fn vulnseed(args: &[&str]) -> i32 {
    println!("$ vulnseed {}", args.join(" "));
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    let code =
        run(std::iter::once("vulnseed").chain(args.iter().copied()), &mut Console { out: &mut out, err: &mut err });
    println!("(exit {code})\n");
    code
}

fn main() {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let corpus = fixtures.join("corpus");
    let stub = format!("sh {} {{input}}", fixtures.join("stub_analyzer.sh").display());
    let dir = tempfile::tempdir().expect("temporary directory");

    // Settings can live in a TOML file; relative paths resolve against it.
    let config = dir.path().join("campaign.toml");
    std::fs::write(
        &config,
        format!(
            "corpus_dir = {:?}\nout_dir = \"out\"\noperators = [\"TX\", \"CL\", \"US\"]\nrun_cmd = {stub:?}\n",
            corpus.display().to_string()
        ),
    )
    .expect("config is writable");
    let config = config.to_str().expect("UTF-8 path");

    vulnseed(&["mutate", "--config", config]);
    vulnseed(&["validate", "--config", config]);
    vulnseed(&["diff", "--config", config]);
    vulnseed(&["score", "--config", config, "--workers", "2"]);

    // A missing corpus is a configuration error: exit 2.
    vulnseed(&["mutate", "--corpus", "/nonexistent", "--out", dir.path().to_str().expect("UTF-8 path")]);
}
