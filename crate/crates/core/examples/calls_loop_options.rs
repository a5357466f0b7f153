//! The knobs of the calls-in-loop operator: loop bound, loop-variable
//! naming, and skipping calls that already sit inside a loop.
//!
//!     cargo run --example calls_loop_options

use vulnseed::operators::{match_sites, mutate, OperatorConfig, OperatorId};
use vulnseed::syntax::{parse, SourceFile};

const PAYOUT: &str = r#"contract Payout {
    address payable[] payees;
    uint i;

    function one(uint i1) public {
        payees[0].transfer(i1);
    }

    function all() public {
        for (uint k = 0; k < payees.length; k++) {
            payees[k].transfer(1);
        }
    }
}
"#;

fn show(label: &str, cfg: &OperatorConfig) {
    let file = SourceFile::new("payout.sol", PAYOUT);
    let tree = parse(&file).into_tree().expect("contract parses");
    let sites = match_sites(OperatorId::CL, &file, &tree, cfg);
    println!("== {label}: {} site(s)", sites.len());
    for site in &sites {
        let mutant = mutate(site, &file, &tree, cfg).expect("matched sites transform");
        println!("line {}:\n        {}", site.line, mutant.mutated_snippet);
    }
}

fn main() {
    // `i` and `i1` are taken in `one`, so its loop counts with `i2`.
    show("default bound", &OperatorConfig::default());
    show("bound 5", &OperatorConfig::default().with_loop_bound(5));
    show("skip calls already in a loop", &OperatorConfig { cl_skip_inside_loop: true, ..OperatorConfig::default() });
}
