//! Credit one mutant: compare the analyzer's findings on the original and
//! on the mutant around the injected lines.
//!
//!     cargo run --example classify_mutant

use vulnseed::campaign::Mutant;
use vulnseed::detection::{Classifier, Finding, InjectionFootprint};
use vulnseed::operators::OperatorId;

const ORIGINAL: &str = "contract C {
    address owner;
    function f() public {
        require(msg.sender == owner);
    }
}
";

const MUTANT: &str = "contract C {
    address owner;
    function f() public {
        require(tx.origin == owner);
    }
}
";

fn main() {
    let mutant = Mutant {
        id: "c-TX-0".into(),
        operator: OperatorId::TX,
        source_path: "c.sol".into(),
        output_path: "c/TX/c-TX-0.sol".into(),
        line: 4,
        original_snippet: "msg.sender".into(),
        mutated_snippet: "tx.origin".into(),
    };
    let footprint = InjectionFootprint::from_texts(ORIGINAL, MUTANT);
    println!("injected lines: {:?}", footprint.injected_lines);

    let classifier = Classifier::default();
    let original = vec![Finding::new("solc-version", "c.sol", [1])];
    let cases = [
        (
            "reported on the injected line",
            vec![Finding::new("solc-version", "c.sol", [1]), Finding::new("tx-origin", "c.sol", [4])],
        ),
        (
            "reported one line off (within tolerance)",
            vec![Finding::new("tx-origin", "c.sol", [5]), Finding::new("solc-version", "c.sol", [1])],
        ),
        ("not reported", vec![Finding::new("solc-version", "c.sol", [1])]),
        ("not reported, other detectors moved", vec![Finding::new("naming-convention", "c.sol", [2])]),
    ];
    for (label, mutated) in cases {
        let out = classifier.classify(&mutant, &footprint, Some(&original), Some(&mutated));
        println!(
            "{label:<42} {:?}  added {:?} removed {:?}",
            out.verdict, out.side_effects_added, out.side_effects_removed
        );
    }
    let failed = classifier.classify(&mutant, &footprint, Some(&original), None);
    println!("{:<42} {:?}", "no mutant report", failed.verdict);

    // Expected detectors are configurable per operator.
    let renamed =
        Classifier { detectors: classifier.detectors.clone().with(OperatorId::TX, "auth-origin"), ..classifier };
    let out =
        renamed.classify(&mutant, &footprint, Some(&original), Some(&[Finding::new("auth-origin", "c.sol", [4])]));
    println!("{:<42} {:?}", "renamed detector", out.verdict);
}
