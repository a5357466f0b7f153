//! Parse a contract, walk its syntax tree and query it.
//!
//!     cargo run --example parse_contract [FILE.sol]

use vulnseed::syntax::{find_nodes, parse, scope_identifiers, NodeKind, SourceFile};

const WALLET: &str = r#"pragma solidity ^0.4.24;

contract Wallet {
    address owner;
    mapping(address => uint) balances;

    function withdraw(uint amount) public {
        require(msg.sender == owner);
        if (!msg.sender.send(amount)) {
            revert();
        }
        balances[msg.sender] -= amount;
    }
}
"#;

fn main() {
    let file = match std::env::args().nth(1) {
        Some(path) => SourceFile::read(&path).unwrap_or_else(|e| panic!("{path}: {e}")),
        None => SourceFile::new("wallet.sol", WALLET),
    };
    let outcome = parse(&file);
    for d in &outcome.diagnostics {
        println!("diagnostic {}: {d}", file.path().display());
    }
    let Some(tree) = outcome.into_tree() else {
        println!("{} does not parse", file.path().display());
        return;
    };

    // Every contract and function, with the line it starts on.
    for node in tree.preorder() {
        if matches!(node.kind(), NodeKind::ContractDef | NodeKind::FunctionDef) {
            let line = file.line_of(node.span().start);
            println!("{:>4}  {:?} {}", line, node.kind(), node.name().unwrap_or("<unnamed>"));
        }
    }

    // Calls, and what is in scope at each of them.
    for call in find_nodes(tree.root(), |n| n.kind() == NodeKind::FunctionCall) {
        let names: Vec<String> = scope_identifiers(call).into_iter().collect();
        println!("call at line {}: {}", file.line_of(call.span().start), call.text(file.text()));
        println!("      in scope: {}", names.join(", "));
    }

    // Broken input is reported, not panicked on.
    let broken = vulnseed::syntax::parse_str("contract C { function f( }");
    println!("broken input: {:?}, {} diagnostic(s)", broken.status(), broken.diagnostics.len());
}
