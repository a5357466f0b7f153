//! Run all six operators over one contract and show each mutant as a diff.
//!
//!     cargo run --example seed_operators [FILE.sol]

use similar::TextDiff;
use vulnseed::operators::{match_sites, mutate, OperatorConfig, OperatorId};
use vulnseed::syntax::{parse, SourceFile};

const BANK: &str = r#"pragma solidity ^0.4.24;

contract Bank {
    address owner;
    address[] investors;
    mapping(address => uint) balances;

    modifier onlyOwner() {
        require(msg.sender == owner);
        _;
    }

    function withdraw(uint amount) public {
        require(msg.sender.send(amount));
        balances[msg.sender] -= amount;
    }

    function forward(address target, bytes data) public onlyOwner {
        require(target.call(data));
    }

    function payout() public onlyOwner {
        uint paid = this.balance / investors.length;
        investors[0].transfer(paid);
    }

    function upgrade(address lib) public onlyOwner {
        lib.delegatecall(msg.data);
    }
}
"#;

fn main() {
    let file = match std::env::args().nth(1) {
        Some(path) => SourceFile::read(&path).unwrap_or_else(|e| panic!("{path}: {e}")),
        None => SourceFile::new("bank.sol", BANK),
    };
    let tree = parse(&file).into_tree().expect("contract parses");
    let cfg = OperatorConfig::default();

    for op in OperatorId::ALL {
        let sites = match_sites(op, &file, &tree, &cfg);
        println!("== {op}: {} site(s)", sites.len());
        for site in &sites {
            let mutant = mutate(site, &file, &tree, &cfg).expect("matched sites transform");
            println!("-- {op}#{} at line {}", site.ordinal, site.line);
            let diff = TextDiff::from_lines(file.text(), &mutant.text);
            print!("{}", diff.unified_diff().context_radius(1));
        }
    }
}
