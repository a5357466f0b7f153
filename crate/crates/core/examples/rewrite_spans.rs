//! Span edits: apply non-overlapping replacements and insertions, track
//! where an offset moves, and pick identifiers that do not collide.
//!
//!     cargo run --example rewrite_spans

use std::collections::BTreeSet;

use vulnseed::rewrite::{apply, fresh_name, Edit, EditSet};
use vulnseed::syntax::Span;

fn main() {
    let text = "require(msg.sender == owner);\n";
    let sender = Span::new(8, 18);
    assert_eq!(&text[sender.range()], "msg.sender");

    // Replace `msg.sender` and prepend a comment line.
    let edits = EditSet::new("demo", vec![Edit::replace(sender, "tx.origin"), Edit::insert(0, "// seeded\n")])
        .expect("edits do not overlap");
    let out = apply(text, &edits).expect("edits fit the text");
    print!("{out}");

    // `owner` started at byte 22; after both edits it starts here:
    let moved = edits.map_offset(22);
    println!("`owner` moved from 22 to {moved}: {:?}", &out[moved..moved + 5]);

    // Overlapping edits are rejected instead of producing garbage.
    let clash = EditSet::new("clash", vec![Edit::replace(Span::new(0, 10), "a"), Edit::replace(Span::new(5, 12), "b")]);
    println!("overlap: {}", clash.unwrap_err());

    // Fresh names take the smallest free numeric suffix.
    let taken: BTreeSet<String> = ["i", "i1", "i2", "delegate"].iter().map(|s| s.to_string()).collect();
    println!("loop variable: {}", fresh_name("i", &taken));
    println!("delegate variable: {}", fresh_name("delegate", &taken));
    println!("unused name: {}", fresh_name("k", &taken));
}
