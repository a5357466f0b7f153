//! Recall and false-negative rate per operator, truncated to three
//! decimals, sorted by recall.
//!
//!     cargo run --example score_table

use vulnseed::detection::{format_ratio, ScoreRow, ScoreTable};
use vulnseed::operators::OperatorId;

fn main() {
    // Counts of a large analyzer evaluation.
    let table = ScoreTable::from_rows([
        ScoreRow::new(OperatorId::TX, 21765, 42937),
        ScoreRow::new(OperatorId::DTU, 15, 134),
        ScoreRow::new(OperatorId::UC, 4876, 0),
        ScoreRow::new(OperatorId::CL, 45261, 10563),
        ScoreRow::new(OperatorId::UR, 124858, 81184),
        ScoreRow::new(OperatorId::US, 3570, 0),
    ]);
    println!("{table}\n");

    // Truncation, not rounding: 134/149 = 0.89932... prints as 0.899, and
    // 10563/55824 = 0.18921... as 0.189.
    println!("{} {} {}", format_ratio(134, 149), format_ratio(2, 3), format_ratio(0, 0));

    let dir = tempfile::tempdir().expect("temporary directory");
    let path = dir.path().join("scores.csv");
    table.write_csv(&path).expect("CSV is writable");
    print!("\n{}", std::fs::read_to_string(&path).expect("CSV was just written"));
}
