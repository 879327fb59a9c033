//! Groups scored candidates by question, computes P@1 / MRR / MAP and writes
//! a TREC run file.
//!
//!     cargo run --example rank_and_evaluate

use ctrn::metrics::{group_by_query, write_trec_run, MetricSet};

fn main() -> ctrn::Result<()> {
    // (query, score, label) as produced by scoring a candidate list
    let rows = [
        ("q1", 0.91, 1),
        ("q1", 0.40, 0),
        ("q1", 0.12, 0),
        ("q2", 0.70, 0),
        ("q2", 0.65, 1),
        ("q2", 0.30, 1),
        ("q3", 0.20, 0),
        ("q3", 0.10, 0),
    ];
    let groups = group_by_query(rows.iter().copied())?;
    for g in &groups {
        println!("{}: ranked labels {:?}", g.query_id, g.ranked_labels());
    }
    // q3 has no relevant answer and contributes zero to every metric.
    println!("{}", MetricSet::compute(&groups)?);

    println!("\nrun file:");
    let mut out = std::io::stdout().lock();
    write_trec_run(&mut out, &groups, "example")?;
    Ok(())
}
