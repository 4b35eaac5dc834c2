//! Operation counts of the three products and four SVD variants on cubes.
//!
//! Run with `cargo run --example op_counts`.

use wten::baselines::{svd_op_count, SvdKind};
use wten::{op_count, ProductKind};

fn main() -> wten::Result<()> {
    println!("{:>6} {:>24} {:>24} {:>24}", "p", "m", "t", "w");
    for e in 1..=10 {
        let p = 1u64 << e;
        let count = |k| op_count(k, p, p, p, p).map(|r| r.count);
        println!(
            "2^{e:<4} {:>24} {:>24} {:>24}",
            count(ProductKind::M)?,
            count(ProductKind::T)?,
            count(ProductKind::W)?
        );
    }

    println!();
    println!(
        "{:>6} {:>20} {:>20} {:>20} {:>20}",
        "p", "t-svd", "m-svd", "w-svd", "sp-w-svd"
    );
    for p in [64u64, 256, 1024] {
        let row: Vec<String> = [SvdKind::TSvd, SvdKind::MSvd, SvdKind::WSvd, SvdKind::SpWSvd]
            .into_iter()
            .map(|k| format!("{:>20}", svd_op_count(k, p)))
            .collect();
        println!("{p:>6} {}", row.join(" "));
    }
    Ok(())
}
