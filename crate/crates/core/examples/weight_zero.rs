//! The weight zero quotient of psi_1A: its eta factors cancel, its y-support
//! is finite on each q-slice, and it obeys the elliptic law at index m + 1/2.
//!
//! Run with `cargo run --release --example weight_zero`.

use umbral::arith::{HalfInt, QExp};
use umbral::umbral::{all_lambencies, weight0_expr, weight0_signature};

fn main() -> umbral::Result<()> {
    for data in all_lambencies() {
        let (support, pairs) = weight0_signature(&data, QExp::int(3), (HalfInt::int(-30), HalfInt::int(-45)))?;
        println!("{}: {}", data.label, weight0_expr(&data));
        for (q, lo, hi) in &support {
            println!("  q^{q}: y^{lo} .. y^{hi}");
        }
        println!("  {pairs} coefficient pairs checked at index {}", data.index() + HalfInt::from_num2(1));
    }
    Ok(())
}
