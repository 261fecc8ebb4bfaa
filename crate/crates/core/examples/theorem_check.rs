//! Compares the eta/theta closed forms of psi_g with the Fock-space product
//! for every class of every lambency and reports how they differ.
//!
//! Run with `cargo run --release --example theorem_check`.

use umbral::arith::{HalfInt, QExp};
use umbral::series::Window;
use umbral::umbral::{all_lambencies, verify_theorem};

fn main() -> umbral::Result<()> {
    let w = Window::target(QExp::int(4), HalfInt::int(-30));
    for data in all_lambencies() {
        let report = verify_theorem(&data, w)?;
        for check in &report.checks {
            let status = if check.passed() { "agree" } else { "differ" };
            let ratio = check
                .ratio
                .as_ref()
                .map(|r| format!(", closed/product = ({}) q^{} y^{}", r.coeff, r.qexp, r.yexp))
                .unwrap_or_default();
            println!("{} {}: {status}{ratio}", data.label, check.class);
        }
    }
    Ok(())
}
