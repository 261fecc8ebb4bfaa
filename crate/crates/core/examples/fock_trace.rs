//! A twisted Fock-space trace computed twice: as an infinite product and by
//! enumerating occupation states.
//!
//! Run with `cargo run --release --example fock_trace`.

use std::time::Instant;

use umbral::arith::{HalfInt, QExp};
use umbral::fock::{trace_by_enumeration, trace_by_product, DEFAULT_BUDGET};
use umbral::series::Window;
use umbral::umbral::{lambency, trace_spec};

fn main() -> umbral::Result<()> {
    let data = lambency("14+7")?;
    let w = Window::target(QExp::int(2), HalfInt::from_num2(-21));
    for class in ["1A", "3A"] {
        let spec = trace_spec(&data, data.class(class)?);
        let product = trace_by_product(&spec, w)?;
        let t = Instant::now();
        let states = trace_by_enumeration(&spec, w, DEFAULT_BUDGET)?;
        println!(
            "{} {class}: {} terms, routes agree = {} ({:.2?} to enumerate)",
            data.label,
            product.len(),
            product.agrees_with(&states),
            t.elapsed()
        );
    }
    let spec = trace_spec(&data, data.identity());
    println!("q^0 slice of the 1A trace:");
    let t = trace_by_product(&spec, Window::target(QExp::int(0), HalfInt::from_num2(-21)))?;
    println!("{t}");
    Ok(())
}
