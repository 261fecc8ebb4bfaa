//! Exact arithmetic in cyclotomic fields.
//!
//! Run with `cargo run --example cyclotomic`.

use umbral::arith::{rat, root_of_unity, CycQ};

fn main() {
    // e(1/8) squared is i, and i^2 = -1
    let zeta8 = root_of_unity(&rat(1, 8));
    let i = &zeta8 * &zeta8;
    assert_eq!(i, CycQ::i());
    println!("e(1/8)^2 = {i}");
    println!("i^2 = {}", &i * &i);

    // sums of conjugate roots land back in Q(sqrt 2)
    let sqrt2 = &zeta8 + &zeta8.conj();
    println!("e(1/8) + e(-1/8) = {sqrt2}, squared = {}", &sqrt2 * &sqrt2);

    // mixing orders embeds both sides into the common field
    let w = root_of_unity(&rat(1, 3));
    let v = &w * &root_of_unity(&rat(1, 5));
    println!("e(1/3) e(1/5) = {v} (order {})", v.order());
    assert_eq!(v.simplify(), root_of_unity(&rat(8, 15)));

    let inv = v.inverse().expect("nonzero");
    assert!((&v * &inv).is_one());
    let (re, im) = v.to_complex_f64();
    println!("numerically {re:.6} + {im:.6} i");
}
