//! Appell-Lerch sums at torsion points, their elliptic law, and the orbit
//! reduction of a torsion point to a standard representative.
//!
//! Run with `cargo run --example appell_lerch`.

use umbral::appell::{appell_lerch, elliptic_phase, mu_m0, orbit_index, reduce_to_standard, replay, TorsionPoint};
use umbral::arith::{rat, HalfInt, QExp};
use umbral::series::Window;

fn main() -> umbral::Result<()> {
    let m = HalfInt::from_num2(5);
    let w = Window::target(QExp::int(2), HalfInt::int(-12));
    println!("mu_(5/2,0) = {}", mu_m0(m, w)?);

    let s = TorsionPoint::new(rat(1, 5), rat(0, 1));
    let a = appell_lerch(m, &s, w)?;
    for (lambda, mu) in [(1, 0), (0, 1), (1, -1)] {
        let moved = appell_lerch(m, &s.translate(lambda, mu), w)?;
        let phase = elliptic_phase(m, &s, lambda, mu);
        println!(
            "s + ({lambda}, {mu}): phase {phase}, agrees = {}",
            moved.agrees_with(&a.scale(&phase))
        );
    }

    let p = TorsionPoint::new(rat(5, 12), rat(7, 12));
    let word = reduce_to_standard(&p);
    let rep = replay(&p, &word);
    println!(
        "({}, {}) lies in S_{}; {} moves reach ({}, {})",
        p.alpha,
        p.beta,
        orbit_index(&p),
        word.len(),
        rep.alpha,
        rep.beta
    );
    Ok(())
}
