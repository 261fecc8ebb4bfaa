//! Theta decomposition and the Eichler-Zagier operators at half-integral index.
//!
//! Run with `cargo run --example eichler_zagier`.

use umbral::arith::HalfInt;
use umbral::jacobi::{
    exact_divisor_map, exact_divisors, ez_operator, mtilde, omega_matrix, shift_safe_theta_window, theta_decompose,
};
use umbral::special::{theta_mr, ThetaIndex};

fn main() -> umbral::Result<()> {
    let m = HalfInt::from_num2(7);
    let mt = mtilde(m);
    println!("m = {m}, mtilde = {mt}, exact divisors {:?}", exact_divisors(mt));
    let map = exact_divisor_map(mt);
    for n in exact_divisors(mt) {
        println!("  a({n}) = {} mod {}", map.get(n).expect("listed"), 2 * mt);
    }

    for n in exact_divisors(mt) {
        let omega = omega_matrix(m, n)?;
        println!("Omega_{m}({n}) on labels {:?}:", omega.labels.iter().map(|r| r.to_string()).collect::<Vec<_>>());
        for row in &omega.entries {
            println!("  {row:?}");
        }
    }

    // W_m(7) sends theta_(7/2, 1/2) to a single theta function
    let w = shift_safe_theta_window(m, 4);
    let phi = theta_mr(ThetaIndex::new(m, HalfInt::from_num2(1))?, w);
    let image = ez_operator(&phi, m, 7)?;
    let coeffs = theta_decompose(&image, m)?;
    for (r, h) in &coeffs.h {
        if !h.is_zero() {
            println!("theta_(7/2,1/2) | W(7) has component {h} at r = {r}");
        }
    }
    Ok(())
}
