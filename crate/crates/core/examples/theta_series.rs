//! Expansions of eta, theta1, theta2 and the index-m theta functions, and the
//! sign of the triple product identity.
//!
//! Run with `cargo run --example theta_series`.

use umbral::arith::{HalfInt, QExp};
use umbral::series::Window;
use umbral::special::{eta, theta1, theta2, theta_mr, triple_product_sign, ThetaIndex};

fn main() -> umbral::Result<()> {
    // pentagonal numbers: eta = q^(1/24) (1 - q - q^2 + q^5 + q^7 - ...)
    println!("eta = {}", eta(QExp::int(8)));

    let w = Window::target(QExp::int(2), HalfInt::int(-6));
    println!("theta1 = {}", theta1(w));
    println!("theta2 = {}", theta2(w));

    let idx = ThetaIndex::new(HalfInt::from_num2(5), HalfInt::from_num2(1))?;
    let w = Window::target(QExp::int(3), HalfInt::int(-20));
    println!("theta_(5/2,1/2) = {}", theta_mr(idx, w));

    let sign = triple_product_sign(Window::target(QExp::new(161, 8), HalfInt::int(-40)))?;
    println!("product = {sign} * sum through q^20");
    Ok(())
}
