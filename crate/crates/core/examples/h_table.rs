//! Splits psi_g into polar and finite parts, checks the residue, and prints
//! the first coefficients of each component H_(g,2s).
//!
//! Run with `cargo run --release --example h_table -- 22+11 3A`.

use umbral::arith::{HalfInt, QExp};
use umbral::suites::split_window;
use umbral::umbral::{h_antisymmetry, h_from_split, lambency, residue, split_psi};

fn main() -> umbral::Result<()> {
    let mut args = std::env::args().skip(1);
    let label = args.next().unwrap_or_else(|| "10+5".into());
    let class = args.next().unwrap_or_else(|| "1A".into());
    let data = lambency(&label)?;
    let c = data.class(&class)?;

    let res = residue(&data, c.name, QExp::int(4), (HalfInt::int(-30), HalfInt::int(-45)))?;
    println!("{} {}: chi = {}, residue at z = 0 is {res}", data.label, c.name, c.chi);

    let s = split_psi(&data, c.name, split_window(data.index()))?;
    let h = h_from_split(&data, &s);
    for (r, series) in &h {
        let terms: Vec<String> = series.terms().take(5).map(|(q, v)| format!("({v}) q^{q}")).collect();
        println!("H_{} = {} + ...", r.num2, terms.join(" + "));
    }
    match h_antisymmetry(&h) {
        Some(c) => println!("H_(-r) = ({c}) H_r"),
        None => println!("no uniform relation between H_(-r) and H_r"),
    }
    Ok(())
}
