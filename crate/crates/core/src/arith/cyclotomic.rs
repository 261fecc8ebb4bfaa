//! Elements of `Q(zeta_N)` in the power basis `1, zeta, ..., zeta^(phi(N)-1)`,
//! always fully reduced modulo the cyclotomic polynomial `Phi_N`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{frac, to_i64, Rational};
use crate::{Error, Result};

/// `x^k mod Phi_N` for every `0 <= k < N`, as integer vectors of length `phi(N)`.
struct PowerTable {
    phi: usize,
    powers: Vec<Vec<i64>>,
}

fn poly_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn table_cache() -> &'static Mutex<HashMap<u32, Arc<PowerTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<PowerTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Coefficients of `Phi_n`, lowest degree first, by iterated exact division
/// of `x^n - 1` by `Phi_d` for the proper divisors `d` of `n`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    if let Some(p) = poly_cache().lock().unwrap().get(&n) {
        return p.as_ref().clone();
    }
    let mut num: Vec<i128> = vec![0; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div: Vec<i128> = cyclotomic_polynomial(d).into_iter().map(i128::from).collect();
            num = divide_monic(&num, &div);
        }
    }
    let out: Vec<i64> = num
        .into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
        .collect();
    poly_cache().lock().unwrap().insert(n, Arc::new(out.clone()));
    out
}

fn divide_monic(num: &[i128], div: &[i128]) -> Vec<i128> {
    let dd = div.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i128; num.len() - dd];
    for i in (dd..num.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        quot[i - dd] = c;
        for (j, &dj) in div.iter().enumerate() {
            rem[i - dd + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "inexact cyclotomic division");
    quot
}

pub fn euler_phi(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

fn power_table(n: u32) -> Arc<PowerTable> {
    if let Some(t) = table_cache().lock().unwrap().get(&n) {
        return t.clone();
    }
    let phi_poly = cyclotomic_polynomial(n);
    let phi = phi_poly.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by x and reduce the overflow coefficient with Phi_n
        let top = cur[phi - 1];
        for j in (1..phi).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for j in 0..phi {
                cur[j] = cur[j]
                    .checked_sub(top.checked_mul(phi_poly[j]).expect("power table overflow"))
                    .expect("power table overflow");
            }
        }
    }
    let t = Arc::new(PowerTable { phi, powers });
    table_cache().lock().unwrap().insert(n, t.clone());
    t
}

#[derive(Clone, Debug)]
pub struct CycQ {
    order: u32,
    coords: Vec<Rational>,
}

/// `e(x) = exp(2 pi i x)` in `Q(zeta_N)`, `N` the reduced denominator of `x`.
pub fn root_of_unity(x: &Rational) -> CycQ {
    let f = frac(x);
    let n = to_i64(f.denom()) as u32;
    let k = to_i64(f.numer()) as usize;
    let table = power_table(n);
    CycQ {
        order: n,
        coords: table.powers[k].iter().map(|&c| Rational::from_integer(c.into())).collect(),
    }
}

impl CycQ {
    pub fn zero() -> Self {
        CycQ::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        CycQ::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        CycQ {
            order: 1,
            coords: vec![r],
        }
    }

    pub fn from_int(n: i64) -> Self {
        CycQ::from_rational(Rational::from_integer(n.into()))
    }

    /// The imaginary unit `e(1/4)`.
    pub fn i() -> Self {
        root_of_unity(&super::rat(1, 4))
    }

    /// Builds an element from power-basis coordinates; fails unless exactly
    /// `phi(order)` coordinates are supplied.
    pub fn from_coords(order: u32, coords: Vec<Rational>) -> Result<Self> {
        if order == 0 || coords.len() != euler_phi(order) {
            return Err(Error::Parse(format!(
                "Q(zeta_{order}) needs {} coordinates, got {}",
                if order == 0 { 0 } else { euler_phi(order) },
                coords.len()
            )));
        }
        Ok(CycQ { order, coords })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        let s = self.simplify();
        (s.order == 1).then(|| s.coords[0].clone())
    }

    /// Re-expresses `self` in `Q(zeta_new_order)` via `zeta_N -> zeta_N'^(N'/N)`.
    pub fn embed(&self, new_order: u32) -> Result<CycQ> {
        if new_order == 0 || !new_order.is_multiple_of(self.order) {
            return Err(Error::Embedding {
                from: self.order,
                to: new_order,
            });
        }
        if new_order == self.order {
            return Ok(self.clone());
        }
        let step = (new_order / self.order) as usize;
        let table = power_table(new_order);
        let mut coords = vec![Rational::zero(); table.phi];
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            accumulate(&mut coords, c, &table.powers[(i * step) % new_order as usize]);
        }
        Ok(CycQ {
            order: new_order,
            coords,
        })
    }

    fn lifted(&self, order: u32) -> std::borrow::Cow<'_, CycQ> {
        if order == self.order {
            std::borrow::Cow::Borrowed(self)
        } else {
            std::borrow::Cow::Owned(self.embed(order).expect("order divides lcm"))
        }
    }

    fn common_order(&self, other: &CycQ) -> u32 {
        self.order.lcm(&other.order)
    }

    pub fn scale(&self, r: &Rational) -> CycQ {
        CycQ {
            order: self.order,
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugate, `zeta -> zeta^-1`.
    pub fn conj(&self) -> CycQ {
        let n = self.order as usize;
        let table = power_table(self.order);
        let mut coords = vec![Rational::zero(); table.phi];
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                accumulate(&mut coords, c, &table.powers[(n - i) % n]);
            }
        }
        CycQ {
            order: self.order,
            coords,
        }
    }

    /// Multiplicative inverse by solving `self * x = 1` in the power basis.
    pub fn inverse(&self) -> Option<CycQ> {
        if self.is_zero() {
            return None;
        }
        if self.order == 1 {
            return Some(CycQ::from_rational(self.coords[0].recip()));
        }
        let d = self.coords.len();
        // column j is self * zeta^j
        let cols: Vec<Vec<Rational>> = (0..d)
            .map(|j| {
                let zj = CycQ {
                    order: self.order,
                    coords: unit_vector(d, j),
                };
                (self * &zj).coords
            })
            .collect();
        let mut rhs = vec![Rational::zero(); d];
        rhs[0] = Rational::one();
        let x = solve(&cols, &rhs).expect("nonzero field element is invertible");
        Some(CycQ {
            order: self.order,
            coords: x,
        })
    }

    pub fn pow(&self, k: i64) -> CycQ {
        let base = if k < 0 {
            self.inverse().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut e = k.unsigned_abs();
        let mut acc = CycQ::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// The same number in the smallest cyclotomic field containing it.
    pub fn simplify(&self) -> CycQ {
        let mut cur = self.clone();
        if cur.is_zero() {
            return CycQ::zero();
        }
        'outer: loop {
            let n = cur.order;
            if n == 1 {
                return cur;
            }
            for p in prime_factors(n) {
                if let Some(lower) = cur.descend(n / p) {
                    cur = lower;
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    /// Coordinates of `self` in `Q(zeta_d)`, when it lies there.
    fn descend(&self, d: u32) -> Option<CycQ> {
        let n = self.order as usize;
        let step = n / d as usize;
        let table = power_table(self.order);
        let sub_phi = euler_phi(d);
        let cols: Vec<Vec<Rational>> = (0..sub_phi)
            .map(|i| {
                table.powers[(i * step) % n]
                    .iter()
                    .map(|&c| Rational::from_integer(c.into()))
                    .collect()
            })
            .collect();
        let x = solve(&cols, &self.coords)?;
        Some(CycQ {
            order: d,
            coords: x,
        })
    }

    /// Approximate complex value; for display and debugging only.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coords.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let t = std::f64::consts::TAU * k as f64 / self.order as f64;
            re += v * t.cos();
            im += v * t.sin();
        }
        (re, im)
    }
}

fn unit_vector(d: usize, j: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); d];
    v[j] = Rational::one();
    v
}

fn accumulate(out: &mut [Rational], c: &Rational, ints: &[i64]) {
    for (o, &t) in out.iter_mut().zip(ints) {
        match t {
            0 => {}
            1 => *o += c,
            -1 => *o -= c,
            _ => *o += c * Rational::from_integer(t.into()),
        }
    }
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Solves `sum_j x_j cols[j] = rhs` exactly; `None` when inconsistent.
/// Columns must be linearly independent.
fn solve(cols: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let rows = rhs.len();
    let ncols = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(ncols);
    for col in 0..ncols {
        let Some(p) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].recip();
        for v in m[pivot_row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=ncols {
                    let t = &m[pivot_row][c] * &f;
                    m[r][c] -= t;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][ncols].clone();
    }
    Some(x)
}

impl PartialEq for CycQ {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coords == other.coords;
        }
        let n = self.common_order(other);
        self.lifted(n).coords == other.lifted(n).coords
    }
}

impl Eq for CycQ {}

impl<'a> Add<&'a CycQ> for &'a CycQ {
    type Output = CycQ;
    fn add(self, rhs: &CycQ) -> CycQ {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&CycQ> for CycQ {
    fn add_assign(&mut self, rhs: &CycQ) {
        if rhs.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = rhs.clone();
            return;
        }
        let n = self.common_order(rhs);
        if n != self.order {
            *self = self.embed(n).expect("order divides lcm");
        }
        let r = rhs.lifted(n);
        for (a, b) in self.coords.iter_mut().zip(&r.coords) {
            *a += b;
        }
    }
}

impl SubAssign<&CycQ> for CycQ {
    fn sub_assign(&mut self, rhs: &CycQ) {
        *self += &(-rhs);
    }
}

impl<'a> Sub<&'a CycQ> for &'a CycQ {
    type Output = CycQ;
    fn sub(self, rhs: &CycQ) -> CycQ {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &CycQ {
    type Output = CycQ;
    fn neg(self) -> CycQ {
        CycQ {
            order: self.order,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycQ {
    type Output = CycQ;
    fn neg(self) -> CycQ {
        -&self
    }
}

impl<'a> Mul<&'a CycQ> for &'a CycQ {
    type Output = CycQ;
    fn mul(self, rhs: &CycQ) -> CycQ {
        if self.order == 1 {
            return rhs.scale(&self.coords[0]);
        }
        if rhs.order == 1 {
            return self.scale(&rhs.coords[0]);
        }
        let n = self.common_order(rhs);
        let a = self.lifted(n);
        let b = rhs.lifted(n);
        let d = a.coords.len();
        let mut prod = vec![Rational::zero(); 2 * d - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let table = power_table(n);
        let (low, high) = prod.split_at_mut(d);
        for (k, c) in high.iter().enumerate() {
            if !c.is_zero() {
                accumulate(low, c, &table.powers[(d + k) % n as usize]);
            }
        }
        prod.truncate(d);
        CycQ {
            order: n,
            coords: prod,
        }
    }
}

impl Mul for CycQ {
    type Output = CycQ;
    fn mul(self, rhs: CycQ) -> CycQ {
        &self * &rhs
    }
}

impl Add for CycQ {
    type Output = CycQ;
    fn add(self, rhs: CycQ) -> CycQ {
        &self + &rhs
    }
}

impl Sub for CycQ {
    type Output = CycQ;
    fn sub(self, rhs: CycQ) -> CycQ {
        &self - &rhs
    }
}

impl fmt::Display for CycQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.simplify();
        if s.order == 1 {
            return write!(f, "{}", s.coords[0]);
        }
        let mut first = true;
        for (k, c) in s.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z{}^{k}", s.order)?,
                _ => write!(f, "{mag}*z{}^{k}", s.order)?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycQWire {
    order: u32,
    coords: Vec<String>,
}

impl Serialize for CycQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycQWire {
            order: self.order,
            coords: self.coords.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CycQWire::deserialize(d)?;
        let coords = w
            .coords
            .iter()
            .map(|c| crate::error::parse_rational(c))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        CycQ::from_coords(w.order, coords).map_err(D::Error::custom)
    }
}

impl From<i64> for CycQ {
    fn from(n: i64) -> Self {
        CycQ::from_int(n)
    }
}

impl From<Rational> for CycQ {
    fn from(r: Rational) -> Self {
        CycQ::from_rational(r)
    }
}

impl From<BigInt> for CycQ {
    fn from(n: BigInt) -> Self {
        CycQ::from_rational(Rational::from_integer(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    /// Schoolbook evaluation of p(x) mod Phi_N from the defining polynomial,
    /// independent of the power table.
    fn reduce_mod_phi(mut p: Vec<i64>, n: u32) -> Vec<i64> {
        let phi = cyclotomic_polynomial(n);
        let d = phi.len() - 1;
        for i in (d..p.len()).rev() {
            let c = p[i];
            for j in 0..=d {
                p[i - d + j] -= c * phi[j];
            }
        }
        p.truncate(d);
        p.resize(d, 0);
        p
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&c| Rational::from_integer(c.into())).collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // Phi_105 is the first with a coefficient of absolute value 2.
        assert!(cyclotomic_polynomial(105).contains(&-2));
        assert_eq!(euler_phi(46), 22);
    }

    #[test]
    fn roots_of_unity() {
        assert!(root_of_unity(&rat(0, 1)).is_one());
        assert_eq!(root_of_unity(&rat(1, 2)), CycQ::from_int(-1));
        let z3 = root_of_unity(&rat(1, 3));
        assert_eq!(z3.order(), 3);
        // zeta_3^2 + zeta_3 + 1 = 0
        let s = &(&(&z3 * &z3) + &z3) + &CycQ::one();
        assert!(s.is_zero());
        assert_eq!(root_of_unity(&rat(5, 4)), CycQ::i());
        assert_eq!(root_of_unity(&rat(-1, 4)), -CycQ::i());
    }

    #[test]
    fn embedding() {
        let one = CycQ::one().embed(12).unwrap();
        assert_eq!(one.order(), 12);
        assert_eq!(one.coords(), ints(&[1, 0, 0, 0]).as_slice());

        let z3 = root_of_unity(&rat(1, 3));
        let e = z3.embed(6).unwrap();
        // zeta_6^2 reduced mod Phi_6 = x^2 - x + 1 is x - 1
        assert_eq!(e.coords(), reduce_mod_phi(vec![0, 0, 1], 6).iter().map(|&c| Rational::from_integer(c.into())).collect::<Vec<_>>().as_slice());
        // and it satisfies Phi_3
        let s = &(&(&e * &e) + &e) + &CycQ::one();
        assert!(s.is_zero());

        let m1 = CycQ::from_int(-1).embed(4).unwrap();
        assert_eq!(m1.coords(), ints(&[-1, 0]).as_slice());
        assert!(z3.embed(8).is_err());
    }

    #[test]
    fn products_wrap_past_order() {
        // phi(9) = 6, so a degree-10 product needs zeta^10 = zeta
        let z = root_of_unity(&rat(1, 9));
        assert!((&z.pow(5) * &z.pow(4)).is_one());
        assert_eq!(&z.pow(5) * &z.pow(5), z);
    }

    #[test]
    fn canonical_equality_across_orders() {
        let a = root_of_unity(&rat(1, 4));
        let b = root_of_unity(&rat(3, 12));
        assert_eq!(a, b);
        assert_eq!(CycQ::from_int(2), CycQ::from_int(2).embed(24).unwrap());
        let z = root_of_unity(&rat(1, 12));
        assert_eq!((&z * &z).simplify().order(), 3);
        assert_eq!(z.pow(3).simplify(), CycQ::i());
        assert_eq!(z.pow(12), CycQ::one());
        assert_eq!(z.pow(-1), z.conj());
    }

    #[test]
    fn inverse_and_simplify() {
        let z = root_of_unity(&rat(1, 8));
        let a = &(&z + &CycQ::from_int(3)) - &z.pow(3).scale(&rat(1, 2));
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
        assert_eq!(a.simplify().order(), 8);
        // zeta_8 + zeta_8^-1 = sqrt 2 stays in Q(zeta_8); i + (-i) = 0.
        let s = &z + &z.conj();
        assert_eq!(s.simplify().order(), 8);
        assert_eq!(CycQ::i().embed(8).unwrap().to_rational(), None);
        assert_eq!(
            CycQ::from_int(5).embed(6).unwrap().simplify().to_rational(),
            Some(rat(5, 1))
        );
    }

    #[test]
    fn serde_round_trip() {
        let z = root_of_unity(&rat(1, 3)).scale(&rat(-2, 7));
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, r#"{"order":3,"coords":["0","-2/7"]}"#);
        let back: CycQ = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
        assert!(serde_json::from_str::<CycQ>(r#"{"order":4,"coords":["1"]}"#).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(CycQ::i().to_string(), "z4^1");
        assert_eq!((-CycQ::i().scale(&rat(2, 1))).to_string(), "-2*z4^1");
        assert_eq!(CycQ::from_int(-3).embed(12).unwrap().to_string(), "-3");
    }
}
