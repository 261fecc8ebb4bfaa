//! Dedekind eta, the Jacobi theta functions `theta_1`, `theta_2`, and the
//! index-`m` thetas `theta_{m,r}`, as truncated series.

use crate::arith::{rat, root_of_unity, CycQ, HalfInt, QExp, Rational};
use crate::series::{product_expand, FactorSpec, JacobiSeries, Monomial, QSeries, Window};
use crate::{Error, Result};

/// An index `m > 0` in `Z/2` with a label `r` in `Z + m`, kept in the
/// canonical range `-m < r <= m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThetaIndex {
    m: HalfInt,
    r: HalfInt,
}

impl ThetaIndex {
    pub fn new(m: HalfInt, r: HalfInt) -> Result<Self> {
        if !m.is_positive() {
            return Err(Error::precondition(format!("theta index must be positive, got {m}")));
        }
        if !(r - m).is_integral() {
            return Err(Error::precondition(format!("label {r} is not in Z + {m}")));
        }
        Ok(ThetaIndex {
            m,
            r: canonical_label(m, r),
        })
    }

    pub fn m(&self) -> HalfInt {
        self.m
    }

    pub fn r(&self) -> HalfInt {
        self.r
    }
}

/// The representative of `r mod 2m` in `(-m, m]`.
pub fn canonical_label(m: HalfInt, r: HalfInt) -> HalfInt {
    let low = -m.num2 + 2;
    HalfInt::from_num2((r.num2 - low).rem_euclid(2 * m.num2) + low)
}

/// `-m+1, -m+2, ..., m`.
pub fn canonical_labels(m: HalfInt) -> Vec<HalfInt> {
    (0..m.num2).map(|i| HalfInt::from_num2(-m.num2 + 2 + 2 * i)).collect()
}

/// Factors of `eta(a tau) = q^(a/24) prod (1 - q^(an))` through `q^qmax`.
pub fn eta_factors(a: i64, qmax: QExp) -> (Monomial, Vec<FactorSpec>) {
    let pre = Monomial::new(CycQ::one(), QExp::new(a, 24), HalfInt::int(0));
    let mut fs = Vec::new();
    let mut n = 1;
    while QExp::int(a * n) <= qmax {
        fs.push(FactorSpec::numerator(CycQ::one(), QExp::int(a * n), HalfInt::int(0)));
        n += 1;
    }
    (pre, fs)
}

/// Factors of `theta_1(a tau, b z)` in product form,
/// `-i q^(a/8) y^(b/2) prod (1 - y^-b q^(a(n-1))) (1 - y^b q^(an)) (1 - q^(an))`.
pub fn theta1_factors(a: i64, b: i64, qmax: QExp) -> (Monomial, Vec<FactorSpec>) {
    theta_factors(a, b, qmax, -CycQ::i(), CycQ::one())
}

/// Factors of `theta_2(a tau, b z)`, the same product with `+` inside the
/// `y`-dependent factors and prefactor `q^(a/8) y^(b/2)`.
pub fn theta2_factors(a: i64, b: i64, qmax: QExp) -> (Monomial, Vec<FactorSpec>) {
    theta_factors(a, b, qmax, CycQ::one(), CycQ::from_int(-1))
}

fn theta_factors(a: i64, b: i64, qmax: QExp, lead: CycQ, c: CycQ) -> (Monomial, Vec<FactorSpec>) {
    assert!(a > 0 && b > 0);
    let pre = Monomial::new(lead, QExp::new(a, 8), HalfInt::int(0) + HalfInt::from_num2(b));
    let mut fs = Vec::new();
    let mut n = 1;
    while QExp::int(a * (n - 1)) <= qmax {
        fs.push(FactorSpec::numerator(c.clone(), QExp::int(a * (n - 1)), HalfInt::int(-b)));
        if QExp::int(a * n) <= qmax {
            fs.push(FactorSpec::numerator(c.clone(), QExp::int(a * n), HalfInt::int(b)));
            fs.push(FactorSpec::numerator(CycQ::one(), QExp::int(a * n), HalfInt::int(0)));
        }
        n += 1;
    }
    (pre, fs)
}

pub fn eta(qmax: QExp) -> JacobiSeries {
    let (pre, fs) = eta_factors(1, qmax);
    product_expand(&pre, &fs, Window::exact(qmax)).expect("eta factors are finite")
}

pub fn theta1(window: Window) -> JacobiSeries {
    let (pre, fs) = theta1_factors(1, 1, window.qmax);
    product_expand(&pre, &fs, window).expect("theta factors are finite")
}

pub fn theta2(window: Window) -> JacobiSeries {
    let (pre, fs) = theta2_factors(1, 1, window.qmax);
    product_expand(&pre, &fs, window).expect("theta factors are finite")
}

/// The `l` in `Z + m`, `l = r mod 2m`, with `l^2/4m <= qmax` and `l >= floor`.
fn theta_support(idx: ThetaIndex, qmax: QExp, floor: Option<HalfInt>) -> Vec<HalfInt> {
    let m = idx.m.to_rational();
    let four_m = &m * Rational::from_integer(4.into());
    let bound = qmax.to_rational() * &four_m;
    let step = 2 * idx.m.num2;
    let mut out = Vec::new();
    // walk outwards from r in both directions until l^2 exceeds the bound
    for dir in [1i64, -1] {
        let mut l = if dir == 1 { idx.r.num2 } else { idx.r.num2 - step };
        loop {
            let lr = rat(l, 2);
            if &lr * &lr > bound {
                break;
            }
            if floor.is_none_or(|f| l >= f.num2) {
                out.push(HalfInt::from_num2(l));
            }
            l += dir * step;
        }
    }
    out.sort();
    out
}

/// `theta_{m,r} = sum_{l = r mod 2m} e(m l) y^l q^(l^2/4m)` on `window`.
pub fn theta_mr(idx: ThetaIndex, window: Window) -> JacobiSeries {
    let m = idx.m.to_rational();
    let terms = theta_support(idx, window.qmax, window.yfloor).into_iter().map(|l| {
        let lr = l.to_rational();
        let qe = QExp::from_rational(&(&lr * &lr / (&m * Rational::from_integer(4.into()))));
        (qe, l, root_of_unity(&(&m * &lr)))
    });
    let w = Window {
        ycap: window.yfloor.unwrap_or(HalfInt::int(0)),
        ..window
    };
    JacobiSeries::from_terms(w, terms)
}

/// `theta^1_{m,r} = sum e(m l) l q^(l^2/4m)`, the `z`-derivative at `z = 0`
/// divided by `2 pi i`.
pub fn theta1_mr(idx: ThetaIndex, qmax: QExp) -> QSeries {
    let m = idx.m.to_rational();
    let terms = theta_support(idx, qmax, None).into_iter().filter(|l| l.num2 != 0).map(|l| {
        let lr = l.to_rational();
        let qe = QExp::from_rational(&(&lr * &lr / (&m * Rational::from_integer(4.into()))));
        (qe, root_of_unity(&(&m * &lr)).scale(&lr))
    });
    QSeries::from_terms(qmax, terms)
}

/// The sign `sigma` with `theta_{1/2,1/2} = sigma * theta_1` (product form),
/// found by comparing the two expansions on `window`.
pub fn triple_product_sign(window: Window) -> Result<i32> {
    let idx = ThetaIndex::new(HalfInt::from_num2(1), HalfInt::from_num2(1))?;
    let sum = theta_mr(idx, window);
    let prod = theta1(window);
    for sigma in [1, -1] {
        if sum.agrees_with(&prod.scale(&CycQ::from_int(sigma))) {
            return Ok(sigma as i32);
        }
    }
    let (q, y, a, b) = sum
        .first_difference(&prod)
        .expect("neither sign matched, so the series differ");
    Err(Error::Consistency {
        q: q.to_string(),
        y: y.to_string(),
        expected: format!("+-({b})"),
        found: a.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n2: i64) -> HalfInt {
        HalfInt::from_num2(n2)
    }

    fn q(n: i64, d: i64) -> QExp {
        QExp::new(n, d)
    }

    /// Euler's pentagonal number theorem as an independent oracle.
    fn pentagonal(n: i64) -> i64 {
        let mut c = 0;
        for k in -20i64..=20 {
            if k * (3 * k - 1) / 2 == n {
                c += if k % 2 == 0 { 1 } else { -1 };
            }
        }
        c
    }

    #[test]
    fn eta_matches_pentagonal_numbers() {
        let e = eta(q(12, 1));
        for n in 0..=11 {
            let c = e.coefficient(QExp::new(24 * n + 1, 24), h(0)).unwrap();
            assert_eq!(c, CycQ::from_int(pentagonal(n)), "q^{n}+1/24");
        }
    }

    #[test]
    fn eta_cubed_is_jacobi_series() {
        let e = eta(q(10, 1));
        let e3 = e.mul(&e).mul(&e);
        // eta^3 = sum_n (-1)^n (2n+1) q^((2n+1)^2/8)
        for (qe, ye, c) in e3.terms() {
            assert_eq!(ye, h(0));
            let k = qe * 8;
            let odd = (1..20).find(|t| QExp::int(t * t) == k).expect("support on odd squares / 8");
            let sign = if (odd / 2) % 2 == 0 { 1 } else { -1 };
            assert_eq!(c, &CycQ::from_int(sign * odd));
        }
        assert_eq!(e3.len(), 4);
    }

    #[test]
    fn theta_product_leading_terms() {
        let w = Window::target(q(3, 1), h(-20));
        let t1 = theta1(w);
        assert_eq!(t1.coefficient(q(1, 8), h(1)).unwrap(), -CycQ::i());
        assert_eq!(t1.coefficient(q(1, 8), h(-1)).unwrap(), CycQ::i());
        let t2 = theta2(w);
        assert!(t2.coefficient(q(1, 8), h(-1)).unwrap().is_one());
        assert!(t2.coefficient(q(1, 8), h(1)).unwrap().is_one());
    }

    #[test]
    fn theta_mr_terms() {
        let w = Window::target(q(4, 1), h(-30));
        let t = theta_mr(ThetaIndex::new(h(1), h(1)).unwrap(), w);
        assert_eq!(t.coefficient(q(1, 8), h(1)).unwrap(), CycQ::i());
        let t = theta_mr(ThetaIndex::new(h(5), h(5)).unwrap(), w);
        assert_eq!(t.valuation(), Some(q(5, 8)));
        for (_, l, _) in t.terms() {
            assert_eq!((l.num2 - 5).rem_euclid(10), 0);
        }
    }

    #[test]
    fn theta1_mr_values() {
        let d = theta1_mr(ThetaIndex::new(h(1), h(1)).unwrap(), q(3, 1));
        assert_eq!(d.coefficient(q(1, 8)).unwrap(), CycQ::i());
        let z = theta1_mr(ThetaIndex::new(h(2), h(0)).unwrap(), q(6, 1));
        assert!(z.is_zero());
    }

    #[test]
    fn triple_product_sign_is_negative() {
        assert_eq!(triple_product_sign(Window::target(q(20, 1) + q(1, 8), h(-60))).unwrap(), -1);
    }

    #[test]
    fn labels() {
        assert_eq!(canonical_labels(h(5)), vec![h(-3), h(-1), h(1), h(3), h(5)]);
        assert_eq!(canonical_labels(h(2)), vec![h(0), h(2)]);
        assert_eq!(canonical_label(h(5), h(-5)), h(5));
        assert_eq!(canonical_label(h(5), h(7)), h(-3));
        assert!(ThetaIndex::new(h(5), h(2)).is_err());
    }
}
