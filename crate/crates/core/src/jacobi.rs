//! Elliptic structure: theta decomposition, the Eichler-Zagier operators
//! `W_m(n)`, their Omega matrices, and exact divisors.

use std::collections::{BTreeMap, HashSet};

use num_integer::Integer;

use crate::arith::{rat, root_of_unity, CycQ, HalfInt, QExp, Rational};
use crate::series::{JacobiSeries, Monomial, QSeries, Window};
use crate::special::{canonical_label, canonical_labels, theta_mr, ThetaIndex};
use crate::{Error, Result};

/// `m` for integral `m`, `2m` for half-integral `m`.
pub fn mtilde(m: HalfInt) -> u32 {
    assert!(m.is_positive(), "index must be positive");
    if m.is_integral() {
        (m.num2 / 2) as u32
    } else {
        m.num2 as u32
    }
}

pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Divisors `n` of `mt` with `gcd(n, mt/n) = 1`.
pub fn exact_divisors(mt: u32) -> Vec<u32> {
    divisors(mt).into_iter().filter(|&n| n.gcd(&(mt / n)) == 1).collect()
}

/// `n * n' / gcd(n, n')^2`, the group law on exact divisors.
pub fn exact_product(n: u32, n2: u32) -> u32 {
    let g = n.gcd(&n2);
    n / g * (n2 / g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDivisorMap {
    pub mtilde: u32,
    /// `(n, a(n))` with `a(n)` reduced into `[0, 2 mtilde)`.
    pub pairs: Vec<(u32, i64)>,
}

impl ExactDivisorMap {
    pub fn get(&self, n: u32) -> Option<i64> {
        self.pairs.iter().find(|p| p.0 == n).map(|p| p.1)
    }
}

/// `a(n)`: the residue mod `2 mt` that is `1 mod 2mt/n` and `-1 mod 2n`.
pub fn exact_divisor_map(mt: u32) -> ExactDivisorMap {
    let modulus = 2 * mt as i64;
    let pairs = exact_divisors(mt)
        .into_iter()
        .map(|n| {
            let (p, r) = (modulus / n as i64, 2 * n as i64);
            let a = (0..modulus)
                .find(|a| (a - 1).rem_euclid(p) == 0 && (a + 1).rem_euclid(r) == 0)
                .expect("the two congruences are compatible for exact divisors");
            (n, a)
        })
        .collect();
    ExactDivisorMap { mtilde: mt, pairs }
}

/// `O_mt = { a mod 2mt : a^2 = 1 mod 4mt }`.
pub fn o_set(mt: u32) -> Vec<i64> {
    let m = mt as i64;
    (0..2 * m).filter(|a| (a * a - 1).rem_euclid(4 * m) == 0).collect()
}

/// The 0/1 matrix by which `W_m(n)` permutes theta functions, rows and
/// columns indexed by [`canonical_labels`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaMatrix {
    pub m: HalfInt,
    pub n: u32,
    pub labels: Vec<HalfInt>,
    pub entries: Vec<Vec<u8>>,
}

impl OmegaMatrix {
    pub fn is_permutation(&self) -> bool {
        let k = self.labels.len();
        (0..k).all(|i| self.entries[i].iter().map(|&e| e as u32).sum::<u32>() == 1)
            && (0..k).all(|j| self.entries.iter().map(|row| row[j] as u32).sum::<u32>() == 1)
    }

    pub fn is_identity(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &e)| e == u8::from(i == j)))
    }
}

fn divides(k: i64, num2: i64) -> bool {
    // num2 is twice an integer here
    num2 % 2 == 0 && (num2 / 2).rem_euclid(k) == 0
}

pub fn omega_matrix(m: HalfInt, n: u32) -> Result<OmegaMatrix> {
    let mt = mtilde(m);
    if !mt.is_multiple_of(n) {
        return Err(Error::precondition(format!("{n} does not divide {mt}")));
    }
    let labels = canonical_labels(m);
    let first = if m.is_integral() { 2 * n as i64 } else { n as i64 };
    let second = m.num2 / n as i64; // 2m/n
    let entries = labels
        .iter()
        .map(|&r| {
            labels
                .iter()
                .map(|&r2| u8::from(divides(first, (r + r2).num2) && divides(second, (r - r2).num2)))
                .collect()
        })
        .collect();
    Ok(OmegaMatrix {
        m,
        n,
        labels,
        entries,
    })
}

/// `phi | W_m(n) = (1/n) sum_{a,b < n} e(m(ab/n^2 + ab + a + b)) q^(m a^2/n^2)
/// y^(2ma/n) phi(tau, z + a tau/n + b/n)`.
pub fn ez_operator(phi: &JacobiSeries, m: HalfInt, n: u32) -> Result<JacobiSeries> {
    let mt = mtilde(m);
    if !mt.is_multiple_of(n) {
        return Err(Error::precondition(format!("{n} does not divide {mt}")));
    }
    let mr = m.to_rational();
    let nn = n as i64;
    let mut out: Option<JacobiSeries> = None;
    for a in 0..nn {
        for b in 0..nn {
            let shifted = phi.substitute(&rat(a, nn), &rat(b, nn))?;
            let phase_arg = &mr * (rat(a * b, nn * nn) + Rational::from_integer((a * b + a + b).into()));
            let coeff = root_of_unity(&phase_arg).scale(&rat(1, nn));
            let qexp = QExp::from_rational(&(&mr * rat(a * a, nn * nn)));
            let yexp = HalfInt::from_rational(&(&mr * rat(2 * a, nn)))?;
            let term = shifted.mul_monomial(&Monomial::new(coeff, qexp, yexp));
            out = Some(match out {
                None => term,
                Some(acc) => acc.add(&term),
            });
        }
    }
    let out = out.expect("n >= 1");
    if out.window().qmax.is_negative() {
        return Err(Error::EmptyWindow("the Eichler-Zagier tau-shifts"));
    }
    Ok(out)
}

/// A window for building `theta_{m,r}` so that every `tau`-shift by at most
/// one period still leaves the result exact through `q^qorder`. The floor
/// sits just below the whole support of the theta series on that window.
pub fn shift_safe_theta_window(m: HalfInt, qorder: i64) -> Window {
    let four_m = 2 * m.num2; // 4m
    let depth = |q: i64| -> i64 {
        // smallest integer d with d^2 >= 4mq
        let mut d = ((four_m * q) as f64).sqrt() as i64;
        while d * d < four_m * q {
            d += 1;
        }
        d
    };
    let mut q = qorder.max(1);
    while q - depth(q) - 1 < qorder {
        q += 1;
    }
    Window::target(QExp::int(q), HalfInt::int(-depth(q) - 1))
}

/// The coefficients `h_r` of a theta decomposition, keyed by canonical label.
#[derive(Clone, Debug)]
pub struct ThetaCoefficients {
    pub m: HalfInt,
    pub h: BTreeMap<HalfInt, QSeries>,
}

impl ThetaCoefficients {
    pub fn get(&self, r: HalfInt) -> Option<&QSeries> {
        self.h.get(&canonical_label(self.m, r))
    }

    /// `sum_r h_r theta_{m,r}` on `window`.
    pub fn assemble(&self, window: Window) -> Result<JacobiSeries> {
        let mut out = JacobiSeries::zero(Window { ycap: window.yfloor.unwrap_or(HalfInt::int(0)), ..window });
        for (&r, h) in &self.h {
            let idx = ThetaIndex::new(self.m, r)?;
            let th = theta_mr(idx, window);
            let hs = JacobiSeries::from_terms(
                Window::exact(h.qmax()),
                h.terms().map(|(q, c)| (q, HalfInt::int(0), c.clone())),
            );
            out = out.add(&th.mul(&hs).restrict(window));
        }
        Ok(out)
    }
}

fn check_support(phi: &JacobiSeries, m: HalfInt) -> Result<()> {
    for (q, y, c) in phi.terms() {
        if !(y - m).is_integral() {
            return Err(Error::Consistency {
                q: q.to_string(),
                y: y.to_string(),
                expected: format!("no term off Z + {m}"),
                found: c.to_string(),
            });
        }
    }
    Ok(())
}

fn four_m(m: HalfInt) -> QExp {
    m.to_qexp() * 4
}

/// Reads `h_r` off the smallest representative `l = r` and checks every
/// other representative in the window against `e(ml) h_r[a - l^2/4m]`.
pub fn theta_decompose(phi: &JacobiSeries, m: HalfInt) -> Result<ThetaCoefficients> {
    check_support(phi, m)?;
    let w = phi.window();
    let labels = canonical_labels(m);
    if let Some(f) = w.yfloor {
        if let Some(&r) = labels.iter().find(|&&r| r < f) {
            return Err(Error::precondition(format!(
                "y-floor {f} lies above the representative {r}; lower the floor"
            )));
        }
    }
    let mut h = BTreeMap::new();
    for &r in &labels {
        let shift = r.to_qexp() * r.to_qexp() * inverse(four_m(m));
        let phase = root_of_unity(&(m.to_rational() * r.to_rational())).conj();
        let mut series = QSeries::zero(w.qmax - shift);
        for (q, y, c) in phi.terms() {
            if y == r {
                series.add_term(q - shift, &(c * &phase));
            }
        }
        h.insert(r, series);
    }
    let coeffs = ThetaCoefficients { m, h };

    // predicted coefficients at every representative inside the window
    let mut predicted: Vec<(QExp, HalfInt, CycQ)> = Vec::new();
    for (&r, hr) in &coeffs.h {
        for (b, c) in hr.terms() {
            for l in representatives(m, r, b, w.qmax, w.yfloor) {
                let l2 = l.to_qexp() * l.to_qexp() * inverse(four_m(m));
                let ph = root_of_unity(&(m.to_rational() * l.to_rational()));
                predicted.push((b + l2, l, c * &ph));
            }
        }
    }
    let model = JacobiSeries::from_terms(w, predicted);
    if let Some((q, y, found, expected)) = phi.first_difference(&model) {
        return Err(Error::Consistency {
            q: q.to_string(),
            y: y.to_string(),
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(coeffs)
}

fn inverse(q: QExp) -> QExp {
    QExp::new(q.den(), q.num())
}

/// All `l = r mod 2m` with `b + l^2/4m <= qmax` and `l >= floor` (if any).
fn representatives(m: HalfInt, r: HalfInt, b: QExp, qmax: QExp, floor: Option<HalfInt>) -> Vec<HalfInt> {
    let budget = qmax - b;
    if budget.is_negative() {
        return Vec::new();
    }
    let step = 2 * m.num2;
    let fits = |l: i64| {
        let lq = QExp::new(l, 2);
        lq * lq * inverse(four_m(m)) <= budget
    };
    let mut out = Vec::new();
    let mut l = r.num2;
    while fits(l) {
        out.push(HalfInt::from_num2(l));
        l += step;
    }
    let mut l = r.num2 - step;
    while fits(l) && floor.is_none_or(|f| l >= f.num2) {
        out.push(HalfInt::from_num2(l));
        l -= step;
    }
    out
}

/// Checks the `(1,0)` elliptic relation `c(a, l) = e(m) c(a - l + m, l - 2m)`
/// wherever both positions lie in the window; returns the number of checked
/// pairs.
pub fn check_elliptic_shift(phi: &JacobiSeries, m: HalfInt) -> Result<usize> {
    check_twisted_elliptic_shift(phi, m, 1)
}

/// The same relation multiplied by `sign`, for forms that pick up an extra
/// character `(-1)^lambda` under `z -> z + lambda tau`.
pub fn check_twisted_elliptic_shift(phi: &JacobiSeries, m: HalfInt, sign: i64) -> Result<usize> {
    let w = phi.window();
    let mq = m.to_qexp();
    let two_m = HalfInt::from_num2(2 * m.num2);
    let em = root_of_unity(&m.to_rational()).scale(&Rational::from_integer(sign.into()));
    let mut candidates: HashSet<(QExp, HalfInt)> = HashSet::new();
    for (q, y, _) in phi.terms() {
        candidates.insert((q, y));
        // (q, y) as the partner of (q + y + m, y + 2m)
        candidates.insert((q + y.to_qexp() + mq, y + two_m));
    }
    let mut sorted: Vec<_> = candidates.into_iter().collect();
    sorted.sort();
    let mut checked = 0;
    for (a, l) in sorted {
        let (pa, pl) = (a - l.to_qexp() + mq, l - two_m);
        if !w.contains(a, l) || !w.contains(pa, pl) {
            continue;
        }
        let lhs = phi.coefficient(a, l)?;
        let rhs = &em * &phi.coefficient(pa, pl)?;
        if lhs != rhs {
            return Err(Error::Consistency {
                q: a.to_string(),
                y: l.to_string(),
                expected: rhs.to_string(),
                found: lhs.to_string(),
            });
        }
        checked += 1;
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n2: i64) -> HalfInt {
        HalfInt::from_num2(n2)
    }

    #[test]
    fn mtilde_values() {
        assert_eq!(mtilde(h(6)), 3);
        assert_eq!(mtilde(h(5)), 5);
        assert_eq!(mtilde(h(1)), 1);
    }

    #[test]
    fn exact_divisor_residues() {
        assert_eq!(exact_divisor_map(1).pairs, vec![(1, 1)]);
        assert_eq!(exact_divisor_map(5).pairs, vec![(1, 1), (5, 9)]);
        assert_eq!(exact_divisor_map(6).get(2), Some(7));
        assert_eq!(exact_divisors(12), vec![1, 3, 4, 12]);
        assert_eq!(exact_product(4, 12), 3);
    }

    #[test]
    fn omega_examples() {
        assert!(omega_matrix(h(5), 1).unwrap().is_identity());
        assert!(omega_matrix(h(2), 1).unwrap().is_identity());
        let om = omega_matrix(h(5), 5).unwrap();
        for (i, &r) in om.labels.iter().enumerate() {
            for (j, &r2) in om.labels.iter().enumerate() {
                let expect = (r + r2).num2.rem_euclid(10) == 0;
                assert_eq!(om.entries[i][j] == 1, expect, "{r} {r2}");
            }
        }
        assert!(om.is_permutation());
        assert!(omega_matrix(h(5), 3).is_err());
    }

    #[test]
    fn ez_on_theta_matches_omega() {
        let m = h(5);
        let w = shift_safe_theta_window(m, 4);
        let om = omega_matrix(m, 5).unwrap();
        for (i, &r) in om.labels.iter().enumerate() {
            let th = theta_mr(ThetaIndex::new(m, r).unwrap(), w);
            let image = ez_operator(&th, m, 5).unwrap();
            assert!(image.window().qmax >= QExp::int(4));
            let j = om.entries[i].iter().position(|&e| e == 1).unwrap();
            let target = theta_mr(ThetaIndex::new(m, om.labels[j]).unwrap(), w);
            assert!(image.agrees_with(&target), "r = {r}");
            assert!(ez_operator(&th, m, 1).unwrap().agrees_with(&th));
        }
    }

    #[test]
    fn theta_decomposition_of_a_theta() {
        let m = h(5);
        let w = Window::target(QExp::int(6), h(-30));
        let th = theta_mr(ThetaIndex::new(m, h(-3)).unwrap(), w);
        let dec = theta_decompose(&th, m).unwrap();
        for (&r, hr) in &dec.h {
            if r == h(-3) {
                assert_eq!(hr.len(), 1);
                assert!(hr.coefficient(QExp::zero()).unwrap().is_one());
            } else {
                assert!(hr.is_zero());
            }
        }
        assert!(dec.assemble(w).unwrap().agrees_with(&th));
        assert_eq!(check_elliptic_shift(&th, m).unwrap(), 2);
    }

    #[test]
    fn decomposition_detects_inconsistency() {
        let m = h(5);
        let w = Window::target(QExp::int(6), h(-30));
        let th = theta_mr(ThetaIndex::new(m, h(1)).unwrap(), w);
        let broken = th.add(&JacobiSeries::monomial(CycQ::one(), QExp::int(2), h(-19), w));
        assert!(matches!(theta_decompose(&broken, m), Err(Error::Consistency { .. })));
        let off = JacobiSeries::monomial(CycQ::one(), QExp::int(1), h(0), w);
        assert!(theta_decompose(&off, m).is_err());
    }
}
