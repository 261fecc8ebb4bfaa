//! Torsion points and their orbits, the averaging operator `Av_m`, universal
//! Appell-Lerch sums `A^s_m`, residues at the origin, and the polar/finite
//! splitting of meromorphic Jacobi forms.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{frac, int, lcm, rat, root_of_unity, to_i64, CycQ, HalfInt, QExp, Rational};
use crate::jacobi::{theta_decompose, ThetaCoefficients};
use crate::series::{JacobiSeries, Window};
use crate::{Error, Result};

/// The point `z_s = alpha tau + beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionPoint {
    pub alpha: Rational,
    pub beta: Rational,
}

impl TorsionPoint {
    pub fn new(alpha: Rational, beta: Rational) -> Self {
        TorsionPoint { alpha, beta }
    }

    pub fn origin() -> Self {
        TorsionPoint::new(Rational::zero(), Rational::zero())
    }

    /// The joint reduced form `(k/n, l/n)`, returned as `(n, k, l)`.
    pub fn joint(&self) -> (i64, i64, i64) {
        let n = lcm(to_i64(self.alpha.denom()), to_i64(self.beta.denom()));
        let k = to_i64((&self.alpha * int(n)).numer());
        let l = to_i64((&self.beta * int(n)).numer());
        (n, k, l)
    }

    pub fn translate(&self, lambda: i64, mu: i64) -> Self {
        TorsionPoint::new(&self.alpha + int(lambda), &self.beta + int(mu))
    }

    /// Right action of `[[a, b], [c, d]]` on the row vector `(alpha, beta)`.
    pub fn act(&self, g: [[i64; 2]; 2]) -> Self {
        TorsionPoint::new(
            &self.alpha * int(g[0][0]) + &self.beta * int(g[1][0]),
            &self.alpha * int(g[0][1]) + &self.beta * int(g[1][1]),
        )
    }

    /// Equal modulo `Z^2`.
    pub fn same_class(&self, other: &Self) -> bool {
        frac(&self.alpha) == frac(&other.alpha) && frac(&self.beta) == frac(&other.beta)
    }
}

/// The `n` with `s` in `S_n`.
pub fn orbit_index(s: &TorsionPoint) -> i64 {
    s.joint().0
}

/// A generator of `Z^2 x| SL_2(Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Translate(i64, i64),
    Matrix([[i64; 2]; 2]),
}

pub fn replay(s: &TorsionPoint, word: &[Move]) -> TorsionPoint {
    word.iter().fold(s.clone(), |p, mv| match *mv {
        Move::Translate(l, m) => p.translate(l, m),
        Move::Matrix(g) => p.act(g),
    })
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.signum() * a, a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// A word of moves taking `s` to `(1/n, 0)`.
///
/// When `k = 0` a quarter turn first moves the point to `(l/n, 0)`, after
/// which the translation step always finds a `j` with `gcd(k, l + jn) = 1`.
pub fn reduce_to_standard(s: &TorsionPoint) -> Vec<Move> {
    let (n, mut k, mut l) = s.joint();
    let mut word = Vec::new();
    if n == 1 {
        if (k, l) != (1, 0) {
            word.push(Move::Translate(1 - k, -l));
        }
        return word;
    }
    if (k, l) == (1, 0) {
        return word;
    }
    if k == 0 {
        word.push(Move::Matrix([[0, -1], [1, 0]]));
        (k, l) = (l, 0);
    }
    let j = (0..)
        .find(|j| k.gcd(&(l + j * n)) == 1)
        .expect("a coprime translate exists once k != 0");
    if j != 0 {
        word.push(Move::Translate(0, j));
    }
    let l = l + j * n;
    let (_, x, y) = ext_gcd(k, l);
    // k x + l y = 1
    let g = [[x, -l], [y, k]];
    if g != [[1, 0], [0, 1]] {
        word.push(Move::Matrix(g));
    }
    word
}

/// `y^e0 (A + B y^-1) / (1 - y^-1)^pole`: the rational functions of `y`
/// that the averaging operator is fed.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunctionSpec {
    pub e0: HalfInt,
    pub a: Rational,
    pub b: Rational,
    pub pole: bool,
}

impl RationalFunctionSpec {
    pub fn constant(c: Rational) -> Self {
        RationalFunctionSpec {
            e0: HalfInt::int(0),
            a: c,
            b: Rational::zero(),
            pole: false,
        }
    }

    /// `1/(y^(1/2) - y^(-1/2))`.
    pub fn inverse_sine() -> Self {
        RationalFunctionSpec {
            e0: HalfInt::from_num2(-1),
            a: Rational::one(),
            b: Rational::zero(),
            pole: true,
        }
    }

    /// `R_{m,c}(y) = sum_{l <= c, l in Z+m} (1 - delta_{l,c}/2) y^l` in closed form.
    pub fn r_mc(m: HalfInt, c: &Rational) -> Self {
        let shifted = c - m.to_rational();
        if shifted.is_integer() {
            RationalFunctionSpec {
                e0: HalfInt::from_rational(c).expect("c is in Z + m"),
                a: rat(1, 2),
                b: rat(1, 2),
                pole: true,
            }
        } else {
            // largest l in Z + m below c
            let l = (shifted.floor()) + m.to_rational();
            RationalFunctionSpec {
                e0: HalfInt::from_rational(&l).expect("l is in Z + m"),
                a: Rational::one(),
                b: Rational::zero(),
                pole: true,
            }
        }
    }

    /// Terms `(coefficient, E)` of `F(y') = sum c y'^E` expanded in the
    /// region selected by `positive`: `|y'| < 1` when true, `|y'| > 1` otherwise.
    /// `keep(E)` bounds the (monotone) walk; it must eventually return false.
    fn expand(&self, positive: bool, mut keep: impl FnMut(HalfInt) -> bool) -> Vec<(Rational, HalfInt)> {
        let mut out: Vec<(Rational, HalfInt)> = Vec::new();
        let base = [(self.a.clone(), self.e0), (self.b.clone(), self.e0 - HalfInt::int(1))];
        if !self.pole {
            for (c, e) in base {
                if !c.is_zero() && keep(e) {
                    out.push((c, e));
                }
            }
            return out;
        }
        let mut acc: BTreeMap<HalfInt, Rational> = BTreeMap::new();
        if positive {
            // 1/(1 - y'^-1) = -sum_{j>=1} y'^j
            for (c, e) in base {
                if c.is_zero() {
                    continue;
                }
                let mut j = 1;
                loop {
                    let ej = e + HalfInt::int(j);
                    if !keep(ej) {
                        break;
                    }
                    *acc.entry(ej).or_insert_with(Rational::zero) -= &c;
                    j += 1;
                }
            }
        } else {
            for (c, e) in base {
                if c.is_zero() {
                    continue;
                }
                let mut j = 0;
                loop {
                    let ej = e - HalfInt::int(j);
                    if !keep(ej) {
                        break;
                    }
                    *acc.entry(ej).or_insert_with(Rational::zero) += &c;
                    j += 1;
                }
            }
        }
        out.extend(acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (c, e)));
        out
    }

    /// The `|y| > 1` expansion as a `y`-only series.
    pub fn expand_series(&self, window: Window) -> Result<JacobiSeries> {
        if self.pole && window.yfloor.is_none() {
            return Err(Error::precondition("expanding a pole in y needs a y-floor"));
        }
        let floor = window.yfloor;
        let terms = self
            .expand(false, |e| floor.is_none_or(|f| e >= f))
            .into_iter()
            .map(|(c, e)| (QExp::zero(), e, CycQ::from_rational(c)));
        let w = Window {
            yfloor: if self.pole { floor } else { None },
            ..window
        };
        Ok(JacobiSeries::from_terms(w, terms))
    }
}

/// `R_{m,c}` expanded for `|y| > 1` down to the window's floor.
pub fn r_mc(m: HalfInt, c: &Rational, window: Window) -> Result<JacobiSeries> {
    RationalFunctionSpec::r_mc(m, c).expand_series(window)
}

/// `sum_k (-1)^(2mk) q^(mk^2) y^(2mk) F(e(-beta) q^(k - alpha) y)`, each
/// summand expanded in its own region (`|y'| < 1` exactly when `k > alpha`).
pub fn averaging_twisted(
    m: HalfInt,
    f: &RationalFunctionSpec,
    alpha: &Rational,
    beta: &Rational,
    window: Window,
) -> Result<JacobiSeries> {
    let q_max = window.qmax;
    let floor = window.yfloor;
    let mq = m.to_qexp();
    let aq = QExp::from_rational(alpha);
    let mut terms: Vec<(QExp, HalfInt, CycQ)> = Vec::new();
    let reach = HalfInt::from_num2(f.e0.num2.abs() + 2).to_qexp();
    // lowest q any monomial of summand k can carry
    let qmin = |k: i64| {
        let t = QExp::int(k) - aq;
        let at = if t.is_negative() { -t } else { t };
        mq * (k * k) + t * f.e0.to_qexp() - at * reach
    };
    let needs_floor = f.pole && alpha.is_integer();
    if needs_floor && floor.is_none() {
        return Err(Error::precondition("a y-floor is required: one summand has a pole on |y| = 1"));
    }
    for dir in [1i64, -1] {
        let mut k = if dir == 1 { 0 } else { -1 };
        loop {
            // past the kink at k = alpha, qmin is convex; stop once it is
            // beyond the window and still growing
            let kq = QExp::int(k);
            let growing = if dir == 1 {
                kq > aq && mq * (2 * k) + f.e0.to_qexp() - reach > QExp::zero()
            } else {
                kq < aq && mq * (2 * k) + f.e0.to_qexp() + reach < QExp::zero()
            };
            if growing && qmin(k) > q_max {
                break;
            }
            let t = QExp::int(k) - aq;
            let positive = !t.is_negative() && t != QExp::zero();
            let sign = if (m.num2 * k).rem_euclid(2) == 0 { 1 } else { -1 };
            let pre_q = mq * (k * k);
            let pre_y = HalfInt::from_num2(2 * m.num2 * k);
            let keep = |e: HalfInt| {
                let qe = pre_q + t * e.to_qexp();
                let ye = pre_y + e;
                if positive {
                    qe <= q_max
                } else if t == QExp::zero() {
                    floor.is_some_and(|fl| ye >= fl)
                } else {
                    qe <= q_max && floor.is_none_or(|fl| ye >= fl)
                }
            };
            for (c, e) in f.expand(positive, keep) {
                let qe = pre_q + t * e.to_qexp();
                let ye = pre_y + e;
                let phase = root_of_unity(&(-(beta * e.to_rational())));
                terms.push((qe, ye, phase.scale(&(c * int(sign)))));
            }
            k += dir;
        }
    }
    let w = Window {
        qmax: q_max,
        yfloor: floor,
        ycap: floor.unwrap_or(HalfInt::int(0)),
    };
    Ok(JacobiSeries::from_terms(w, terms))
}

/// `Av_m(F)`.
pub fn averaging(m: HalfInt, f: &RationalFunctionSpec, window: Window) -> Result<JacobiSeries> {
    averaging_twisted(m, f, &Rational::zero(), &Rational::zero(), window)
}

/// `Av_m` applied to an already expanded series; only allowed when no
/// `k != 0` summand can reach the window, since a plain series cannot be
/// re-expanded in another region.
pub fn averaging_plain(m: HalfInt, f: &JacobiSeries) -> Result<JacobiSeries> {
    let w = f.window();
    let floor = w.yfloor.unwrap_or_else(|| f.min_y().unwrap_or(HalfInt::int(0)));
    let lowest = [floor, w.ycap]
        .iter()
        .map(|y| y.to_qexp().max(-y.to_qexp()))
        .max()
        .unwrap();
    let base_q = f.valuation().unwrap_or(QExp::zero()).min(QExp::zero());
    if m.to_qexp() + base_q - lowest <= w.qmax {
        return Err(Error::precondition(
            "a plain series can only be averaged when the window excludes every k != 0 summand; pass a rational function",
        ));
    }
    Ok(f.clone())
}

/// `A^s_m = e(-m alpha z_s) Av_m(R_{m,-2m alpha}(y / y_s))`.
pub fn appell_lerch(m: HalfInt, s: &TorsionPoint, window: Window) -> Result<JacobiSeries> {
    let mr = m.to_rational();
    let c = -(int(2) * &mr * &s.alpha);
    let f = RationalFunctionSpec::r_mc(m, &c);
    // the prefactor shifts q by -m alpha^2; expand the sum correspondingly deeper
    let shift_q = QExp::from_rational(&(-(&mr * &s.alpha * &s.alpha)));
    let inner = Window {
        qmax: window.qmax - shift_q,
        ..window
    };
    let av = averaging_twisted(m, &f, &s.alpha, &s.beta, inner)?;
    let phase = root_of_unity(&(-(&mr * &s.alpha * &s.beta)));
    Ok(av.mul_monomial(&crate::series::Monomial::new(phase, shift_q, HalfInt::int(0))))
}

/// `mu_{m,0} = A^{(0,0)}_m`.
pub fn mu_m0(m: HalfInt, window: Window) -> Result<JacobiSeries> {
    appell_lerch(m, &TorsionPoint::origin(), window)
}

/// The phase in `A^{s + (lambda, mu)}_m = e(-m(alpha mu - beta lambda + lambda mu + lambda + mu)) A^s_m`.
pub fn elliptic_phase(m: HalfInt, s: &TorsionPoint, lambda: i64, mu: i64) -> CycQ {
    let (l, u) = (int(lambda), int(mu));
    let arg = m.to_rational() * (&s.alpha * &u - &s.beta * &l + &l * &u + &l + &u);
    root_of_unity(&(-arg))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarDatum {
    pub point: TorsionPoint,
    pub d: CycQ,
}

/// `sum D_s A^s_m`; the points must be pairwise inequivalent mod `Z^2`.
pub fn polar_part(data: &[PolarDatum], m: HalfInt, window: Window) -> Result<JacobiSeries> {
    for (i, a) in data.iter().enumerate() {
        if data[..i].iter().any(|b| b.point.same_class(&a.point)) {
            return Err(Error::precondition(format!(
                "torsion points ({}, {}) listed twice up to Z^2",
                a.point.alpha, a.point.beta
            )));
        }
    }
    let mut out = JacobiSeries::zero(Window {
        ycap: window.yfloor.unwrap_or(HalfInt::int(0)),
        ..window
    });
    for datum in data {
        out = out.add(&appell_lerch(m, &datum.point, window)?.scale(&datum.d));
    }
    Ok(out)
}

/// Value at `y = 1` of every `q`-slice of `(y^(1/2) - y^(-1/2)) psi`.
pub fn residue_profile(psi: &JacobiSeries) -> BTreeMap<QExp, CycQ> {
    let w = psi.window();
    let factor = JacobiSeries::from_terms(
        Window::exact(w.qmax),
        [
            (QExp::zero(), HalfInt::from_num2(1), CycQ::one()),
            (QExp::zero(), HalfInt::from_num2(-1), -CycQ::one()),
        ],
    );
    let prod = psi.mul(&factor);
    let mut out = BTreeMap::new();
    for (q, slice) in prod.q_slices() {
        let mut sum = CycQ::zero();
        for (_, c) in slice {
            sum += c;
        }
        if !sum.is_zero() {
            out.insert(q, sum);
        }
    }
    out
}

/// `D_(0,0)`: the residue constant at the origin, read from expansions of
/// the same form at two different `y`-floors.
pub fn residue_at_origin(psi: &JacobiSeries, psi_deeper: &JacobiSeries) -> Result<CycQ> {
    let first = residue_profile(psi);
    let second = residue_profile(psi_deeper);
    let floors = (
        psi.window().yfloor.map_or("none".into(), |f| f.to_string()),
        psi_deeper.window().yfloor.map_or("none".into(), |f| f.to_string()),
    );
    let qmax = psi.window().qmax.min(psi_deeper.window().qmax);
    let trimmed = |p: &BTreeMap<QExp, CycQ>| -> Vec<(QExp, CycQ)> {
        p.iter().filter(|(q, _)| **q <= qmax).map(|(q, c)| (*q, c.clone())).collect()
    };
    let (a, b) = (trimmed(&first), trimmed(&second));
    if a != b {
        let show = |v: &[(QExp, CycQ)]| {
            v.iter().map(|(q, c)| format!("q^{q}: {c}")).collect::<Vec<_>>().join(", ")
        };
        return Err(Error::Stabilisation {
            floor1: floors.0,
            floor2: floors.1,
            first: show(&a),
            second: show(&b),
        });
    }
    for (q, c) in &a {
        if *q != QExp::zero() {
            return Err(Error::NonConstant {
                q: q.to_string(),
                value: c.to_string(),
            });
        }
    }
    Ok(a.first().map_or_else(CycQ::zero, |(_, c)| c.clone()))
}

#[derive(Clone, Debug)]
pub struct Split {
    pub finite: JacobiSeries,
    pub polar: JacobiSeries,
    pub coefficients: ThetaCoefficients,
}

/// `psi = psi^F + psi^P` with `psi^P` the polar part of `data`; fails with a
/// consistency error when the remainder does not theta-decompose.
pub fn split(psi: &JacobiSeries, m: HalfInt, data: &[PolarDatum]) -> Result<Split> {
    let polar = polar_part(data, m, psi.window())?;
    let finite = psi.sub(&polar);
    let coefficients = theta_decompose(&finite, m)?;
    Ok(Split {
        finite,
        polar,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n2: i64) -> HalfInt {
        HalfInt::from_num2(n2)
    }

    fn pt(a: (i64, i64), b: (i64, i64)) -> TorsionPoint {
        TorsionPoint::new(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn orbit_indices() {
        assert_eq!(orbit_index(&TorsionPoint::origin()), 1);
        assert_eq!(orbit_index(&pt((1, 2), (1, 2))), 2);
        let s = pt((2, 6), (3, 6));
        assert_eq!(s.joint(), (6, 2, 3));
    }

    #[test]
    fn reductions_replay_to_standard_point() {
        for s in [pt((1, 2), (1, 2)), pt((0, 1), (1, 3)), pt((1, 5), (0, 1)), pt((3, 4), (1, 2)), pt((0, 1), (0, 1))] {
            let n = orbit_index(&s);
            let word = reduce_to_standard(&s);
            assert_eq!(replay(&s, &word), pt((1, n), (0, 1)), "{s:?} via {word:?}");
        }
        assert!(reduce_to_standard(&pt((1, 7), (0, 1))).is_empty());
        assert_eq!(reduce_to_standard(&pt((1, 2), (1, 2))), vec![Move::Matrix([[0, -1], [1, 1]])]);
    }

    #[test]
    fn r_mc_expansions() {
        let w = Window::target(QExp::int(2), h(-12));
        let r = r_mc(h(5), &rat(0, 1), w).unwrap();
        assert!(r.coefficient(QExp::zero(), h(-1)).unwrap().is_one());
        assert!(r.coefficient(QExp::zero(), h(-3)).unwrap().is_one());
        assert!(r.coefficient(QExp::zero(), h(1)).unwrap().is_zero());
        let r = r_mc(h(2), &rat(1, 1), w).unwrap();
        assert_eq!(r.coefficient(QExp::zero(), h(2)).unwrap(), CycQ::from_rational(rat(1, 2)));
        assert!(r.coefficient(QExp::zero(), h(0)).unwrap().is_one());
        let r = r_mc(h(1), &rat(-7, 2), w).unwrap();
        assert_eq!(r.max_y(), Some(h(-7)));
        assert_eq!(r.coefficient(QExp::zero(), h(-7)).unwrap(), CycQ::from_rational(rat(1, 2)));
        // R_{m,c+1} = y R_{m,c}
        let a = r_mc(h(5), &rat(1, 3), w).unwrap();
        let b = r_mc(h(5), &rat(4, 3), w).unwrap();
        let shifted = a.mul_monomial(&crate::series::Monomial::new(CycQ::one(), QExp::zero(), h(2)));
        assert!(shifted.agrees_with(&b));
    }

    #[test]
    fn averaging_a_constant() {
        let w = Window::target(QExp::int(6), h(-20));
        let av = averaging(h(1), &RationalFunctionSpec::constant(rat(1, 1)), w).unwrap();
        for (q, y, c) in av.terms() {
            let k = y.num2 / 2;
            assert_eq!(q, QExp::new(k * k, 2));
            assert_eq!(c, &CycQ::from_int(if k % 2 == 0 { 1 } else { -1 }));
        }
        assert_eq!(av.len(), 7);
    }

    #[test]
    fn mu_has_unit_residue() {
        let m = h(5);
        let a = mu_m0(m, Window::target(QExp::int(4), h(-40))).unwrap();
        let b = mu_m0(m, Window::target(QExp::int(4), h(-60))).unwrap();
        assert!(a.coefficient(QExp::zero(), h(-1)).unwrap().is_one());
        assert!(residue_at_origin(&a, &b).unwrap().is_one());
        let inv = averaging(m, &RationalFunctionSpec::inverse_sine(), Window::target(QExp::int(4), h(-40))).unwrap();
        assert!(inv.agrees_with(&a));
    }

    #[test]
    fn elliptic_law_for_a_torsion_point() {
        let m = h(5);
        let s = pt((1, 5), (0, 1));
        let w = Window::target(QExp::int(3), h(-30));
        let base = appell_lerch(m, &s, w).unwrap();
        for (l, u) in [(1, 0), (0, 1), (-1, 1), (1, -1)] {
            let moved = appell_lerch(m, &s.translate(l, u), w).unwrap();
            let expected = base.scale(&elliptic_phase(m, &s, l, u));
            assert!(moved.agrees_with(&expected), "({l},{u})");
        }
    }

    #[test]
    fn duplicate_points_are_rejected() {
        let d = |a: TorsionPoint| PolarDatum { point: a, d: CycQ::one() };
        let w = Window::target(QExp::int(2), h(-10));
        assert!(polar_part(&[d(TorsionPoint::origin()), d(pt((1, 1), (0, 1)))], h(5), w).is_err());
        assert!(polar_part(&[], h(5), w).unwrap().is_zero());
    }
}
