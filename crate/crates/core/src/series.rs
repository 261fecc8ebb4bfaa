//! Truncated two-variable series: Puiseux in `q`, Laurent in `y^(1/2)`, with
//! cyclotomic coefficients. Every series carries the [`Window`] on which its
//! stored coefficients are exact.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{lcm, root_of_unity, CycQ, HalfInt, QExp, Rational, YExp};
use crate::{Error, Result};

/// Where a truncated series is exact: every coefficient of `q^a y^l` with
/// `a <= qmax` and `l >= yfloor` is stored (zero if absent), and no term with
/// `a <= qmax` has `l > ycap`. A missing floor means nothing was dropped in `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub qmax: QExp,
    pub yfloor: Option<YExp>,
    pub ycap: YExp,
}

impl Window {
    pub fn new(qmax: QExp, yfloor: Option<YExp>, ycap: YExp) -> Self {
        Window { qmax, yfloor, ycap }
    }

    /// A target window for builders: expand through `q^qmax`, down to `y^yfloor`.
    pub fn target(qmax: QExp, yfloor: YExp) -> Self {
        Window {
            qmax,
            yfloor: Some(yfloor),
            ycap: yfloor,
        }
    }

    /// Window for `y`-exact data, e.g. pure `q`-series.
    pub fn exact(qmax: QExp) -> Self {
        Window {
            qmax,
            yfloor: None,
            ycap: HalfInt::int(0),
        }
    }

    pub fn contains(&self, q: QExp, y: YExp) -> bool {
        q <= self.qmax && self.yfloor.is_none_or(|f| y >= f)
    }

    /// The region on which two exact-on-window series can both be trusted.
    pub fn intersect(&self, other: &Window) -> Window {
        Window {
            qmax: self.qmax.min(other.qmax),
            yfloor: max_floor(self.yfloor, other.yfloor),
            ycap: self.ycap.max(other.ycap),
        }
    }
}

fn max_floor(a: Option<YExp>, b: Option<YExp>) -> Option<YExp> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// A monomial `c q^a y^l`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: CycQ,
    pub qexp: QExp,
    pub yexp: YExp,
}

impl Monomial {
    pub fn new(coeff: CycQ, qexp: QExp, yexp: YExp) -> Self {
        Monomial { coeff, qexp, yexp }
    }

    pub fn one() -> Self {
        Monomial::new(CycQ::one(), QExp::zero(), HalfInt::int(0))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            coeff: &self.coeff * &other.coeff,
            qexp: self.qexp + other.qexp,
            yexp: self.yexp + other.yexp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    Numerator,
    Denominator,
}

/// One factor `(1 - c q^a y^l)` of a product, or its reciprocal.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSpec {
    pub placement: Placement,
    pub coeff: CycQ,
    pub qexp: QExp,
    pub yexp: YExp,
}

impl FactorSpec {
    pub fn numerator(coeff: CycQ, qexp: QExp, yexp: YExp) -> Self {
        FactorSpec {
            placement: Placement::Numerator,
            coeff,
            qexp,
            yexp,
        }
    }

    pub fn denominator(coeff: CycQ, qexp: QExp, yexp: YExp) -> Self {
        FactorSpec {
            placement: Placement::Denominator,
            coeff,
            qexp,
            yexp,
        }
    }

    pub fn inverted(&self) -> Self {
        FactorSpec {
            placement: match self.placement {
                Placement::Numerator => Placement::Denominator,
                Placement::Denominator => Placement::Numerator,
            },
            ..self.clone()
        }
    }

    fn infinite_in_y(&self) -> bool {
        self.placement == Placement::Denominator && self.qexp == QExp::zero()
    }
}

/// Sparse truncated series. Keys are `(numerator of the q-exponent over
/// qden, twice the y-exponent)`; zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct JacobiSeries {
    qden: i64,
    window: Window,
    terms: BTreeMap<(i64, i64), CycQ>,
}

impl JacobiSeries {
    pub fn zero(window: Window) -> Self {
        JacobiSeries {
            qden: 1,
            window,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(window: Window) -> Self {
        Self::monomial(CycQ::one(), QExp::zero(), HalfInt::int(0), window)
    }

    /// `c q^a y^l` inside `window`; the cap is set to `l`.
    pub fn monomial(c: CycQ, q: QExp, y: YExp, window: Window) -> Self {
        let mut s = JacobiSeries::zero(Window { ycap: y, ..window });
        s.qden = q.den();
        if window.contains(q, y) && !c.is_zero() {
            s.terms.insert((q.num(), y.num2), c);
        }
        s.settle_cap();
        s
    }

    /// Builds a series from terms, dropping zeros and anything outside the window.
    pub fn from_terms(window: Window, terms: impl IntoIterator<Item = (QExp, YExp, CycQ)>) -> Self {
        let terms: Vec<_> = terms.into_iter().collect();
        let qden = terms.iter().fold(window.qmax.den(), |d, (q, _, _)| lcm(d, q.den()));
        let mut out = JacobiSeries {
            qden,
            window,
            terms: BTreeMap::new(),
        };
        for (q, y, c) in terms {
            if window.contains(q, y) {
                out.add_term(q, y, &c);
            }
        }
        out.settle_cap();
        out
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn qden(&self) -> i64 {
        self.qden
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn qexp_of(&self, qnum: i64) -> QExp {
        QExp::new(qnum, self.qden)
    }

    /// Terms in key order (ascending `q`, then ascending `y`).
    pub fn terms(&self) -> impl Iterator<Item = (QExp, YExp, &CycQ)> + '_ {
        self.terms
            .iter()
            .map(move |(&(q, y), c)| (self.qexp_of(q), HalfInt::from_num2(y), c))
    }

    /// Terms grouped by `q`, each group in descending `y`.
    pub fn q_slices(&self) -> Vec<(QExp, Vec<(YExp, &CycQ)>)> {
        let mut out: Vec<(QExp, Vec<(YExp, &CycQ)>)> = Vec::new();
        let mut last = None;
        for (&(q, y), c) in &self.terms {
            if last != Some(q) {
                out.push((self.qexp_of(q), Vec::new()));
                last = Some(q);
            }
            out.last_mut().unwrap().1.push((HalfInt::from_num2(y), c));
        }
        for (_, s) in &mut out {
            s.reverse();
        }
        out
    }

    /// Smallest stored `q`-exponent.
    pub fn valuation(&self) -> Option<QExp> {
        self.terms.keys().next().map(|&(q, _)| self.qexp_of(q))
    }

    pub fn max_y(&self) -> Option<YExp> {
        self.terms.keys().map(|&(_, y)| y).max().map(HalfInt::from_num2)
    }

    pub fn min_y(&self) -> Option<YExp> {
        self.terms.keys().map(|&(_, y)| y).min().map(HalfInt::from_num2)
    }

    pub fn coefficient(&self, q: QExp, y: YExp) -> Result<CycQ> {
        if !self.window.contains(q, y) {
            return Err(Error::outside(&q, &y));
        }
        if (q.num() * self.qden) % q.den() != 0 {
            return Ok(CycQ::zero());
        }
        let key = (q.num() * (self.qden / q.den()), y.num2);
        Ok(self.terms.get(&key).cloned().unwrap_or_else(CycQ::zero))
    }

    fn add_term(&mut self, q: QExp, y: YExp, c: &CycQ) {
        let qden = lcm(self.qden, q.den());
        if qden != self.qden {
            self.set_qden(qden);
        }
        let key = (q.num() * (qden / q.den()), y.num2);
        accumulate(&mut self.terms, key, c.clone());
    }

    fn set_qden(&mut self, qden: i64) {
        assert!(qden % self.qden == 0);
        let f = qden / self.qden;
        if f != 1 {
            self.terms = std::mem::take(&mut self.terms)
                .into_iter()
                .map(|((q, y), c)| ((q * f, y), c))
                .collect();
            self.qden = qden;
        }
    }

    fn with_qden(&self, qden: i64) -> std::borrow::Cow<'_, Self> {
        if qden == self.qden {
            std::borrow::Cow::Borrowed(self)
        } else {
            let mut s = self.clone();
            s.set_qden(qden);
            std::borrow::Cow::Owned(s)
        }
    }

    /// Lowers `ycap` to the tightest value the stored data certifies.
    fn settle_cap(&mut self) {
        let stored = self.max_y();
        self.window.ycap = match (stored, self.window.yfloor) {
            (Some(s), Some(f)) => s.max(f),
            (Some(s), None) => s,
            (None, Some(f)) => f,
            (None, None) => self.window.ycap,
        };
    }

    /// Drops everything outside a smaller window.
    pub fn restrict(&self, window: Window) -> Self {
        let window = Window {
            qmax: window.qmax.min(self.window.qmax),
            yfloor: max_floor(window.yfloor, self.window.yfloor),
            ycap: self.window.ycap,
        };
        let qlim = window.qmax.floor_at(self.qden);
        let mut out = JacobiSeries {
            qden: self.qden,
            window,
            terms: self
                .terms
                .iter()
                .filter(|(&(q, y), _)| q <= qlim && window.yfloor.is_none_or(|f| y >= f.num2))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        };
        out.settle_cap();
        out
    }

    pub fn scale(&self, c: &CycQ) -> Self {
        if c.is_zero() {
            return JacobiSeries {
                terms: BTreeMap::new(),
                ..self.clone()
            };
        }
        JacobiSeries {
            qden: self.qden,
            window: self.window,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        JacobiSeries {
            qden: self.qden,
            window: self.window,
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let qden = lcm(self.qden, other.qden);
        let window = Window {
            qmax: self.window.qmax.min(other.window.qmax),
            yfloor: max_floor(self.window.yfloor, other.window.yfloor),
            ycap: self.window.ycap.max(other.window.ycap),
        };
        let a = self.with_qden(qden);
        let b = other.with_qden(qden);
        let mut out = a.restrict(window).into_owned_qden(qden);
        for (&(q, y), c) in &b.terms {
            if window.contains(QExp::new(q, qden), HalfInt::from_num2(y)) {
                accumulate(&mut out.terms, (q, y), c.clone());
            }
        }
        out.window = window;
        out.settle_cap();
        out
    }

    fn into_owned_qden(mut self, qden: i64) -> Self {
        self.set_qden(qden);
        self
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Cauchy product. Each factor must have no unstored terms of lower
    /// `q`-order than its stored valuation.
    pub fn mul(&self, other: &Self) -> Self {
        let qden = lcm(self.qden, other.qden);
        let a = self.with_qden(qden);
        let b = other.with_qden(qden);
        let (wa, wb) = (a.window, b.window);
        let low = |s: &JacobiSeries| s.valuation().map_or(QExp::zero(), |v| v.min(QExp::zero()));
        let qmax = (wa.qmax + low(&b)).min(wb.qmax + low(&a));
        let yfloor = match (wa.yfloor, wb.yfloor) {
            (None, None) => None,
            (Some(fa), None) => Some(fa + wb.ycap),
            (None, Some(fb)) => Some(fb + wa.ycap),
            (Some(fa), Some(fb)) => Some((fa + wb.ycap).max(fb + wa.ycap)),
        };
        let window = Window {
            qmax,
            yfloor,
            ycap: wa.ycap + wb.ycap,
        };
        let qlim = qmax.floor_at(qden);
        let floor2 = yfloor.map(|f| f.num2);

        // b grouped by q, each slice in descending y so the floor test can break
        let mut slices: BTreeMap<i64, Vec<(i64, &CycQ)>> = BTreeMap::new();
        for (&(q, y), c) in &b.terms {
            slices.entry(q).or_default().push((y, c));
        }
        for s in slices.values_mut() {
            s.reverse();
        }

        let mut acc: HashMap<(i64, i64), CycQ> = HashMap::new();
        for (&(qa, ya), ca) in &a.terms {
            if qa > qlim - b.terms.keys().next().map_or(0, |k| k.0) {
                break;
            }
            for (&qb, slice) in slices.range(..=qlim - qa) {
                for &(yb, cb) in slice {
                    if floor2.is_some_and(|f| ya + yb < f) {
                        break;
                    }
                    let p = ca * cb;
                    match acc.entry((qa + qb, ya + yb)) {
                        std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += &p,
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(p);
                        }
                    }
                }
            }
        }
        let mut out = JacobiSeries {
            qden,
            window,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        };
        out.settle_cap();
        out
    }

    /// Multiplication by `c q^a y^l`; the window shifts exactly.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        let qden = lcm(self.qden, m.qexp.den());
        let a = self.with_qden(qden);
        let dq = m.qexp.num() * (qden / m.qexp.den());
        let dy = m.yexp.num2;
        let mut out = JacobiSeries {
            qden,
            window: Window {
                qmax: self.window.qmax + m.qexp,
                yfloor: self.window.yfloor.map(|f| f + m.yexp),
                ycap: self.window.ycap + m.yexp,
            },
            terms: BTreeMap::new(),
        };
        if !m.coeff.is_zero() {
            out.terms = a
                .terms
                .iter()
                .map(|(&(q, y), c)| ((q + dq, y + dy), c * &m.coeff))
                .collect();
        }
        out
    }

    /// The substitution `z -> z + alpha tau + beta`, i.e. `y -> e(beta) q^alpha y`:
    /// `c q^a y^l` becomes `c e(beta l) q^(a + alpha l) y^l`.
    pub fn substitute(&self, alpha: &Rational, beta: &Rational) -> Result<Self> {
        let alpha_q = QExp::from_rational(alpha);
        let half_alpha = alpha_q * QExp::new(1, 2);
        let qden = lcm(self.qden, half_alpha.den());
        let w = self.window;
        let qmax = if alpha_q.is_negative() {
            w.qmax + alpha_q * w.ycap.to_qexp()
        } else if alpha_q == QExp::zero() {
            w.qmax
        } else {
            let f = w.yfloor.ok_or_else(|| {
                Error::precondition(
                    "a positive tau-shift needs a y-floor: the series is unbounded below in y",
                )
            })?;
            w.qmax + alpha_q * f.to_qexp()
        };
        let a = self.with_qden(qden);
        let step = half_alpha.num() * (qden / half_alpha.den());
        let mut terms = BTreeMap::new();
        let qlim = qmax.floor_at(qden);
        for (&(q, y), c) in &a.terms {
            let nq = q + step * y;
            if nq > qlim {
                continue;
            }
            let phase = root_of_unity(&(beta * HalfInt::from_num2(y).to_rational()));
            terms.insert((nq, y), c * &phase);
        }
        let mut out = JacobiSeries {
            qden,
            window: Window { qmax, ..w },
            terms,
        };
        out.settle_cap();
        Ok(out)
    }

    /// `q -> q^qmult`, `y -> y^ymult`.
    pub fn scale_variables(&self, qmult: i64, ymult: i64) -> Self {
        assert!(qmult > 0 && ymult > 0, "variable scalings must be positive");
        let w = self.window;
        JacobiSeries {
            qden: self.qden,
            window: Window {
                qmax: w.qmax * qmult,
                yfloor: w.yfloor.map(|f| HalfInt::from_num2(f.num2 * ymult)),
                ycap: HalfInt::from_num2(w.ycap.num2 * ymult),
            },
            terms: self
                .terms
                .iter()
                .map(|(&(q, y), c)| ((q * qmult, y * ymult), c.clone()))
                .collect(),
        }
    }

    /// First coefficient on the common window where the two series disagree.
    pub fn first_difference(&self, other: &Self) -> Option<(QExp, YExp, CycQ, CycQ)> {
        let window = self.window.intersect(&other.window);
        let qden = lcm(self.qden, other.qden);
        let a = self.with_qden(qden);
        let b = other.with_qden(qden);
        let mut keys: Vec<(i64, i64)> = a.terms.keys().chain(b.terms.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        let zero = CycQ::zero();
        for (q, y) in keys {
            let (qe, ye) = (QExp::new(q, qden), HalfInt::from_num2(y));
            if !window.contains(qe, ye) {
                continue;
            }
            let ca = a.terms.get(&(q, y)).unwrap_or(&zero);
            let cb = b.terms.get(&(q, y)).unwrap_or(&zero);
            if ca != cb {
                return Some((qe, ye, ca.clone(), cb.clone()));
            }
        }
        None
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }
}

fn accumulate(terms: &mut BTreeMap<(i64, i64), CycQ>, key: (i64, i64), c: CycQ) {
    if c.is_zero() {
        return;
    }
    match terms.entry(key) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += &c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

/// `sum_{k>=0} (c q^a y^l)^k`, truncated to `window`. Only `window.qmax` and,
/// for `a = 0`, `window.yfloor` are consulted.
pub fn geometric_factor(c: &CycQ, qexp: QExp, yexp: YExp, window: Window) -> Result<JacobiSeries> {
    let divergent = || Error::Divergent {
        qexp: qexp.to_string(),
        yexp: yexp.to_string(),
    };
    if qexp.is_negative() || (qexp == QExp::zero() && yexp.num2 >= 0) {
        return Err(divergent());
    }
    let infinite = qexp == QExp::zero();
    let floor = if infinite {
        Some(window.yfloor.ok_or_else(|| {
            Error::precondition("expanding a q-free geometric factor needs a y-floor")
        })?)
    } else {
        None
    };
    let out_window = Window {
        qmax: window.qmax,
        yfloor: floor,
        ycap: HalfInt::int(0),
    };
    let mut terms = Vec::new();
    let mut power = CycQ::one();
    let mut k = 0i64;
    loop {
        let q = qexp * k;
        let y = HalfInt::from_num2(yexp.num2 * k);
        if q > window.qmax || floor.is_some_and(|f| y < f) {
            break;
        }
        terms.push((q, y, power.clone()));
        power = &power * c;
        k += 1;
    }
    Ok(JacobiSeries::from_terms(out_window, terms))
}

/// `prefactor * prod(factors)` expanded exactly on `window`.
///
/// Factors that are finite in `y` are multiplied first; the `q`-free
/// geometric factors are then expanded just deep enough that the product is
/// exact down to `window.yfloor`.
pub fn product_expand(prefactor: &Monomial, factors: &[FactorSpec], window: Window) -> Result<JacobiSeries> {
    let inner_q = window.qmax - prefactor.qexp;
    let mut finite = JacobiSeries::one(Window::exact(inner_q));
    let mut infinite = Vec::new();
    for f in factors {
        if f.qexp.is_negative() {
            return Err(Error::Divergent {
                qexp: f.qexp.to_string(),
                yexp: f.yexp.to_string(),
            });
        }
        if f.qexp > inner_q {
            continue;
        }
        if f.infinite_in_y() {
            infinite.push(f);
            continue;
        }
        let piece = match f.placement {
            Placement::Numerator => JacobiSeries::from_terms(
                Window::exact(inner_q),
                [
                    (QExp::zero(), HalfInt::int(0), CycQ::one()),
                    (f.qexp, f.yexp, -&f.coeff),
                ],
            ),
            Placement::Denominator => geometric_factor(&f.coeff, f.qexp, f.yexp, Window::exact(inner_q))?,
        };
        finite = finite.mul(&piece);
    }
    let mut out = finite;
    if !infinite.is_empty() {
        let target = window.yfloor.ok_or_else(|| {
            Error::precondition("a product with q-free denominator factors needs a y-floor")
        })?;
        let depth = target - prefactor.yexp - out.window.ycap;
        let gw = Window::target(inner_q, depth);
        let mut tail = JacobiSeries::one(Window::exact(inner_q));
        for f in infinite {
            tail = tail.mul(&geometric_factor(&f.coeff, f.qexp, f.yexp, gw)?);
        }
        out = out.mul(&tail);
    }
    Ok(out.mul_monomial(prefactor))
}

/// A one-variable truncated `q`-series, exact through `q^qmax`.
#[derive(Clone, Debug)]
pub struct QSeries {
    qden: i64,
    qmax: QExp,
    terms: BTreeMap<i64, CycQ>,
}

impl QSeries {
    pub fn zero(qmax: QExp) -> Self {
        QSeries {
            qden: qmax.den(),
            qmax,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(qmax: QExp, terms: impl IntoIterator<Item = (QExp, CycQ)>) -> Self {
        let mut s = QSeries::zero(qmax);
        for (q, c) in terms {
            s.add_term(q, &c);
        }
        s
    }

    pub fn qmax(&self) -> QExp {
        self.qmax
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Adds `c q^a`; silently ignores exponents beyond `qmax`.
    pub fn add_term(&mut self, q: QExp, c: &CycQ) {
        if q > self.qmax || c.is_zero() {
            return;
        }
        let qden = lcm(self.qden, q.den());
        if qden != self.qden {
            let f = qden / self.qden;
            self.terms = std::mem::take(&mut self.terms)
                .into_iter()
                .map(|(k, v)| (k * f, v))
                .collect();
            self.qden = qden;
        }
        let key = q.num() * (qden / q.den());
        let e = self.terms.entry(key).or_insert_with(CycQ::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (QExp, &CycQ)> + '_ {
        self.terms.iter().map(move |(&k, c)| (QExp::new(k, self.qden), c))
    }

    pub fn coefficient(&self, q: QExp) -> Result<CycQ> {
        if q > self.qmax {
            return Err(Error::outside(&q, &"0"));
        }
        if (q.num() * self.qden) % q.den() != 0 {
            return Ok(CycQ::zero());
        }
        let key = q.num() * (self.qden / q.den());
        Ok(self.terms.get(&key).cloned().unwrap_or_else(CycQ::zero))
    }

    pub fn truncate(&self, qmax: QExp) -> Self {
        QSeries::from_terms(
            qmax.min(self.qmax),
            self.terms().map(|(q, c)| (q, c.clone())),
        )
    }

    pub fn scale(&self, c: &CycQ) -> Self {
        QSeries::from_terms(self.qmax, self.terms().map(|(q, v)| (q, v * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate(self.qmax.min(other.qmax));
        for (q, c) in other.terms() {
            out.add_term(q, c);
        }
        out
    }

    /// Agreement through the smaller of the two truncation orders.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let qmax = self.qmax.min(other.qmax);
        let a = self.truncate(qmax);
        let b = other.truncate(qmax);
        let d = a.add(&b.scale(&CycQ::from_int(-1)));
        d.is_zero()
    }
}

impl fmt::Display for JacobiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (q, slice)) in self.q_slices().into_iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "q^{q}:")?;
            for (y, c) in slice {
                write!(f, " ({c})y^{y}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 [through q^{}]", self.qmax);
        }
        let terms: Vec<String> = self.terms().map(|(q, c)| format!("({c})q^{q}")).collect();
        write!(f, "{} [through q^{}]", terms.join(" + "), self.qmax)
    }
}

#[derive(Serialize, Deserialize)]
struct WindowWire {
    qmax: String,
    yfloor2: Option<i64>,
    ycap2: i64,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    q: String,
    y2: i64,
    coeff: CycQ,
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    qden: i64,
    window: WindowWire,
    terms: Vec<TermWire>,
}

impl Serialize for Window {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WindowWire {
            qmax: self.qmax.to_string(),
            yfloor2: self.yfloor.map(|f| f.num2),
            ycap2: self.ycap.num2,
        }
        .serialize(s)
    }
}

impl Serialize for JacobiSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (q, slice) in self.q_slices() {
            // exponents are written over the common denominator
            let qs = format!("{}/{}", q.num() * (self.qden / q.den()), self.qden);
            for (y, c) in slice {
                terms.push(TermWire {
                    q: qs.clone(),
                    y2: y.num2,
                    coeff: c.clone(),
                });
            }
        }
        SeriesWire {
            qden: self.qden,
            window: WindowWire {
                qmax: self.window.qmax.to_string(),
                yfloor2: self.window.yfloor.map(|f| f.num2),
                ycap2: self.window.ycap.num2,
            },
            terms,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for JacobiSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = SeriesWire::deserialize(d)?;
        let qmax: QExp = w.window.qmax.parse().map_err(D::Error::custom)?;
        let window = Window {
            qmax,
            yfloor: w.window.yfloor2.map(HalfInt::from_num2),
            ycap: HalfInt::from_num2(w.window.ycap2),
        };
        let mut terms = Vec::with_capacity(w.terms.len());
        for t in w.terms {
            let q: QExp = t.q.parse().map_err(D::Error::custom)?;
            terms.push((q, HalfInt::from_num2(t.y2), t.coeff));
        }
        let mut s = JacobiSeries::from_terms(window, terms);
        s.window.ycap = window.ycap;
        Ok(s)
    }
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            q: String,
            coeff: &'a CycQ,
        }
        #[derive(Serialize)]
        struct Wire<'a> {
            qden: i64,
            qmax: String,
            terms: Vec<Term<'a>>,
        }
        Wire {
            qden: self.qden,
            qmax: self.qmax.to_string(),
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| Term {
                    q: format!("{k}/{}", self.qden),
                    coeff: c,
                })
                .collect(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn y(n2: i64) -> YExp {
        HalfInt::from_num2(n2)
    }

    fn q(n: i64, d: i64) -> QExp {
        QExp::new(n, d)
    }

    fn c(n: i64) -> CycQ {
        CycQ::from_int(n)
    }

    #[test]
    fn addition_cancels() {
        let w = Window::target(q(5, 1), y(-20));
        let a = JacobiSeries::monomial(c(2), q(0, 1), y(-1), w);
        let b = JacobiSeries::monomial(c(-2), q(0, 1), y(-1), w);
        assert!(a.add(&b).is_zero());
        let one_plus = JacobiSeries::from_terms(w, [(q(0, 1), y(0), c(1)), (q(1, 1), y(2), c(1))]);
        let one_minus = JacobiSeries::from_terms(w, [(q(0, 1), y(0), c(1)), (q(1, 1), y(2), c(-1))]);
        let s = one_plus.add(&one_minus);
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient(q(0, 1), y(0)).unwrap(), c(2));
    }

    #[test]
    fn telescoping_geometric_series() {
        let w = Window::target(q(3, 1), y(-10));
        let g = geometric_factor(&c(1), q(0, 1), y(-2), w).unwrap();
        assert_eq!(g.len(), 6);
        let binom = JacobiSeries::from_terms(Window::exact(q(3, 1)), [(q(0, 1), y(0), c(1)), (q(0, 1), y(-2), c(-1))]);
        let p = g.mul(&binom);
        // the boundary monomial -y^-6 falls below the product floor
        assert_eq!(p.window().yfloor, Some(y(-10)));
        assert_eq!(p.len(), 1);
        assert!(p.coefficient(q(0, 1), y(0)).unwrap().is_one());
        assert!(p.coefficient(q(0, 1), y(-12)).is_err());
    }

    #[test]
    fn geometric_factor_rejects_divergent_input() {
        let w = Window::target(q(3, 1), y(-10));
        assert!(geometric_factor(&c(1), q(0, 1), y(2), w).is_err());
        assert!(geometric_factor(&c(1), q(0, 1), y(0), w).is_err());
        let g = geometric_factor(&c(1), q(1, 1), y(2), w).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.window().yfloor, None);
    }

    #[test]
    fn euler_product_pentagonal() {
        let factors: Vec<_> = (1..=5).map(|n| FactorSpec::numerator(c(1), q(n, 1), y(0))).collect();
        let p = product_expand(&Monomial::one(), &factors, Window::exact(q(5, 1))).unwrap();
        let coeffs: Vec<i64> = (0..=5)
            .map(|n| p.coefficient(q(n, 1), y(0)).unwrap().to_rational().unwrap().to_integer().try_into().unwrap())
            .collect();
        assert_eq!(coeffs, vec![1, -1, -1, 0, 0, 1]);
    }

    #[test]
    fn prefactor_only_product() {
        let pre = Monomial::new(c(2), q(0, 1), y(-1));
        let p = product_expand(&pre, &[], Window::target(q(4, 1), y(-20))).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coefficient(q(0, 1), y(-1)).unwrap(), c(2));
    }

    #[test]
    fn substitution_phases() {
        let w = Window::target(q(2, 1), y(-4));
        let s = JacobiSeries::monomial(c(1), q(0, 1), y(1), w);
        let t = s.substitute(&rat(0, 1), &rat(1, 2)).unwrap();
        assert_eq!(t.coefficient(q(0, 1), y(1)).unwrap(), CycQ::i());
        let u = s.substitute(&rat(1, 1), &rat(0, 1)).unwrap();
        // a unit tau-shift costs |floor| = 2 orders of q
        assert_eq!(u.window().qmax, q(0, 1));
        let deep = JacobiSeries::monomial(c(1), q(0, 1), y(1), Window::target(q(4, 1), y(-4)));
        let v = deep.substitute(&rat(1, 1), &rat(0, 1)).unwrap();
        assert!(v.coefficient(q(1, 2), y(1)).unwrap().is_one());
        let neg = deep.substitute(&rat(-1, 1), &rat(0, 1)).unwrap();
        assert_eq!(neg.window().qmax, q(7, 2));
    }

    #[test]
    fn variable_scaling() {
        let w = Window::target(q(2, 1), y(-4));
        let s = JacobiSeries::monomial(c(3), q(1, 8), y(1), w);
        let t = s.scale_variables(3, 2);
        assert_eq!(t.coefficient(q(3, 8), y(2)).unwrap(), c(3));
        assert_eq!(t.window().qmax, q(6, 1));
        assert_eq!(t.window().yfloor, Some(y(-8)));
    }

    #[test]
    fn out_of_window_queries_fail() {
        let w = Window::target(q(2, 1), y(-4));
        let z = JacobiSeries::zero(w);
        assert!(z.coefficient(q(1, 1), y(0)).unwrap().is_zero());
        assert!(z.coefficient(q(1, 1), y(-5)).is_err());
        assert!(z.coefficient(q(3, 1), y(0)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = Window::target(q(2, 1), y(-4));
        let s = JacobiSeries::from_terms(w, [(q(1, 8), y(1), CycQ::i()), (q(1, 8), y(-1), c(3)), (q(0, 1), y(0), c(1))]);
        let js = serde_json::to_string(&s).unwrap();
        assert!(js.starts_with(r#"{"qden":8,"window":{"qmax":"2","yfloor2":-4"#));
        let back: JacobiSeries = serde_json::from_str(&js).unwrap();
        assert!(back.agrees_with(&s));
        assert_eq!(back.len(), 3);
    }
}
