//! Data for the four pure D-type lambencies and the top-level operations on
//! their meromorphic Jacobi forms `psi_g`: the closed eta-theta expressions,
//! the free-field trace products, the splitting into finite and polar
//! parts, and the weight-zero quotient.

use std::collections::BTreeMap;
use std::fmt;

use crate::appell::{polar_part, residue_at_origin, split, PolarDatum, Split, TorsionPoint};
use crate::arith::{rat, root_of_unity, CycQ, HalfInt, QExp, Rational};
use crate::fock::{OscillatorSpec, Statistics, TraceSpec};
use crate::jacobi::{check_elliptic_shift, check_twisted_elliptic_shift};
use crate::series::{product_expand, FactorSpec, JacobiSeries, Monomial, QSeries, Window};
use crate::special::{canonical_labels, eta_factors, theta1_factors, theta2_factors};
use crate::{Error, Result};

/// A factor of an eta-theta quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `eta(a tau)`
    Eta(i64),
    /// `theta_1(a tau, b z)`
    Theta1(i64, i64),
    /// `theta_2(a tau, b z)`
    Theta2(i64, i64),
}

impl Atom {
    fn factors(self, qmax: QExp) -> (Monomial, Vec<FactorSpec>) {
        match self {
            Atom::Eta(a) => eta_factors(a, qmax),
            Atom::Theta1(a, b) => theta1_factors(a, b, qmax),
            Atom::Theta2(a, b) => theta2_factors(a, b, qmax),
        }
    }
}

fn tau(a: i64) -> String {
    if a == 1 {
        "tau".into()
    } else {
        format!("{a}tau")
    }
}

fn zed(b: i64) -> String {
    if b == 1 {
        "z".into()
    } else {
        format!("{b}z")
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::Eta(a) => write!(f, "eta({})", tau(a)),
            Atom::Theta1(a, b) => write!(f, "theta1({},{})", tau(a), zed(b)),
            Atom::Theta2(a, b) => write!(f, "theta2({},{})", tau(a), zed(b)),
        }
    }
}

/// `scalar * prod atom^power`. Negative powers are expanded factor by factor,
/// each `(1 - X)^-1` as a geometric series in the region `|y| > 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaThetaExpr {
    pub scalar: CycQ,
    pub powers: BTreeMap<Atom, i64>,
}

impl EtaThetaExpr {
    pub fn new(scalar: CycQ) -> Self {
        EtaThetaExpr {
            scalar,
            powers: BTreeMap::new(),
        }
    }

    pub fn with(mut self, atom: Atom, power: i64) -> Self {
        let p = self.powers.entry(atom).or_insert(0);
        *p += power;
        if *p == 0 {
            self.powers.remove(&atom);
        }
        self
    }

    pub fn times(&self, other: &EtaThetaExpr) -> Self {
        let mut out = EtaThetaExpr::new(&self.scalar * &other.scalar);
        out.powers = self.powers.clone();
        for (&a, &p) in &other.powers {
            out = out.with(a, p);
        }
        out
    }

    /// The leading monomial: the scalar times every atom's prefactor.
    pub fn prefactor(&self) -> Monomial {
        let mut pre = Monomial::new(self.scalar.clone(), QExp::zero(), HalfInt::int(0));
        for (&atom, &p) in &self.powers {
            let (m, _) = atom.factors(QExp::zero());
            let base = if p > 0 { m } else { invert(&m) };
            for _ in 0..p.abs() {
                pre = pre.mul(&base);
            }
        }
        pre
    }

    pub fn evaluate(&self, window: Window) -> Result<JacobiSeries> {
        let pre = self.prefactor();
        let inner = window.qmax - pre.qexp;
        let mut factors = Vec::new();
        for (&atom, &p) in &self.powers {
            let (_, fs) = atom.factors(inner);
            for _ in 0..p.abs() {
                if p > 0 {
                    factors.extend(fs.iter().cloned());
                } else {
                    factors.extend(fs.iter().map(FactorSpec::inverted));
                }
            }
        }
        product_expand(&pre, &factors, window)
    }
}

fn invert(m: &Monomial) -> Monomial {
    Monomial::new(
        m.coeff.inverse().expect("atom prefactors are nonzero"),
        -m.qexp,
        -m.yexp,
    )
}

impl fmt::Display for EtaThetaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.scalar)?;
        for (atom, p) in &self.powers {
            if *p == 1 {
                write!(f, " {atom}")?;
            } else {
                write!(f, " {atom}^{p}")?;
            }
        }
        Ok(())
    }
}

/// One conjugacy class: the permutation character, the eigenvalue phases
/// on the fermionic and bosonic spaces, and the closed form of `psi_g`.
#[derive(Clone, Debug)]
pub struct ClassData {
    pub name: &'static str,
    pub chi: i64,
    /// `lambda_i = e(phase)`, one per fermionic pair.
    pub fermion_phases: Vec<Rational>,
    /// `check-lambda_j = e(phase)`, one per bosonic pair.
    pub boson_phases: Vec<Rational>,
    pub closed_form: EtaThetaExpr,
}

#[derive(Clone, Debug)]
pub struct LambencyData {
    pub label: &'static str,
    /// `M`; the index of `psi_g` is `M/4`.
    pub big_m: i64,
    pub root_system: &'static str,
    pub group: &'static str,
    pub fermion_charge: i64,
    /// The `y`-charge of each bosonic pair, aligned with `boson_phases`.
    pub boson_charges: Vec<i64>,
    pub classes: Vec<ClassData>,
}

impl LambencyData {
    pub fn index(&self) -> HalfInt {
        HalfInt::from_num2(self.big_m / 2)
    }

    pub fn class(&self, name: &str) -> Result<&ClassData> {
        self.classes
            .iter()
            .find(|c| c.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownClass {
                lambency: self.label.to_string(),
                class: name.to_string(),
            })
    }

    /// The class of the identity.
    pub fn identity(&self) -> &ClassData {
        &self.classes[0]
    }
}

pub const LAMBENCIES: [&str; 4] = ["10+5", "14+7", "22+11", "46+23"];

fn two_i(sign: i64) -> CycQ {
    CycQ::i().scale(&rat(2 * sign, 1))
}

fn phases(xs: &[(i64, i64)]) -> Vec<Rational> {
    xs.iter().map(|&(a, b)| rat(a, b)).collect()
}

fn class(name: &'static str, chi: i64, f: &[(i64, i64)], b: &[(i64, i64)], closed: EtaThetaExpr) -> ClassData {
    ClassData {
        name,
        chi,
        fermion_phases: phases(f),
        boson_phases: phases(b),
        closed_form: closed,
    }
}

use Atom::{Eta, Theta1, Theta2};

fn lambency_10_5() -> LambencyData {
    let base = |s| EtaThetaExpr::new(two_i(s)).with(Eta(1), 3);
    LambencyData {
        label: "10+5",
        big_m: 10,
        root_system: "D6^4",
        group: "S4",
        fermion_charge: 2,
        boson_charges: vec![1, 1, 1],
        classes: vec![
            class(
                "1A",
                4,
                &[(0, 1), (0, 1)],
                &[(0, 1), (0, 1), (0, 1)],
                base(1).with(Theta1(1, 2), 2).with(Theta1(1, 1), -3),
            ),
            class(
                "2A",
                0,
                &[(0, 1), (0, 1)],
                &[(0, 1), (1, 2), (1, 2)],
                base(-1).with(Theta1(1, 2), 2).with(Theta1(1, 1), -1).with(Theta2(1, 1), -2),
            ),
            class(
                "3A",
                1,
                &[(1, 3), (2, 3)],
                &[(0, 1), (1, 3), (2, 3)],
                base(1).with(Theta1(3, 6), 1).with(Theta1(1, 2), -1).with(Theta1(3, 3), -1),
            ),
            class(
                "2B",
                2,
                &[(0, 1), (1, 2)],
                &[(0, 1), (0, 1), (1, 2)],
                base(1)
                    .with(Theta1(1, 2), 1)
                    .with(Theta2(1, 2), 1)
                    .with(Theta1(1, 1), -2)
                    .with(Theta2(1, 1), -1),
            ),
            class(
                "4A",
                0,
                &[(0, 1), (1, 2)],
                &[(1, 2), (1, 4), (3, 4)],
                four_a_closed_form(),
            ),
        ],
    }
}

/// `-2i eta(tau) eta(2tau) theta1(tau,2z) theta2(tau,2z) / (theta2(tau,z) theta2(2tau,2z))`.
///
/// The factor `theta2(tau,z)^-1` is needed for weight 1 and index 5/2;
/// without it every `y`-exponent is integral.
pub fn four_a_closed_form() -> EtaThetaExpr {
    EtaThetaExpr::new(two_i(-1))
        .with(Eta(1), 1)
        .with(Eta(2), 1)
        .with(Theta1(1, 2), 1)
        .with(Theta2(1, 2), 1)
        .with(Theta2(1, 1), -1)
        .with(Theta2(2, 2), -1)
}

fn lambency_14_7() -> LambencyData {
    let base = |s| EtaThetaExpr::new(two_i(s)).with(Eta(1), 3);
    LambencyData {
        label: "14+7",
        big_m: 14,
        root_system: "D8^3",
        group: "S3",
        fermion_charge: 3,
        boson_charges: vec![1, 1],
        classes: vec![
            class("1A", 3, &[(0, 1)], &[(0, 1), (0, 1)], base(1).with(Theta1(1, 3), 1).with(Theta1(1, 1), -2)),
            class(
                "2A",
                1,
                &[(1, 2)],
                &[(0, 1), (1, 2)],
                base(1).with(Theta2(1, 3), 1).with(Theta1(1, 1), -1).with(Theta2(1, 1), -1),
            ),
            class(
                "3A",
                0,
                &[(0, 1)],
                &[(1, 3), (2, 3)],
                EtaThetaExpr::new(two_i(-1))
                    .with(Eta(3), 1)
                    .with(Theta1(1, 1), 1)
                    .with(Theta1(1, 3), 1)
                    .with(Theta1(3, 3), -1),
            ),
        ],
    }
}

fn lambency_22_11() -> LambencyData {
    LambencyData {
        label: "22+11",
        big_m: 22,
        root_system: "D12^2",
        group: "Z2",
        fermion_charge: 4,
        boson_charges: vec![1, 2],
        classes: vec![
            class(
                "1A",
                2,
                &[(0, 1)],
                &[(0, 1), (0, 1)],
                EtaThetaExpr::new(two_i(1))
                    .with(Eta(1), 3)
                    .with(Theta1(1, 4), 1)
                    .with(Theta1(1, 1), -1)
                    .with(Theta1(1, 2), -1),
            ),
            class(
                "2A",
                0,
                &[(0, 1)],
                &[(1, 2), (1, 2)],
                EtaThetaExpr::new(two_i(-1))
                    .with(Eta(1), 3)
                    .with(Theta1(1, 4), 1)
                    .with(Theta2(1, 1), -1)
                    .with(Theta2(1, 2), -1),
            ),
        ],
    }
}

fn lambency_46_23() -> LambencyData {
    LambencyData {
        label: "46+23",
        big_m: 46,
        root_system: "D24",
        group: "1",
        fermion_charge: 6,
        boson_charges: vec![2, 3],
        classes: vec![class(
            "1A",
            1,
            &[(0, 1)],
            &[(0, 1), (0, 1)],
            EtaThetaExpr::new(two_i(1))
                .with(Eta(1), 3)
                .with(Theta1(1, 6), 1)
                .with(Theta1(1, 2), -1)
                .with(Theta1(1, 3), -1),
        )],
    }
}

/// Looks up a lambency by label: `10+5`, `14+7`, `22+11` or `46+23`
/// (the bare `5/2`, `7/2`, `11/2`, `23/2` are accepted too).
pub fn lambency(label: &str) -> Result<LambencyData> {
    match label.trim() {
        "10+5" | "5/2" => Ok(lambency_10_5()),
        "14+7" | "7/2" => Ok(lambency_14_7()),
        "22+11" | "11/2" => Ok(lambency_22_11()),
        "46+23" | "23/2" => Ok(lambency_46_23()),
        other => Err(Error::UnknownLambency(other.to_string())),
    }
}

pub fn all_lambencies() -> Vec<LambencyData> {
    LAMBENCIES.iter().map(|l| lambency(l).expect("known label")).collect()
}

/// The free-field trace for `class`: prefactor `2 y^(-1/2)`, two neutral
/// fermions, one charged fermionic pair per `lambda_i` and one bosonic pair
/// per `check-lambda_j`.
pub fn trace_spec(data: &LambencyData, class: &ClassData) -> TraceSpec {
    let mut oscillators = Vec::new();
    for p in &class.fermion_phases {
        oscillators.extend(OscillatorSpec::pair(
            Statistics::Fermionic,
            HalfInt::int(data.fermion_charge),
            p.clone(),
        ));
    }
    for (p, &k) in class.boson_phases.iter().zip(&data.boson_charges) {
        oscillators.extend(OscillatorSpec::pair(Statistics::Bosonic, HalfInt::int(k), p.clone()));
    }
    TraceSpec {
        prefactor: Monomial::new(CycQ::from_int(2), QExp::zero(), HalfInt::from_num2(-1)),
        eta_squared: true,
        oscillators,
    }
}

pub fn psi_closed(data: &LambencyData, class: &str, window: Window) -> Result<JacobiSeries> {
    data.class(class)?.closed_form.evaluate(window)
}

pub fn psi_product(data: &LambencyData, class: &str, window: Window) -> Result<JacobiSeries> {
    let c = data.class(class)?;
    crate::fock::trace_by_product(&trace_spec(data, c), window)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub q: QExp,
    pub y: HalfInt,
    pub closed: CycQ,
    pub product: CycQ,
}

#[derive(Clone, Debug)]
pub struct ClassCheck {
    pub lambency: &'static str,
    pub class: &'static str,
    /// Largest `q`-exponent at which the two expansions were compared.
    pub max_checked: QExp,
    pub terms_compared: usize,
    pub mismatch: Option<Mismatch>,
    /// When the two sides differ, a monomial `r` with `closed = r * product`
    /// on the whole window, if there is one.
    pub ratio: Option<Monomial>,
}

impl ClassCheck {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub lambency: &'static str,
    pub window: Window,
    pub checks: Vec<ClassCheck>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ClassCheck::passed)
    }
}

fn leading(s: &JacobiSeries) -> Option<Monomial> {
    let (q, slice) = s.q_slices().into_iter().next()?;
    let (y, c) = slice.into_iter().next()?;
    Some(Monomial::new(c.clone(), q, y))
}

/// The monomial `r` with `a = r b` on the common window, if one exists.
fn monomial_ratio(a: &JacobiSeries, b: &JacobiSeries) -> Option<Monomial> {
    let (la, lb) = (leading(a)?, leading(b)?);
    let r = Monomial::new(&la.coeff * &lb.coeff.inverse()?, la.qexp - lb.qexp, la.yexp - lb.yexp);
    let shifted = b.mul_monomial(&r);
    if a.agrees_with(&shifted) {
        Some(r)
    } else {
        None
    }
}

fn check_class(data: &LambencyData, class: &ClassData, window: Window) -> Result<ClassCheck> {
    let closed = class.closed_form.evaluate(window)?;
    let product = crate::fock::trace_by_product(&trace_spec(data, class), window)?;
    let common = closed.window().intersect(&product.window());
    let mismatch = closed.first_difference(&product).map(|(q, y, a, b)| Mismatch {
        q,
        y,
        closed: a,
        product: b,
    });
    let ratio = if mismatch.is_some() {
        monomial_ratio(&closed, &product)
    } else {
        None
    };
    Ok(ClassCheck {
        lambency: data.label,
        class: class.name,
        max_checked: common.qmax,
        terms_compared: closed.len().max(product.len()),
        mismatch,
        ratio,
    })
}

/// Compares the closed form with the trace product for every class.
/// Mismatches are reported, not raised; errors only come from expansion.
pub fn verify_theorem(data: &LambencyData, window: Window) -> Result<TheoremReport> {
    let checks = data
        .classes
        .iter()
        .map(|c| check_class(data, c, window))
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoremReport {
        lambency: data.label,
        window,
        checks,
    })
}

/// `D_(0,0)` of `psi_g` from its closed form at two floors.
pub fn residue(data: &LambencyData, class: &str, qmax: QExp, floors: (HalfInt, HalfInt)) -> Result<CycQ> {
    let a = psi_closed(data, class, Window::target(qmax, floors.0))?;
    let b = psi_closed(data, class, Window::target(qmax, floors.1))?;
    residue_at_origin(&a, &b)
}

/// The polar datum `((0,0), -2 chi_g)`.
pub fn polar_data(class: &ClassData) -> Vec<PolarDatum> {
    vec![PolarDatum {
        point: TorsionPoint::origin(),
        d: CycQ::from_int(-2 * class.chi),
    }]
}

pub fn split_psi(data: &LambencyData, class: &str, window: Window) -> Result<Split> {
    let c = data.class(class)?;
    let psi = c.closed_form.evaluate(window)?;
    split(&psi, data.index(), &polar_data(c))
}

/// The sign `s` for which `psi_g + 2 chi_g mu` satisfies the `(1,0)`
/// elliptic relation multiplied by `s`, with the number of checked pairs.
/// `s = 1` is the untwisted law that a theta decomposition needs.
pub fn elliptic_sign(data: &LambencyData, class: &str, window: Window) -> Result<Option<(i64, usize)>> {
    let c = data.class(class)?;
    let psi = c.closed_form.evaluate(window)?;
    let finite = psi.sub(&polar_part(&polar_data(c), data.index(), window)?);
    for sign in [1, -1] {
        if let Ok(n) = check_twisted_elliptic_shift(&finite, data.index(), sign) {
            return Ok(Some((sign, n)));
        }
    }
    Ok(None)
}

/// For each label `r`, the representatives `l = r mod 2m` at which the
/// leading coefficient of `h_r` was compared against the expansion.
pub fn checked_representatives(s: &Split) -> BTreeMap<HalfInt, Vec<HalfInt>> {
    let w = s.finite.window();
    let m = s.coefficients.m;
    let four_m = m.to_qexp() * 4;
    let step = 2 * m.num2;
    let mut out = BTreeMap::new();
    for (&r, h) in &s.coefficients.h {
        let base = match h.terms().next() {
            Some((b, _)) => b,
            None => {
                out.insert(r, Vec::new());
                continue;
            }
        };
        let mut reps = Vec::new();
        let floor = w.yfloor.map_or(-4 * step, |f| f.num2);
        let mut l = r.num2 - step * ((r.num2 - floor).div_euclid(step));
        while l <= 4 * step + r.num2.abs() {
            let lq = QExp::new(l, 2);
            let l2 = lq * lq * QExp::new(four_m.den(), four_m.num());
            let y = HalfInt::from_num2(l);
            if w.contains(base + l2, y) {
                reps.push(y);
            }
            l += step;
        }
        out.insert(r, reps);
    }
    out
}

/// `H_{g,2s} = e(s/2) h_s` for `s` in `-M/4+1, ..., M/4`.
pub fn h_series(data: &LambencyData, class: &str, window: Window) -> Result<BTreeMap<HalfInt, QSeries>> {
    let s = split_psi(data, class, window)?;
    Ok(h_from_split(data, &s))
}

pub fn h_from_split(data: &LambencyData, s: &Split) -> BTreeMap<HalfInt, QSeries> {
    canonical_labels(data.index())
        .into_iter()
        .map(|r| {
            let h = s.coefficients.get(r).cloned().unwrap_or_else(|| QSeries::zero(s.finite.window().qmax));
            let phase = root_of_unity(&(r.to_rational() * rat(1, 2)));
            (r, h.scale(&phase))
        })
        .collect()
}

/// How `H_{g,-2s}` relates to `H_{g,2s}`: the constant `c` with
/// `H_{-2s} = c H_{2s}` for every `s` where both sides are nonzero, if any.
pub fn h_antisymmetry(h: &BTreeMap<HalfInt, QSeries>) -> Option<CycQ> {
    let mut found: Option<CycQ> = None;
    for (&s, hs) in h {
        if !s.is_positive() {
            continue;
        }
        let Some(hm) = h.get(&-s) else { continue };
        let (Some((_, a)), Some((_, b))) = (hs.terms().next(), hm.terms().next()) else {
            if hs.is_zero() != hm.is_zero() {
                return None;
            }
            continue;
        };
        let c = b * &a.inverse()?;
        if !hm.agrees_with(&hs.scale(&c)) {
            return None;
        }
        match &found {
            Some(prev) if *prev != c => return None,
            _ => found = Some(c),
        }
    }
    found
}

/// `psi_e theta_1(tau,z) / (i eta^3)` as an eta-theta expression.
pub fn weight0_expr(data: &LambencyData) -> EtaThetaExpr {
    let inv_i = -CycQ::i();
    data.identity()
        .closed_form
        .times(&EtaThetaExpr::new(inv_i).with(Theta1(1, 1), 1).with(Eta(1), -3))
}

pub fn weight0_quotient(data: &LambencyData, window: Window) -> Result<JacobiSeries> {
    weight0_expr(data).evaluate(window)
}

/// The `y`-range of each `q`-slice.
pub type Support = Vec<(QExp, HalfInt, HalfInt)>;

fn support(s: &JacobiSeries, qmax: QExp) -> Support {
    s.q_slices()
        .into_iter()
        .filter(|(q, _)| *q <= qmax)
        .map(|(q, slice)| (q, slice.last().unwrap().0, slice[0].0))
        .collect()
}

/// Checks that the weight-zero quotient has the same, finite `y`-support at
/// two floors through `q^qmax`, and that it satisfies the `(1,0)` elliptic
/// relation at index `M/4 + 1/2`. Returns the support and the number of
/// coefficient pairs checked.
pub fn weight0_signature(data: &LambencyData, qmax: QExp, floors: (HalfInt, HalfInt)) -> Result<(Support, usize)> {
    let a = weight0_quotient(data, Window::target(qmax, floors.0))?;
    let b = weight0_quotient(data, Window::target(qmax, floors.1))?;
    if let Some((q, y, x, z)) = a.first_difference(&b) {
        return Err(Error::Consistency {
            q: q.to_string(),
            y: y.to_string(),
            expected: z.to_string(),
            found: x.to_string(),
        });
    }
    let (sa, sb) = (support(&a, qmax), support(&b, qmax));
    if sa != sb {
        return Err(Error::Stabilisation {
            floor1: floors.0.to_string(),
            floor2: floors.1.to_string(),
            first: format!("{sa:?}"),
            second: format!("{sb:?}"),
        });
    }
    for (q, lo, _) in &sa {
        if *lo <= floors.0 {
            return Err(Error::Precondition(format!("y-support at q^{q} reaches the floor {}", floors.0)));
        }
    }
    let index = data.index() + HalfInt::from_num2(1);
    let checked = check_elliptic_shift(&b, index)?;
    Ok((sa, checked))
}

/// `psi_e theta_1(tau,2z) / theta_1(tau,z)`, the D-to-A prefactor applied to
/// the identity form. Returns the expansion once it agrees at two floors.
pub fn a_type_product(data: &LambencyData, window: Window, deeper: HalfInt) -> Result<JacobiSeries> {
    let expr = data
        .identity()
        .closed_form
        .times(&EtaThetaExpr::new(CycQ::one()).with(Theta1(1, 2), 1).with(Theta1(1, 1), -1));
    let a = expr.evaluate(window)?;
    let b = expr.evaluate(Window { yfloor: Some(deeper), ..window })?;
    if let Some((q, y, x, z)) = a.first_difference(&b) {
        return Err(Error::Consistency {
            q: q.to_string(),
            y: y.to_string(),
            expected: z.to_string(),
            found: x.to_string(),
        });
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n2: i64) -> HalfInt {
        HalfInt::from_num2(n2)
    }

    #[test]
    fn table_shape() {
        let all = all_lambencies();
        assert_eq!(all.iter().map(|l| l.classes.len()).sum::<usize>(), 11);
        for l in &all {
            let mp = l.big_m / 2 + 1;
            assert_eq!(24 % mp, 0, "{}", l.label);
            for c in &l.classes {
                assert_eq!(c.boson_phases.len(), l.boson_charges.len());
            }
            assert_eq!(l.identity().name, "1A");
        }
        assert!(matches!(lambency("6+3"), Err(Error::UnknownLambency(_))));
        assert!(matches!(lambency("10+5").unwrap().class("5A"), Err(Error::UnknownClass { .. })));
    }

    #[test]
    fn closed_form_leading_term() {
        // 2i eta^3 theta1(2z)^2 theta1(z)^-3 starts -2 y^(1/2) + ...
        let l = lambency("10+5").unwrap();
        let s = psi_closed(&l, "1A", Window::target(QExp::int(1), h(-12))).unwrap();
        assert_eq!(s.valuation(), Some(QExp::zero()));
        assert_eq!(s.q_slices()[0].1[0].0, h(1));
        assert_eq!(s.coefficient(QExp::zero(), h(1)).unwrap(), CycQ::from_int(-2));
    }

    #[test]
    fn product_leading_term() {
        let l = lambency("46+23").unwrap();
        let s = psi_product(&l, "1A", Window::target(QExp::int(1), h(-20))).unwrap();
        assert_eq!(s.q_slices()[0].1[0].0, h(-1));
        assert_eq!(s.coefficient(QExp::zero(), h(-1)).unwrap(), CycQ::from_int(2));
    }

    #[test]
    fn four_a_via_doubling() {
        // theta1(tau,2z) theta2(tau,2z) = theta1(2tau,4z) eta(tau)^2 / eta(2tau)
        let w = Window::target(QExp::int(5), h(-30));
        let l = lambency("10+5").unwrap();
        let direct = EtaThetaExpr::new(two_i(-1))
            .with(Eta(1), 3)
            .with(Theta1(2, 4), 1)
            .with(Theta2(1, 1), -1)
            .with(Theta2(2, 2), -1);
        let a = psi_closed(&l, "4A", w).unwrap();
        assert!(a.agrees_with(&direct.evaluate(w).unwrap()));
        assert!(a.terms().all(|(_, y, _)| !y.is_integral()));
        let printed = four_a_closed_form().with(Theta2(1, 1), 1);
        assert!(printed.evaluate(w).unwrap().terms().all(|(_, y, _)| y.is_integral()));
    }

    #[test]
    fn weight0_cancels_eta() {
        let l = lambency("10+5").unwrap();
        let e = weight0_expr(&l);
        assert!(!e.powers.contains_key(&Eta(1)));
        assert_eq!(e.powers.get(&Theta1(1, 1)), Some(&-2));
        assert_eq!(e.scalar, CycQ::from_int(2));
    }

    #[test]
    fn residue_of_identity() {
        let l = lambency("10+5").unwrap();
        let d = residue(&l, "1A", QExp::int(2), (h(-20), h(-30))).unwrap();
        assert_eq!(d, CycQ::from_int(-8));
    }
}
