//! The verification suites behind `umbral verify`. Each suite checks one
//! exact identity over a fixed registry of cases; the defaults are the
//! parameters the acceptance run uses.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::appell::{appell_lerch, elliptic_phase, orbit_index, reduce_to_standard, replay, TorsionPoint};
use crate::arith::{rat, HalfInt, QExp};
use crate::fock::{trace_by_enumeration, trace_by_product, DEFAULT_BUDGET};
use crate::jacobi::{exact_divisor_map, exact_divisors, exact_product, ez_operator, o_set, omega_matrix, shift_safe_theta_window};
use crate::series::{JacobiSeries, Window};
use crate::special::{theta_mr, triple_product_sign, ThetaIndex};
use crate::umbral::{
    all_lambencies, checked_representatives, elliptic_sign, h_antisymmetry, h_from_split, lambency, residue,
    split_psi, trace_spec, verify_theorem, weight0_signature, LambencyData,
};
use crate::{Error, Result};

pub const SUITES: [&str; 10] = [
    "triple-product",
    "ez-omega",
    "theorems",
    "fock",
    "split",
    "residue",
    "divisors",
    "orbits",
    "appell-lerch",
    "weight0",
];

/// The `(m, n)` pairs of the Eichler-Zagier suite, `m` as `2m`.
pub const EZ_CASES: [(i64, u32); 7] = [(2, 1), (3, 3), (5, 1), (5, 5), (7, 7), (11, 11), (23, 23)];

/// Optional overrides; `None` means the suite default.
#[derive(Clone, Debug, Default)]
pub struct SuiteParams {
    pub qorder: Option<QExp>,
    pub yfloor: Option<HalfInt>,
    pub yfloor2: Option<HalfInt>,
    pub m: Option<HalfInt>,
    pub n: Option<u32>,
    pub lambency: Option<String>,
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MismatchRecord {
    pub lambency: String,
    pub class: String,
    pub q: String,
    pub y: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub summary: String,
    pub notes: Vec<String>,
    pub mismatches: Vec<MismatchRecord>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteOutcome {
    fn new(suite: &'static str) -> Self {
        SuiteOutcome {
            suite,
            passed: true,
            cases: 0,
            summary: String::new(),
            notes: Vec::new(),
            mismatches: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn fail(&mut self, record: MismatchRecord) {
        self.passed = false;
        self.mismatches.push(record);
    }

    fn fail_note(&mut self, note: String) {
        self.passed = false;
        self.notes.push(note);
    }
}

fn record(lambency: &str, class: &str, q: impl ToString, y: impl ToString, expected: impl ToString, got: impl ToString) -> MismatchRecord {
    MismatchRecord {
        lambency: lambency.to_string(),
        class: class.to_string(),
        q: q.to_string(),
        y: y.to_string(),
        expected: expected.to_string(),
        got: got.to_string(),
    }
}

/// A mismatch record from a consistency error, or `None` for other errors.
fn record_error(lambency: &str, class: &str, e: &Error) -> Option<MismatchRecord> {
    match e {
        Error::Consistency { q, y, expected, found } => Some(record(lambency, class, q, y, expected, found)),
        _ => None,
    }
}

fn first_mismatch(lambency: &str, class: &str, got: &JacobiSeries, expected: &JacobiSeries) -> Option<MismatchRecord> {
    got.first_difference(expected).map(|(q, y, a, b)| record(lambency, class, q, y, b, a))
}

pub fn run_suite(name: &str, params: &SuiteParams) -> Result<SuiteOutcome> {
    let start = Instant::now();
    let mut out = match name {
        "triple-product" => triple_product(params)?,
        "ez-omega" => ez_omega(params)?,
        "theorems" => theorems(params)?,
        "fock" => fock(params)?,
        "split" => splitting(params)?,
        "residue" => residues(params)?,
        "divisors" => divisors(params),
        "orbits" => orbits(params),
        "appell-lerch" => appell(params)?,
        "weight0" => weight0(params)?,
        other => {
            return Err(Error::Precondition(format!(
                "unknown suite `{other}`; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    out.elapsed = start.elapsed();
    Ok(out)
}

fn selected(params: &SuiteParams) -> Result<Vec<LambencyData>> {
    match &params.lambency {
        Some(l) => Ok(vec![lambency(l)?]),
        None => Ok(all_lambencies()),
    }
}

fn triple_product(p: &SuiteParams) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("triple-product");
    let qmax = p.qorder.unwrap_or(QExp::int(20) + QExp::new(1, 8));
    let w = Window::target(qmax, p.yfloor.unwrap_or(HalfInt::int(-60)));
    out.cases = 1;
    match triple_product_sign(w) {
        Ok(sigma) => out.summary = format!("sum form = {sigma} * product form through q^{qmax}"),
        Err(e) => {
            out.summary = "no global sign relates the two forms".into();
            if let Some(r) = record_error("", "", &e) {
                out.fail(r);
            } else {
                out.fail_note(e.to_string());
            }
        }
    }
    Ok(out)
}

fn ez_case(m: HalfInt, n: u32, qorder: i64, out: &mut SuiteOutcome) -> Result<()> {
    let w = shift_safe_theta_window(m, qorder);
    let om = omega_matrix(m, n)?;
    for (i, &r) in om.labels.iter().enumerate() {
        let th = theta_mr(ThetaIndex::new(m, r)?, w);
        let image = ez_operator(&th, m, n)?;
        let mut target = JacobiSeries::zero(w);
        for (j, &r2) in om.labels.iter().enumerate() {
            if om.entries[i][j] == 1 {
                target = target.add(&theta_mr(ThetaIndex::new(m, r2)?, w));
            }
        }
        out.cases += 1;
        if image.window().qmax < QExp::int(qorder) {
            out.fail_note(format!("m = {m}, n = {n}, r = {r}: only exact through q^{}", image.window().qmax));
        }
        if let Some(rec) = first_mismatch(&format!("m={m}"), &format!("n={n},r={r}"), &image, &target) {
            out.fail(rec);
        }
    }
    Ok(())
}

fn ez_omega(p: &SuiteParams) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("ez-omega");
    let qorder = p.qorder.map_or(4, |q| q.ceil_at(1).max(1));
    let cases: Vec<(HalfInt, u32)> = match (p.m, p.n) {
        (Some(m), Some(n)) => vec![(m, n)],
        (Some(m), None) => exact_divisors(crate::jacobi::mtilde(m)).into_iter().map(|n| (m, n)).collect(),
        (None, _) => EZ_CASES.iter().map(|&(m2, n)| (HalfInt::from_num2(m2), n)).collect(),
    };
    for (m, n) in &cases {
        ez_case(*m, *n, qorder, &mut out)?;
    }
    out.summary = format!("{} (m, n) pairs, {} theta functions, exact through q^{qorder}", cases.len(), out.cases);
    Ok(out)
}

fn theorems(p: &SuiteParams) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("theorems");
    let w = Window::target(p.qorder.unwrap_or(QExp::int(8)), p.yfloor.unwrap_or(HalfInt::int(-40)));
    let data = selected(p)?;
    let reports = data
        .par_iter()
        .map(|l| verify_theorem(l, w))
        .collect::<Result<Vec<_>>>()?;
    let mut ratios = Vec::new();
    for rep in &reports {
        for c in &rep.checks {
            out.cases += 1;
            if let Some(m) = &c.mismatch {
                out.fail(record(c.lambency, c.class, m.q, m.y, &m.product, &m.closed));
                ratios.push(match &c.ratio {
                    Some(r) => format!("{} {}: closed = ({}) q^{} y^{} * product", c.lambency, c.class, r.coeff, r.qexp, r.yexp),
                    None => format!("{} {}: no monomial ratio", c.lambency, c.class),
                });
            }
        }
    }
    let failed = out.mismatches.len();
    out.summary = format!("{} of {} classes agree through q^{}", out.cases - failed, out.cases, w.qmax);
    out.notes = ratios;
    Ok(out)
}

/// The Fock-space cases: `(lambency, class, q-order)`.
pub const FOCK_CASES: [(&str, &str, i64); 5] = [
    ("22+11", "1A", 4),
    ("22+11", "2A", 4),
    ("46+23", "1A", 4),
    ("10+5", "1A", 3),
    ("14+7", "1A", 3),
];

fn fock(p: &SuiteParams) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("fock");
    let floor = p.yfloor.unwrap_or(HalfInt::from_num2(-21));
    let budget = p.budget.unwrap_or(DEFAULT_BUDGET);
    let only = match &p.lambency {
        Some(l) => Some(lambency(l)?.label),
        None => None,
    };
    for (lab, class, q) in FOCK_CASES {
        if only.is_some_and(|l| l != lab) {
            continue;
        }
        let data = lambency(lab)?;
        let spec = trace_spec(&data, data.class(class)?);
        let qmax = p.qorder.map_or(QExp::int(q), |o| o.min(QExp::int(q)));
        let w = Window::target(qmax, floor);
        let a = trace_by_product(&spec, w)?;
        let b = trace_by_enumeration(&spec, w, budget)?;
        out.cases += 1;
        if let Some(r) = first_mismatch(lab, class, &b, &a) {
            out.fail(r);
        }
    }
    out.summary = format!("{} traces, enumeration = product, y-floor {floor}, budget {budget}", out.cases);
    Ok(out)
}

/// The split window for index `m`: deep enough that every label has a
/// second representative in range.
pub fn split_window(m: HalfInt) -> Window {
    Window::target(QExp::int(m.num2 / 2 + 6), HalfInt::from_num2(-2 * m.num2))
}

fn splitting(p: &SuiteParams) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("split");
    for data in selected(p)? {
        let m = data.index();
        let mut w = split_window(m);
        if let Some(q) = p.qorder {
            w.qmax = q;
        }
        if let Some(f) = p.yfloor {
            w.yfloor = Some(f);
        }
        for c in &data.classes {
            out.cases += 1;
            match split_psi(&data, c.name, w) {
                Ok(s) => {
                    let reps = checked_representatives(&s);
                    let thin: Vec<String> = reps
                        .iter()
                        .filter(|(_, v)| v.len() < 2)
                        .map(|(r, v)| format!("{r} ({})", v.len()))
                        .collect();
                    if !thin.is_empty() {
                        out.fail_note(format!(
                            "{} {}: labels with fewer than 2 checked representatives: {}",
                            data.label,
                            c.name,
                            thin.join(", ")
                        ));
                    }
                    let h = h_from_split(&data, &s);
                    if let Some(k) = h_antisymmetry(&h) {
                        out.notes.push(format!("{} {}: H(-2s) = ({k}) H(2s)", data.label, c.name));
                    }
                }
                Err(e) => {
                    let sign = elliptic_sign(&data, c.name, w)?;
                    out.notes.push(match sign {
                        Some((s, n)) => format!(
                            "{} {}: psi + 2 chi mu obeys the (1,0) elliptic law times {s} ({n} pairs)",
                            data.label, c.name
                        ),
                        None => format!(
                            "{} {}: psi + 2 chi mu obeys neither sign of the (1,0) elliptic law",
                            data.label, c.name
                        ),
                    });
                    match record_error(data.label, c.name, &e) {
                        Some(r) => out.fail(r),
                        None => out.fail_note(format!("{} {}: {e}", data.label, c.name)),
                    }
                }
            }
        }
    }
    let failed = out.mismatches.len();
    out.summary = format!("{} of {} classes theta-decompose after removing -2 chi mu", out.cases - failed, out.cases);
    Ok(out)
}

fn residues(p: &SuiteParams) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("residue");
    let qmax = p.qorder.unwrap_or(QExp::int(8));
    let floors = (p.yfloor.unwrap_or(HalfInt::int(-40)), p.yfloor2.unwrap_or(HalfInt::int(-60)));
    for data in selected(p)? {
        for c in &data.classes {
            out.cases += 1;
            let expected = crate::arith::CycQ::from_int(-2 * c.chi);
            match residue(&data, c.name, qmax, floors) {
                Ok(d) if d == expected => {}
                Ok(d) => out.fail(record(data.label, c.name, "0", "-1/2", &expected, &d)),
                Err(e) => out.fail_note(format!("{} {}: {e}", data.label, c.name)),
            }
        }
    }
    out.summary = format!(
        "D(0,0) = -2 chi for {} of {} classes, floors {} and {}",
        out.cases - out.mismatches.len() - out.notes.len(),
        out.cases,
        floors.0,
        floors.1
    );
    Ok(out)
}

fn divisors(p: &SuiteParams) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("divisors");
    let top = p.m.map_or(24, crate::jacobi::mtilde);
    for mt in 1..=top {
        let map = exact_divisor_map(mt);
        let mut image: Vec<i64> = map.pairs.iter().map(|p| p.1).collect();
        for &(n, a) in &map.pairs {
            out.cases += 1;
            if (a * a - 1).rem_euclid(4 * mt as i64) != 0 {
                out.fail(record(&format!("mtilde={mt}"), &format!("n={n}"), "-", "-", "a^2 = 1 mod 4mt", a));
            }
        }
        image.sort_unstable();
        image.dedup();
        let o = o_set(mt);
        if image != o || image.len() != map.pairs.len() {
            out.fail(record(&format!("mtilde={mt}"), "bijection", "-", "-", format!("{o:?}"), format!("{image:?}")));
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let mt = rng.gen_range(1..=top);
        let ex = exact_divisors(mt);
        let (n, n2) = (ex[rng.gen_range(0..ex.len())], ex[rng.gen_range(0..ex.len())]);
        let map = exact_divisor_map(mt);
        let modulus = 2 * mt as i64;
        let lhs = (map.get(n).unwrap() * map.get(n2).unwrap()).rem_euclid(modulus);
        let rhs = map.get(exact_product(n, n2)).unwrap();
        out.cases += 1;
        if lhs != rhs {
            out.fail(record(&format!("mtilde={mt}"), &format!("n={n},n'={n2}"), "-", "-", rhs, lhs));
        }
    }
    out.summary = format!("a(n) bijective onto O for mtilde <= {top}; group law on 100 random pairs");
    out
}

fn orbits(p: &SuiteParams) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("orbits");
    let top = p.n.map_or(12, i64::from);
    let mut points = Vec::new();
    for d in 1..=top {
        for a in 0..d {
            points.push(rat(a, d));
        }
    }
    points.sort();
    points.dedup();
    for alpha in &points {
        for beta in &points {
            let s = TorsionPoint::new(alpha.clone(), beta.clone());
            let n = orbit_index(&s);
            let end = replay(&s, &reduce_to_standard(&s));
            out.cases += 1;
            if end != TorsionPoint::new(rat(1, n), rat(0, 1)) {
                out.fail(record(
                    "-",
                    &format!("({alpha}, {beta})"),
                    "-",
                    "-",
                    format!("(1/{n}, 0)"),
                    format!("({}, {})", end.alpha, end.beta),
                ));
            }
        }
    }
    out.summary = format!("{} points with denominators <= {top} reduce to (1/n, 0)", out.cases);
    out
}

fn appell(p: &SuiteParams) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("appell-lerch");
    let w = Window::target(p.qorder.unwrap_or(QExp::int(3)), p.yfloor.unwrap_or(HalfInt::int(-30)));
    let ms = match p.m {
        Some(m) => vec![m],
        None => vec![HalfInt::from_num2(5), HalfInt::from_num2(7)],
    };
    let points = [
        TorsionPoint::origin(),
        TorsionPoint::new(rat(1, 5), rat(0, 1)),
        TorsionPoint::new(rat(1, 2), rat(1, 2)),
    ];
    for &m in &ms {
        for s in &points {
            let base = appell_lerch(m, s, w)?;
            for lambda in -1..=1 {
                for mu in -1..=1 {
                    let moved = appell_lerch(m, &s.translate(lambda, mu), w)?;
                    let expected = base.scale(&elliptic_phase(m, s, lambda, mu));
                    out.cases += 1;
                    let label = format!("s=({}, {}),(l,u)=({lambda},{mu})", s.alpha, s.beta);
                    if let Some(r) = first_mismatch(&format!("m={m}"), &label, &moved, &expected) {
                        out.fail(r);
                    }
                }
            }
        }
    }
    out.summary = format!("{} translates agree with the elliptic phase on the window overlap", out.cases);
    Ok(out)
}

fn weight0(p: &SuiteParams) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("weight0");
    let qmax = p.qorder.unwrap_or(QExp::int(6));
    let floors = (p.yfloor.unwrap_or(HalfInt::int(-40)), p.yfloor2.unwrap_or(HalfInt::int(-60)));
    for data in selected(p)? {
        out.cases += 1;
        match weight0_signature(&data, qmax, floors) {
            Ok((support, pairs)) => out.notes.push(format!(
                "{}: finite y-support on {} q-slices, {pairs} elliptic pairs at index {}",
                data.label,
                support.len(),
                data.index() + HalfInt::from_num2(1)
            )),
            Err(e) => match record_error(data.label, "1A", &e) {
                Some(r) => out.fail(r),
                None => out.fail_note(format!("{}: {e}", data.label)),
            },
        }
    }
    out.summary = format!("{} identity quotients checked through q^{qmax}", out.cases);
    Ok(out)
}
