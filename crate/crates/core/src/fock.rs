//! Graded traces over twisted free-field Fock spaces, computed two ways: as
//! an infinite product, and by brute-force enumeration of occupation states.
//!
//! The trace is `prefactor * prod (1 - q^n)^2 * prod_towers (...)`, where the
//! `(1 - q^n)^2` comes from two neutral fermionic towers. Fermionic
//! excitations carry parity `-1`, bosonic ones `+1`.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::arith::{frac, lcm, root_of_unity, to_i64, CycQ, HalfInt, QExp, Rational};
use crate::series::{product_expand, FactorSpec, JacobiSeries, Monomial, Window};
use crate::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// The enumeration budget, overridable through `UMBRAL_BUDGET`.
pub fn budget_from_env() -> u64 {
    std::env::var("UMBRAL_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistics {
    Fermionic,
    Bosonic,
}

/// One tower of modes `n >= 1` at energy `n - energy_offset`, each
/// excitation weighted by `e(phase) y^charge q^energy`.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorSpec {
    pub statistics: Statistics,
    pub charge: HalfInt,
    /// The eigenvalue is the root of unity `e(phase)`.
    pub phase: Rational,
    pub energy_offset: i64,
}

impl OscillatorSpec {
    pub fn eigenvalue(&self) -> CycQ {
        root_of_unity(&self.phase)
    }

    /// The two polarisations `(1 - conj(lambda) y^-k q^(n-1))`, `(1 - lambda y^k q^n)`.
    pub fn pair(statistics: Statistics, charge: HalfInt, phase: Rational) -> [OscillatorSpec; 2] {
        [
            OscillatorSpec {
                statistics,
                charge: -charge,
                phase: frac(&-phase.clone()),
                energy_offset: 1,
            },
            OscillatorSpec {
                statistics,
                charge,
                phase: frac(&phase),
                energy_offset: 0,
            },
        ]
    }

    fn neutral() -> OscillatorSpec {
        OscillatorSpec {
            statistics: Statistics::Fermionic,
            charge: HalfInt::int(0),
            phase: Rational::zero(),
            energy_offset: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSpec {
    pub prefactor: Monomial,
    pub eta_squared: bool,
    pub oscillators: Vec<OscillatorSpec>,
}

impl TraceSpec {
    fn towers(&self) -> Vec<OscillatorSpec> {
        let mut t = Vec::new();
        if self.eta_squared {
            t.push(OscillatorSpec::neutral());
            t.push(OscillatorSpec::neutral());
        }
        t.extend(self.oscillators.iter().cloned());
        t
    }

    /// The same spec with every eigenvalue set to 1.
    pub fn untwisted(&self) -> TraceSpec {
        TraceSpec {
            oscillators: self
                .oscillators
                .iter()
                .map(|o| OscillatorSpec {
                    phase: Rational::zero(),
                    ..o.clone()
                })
                .collect(),
            ..self.clone()
        }
    }

    /// Product factors through `q^qmax` (relative to the prefactor).
    pub fn factors(&self, qmax: QExp) -> Vec<FactorSpec> {
        let mut out = Vec::new();
        for t in self.towers() {
            let c = t.eigenvalue();
            let mut n = 1;
            while QExp::int(n - t.energy_offset) <= qmax {
                let q = QExp::int(n - t.energy_offset);
                out.push(match t.statistics {
                    Statistics::Fermionic => FactorSpec::numerator(c.clone(), q, t.charge),
                    Statistics::Bosonic => FactorSpec::denominator(c.clone(), q, t.charge),
                });
                n += 1;
            }
        }
        out
    }
}

pub fn trace_by_product(spec: &TraceSpec, window: Window) -> Result<JacobiSeries> {
    let fs = spec.factors(window.qmax - spec.prefactor.qexp);
    product_expand(&spec.prefactor, &fs, window)
}

struct Mode {
    energy: i64,
    charge2: i64,
    phase: i64,
    fermion: bool,
}

struct Enumerator<'a> {
    modes: &'a [Mode],
    /// max over modes `i..` with positive energy of `charge2 / energy`, as a fraction
    ratio: Vec<(i64, i64)>,
    /// positive charge available from zero-energy fermions in `i..`
    free_gain: Vec<i64>,
    emax: i64,
    floor2: i64,
    order: i64,
    /// states counted so far
    visited: u64,
    budget: u64,
    counts: HashMap<(i64, i64, i64), i64>,
}

impl Enumerator<'_> {
    fn reachable(&self, i: usize, energy: i64, charge2: i64) -> bool {
        let (num, den) = self.ratio[i];
        let gain = num * (self.emax - energy) / den + self.free_gain[i];
        charge2 + gain >= self.floor2
    }

    fn walk(&mut self, i: usize, energy: i64, charge2: i64, phase: i64, sign: i64) -> Result<()> {
        if i == self.modes.len() {
            if charge2 >= self.floor2 {
                self.visited += 1;
                if self.visited > self.budget {
                    return Err(Error::Budget(self.budget));
                }
                *self.counts.entry((energy, charge2, phase)).or_insert(0) += sign;
            }
            return Ok(());
        }
        let mode = &self.modes[i];
        let (e, c, p, fermion) = (mode.energy, mode.charge2, mode.phase, mode.fermion);
        if !fermion && e == 0 && c >= 0 {
            // a zero-energy boson of non-negative charge never terminates
            return Err(Error::Divergent {
                qexp: "0".into(),
                yexp: HalfInt::from_num2(c).to_string(),
            });
        }
        let mut occ = 0i64;
        loop {
            let en = energy + occ * e;
            let ch = charge2 + occ * c;
            if en > self.emax {
                break;
            }
            if self.reachable(i + 1, en, ch) {
                let s = if fermion && occ % 2 == 1 { -sign } else { sign };
                self.walk(i + 1, en, ch, (phase + occ * p).rem_euclid(self.order), s)?;
            } else if c <= 0 {
                break;
            }
            occ += 1;
            if fermion && occ > 1 {
                break;
            }
        }
        Ok(())
    }
}

/// Enumerates occupation states with energy through the window's `q`-order
/// and `y`-exponent at or above its floor. Fails once more than `budget`
/// states have been counted.
pub fn trace_by_enumeration(spec: &TraceSpec, window: Window, budget: u64) -> Result<JacobiSeries> {
    let floor = window
        .yfloor
        .ok_or_else(|| Error::precondition("enumeration needs a y-floor"))?;
    let pre = &spec.prefactor;
    let emax = (window.qmax - pre.qexp).floor();
    let floor2 = (floor - pre.yexp).num2;
    let towers = spec.towers();
    let order = towers
        .iter()
        .fold(1i64, |acc, t| lcm(acc, to_i64(frac(&t.phase).denom())));
    let mut modes = Vec::new();
    for t in &towers {
        let p = to_i64((frac(&t.phase) * Rational::from_integer(order.into())).numer());
        let mut n = 1;
        while n - t.energy_offset <= emax {
            modes.push(Mode {
                energy: n - t.energy_offset,
                charge2: t.charge.num2,
                phase: p,
                fermion: t.statistics == Statistics::Fermionic,
            });
            n += 1;
        }
    }
    // zero-energy modes first, so the energy bound prunes everything after them
    modes.sort_by_key(|m| (m.energy != 0, m.energy));
    let k = modes.len();
    let mut ratio = vec![(0i64, 1i64); k + 1];
    let mut free_gain = vec![0i64; k + 1];
    for i in (0..k).rev() {
        let m = &modes[i];
        let (bn, bd) = ratio[i + 1];
        ratio[i] = if m.energy > 0 && m.charge2 * bd > bn * m.energy {
            (m.charge2, m.energy)
        } else {
            (bn, bd)
        };
        free_gain[i] = free_gain[i + 1] + if m.energy == 0 && m.fermion { m.charge2.max(0) } else { 0 };
    }
    let mut en = Enumerator {
        modes: &modes,
        ratio,
        free_gain,
        emax,
        floor2,
        order,
        visited: 0,
        budget,
        counts: HashMap::new(),
    };
    en.walk(0, 0, 0, 0, 1)?;

    let mut grouped: BTreeMap<(i64, i64), CycQ> = BTreeMap::new();
    for ((e, c, p), n) in en.counts {
        if n == 0 {
            continue;
        }
        let v = root_of_unity(&Rational::new(p.into(), order.into())).scale(&Rational::from_integer(n.into()));
        *grouped.entry((e, c)).or_insert_with(CycQ::zero) += &v;
    }
    let inner = Window::target(window.qmax - pre.qexp, HalfInt::from_num2(floor2));
    let raw = JacobiSeries::from_terms(
        inner,
        grouped
            .into_iter()
            .map(|((e, c), v)| (QExp::int(e), HalfInt::from_num2(c), v)),
    );
    Ok(raw.mul_monomial(pre))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn single(statistics: Statistics) -> TraceSpec {
        TraceSpec {
            prefactor: Monomial::one(),
            eta_squared: false,
            oscillators: vec![OscillatorSpec {
                statistics,
                charge: HalfInt::int(1),
                phase: rat(0, 1),
                energy_offset: 0,
            }],
        }
    }

    #[test]
    fn single_fermionic_mode() {
        let w = Window::target(QExp::int(1), HalfInt::int(-4));
        let t = trace_by_enumeration(&single(Statistics::Fermionic), w, 100).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.coefficient(QExp::int(1), HalfInt::int(1)).unwrap(), CycQ::from_int(-1));
    }

    #[test]
    fn single_bosonic_mode() {
        let w = Window::target(QExp::int(3), HalfInt::int(-4));
        let t = trace_by_enumeration(&single(Statistics::Bosonic), w, 1000).unwrap();
        for k in 0..=3 {
            assert!(t.coefficient(QExp::int(k), HalfInt::int(k)).unwrap().is_one());
        }
        assert!(t.agrees_with(&trace_by_product(&single(Statistics::Bosonic), w).unwrap()));
    }

    #[test]
    fn twisted_pairs_agree() {
        let mut osc = Vec::new();
        osc.extend(OscillatorSpec::pair(Statistics::Fermionic, HalfInt::int(2), rat(1, 3)));
        osc.extend(OscillatorSpec::pair(Statistics::Bosonic, HalfInt::int(1), rat(1, 4)));
        let spec = TraceSpec {
            prefactor: Monomial::new(CycQ::from_int(2), QExp::zero(), HalfInt::from_num2(-1)),
            eta_squared: true,
            oscillators: osc,
        };
        let w = Window::target(QExp::int(3), HalfInt::int(-8));
        let a = trace_by_product(&spec, w).unwrap();
        let b = trace_by_enumeration(&spec, w, DEFAULT_BUDGET).unwrap();
        assert!(a.agrees_with(&b));
        assert!(!a.is_zero());
    }

    #[test]
    fn budget_is_enforced() {
        let mut osc = Vec::new();
        osc.extend(OscillatorSpec::pair(Statistics::Bosonic, HalfInt::int(1), rat(0, 1)));
        let spec = TraceSpec {
            prefactor: Monomial::one(),
            eta_squared: true,
            oscillators: osc,
        };
        let w = Window::target(QExp::int(4), HalfInt::int(-10));
        assert!(matches!(trace_by_enumeration(&spec, w, 50), Err(Error::Budget(50))));
    }
}
