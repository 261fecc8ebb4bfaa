use proptest::prelude::*;

use umbral::appell::{appell_lerch, elliptic_phase, TorsionPoint};
use umbral::arith::{euler_phi, rat, root_of_unity, CycQ, HalfInt, QExp, Rational};
use umbral::fock::trace_by_product;
use umbral::jacobi::{theta_decompose, ThetaCoefficients};
use umbral::series::{QSeries, Window};
use umbral::special::canonical_labels;
use umbral::umbral::{all_lambencies, trace_spec};

const ORDERS: [u32; 9] = [1, 2, 3, 4, 5, 6, 8, 9, 12];

fn cyc() -> impl Strategy<Value = CycQ> {
    prop::sample::select(&ORDERS[..]).prop_flat_map(|n| {
        prop::collection::vec((-6i64..=6, 1i64..=3), euler_phi(n)).prop_map(move |cs| {
            let coords = cs.into_iter().map(|(a, b)| rat(a, b)).collect();
            CycQ::from_coords(n, coords).unwrap()
        })
    })
}

fn fraction() -> impl Strategy<Value = Rational> {
    (-24i64..=24, 1i64..=12).prop_map(|(a, b)| rat(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in cyc(), b in cyc(), c in cyc()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn roots_of_unity_multiply(x in fraction(), y in fraction()) {
        prop_assert_eq!(&root_of_unity(&x) * &root_of_unity(&y), root_of_unity(&(&x + &y)));
        prop_assert_eq!(root_of_unity(&x).conj(), root_of_unity(&-x));
    }

    #[test]
    fn embedding_is_a_ring_map(a in cyc(), b in cyc(), k in 1u32..=4) {
        let n = a.order().max(1) * b.order().max(1) * k;
        let (ea, eb) = (a.embed(n).unwrap(), b.embed(n).unwrap());
        prop_assert_eq!(ea.order(), n);
        prop_assert_eq!(&ea * &eb, &a * &b);
        prop_assert_eq!(&ea + &eb, &a + &b);
        prop_assert_eq!(ea.simplify(), a.simplify());
    }

    #[test]
    fn conjugation_preserves_products(a in cyc(), b in cyc()) {
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn appell_lerch_elliptic_law(
        twice_m in prop::sample::select(vec![5i64, 7]),
        n in 1i64..=6,
        k in 0i64..6,
        l in 0i64..6,
        lambda in -1i64..=1,
        mu in -1i64..=1,
    ) {
        let m = HalfInt::from_num2(twice_m);
        let s = TorsionPoint::new(rat(k % n, n), rat(l % n, n));
        let w = Window::target(QExp::int(2), HalfInt::int(-16));
        let base = appell_lerch(m, &s, w).unwrap();
        let moved = appell_lerch(m, &s.translate(lambda, mu), w).unwrap();
        prop_assert!(moved.agrees_with(&base.scale(&elliptic_phase(m, &s, lambda, mu))));
    }

    #[test]
    fn decompose_inverts_assemble(
        twice_m in 1i64..=7,
        seed in prop::collection::vec(-5i64..=5, 32),
    ) {
        let m = HalfInt::from_num2(twice_m);
        let qmax = QExp::int(3);
        let mut it = seed.into_iter().cycle();
        let h = canonical_labels(m)
            .into_iter()
            .map(|r| {
                let terms = (0..3).map(|q| (QExp::int(q), CycQ::from_int(it.next().unwrap()))).collect::<Vec<_>>();
                (r, QSeries::from_terms(qmax, terms))
            })
            .collect();
        let coeffs = ThetaCoefficients { m, h };
        let w = Window::target(qmax, HalfInt::from_num2(-4 * twice_m));
        let phi = coeffs.assemble(w).unwrap();
        let back = theta_decompose(&phi, m).unwrap();
        for (r, original) in &coeffs.h {
            let got = back.get(*r).unwrap();
            prop_assert!(got.agrees_with(&original.truncate(got.qmax())), "label {}", r);
        }
    }
}

#[test]
fn traces_are_graded_by_half_odd_charge() {
    let w = Window::target(QExp::int(3), HalfInt::int(-12));
    for data in all_lambencies() {
        for c in &data.classes {
            let t = trace_by_product(&trace_spec(&data, c), w).unwrap();
            assert!(!t.is_zero());
            for (q, y, _) in t.terms() {
                assert!(q.den() == 1 && !y.is_integral(), "{} {} at q^{q} y^{y}", data.label, c.name);
            }
        }
    }
}

#[test]
fn untwisting_any_class_gives_the_identity() {
    for data in all_lambencies() {
        let e = trace_spec(&data, data.identity());
        for c in &data.classes {
            assert_eq!(trace_spec(&data, c).untwisted(), e, "{} {}", data.label, c.name);
        }
    }
}
