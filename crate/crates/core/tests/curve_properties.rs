use curvelift::curve::CertificateStatus;
use curvelift::poly::Polynomial;
use curvelift::roots::has_root_in;
use curvelift::scalar::{int, rat, rational_to_f64};
use curvelift::{certify_nondegenerate, make_moment_curve, CurveSpec, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(p, q)| rat(p, q))
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (0i64..=64).prop_map(|p| rat(p, 64))
}

fn poly(max_deg: usize, bound: i64) -> impl Strategy<Value = Polynomial<Rational>> {
    prop::collection::vec(-bound..=bound, 1..=max_deg + 1)
        .prop_map(|cs| Polynomial::new(cs.into_iter().map(int).collect()))
}

fn curve(dim: usize) -> impl Strategy<Value = CurveSpec> {
    prop::collection::vec(poly(5, 9), dim).prop_map(|ps| CurveSpec::polynomial(ps, int(0), int(1)).unwrap())
}

fn abs_bound(p: &Polynomial<Rational>, t: f64) -> f64 {
    p.coeffs().iter().rev().fold(0.0, |acc, c| acc * t.abs() + rational_to_f64(c).abs())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn moment_wronskian_is_superfactorial(n in 2usize..=6, t in unit_rational()) {
        let c = make_moment_curve(n).unwrap();
        let expected: Rational = (1..=n as i64).map(|k| int((1..=k).product())).product();
        prop_assert_eq!(c.wronskian(&t).unwrap().as_exact().unwrap().clone(), expected);
    }

    #[test]
    fn wronskian_is_multilinear_in_coordinates(c in curve(3), j in 0usize..3, lambda in rational(), t in unit_rational()) {
        let mut ps = c.polynomials().unwrap().to_vec();
        ps[j] = ps[j].scale(&lambda);
        let scaled = CurveSpec::polynomial(ps, int(0), int(1)).unwrap();
        let w = c.wronskian(&t).unwrap().as_exact().unwrap().clone();
        let ws = scaled.wronskian(&t).unwrap().as_exact().unwrap().clone();
        prop_assert_eq!(ws, w * lambda);
    }

    #[test]
    fn float_jets_track_exact_jets(
        ps in prop::collection::vec(poly(8, 1000), 2..=3),
        order in 1usize..=6,
        t in unit_rational(),
    ) {
        let c = CurveSpec::polynomial(ps.clone(), int(0), int(1)).unwrap();
        let exact = c.jet_exact(&t, order).unwrap();
        let tf = rational_to_f64(&t);
        let float = c.eval_jet_f64(tf, order).unwrap();
        for (k, (re, rf)) in exact.derivatives.iter().zip(&float.derivatives).enumerate() {
            for (i, (e, f)) in re.iter().zip(rf).enumerate() {
                // Relative to the size of the terms being summed.
                let scale = abs_bound(&ps[i].nth_derivative(k + 1), tf).max(1.0);
                prop_assert!((rational_to_f64(e) - f).abs() <= 1e-12 * scale, "row {} coord {}: {} vs {}", k, i, e, f);
            }
        }
    }

    #[test]
    fn certification_matches_exact_root_isolation(c in curve(2)) {
        let w = c.wronskian_polynomial().unwrap();
        let cert = certify_nondegenerate(&c, &Rational::zero(), 64).unwrap();
        let vanishes = w.is_zero() || has_root_in(&w, &int(0), &int(1));
        prop_assert_eq!(cert.status == CertificateStatus::Certified, !vanishes);
    }

    #[test]
    fn certification_respects_sampled_values(c in curve(2), c0 in (0i64..=200).prop_map(int)) {
        let cert = certify_nondegenerate(&c, &c0, 32).unwrap();
        if cert.status == CertificateStatus::Certified {
            for t in c.grid(32) {
                let w = c.wronskian(&t).unwrap().as_exact().unwrap().clone();
                prop_assert!(w.abs() > c0);
            }
        }
    }
}
