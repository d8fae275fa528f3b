mod common;

use edgeworth_core::bootstrap::{g_value, g_value_and_jet};
use edgeworth_core::cramer::ustat_certificate;
use edgeworth_core::cumulant::{
    chi_poly, cumulants_to_moments, moments_to_cumulants, CumulantSet, MomentSource, MultiIndex,
};
use edgeworth_core::edgeworth::{build_expansion, set_measure, MeasureMethod, SetSpec};
use edgeworth_core::Dataset;
use nalgebra::DMatrix;
use proptest::prelude::*;

use common::{cumulant_set, q, random_rational_cumulants, random_standardized, rng, Q};

fn dataset(d: usize) -> impl Strategy<Value = Dataset> {
    (2usize..40).prop_flat_map(move |n| {
        prop::collection::vec(-3.0f64..3.0, n * d).prop_map(move |v| Dataset::new(d, v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_round_trip(d in 1usize..=3, order in 1u32..=5, seed in any::<u64>()) {
        let table = random_rational_cumulants(d, order, &mut rng(seed));
        let c = cumulant_set(d, order, &table);
        let back = moments_to_cumulants(&cumulants_to_moments(&c));
        prop_assert_eq!(back, c);
    }

    #[test]
    fn chi_poly_is_linear(d in 1usize..=2, j in 1u32..=5, s1 in any::<u64>(), s2 in any::<u64>(),
                          a in -5i64..5, b in 1i64..6) {
        let c1 = cumulant_set(d, 5, &random_rational_cumulants(d, 5, &mut rng(s1)));
        let c2 = cumulant_set(d, 5, &random_rational_cumulants(d, 5, &mut rng(s2)));
        let (a, b): (Q, Q) = (q(a, 1), q(1, b));
        let lhs = chi_poly(j, &c1.combine(&a, &c2, &b).unwrap()).unwrap();
        let rhs = chi_poly(j, &c1).unwrap().scale(&a).add(&chi_poly(j, &c2).unwrap().scale(&b));
        for (nu, v) in rhs.terms() {
            prop_assert_eq!(&lhs.coeff(nu), v);
        }
        for (nu, v) in lhs.terms() {
            prop_assert_eq!(&rhs.coeff(nu), v);
        }
    }

    #[test]
    fn linear_transform_matches_transformed_data(data in dataset(2),
                                                 m in prop::collection::vec(-2.0f64..2.0, 4)) {
        let a = DMatrix::from_row_slice(2, 2, &m);
        let rows: Vec<Vec<f64>> = (0..2).map(|i| (0..2).map(|j| a[(i, j)]).collect()).collect();
        let direct = moments_to_cumulants(&data.transformed(&a).unwrap().raw_moments(4).unwrap());
        let mapped = moments_to_cumulants(&data.raw_moments(4).unwrap()).linear_transform(&rows).unwrap();
        for (nu, v) in direct.iter() {
            let w = mapped.get(nu).unwrap();
            prop_assert!((v - w).abs() <= 1e-9 * v.abs().max(1.0), "{:?}: {} vs {}", nu, v, w);
        }
    }

    #[test]
    fn certificate_is_a_lower_bound(data in dataset(2), t in prop::collection::vec(-30.0f64..30.0, 2)) {
        let rec = ustat_certificate(&data, &t, 1.0).unwrap();
        prop_assert!(rec.one_minus_abs_cf >= rec.s_value - 1e-12);
        prop_assert!(rec.holds);
    }

    #[test]
    fn certificate_on_lattice_data(pts in prop::collection::vec(0u8..3, 2..60), k in 1i32..4) {
        let data = Dataset::from_values(&pts.iter().map(|&p| f64::from(p)).collect::<Vec<_>>()).unwrap();
        let t = [2.0 * std::f64::consts::PI * f64::from(k)];
        let rec = ustat_certificate(&data, &t, 1.0).unwrap();
        prop_assert!(rec.one_minus_abs_cf.abs() < 1e-12);
        prop_assert!(rec.s_value.abs() < 1e-12);
    }

    #[test]
    fn whole_space_has_unit_mass(d in 1usize..=2, s in 2u32..=5, n in 2u64..1000, seed in any::<u64>()) {
        let c = random_standardized(d, s, 2.0, &mut rng(seed));
        let e = build_expansion(&c, n, s).unwrap();
        let m = set_measure(&e, &SetSpec::whole_space(d), &MeasureMethod::quadrature()).unwrap();
        prop_assert!((m.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn complementary_half_spaces_sum_to_one(s in 3u32..=4, seed in any::<u64>(),
                                            w in prop::collection::vec(-1.0f64..1.0, 2), off in -2.0f64..2.0) {
        prop_assume!(w[0].abs() + w[1].abs() > 0.1);
        let c = random_standardized(2, s, 0.5, &mut rng(seed));
        let e = build_expansion(&c, 40, s).unwrap();
        let m = MeasureMethod::quadrature();
        let lo = set_measure(&e, &SetSpec::HalfSpace { normal: w.clone(), offset: off }, &m).unwrap();
        let neg: Vec<f64> = w.iter().map(|v| -v).collect();
        let hi = set_measure(&e, &SetSpec::HalfSpace { normal: neg, offset: -off }, &m).unwrap();
        prop_assert!((lo.value + hi.value - 1.0).abs() < 1e-8, "{} + {}", lo.value, hi.value);
    }

    #[test]
    fn jet_first_and_second_partials(x1 in -2.0f64..2.0, gap in 0.2f64..3.0, w_bar in -1.0f64..1.0) {
        let x = [x1, x1 * x1 + gap];
        let jet = g_value_and_jet(&x, w_bar, 2).unwrap();
        prop_assert!((jet.value() - g_value(&x, w_bar).unwrap()).abs() < 1e-14);
        let h = 1e-4;
        let g = |dx: f64, dy: f64| g_value(&[x[0] + dx, x[1] + dy], w_bar).unwrap();
        let checks = [
            (vec![1, 0], (g(h, 0.0) - g(-h, 0.0)) / (2.0 * h)),
            (vec![0, 1], (g(0.0, h) - g(0.0, -h)) / (2.0 * h)),
            (vec![2, 0], (g(h, 0.0) - 2.0 * g(0.0, 0.0) + g(-h, 0.0)) / (h * h)),
            (vec![1, 1], (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4.0 * h * h)),
        ];
        for (alpha, fd) in checks {
            let v = jet.get(&MultiIndex::new(alpha.clone())).unwrap();
            prop_assert!((v - fd).abs() <= 1e-4 * v.abs().max(1.0), "{:?}: {} vs {}", alpha, v, fd);
        }
    }
}

#[test]
fn combine_rejects_mismatched_shapes() {
    let a = CumulantSet::from_fn(1, 3, |_| 1.0).unwrap();
    let b = CumulantSet::from_fn(2, 3, |_| 1.0).unwrap();
    assert!(a.combine(&1.0, &b, &1.0).is_err());
}
