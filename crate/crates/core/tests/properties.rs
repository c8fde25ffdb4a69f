use std::f64::consts::PI;

use proptest::prelude::*;

use unfitted_rbffd::cli::RunConfig;
use unfitted_rbffd::elasticity::{von_mises, ElasticField, Material};
use unfitted_rbffd::harness::{estimate_order, relative_l2};
use unfitted_rbffd::smoothing::{arclength_parametrize, periodic_extend, robin_eval, DataAnchors, RobinCoefficients};

fn transitions() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(0u32..6000, 2..6).prop_map(|s| s.into_iter().map(|v| v as f64 * 1e-3).collect())
}

proptest! {
    #[test]
    fn robin_partition(ts in transitions(), steep in 1.0f64..60.0, t in -10.0f64..10.0, pick in 0usize..4) {
        let w = vec![pick % ts.len()];
        let rc = RobinCoefficients::new(ts, steep, w).unwrap();
        let (k0, k1) = robin_eval(&rc, t);
        prop_assert!((0.0..=1.0).contains(&k0) && (0.0..=1.0).contains(&k1));
        prop_assert_eq!(k0 + k1, 1.0);
        let (a0, _) = robin_eval(&rc, t + 2.0 * PI);
        prop_assert!((a0 - k0).abs() < 1e-9);
    }

    #[test]
    fn self_error_is_zero_and_doubling_is_one(v in prop::collection::vec(-1e3f64..1e3, 1..50)) {
        prop_assume!(v.iter().any(|x| *x != 0.0));
        prop_assert_eq!(relative_l2(&v, &v).unwrap(), 0.0);
        let d: Vec<f64> = v.iter().map(|x| 2.0 * x).collect();
        prop_assert!((relative_l2(&d, &v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_laws_give_their_order(c in 1e-6f64..1e3, q in 0.5f64..7.0, h0 in 0.01f64..0.5) {
        let h: Vec<f64> = (0..4).map(|i| h0 / 2f64.powi(i)).collect();
        let e: Vec<f64> = h.iter().map(|x| c * x.powf(q)).collect();
        let est = estimate_order(&h, &e).unwrap();
        prop_assert!((est.order - q).abs() < 1e-9);
        prop_assert!(est.converging);
    }

    #[test]
    fn arclength_parameters_are_increasing(pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..40)) {
        let v: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
        prop_assume!(v.windows(2).all(|w| w[0] != w[1]) && v[0] != v[v.len() - 1]);
        let t = arclength_parametrize(&v).unwrap();
        prop_assert_eq!(t[0], 0.0);
        prop_assert!(t.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(*t.last().unwrap() < 2.0 * PI);
    }

    #[test]
    fn extension_triples(t in prop::collection::vec(0.0f64..6.28, 0..30)) {
        let v: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let (te, ve) = periodic_extend(&t, &v);
        prop_assert_eq!(te.len(), 3 * t.len());
        for (a, b) in te.iter().zip(&ve) {
            prop_assert!((a.rem_euclid(2.0 * PI).sin() - b).abs() < 1e-9);
        }
    }

    #[test]
    fn anchors_interpolate_their_points(vals in prop::collection::vec(-5.0f64..5.0, 1..10)) {
        let n = vals.len();
        let pts: Vec<(f64, f64)> = vals.iter().enumerate().map(|(i, &v)| (i as f64 * 6.0 / n as f64, v)).collect();
        let a = DataAnchors::new(pts.clone()).unwrap();
        for (t, v) in pts {
            prop_assert!((a.interpolate(t) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn von_mises_is_nonnegative(s in prop::array::uniform3(-1e4f64..1e4)) {
        prop_assert!(von_mises(s) >= 0.0);
    }

    #[test]
    fn stress_from_gradients_is_symmetric(g in prop::array::uniform4(-1.0f64..1.0)) {
        let m = Material::default();
        let f = ElasticField::from_gradients(vec![[0.0, 0.0]], vec![0.0], vec![0.0], &[g], &m);
        let [s11, s22, s12] = f.stress[0];
        let e12 = 0.5 * (g[1] + g[2]);
        prop_assert!((s12 - 2.0 * m.mu * e12).abs() <= 1e-9 * (1.0 + s12.abs()));
        let tr = g[0] + g[3];
        prop_assert!((s11 - (m.lambda * tr + 2.0 * m.mu * g[0])).abs() <= 1e-9 * (1.0 + s11.abs()));
        prop_assert!((s22 - (m.lambda * tr + 2.0 * m.mu * g[3])).abs() <= 1e-9 * (1.0 + s22.abs()));
    }

    #[test]
    fn h_list_order_does_not_matter(h in prop::collection::btree_set(1u32..500, 1..6)) {
        let asc: Vec<String> = h.iter().map(|v| format!("{}", *v as f64 * 1e-3)).collect();
        let desc: Vec<String> = asc.iter().rev().cloned().collect();
        let parse = |l: &[String]| {
            let text = format!("mode = manufactured\nh_list = {}\n", l.join(", "));
            RunConfig::from_str_with_base(&text, std::path::Path::new(".")).unwrap().study.h_list
        };
        let a = parse(&asc);
        prop_assert_eq!(&a, &parse(&desc));
        prop_assert!(a.windows(2).all(|w| w[0] > w[1]));
    }
}
