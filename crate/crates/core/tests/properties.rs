use gyrodebias::embedding::{load_embeddings, save_embeddings, save_embeddings_binary, EmbeddingSet, Space};
use gyrodebias::eval::{effect_size, weat_test, Similarity, WeatOptions, WeatSpec};
use gyrodebias::geometry::raw;
use gyrodebias::{karcher_mean, MeanConfig, PoincarePoint};
use proptest::prelude::*;

fn ball_point(dim: usize, max_norm: f64) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-1.0f64..1.0, dim), 0.0..max_norm).prop_map(|(v, r)| {
        let n = raw::norm(&v);
        if n < 1e-9 {
            vec![0.0; v.len()]
        } else {
            v.iter().map(|c| c * r / n).collect()
        }
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn triple(max_norm: f64) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    prop_oneof![Just(2usize), Just(5), Just(10)]
        .prop_flat_map(move |n| (ball_point(n, max_norm), ball_point(n, max_norm), ball_point(n, max_norm)))
}

proptest! {
    #[test]
    fn left_cancellation((a, b, _) in triple(0.9)) {
        let back = raw::mobius_add(&raw::neg(&a), &raw::mobius_add(&a, &b));
        prop_assert!(max_abs_diff(&back, &b) < 1e-9);
    }

    #[test]
    fn gyroassociativity((a, b, c) in triple(0.9)) {
        let lhs = raw::mobius_add(&a, &raw::mobius_add(&b, &c));
        let rhs = raw::mobius_add(&raw::mobius_add(&a, &b), &raw::gyr(&a, &b, &c));
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn gyration_is_an_isometry((a, b, c) in triple(0.9)) {
        let g = raw::gyr_linear(&a, &b, &c);
        prop_assert!((raw::norm(&g) - raw::norm(&c)).abs() < 1e-12);
    }

    #[test]
    fn scalar_distributivity((a, _, _) in triple(0.9), r1 in -2.0f64..2.0, r2 in -2.0f64..2.0) {
        let lhs = raw::mobius_scalar_mul(r1 + r2, &a);
        let rhs = raw::mobius_add(&raw::mobius_scalar_mul(r1, &a), &raw::mobius_scalar_mul(r2, &a));
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn distance_symmetry_and_triangle((a, b, c) in triple(0.9)) {
        let (ab, ba) = (raw::distance(&a, &b), raw::distance(&b, &a));
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab <= raw::distance(&a, &c) + raw::distance(&c, &b) + 1e-9);
    }

    #[test]
    fn exp_log_round_trip((x, y, _) in triple(0.9)) {
        let v = raw::log_map(&x, &y);
        let back = raw::exp_map(&x, &v);
        prop_assert!(max_abs_diff(&back, &y) < 1e-8);
    }

    #[test]
    fn text_and_binary_files_round_trip(rows in prop::collection::vec(ball_point(3, 0.99), 1..12)) {
        let named: Vec<(String, Vec<f64>)> = rows.iter().enumerate().map(|(i, v)| (format!("w{i}"), v.clone())).collect();
        let (set, _) = EmbeddingSet::from_rows(3, Space::Poincare, named).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let text = dir.path().join("e.txt");
        let bin = dir.path().join("e.bin");
        save_embeddings(&set, &text).unwrap();
        save_embeddings_binary(&set, &bin).unwrap();
        for path in [&text, &bin] {
            let back = load_embeddings(path, Space::Poincare).unwrap();
            prop_assert_eq!(back.words(), set.words());
            for (w, v) in set.rows() {
                prop_assert_eq!(back.vector(w).unwrap(), v);
            }
        }
    }

    #[test]
    fn effect_size_ignores_affine_maps(
        sx in prop::collection::vec(-5.0f64..5.0, 2..8),
        sy in prop::collection::vec(-5.0f64..5.0, 2..8),
        scale in 0.01f64..100.0,
        shift in -50.0f64..50.0,
    ) {
        prop_assume!(sx.iter().chain(&sy).any(|v| (v - sx[0]).abs() > 1e-3));
        let d = effect_size(&sx, &sy).unwrap();
        let f = |v: &Vec<f64>| v.iter().map(|s| scale * s + shift).collect::<Vec<_>>();
        let d2 = effect_size(&f(&sx), &f(&sy)).unwrap();
        prop_assert!((d - d2).abs() < 1e-9 * d.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn karcher_mean_commutes_with_rotation(
        pts in prop::collection::vec(ball_point(2, 0.6), 2..6),
        angle in 0.0f64..std::f64::consts::TAU,
    ) {
        let (s, c) = angle.sin_cos();
        let rot = |v: &[f64]| vec![c * v[0] - s * v[1], s * v[0] + c * v[1]];
        let p: Vec<PoincarePoint> = pts.iter().map(|v| PoincarePoint::new(v.clone()).unwrap()).collect();
        let q: Vec<PoincarePoint> = pts.iter().map(|v| PoincarePoint::new(rot(v)).unwrap()).collect();
        let cfg = MeanConfig { max_epochs: 20_000, ..Default::default() };
        let mp = karcher_mean(&p, &cfg).unwrap();
        let mq = karcher_mean(&q, &cfg).unwrap();
        prop_assert!(raw::distance(&rot(mp.point.coords()), mq.point.coords()) < 1e-5);
    }

    #[test]
    fn swapping_weat_targets_negates(
        pts in prop::collection::vec(ball_point(3, 0.8), 10),
    ) {
        let words = ["x1", "x2", "x3", "y1", "y2", "y3", "a1", "a2", "b1", "b2"];
        let rows: Vec<(String, Vec<f64>)> = words.iter().zip(&pts).map(|(w, v)| (w.to_string(), v.clone())).collect();
        let (emb, _) = EmbeddingSet::from_rows(3, Space::Poincare, rows).unwrap();
        let spec = WeatSpec::new(&["x1", "x2", "x3"], &["y1", "y2", "y3"], &["a1", "a2"], &["b1", "b2"], Similarity::NegPoincare);
        let r = match weat_test(&spec, &emb, WeatOptions::default()) {
            Ok(r) => r,
            Err(_) => return Ok(()),
        };
        let q = weat_test(&spec.swapped(), &emb, WeatOptions::default()).unwrap();
        prop_assert_eq!(q.statistic, -r.statistic);
        prop_assert_eq!(q.effect_size_d, -r.effect_size_d);
        // swapped p counts the original splits with statistic at most the observed one
        let s: Vec<f64> = r.associations.iter().map(|p| p.1).collect();
        let mut at_most = 0;
        let mut total = 0;
        for mask in 0u32..64 {
            if mask.count_ones() != 3 {
                continue;
            }
            total += 1;
            let (mut a, mut b) = (0.0, 0.0);
            for (i, v) in s.iter().enumerate() {
                if mask & (1 << i) != 0 { a += v } else { b += v }
            }
            if a - b <= r.statistic + 1e-12 * r.statistic.abs().max(1.0) {
                at_most += 1;
            }
        }
        prop_assert_eq!(q.p_value, at_most as f64 / total as f64);
    }
}
