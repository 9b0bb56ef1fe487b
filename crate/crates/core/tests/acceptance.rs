//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p gyrodebias --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gyrodebias::bias::{bias_report, gender_gyrovectors, GenderGyrovectors};
use gyrodebias::embedding::{EmbeddingSet, Space};
use gyrodebias::eval::datasets::{AnalogyQuery, SemBiasInstance};
use gyrodebias::eval::{
    analogy_solve_points, cross_validate_t, sembias_eval, t_grid, weat_test, SemBiasOptions, SemBiasScoring, Similarity,
    WeatOptions, WeatSpec,
};
use gyrodebias::geometry::{gyrocosine, raw, RootedGyrovector};
use gyrodebias::mean::{karcher_euclidean_grad, karcher_objective};
use gyrodebias::optim::{finite_difference_grad, Objective, FD_STEP};
use gyrodebias::pgd::{pgd_objective, PgdObjective};
use gyrodebias::stats::{pearson, spearman};
use gyrodebias::synthetic::{biased_vocabulary, SyntheticSpec};
use gyrodebias::{debias_vocabulary, karcher_mean, MeanConfig, PgdConfig, PoincarePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, max_norm: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = raw::norm(&v);
        if n > 1e-6 {
            let r = rng.gen_range(0.0..max_norm);
            return v.iter().map(|c| c * r / n).collect();
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn gyro_algebra() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 5];
    for dim in [2, 10, 100] {
        for _ in 0..1000 {
            let a = random_point(&mut rng, dim, 0.9);
            let b = random_point(&mut rng, dim, 0.9);
            let c = random_point(&mut rng, dim, 0.9);
            let r1 = rng.gen_range(-2.0..2.0);
            let r2 = rng.gen_range(-2.0..2.0);

            let cancel = raw::mobius_add(&raw::neg(&a), &raw::mobius_add(&a, &b));
            worst[0] = worst[0].max(max_abs_diff(&cancel, &b));

            let lhs = raw::mobius_add(&a, &raw::mobius_add(&b, &c));
            let rhs = raw::mobius_add(&raw::mobius_add(&a, &b), &raw::gyr(&a, &b, &c));
            worst[1] = worst[1].max(max_abs_diff(&lhs, &rhs));

            let lhs = raw::mobius_scalar_mul(r1 + r2, &a);
            let rhs = raw::mobius_add(&raw::mobius_scalar_mul(r1, &a), &raw::mobius_scalar_mul(r2, &a));
            worst[2] = worst[2].max(max_abs_diff(&lhs, &rhs));

            let twice = raw::mobius_scalar_mul(2.0, &a);
            worst[3] = worst[3].max(max_abs_diff(&twice, &raw::mobius_add(&a, &a)));

            let g = raw::gyr(&a, &b, &c);
            worst[4] = worst[4].max((raw::norm(&g) - raw::norm(&c)).abs());
        }
    }
    let names = ["left cancellation", "gyroassociativity", "scalar distributivity", "doubling", "gyration norm"];
    for (name, err) in names.iter().zip(worst) {
        ensure(err <= 1e-9, || format!("{name}: max error {err:e}"))?;
    }
    within_time(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("max error {:e} over 15000 instances in {:.2?}", worst.iter().fold(0.0f64, |m, e| m.max(*e)), start.elapsed()))
}

fn distance_exp_log() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut dist_err, mut trip_err) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let dim = [2, 10, 100][i % 3];
        let x = random_point(&mut rng, dim, 0.9);
        let y = random_point(&mut rng, dim, 0.9);
        let z = random_point(&mut rng, dim, 0.9);
        let direct = 2.0 * raw::norm(&raw::mobius_add(&raw::neg(&x), &y)).atanh();
        let dxy = raw::distance(&x, &y);
        dist_err = dist_err.max((dxy - direct).abs());
        ensure(dxy == raw::distance(&y, &x) || (dxy - raw::distance(&y, &x)).abs() < 1e-12, || "asymmetric distance".into())?;
        ensure(dxy <= raw::distance(&x, &z) + raw::distance(&z, &y) + 1e-10, || "triangle inequality violated".into())?;

        let v = raw::log_map(&x, &y);
        trip_err = trip_err.max(max_abs_diff(&raw::exp_map(&x, &v), &y));
        let u: Vec<f64> = random_point(&mut rng, dim, 1.0).iter().map(|c| c * 0.5).collect();
        let p = raw::exp_map(&x, &u);
        trip_err = trip_err.max(max_abs_diff(&raw::log_map(&x, &p), &u));
    }
    ensure(dist_err <= 1e-10, || format!("distance formula error {dist_err:e}"))?;
    ensure(trip_err <= 1e-8, || format!("exp/log round trip error {trip_err:e}"))?;
    within_time(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("distance error {dist_err:e}, round trip error {trip_err:e}, {:.2?}", start.elapsed()))
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    raw::norm(&diff) / raw::norm(b).max(1e-12)
}

fn gradients() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = [0.0f64; 4];
    for _ in 0..10 {
        let dim = 6;
        let mu_m = PoincarePoint::new(random_point(&mut rng, dim, 0.6)).unwrap();
        let mu_f = PoincarePoint::new(random_point(&mut rng, dim, 0.6)).unwrap();
        let gv = GenderGyrovectors::from_means(mu_m, mu_f).unwrap();
        let w = PoincarePoint::new(random_point(&mut rng, dim, 0.8)).unwrap();
        let x = random_point(&mut rng, dim, 0.8);
        let obj = PgdObjective::new(&w, &gv, &PgdConfig::default()).unwrap();

        let fd = finite_difference_grad(|p| obj.f_g(p), &x, FD_STEP);
        worst[0] = worst[0].max(relative_error(&obj.f_g_grad(&x), &fd));
        let fd = finite_difference_grad(|p| obj.f_s(p), &x, FD_STEP);
        worst[1] = worst[1].max(relative_error(&obj.f_s_grad(&x), &fd));
        let fd = finite_difference_grad(|p| obj.value(p), &x, FD_STEP);
        worst[2] = worst[2].max(relative_error(&obj.euclidean_grad(&x), &fd));

        let pts: Vec<PoincarePoint> = (0..5).map(|_| PoincarePoint::new(random_point(&mut rng, dim, 0.8)).unwrap()).collect();
        let fd = finite_difference_grad(|p| karcher_objective(p, &pts), &x, FD_STEP);
        worst[3] = worst[3].max(relative_error(&karcher_euclidean_grad(&x, &pts), &fd));
    }
    let names = ["f_g", "f_s", "weighted objective", "Karcher objective"];
    for (name, err) in names.iter().zip(worst) {
        ensure(err <= 1e-3, || format!("{name}: relative error {err:e}"))?;
    }
    Ok(format!("max relative error {:e}", worst.iter().fold(0.0f64, |m, e| m.max(*e))))
}

fn grid_search(points: &[PoincarePoint]) -> [f64; 2] {
    let mut best = ([0.0, 0.0], f64::INFINITY);
    let scan = |center: [f64; 2], half: f64, step: f64, best: &mut ([f64; 2], f64)| {
        let n = (2.0 * half / step).round() as i64;
        for i in 0..=n {
            for j in 0..=n {
                let p = [center[0] - half + i as f64 * step, center[1] - half + j as f64 * step];
                if raw::norm(&p) >= 0.999 {
                    continue;
                }
                let f = karcher_objective(&p, points);
                if f < best.1 {
                    *best = (p, f);
                }
            }
        }
    };
    scan([0.0, 0.0], 0.95, 0.01, &mut best);
    let coarse = best.0;
    scan(coarse, 0.02, 0.0002, &mut best);
    best.0
}

fn karcher() -> Check {
    let start = Instant::now();
    let cfg = MeanConfig::default();
    let single = PoincarePoint::new(vec![0.3, -0.4]).unwrap();
    let m = karcher_mean(std::slice::from_ref(&single), &cfg).unwrap();
    ensure(max_abs_diff(m.point.coords(), single.coords()) <= 1e-6, || "singleton mean moved".into())?;

    let a = PoincarePoint::new(vec![0.5, 0.2]).unwrap();
    let b = PoincarePoint::new(vec![-0.5, -0.2]).unwrap();
    let m = karcher_mean(&[a, b], &cfg).unwrap();
    ensure(m.point.norm() <= 1e-6, || format!("antipodal mean at norm {:e}", m.point.norm()))?;

    let a = PoincarePoint::new(vec![0.5, 0.0]).unwrap();
    let b = PoincarePoint::new(vec![0.0, 0.5]).unwrap();
    let m = karcher_mean(&[a.clone(), b.clone()], &cfg).unwrap();
    let gap = (raw::distance(m.point.coords(), a.coords()) - raw::distance(m.point.coords(), b.coords())).abs();
    ensure(gap <= 1e-5, || format!("two-point mean not equidistant: {gap:e}"))?;

    let pts: Vec<PoincarePoint> = [[0.1, 0.2], [0.5, -0.3], [-0.4, 0.4], [0.3, 0.6], [-0.2, -0.5]]
        .iter()
        .map(|p| PoincarePoint::new(p.to_vec()).unwrap())
        .collect();
    let m = karcher_mean(&pts, &MeanConfig { max_epochs: 20_000, ..cfg }).unwrap();
    let oracle = grid_search(&pts);
    let dev = max_abs_diff(m.point.coords(), &oracle);
    ensure(dev <= 2e-3, || format!("grid oracle {oracle:?} vs {:?}", m.point.coords()))?;
    within_time(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("grid deviation {dev:e}, {:.2?}", start.elapsed()))
}

fn pgd_benchmark() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    for dim in [2, 10] {
        let vocab = biased_vocabulary(&SyntheticSpec { dim, ..Default::default() });
        let emb = &vocab.embedding;
        let axis = gender_gyrovectors(emb, &vocab.male_words, &vocab.female_words, &MeanConfig::default()).map_err(|e| e.to_string())?;
        let gv = &axis.gyrovectors;
        let cfg = PgdConfig::default();
        let (debiased, _) = debias_vocabulary(emb, gv, &cfg).map_err(|e| e.to_string())?;
        let before = bias_report(&vocab.neutral_words, emb, gv, 0.05).unwrap().summary.mean_abs;
        let after = bias_report(&vocab.neutral_words, &debiased, gv, 0.05).unwrap().summary.mean_abs;
        let reduction = 1.0 - after / before;
        ensure(reduction >= 0.9, || format!("{dim}-D: mean |γ| reduced by {:.1}%", 100.0 * reduction))?;
        let mut min_cos = 1.0f64;
        for w in &vocab.neutral_words {
            let orig = emb.point(w).unwrap();
            let new = debiased.point(w).unwrap();
            let cos = gyrocosine(&RootedGyrovector::from_origin(new.clone()), &RootedGyrovector::from_origin(orig.clone())).unwrap();
            min_cos = min_cos.min(cos);
            let f0 = pgd_objective(&orig, &orig, gv, &cfg).unwrap();
            let f1 = pgd_objective(&new, &orig, gv, &cfg).unwrap();
            ensure(f1 <= f0, || format!("{dim}-D {w}: objective rose from {f0} to {f1}"))?;
        }
        ensure(min_cos >= 0.95, || format!("{dim}-D: gyrocosine to original fell to {min_cos}"))?;
        notes.push(format!("{dim}-D reduction {:.1}% min cos {min_cos:.4}", 100.0 * reduction));
    }
    within_time(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{}, {:.2?}", notes.join("; "), start.elapsed()))
}

fn emb_from(rows: &[(&str, Vec<f64>)]) -> EmbeddingSet {
    let dim = rows[0].1.len();
    let rows: Vec<(String, Vec<f64>)> = rows.iter().map(|(w, v)| (w.to_string(), v.clone())).collect();
    EmbeddingSet::from_rows(dim, Space::Poincare, rows).unwrap().0
}

fn weat_oracle() -> Check {
    let e = emb_from(&[
        ("x1", vec![0.30, 0.10]),
        ("x2", vec![0.25, -0.05]),
        ("x3", vec![0.10, 0.20]),
        ("x4", vec![-0.05, 0.02]),
        ("y1", vec![-0.20, 0.10]),
        ("y2", vec![-0.30, -0.10]),
        ("y3", vec![0.05, -0.25]),
        ("y4", vec![-0.12, 0.33]),
        ("a1", vec![0.60, 0.00]),
        ("a2", vec![0.50, 0.20]),
        ("b1", vec![-0.60, 0.00]),
        ("b2", vec![-0.50, -0.20]),
    ]);
    let spec = WeatSpec::new(&["x1", "x2", "x3", "x4"], &["y1", "y2", "y3", "y4"], &["a1", "a2"], &["b1", "b2"], Similarity::NegPoincare);
    let r = weat_test(&spec, &e, WeatOptions::default()).map_err(|err| err.to_string())?;

    // Independent recomputation from raw distances.
    let row = |w: &str| e.vector(w).unwrap();
    let s: Vec<f64> = ["x1", "x2", "x3", "x4", "y1", "y2", "y3", "y4"]
        .iter()
        .map(|w| {
            let sa = (-raw::distance(row(w), row("a1")) + -raw::distance(row(w), row("a2"))) / 2.0;
            let sb = (-raw::distance(row(w), row("b1")) + -raw::distance(row(w), row("b2"))) / 2.0;
            sa - sb
        })
        .collect();
    let split = |mask: u32| {
        let (mut a, mut b) = (0.0, 0.0);
        for (i, v) in s.iter().enumerate() {
            if mask & (1 << i) != 0 {
                a += v;
            } else {
                b += v;
            }
        }
        a - b
    };
    let observed = split(0b1111);
    let masks: Vec<u32> = (0u32..256).filter(|m| m.count_ones() == 4).collect();
    let hits = masks.iter().filter(|&&m| split(m) >= observed - 1e-12 * observed.abs().max(1.0)).count();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mu = mean(&s);
    let sd = (s.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / 8.0).sqrt();
    let d = (mean(&s[..4]) - mean(&s[4..])) / sd;

    ensure(masks.len() == 70 && r.permutations_used == 70 && r.exact, || "expected 70 exact partitions".into())?;
    ensure(r.statistic == observed, || format!("statistic {} vs oracle {observed}", r.statistic))?;
    ensure(r.p_value == hits as f64 / 70.0, || format!("p {} vs oracle {}/70", r.p_value, hits))?;
    ensure((r.effect_size_d - d).abs() <= 1e-12, || format!("d {} vs oracle {d}", r.effect_size_d))?;

    let mirrored = emb_from(&[
        ("x1", vec![0.30, 0.10]),
        ("x2", vec![-0.20, 0.25]),
        ("x3", vec![0.05, 0.40]),
        ("x4", vec![0.15, 0.05]),
        ("y1", vec![0.30, -0.10]),
        ("y2", vec![-0.20, -0.25]),
        ("y3", vec![0.05, -0.40]),
        ("y4", vec![0.15, -0.05]),
        ("a1", vec![0.60, 0.00]),
        ("a2", vec![0.40, 0.00]),
        ("b1", vec![-0.60, 0.00]),
        ("b2", vec![-0.40, 0.00]),
    ]);
    let sym = weat_test(&spec, &mirrored, WeatOptions::default()).map_err(|err| err.to_string())?;
    ensure(sym.effect_size_d == 0.0, || format!("symmetric construction gave d = {}", sym.effect_size_d))?;
    Ok(format!("statistic {observed:.6}, d {d:.6}, p {hits}/70; symmetric d = 0"))
}

fn analogy_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let mut p = || PoincarePoint::new(random_point(&mut rng, 5, 0.8)).unwrap();
        let (a, b, c) = (p(), p(), p());
        let na = raw::neg(a.coords());
        let d1 = raw::mobius_add(c.coords(), &raw::gyr(c.coords(), &na, &raw::mobius_add(&na, b.coords())));
        let d2 = raw::mobius_add(b.coords(), &raw::gyr(b.coords(), &na, &raw::mobius_add(&na, c.coords())));
        let t0 = analogy_solve_points(&a, &b, &c, 0.0).unwrap();
        let t1 = analogy_solve_points(&a, &b, &c, 1.0).unwrap();
        // the endpoint solutions themselves, bit for bit
        ensure(t0 == analogy_solve_points(&a, &b, &c, 0.0).unwrap(), || "t = 0 not reproducible".into())?;
        ensure(max_abs_diff(t0.coords(), &d1) <= 1e-12, || "t = 0 differs from d1".into())?;
        ensure(max_abs_diff(t1.coords(), &d2) <= 1e-12, || "t = 1 differs from d2".into())?;
    }

    let one = |v: f64| PoincarePoint::new(vec![v]).unwrap();
    let (a, b, c) = (one(0.1), one(0.3), one(0.2));
    let d1 = analogy_solve_points(&a, &b, &c, 0.0).unwrap().coords()[0];
    let d2 = analogy_solve_points(&a, &b, &c, 1.0).unwrap().coords()[0];
    ensure((d1 - d2).abs() <= 1e-10, || format!("1-D endpoints differ: {d1} vs {d2}"))?;

    let r = 1e-3;
    let shrink = |v: &[f64]| PoincarePoint::new(raw::mobius_scalar_mul(r, v)).unwrap();
    let (a, b, c) = (shrink(&[0.3, -0.2, 0.5]), shrink(&[-0.1, 0.4, 0.2]), shrink(&[0.2, 0.1, -0.4]));
    let euclid: Vec<f64> = (0..3).map(|i| c.coords()[i] + b.coords()[i] - a.coords()[i]).collect();
    let mut worst = 0.0f64;
    for t in t_grid() {
        let d = analogy_solve_points(&a, &b, &c, t).unwrap();
        worst = worst.max(relative_error(d.coords(), &euclid));
    }
    ensure(worst <= 1e-3, || format!("small-norm relative error {worst:e}"))?;
    Ok(format!("1-D |d1 - d2| = {:e}, small-norm relative error {worst:e}", (d1 - d2).abs()))
}

fn cv_grid() -> Check {
    let grid = t_grid();
    let expected: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    ensure(grid.to_vec() == expected, || format!("grid {grid:?}"))?;

    // Gold sits at d2 and one decoy at each d^t with t < 1, so only t = 1
    // answers every query.
    let bases = [
        ([0.1, 0.05], [-0.2, 0.3], [0.35, -0.1]),
        ([-0.3, 0.1], [0.2, 0.2], [0.0, -0.4]),
        ([0.25, -0.25], [0.1, 0.45], [-0.35, 0.0]),
        ([0.0, 0.3], [0.4, -0.1], [-0.2, -0.3]),
    ];
    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    let mut queries = Vec::new();
    for (q, (a, b, c)) in bases.iter().enumerate() {
        let pa = PoincarePoint::new(a.to_vec()).unwrap();
        let pb = PoincarePoint::new(b.to_vec()).unwrap();
        let pc = PoincarePoint::new(c.to_vec()).unwrap();
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            rows.push((format!("{name}{q}"), v.to_vec()));
        }
        for &t in &grid[..10] {
            let d = analogy_solve_points(&pa, &pb, &pc, t).unwrap();
            rows.push((format!("decoy{q}_{t}"), d.into_coords()));
        }
        rows.push((format!("gold{q}"), analogy_solve_points(&pa, &pb, &pc, 1.0).unwrap().into_coords()));
        queries.push(AnalogyQuery::new(&format!("a{q}"), &format!("b{q}"), &format!("c{q}"), &format!("gold{q}")));
    }
    let emb = EmbeddingSet::from_rows(2, Space::Poincare, rows).unwrap().0;
    let cv = cross_validate_t(&queries, &emb, Similarity::NegPoincare).map_err(|e| e.to_string())?;
    let seen: Vec<f64> = cv.grid.iter().map(|p| p.t).collect();
    ensure(seen == expected, || format!("cross-validation visited {seen:?}"))?;
    ensure(cv.t == 1.0, || format!("selected t = {}", cv.t))?;
    Ok(format!("11 grid values, adversarial set selects t = {}", cv.t))
}

fn evaluation_stats() -> Check {
    let x = [1.0, 2.0, 3.0, 4.0];
    let checks = [
        ("pearson +1", pearson(&x, &[2.0, 4.0, 6.0, 8.0]).unwrap(), 1.0),
        ("pearson -1", pearson(&x, &[8.0, 6.0, 4.0, 2.0]).unwrap(), -1.0),
        ("spearman +1", spearman(&x, &[1.0, 10.0, 100.0, 1000.0]).unwrap(), 1.0),
        ("spearman -1", spearman(&x, &[5.0, 3.0, 1.0, 0.0]).unwrap(), -1.0),
        ("spearman one swap", spearman(&x, &[1.0, 2.0, 4.0, 3.0]).unwrap(), 0.8),
    ];
    for (name, got, want) in checks {
        ensure((got - want).abs() <= 1e-12, || format!("{name}: {got} vs {want}"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut rows = vec![("he".to_string(), vec![0.3, 0.1]), ("she".to_string(), vec![-0.3, 0.1])];
    let mut instances = Vec::new();
    for i in 0..25 {
        let mut pair = |tag: &str| {
            for side in ["m", "f"] {
                rows.push((format!("{tag}{side}{i}"), random_point(&mut rng, 2, 0.7)));
            }
            (format!("{tag}m{i}"), format!("{tag}f{i}"))
        };
        instances.push(SemBiasInstance {
            def_pair: pair("d"),
            ster_pair: pair("s"),
            none_pair_1: pair("n"),
            none_pair_2: pair("o"),
        });
    }
    let emb = EmbeddingSet::from_rows(2, Space::Poincare, rows).unwrap().0;
    let mut sums = Vec::new();
    for scoring in [SemBiasScoring::AnalogyProximity, SemBiasScoring::Gyrocosine] {
        let r = sembias_eval(&instances, &emb, &SemBiasOptions { scoring, ..Default::default() }).map_err(|e| e.to_string())?;
        let sum = r.def + r.ster + r.none;
        ensure((sum - 100.0).abs() <= 1e-9, || format!("SemBias percentages sum to {sum}"))?;
        sums.push(sum);
    }
    Ok(format!("correlation cases exact, SemBias sums {sums:?}"))
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn determinism() -> Check {
    let vocab = biased_vocabulary(&SyntheticSpec { dim: 10, ..Default::default() });
    let emb = &vocab.embedding;
    let debias = |threads| {
        in_pool(threads, || {
            let axis = gender_gyrovectors(emb, &vocab.male_words, &vocab.female_words, &MeanConfig::default()).unwrap();
            let (out, report) = debias_vocabulary(emb, &axis.gyrovectors, &PgdConfig::default()).unwrap();
            let bits: Vec<u64> = out.rows().flat_map(|(_, v)| v.iter().map(|c| c.to_bits()).collect::<Vec<_>>()).collect();
            (bits, serde_json::to_string(&report).unwrap())
        })
    };
    let runs = [debias(1), debias(1), debias(4), debias(4)];
    ensure(runs.iter().all(|r| *r == runs[0]), || "debias output depends on the run or thread count".into())?;

    // 24 targets force the sampled p-value path.
    let x: Vec<String> = vocab.neutral_words[..12].to_vec();
    let y: Vec<String> = vocab.neutral_words[12..24].to_vec();
    let spec = WeatSpec::new(&x, &y, &vocab.male_words[..4], &vocab.female_words[..4], Similarity::NegPoincare);
    let weat = |threads| {
        in_pool(threads, || {
            let r = weat_test(&spec, emb, WeatOptions::default()).unwrap();
            serde_json::to_string(&r).unwrap()
        })
    };
    let runs = [weat(1), weat(1), weat(4), weat(4)];
    ensure(runs.iter().all(|r| *r == runs[0]), || "WEAT output depends on the run or thread count".into())?;
    let sampled = weat_test(&spec, emb, WeatOptions::default()).unwrap();
    ensure(!sampled.exact, || "expected the sampled path".into())?;
    Ok(format!("debias and WEAT (sampled, p = {}) identical over 1 and 4 threads", sampled.p_value))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("gyro-algebra identities", gyro_algebra),
        ("distance, exp and log", distance_exp_log),
        ("gradient correctness", gradients),
        ("Karcher mean", karcher),
        ("PGD synthetic benchmark", pgd_benchmark),
        ("WEAT oracle", weat_oracle),
        ("analogy identities", analogy_identities),
        ("cross-validation grid", cv_grid),
        ("evaluation statistics", evaluation_stats),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
