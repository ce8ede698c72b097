use ecg_ident::beats::normalize_beat;
use ecg_ident::eval::{chronological_split, rate_from_confusion, run_experiment, ExperimentOptions, FeatureGroup};
use ecg_ident::features::{FeatureRow, FeatureTable};
use ecg_ident::morph::compute_descriptors;
use ecg_ident::svm::{solve_dual, train_multiclass, Kernel, MulticlassOptions, TrainConfig};
use proptest::prelude::*;

mod common;

fn window(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, len)
}

fn unique_extrema(w: &[f64]) -> bool {
    let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
    w.iter().filter(|&&v| v == max).count() == 1 && w.iter().filter(|&&v| v == min).count() == 1
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn total_area_is_sum_of_parts(w in window(2..60)) {
        let d = compute_descriptors(&w, 360.0).unwrap();
        prop_assert_eq!(d.ar, d.arp + d.arn);
        prop_assert!(d.arp >= 0.0 && d.arn >= 0.0);
    }
}

proptest! {
    #[test]
    fn normalization_ignores_offset_and_scale(
        w in window(3..80),
        a in 0.01..100.0f64,
        b in -50.0..50.0f64,
    ) {
        let base = match normalize_beat(&w) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        let moved: Vec<f64> = w.iter().map(|v| a * v + b).collect();
        let other = normalize_beat(&moved).unwrap();
        for (x, y) in base.iter().zip(&other) {
            prop_assert!((x - y).abs() <= 1e-9, "{} vs {}", x, y);
        }
    }

    #[test]
    fn descriptor_homogeneity(w in window(4..60), k in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let d = compute_descriptors(&w, 360.0).unwrap();
        let threshold = 0.7 * d.pp.abs().max(d.pn.abs());
        // keep the significant-sample set away from the threshold
        prop_assume!(w.iter().all(|v| (v.abs() - threshold).abs() > 1e-6 * threshold.max(1.0)));
        let scaled: Vec<f64> = w.iter().map(|v| k * v).collect();
        let s = compute_descriptors(&scaled, 360.0).unwrap();
        for (a, b) in [(d.pp, s.pp), (d.pn, s.pn), (d.arp, s.arp), (d.arn, s.arn), (d.ar, s.ar), (d.s1, s.s1), (d.s2, s.s2)] {
            prop_assert!(close(k * a, b, 1e-12), "{} * {} vs {}", k, a, b);
        }
        prop_assert_eq!((d.no, d.ima, d.imi), (s.no, s.ima, s.imi));
    }

    #[test]
    fn time_reversal(w in window(4..60)) {
        prop_assume!(unique_extrema(&w));
        let fs = 500.0;
        let duration = (w.len() - 1) as f64 * 1000.0 / fs;
        let d = compute_descriptors(&w, fs).unwrap();
        let rev: Vec<f64> = w.iter().rev().cloned().collect();
        let r = compute_descriptors(&rev, fs).unwrap();
        prop_assert_eq!((d.pp, d.pn, d.no), (r.pp, r.pn, r.no));
        prop_assert!(close(d.arp, r.arp, 1e-12) && close(d.arn, r.arn, 1e-12));
        prop_assert!(close(r.ima, duration - d.ima, 1e-12));
        prop_assert!(close(r.imi, duration - d.imi, 1e-12));
        // the segment between the two extrema is traversed backwards
        prop_assert!(close(r.s2, -d.s2, 1e-9));
    }

    #[test]
    fn kernels_are_symmetric(
        x in prop::collection::vec(-3.0..3.0f64, 5),
        y in prop::collection::vec(-3.0..3.0f64, 5),
        sigma in 0.1..5.0f64,
        degree in 1u32..4,
    ) {
        let rbf = Kernel::rbf(sigma);
        prop_assert_eq!(rbf.eval(&x, &y).unwrap(), rbf.eval(&y, &x).unwrap());
        let poly = Kernel::polynomial(0.5, 1.0, degree as f64);
        prop_assert_eq!(poly.eval(&x, &y).unwrap(), poly.eval(&y, &x).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn converged_solutions_satisfy_kkt(seed in any::<u64>(), n in 3usize..30, c in prop::sample::select(vec![0.5, 10.0, 1000.0])) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = common::random_dataset(&mut rng, n, 3);
        let kernel = Kernel::rbf(1.0);
        let config = TrainConfig::with_c(c);
        let sol = solve_dual(&x, &y, &kernel, &config).unwrap();
        prop_assume!(sol.converged);
        let v = common::kkt_violation(&x, &y, &sol.alpha, sol.bias, &kernel, c);
        prop_assert!(v <= config.kkt_tolerance, "violation {}", v);
        let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        prop_assert!(balance.abs() <= 1e-6);
        prop_assert!(sol.alpha.iter().all(|&a| (0.0..=c).contains(&a)));
    }

    #[test]
    fn monotone_relabeling_does_not_change_predictions(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut labels = Vec::new();
        for class in 0..4 {
            let centre: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            for _ in 0..6 {
                x.push(centre.iter().map(|c| c + rng.random_range(-0.8..0.8)).collect::<Vec<f64>>());
                labels.push(format!("s{class}"));
            }
        }
        let relabeled: Vec<String> = labels.iter().map(|l| format!("id-{l}")).collect();
        let kernel = Kernel::rbf(0.5);
        let config = TrainConfig::with_c(10.0);
        let a = train_multiclass(&x, &labels, &kernel, &config, MulticlassOptions::default()).unwrap();
        let b = train_multiclass(&x, &relabeled, &kernel, &config, MulticlassOptions::default()).unwrap();
        let probes: Vec<Vec<f64>> = (0..20).map(|_| (0..3).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        for p in &probes {
            let pa = a.predict(p).unwrap();
            let pb = b.predict(p).unwrap();
            prop_assert_eq!(format!("id-{pa}"), pb);
        }
    }

    #[test]
    fn split_is_deterministic_and_chronological(counts in prop::collection::vec(3usize..40, 2..6), fraction in 0.2..0.9f64) {
        let rows: Vec<FeatureRow> = counts
            .iter()
            .enumerate()
            .flat_map(|(s, &n)| (0..n).rev().map(move |k| FeatureRow { label: format!("s{s}"), ordinal: k, values: vec![] }))
            .collect();
        let a = chronological_split(&rows, fraction).unwrap();
        let b = chronological_split(&rows, fraction).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.train.len() + a.test.len(), rows.len());
        for (s, &n) in counts.iter().enumerate() {
            let label = format!("s{s}");
            let max_train = a.train.iter().filter(|&&i| rows[i].label == label).map(|&i| rows[i].ordinal).max().unwrap();
            let min_test = a.test.iter().filter(|&&i| rows[i].label == label).map(|&i| rows[i].ordinal).min().unwrap();
            prop_assert!(max_train < min_test, "subject {} of {} beats", s, n);
        }
    }
}

#[test]
fn confusion_conserves_test_beats() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let columns = vec!["Pp".to_string(), "Pn".to_string(), "ArP".to_string()];
    let mut rows = Vec::new();
    for s in 0..4 {
        let n = 10 + 3 * s;
        for k in 0..n {
            let values = (0..3).map(|d| (s * d) as f64 * 0.3 + rng.random_range(-1.0..1.0)).collect();
            rows.push(FeatureRow { label: format!("s{s}"), ordinal: k, values });
        }
    }
    let table = FeatureTable { columns, rows };
    let split = chronological_split(&table.rows, 2.0 / 3.0).unwrap();
    let group: FeatureGroup = "amplitude".parse().unwrap();
    let row = run_experiment(&table, &split, &group, &Kernel::rbf(0.5), 10.0, &ExperimentOptions::default()).unwrap();
    assert_eq!(row.total(), split.test.len());
    for (i, label) in row.labels.iter().enumerate() {
        let expected = split.test.iter().filter(|&&t| &table.rows[t].label == label).count();
        assert_eq!(row.confusion[i].iter().sum::<usize>(), expected);
    }
    assert_eq!(row.global_rate, rate_from_confusion(&row.confusion));
}
