use proptest::prelude::*;

use spans_core::metric::{convergence_experiment, hausdorff_distance, ConvergenceConfig, Coupling, Resolution};
use spans_core::spans::IntervalSet;

fn dyadic_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((0u32..256, 0u32..16), 1..8).prop_map(|raw| {
        IntervalSet::from_intervals(raw.iter().map(|&(a, w)| [a as f64 / 64.0, (a + w) as f64 / 64.0]), 0.0).unwrap()
    })
}

/// `sup_x |dist(x, A) - dist(x, B)|` approximated on a dense grid covering both sets.
fn sampled_distance(a: &IntervalSet, b: &IntervalSet, step: f64) -> f64 {
    let hi = a.max().unwrap().max(b.max().unwrap());
    let n = (hi / step).ceil() as usize;
    let mut d = 0.0f64;
    for x in (0..=n).map(|k| k as f64 * step) {
        if a.dist(x) == 0.0 || b.dist(x) == 0.0 {
            d = d.max((a.dist(x) - b.dist(x)).abs());
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_and_triangle(a in dyadic_set(), b in dyadic_set(), c in dyadic_set()) {
        let ab = hausdorff_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff_distance(&b, &a).unwrap());
        prop_assert!(ab <= hausdorff_distance(&a, &c).unwrap() + hausdorff_distance(&c, &b).unwrap());
        prop_assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn adding_a_point(a in dyadic_set(), x in 0u32..400) {
        let x = x as f64 / 64.0;
        let grown = a.union(&IntervalSet::point(x).unwrap(), 0.0);
        prop_assert_eq!(hausdorff_distance(&a, &grown).unwrap(), a.dist(x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn agrees_with_dense_sampling(a in dyadic_set(), b in dyadic_set()) {
        let exact = hausdorff_distance(&a, &b).unwrap();
        let sampled = sampled_distance(&a, &b, 1e-6);
        prop_assert!((exact - sampled).abs() <= 2e-6, "{} vs {}", exact, sampled);
    }
}

#[test]
fn self_comparison_is_one_lattice_step() {
    let cfg = ConvergenceConfig {
        coupling: Coupling::Knight,
        resolution: Resolution::Levels(vec![5]),
        reference_level: 5,
        n_seeds: 8,
    };
    let r = convergence_experiment(&cfg, 2).unwrap();
    assert!(r.rows[0].q75 <= 1.0 / 1024.0);
}

#[test]
fn coupling_reduces_distance() {
    let run = |coupling| {
        let cfg = ConvergenceConfig { coupling, resolution: Resolution::Levels(vec![4, 5]), reference_level: 7, n_seeds: 30 };
        convergence_experiment(&cfg, 8).unwrap()
    };
    let (knight, indep) = (run(Coupling::Knight), run(Coupling::Independent));
    for (k, i) in knight.rows.iter().zip(&indep.rows) {
        assert!(k.median < i.median, "{k:?} vs {i:?}");
    }
    assert!(knight.to_csv().starts_with("parameter,median,q25,q75,n_seeds\n256,"));
}

#[test]
fn experiment_is_reproducible() {
    let cfg = ConvergenceConfig {
        coupling: Coupling::Independent,
        resolution: Resolution::Steps(vec![100, 300]),
        reference_level: 5,
        n_seeds: 6,
    };
    assert_eq!(convergence_experiment(&cfg, 4).unwrap(), convergence_experiment(&cfg, 4).unwrap());
}
