mod common;

use fairkm::dataset::{compute_radii, Dataset, RadiusBounds, RadiusMode};
use fairkm::fairness::{build_coverage, is_radius_feasible, seed};
use fairkm::rng;
use proptest::prelude::*;
use rand::Rng;

use common::{gaussian_mixture, uniform_points};

fn check_seeding(ds: &Dataset, delta: &RadiusBounds, gamma: f64) {
    let a = seed(ds, delta, gamma).unwrap();
    let anchors = a.anchors();
    for p in 0..ds.len() {
        let d = anchors.iter().map(|&x| ds.dist(p, x)).fold(f64::INFINITY, f64::min);
        assert!(d <= gamma * delta.get(p), "point {p} uncovered");
        // the covering anchor has no larger radius than p
        let cover = a.covering_anchor(p);
        assert!(ds.dist(p, cover) <= gamma * delta.get(p));
        assert!(delta.get(cover) <= delta.get(p));
    }
    for (i, &x) in anchors.iter().enumerate() {
        for &y in &anchors[i + 1..] {
            assert!(ds.dist(x, y) > delta.get(x) + delta.get(y), "anchors {x},{y} overlap");
        }
    }
    for w in anchors.windows(2) {
        assert!(delta.get(w[0]) <= delta.get(w[1]));
    }
    assert!(build_coverage(&a, anchors, ds).all_covered());
}

#[test]
fn seeding_invariants_on_mixtures() {
    for s in 0..40 {
        let n = 50 + (s as usize * 37) % 400;
        let d = 1 + (s as usize % 4);
        let ds = gaussian_mixture(n, d, 1 + s as usize % 7, 8.0, s);
        for k in [2, 5, 13] {
            let delta = compute_radii(&ds, k, RadiusMode::Exact).unwrap();
            for gamma in [2.5, 3.0, 6.0] {
                check_seeding(&ds, &delta, gamma);
            }
        }
    }
}

#[test]
fn seeding_invariants_with_duplicates_and_zero_radii() {
    let ds = Dataset::from_1d(&[0.0, 0.0, 0.0, 1.0, 1.0, 5.0, 5.0, 5.0, 9.0]).unwrap();
    for k in 1..=ds.len() {
        let delta = compute_radii(&ds, k, RadiusMode::Exact).unwrap();
        check_seeding(&ds, &delta, 3.0);
    }
}

/// Whether some k-subset of the points serves every p within δ(p).
fn exists_fair_k_subset(ds: &Dataset, delta: &RadiusBounds, k: usize) -> bool {
    let n = ds.len();
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).any(|mask| {
        let centers: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        is_radius_feasible(ds, delta, &centers, 1.0).unwrap().feasible
    })
}

#[test]
fn feasible_instances_need_at_most_k_anchors() {
    let mut rng = rng::from_seed(2024);
    let mut feasible_seen = 0;
    for trial in 0..300 {
        let n = rng.random_range(3..=12);
        let k = rng.random_range(1..=4.min(n));
        let ds = uniform_points(n, 2, 10.0, trial);
        // random radii, sometimes the rank radii
        let delta = if trial % 2 == 0 {
            compute_radii(&ds, k, RadiusMode::Exact).unwrap()
        } else {
            RadiusBounds::from_values((0..n).map(|_| rng.random_range(0.5..6.0)).collect()).unwrap()
        };
        if exists_fair_k_subset(&ds, &delta, k) {
            feasible_seen += 1;
            let a = seed(&ds, &delta, 3.0).unwrap();
            assert!(a.len() <= k, "trial {trial}: {} anchors for k={k}", a.len());
        }
    }
    assert!(feasible_seen > 50, "only {feasible_seen} feasible instances generated");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn seeding_invariants_random(
        pts in prop::collection::vec((-20.0f64..20.0, -20.0f64..20.0), 1..60),
        radii in prop::collection::vec(0.0f64..5.0, 60),
        gamma in 2.01f64..8.0,
    ) {
        let coords: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
        let ds = Dataset::from_points(&coords).unwrap();
        let delta = RadiusBounds::from_values(radii[..ds.len()].to_vec()).unwrap();
        check_seeding(&ds, &delta, gamma);
    }
}
