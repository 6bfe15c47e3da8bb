mod common;

use fairkm::baselines::lloyd;
use fairkm::centers::CenterPositions;
use fairkm::dataset::{compute_radii, RadiusBounds, RadiusMode};
use fairkm::fairness::{build_coverage_positions, seed};
use fairkm::flloyd::{flloyd_run, refine_positions, FlConfig, ZoneConstraint};
use fairkm::lspp::{init_solution, run, LsConfig, Solution};
use fairkm::metrics::bound_ratio;
use fairkm::rng;
use rand::Rng;

use common::*;

#[test]
fn refinement_is_monotone_and_keeps_zones() {
    let mut rng = rng::from_seed(1);
    let mut done = 0;
    while done < 100 {
        let n = rng.random_range(20..250);
        let k = rng.random_range(2..10.min(n));
        let ds = gaussian_mixture(n, rng.random_range(1..4), rng.random_range(1..6), 6.0, rng.random());
        let delta = compute_radii(&ds, k, RadiusMode::Exact).unwrap();
        let cfg = LsConfig::new(k).with_iterations(50).with_seed(rng.random());
        let Ok(out) = run(&ds, &delta, &cfg) else { continue };
        for constraint in [ZoneConstraint::SoleCoverer, ZoneConstraint::AllCovered] {
            let fl = FlConfig {
                constraint,
                ..FlConfig::default()
            };
            let refined = flloyd_run(&ds, &out.solution, &out.anchors, &fl).unwrap();
            assert!(is_non_increasing(&refined.costs), "{:?}", refined.costs);
            assert!(rel_close(refined.costs[0], out.solution.total_cost(), 1e-12));
            assert!(build_coverage_positions(&out.anchors, &refined.centers, &ds).all_covered());
            assert!(bound_ratio(&ds, &delta, &refined.centers).unwrap().ratio <= 6.0);
        }
        done += 1;
    }
}

#[test]
fn zero_rounds_return_input() {
    let ds = gaussian_mixture(80, 2, 3, 5.0, 2);
    let delta = compute_radii(&ds, 3, RadiusMode::Exact).unwrap();
    let out = run(&ds, &delta, &LsConfig::new(3).with_iterations(10)).unwrap();
    let fl = FlConfig {
        iterations: 0,
        ..FlConfig::default()
    };
    let refined = flloyd_run(&ds, &out.solution, &out.anchors, &fl).unwrap();
    assert_eq!(refined.centers, out.solution.positions(&ds));
    assert_eq!(refined.costs.len(), 1);
}

#[test]
fn unconstrained_refinement_equals_lloyd() {
    for s in 0..20 {
        let ds = gaussian_mixture(150, 2, 4, 6.0, 100 + s);
        // huge radii: a single anchor whose zone holds everything
        let delta = RadiusBounds::uniform(ds.len(), 1e6).unwrap();
        let anchors = seed(&ds, &delta, 3.0).unwrap();
        let sol = init_solution(&ds, &anchors, 4, s).unwrap();
        let fl = FlConfig {
            iterations: 200,
            ..FlConfig::default()
        };
        let refined = flloyd_run(&ds, &sol, &anchors, &fl).unwrap();
        let plain = lloyd(&ds, sol.positions(&ds), 200, 0.0).unwrap();
        for (a, b) in refined.centers.as_flat().iter().zip(plain.centers.as_flat()) {
            assert!((a - b).abs() <= 1e-6, "seed {s}: {a} vs {b}");
        }
    }
}

#[test]
fn binding_zone_clamps_the_move() {
    // Zone around 0 with radius 3 (delta 1); the only center inside is at 1,
    // and its cluster mean lies far outside the zone.
    let ds = fairkm::Dataset::from_1d(&[0.0, 1.0, 9.0, 10.0, 11.0, 50.0]).unwrap();
    let delta = RadiusBounds::from_values(vec![1.0, 1e3, 1e3, 1e3, 1e3, 1e3]).unwrap();
    let anchors = seed(&ds, &delta, 3.0).unwrap();
    assert_eq!(anchors.anchors(), &[0]);
    let sol = Solution::new(&ds, &anchors, vec![1, 5]).unwrap();
    let refined = flloyd_run(&ds, &sol, &anchors, &FlConfig::default()).unwrap();
    let c0 = refined.centers.center(0)[0];
    assert!(c0 <= 3.0 && c0 > 3.0 - 1e-9, "center pinned at zone edge, got {c0}");
    assert!(is_non_increasing(&refined.costs));
}

#[test]
fn refine_positions_accepts_off_data_centers() {
    let ds = gaussian_mixture(60, 2, 2, 6.0, 4);
    let delta = RadiusBounds::uniform(ds.len(), 1e6).unwrap();
    let anchors = seed(&ds, &delta, 3.0).unwrap();
    let start = CenterPositions::from_points(&[ds.point(0).to_vec(), vec![0.0, 0.0]]).unwrap();
    let out = refine_positions(&ds, start, &anchors, &FlConfig::default()).unwrap();
    assert!(is_non_increasing(&out.costs));
}
