#![allow(dead_code)]

use fairkm::dataset::{sq_distance, Dataset};
use fairkm::fairness::AnchorSet;
use fairkm::rng;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Isotropic Gaussian mixture: `clusters` unit-variance blobs whose means are
/// uniform in [-spread, spread]^d.
pub fn gaussian_mixture(n: usize, d: usize, clusters: usize, spread: f64, seed: u64) -> Dataset {
    let mut rng = rng::from_seed(seed);
    let means: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..d).map(|_| rng.random_range(-spread..spread)).collect())
        .collect();
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut coords = Vec::with_capacity(n * d);
    for i in 0..n {
        let m = &means[i % clusters];
        coords.extend(m.iter().map(|c| c + noise.sample(&mut rng)));
    }
    Dataset::from_flat(coords, d).unwrap()
}

/// Uniform points in [0, scale)^d.
pub fn uniform_points(n: usize, d: usize, scale: f64, seed: u64) -> Dataset {
    let mut rng = rng::from_seed(seed);
    let coords = (0..n * d).map(|_| rng.random::<f64>() * scale).collect();
    Dataset::from_flat(coords, d).unwrap()
}

/// Σ_x min_{c ∈ centers} ‖x − c‖², plain summation over a full scan.
pub fn naive_cost(ds: &Dataset, centers: &[usize]) -> f64 {
    ds.points()
        .map(|x| {
            centers
                .iter()
                .map(|&c| sq_distance(x, ds.point(c)))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Zone coverage recomputed by direct distance checks.
pub fn naive_all_zones_covered(ds: &Dataset, anchors: &AnchorSet, centers: &[usize]) -> bool {
    (0..anchors.len()).all(|z| {
        let a = ds.point(anchors.anchors()[z]);
        centers
            .iter()
            .any(|&c| sq_distance(a, ds.point(c)).sqrt() <= anchors.zone_radius(z))
    })
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub fn is_non_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0])
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

/// Exhaustive oracle for the best admissible swap of `p` into `centers`:
/// every removal is tried, coverage and cost recomputed from scratch.
/// Returns the minimum cost and all removed ids attaining it.
pub fn naive_best_swap(ds: &Dataset, anchors: &AnchorSet, centers: &[usize], p: usize) -> Option<(f64, Vec<usize>)> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for (slot, &q) in centers.iter().enumerate() {
        let mut next = centers.to_vec();
        next[slot] = p;
        if !naive_all_zones_covered(ds, anchors, &next) {
            continue;
        }
        let c = naive_cost(ds, &next);
        match &mut best {
            Some((b, ids)) if c == *b => ids.push(q),
            Some((b, _)) if c > *b => {}
            _ => best = Some((c, vec![q])),
        }
    }
    best
}
