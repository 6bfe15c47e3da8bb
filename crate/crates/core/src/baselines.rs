//! Comparison algorithms and exact oracles for small instances.

use rand::Rng as _;

use crate::centers::CenterPositions;
use crate::dataset::{sq_distance, Dataset, RadiusBounds};
use crate::error::{Error, Result};
use crate::fairness::{self, AnchorSet};
use crate::lspp::{init_solution, Solution};
use crate::metrics::{compensated_sum, cost, radius_ratio, Objective};
use crate::rng;

/// Largest number of subsets [`brute_force_opt`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// Seeding anchors completed to k centers at random, without local search.
pub fn greedy_baseline(
    ds: &Dataset,
    delta: &RadiusBounds,
    gamma: f64,
    k: usize,
    seed: u64,
) -> Result<(Solution, AnchorSet)> {
    let anchors = fairness::seed_checked(ds, delta, gamma, k)?;
    let sol = init_solution(ds, &anchors, k, seed)?;
    Ok((sol, anchors))
}

/// k-means++ seeding: first center uniform, then proportional to the squared
/// distance to the chosen set. Falls back to a uniform unchosen point when
/// every remaining point coincides with a chosen one.
pub fn kmeanspp_init(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = ds.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut rng = rng::from_seed(seed);
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    let mut centers = vec![first];
    chosen[first] = true;
    let mut d2: Vec<f64> = ds.points().map(|x| sq_distance(x, ds.point(first))).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    pick = Some(i);
                    if acc > target {
                        break;
                    }
                }
            }
            pick.expect("positive total has a positive weight")
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centers.push(pick);
        for (x, w) in ds.points().zip(d2.iter_mut()) {
            *w = w.min(sq_distance(x, ds.point(pick)));
        }
    }
    Ok(centers)
}

/// Output of [`lloyd`].
#[derive(Debug, Clone)]
pub struct LloydOutput {
    pub centers: CenterPositions,
    /// Cost at the start, then after each completed iteration.
    pub costs: Vec<f64>,
}

/// Standard Lloyd iterations. Stops early on a fixed point, when the relative
/// improvement falls below `tol` (if positive), or when rounding would raise
/// the cost. Empty clusters keep their center.
pub fn lloyd(ds: &Dataset, mut centers: CenterPositions, iterations: usize, tol: f64) -> Result<LloydOutput> {
    let (k, d) = (centers.len(), ds.dim());
    let mut current = cost(ds, &centers, Objective::KMeans)?;
    let mut costs = vec![current];
    for _ in 0..iterations {
        let mut sums = vec![0.0; k * d];
        let mut sizes = vec![0usize; k];
        for x in ds.points() {
            let (l, _) = centers.nearest(x);
            sizes[l] += 1;
            for (s, v) in sums[l * d..(l + 1) * d].iter_mut().zip(x) {
                *s += v;
            }
        }
        let mut next = centers.clone();
        for i in (0..k).filter(|&i| sizes[i] > 0) {
            for (c, s) in next.center_mut(i).iter_mut().zip(&sums[i * d..(i + 1) * d]) {
                *c = s / sizes[i] as f64;
            }
        }
        if next == centers {
            break;
        }
        let next_cost = cost(ds, &next, Objective::KMeans)?;
        if next_cost > current {
            break;
        }
        let improvement = current - next_cost;
        centers = next;
        current = next_cost;
        costs.push(current);
        if tol > 0.0 && improvement <= tol * costs[costs.len() - 2] {
            break;
        }
    }
    Ok(LloydOutput { centers, costs })
}

/// Unconstrained baseline: k-means++ seeding followed by up to 100 Lloyd
/// iterations (relative improvement threshold 1e-6).
pub fn vanilla_kmeans(ds: &Dataset, k: usize, seed: u64) -> Result<LloydOutput> {
    let ids = kmeanspp_init(ds, k, seed)?;
    lloyd(ds, CenterPositions::from_ids(ds, &ids)?, 100, 1e-6)
}

/// Exact optimum of an exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub cost: f64,
    pub centers: Vec<usize>,
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// Cheapest k-subset of the points with dist(p, S) ≤ β·δ(p) for every p.
pub fn brute_force_opt(ds: &Dataset, delta: &RadiusBounds, beta: f64, k: usize) -> Result<BruteForce> {
    let n = ds.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    delta.check_matches(ds)?;
    let subsets = binomial(n, k);
    if subsets > BRUTE_FORCE_LIMIT {
        return Err(Error::SearchTooLarge {
            subsets,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let sq: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| sq_distance(ds.point(i), ds.point(j)))
        .collect();

    let mut best: Option<BruteForce> = None;
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let nearest: Vec<f64> = (0..n)
            .map(|p| combo.iter().map(|&c| sq[p * n + c]).fold(f64::INFINITY, f64::min))
            .collect();
        let feasible = nearest
            .iter()
            .enumerate()
            .all(|(p, &d2)| radius_ratio(d2.sqrt(), delta.get(p)) <= beta);
        if feasible {
            let c = compensated_sum(nearest.iter().copied());
            if best.as_ref().is_none_or(|b| c < b.cost) {
                best = Some(BruteForce {
                    cost: c,
                    centers: combo.clone(),
                });
            }
        }
        // next combination in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
            break;
        };
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
    best.ok_or(Error::NoFeasibleSubset { k })
}

/// Replaces each center by its nearest candidate (ties: lowest id), moving on
/// to the next-nearest candidate not yet taken so the k ids stay distinct.
pub fn project_to_candidates(centers: &CenterPositions, candidates: &Dataset) -> Result<Vec<usize>> {
    if centers.len() > candidates.len() {
        return Err(Error::InvalidArgument(format!(
            "{} centers cannot map to {} distinct candidates",
            centers.len(),
            candidates.len()
        )));
    }
    let mut taken = vec![false; candidates.len()];
    let mut out = Vec::with_capacity(centers.len());
    for c in centers.iter() {
        let mut order: Vec<(f64, usize)> = candidates
            .points()
            .enumerate()
            .map(|(i, x)| (sq_distance(c, x), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (_, pick) = *order
            .iter()
            .find(|(_, i)| !taken[*i])
            .expect("more candidates than centers");
        taken[pick] = true;
        out.push(pick);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[f64]) -> Dataset {
        Dataset::from_1d(v).unwrap()
    }

    #[test]
    fn lloyd_two_clusters() {
        let ds = line(&[0.0, 1.0, 10.0, 11.0]);
        let start = CenterPositions::from_points(&[[0.0], [10.0]]).unwrap();
        let out = lloyd(&ds, start.clone(), 10, 0.0).unwrap();
        assert_eq!(out.centers.as_flat(), &[0.5, 10.5]);
        assert_eq!(*out.costs.last().unwrap(), 1.0);
        let none = lloyd(&ds, start.clone(), 0, 0.0).unwrap();
        assert_eq!(none.centers, start);
    }

    #[test]
    fn lloyd_keeps_empty_cluster_center() {
        let ds = line(&[0.0, 1.0]);
        let start = CenterPositions::from_points(&[[0.0], [100.0]]).unwrap();
        let out = lloyd(&ds, start, 5, 0.0).unwrap();
        assert_eq!(out.centers.center(1), &[100.0]);
    }

    #[test]
    fn kmeanspp_edge_cases() {
        let ds = line(&[0.0, 1.0, 1.0, 7.0]);
        let all = kmeanspp_init(&ds, 4, 3).unwrap();
        let mut sorted = all.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
        assert_eq!(kmeanspp_init(&ds, 1, 3).unwrap().len(), 1);
        assert!(kmeanspp_init(&ds, 5, 3).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let ds = line(&[0.0, 1.0, 10.0, 11.0]);
        let loose = RadiusBounds::uniform(4, 1e9).unwrap();
        let bf = brute_force_opt(&ds, &loose, 1.0, 2).unwrap();
        assert_eq!(bf.cost, 2.0);
        assert!(bf.centers[0] <= 1 && bf.centers[1] >= 2);
        assert_eq!(brute_force_opt(&ds, &loose, 1.0, 4).unwrap().cost, 0.0);
        let zero = RadiusBounds::uniform(4, 0.0).unwrap();
        assert!(matches!(
            brute_force_opt(&ds, &zero, 6.0, 3),
            Err(Error::NoFeasibleSubset { k: 3 })
        ));
    }

    #[test]
    fn brute_force_guard() {
        let ds = Dataset::from_1d(&(0..40).map(f64::from).collect::<Vec<_>>()).unwrap();
        let loose = RadiusBounds::uniform(40, 1e9).unwrap();
        assert!(matches!(
            brute_force_opt(&ds, &loose, 1.0, 10),
            Err(Error::SearchTooLarge { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let cands = line(&[0.0, 1.0, 5.0]);
        let c = CenterPositions::from_points(&[[0.4]]).unwrap();
        assert_eq!(project_to_candidates(&c, &cands).unwrap(), vec![0]);
        let same = CenterPositions::from_ids(&cands, &[2, 0]).unwrap();
        assert_eq!(project_to_candidates(&same, &cands).unwrap(), vec![2, 0]);
        // both nearest to 1; the second falls back to 0 (next nearest)
        let clash = CenterPositions::from_points(&[[1.1], [0.8]]).unwrap();
        assert_eq!(project_to_candidates(&clash, &cands).unwrap(), vec![1, 0]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(12, 3), 220);
        assert_eq!(binomial(40, 10), 847_660_528);
    }
}
