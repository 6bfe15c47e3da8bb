//! Radius-constrained local search with D²-sampling.
//!
//! Each step samples a point p proportionally to its squared distance to the
//! current centers, then looks for the center q whose replacement by p lowers
//! the k-means cost the most while leaving every anchor zone covered. Swap
//! costs are evaluated from cached nearest/second-nearest distances, so one
//! step costs a single O(nd) distance pass plus O(n + k·|anchors|).

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::centers::CenterPositions;
use crate::dataset::{aspect_ratio, sq_distance, Dataset, RadiusBounds};
use crate::error::{Error, Result};
use crate::fairness::{self, AnchorSet, CoverageTable, DEFAULT_GAMMA, EAGER_MEMBERSHIP_LIMIT};
use crate::metrics::{compensated_sum, radius_ratio, CompensatedSum};
use crate::rng::{self, Rng};

const NONE: u32 = u32::MAX;

/// A set of k dataset points acting as centers, with per-point caches.
#[derive(Debug, Clone)]
pub struct Solution {
    /// Slot -> point id. Swaps replace a slot in place.
    centers: Vec<usize>,
    nearest: Vec<u32>,
    second: Vec<u32>,
    d1sq: Vec<f64>,
    d2sq: Vec<f64>,
    /// Per slot, the anchor zones containing that center.
    zones: Vec<Vec<u32>>,
    coverage: CoverageTable,
    total_cost: f64,
}

impl Solution {
    /// Builds all caches from scratch.
    pub fn new(ds: &Dataset, anchors: &AnchorSet, centers: Vec<usize>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptyCenters);
        }
        if let Some(&bad) = centers.iter().find(|&&c| c >= ds.len()) {
            return Err(Error::InvalidArgument(format!("center id {bad} out of range")));
        }
        let n = ds.len();
        let mut sol = Self {
            nearest: vec![NONE; n],
            second: vec![NONE; n],
            d1sq: vec![f64::INFINITY; n],
            d2sq: vec![f64::INFINITY; n],
            zones: centers
                .iter()
                .map(|&c| anchors.zones_of_point(ds, c))
                .collect(),
            coverage: CoverageTable::new(anchors.len()),
            total_cost: 0.0,
            centers,
        };
        for z in &sol.zones {
            sol.coverage.add_zones(z);
        }
        for x in 0..n {
            let (n1, d1, n2, d2) = sol.scan(ds, x);
            sol.nearest[x] = n1;
            sol.d1sq[x] = d1;
            sol.second[x] = n2;
            sol.d2sq[x] = d2;
        }
        sol.total_cost = compensated_sum(sol.d1sq.iter().copied());
        Ok(sol)
    }

    /// Nearest and second-nearest slots of point x by full scan.
    fn scan(&self, ds: &Dataset, x: usize) -> (u32, f64, u32, f64) {
        let px = ds.point(x);
        let (mut n1, mut d1, mut n2, mut d2) = (NONE, f64::INFINITY, NONE, f64::INFINITY);
        for (slot, &c) in self.centers.iter().enumerate() {
            let d = sq_distance(px, ds.point(c));
            if d < d1 {
                (n2, d2) = (n1, d1);
                (n1, d1) = (slot as u32, d);
            } else if d < d2 {
                (n2, d2) = (slot as u32, d);
            }
        }
        (n1, d1, n2, d2)
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    /// Center point ids in slot order.
    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn positions(&self, ds: &Dataset) -> CenterPositions {
        CenterPositions::from_ids(ds, &self.centers).expect("solution has centers")
    }

    /// Σ dist(p, S)².
    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    pub fn coverage(&self) -> &CoverageTable {
        &self.coverage
    }

    /// Point id of the center nearest to `x`.
    pub fn nearest_center(&self, x: usize) -> usize {
        self.centers[self.nearest[x] as usize]
    }

    pub fn d1(&self, x: usize) -> f64 {
        self.d1sq[x].sqrt()
    }

    /// Distance to the second-nearest center (+∞ when k = 1).
    pub fn d2(&self, x: usize) -> f64 {
        self.d2sq[x].sqrt()
    }

    pub fn d1_squared(&self) -> &[f64] {
        &self.d1sq
    }

    pub fn d2_squared(&self) -> &[f64] {
        &self.d2sq
    }

    pub fn contains(&self, id: usize) -> bool {
        self.centers.contains(&id)
    }

    /// max_p dist(p, S)/δ(p) from the cached distances.
    pub fn bound_ratio(&self, delta: &RadiusBounds) -> f64 {
        (0..self.d1sq.len())
            .map(|x| radius_ratio(self.d1(x), delta.get(x)))
            .fold(0.0, f64::max)
    }

    /// Compares the caches against a from-scratch rebuild. Distances and cost
    /// must agree within `rel_tol`; returns a description of the first mismatch.
    pub fn check_consistency(&self, ds: &Dataset, anchors: &AnchorSet, rel_tol: f64) -> Result<(), String> {
        let fresh = Solution::new(ds, anchors, self.centers.clone()).map_err(|e| e.to_string())?;
        let close = |a: f64, b: f64| a == b || (a - b).abs() <= rel_tol * a.abs().max(b.abs());
        for x in 0..ds.len() {
            if !close(self.d1sq[x], fresh.d1sq[x]) || !close(self.d2sq[x], fresh.d2sq[x]) {
                return Err(format!(
                    "point {x}: cached ({}, {}) vs fresh ({}, {})",
                    self.d1sq[x], self.d2sq[x], fresh.d1sq[x], fresh.d2sq[x]
                ));
            }
            let via_nearest = sq_distance(ds.point(x), ds.point(self.nearest_center(x)));
            if !close(via_nearest, fresh.d1sq[x]) {
                return Err(format!("point {x}: nearest center is not the closest"));
            }
        }
        if self.coverage != fresh.coverage {
            return Err(format!(
                "coverage {:?} vs fresh {:?}",
                self.coverage.counts(),
                fresh.coverage.counts()
            ));
        }
        if !close(self.total_cost, fresh.total_cost) {
            return Err(format!("cost {} vs fresh {}", self.total_cost, fresh.total_cost));
        }
        Ok(())
    }
}

/// How many local-search steps to run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationBudget {
    Fixed(usize),
    /// ⌈k·ln(n·Δ)⌉ with Δ the aspect ratio.
    Theoretical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsConfig {
    pub k: usize,
    pub gamma: f64,
    pub iterations: IterationBudget,
    pub seed: u64,
    /// Independent runs (seeds `seed`, `seed + 1`, ...); the cheapest wins.
    pub restarts: usize,
}

impl LsConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            gamma: DEFAULT_GAMMA,
            iterations: IterationBudget::Fixed(500),
            seed: 0,
            restarts: 1,
        }
    }

    pub fn with_iterations(mut self, z: usize) -> Self {
        self.iterations = IterationBudget::Fixed(z);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    fn resolve_iterations(&self, ds: &Dataset) -> usize {
        match self.iterations {
            IterationBudget::Fixed(z) => z,
            IterationBudget::Theoretical => {
                let delta = aspect_ratio(ds).map_or(1.0, |a| a.0);
                (self.k as f64 * (ds.len() as f64 * delta).ln()).ceil().max(0.0) as usize
            }
        }
    }
}

/// Anchors plus `k - |anchors|` distinct non-anchor points drawn uniformly.
pub fn init_solution(ds: &Dataset, anchors: &AnchorSet, k: usize, seed: u64) -> Result<Solution> {
    let mut rng = rng::from_seed(seed);
    init_with_rng(ds, anchors, k, &mut rng)
}

fn init_with_rng(ds: &Dataset, anchors: &AnchorSet, k: usize, rng: &mut Rng) -> Result<Solution> {
    if k == 0 || ds.len() < k {
        return Err(Error::InvalidK { k, n: ds.len() });
    }
    anchors.check_feasible(k)?;
    let mut is_anchor = vec![false; ds.len()];
    for &a in anchors.anchors() {
        is_anchor[a] = true;
    }
    let others: Vec<usize> = (0..ds.len()).filter(|&p| !is_anchor[p]).collect();
    let mut centers = anchors.anchors().to_vec();
    let fill = k - centers.len();
    centers.extend(index::sample(rng, others.len(), fill).into_iter().map(|i| others[i]));
    Solution::new(ds, anchors, centers)
}

/// Draws a point with probability d1(p)²/Σ d1(q)². `None` when the cost is zero.
pub fn d2_sample(sol: &Solution, rng: &mut Rng) -> Option<usize> {
    let total: f64 = sol.d1sq.iter().sum();
    // also rejects a NaN total
    if total.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (x, &w) in sol.d1sq.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = Some(x);
            if acc > target {
                return Some(x);
            }
        }
    }
    // rounding left target at the very top of the range
    last_positive
}

/// The cheapest admissible swap for a candidate point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapCandidate {
    /// Slot of the center to remove.
    pub slot: usize,
    /// Point id of the center to remove.
    pub removed: usize,
    /// k-means cost after the swap.
    pub cost: f64,
}

/// Best swap of `p` for one of the current centers that keeps every anchor
/// zone covered. `None` when no center may be removed.
pub fn evaluate_swaps(ds: &Dataset, sol: &Solution, p: usize, anchors: &AnchorSet) -> Option<SwapCandidate> {
    let pp = ds.point(p);
    let dp: Vec<f64> = ds.points().map(|x| sq_distance(x, pp)).collect();
    evaluate_with_distances(ds, sol, p, &dp, anchors)
}

fn admissible_slots(ds: &Dataset, sol: &Solution, p: usize, anchors: &AnchorSet) -> Vec<bool> {
    let p_zones = anchors.zones_of_point(ds, p);
    sol.zones
        .iter()
        .map(|zs| {
            zs.iter().all(|&z| {
                // count - [q covers z] + [p covers z] >= 1
                sol.coverage.count(z as usize) >= 2 || p_zones.binary_search(&z).is_ok()
            })
        })
        .collect()
}

fn evaluate_with_distances(
    ds: &Dataset,
    sol: &Solution,
    p: usize,
    dp: &[f64],
    anchors: &AnchorSet,
) -> Option<SwapCandidate> {
    let admissible = admissible_slots(ds, sol, p, anchors);
    if !admissible.iter().any(|&a| a) {
        return None;
    }
    let k = sol.k();
    let mut base = CompensatedSum::new();
    let mut delta = vec![CompensatedSum::new(); k];
    for x in 0..dp.len() {
        let with_p = sol.d1sq[x].min(dp[x]);
        base.add(with_p);
        let slot = sol.nearest[x] as usize;
        let without_nearest = sol.d2sq[x].min(dp[x]);
        if without_nearest != with_p {
            delta[slot].add(without_nearest - with_p);
        }
    }
    let base = base.value();
    let mut best: Option<SwapCandidate> = None;
    for slot in (0..k).filter(|&s| admissible[s]) {
        let cand = SwapCandidate {
            slot,
            removed: sol.centers[slot],
            cost: base + delta[slot].value(),
        };
        let better = match best {
            None => true,
            Some(b) => cand.cost < b.cost || (cand.cost == b.cost && cand.removed < b.removed),
        };
        if better {
            best = Some(cand);
        }
    }
    best
}

/// Outcome of one local-search step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub accepted: bool,
    /// The D²-sampled point (`None` when the cost was already zero).
    pub sampled: Option<usize>,
    /// Center id swapped out, when accepted.
    pub removed: Option<usize>,
}

/// One D²-sample / best-swap step. The swap is applied only if it strictly
/// lowers the cost.
pub fn ls_step(ds: &Dataset, sol: &mut Solution, anchors: &AnchorSet, rng: &mut Rng) -> StepOutcome {
    let Some(p) = d2_sample(sol, rng) else {
        return StepOutcome {
            accepted: false,
            sampled: None,
            removed: None,
        };
    };
    let pp = ds.point(p);
    let dp: Vec<f64> = ds.points().map(|x| sq_distance(x, pp)).collect();
    let rejected = StepOutcome {
        accepted: false,
        sampled: Some(p),
        removed: None,
    };
    let Some(best) = evaluate_with_distances(ds, sol, p, &dp, anchors) else {
        return rejected;
    };
    if best.cost >= sol.total_cost || best.cost.is_nan() || sol.centers[best.slot] == p {
        return rejected;
    }
    match swapped(ds, sol, best.slot, p, &dp, anchors) {
        Some(next) => {
            *sol = next;
            StepOutcome {
                accepted: true,
                sampled: Some(p),
                removed: Some(best.removed),
            }
        }
        None => rejected,
    }
}

/// The solution with `slot` replaced by point `p`, or `None` when its
/// recomputed cost is not strictly lower.
fn swapped(ds: &Dataset, sol: &Solution, slot: usize, p: usize, dp: &[f64], anchors: &AnchorSet) -> Option<Solution> {
    let s = slot as u32;
    let mut next = sol.clone();
    next.centers[slot] = p;
    next.coverage.remove_zones(&sol.zones[slot]);
    next.zones[slot] = anchors.zones_of_point(ds, p);
    next.coverage.add_zones(&next.zones[slot]);

    for x in 0..dp.len() {
        let (n1, d1, n2, d2, dx) = (sol.nearest[x], sol.d1sq[x], sol.second[x], sol.d2sq[x], dp[x]);
        // Every center other than the nearest two is at least d2 away.
        let update = if n1 != s && n2 != s {
            if dx < d1 {
                Some((s, dx, n1, d1))
            } else if dx < d2 {
                Some((n1, d1, s, dx))
            } else {
                Some((n1, d1, n2, d2))
            }
        } else if n1 == s {
            if dx < d2 || n2 == NONE {
                Some((s, dx, n2, d2))
            } else {
                None
            }
        } else if dx < d1 {
            Some((s, dx, n1, d1))
        } else if dx <= d2 {
            Some((n1, d1, s, dx))
        } else {
            None
        };
        let (a, da, b, db) = update.unwrap_or_else(|| next.scan(ds, x));
        next.nearest[x] = a;
        next.d1sq[x] = da;
        next.second[x] = b;
        next.d2sq[x] = db;
    }
    next.total_cost = compensated_sum(next.d1sq.iter().copied());
    (next.total_cost < sol.total_cost).then_some(next)
}

/// Per-iteration record of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub initial_cost: f64,
    /// Cost after each step.
    pub costs: Vec<f64>,
    pub accepted: Vec<bool>,
}

impl Trace {
    pub fn accepted_swaps(&self) -> usize {
        self.accepted.iter().filter(|&&a| a).count()
    }

    pub fn final_cost(&self) -> f64 {
        self.costs.last().copied().unwrap_or(self.initial_cost)
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct LsOutput {
    pub solution: Solution,
    pub anchors: AnchorSet,
    pub trace: Trace,
}

/// Seeding, random completion to k centers, then the configured number of
/// local-search steps.
pub fn run(ds: &Dataset, delta: &RadiusBounds, cfg: &LsConfig) -> Result<LsOutput> {
    if cfg.k == 0 || cfg.k > ds.len() {
        return Err(Error::InvalidK { k: cfg.k, n: ds.len() });
    }
    let mut anchors = fairness::seed_checked(ds, delta, cfg.gamma, cfg.k)?;
    if ds.len() <= EAGER_MEMBERSHIP_LIMIT {
        anchors.materialize_membership(ds);
    }
    let z = cfg.resolve_iterations(ds);
    let mut best: Option<(Solution, Trace)> = None;
    for r in 0..cfg.restarts.max(1) {
        let seed = cfg.seed.wrapping_add(r as u64);
        let (sol, trace) = search(ds, delta, &anchors, cfg.k, z, seed)?;
        if best.as_ref().is_none_or(|(b, _)| sol.total_cost < b.total_cost) {
            best = Some((sol, trace));
        }
    }
    let (solution, trace) = best.expect("at least one restart");
    let ratio = solution.bound_ratio(delta);
    assert!(
        ratio <= 2.0 * cfg.gamma * (1.0 + 1e-12),
        "radius guarantee violated: bound ratio {ratio} > 2·gamma"
    );
    Ok(LsOutput {
        solution,
        anchors,
        trace,
    })
}

fn search(
    ds: &Dataset,
    delta: &RadiusBounds,
    anchors: &AnchorSet,
    k: usize,
    iterations: usize,
    seed: u64,
) -> Result<(Solution, Trace)> {
    let mut sol = init_solution(ds, anchors, k, seed)?;
    let mut rng = rng::stream(seed, 1);
    let mut trace = Trace {
        initial_cost: sol.total_cost,
        costs: Vec::with_capacity(iterations),
        accepted: Vec::with_capacity(iterations),
    };
    for _ in 0..iterations {
        let step = ls_step(ds, &mut sol, anchors, &mut rng);
        if step.accepted {
            debug_assert!(sol.coverage.all_covered(), "anchor zone left uncovered");
            debug_assert!(sol.bound_ratio(delta) <= 2.0 * anchors.gamma() * (1.0 + 1e-12));
        }
        trace.costs.push(sol.total_cost);
        trace.accepted.push(step.accepted);
    }
    Ok((sol, trace))
}
