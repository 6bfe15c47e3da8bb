//! Lloyd-style refinement that never leaves an anchor zone empty.
//!
//! Each round assigns points to their nearest center, computes cluster means,
//! and moves every center along the segment toward its mean as far as its
//! zone constraints allow. Centers are processed in index order against the
//! current positions of the others, so a zone is only constrained on the one
//! center that alone covers it at that moment.

use serde::{Deserialize, Serialize};

use crate::centers::CenterPositions;
use crate::dataset::{distance, Dataset};
use crate::error::Result;
use crate::fairness::{build_coverage_positions, AnchorSet};
use crate::lspp::Solution;
use crate::metrics::{cost, Objective};

/// Which zones restrict a center's move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneConstraint {
    /// Zones that this center alone covers.
    #[default]
    SoleCoverer,
    /// Every zone this center covers.
    AllCovered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlConfig {
    pub iterations: usize,
    pub bisection_steps: usize,
    /// Stop once a round improves the cost by less than this fraction.
    pub min_improvement: f64,
    pub constraint: ZoneConstraint,
}

impl Default for FlConfig {
    fn default() -> Self {
        Self {
            iterations: 20,
            bisection_steps: 40,
            min_improvement: 0.0,
            constraint: ZoneConstraint::SoleCoverer,
        }
    }
}

/// Nearest center index per point (ties: lowest index).
pub fn assign(ds: &Dataset, centers: &CenterPositions) -> Vec<usize> {
    ds.points().map(|x| centers.nearest(x).0).collect()
}

/// A closed ball the moved center must stay inside.
#[derive(Debug, Clone, Copy)]
pub struct BallConstraint<'a> {
    pub center: &'a [f64],
    pub radius: f64,
}

impl BallConstraint<'_> {
    #[inline]
    fn holds(&self, x: &[f64]) -> bool {
        distance(self.center, x) <= self.radius
    }
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| (1.0 - t) * a + t * b).collect()
}

/// Moves `center` toward `mean` as far as the constraints allow, searching
/// the step fraction by bisection. Returns `mean` itself when it is feasible.
pub fn fair_move_center(
    center: &[f64],
    mean: &[f64],
    constraints: &[BallConstraint<'_>],
    bisection_steps: usize,
) -> Vec<f64> {
    let feasible = |x: &[f64]| constraints.iter().all(|c| c.holds(x));
    if feasible(mean) {
        return mean.to_vec();
    }
    debug_assert!(feasible(center), "starting center violates its constraints");
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..bisection_steps.max(1) {
        let mid = 0.5 * (lo + hi);
        if feasible(&lerp(center, mean, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        center.to_vec()
    } else {
        lerp(center, mean, lo)
    }
}

/// Output of [`flloyd_run`].
#[derive(Debug, Clone)]
pub struct Refined {
    pub centers: CenterPositions,
    /// k-means cost before the first round, then after each completed round.
    pub costs: Vec<f64>,
}

impl Refined {
    pub fn cost(&self) -> f64 {
        *self.costs.last().expect("costs holds the starting cost")
    }
}

/// Runs the zone-preserving Lloyd refinement from a local-search solution.
pub fn flloyd_run(ds: &Dataset, sol: &Solution, anchors: &AnchorSet, cfg: &FlConfig) -> Result<Refined> {
    let start = sol.positions(ds);
    refine_positions(ds, start, anchors, cfg)
}

/// Same as [`flloyd_run`] starting from arbitrary positions that cover every zone.
pub fn refine_positions(
    ds: &Dataset,
    mut centers: CenterPositions,
    anchors: &AnchorSet,
    cfg: &FlConfig,
) -> Result<Refined> {
    let k = centers.len();
    let d = ds.dim();
    let mut current = cost(ds, &centers, Objective::KMeans)?;
    let mut costs = vec![current];
    debug_assert!(build_coverage_positions(anchors, &centers, ds).all_covered());

    // per center, the zones it currently lies in
    let mut zones_of: Vec<Vec<u32>> = centers
        .iter()
        .map(|c| anchors.zones_of_position(ds, c))
        .collect();

    for _ in 0..cfg.iterations {
        let labels = assign(ds, &centers);
        let mut sums = vec![0.0; k * d];
        let mut sizes = vec![0usize; k];
        for (x, &l) in ds.points().zip(&labels) {
            sizes[l] += 1;
            for (s, v) in sums[l * d..(l + 1) * d].iter_mut().zip(x) {
                *s += v;
            }
        }

        let mut next = centers.clone();
        let mut next_zones = zones_of.clone();
        for i in 0..k {
            if sizes[i] == 0 {
                continue;
            }
            let mean: Vec<f64> = sums[i * d..(i + 1) * d]
                .iter()
                .map(|s| s / sizes[i] as f64)
                .collect();
            let binding: Vec<u32> = next_zones[i]
                .iter()
                .copied()
                .filter(|&z| match cfg.constraint {
                    ZoneConstraint::AllCovered => true,
                    ZoneConstraint::SoleCoverer => (0..k)
                        .filter(|&j| j != i)
                        .all(|j| next_zones[j].binary_search(&z).is_err()),
                })
                .collect();
            let constraints: Vec<BallConstraint<'_>> = binding
                .iter()
                .map(|&z| BallConstraint {
                    center: ds.point(anchors.anchors()[z as usize]),
                    radius: anchors.zone_radius(z as usize),
                })
                .collect();
            let moved = fair_move_center(next.center(i), &mean, &constraints, cfg.bisection_steps);
            next.center_mut(i).copy_from_slice(&moved);
            next_zones[i] = anchors.zones_of_position(ds, &moved);
        }

        let next_cost = cost(ds, &next, Objective::KMeans)?;
        // A round can only fail to improve through rounding; keep the old centers.
        if next_cost > current {
            break;
        }
        let improvement = current - next_cost;
        centers = next;
        zones_of = next_zones;
        current = next_cost;
        costs.push(current);
        debug_assert!(build_coverage_positions(anchors, &centers, ds).all_covered());
        if improvement <= cfg.min_improvement * costs[costs.len() - 2] && cfg.min_improvement > 0.0 {
            break;
        }
    }
    Ok(Refined { centers, costs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignment_rules() {
        let ds = Dataset::from_1d(&[4.0, 5.0, -3.0]).unwrap();
        let c = CenterPositions::from_points(&[[0.0], [10.0]]).unwrap();
        assert_eq!(assign(&ds, &c), vec![0, 0, 0]);
        let one = CenterPositions::from_points(&[[100.0]]).unwrap();
        assert_eq!(assign(&ds, &one), vec![0, 0, 0]);
        let six = Dataset::from_1d(&[6.0]).unwrap();
        assert_eq!(assign(&six, &c), vec![1]);
    }

    #[test]
    fn unconstrained_move_reaches_mean() {
        assert_eq!(fair_move_center(&[0.0, 0.0], &[2.0, 3.0], &[], 40), vec![2.0, 3.0]);
    }

    #[test]
    fn mean_inside_ball_is_exact() {
        let anchor = [0.0];
        let c = [BallConstraint {
            center: &anchor,
            radius: 5.0,
        }];
        assert_eq!(fair_move_center(&[1.0], &[4.0], &c, 40), vec![4.0]);
    }

    #[test]
    fn clamped_move_stops_on_ball_boundary() {
        let anchor = [0.0];
        let c = [BallConstraint {
            center: &anchor,
            radius: 3.0,
        }];
        let moved = fair_move_center(&[0.0], &[10.0], &c, 40);
        assert!((moved[0] - 3.0).abs() <= 10.0 * 2f64.powi(-40));
        assert!(moved[0] <= 3.0);
    }
}
