//! Greedy anchor seeding and the coverage predicates built on it.
//!
//! Seeding repeatedly picks, among points p with dist(p, S) > γ·δ(p), the
//! one with the smallest δ. The picked points are *anchors*; the closed ball
//! of radius γ·δ(a) around anchor a is its *zone*. Any center set that keeps
//! at least one center in every zone serves each point within 2γ·δ(p).

use crate::centers::CenterPositions;
use crate::dataset::{distance, Dataset, RadiusBounds};
use crate::error::{Error, Result};
use crate::metrics::radius_ratio;

/// Default zone scale.
pub const DEFAULT_GAMMA: f64 = 3.0;

/// Zone membership lists are built eagerly up to this many points; above it
/// zone tests fall back to distance checks.
pub const EAGER_MEMBERSHIP_LIMIT: usize = 100_000;

/// Seeding output: anchors in pick order and their zones.
#[derive(Debug, Clone)]
pub struct AnchorSet {
    anchors: Vec<usize>,
    zone_radius: Vec<f64>,
    gamma: f64,
    /// Per point, the anchor (index into `anchors`) whose pick first brought
    /// it within γ·δ(p).
    covered_by: Vec<u32>,
    /// Per zone, sorted ids of the points inside it.
    membership: Option<Vec<Vec<u32>>>,
}

impl AnchorSet {
    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn zone_radius(&self, zone: usize) -> f64 {
        self.zone_radius[zone]
    }

    pub fn zone_radii(&self) -> &[f64] {
        &self.zone_radius
    }

    /// The anchor whose selection first covered point `p`.
    pub fn covering_anchor(&self, p: usize) -> usize {
        self.anchors[self.covered_by[p] as usize]
    }

    pub fn fits(&self, k: usize) -> bool {
        self.anchors.len() <= k
    }

    /// Errors with the number of anchors needed when more than `k` were picked.
    pub fn check_feasible(&self, k: usize) -> Result<()> {
        if self.fits(k) {
            Ok(())
        } else {
            Err(Error::Infeasible {
                anchors: self.anchors.len(),
                k,
            })
        }
    }

    /// Precomputes per-zone membership for fast point-in-zone tests.
    pub fn materialize_membership(&mut self, ds: &Dataset) {
        let members = (0..self.anchors.len())
            .map(|z| {
                (0..ds.len())
                    .filter(|&p| self.distance_in_zone(ds, z, ds.point(p)))
                    .map(|p| p as u32)
                    .collect()
            })
            .collect();
        self.membership = Some(members);
    }

    pub fn has_membership(&self) -> bool {
        self.membership.is_some()
    }

    /// Point ids inside zone `zone`, if membership has been materialized.
    pub fn members(&self, zone: usize) -> Option<&[u32]> {
        self.membership.as_ref().map(|m| m[zone].as_slice())
    }

    #[inline]
    fn distance_in_zone(&self, ds: &Dataset, zone: usize, x: &[f64]) -> bool {
        distance(ds.point(self.anchors[zone]), x) <= self.zone_radius[zone]
    }

    /// Whether dataset point `p` lies in zone `zone`.
    #[inline]
    pub fn point_in_zone(&self, ds: &Dataset, zone: usize, p: usize) -> bool {
        match &self.membership {
            Some(m) => m[zone].binary_search(&(p as u32)).is_ok(),
            None => self.distance_in_zone(ds, zone, ds.point(p)),
        }
    }

    /// Whether an arbitrary position lies in zone `zone`.
    #[inline]
    pub fn position_in_zone(&self, ds: &Dataset, zone: usize, x: &[f64]) -> bool {
        self.distance_in_zone(ds, zone, x)
    }

    /// Zones containing dataset point `p`, ascending.
    pub fn zones_of_point(&self, ds: &Dataset, p: usize) -> Vec<u32> {
        (0..self.anchors.len())
            .filter(|&z| self.point_in_zone(ds, z, p))
            .map(|z| z as u32)
            .collect()
    }

    /// Zones containing position `x`, ascending.
    pub fn zones_of_position(&self, ds: &Dataset, x: &[f64]) -> Vec<u32> {
        (0..self.anchors.len())
            .filter(|&z| self.position_in_zone(ds, z, x))
            .map(|z| z as u32)
            .collect()
    }
}

/// Greedy seeding. Returns every anchor it needs even past `k`; see
/// [`seed_checked`] for the variant that rejects infeasible instances.
pub fn seed(ds: &Dataset, delta: &RadiusBounds, gamma: f64) -> Result<AnchorSet> {
    delta.check_matches(ds)?;
    if !(gamma > 2.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "gamma must be a finite value > 2, got {gamma}"
        )));
    }
    let n = ds.len();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps lowest id first among equal radii
    order.sort_by(|&a, &b| delta.get(a).total_cmp(&delta.get(b)));

    let mut dist_to_s = vec![f64::INFINITY; n];
    let mut covered_by = vec![u32::MAX; n];
    let mut anchors = Vec::new();
    let uncovered = |p: usize, d: &[f64]| d[p] > gamma * delta.get(p);

    let mut cursor = 0;
    while let Some(offset) = order[cursor..]
        .iter()
        .position(|&p| uncovered(p, &dist_to_s))
    {
        cursor += offset;
        let pick = order[cursor];
        let zone = anchors.len() as u32;
        anchors.push(pick);
        let a = ds.point(pick);
        for (q, dq) in dist_to_s.iter_mut().enumerate() {
            let was_uncovered = *dq > gamma * delta.get(q);
            let dist = distance(ds.point(q), a);
            if dist < *dq {
                *dq = dist;
            }
            if was_uncovered && *dq <= gamma * delta.get(q) {
                covered_by[q] = zone;
            }
        }
        debug_assert!(!uncovered(pick, &dist_to_s));
    }

    let zone_radius = anchors.iter().map(|&a| gamma * delta.get(a)).collect();
    Ok(AnchorSet {
        anchors,
        zone_radius,
        gamma,
        covered_by,
        membership: None,
    })
}

/// Seeds and rejects the instance when more than `k` anchors are needed.
pub fn seed_checked(ds: &Dataset, delta: &RadiusBounds, gamma: f64, k: usize) -> Result<AnchorSet> {
    let anchors = seed(ds, delta, gamma)?;
    anchors.check_feasible(k)?;
    Ok(anchors)
}

/// Result of a radius-feasibility check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Point with the largest dist(p, S)/δ(p) (lowest id on ties).
    pub worst_point: usize,
    pub worst_ratio: f64,
}

/// Checks dist(p, centers) ≤ β·δ(p) for every point.
pub fn is_radius_feasible(
    ds: &Dataset,
    delta: &RadiusBounds,
    centers: &[usize],
    beta: f64,
) -> Result<Feasibility> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    delta.check_matches(ds)?;
    let mut worst = (0, f64::NEG_INFINITY);
    for p in 0..ds.len() {
        let dist = centers
            .iter()
            .map(|&c| ds.dist(p, c))
            .fold(f64::INFINITY, f64::min);
        let r = radius_ratio(dist, delta.get(p));
        if r > worst.1 {
            worst = (p, r);
        }
    }
    Ok(Feasibility {
        feasible: worst.1 <= beta,
        worst_point: worst.0,
        worst_ratio: worst.1,
    })
}

/// Number of centers inside each anchor zone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageTable {
    counts: Vec<u32>,
}

impl CoverageTable {
    pub fn new(zones: usize) -> Self {
        Self {
            counts: vec![0; zones],
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    #[inline]
    pub fn count(&self, zone: usize) -> u32 {
        self.counts[zone]
    }

    /// True when every zone holds at least one center.
    pub fn all_covered(&self) -> bool {
        self.counts.iter().all(|&c| c >= 1)
    }

    pub fn first_uncovered(&self) -> Option<usize> {
        self.counts.iter().position(|&c| c == 0)
    }

    pub(crate) fn add_zones(&mut self, zones: &[u32]) {
        for &z in zones {
            self.counts[z as usize] += 1;
        }
    }

    pub(crate) fn remove_zones(&mut self, zones: &[u32]) {
        for &z in zones {
            debug_assert!(self.counts[z as usize] > 0);
            self.counts[z as usize] -= 1;
        }
    }
}

/// Coverage counts for centers given as dataset point ids.
pub fn build_coverage(anchor_set: &AnchorSet, centers: &[usize], ds: &Dataset) -> CoverageTable {
    let mut table = CoverageTable::new(anchor_set.len());
    for &c in centers {
        table.add_zones(&anchor_set.zones_of_point(ds, c));
    }
    table
}

/// Coverage counts for arbitrary center positions.
pub fn build_coverage_positions(
    anchor_set: &AnchorSet,
    centers: &CenterPositions,
    ds: &Dataset,
) -> CoverageTable {
    let mut table = CoverageTable::new(anchor_set.len());
    for c in centers.iter() {
        table.add_zones(&anchor_set.zones_of_position(ds, c));
    }
    table
}
