//! Clustering cost and fairness measurements.

use crate::centers::CenterPositions;
use crate::dataset::{Dataset, RadiusBounds};
use crate::error::{Error, Result};

/// Neumaier-compensated running sum. Summation order is the insertion order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

/// Sums in a fixed order with compensation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Exponent of the clustering objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Σ dist(p, S)
    KMedian,
    /// Σ dist(p, S)²
    KMeans,
}

/// Σ over points of dist(point, centers)^p.
pub fn cost(ds: &Dataset, centers: &CenterPositions, objective: Objective) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    Ok(compensated_sum(ds.points().map(|x| {
        let (_, d2) = centers.nearest(x);
        match objective {
            Objective::KMeans => d2,
            Objective::KMedian => d2.sqrt(),
        }
    })))
}

/// dist/δ, with 0/0 = 0 and x/0 = +∞ for x > 0.
#[inline]
pub fn radius_ratio(dist: f64, delta: f64) -> f64 {
    if dist == 0.0 {
        0.0
    } else if delta == 0.0 {
        f64::INFINITY
    } else {
        dist / delta
    }
}

/// Largest dist(p, S)/δ(p) and the point attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRatio {
    pub ratio: f64,
    pub witness: usize,
}

/// Max over points of dist(p, centers)/δ(p). Ties resolve to the lowest id.
pub fn bound_ratio(
    ds: &Dataset,
    delta: &RadiusBounds,
    centers: &CenterPositions,
) -> Result<BoundRatio> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    delta.check_matches(ds)?;
    let mut best = BoundRatio {
        ratio: f64::NEG_INFINITY,
        witness: 0,
    };
    for (i, x) in ds.points().enumerate() {
        let (_, d2) = centers.nearest(x);
        let r = radius_ratio(d2.sqrt(), delta.get(i));
        if r > best.ratio {
            best = BoundRatio { ratio: r, witness: i };
        }
    }
    Ok(best)
}
