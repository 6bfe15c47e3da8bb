use crate::dataset::{sq_distance, Dataset};
use crate::error::{Error, Result};

/// Center coordinates, independent of any dataset. Local search produces
/// centers that are dataset points; refinement moves them off the data.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterPositions {
    coords: Vec<f64>,
    d: usize,
}

impl CenterPositions {
    pub fn from_ids(ds: &Dataset, ids: &[usize]) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::EmptyCenters);
        }
        let mut coords = Vec::with_capacity(ids.len() * ds.dim());
        for &id in ids {
            if id >= ds.len() {
                return Err(Error::InvalidArgument(format!(
                    "center id {id} out of range for {} points",
                    ds.len()
                )));
            }
            coords.extend_from_slice(ds.point(id));
        }
        Ok(Self { coords, d: ds.dim() })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let d = points.first().ok_or(Error::EmptyCenters)?.as_ref().len();
        let mut coords = Vec::with_capacity(points.len() * d);
        for (index, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: d,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { coords, d })
    }

    pub fn from_flat(coords: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 || coords.is_empty() {
            return Err(Error::EmptyCenters);
        }
        if !coords.len().is_multiple_of(d) {
            return Err(Error::InvalidArgument(
                "center buffer length is not a multiple of the dimension".into(),
            ));
        }
        Ok(Self { coords, d })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn center(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn center_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// Index and squared distance of the closest center (ties: lowest index).
    pub fn nearest(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.iter().enumerate() {
            let d2 = sq_distance(x, c);
            if d2 < best.1 {
                best = (i, d2);
            }
        }
        best
    }
}
