//! Point sets, preprocessing and per-point fairness radii.
//!
//! A [`Dataset`] stores its points row-major in a single buffer. All distances
//! are Euclidean and go through [`distance`] / [`sq_distance`].

use std::path::Path;

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Squared Euclidean distance.
#[inline]
pub fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum()
}

/// Euclidean distance. This is the only metric the crate uses.
#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    sq_distance(a, b).sqrt()
}

/// An immutable set of `n` points in `d` dimensions with ids `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    coords: Vec<f64>,
    n: usize,
    d: usize,
    origin: Option<Vec<usize>>,
}

impl Dataset {
    /// Builds a dataset from a row-major coordinate buffer.
    pub fn from_flat(coords: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::Empty);
        }
        if !coords.len().is_multiple_of(d) {
            return Err(Error::InvalidArgument(format!(
                "buffer of length {} is not a multiple of dimension {d}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                index: pos / d,
                dim: pos % d,
            });
        }
        let n = coords.len() / d;
        Ok(Self {
            coords,
            n,
            d,
            origin: None,
        })
    }

    /// Builds a dataset from a list of points, all of the same dimension.
    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let d = points.first().ok_or(Error::Empty)?.as_ref().len();
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
        Self::from_flat(coords, d)
    }

    /// One-dimensional convenience constructor.
    pub fn from_1d(values: &[f64]) -> Result<Self> {
        Self::from_flat(values.to_vec(), 1)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, id: usize) -> &[f64] {
        &self.coords[id * self.d..(id + 1) * self.d]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        distance(self.point(a), self.point(b))
    }

    /// For a subsampled dataset, the id each point had in its parent.
    pub fn original_id(&self, id: usize) -> usize {
        self.origin.as_ref().map_or(id, |o| o[id])
    }

    pub fn origin_ids(&self) -> Option<&[usize]> {
        self.origin.as_deref()
    }

    /// Restricts the dataset to `ids` (in the given order), re-indexing them
    /// `0..ids.len()` and remembering where each came from.
    pub fn select(&self, ids: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(ids.len() * self.d);
        for &i in ids {
            coords.extend_from_slice(self.point(i));
        }
        let mut out = Self::from_flat(coords, self.d)?;
        out.origin = Some(ids.iter().map(|&i| self.original_id(i)).collect());
        Ok(out)
    }
}

/// Which columns of a CSV file to read.
#[derive(Debug, Clone, Default)]
pub struct CsvSchema {
    /// Zero-based column indices; `None` selects every column.
    pub columns: Option<Vec<usize>>,
    pub has_header: bool,
}

/// Loads selected numeric columns from a comma-separated file. Row order
/// becomes point ids. Blank lines are skipped and fields are trimmed.
pub fn load_points(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_points(file, schema)
}

/// Like [`load_points`] but from any reader.
pub fn read_points<R: std::io::Read>(reader: R, schema: &CsvSchema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(schema.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut coords = Vec::new();
    let mut d: Option<usize> = None;
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(Error::Csv(e.to_string())),
        }
        let row = record.position().map_or(0, |p| p.line());
        let columns: Vec<usize> = match &schema.columns {
            Some(c) => c.clone(),
            None => (0..record.len()).collect(),
        };
        let width = *d.get_or_insert(columns.len());
        if columns.len() != width {
            return Err(Error::RaggedRow {
                row,
                expected: width,
                found: columns.len(),
            });
        }
        for &c in &columns {
            let field = record.get(c).ok_or(Error::RaggedRow {
                row,
                expected: c + 1,
                found: record.len(),
            })?;
            let value: f64 = field
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    column: c,
                    value: field.to_string(),
                })?;
            coords.push(value);
        }
    }
    match d {
        Some(0) => Err(Error::InvalidArgument("no columns selected".into())),
        Some(d) => Dataset::from_flat(coords, d),
        None => Err(Error::Empty),
    }
}

/// Shifts and scales every dimension to zero mean and unit (population)
/// standard deviation.
pub fn normalize(ds: &Dataset) -> Result<Dataset> {
    let (n, d) = (ds.len(), ds.dim());
    if n < 2 {
        return Err(Error::InvalidArgument(
            "normalization needs at least 2 points".into(),
        ));
    }
    let mut mean = vec![0.0; d];
    for p in ds.points() {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = vec![0.0; d];
    for p in ds.points() {
        for ((v, x), m) in var.iter_mut().zip(p).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    let std: Vec<f64> = var.iter().map(|v| (v / n as f64).sqrt()).collect();
    if let Some(dim) = std.iter().position(|&s| s == 0.0) {
        return Err(Error::ConstantDimension { dim });
    }
    let coords = ds
        .points()
        .flat_map(|p| {
            p.iter()
                .zip(&mean)
                .zip(&std)
                .map(|((x, m), s)| (x - m) / s)
        })
        .collect();
    let mut out = Dataset::from_flat(coords, d)?;
    out.origin = ds.origin.clone();
    Ok(out)
}

/// Uniform sample of `m` points without replacement. Sampled points keep their
/// relative order.
pub fn subsample(ds: &Dataset, m: usize, seed: u64) -> Result<Dataset> {
    if m == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    if m > ds.len() {
        return Err(Error::SampleTooLarge {
            requested: m,
            available: ds.len(),
        });
    }
    let mut rng = rng::from_seed(seed);
    let mut ids = index::sample(&mut rng, ds.len(), m).into_vec();
    ids.sort_unstable();
    ds.select(&ids)
}

/// How radii were (or should be) computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMode {
    /// Rank statistic over all `n` points.
    Exact,
    /// Rank statistic over one shared uniform sample.
    Sampled { sample_size: usize, seed: u64 },
}

/// Per-point fairness radii δ(p).
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusBounds {
    delta: Vec<f64>,
    mode: RadiusMode,
}

impl RadiusBounds {
    /// Wraps user-supplied radii. They must be finite and nonnegative.
    pub fn from_values(delta: Vec<f64>) -> Result<Self> {
        if let Some(i) = delta.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "radius of point {i} is {} (must be finite and >= 0)",
                delta[i]
            )));
        }
        Ok(Self {
            delta,
            mode: RadiusMode::Exact,
        })
    }

    /// Same radius for every point.
    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::from_values(vec![value; n])
    }

    #[inline]
    pub fn get(&self, id: usize) -> f64 {
        self.delta[id]
    }

    pub fn values(&self) -> &[f64] {
        &self.delta
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    pub fn mode(&self) -> RadiusMode {
        self.mode
    }

    /// Multiplies every radius by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = Self::from_values(self.delta.iter().map(|v| v * factor).collect())?;
        out.mode = self.mode;
        Ok(out)
    }

    pub(crate) fn check_matches(&self, ds: &Dataset) -> Result<()> {
        if self.len() != ds.len() {
            return Err(Error::InvalidArgument(format!(
                "{} radii supplied for {} points",
                self.len(),
                ds.len()
            )));
        }
        Ok(())
    }
}

fn rank_statistic(dists: &mut [f64], rank: usize) -> f64 {
    let (_, v, _) = dists.select_nth_unstable_by(rank - 1, f64::total_cmp);
    *v
}

/// δ(p) = distance from p to its ⌈n/k⌉-th nearest point, p itself counting
/// as the first. In sampled mode the rank is ⌈m/k⌉ over a single uniform
/// sample of `m = min(sample_size, n)` points shared by every p.
pub fn compute_radii(ds: &Dataset, k: usize, mode: RadiusMode) -> Result<RadiusBounds> {
    let n = ds.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let reference: Vec<usize> = match mode {
        RadiusMode::Exact => (0..n).collect(),
        RadiusMode::Sampled { sample_size, seed } => {
            if sample_size == 0 {
                return Err(Error::InvalidArgument(
                    "radius sample size must be at least 1".into(),
                ));
            }
            let m = sample_size.min(n);
            let mut rng = rng::from_seed(seed);
            let mut ids = index::sample(&mut rng, n, m).into_vec();
            ids.sort_unstable();
            ids
        }
    };
    let rank = reference.len().div_ceil(k);
    let delta = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(reference.len()),
            |buf, p| {
                buf.clear();
                buf.extend(reference.iter().map(|&q| ds.dist(p, q)));
                rank_statistic(buf, rank)
            },
        )
        .collect();
    Ok(RadiusBounds { delta, mode })
}

/// Ratio of the largest to the smallest positive pairwise distance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AspectRatio(pub f64);

pub fn aspect_ratio(ds: &Dataset) -> Result<AspectRatio> {
    let mut max = 0.0_f64;
    let mut min = f64::INFINITY;
    for i in 0..ds.len() {
        for j in i + 1..ds.len() {
            let dij = ds.dist(i, j);
            if dij > 0.0 {
                max = max.max(dij);
                min = min.min(dij);
            }
        }
    }
    if min.is_infinite() {
        return Err(Error::NoDistinctPoints);
    }
    Ok(AspectRatio(max / min))
}

/// Random linear projection to `target_dim` dimensions with i.i.d. Gaussian
/// entries scaled by `1/sqrt(target_dim)`.
pub fn jl_project(ds: &Dataset, target_dim: usize, seed: u64) -> Result<Dataset> {
    if target_dim == 0 {
        return Err(Error::InvalidArgument("target dimension must be at least 1".into()));
    }
    let d = ds.dim();
    let scale = 1.0 / (target_dim as f64).sqrt();
    let mut rng = rng::from_seed(seed);
    // row-major d x target_dim
    let matrix: Vec<f64> = (0..d * target_dim)
        .map(|_| {
            let g: f64 = StandardNormal.sample(&mut rng);
            g * scale
        })
        .collect();
    let mut coords = vec![0.0; ds.len() * target_dim];
    for (p, out) in ds.points().zip(coords.chunks_exact_mut(target_dim)) {
        for (x, row) in p.iter().zip(matrix.chunks_exact(target_dim)) {
            for (o, m) in out.iter_mut().zip(row) {
                *o += x * m;
            }
        }
    }
    let mut out = Dataset::from_flat(coords, target_dim)?;
    out.origin = ds.origin.clone();
    Ok(out)
}
