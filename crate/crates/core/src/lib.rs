//! Scalable individually fair k-means.
//!
//! Every point p gets a radius δ(p), the distance to its ⌈n/k⌉-th nearest
//! point. A clustering is fair when each point has a center within δ(p).
//! This crate finds low-cost k-means solutions that serve every point within
//! 2γ·δ(p) (6·δ(p) for the default γ = 3):
//!
//! 1. [`fairness::seed`] greedily picks *anchors* so every point lies within
//!    γ·δ(p) of one; each anchor's ball of radius γ·δ is its *zone*.
//! 2. [`lspp::run`] completes the anchors to k centers and runs D²-sampled
//!    single-swap local search, rejecting swaps that would empty a zone.
//! 3. [`flloyd::flloyd_run`] optionally refines the centers Lloyd-style,
//!    clamping each move so zones stay covered.
//!
//! ```
//! use fairkm::dataset::{compute_radii, Dataset, RadiusMode};
//! use fairkm::lspp::{run, LsConfig};
//!
//! let ds = Dataset::from_1d(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]).unwrap();
//! let delta = compute_radii(&ds, 2, RadiusMode::Exact).unwrap();
//! let out = run(&ds, &delta, &LsConfig::new(2).with_iterations(50)).unwrap();
//! assert_eq!(out.solution.total_cost(), 4.0);
//! assert!(out.solution.bound_ratio(&delta) <= 6.0);
//! ```

pub mod baselines;
pub mod centers;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod fairness;
pub mod flloyd;
pub mod lspp;
pub mod metrics;
pub mod rng;

pub use centers::CenterPositions;
pub use dataset::{Dataset, RadiusBounds, RadiusMode};
pub use error::{Error, Result};
pub use fairness::AnchorSet;
pub use lspp::{LsConfig, Solution};
