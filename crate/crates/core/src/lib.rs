//! Simulation and verification toolkit for almost sure central limit theorems
//! of stabilizing Poisson functionals.
//!
//! The crate is organised bottom-up:
//!
//! * [`domain`] regions, coupled Poisson sampling and the scaling `η_n = n^{-1/d} η`;
//! * [`spatial`] grid index, k-nearest-neighbour and range queries, exact 2-D Voronoi cells;
//! * [`functionals`] score models (count, kNN edge length, clique count, Voronoi volume);
//! * [`malliavin`] add-one costs, second differences and stabilization diagnostics;
//! * [`bounds`] Monte-Carlo estimators of the bound functionals and the CF-gap check;
//! * [`asclt`] coupled trajectories, calibration, logarithmic averaging and normality metrics.
//!
//! Replication loops run on rayon when the `parallel` feature is enabled (the default) and
//! fall back to plain iterators otherwise. Every replication draws from its own
//! [`rng::RngStream`], so results do not depend on the thread count.

pub mod asclt;
pub mod bounds;
pub mod domain;
pub mod error;
pub mod exec;
pub mod functionals;
pub mod malliavin;
pub mod persist;
pub mod rng;
pub mod spatial;
pub mod stats;

pub use error::{Error, Result};
