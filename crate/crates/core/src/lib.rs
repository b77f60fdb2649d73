//! Approximate convex hulls of large point sets by random-direction
//! curvature sketching.
//!
//! A point that maximizes `x · d` for a uniformly random unit direction `d`
//! is a hull vertex, and the fraction of directions it wins estimates its
//! curvature (the relative solid angle of its normal cone). Keeping the
//! high-curvature winners gives an inner approximation of the hull; the
//! supporting halfspaces of all directions give an outer one.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod commands;
pub mod compression;
pub mod datagen;
pub mod directions;
pub mod error;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod sketch;

pub use directions::DirectionSet;
pub use error::{Error, Result};
pub use geometry::{Halfspace, PointCloud, VertexPolytope};
pub use sketch::{build_sketch, outer_hull, threshold_filter, CurvatureSketch, ThresholdMode};
