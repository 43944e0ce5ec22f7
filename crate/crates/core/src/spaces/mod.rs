//! Bounded metric spaces with Ahlfors-regular probability measures:
//! unit cubes, flat tori and equal-ratio IFS attractors.

mod points;
mod regularity;
mod spec;

pub use points::{csv_column_count, format_f64, sample, PointSet};
pub use regularity::{
    box_counting_dimension, default_radii, empirical_ball_measure, estimate_regularity,
    estimate_regularity_at, RadiusProbe, RegularityEstimate, RegularityWitness,
};
pub use spec::{
    make_space, similarity_dimension, IfsParams, Metric, ParamKind, Ratios, Similitude,
    SpaceKind, SpaceParams, SpaceSpec, DEFAULT_ADDRESS_DEPTH,
};

use crate::error::Result;

/// Distance between two ambient points under `spec`'s metric.
pub fn distance(spec: &SpaceSpec, a: &[f64], b: &[f64]) -> Result<f64> {
    spec.distance(a, b)
}
