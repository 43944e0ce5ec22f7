//! Executable versions of the length bounds: ball families from heuristic
//! traces, the ordering property of those balls, dyadic packing, the radii
//! bound on tour length, and the isolated-point lower bound.

mod ball_family;
mod bound_chain;
mod dyadic;
mod isolation;
mod regression;
mod report;
mod star;

pub use ball_family::{extract_ball_family, Ball, BallFamily};
pub use bound_chain::{bound_chain, BoundChainReport, ClassSum, BOUND_TOLERANCE};
pub use dyadic::{
    check_packing, dyadic_class, dyadic_partition, packing_constant, ClassCount,
    DyadicDecomposition, Overlap, PackingReport,
};
pub use isolation::{
    isolation_stats, probe_radius, verify_lower_bound, IsolationStats, LowerBoundReport,
};
pub use regression::{fit_exponent, ExponentFit};
pub use report::{CheckKind, Report};
pub use star::{check_star_property, StarReport, StarViolation};
