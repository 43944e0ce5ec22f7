//! The isolated-point statistic behind the lower bound on optimal tours.
//!
//! With `r = (1 / (D n))^(1/d)`, a point is isolated when no other sample
//! lies strictly within distance `r` of it. Both tour edges at an isolated
//! point have length at least `r`, and an edge touches at most two isolated
//! points, so every tour is at least `z * r` long.

use serde::{Deserialize, Serialize};

use super::bound_chain::BOUND_TOLERANCE;
use super::report::Report;
use crate::error::{Error, Result};
use crate::solvers::Tour;
use crate::spaces::{PointSet, RegularityWitness};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolationStats {
    pub r: f64,
    pub z: usize,
    pub z_indicators: Vec<bool>,
    pub lower_bound: f64,
    pub n: usize,
    pub d: f64,
    pub d_upper: f64,
}

impl IsolationStats {
    pub fn isolated_fraction(&self) -> f64 {
        self.z as f64 / self.n as f64
    }

    pub fn to_report(&self, instance_id: &str) -> Report {
        Report::new("isolation", instance_id)
            .stat("r", self.r)
            .stat("z", self.z)
            .stat("n", self.n)
            .stat("z_over_n", self.isolated_fraction())
            .stat("lower_bound", self.lower_bound)
            .stat("d", self.d)
            .stat("d_upper", self.d_upper)
    }
}

/// The probe radius `(1 / (D n))^(1/d)`.
pub fn probe_radius(witness: &RegularityWitness, n: usize) -> f64 {
    (1.0 / (witness.d_upper * n as f64)).powf(1.0 / witness.d)
}

/// Counts isolated points at the probe radius.
pub fn isolation_stats(points: &PointSet, witness: &RegularityWitness) -> Result<IsolationStats> {
    let n = points.len();
    if n == 0 {
        return Err(Error::TooFewPoints {
            op: "isolation_stats",
            min: 1,
            found: 0,
        });
    }
    if !(witness.d_upper > 0.0) {
        return Err(Error::InvalidArgument("witness d_upper must be > 0".into()));
    }
    let r = probe_radius(witness, n);
    let mut isolated = vec![true; n];
    for i in 0..n {
        for j in i + 1..n {
            if points.dist(i, j) < r {
                isolated[i] = false;
                isolated[j] = false;
            }
        }
    }
    let z = isolated.iter().filter(|b| **b).count();
    Ok(IsolationStats {
        r,
        z,
        z_indicators: isolated,
        lower_bound: z as f64 * r,
        n,
        d: witness.d,
        d_upper: witness.d_upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub tour_length: f64,
    pub lower_bound: f64,
    pub holds: bool,
    /// `length / n^(1 - 1/d)`.
    pub empirical_constant: f64,
}

impl LowerBoundReport {
    pub fn to_report(&self, instance_id: &str) -> Report {
        let violations: Vec<String> = if self.holds {
            Vec::new()
        } else {
            vec![format!(
                "tour length {} below z*r = {}",
                self.tour_length, self.lower_bound
            )]
        };
        Report::new("lower-bound", instance_id)
            .violations(&violations)
            .stat("tour_length", self.tour_length)
            .stat("lower_bound", self.lower_bound)
            .stat("empirical_constant", self.empirical_constant)
    }
}

/// Checks `tour.length >= z * r` for a tour through the same points.
pub fn verify_lower_bound(
    points: &PointSet,
    stats: &IsolationStats,
    tour: &Tour,
) -> Result<LowerBoundReport> {
    if tour.n() != points.len() || stats.n != points.len() {
        return Err(Error::Mismatch(format!(
            "tour over {} points, statistics over {}, point set of {}",
            tour.n(),
            stats.n,
            points.len()
        )));
    }
    let scale = (points.len() as f64).powf(1.0 - 1.0 / stats.d);
    Ok(LowerBoundReport {
        tour_length: tour.length(),
        lower_bound: stats.lower_bound,
        holds: tour.length() >= stats.lower_bound - BOUND_TOLERANCE,
        empirical_constant: tour.length() / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{exact_tour_dp, nearest_neighbor_tour, NnTieRule};
    use crate::spaces::{sample, SpaceSpec};
    use std::sync::Arc;

    fn square() -> Arc<SpaceSpec> {
        Arc::new(SpaceSpec::unit_cube(2).unwrap())
    }

    #[test]
    fn far_apart_pair_both_isolated() {
        let ps = PointSet::new(square(), &[vec![0.0, 0.0], vec![1.0, 1.0]], None).unwrap();
        let st = isolation_stats(&ps, &RegularityWitness::unit_square_analytic()).unwrap();
        // r = (1 / (2 pi))^(1/2) ~ 0.399 < sqrt(2)
        assert!(st.r < 2f64.sqrt());
        assert_eq!(st.z, 2);
        let (t, _) = nearest_neighbor_tour(&ps, 0, NnTieRule::LowestIndex).unwrap();
        let rep = verify_lower_bound(&ps, &st, &t).unwrap();
        assert!(rep.holds);
        assert!(t.length() >= 2.0 * st.r);
    }

    #[test]
    fn single_point_vacuously_isolated() {
        let ps = PointSet::new(square(), &[vec![0.3, 0.3]], None).unwrap();
        let st = isolation_stats(&ps, &RegularityWitness::unit_square_analytic()).unwrap();
        assert_eq!(st.z, 1);
    }

    #[test]
    fn probe_radius_formula() {
        let w = RegularityWitness::unit_square_analytic();
        let r = probe_radius(&w, 1000);
        assert!((r - (1.0 / (std::f64::consts::PI * 1000.0)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn close_points_not_isolated() {
        let ps = PointSet::new(
            square(),
            &[vec![0.5, 0.5], vec![0.5, 0.50001], vec![0.0, 0.0]],
            None,
        )
        .unwrap();
        let st = isolation_stats(&ps, &RegularityWitness::unit_square_analytic()).unwrap();
        assert_eq!(st.z_indicators, vec![false, false, true]);
    }

    #[test]
    fn exact_tours_respect_bound() {
        let s = square();
        let w = RegularityWitness::unit_square_analytic();
        for seed in 0..40 {
            let ps = sample(&s, 3 + (seed as usize % 10), seed).unwrap();
            let st = isolation_stats(&ps, &w).unwrap();
            let t = exact_tour_dp(&ps).unwrap();
            assert!(verify_lower_bound(&ps, &st, &t).unwrap().holds);
        }
    }
}
