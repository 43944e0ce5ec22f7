use serde::{Deserialize, Serialize};

use super::ball_family::BallFamily;
use super::dyadic::DyadicDecomposition;
use super::report::Report;
use crate::error::{Error, Result};
use crate::solvers::{SolverTag, Tour};
use crate::spaces::PointSet;

/// Absolute slack for the length inequalities.
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSum {
    pub class: u32,
    pub radii_sum: f64,
    /// `c_pack * 2^(k (d - 1)) * diam`, for shape comparison only.
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundChainReport {
    pub tour_length: f64,
    pub radii_sum: f64,
    pub closing_edge: f64,
    pub diameter: f64,
    /// `L <= sum r(B) + closing edge + tol`.
    pub holds_with_closing_edge: bool,
    /// `L <= sum r(B) + diam + tol`.
    pub holds_with_diameter: bool,
    /// `|L - (sum r(B) + closing edge)|`; present for nearest-neighbor families,
    /// where the two agree up to summation order.
    pub nn_identity_error: Option<f64>,
    pub class_sums: Vec<ClassSum>,
    pub k0: u32,
    pub sum_through_k0: f64,
    pub tail_sum: f64,
}

impl BoundChainReport {
    pub fn is_clean(&self) -> bool {
        self.holds_with_closing_edge
            && self.holds_with_diameter
            && self
                .nn_identity_error
                .is_none_or(|e| e <= BOUND_TOLERANCE * self.tour_length.max(1.0))
    }

    pub fn to_report(&self, instance_id: &str) -> Report {
        let mut violations = Vec::new();
        if !self.holds_with_closing_edge {
            violations.push("length exceeds radii sum plus closing edge".to_string());
        }
        if !self.holds_with_diameter {
            violations.push("length exceeds radii sum plus diameter".to_string());
        }
        if let Some(e) = self.nn_identity_error {
            if e > BOUND_TOLERANCE * self.tour_length.max(1.0) {
                violations.push(format!("nearest-neighbor identity off by {e}"));
            }
        }
        Report::new("bound-chain", instance_id)
            .violations(&violations)
            .stat("tour_length", self.tour_length)
            .stat("radii_sum", self.radii_sum)
            .stat("closing_edge", self.closing_edge)
            .stat("diameter", self.diameter)
            .stat("k0", self.k0)
            .stat("sum_through_k0", self.sum_through_k0)
            .stat("tail_sum", self.tail_sum)
            .stat(
                "class_sums",
                serde_json::to_value(&self.class_sums).expect("serializes"),
            )
    }
}

/// Bounds the tour length by the radii of its ball family.
///
/// The closing edge is not covered by any ball, so it is added explicitly;
/// it never exceeds the diameter.
pub fn bound_chain(
    family: &BallFamily,
    tour: &Tour,
    decomp: &DyadicDecomposition,
    points: &PointSet,
) -> Result<BoundChainReport> {
    if family.source != tour.solver() {
        return Err(Error::Mismatch(format!(
            "family from {} but tour from {}",
            family.source,
            tour.solver()
        )));
    }
    if family.n_points != tour.n() || tour.n() != points.len() {
        return Err(Error::Mismatch(format!(
            "family covers {} points, tour {}, point set {}",
            family.n_points,
            tour.n(),
            points.len()
        )));
    }
    let radii_sum = family.radii_sum();
    let closing_edge = tour.closing_edge(points);
    let length = tour.length();
    let diameter = decomp.diameter;

    let class_sums: Vec<ClassSum> = decomp
        .classes
        .iter()
        .map(|(&k, balls)| ClassSum {
            class: k,
            radii_sum: balls.iter().map(|b| b.radius).sum(),
            envelope: decomp.c_pack * 2f64.powf(k as f64 * (decomp.d - 1.0)) * diameter,
        })
        .collect();
    let sum_through_k0 = class_sums
        .iter()
        .filter(|c| c.class <= decomp.k0)
        .map(|c| c.radii_sum)
        .sum();
    let tail_sum = class_sums
        .iter()
        .filter(|c| c.class > decomp.k0)
        .map(|c| c.radii_sum)
        .sum();

    Ok(BoundChainReport {
        tour_length: length,
        radii_sum,
        closing_edge,
        diameter,
        holds_with_closing_edge: length <= radii_sum + closing_edge + BOUND_TOLERANCE,
        holds_with_diameter: length <= radii_sum + diameter + BOUND_TOLERANCE,
        nn_identity_error: (family.source == SolverTag::NearestNeighbor)
            .then(|| (length - (radii_sum + closing_edge)).abs()),
        class_sums,
        k0: decomp.k0,
        sum_through_k0,
        tail_sum,
    })
}
