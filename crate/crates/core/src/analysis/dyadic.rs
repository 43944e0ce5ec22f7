//! Dyadic radius classes of a ball family and the packing checks on them.
//!
//! Radii are normalized by the space diameter, and class `j >= 1` holds the
//! balls with `radius / diam` in `(2^-j, 2^(1-j)]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ball_family::{Ball, BallFamily};
use super::report::Report;
use crate::error::{Error, Result};
use crate::spaces::{PointSet, RegularityWitness};

/// Normalized radii may exceed 1 by this much from rounding before it is an error.
const DIAMETER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicDecomposition {
    pub classes: BTreeMap<u32, Vec<Ball>>,
    /// Smallest `k >= 1` with `c_pack * 2^(k d) >= n`.
    pub k0: u32,
    pub c_pack: f64,
    pub d: f64,
    pub diameter: f64,
    pub n_points: usize,
}

impl DyadicDecomposition {
    pub fn ball_count(&self) -> usize {
        self.classes.values().map(Vec::len).sum()
    }
}

/// Class index `j` with `ratio` in `(2^-j, 2^(1-j)]`; `ratio` must be in `(0, 1]`.
pub fn dyadic_class(ratio: f64) -> u32 {
    debug_assert!(ratio > 0.0 && ratio <= 1.0);
    let mut j = (-ratio.log2()).ceil().max(1.0) as i32;
    // Powers of two are exact, so these comparisons settle the boundaries.
    while ratio <= 2f64.powi(-j) {
        j += 1;
    }
    while j > 1 && ratio > 2f64.powi(1 - j) {
        j -= 1;
    }
    j as u32
}

/// Packing constant for the count bound `|class k| <= c_pack * 2^(k d)`.
///
/// Class-`k` balls shrunk to half radius are disjoint with radius above
/// `2^(-k-1) diam`, so each carries measure at least
/// `c_lower (2^(-k-1) diam)^d`; the total measure is 1.
pub fn packing_constant(witness: &RegularityWitness, diameter: f64) -> f64 {
    (2.0 / diameter).powf(witness.d) / witness.c_lower
}

fn smallest_k0(c_pack: f64, d: f64, n: usize) -> u32 {
    let n = n as f64;
    let mut k: u32 = if c_pack >= n {
        1
    } else {
        ((n / c_pack).log2() / d).ceil().max(1.0) as u32
    };
    while c_pack * 2f64.powf(k as f64 * d) < n {
        k += 1;
    }
    while k > 1 && c_pack * 2f64.powf((k - 1) as f64 * d) >= n {
        k -= 1;
    }
    k
}

/// Sorts the family's balls into dyadic classes.
pub fn dyadic_partition(
    family: &BallFamily,
    diameter: f64,
    witness: &RegularityWitness,
) -> Result<DyadicDecomposition> {
    if !(diameter > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "diameter must be positive, got {diameter}"
        )));
    }
    let mut classes: BTreeMap<u32, Vec<Ball>> = BTreeMap::new();
    for ball in &family.balls {
        let ratio = ball.radius / diameter;
        if ratio > 1.0 + DIAMETER_SLACK {
            return Err(Error::RadiusExceedsDiameter {
                radius: ball.radius,
                diameter,
            });
        }
        if !(ratio > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be positive, got {}",
                ball.radius
            )));
        }
        classes
            .entry(dyadic_class(ratio.min(1.0)))
            .or_default()
            .push(*ball);
    }
    let c_pack = packing_constant(witness, diameter);
    Ok(DyadicDecomposition {
        classes,
        k0: smallest_k0(c_pack, witness.d, family.n_points),
        c_pack,
        d: witness.d,
        diameter,
        n_points: family.n_points,
    })
}

/// Two balls of one class whose shrunken copies intersect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub class: u32,
    pub center_a: usize,
    pub center_b: usize,
    pub center_distance: f64,
    /// Sum of the two shrunken radii.
    pub required: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassCount {
    pub class: u32,
    pub count: usize,
    pub count_bound: f64,
    pub min_radius: f64,
    pub max_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    /// Pairs violating `dist >= r_a / 2 + r_b / 2` (each ball at half its own radius).
    pub half_radius_overlaps: Vec<Overlap>,
    /// Pairs violating `dist >= 2^-k diam` (each class-`k` ball at radius
    /// `2^(-k-1) diam`, half the class's lower radius edge).
    pub class_radius_overlaps: Vec<Overlap>,
    pub counts: Vec<ClassCount>,
    /// Classes whose size exceeds `c_pack * 2^(k d)`. Informational only:
    /// `c_pack` rests on an estimated lower constant.
    pub count_bound_exceeded: Vec<u32>,
    pub c_pack: f64,
    pub pairs_checked: u64,
}

impl PackingReport {
    /// No half-radius overlaps.
    pub fn is_clean(&self) -> bool {
        self.half_radius_overlaps.is_empty()
    }

    pub fn to_report(&self, instance_id: &str) -> Report {
        Report::new("packing", instance_id)
            .violations(&self.half_radius_overlaps)
            .stat("pairs_checked", self.pairs_checked)
            .stat("half_radius_overlap_count", self.half_radius_overlaps.len())
            .stat(
                "class_radius_overlap_count",
                self.class_radius_overlaps.len(),
            )
            .stat(
                "class_radius_overlaps",
                serde_json::to_value(&self.class_radius_overlaps).expect("serializes"),
            )
            .stat("c_pack", self.c_pack)
            .stat(
                "counts",
                serde_json::to_value(&self.counts).expect("serializes"),
            )
            .stat(
                "count_bound_exceeded",
                serde_json::to_value(&self.count_bound_exceeded).expect("serializes"),
            )
    }
}

/// Checks disjointness of shrunken balls inside every class, and tabulates
/// class sizes against the packing bound.
pub fn check_packing(
    decomp: &DyadicDecomposition,
    points: &PointSet,
    witness: &RegularityWitness,
) -> PackingReport {
    let c_pack = packing_constant(witness, decomp.diameter);
    let mut half_radius_overlaps = Vec::new();
    let mut class_radius_overlaps = Vec::new();
    let mut counts = Vec::with_capacity(decomp.classes.len());
    let mut exceeded = Vec::new();
    let mut pairs = 0u64;
    for (&k, balls) in &decomp.classes {
        let class_floor = 2f64.powi(-(k as i32)) * decomp.diameter;
        for (i, a) in balls.iter().enumerate() {
            for b in &balls[i + 1..] {
                pairs += 1;
                let d = points.dist(a.center, b.center);
                let half_sum = 0.5 * a.radius + 0.5 * b.radius;
                if d < half_sum {
                    half_radius_overlaps.push(Overlap {
                        class: k,
                        center_a: a.center,
                        center_b: b.center,
                        center_distance: d,
                        required: half_sum,
                    });
                }
                if d < class_floor {
                    class_radius_overlaps.push(Overlap {
                        class: k,
                        center_a: a.center,
                        center_b: b.center,
                        center_distance: d,
                        required: class_floor,
                    });
                }
            }
        }
        let bound = c_pack * 2f64.powf(k as f64 * witness.d);
        if balls.len() as f64 > bound {
            exceeded.push(k);
        }
        counts.push(ClassCount {
            class: k,
            count: balls.len(),
            count_bound: bound,
            min_radius: balls.iter().map(|b| b.radius).fold(f64::INFINITY, f64::min),
            max_radius: balls.iter().map(|b| b.radius).fold(0.0, f64::max),
        });
    }
    PackingReport {
        half_radius_overlaps,
        class_radius_overlaps,
        counts,
        count_bound_exceeded: exceeded,
        c_pack,
        pairs_checked: pairs,
    }
}
