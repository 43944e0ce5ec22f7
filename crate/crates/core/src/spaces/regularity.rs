//! Monte Carlo witnesses for the Ahlfors-regularity constants of a space.
//!
//! For a d-regular measure every ball satisfies `C r^d <= mu(B(p, r)) <= D r^d`
//! when `0 < r <= diam`. Here `mu` is replaced by the empirical measure of a
//! large sample, so the returned constants are estimates, not bounds.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::points::{sample, PointSet};
use super::spec::{Metric, SpaceKind, SpaceSpec};
use crate::error::{Error, Result};
use crate::stats::{ols, LinearFit};

/// Probe points used as ball centers.
const MAX_CENTERS: usize = 400;
/// Radii whose mean ball count falls below this are excluded from C and D.
const MIN_COUNT_FOR_CONSTANTS: f64 = 100.0;

/// The triple `(d, C, D)` of the regularity inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityWitness {
    pub d: f64,
    pub c_lower: f64,
    pub d_upper: f64,
}

impl RegularityWitness {
    pub fn new(d: f64, c_lower: f64, d_upper: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dimension must be positive, got {d}"
            )));
        }
        if !(c_lower > 0.0 && c_lower <= d_upper && d_upper.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < c_lower <= d_upper, got {c_lower}, {d_upper}"
            )));
        }
        Ok(Self {
            d,
            c_lower,
            d_upper,
        })
    }

    /// Lebesgue measure on the euclidean unit square: `mu(B) <= pi r^2`, and
    /// `mu(B) / r^2` is smallest (1/2) for the full-diameter ball.
    pub fn unit_square_analytic() -> Self {
        Self {
            d: 2.0,
            c_lower: 0.5,
            d_upper: std::f64::consts::PI,
        }
    }

    /// The analytic witness when one is known for `spec`.
    pub fn analytic_for(spec: &SpaceSpec) -> Option<Self> {
        (spec.kind() == SpaceKind::UnitCube
            && spec.ambient_dim() == 2
            && spec.metric() == Metric::Euclidean)
            .then(Self::unit_square_analytic)
    }

    /// The length bounds only bite for `d > 1`; smaller dimensions are
    /// accepted for sampling but flagged.
    pub fn headline_bounds_apply(&self) -> bool {
        self.d > 1.0
    }
}

/// Empirical ball measures on one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusProbe {
    pub radius: f64,
    pub mean_measure: f64,
    pub min_measure: f64,
    pub max_measure: f64,
    pub mean_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityEstimate {
    pub witness: RegularityWitness,
    pub slope_stderr: f64,
    pub probes: Vec<RadiusProbe>,
    pub n_probe: usize,
    pub n_centers: usize,
}

impl RegularityEstimate {
    /// Re-derives `C` and `D` against a given dimension, e.g. the closed-form
    /// similarity dimension instead of the regression slope.
    pub fn constants_for(&self, d: f64) -> Result<RegularityWitness> {
        let usable: Vec<&RadiusProbe> = {
            let strong: Vec<_> = self
                .probes
                .iter()
                .filter(|p| p.mean_count >= MIN_COUNT_FOR_CONSTANTS && p.min_measure > 0.0)
                .collect();
            if strong.is_empty() {
                self.probes.iter().filter(|p| p.min_measure > 0.0).collect()
            } else {
                strong
            }
        };
        let (c, dd) = if usable.is_empty() {
            // Fall back to mean measures when every radius has an empty ball.
            self.probes.iter().fold((f64::INFINITY, 0.0f64), |(c, dd), p| {
                let s = p.radius.powf(d);
                (c.min(p.mean_measure / s), dd.max(p.mean_measure / s))
            })
        } else {
            usable.iter().fold((f64::INFINITY, 0.0f64), |(c, dd), p| {
                let s = p.radius.powf(d);
                (c.min(p.min_measure / s), dd.max(p.max_measure / s))
            })
        };
        RegularityWitness::new(d, c, dd)
    }
}

/// Default probe radii: `n_radii` log-spaced values in `[diam/256, diam/16]`.
///
/// Larger radii are dominated by boundary and saturation effects and smaller
/// ones by counting noise at desk-scale sample sizes.
pub fn default_radii(diameter: f64, n_radii: usize) -> Vec<f64> {
    let lo = (diameter / 256.0).ln();
    let hi = (diameter / 16.0).ln();
    match n_radii {
        0 => Vec::new(),
        1 => vec![hi.exp()],
        k => (0..k)
            .map(|i| (lo + (hi - lo) * i as f64 / (k - 1) as f64).exp())
            .collect(),
    }
}

/// Estimates `(d, C, D)` from `n_probe` sampled points.
pub fn estimate_regularity(
    spec: &Arc<SpaceSpec>,
    n_probe: usize,
    n_radii: usize,
    seed: u64,
) -> Result<RegularityEstimate> {
    estimate_regularity_at(spec, n_probe, &default_radii(spec.diameter(), n_radii), seed)
}

/// Like [`estimate_regularity`] with an explicit radius grid in `(0, diam]`.
pub fn estimate_regularity_at(
    spec: &Arc<SpaceSpec>,
    n_probe: usize,
    radii: &[f64],
    seed: u64,
) -> Result<RegularityEstimate> {
    if n_probe < 100 {
        return Err(Error::InvalidArgument(format!(
            "n_probe must be >= 100, got {n_probe}"
        )));
    }
    if radii.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 radii".into()));
    }
    if let Some(r) = radii
        .iter()
        .find(|r| !(**r > 0.0 && **r <= spec.diameter()))
    {
        return Err(Error::InvalidArgument(format!(
            "radius {r} outside (0, diameter]"
        )));
    }
    let points = sample(spec, n_probe, seed)?;
    let n_centers = n_probe.min(MAX_CENTERS);
    let others = (n_probe - 1) as f64;

    // counts[c][k]: other points strictly inside B(center c, radii[k]).
    let mut counts = vec![vec![0usize; radii.len()]; n_centers];
    let mut dists = Vec::with_capacity(n_probe - 1);
    for (c, row) in counts.iter_mut().enumerate() {
        dists.clear();
        dists.extend((0..n_probe).filter(|&j| j != c).map(|j| points.dist(c, j)));
        dists.sort_unstable_by(f64::total_cmp);
        for (k, r) in radii.iter().enumerate() {
            row[k] = dists.partition_point(|d| d < r);
        }
    }

    let mut probes = Vec::with_capacity(radii.len());
    for (k, &radius) in radii.iter().enumerate() {
        let col = counts.iter().map(|row| row[k]);
        let total: usize = col.clone().sum();
        let min = col.clone().min().unwrap_or(0);
        let max = col.max().unwrap_or(0);
        probes.push(RadiusProbe {
            radius,
            mean_measure: total as f64 / n_centers as f64 / others,
            min_measure: min as f64 / others,
            max_measure: max as f64 / others,
            mean_count: total as f64 / n_centers as f64,
        });
    }

    let informative: Vec<&RadiusProbe> = probes
        .iter()
        .filter(|p| p.mean_measure > 0.0 && p.min_measure < 1.0)
        .collect();
    if informative.len() < 2 {
        return Err(Error::DegenerateRegression(format!(
            "only {} of {} radii give balls that are neither empty nor full \
             (radii {:.3e}..{:.3e}, n_probe {n_probe})",
            informative.len(),
            radii.len(),
            radii[0],
            radii[radii.len() - 1]
        )));
    }
    let xs: Vec<f64> = informative.iter().map(|p| p.radius.ln()).collect();
    let ys: Vec<f64> = informative.iter().map(|p| p.mean_measure.ln()).collect();
    let LinearFit {
        slope,
        slope_stderr,
        ..
    } = ols(&xs, &ys)?;

    let mut estimate = RegularityEstimate {
        witness: RegularityWitness {
            d: slope,
            c_lower: 0.0,
            d_upper: 0.0,
        },
        slope_stderr,
        probes,
        n_probe,
        n_centers,
    };
    estimate.witness = estimate.constants_for(slope)?;
    Ok(estimate)
}

/// Fraction of `points` strictly within `r` of `center`.
pub fn empirical_ball_measure(points: &PointSet, center: &[f64], r: f64) -> f64 {
    let space = points.space();
    let inside = points
        .iter()
        .filter(|p| space.distance_unchecked(center, p) < r)
        .count();
    inside as f64 / points.len() as f64
}

/// Box-counting dimension estimate: the negated slope of `log N(s)` against
/// `log s`, where `N(s)` counts occupied grid cells of side `s`.
pub fn box_counting_dimension(points: &PointSet, sides: &[f64]) -> Result<LinearFit> {
    if sides.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 box sides".into()));
    }
    let mut xs = Vec::with_capacity(sides.len());
    let mut ys = Vec::with_capacity(sides.len());
    for &s in sides {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!("box side {s} must be > 0")));
        }
        let occupied: HashSet<Vec<i64>> = points
            .iter()
            .map(|p| p.iter().map(|x| (x / s).floor() as i64).collect())
            .collect();
        xs.push(s.ln());
        ys.push((occupied.len() as f64).ln());
    }
    let fit = ols(&xs, &ys)?;
    Ok(LinearFit {
        slope: -fit.slope,
        ..fit
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::similarity_dimension;

    #[test]
    fn witness_validation() {
        assert!(RegularityWitness::new(2.0, 1.0, 0.5).is_err());
        assert!(RegularityWitness::new(0.0, 1.0, 2.0).is_err());
        assert!(RegularityWitness::new(2.0, 0.0, 2.0).is_err());
        let w = RegularityWitness::new(0.8, 0.1, 2.0).unwrap();
        assert!(!w.headline_bounds_apply());
    }

    #[test]
    fn analytic_override_only_for_euclidean_square() {
        let sq = SpaceSpec::unit_cube(2).unwrap();
        assert_eq!(
            RegularityWitness::analytic_for(&sq).unwrap().d_upper,
            std::f64::consts::PI
        );
        assert!(RegularityWitness::analytic_for(&SpaceSpec::unit_cube(3).unwrap()).is_none());
        assert!(RegularityWitness::analytic_for(&SpaceSpec::sierpinski_gasket()).is_none());
    }

    #[test]
    fn radii_grid_is_log_spaced() {
        let r = default_radii(1.0, 5);
        assert_eq!(r.len(), 5);
        assert!((r[0] - 1.0 / 256.0).abs() < 1e-15);
        assert!((r[4] - 1.0 / 16.0).abs() < 1e-15);
        assert!((r[1] / r[0] - r[3] / r[2]).abs() < 1e-12);
    }

    #[test]
    fn small_probe_rejected() {
        let s = Arc::new(SpaceSpec::unit_cube(2).unwrap());
        assert!(estimate_regularity(&s, 50, 5, 1).is_err());
    }

    #[test]
    fn degenerate_grid_reports_diagnostic() {
        // Radii far below the typical spacing of 100 points: every ball empty.
        let s = Arc::new(SpaceSpec::unit_cube(2).unwrap());
        let err = estimate_regularity_at(&s, 100, &[1e-9, 2e-9], 4).unwrap_err();
        assert!(matches!(err, Error::DegenerateRegression(_)));
        assert!(err.to_string().contains("neither empty nor full"));
    }

    #[test]
    fn interior_ball_measure_near_pi_r_squared() {
        // Expected count ~785 per ball, so relative noise ~3.6% per center.
        let s = Arc::new(SpaceSpec::unit_cube(2).unwrap());
        let ps = sample(&s, 100_000, 17).unwrap();
        let r = 0.05;
        let centers = [[0.5, 0.5], [0.3, 0.7], [0.7, 0.25], [0.2, 0.2]];
        let avg = centers
            .iter()
            .map(|c| empirical_ball_measure(&ps, c, r) / (r * r))
            .sum::<f64>()
            / centers.len() as f64;
        let pi = std::f64::consts::PI;
        assert!((avg - pi).abs() <= 0.1 * pi, "measure/r^2 = {avg}");
    }

    #[test]
    fn square_dimension_estimate() {
        let s = Arc::new(SpaceSpec::unit_cube(2).unwrap());
        let est = estimate_regularity(&s, 100_000, 8, 5).unwrap();
        assert!((est.witness.d - 2.0).abs() <= 0.1, "d = {}", est.witness.d);
        assert!(est.witness.c_lower <= est.witness.d_upper);
    }

    #[test]
    fn gasket_dimension_estimate() {
        let g = Arc::new(SpaceSpec::sierpinski_gasket());
        let est = estimate_regularity(&g, 100_000, 8, 6).unwrap();
        let target = similarity_dimension(&g);
        assert!((est.witness.d - target).abs() <= 0.1, "d = {}", est.witness.d);
    }

    #[test]
    fn box_counting_cross_checks_similarity_dimension() {
        let g = Arc::new(SpaceSpec::sierpinski_gasket());
        let ps = sample(&g, 100_000, 8).unwrap();
        let sides: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
        let fit = box_counting_dimension(&ps, &sides).unwrap();
        assert!(
            (fit.slope - 3f64.ln() / 2f64.ln()).abs() <= 0.05,
            "gasket box dim {}",
            fit.slope
        );

        let c = Arc::new(SpaceSpec::sierpinski_carpet());
        let ps = sample(&c, 100_000, 9).unwrap();
        // Nudge the grid off the carpet's triadic lattice lines.
        let sides: Vec<f64> = (1..=4).map(|k| 3f64.powi(-k) * (1.0 + 1e-9)).collect();
        let fit = box_counting_dimension(&ps, &sides).unwrap();
        assert!(
            (fit.slope - 8f64.ln() / 3f64.ln()).abs() <= 0.05,
            "carpet box dim {}",
            fit.slope
        );
    }
}
