use serde::{Deserialize, Serialize};

use super::ball_family::BallFamily;
use super::report::Report;
use crate::spaces::PointSet;

/// A pair where the earlier ball contains the later ball's center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarViolation {
    /// Positions in the family, `earlier < later`.
    pub earlier: usize,
    pub later: usize,
    pub center_distance: f64,
    pub earlier_radius: f64,
    pub later_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarReport {
    pub pairs_checked: u64,
    /// Pairs with `dist(c_i, c_j) < r_i` for `i < j`.
    pub violations: Vec<StarViolation>,
    /// Pairs with `dist(c_i, c_j) < min(r_i, r_j)`.
    pub weak_violations: Vec<StarViolation>,
}

impl StarReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_report(&self, instance_id: &str) -> Report {
        Report::new("star", instance_id)
            .violations(&self.violations)
            .stat("pairs_checked", self.pairs_checked)
            .stat("violation_count", self.violations.len())
            .stat("weak_violation_count", self.weak_violations.len())
    }
}

/// Checks that no ball contains the center of any later ball.
///
/// Balls are open, so a later center exactly on the boundary is fine.
pub fn check_star_property(family: &BallFamily, points: &PointSet) -> StarReport {
    let balls = &family.balls;
    let mut violations = Vec::new();
    let mut weak_violations = Vec::new();
    let mut pairs = 0u64;
    for (i, a) in balls.iter().enumerate() {
        for (j, b) in balls.iter().enumerate().skip(i + 1) {
            pairs += 1;
            let d = points.dist(a.center, b.center);
            if d < a.radius {
                let v = StarViolation {
                    earlier: i,
                    later: j,
                    center_distance: d,
                    earlier_radius: a.radius,
                    later_radius: b.radius,
                };
                if d < a.radius.min(b.radius) {
                    weak_violations.push(v);
                }
                violations.push(v);
            }
        }
    }
    StarReport {
        pairs_checked: pairs,
        violations,
        weak_violations,
    }
}
