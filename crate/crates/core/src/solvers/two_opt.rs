use super::tour::{SolverTag, Tour};
use crate::error::Result;
use crate::spaces::PointSet;

/// Improvements smaller than this are ignored to avoid cycling on rounding noise.
const MIN_GAIN: f64 = 1e-12;

/// First-improvement 2-opt: reverse a segment whenever swapping two edges
/// shortens the tour, until a full pass finds nothing or `max_passes` is hit.
///
/// The result is never longer than the input.
pub fn two_opt_improve(points: &PointSet, tour: &Tour, max_passes: usize) -> Result<Tour> {
    tour.validate(points)?;
    let n = tour.n();
    let mut order = tour.order().to_vec();
    if n >= 4 {
        for _ in 0..max_passes {
            let mut improved = false;
            for i in 0..n - 2 {
                for j in i + 2..n {
                    if i == 0 && j == n - 1 {
                        continue;
                    }
                    let (a, b) = (order[i], order[i + 1]);
                    let (c, d) = (order[j], order[(j + 1) % n]);
                    let delta = points.dist(a, c) + points.dist(b, d)
                        - points.dist(a, b)
                        - points.dist(c, d);
                    if delta < -MIN_GAIN * (1.0 + tour.length()) {
                        order[i + 1..=j].reverse();
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    let improved = Tour::from_order(points, order, SolverTag::TwoOpt)?;
    if improved.length() <= tour.length() {
        Ok(improved)
    } else {
        Tour::from_order(points, tour.order().to_vec(), SolverTag::TwoOpt)
    }
}
