use super::tour::{SelectionTrace, SolverTag, Tour, TraceStep};
use crate::error::{Error, Result};
use crate::spaces::PointSet;

/// How equidistant candidates are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NnTieRule {
    #[default]
    LowestIndex,
}

/// Grows a path from `start`, always jumping to the closest unvisited point,
/// then closes it.
pub fn nearest_neighbor_tour(
    points: &PointSet,
    start: usize,
    tie_rule: NnTieRule,
) -> Result<(Tour, SelectionTrace)> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints {
            op: "nearest_neighbor_tour",
            min: 2,
            found: n,
        });
    }
    if start >= n {
        return Err(Error::InvalidArgument(format!(
            "start {start} out of range for {n} points"
        )));
    }
    let NnTieRule::LowestIndex = tie_rule;

    // Kept sorted so a strict `<` scan picks the lowest index among ties.
    let mut unvisited: Vec<usize> = (0..n).filter(|&i| i != start).collect();
    let mut order = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n - 1);
    order.push(start);
    let mut current = start;
    while !unvisited.is_empty() {
        let mut best_pos = 0;
        let mut best = points.dist(current, unvisited[0]);
        for (pos, &j) in unvisited.iter().enumerate().skip(1) {
            let d = points.dist(current, j);
            if d < best {
                best = d;
                best_pos = pos;
            }
        }
        let next = unvisited.remove(best_pos);
        steps.push(TraceStep {
            center: current,
            partner: next,
            radius: best,
        });
        order.push(next);
        current = next;
    }
    let tour = Tour::from_order(points, order, SolverTag::NearestNeighbor)?;
    Ok((
        tour,
        SelectionTrace {
            source: SolverTag::NearestNeighbor,
            steps,
        },
    ))
}

/// Nearest-neighbor tours from every start vertex, indexed by start.
pub fn nearest_neighbor_all_starts(points: &PointSet) -> Result<Vec<Tour>> {
    (0..points.len())
        .map(|s| nearest_neighbor_tour(points, s, NnTieRule::LowestIndex).map(|(t, _)| t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{sample, SpaceSpec};
    use std::sync::Arc;

    fn line(xs: &[f64]) -> PointSet {
        let s = Arc::new(SpaceSpec::unit_cube(1).unwrap());
        let rows: Vec<Vec<f64>> = xs.iter().map(|x| vec![*x]).collect();
        PointSet::new(s, &rows, None).unwrap()
    }

    #[test]
    fn two_points_go_and_return() {
        let ps = line(&[0.25, 0.75]);
        let (t, trace) = nearest_neighbor_tour(&ps, 0, NnTieRule::LowestIndex).unwrap();
        assert_eq!(t.length(), 2.0 * 0.5);
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn square_corners_follow_perimeter() {
        let s = Arc::new(SpaceSpec::unit_cube(2).unwrap());
        let ps = PointSet::new(
            s,
            &[
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ],
            None,
        )
        .unwrap();
        let (t, trace) = nearest_neighbor_tour(&ps, 0, NnTieRule::LowestIndex).unwrap();
        assert_eq!(t.order(), &[0, 1, 2, 3]);
        assert_eq!(t.length(), 4.0);
        let radii: Vec<f64> = trace.steps.iter().map(|s| s.radius).collect();
        assert_eq!(radii, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn collinear_hand_trace() {
        // Coordinates 0, 1, 3, 7 scaled by 1/8 (exact in binary): 0->1->3->7->0.
        let ps = line(&[0.0, 0.125, 0.375, 0.875]);
        let (t, trace) = nearest_neighbor_tour(&ps, 0, NnTieRule::LowestIndex).unwrap();
        assert_eq!(t.order(), &[0, 1, 2, 3]);
        assert_eq!(t.length() * 8.0, 14.0);
        let radii: Vec<f64> = trace.steps.iter().map(|s| s.radius * 8.0).collect();
        assert_eq!(radii, vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn duplicates_are_visited_first_at_radius_zero() {
        let ps = line(&[0.5, 0.1, 0.5]);
        let (t, trace) = nearest_neighbor_tour(&ps, 0, NnTieRule::LowestIndex).unwrap();
        assert_eq!(t.order(), &[0, 2, 1]);
        assert_eq!(trace.steps[0].radius, 0.0);
    }

    #[test]
    fn errors() {
        let ps = line(&[0.5]);
        assert!(matches!(
            nearest_neighbor_tour(&ps, 0, NnTieRule::LowestIndex),
            Err(Error::TooFewPoints { .. })
        ));
        let ps = line(&[0.5, 0.6]);
        assert!(nearest_neighbor_tour(&ps, 2, NnTieRule::LowestIndex).is_err());
    }

    #[test]
    fn trace_radii_are_minimal_post_hoc() {
        let s = Arc::new(SpaceSpec::unit_cube(2).unwrap());
        for seed in 0..20 {
            let ps = sample(&s, 60, seed).unwrap();
            let (t, trace) = nearest_neighbor_tour(&ps, 3, NnTieRule::LowestIndex).unwrap();
            t.validate(&ps).unwrap();
            let mut visited = vec![false; ps.len()];
            visited[trace.steps[0].center] = true;
            for step in &trace.steps {
                for j in 0..ps.len() {
                    if !visited[j] {
                        assert!(ps.dist(step.center, j) >= step.radius);
                    }
                }
                assert_eq!(ps.dist(step.center, step.partner), step.radius);
                visited[step.partner] = true;
            }
            let closing = t.closing_edge(&ps);
            let sum: f64 = trace.steps.iter().map(|s| s.radius).sum::<f64>() + closing;
            assert_eq!(sum, t.length());
        }
    }
}
