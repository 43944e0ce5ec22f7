use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::{SelectionTrace, SolverTag};

/// An open ball `B(center, radius)` taken from a heuristic's selection step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    /// Index of the trace step the ball came from.
    pub step: usize,
}

/// The balls `B_1, B_2, ...` read off a heuristic trace, in selection order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    pub balls: Vec<Ball>,
    pub source: SolverTag,
    /// Number of points in the instance the trace was taken from.
    pub n_points: usize,
    /// Zero-radius balls (duplicate points) left out of `balls`.
    pub dropped_zero_radius: usize,
}

impl BallFamily {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn radii_sum(&self) -> f64 {
        self.balls.iter().map(|b| b.radius).sum()
    }
}

/// Builds the ball family of a trace.
///
/// Nearest-neighbor: one ball per step, centered at the current point with
/// the step distance as radius. Greedy: two balls per accepted non-closing
/// edge, one at each endpoint, both with the edge length as radius.
pub fn extract_ball_family(trace: &SelectionTrace) -> Result<BallFamily> {
    if trace.is_empty() {
        return Err(Error::InvalidArgument("empty selection trace".into()));
    }
    let mut balls = Vec::new();
    let mut dropped = 0;
    let mut push = |center: usize, radius: f64, step: usize| {
        if radius > 0.0 {
            balls.push(Ball {
                center,
                radius,
                step,
            });
        } else {
            dropped += 1;
        }
    };
    let n_points = match trace.source {
        SolverTag::NearestNeighbor => {
            for (k, s) in trace.steps.iter().enumerate() {
                push(s.center, s.radius, k);
            }
            trace.len() + 1
        }
        SolverTag::Greedy => {
            let open = trace.len() - 1;
            for (k, s) in trace.steps[..open].iter().enumerate() {
                push(s.center, s.radius, k);
                push(s.partner, s.radius, k);
            }
            trace.len()
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "ball families come from heuristic traces, not {other}"
            )))
        }
    };
    Ok(BallFamily {
        balls,
        source: trace.source,
        n_points,
        dropped_zero_radius: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::TraceStep;

    fn step(center: usize, partner: usize, radius: f64) -> TraceStep {
        TraceStep {
            center,
            partner,
            radius,
        }
    }

    #[test]
    fn nn_square_family() {
        let trace = SelectionTrace {
            source: SolverTag::NearestNeighbor,
            steps: vec![step(0, 1, 1.0), step(1, 2, 1.0), step(2, 3, 1.0)],
        };
        let fam = extract_ball_family(&trace).unwrap();
        assert_eq!(fam.len(), 3);
        assert_eq!(fam.n_points, 4);
        let centers: Vec<usize> = fam.balls.iter().map(|b| b.center).collect();
        assert_eq!(centers, vec![0, 1, 2]);
        assert!(fam.balls.iter().all(|b| b.radius == 1.0));
    }

    #[test]
    fn zero_radius_dropped_with_diagnostic() {
        let trace = SelectionTrace {
            source: SolverTag::NearestNeighbor,
            steps: vec![step(0, 2, 0.0), step(2, 1, 0.4)],
        };
        let fam = extract_ball_family(&trace).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.dropped_zero_radius, 1);
        assert_eq!(fam.balls[0].step, 1);
    }

    #[test]
    fn greedy_two_balls_per_open_edge() {
        let trace = SelectionTrace {
            source: SolverTag::Greedy,
            steps: vec![step(0, 1, 0.1), step(1, 2, 0.2), step(0, 2, 0.3)],
        };
        let fam = extract_ball_family(&trace).unwrap();
        assert_eq!(fam.len(), 4);
        assert_eq!(fam.n_points, 3);
        assert_eq!(fam.balls[1].center, 1);
        assert_eq!(fam.balls[1].step, 0);
    }

    #[test]
    fn empty_and_non_heuristic_traces_rejected() {
        let empty = SelectionTrace {
            source: SolverTag::NearestNeighbor,
            steps: vec![],
        };
        assert!(extract_ball_family(&empty).is_err());
        let exact = SelectionTrace {
            source: SolverTag::ExactDp,
            steps: vec![step(0, 1, 1.0)],
        };
        assert!(extract_ball_family(&exact).is_err());
    }
}
