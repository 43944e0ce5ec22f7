use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::PointSet;

/// Relative tolerance for comparing a stored tour length with a recomputation.
pub const LENGTH_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverTag {
    #[serde(alias = "nn")]
    NearestNeighbor,
    Greedy,
    #[serde(alias = "exact")]
    ExactDp,
    #[serde(alias = "brute")]
    BruteForce,
    TwoOpt,
}

impl SolverTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverTag::NearestNeighbor => "nearest-neighbor",
            SolverTag::Greedy => "greedy",
            SolverTag::ExactDp => "exact-dp",
            SolverTag::BruteForce => "brute-force",
            SolverTag::TwoOpt => "two-opt",
        }
    }
}

impl std::str::FromStr for SolverTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nn" | "nearest-neighbor" => Ok(SolverTag::NearestNeighbor),
            "greedy" => Ok(SolverTag::Greedy),
            "exact" | "exact-dp" => Ok(SolverTag::ExactDp),
            "brute" | "brute-force" => Ok(SolverTag::BruteForce),
            "two-opt" | "2opt" => Ok(SolverTag::TwoOpt),
            other => Err(Error::Config(format!(
                "unknown solver '{other}' (expected nn, greedy, exact, brute, two-opt)"
            ))),
        }
    }
}

impl std::fmt::Display for SolverTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A closed tour: visiting order plus its total length, closing edge included.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    order: Vec<usize>,
    length: f64,
    solver: SolverTag,
}

impl Tour {
    /// Validates that `order` is a permutation of `0..n` and computes its length.
    pub fn from_order(points: &PointSet, order: Vec<usize>, solver: SolverTag) -> Result<Self> {
        check_permutation(&order, points.len())?;
        let length = tour_length(points, &order);
        Ok(Self {
            order,
            length,
            solver,
        })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn solver(&self) -> SolverTag {
        self.solver
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Length of the edge from the last visited point back to the first.
    pub fn closing_edge(&self, points: &PointSet) -> f64 {
        match self.order.as_slice() {
            [] | [_] => 0.0,
            o => points.dist(o[o.len() - 1], o[0]),
        }
    }

    /// Re-checks the permutation and the stored length against `points`.
    pub fn validate(&self, points: &PointSet) -> Result<()> {
        check_permutation(&self.order, points.len())?;
        let recomputed = tour_length(points, &self.order);
        if (recomputed - self.length).abs() > LENGTH_RTOL * recomputed.max(1.0) {
            return Err(Error::InvalidTour(format!(
                "stored length {} differs from recomputed {}",
                self.length, recomputed
            )));
        }
        Ok(())
    }

    pub fn record(&self, seed: Option<u64>) -> TourRecord {
        TourRecord {
            solver: self.solver,
            order: self.order.clone(),
            length: self.length,
            n: self.order.len(),
            seed,
        }
    }
}

/// Serialized form of a tour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourRecord {
    pub solver: SolverTag,
    pub order: Vec<usize>,
    pub length: f64,
    pub n: usize,
    pub seed: Option<u64>,
}

/// Sum of consecutive distances along `order`, including the closing edge.
pub fn tour_length(points: &PointSet, order: &[usize]) -> f64 {
    let n = order.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for w in order.windows(2) {
        total += points.dist(w[0], w[1]);
    }
    total + points.dist(order[n - 1], order[0])
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidTour(format!(
            "order has {} entries for {n} points",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidTour(format!(
                "order is not a permutation of 0..{n} (bad entry {i})"
            )));
        }
    }
    Ok(())
}

/// One selection made by a heuristic: the center, its partner and the
/// distance between them at the time of selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub center: usize,
    pub partner: usize,
    pub radius: f64,
}

/// The ordered selections of a heuristic run.
///
/// Nearest-neighbor traces hold `n - 1` steps (the closing edge is implicit);
/// greedy traces hold `n` accepted edges, the last one closing the cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub source: SolverTag,
    pub steps: Vec<TraceStep>,
}

impl SelectionTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}
