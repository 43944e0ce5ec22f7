use super::tour::{SelectionTrace, SolverTag, Tour, TraceStep};
use crate::error::{Error, Result};
use crate::spaces::PointSet;

/// How equal-length edges are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreedyTieRule {
    /// Nondecreasing length, then lexicographic `(i, j)` with `i < j`.
    #[default]
    LengthThenLex,
}

/// Disjoint-set forest with path halving and union by size.
struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Builds a tour by scanning all edges shortest first and accepting an edge
/// when both endpoints have degree below 2 and it does not close a cycle,
/// except for the `n`-th accepted edge, which closes the tour.
pub fn greedy_tour(points: &PointSet, tie_rule: GreedyTieRule) -> Result<(Tour, SelectionTrace)> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewPoints {
            op: "greedy_tour",
            min: 3,
            found: n,
        });
    }
    if n > u32::MAX as usize {
        return Err(Error::SizeLimit {
            solver: "greedy",
            min: 3,
            max: u32::MAX as usize,
            n,
        });
    }
    let GreedyTieRule::LengthThenLex = tie_rule;

    // Distances are nonnegative, so their IEEE bit patterns sort like the
    // values themselves and the tuple order is exactly length-then-lex.
    let mut edges: Vec<(u64, u32, u32)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((points.dist(i, j).to_bits(), i as u32, j as u32));
        }
    }
    edges.sort_unstable();

    let mut degree = vec![0u8; n];
    let mut adj = vec![[u32::MAX; 2]; n];
    let mut sets = DisjointSet::new(n);
    let mut steps = Vec::with_capacity(n);
    for &(bits, i, j) in &edges {
        let (iu, ju) = (i as usize, j as usize);
        if degree[iu] >= 2 || degree[ju] >= 2 {
            continue;
        }
        let closes = sets.find(i) == sets.find(j);
        if closes && steps.len() + 1 < n {
            continue;
        }
        adj[iu][degree[iu] as usize] = j;
        adj[ju][degree[ju] as usize] = i;
        degree[iu] += 1;
        degree[ju] += 1;
        sets.union(i, j);
        steps.push(TraceStep {
            center: iu,
            partner: ju,
            radius: f64::from_bits(bits),
        });
        if steps.len() == n {
            if !closes {
                return Err(Error::InvalidTour(
                    "greedy: the n-th accepted edge did not close the cycle".into(),
                ));
            }
            break;
        }
    }
    if steps.len() != n {
        return Err(Error::InvalidTour(format!(
            "greedy accepted {} edges for {n} points",
            steps.len()
        )));
    }

    // Walk the cycle from vertex 0 towards its lower-indexed neighbor.
    let mut order = Vec::with_capacity(n);
    let mut prev = 0u32;
    let mut cur = adj[0][0].min(adj[0][1]);
    order.push(0usize);
    while cur != 0 {
        order.push(cur as usize);
        let [a, b] = adj[cur as usize];
        let next = if a == prev { b } else { a };
        prev = cur;
        cur = next;
        if order.len() > n {
            return Err(Error::InvalidTour("greedy edges do not form one cycle".into()));
        }
    }
    let tour = Tour::from_order(points, order, SolverTag::Greedy)?;
    Ok((
        tour,
        SelectionTrace {
            source: SolverTag::Greedy,
            steps,
        },
    ))
}
