//! Exact solvers for small instances.
//!
//! `exact_tour_dp` runs Held-Karp over (subset, endpoint) states with vertex 0
//! fixed as the start. `brute_force_tour` enumerates every distinct cycle and
//! serves as an independent oracle for it.

use super::tour::{SolverTag, Tour};
use crate::error::{Error, Result};
use crate::spaces::PointSet;

pub const EXACT_DP_MAX_N: usize = 20;
pub const BRUTE_FORCE_MAX_N: usize = 10;

/// Minimum-length Hamiltonian cycle via subset dynamic programming.
pub fn exact_tour_dp(points: &PointSet) -> Result<Tour> {
    let n = points.len();
    if !(3..=EXACT_DP_MAX_N).contains(&n) {
        return Err(Error::SizeLimit {
            solver: "exact-dp",
            min: 3,
            max: EXACT_DP_MAX_N,
            n,
        });
    }
    let m = n - 1; // vertices 1..n live in bits 0..m
    let full = 1usize << m;
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = points.dist(i, j);
        }
    }

    // cost[mask * m + e]: shortest path 0 -> ... -> e+1 through exactly `mask`.
    let mut cost = vec![f64::INFINITY; full * m];
    let mut parent = vec![u8::MAX; full * m];
    for e in 0..m {
        cost[(1 << e) * m + e] = dist[e + 1];
    }
    for mask in 1..full {
        for e in 0..m {
            if mask & (1 << e) == 0 {
                continue;
            }
            let here = cost[mask * m + e];
            if !here.is_finite() {
                continue;
            }
            let row = &dist[(e + 1) * n..(e + 2) * n];
            let mut rest = !mask & (full - 1);
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let next = mask | (1 << k);
                let cand = here + row[k + 1];
                let slot = next * m + k;
                if cand < cost[slot] {
                    cost[slot] = cand;
                    parent[slot] = e as u8;
                }
            }
        }
    }

    let last = full - 1;
    let mut best_e = 0;
    let mut best = f64::INFINITY;
    for e in 0..m {
        let c = cost[last * m + e] + dist[e + 1];
        if c < best {
            best = c;
            best_e = e;
        }
    }

    let mut order = Vec::with_capacity(n);
    let mut mask = last;
    let mut e = best_e;
    loop {
        order.push(e + 1);
        let p = parent[mask * m + e];
        mask &= !(1 << e);
        if p == u8::MAX {
            break;
        }
        e = p as usize;
    }
    order.push(0);
    order.reverse();
    Tour::from_order(points, order, SolverTag::ExactDp)
}

/// Minimum over all `(n-1)!/2` distinct cycles, by exhaustive enumeration.
pub fn brute_force_tour(points: &PointSet) -> Result<Tour> {
    let n = points.len();
    if !(3..=BRUTE_FORCE_MAX_N).contains(&n) {
        return Err(Error::SizeLimit {
            solver: "brute-force",
            min: 3,
            max: BRUTE_FORCE_MAX_N,
            n,
        });
    }
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best_len = f64::INFINITY;
    let mut best = rest.clone();
    loop {
        // Each cycle and its reversal appear once with rest[0] < rest[last].
        if rest[0] < rest[rest.len() - 1] {
            let mut len = points.dist(0, rest[0]);
            for w in rest.windows(2) {
                len += points.dist(w[0], w[1]);
            }
            len += points.dist(rest[rest.len() - 1], 0);
            if len < best_len {
                best_len = len;
                best.copy_from_slice(&rest);
            }
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    let mut order = Vec::with_capacity(n);
    order.push(0);
    order.extend(best);
    Tour::from_order(points, order, SolverTag::BruteForce)
}

/// Advances to the next lexicographic permutation; false after the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
