//! Search for instances where the heuristics are far from optimal.
//!
//! A hill climber moves one point at a time and keeps the move when the
//! worst-start nearest-neighbor ratio grows. Reported alongside is how short
//! the optimal tour is relative to the `n^(1 - 1/d)` scale of random points.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::derive_seed;
use crate::solvers::{
    exact_tour_dp, greedy_tour, nearest_neighbor_all_starts, two_opt_improve, GreedyTieRule,
    Tour, TourRecord, EXACT_DP_MAX_N,
};
use crate::spaces::{sample, similarity_dimension, PointSet, SpaceKind, SpaceSpec};

pub const ADVERSARIAL_MIN_N: usize = 6;
pub const ADVERSARIAL_MAX_N: usize = 14;

/// `heuristic / optimal`, with `0 / 0 = 1`.
pub fn approximation_ratio(heuristic: f64, optimal: f64) -> f64 {
    if optimal > 0.0 {
        heuristic / optimal
    } else if heuristic == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Exact, worst-start nearest-neighbor and greedy tours of one instance.
#[derive(Debug, Clone)]
pub struct InstanceRatios {
    pub optimal: Tour,
    pub nn_worst: Tour,
    pub nn_worst_start: usize,
    pub greedy: Tour,
    pub ratio_nn: f64,
    pub ratio_greedy: f64,
}

pub fn instance_ratios(points: &PointSet) -> Result<InstanceRatios> {
    let optimal = exact_tour_dp(points)?;
    let (greedy, _) = greedy_tour(points, GreedyTieRule::LengthThenLex)?;
    let (nn_worst_start, nn_worst) = worst_nn(points)?;
    Ok(InstanceRatios {
        ratio_nn: approximation_ratio(nn_worst.length(), optimal.length()),
        ratio_greedy: approximation_ratio(greedy.length(), optimal.length()),
        optimal,
        nn_worst,
        nn_worst_start,
        greedy,
    })
}

/// Longest nearest-neighbor tour over all starts; ties go to the lowest start.
fn worst_nn(points: &PointSet) -> Result<(usize, Tour)> {
    let tours = nearest_neighbor_all_starts(points)?;
    let mut best = 0;
    for (s, t) in tours.iter().enumerate() {
        if t.length() > tours[best].length() {
            best = s;
        }
    }
    let tour = tours.into_iter().nth(best).expect("at least one start");
    Ok((best, tour))
}

fn nn_ratio(points: &PointSet) -> Result<f64> {
    let opt = exact_tour_dp(points)?.length();
    Ok(approximation_ratio(worst_nn(points)?.1.length(), opt))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversarialConfig {
    pub n: usize,
    pub iterations: usize,
    pub restarts: usize,
    /// Initial Gaussian step, as a fraction of the diameter.
    pub step_fraction: f64,
    /// Consecutive rejections after which the step is halved.
    pub patience: usize,
    pub seed: u64,
}

impl AdversarialConfig {
    pub fn new(n: usize, iterations: usize, seed: u64) -> Self {
        Self {
            n,
            iterations,
            restarts: 4,
            step_fraction: 0.05,
            patience: 50,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdversarialResult {
    pub points: PointSet,
    pub ratios: InstanceRatios,
    /// `opt_length / n^(1 - 1/d)`.
    pub opt_vs_random_scale: f64,
    pub initial_ratio_nn: f64,
    /// Incumbent worst-start NN ratio after each accepted move of the winning restart.
    pub history: Vec<f64>,
    pub best_restart: usize,
}

impl AdversarialResult {
    pub fn ratio_nn(&self) -> f64 {
        self.ratios.ratio_nn
    }

    pub fn ratio_greedy(&self) -> f64 {
        self.ratios.ratio_greedy
    }

    pub fn opt_length(&self) -> f64 {
        self.ratios.optimal.length()
    }

    pub fn record(&self, config: &AdversarialConfig) -> AdversarialRecord {
        AdversarialRecord {
            space: self.points.space().tag(),
            n: self.points.len(),
            seed: config.seed,
            iterations: config.iterations,
            restarts: config.restarts,
            points: self.points.iter().map(<[f64]>::to_vec).collect(),
            ratio_nn: self.ratio_nn(),
            ratio_greedy: self.ratio_greedy(),
            opt_length: self.opt_length(),
            opt_vs_random_scale: self.opt_vs_random_scale,
            initial_ratio_nn: self.initial_ratio_nn,
            accepted_steps: self.history.len(),
            history: self.history.clone(),
            best_restart: self.best_restart,
            nn_worst_start: self.ratios.nn_worst_start,
            tours: vec![
                self.ratios.optimal.record(None),
                self.ratios.nn_worst.record(None),
                self.ratios.greedy.record(None),
            ],
        }
    }
}

/// JSON form of an adversarial search result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialRecord {
    pub space: String,
    pub n: usize,
    pub seed: u64,
    pub iterations: usize,
    pub restarts: usize,
    pub points: Vec<Vec<f64>>,
    pub ratio_nn: f64,
    pub ratio_greedy: f64,
    pub opt_length: f64,
    pub opt_vs_random_scale: f64,
    pub initial_ratio_nn: f64,
    pub accepted_steps: usize,
    pub history: Vec<f64>,
    pub best_restart: usize,
    pub nn_worst_start: usize,
    pub tours: Vec<TourRecord>,
}

/// Moves `x` back into the space: clamp for the cube, wrap for the torus,
/// and nearest-copy address descent for an IFS attractor.
pub fn project_into_space(spec: &SpaceSpec, x: &mut [f64]) {
    match spec.kind() {
        SpaceKind::UnitCube => x.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0)),
        SpaceKind::FlatTorus => x.iter_mut().for_each(|v| {
            *v = v.rem_euclid(1.0);
            if *v >= 1.0 {
                *v = 0.0;
            }
        }),
        SpaceKind::IfsAttractor => {
            let maps = spec.maps();
            let fixed: Vec<Vec<f64>> = maps.iter().map(|m| m.fixed_point()).collect();
            let dim = x.len();
            let centroid: Vec<f64> = (0..dim)
                .map(|k| fixed.iter().map(|p| p[k]).sum::<f64>() / fixed.len() as f64)
                .collect();
            let mut y = x.to_vec();
            let mut address = Vec::with_capacity(spec.address_depth() as usize);
            let mut img = vec![0.0; dim];
            for _ in 0..spec.address_depth() {
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (i, m) in maps.iter().enumerate() {
                    img.copy_from_slice(&centroid);
                    m.apply(&mut img);
                    let d = spec.distance_unchecked(&y, &img);
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                let m = &maps[best];
                for (yk, tk) in y.iter_mut().zip(&m.translation) {
                    *yk = (*yk - tk) / m.ratio;
                }
                address.push(best);
            }
            x.copy_from_slice(&fixed[0]);
            for &a in address.iter().rev() {
                maps[a].apply(x);
            }
        }
    }
}

struct Climb {
    points: PointSet,
    initial: f64,
    history: Vec<f64>,
    ratio: f64,
}

fn climb(spec: &Arc<SpaceSpec>, cfg: &AdversarialConfig, restart: usize, iters: usize) -> Result<Climb> {
    let seed = derive_seed(cfg.seed, cfg.n as u64, restart as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = sample(spec, cfg.n, seed)?;
    let initial = nn_ratio(&points)?;
    let mut current = initial;
    let mut history = Vec::new();
    let mut sigma = cfg.step_fraction * spec.diameter();
    let mut rejections = 0;
    let dim = spec.ambient_dim();
    let mut coords = points.coords().to_vec();
    for _ in 0..iters {
        let i = rng.random_range(0..cfg.n);
        let normal = Normal::new(0.0, sigma).expect("sigma is positive");
        let mut proposal = coords.clone();
        let p = &mut proposal[i * dim..(i + 1) * dim];
        for v in p.iter_mut() {
            *v += normal.sample(&mut rng);
        }
        project_into_space(spec, p);
        let candidate = PointSet::from_flat(Arc::clone(spec), proposal, None)?;
        let ratio = nn_ratio(&candidate)?;
        if ratio > current {
            current = ratio;
            history.push(ratio);
            coords = candidate.coords().to_vec();
            points = candidate;
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= cfg.patience {
                sigma *= 0.5;
                rejections = 0;
            }
        }
    }
    Ok(Climb {
        points,
        initial,
        history,
        ratio: current,
    })
}

/// Hill climbing with restarts on the worst-start nearest-neighbor ratio.
///
/// Restarts run in parallel; each trajectory depends only on its own seed.
pub fn adversarial_search(
    spec: &Arc<SpaceSpec>,
    config: &AdversarialConfig,
) -> Result<AdversarialResult> {
    if !(ADVERSARIAL_MIN_N..=ADVERSARIAL_MAX_N).contains(&config.n) {
        return Err(Error::SizeLimit {
            solver: "adversarial",
            min: ADVERSARIAL_MIN_N,
            max: ADVERSARIAL_MAX_N,
            n: config.n,
        });
    }
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be >= 1".into()));
    }
    if !(config.step_fraction > 0.0) {
        return Err(Error::InvalidArgument("step_fraction must be > 0".into()));
    }
    let per = config.iterations / config.restarts;
    let extra = config.iterations % config.restarts;
    let climbs: Vec<Climb> = (0..config.restarts)
        .into_par_iter()
        .map(|r| climb(spec, config, r, per + usize::from(r < extra)))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (r, c) in climbs.iter().enumerate() {
        if c.ratio > climbs[best].ratio {
            best = r;
        }
    }
    let winner = climbs.into_iter().nth(best).expect("restarts >= 1");
    // Recomputed from scratch rather than trusting the climb's incumbent.
    let ratios = instance_ratios(&winner.points)?;
    let d = similarity_dimension(spec);
    let opt_vs_random_scale =
        ratios.optimal.length() / (config.n as f64).powf(1.0 - 1.0 / d);
    Ok(AdversarialResult {
        points: winner.points,
        ratios,
        opt_vs_random_scale,
        initial_ratio_nn: winner.initial,
        history: winner.history,
        best_restart: best,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub ratio_nn: f64,
    pub ratio_greedy: f64,
    /// Optimal length, or the best 2-opt-polished heuristic length when
    /// `exact` is false.
    pub opt_length: f64,
    pub opt_scale: f64,
    pub exact: bool,
}

/// Ratios for one point set; exact up to the DP limit, 2-opt proxy above it.
pub fn ratio_record(points: &PointSet, d: f64, trial: usize) -> Result<RatioRecord> {
    let n = points.len();
    let (ratio_nn, ratio_greedy, opt, exact) = if n <= EXACT_DP_MAX_N {
        let r = instance_ratios(points)?;
        (r.ratio_nn, r.ratio_greedy, r.optimal.length(), true)
    } else {
        let (_, nn) = worst_nn(points)?;
        let (greedy, _) = greedy_tour(points, GreedyTieRule::LengthThenLex)?;
        let proxy = two_opt_improve(points, &nn, 1000)?
            .length()
            .min(two_opt_improve(points, &greedy, 1000)?.length());
        (
            approximation_ratio(nn.length(), proxy),
            approximation_ratio(greedy.length(), proxy),
            proxy,
            false,
        )
    };
    Ok(RatioRecord {
        n,
        trial,
        seed: points.seed().unwrap_or(0),
        ratio_nn,
        ratio_greedy,
        opt_length: opt,
        opt_scale: opt / (n as f64).powf(1.0 - 1.0 / d),
        exact,
    })
}

/// Ratio records over `trials` random instances for each `n` in `n_grid`.
pub fn ratio_profile(
    spec: &Arc<SpaceSpec>,
    n_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<RatioRecord>> {
    if let Some(&n) = n_grid.iter().find(|&&n| n < 3) {
        return Err(Error::SizeLimit {
            solver: "ratio_profile",
            min: 3,
            max: usize::MAX,
            n,
        });
    }
    let d = similarity_dimension(spec);
    let cells: Vec<(usize, usize)> = n_grid
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();
    cells
        .into_par_iter()
        .map(|(n, t)| {
            let ps = sample(spec, n, derive_seed(seed, n as u64, t as u64))?;
            ratio_record(&ps, d, t)
        })
        .collect()
}
