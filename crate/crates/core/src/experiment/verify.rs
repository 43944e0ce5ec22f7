use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{derive_seed, with_threads, ResolvedWitness};
use crate::analysis::{
    bound_chain, check_packing, check_star_property, dyadic_partition, extract_ball_family,
    isolation_stats, verify_lower_bound, CheckKind,
};
use crate::error::{Error, Result};
use crate::solvers::{
    exact_tour_dp, greedy_tour, nearest_neighbor_tour, GreedyTieRule, NnTieRule, SelectionTrace,
    Tour,
};
use crate::spaces::{sample, PointSet, SpaceSpec};

/// Largest n for which the lower bound is compared against an optimal tour.
pub const EXACT_LOWER_BOUND_MAX_N: usize = 16;

/// Violation examples kept per check.
const MAX_EXAMPLES: usize = 5;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub space: Arc<SpaceSpec>,
    pub n: usize,
    pub trials: usize,
    pub checks: Vec<CheckKind>,
    pub seed: u64,
    pub witness: ResolvedWitness,
    /// Also run the checks on greedy traces. Only their bound chain gates.
    pub include_greedy: bool,
}

/// Aggregate of one check over all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub instances: usize,
    pub violating_instances: usize,
    pub violations: u64,
    /// Whether a violation counts as a failure of the run.
    pub gating: bool,
    pub examples: Vec<Value>,
}

impl CheckSummary {
    fn new(check: &str, gating: bool) -> Self {
        Self {
            check: check.to_string(),
            instances: 0,
            violating_instances: 0,
            violations: 0,
            gating,
            examples: Vec::new(),
        }
    }

    fn add<T: Serialize>(&mut self, trial: usize, found: &[T]) {
        self.instances += 1;
        if found.is_empty() {
            return;
        }
        self.violating_instances += 1;
        self.violations += found.len() as u64;
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(serde_json::json!({
                "trial": trial,
                "first": serde_json::to_value(&found[0]).unwrap_or(Value::Null),
                "count": found.len(),
            }));
        }
    }

    fn merge(&mut self, other: CheckSummary) {
        self.instances += other.instances;
        self.violating_instances += other.violating_instances;
        self.violations += other.violations;
        for e in other.examples {
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(e);
            }
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolationSummary {
    pub r: f64,
    pub mean_z_over_n: f64,
    pub min_z_over_n: f64,
    pub max_z_over_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub space: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub witness: ResolvedWitness,
    pub checks: Vec<CheckSummary>,
    pub isolation: Option<IsolationSummary>,
    /// Solver used as the reference tour for the lower-bound check.
    pub lower_bound_reference: Option<String>,
}

impl VerifySummary {
    /// Violations of checks that gate the run.
    pub fn gating_violations(&self) -> u64 {
        self.checks
            .iter()
            .filter(|c| c.gating)
            .map(|c| c.violations)
            .sum()
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.check == name)
    }
}

struct TrialOutcome {
    checks: Vec<CheckSummary>,
    z_over_n: Option<(f64, f64)>,
}

/// Runs the requested checks on `trials` sampled instances.
///
/// Nearest-neighbor results gate (star, class-radius packing, bound chain),
/// as does the greedy bound chain;
/// the literal half-radius packing and greedy star results are reported only.
pub fn run_verify(cfg: &VerifyConfig, threads: usize) -> Result<VerifySummary> {
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if cfg.n < 2 {
        return Err(Error::TooFewPoints {
            op: "verify",
            min: 2,
            found: cfg.n,
        });
    }
    let mut checks = cfg.checks.clone();
    checks.sort_unstable();
    checks.dedup();

    let outcomes: Vec<Result<TrialOutcome>> = with_threads(threads, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, &checks, t))
            .collect()
    })?;

    let mut merged: Vec<CheckSummary> = Vec::new();
    let mut ratios = Vec::new();
    let mut r = 0.0;
    for o in outcomes {
        let o = o?;
        for c in o.checks {
            match merged.iter_mut().find(|m| m.check == c.check) {
                Some(m) => m.merge(c),
                None => merged.push(c),
            }
        }
        if let Some((radius, q)) = o.z_over_n {
            r = radius;
            ratios.push(q);
        }
    }
    let isolation = (!ratios.is_empty()).then(|| IsolationSummary {
        r,
        mean_z_over_n: ratios.iter().sum::<f64>() / ratios.len() as f64,
        min_z_over_n: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        max_z_over_n: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    });
    let lower_bound_reference = checks.contains(&CheckKind::LowerBound).then(|| {
        if cfg.n <= EXACT_LOWER_BOUND_MAX_N {
            "exact-dp".to_string()
        } else {
            "nearest-neighbor".to_string()
        }
    });
    Ok(VerifySummary {
        space: cfg.space.tag(),
        n: cfg.n,
        trials: cfg.trials,
        seed: cfg.seed,
        witness: cfg.witness,
        checks: merged,
        isolation,
        lower_bound_reference,
    })
}

#[allow(clippy::too_many_arguments)]
fn heuristic_checks(
    checks: &[CheckKind],
    label: &str,
    gating: bool,
    points: &PointSet,
    tour: &Tour,
    trace: &SelectionTrace,
    cfg: &VerifyConfig,
    trial: usize,
    out: &mut Vec<CheckSummary>,
) -> Result<()> {
    let family = extract_ball_family(trace)?;
    let w = &cfg.witness.witness;
    let decomp = dyadic_partition(&family, cfg.space.diameter(), w)?;
    for &check in checks {
        match check {
            CheckKind::Star => {
                let rep = check_star_property(&family, points);
                let mut s = CheckSummary::new(&format!("star[{label}]"), gating);
                s.add(trial, &rep.violations);
                out.push(s);
            }
            CheckKind::Packing => {
                let rep = check_packing(&decomp, points, w);
                let mut s = CheckSummary::new(&format!("packing[{label}]"), false);
                s.add(trial, &rep.half_radius_overlaps);
                out.push(s);
                let mut s = CheckSummary::new(&format!("packing-class[{label}]"), gating);
                s.add(trial, &rep.class_radius_overlaps);
                out.push(s);
            }
            CheckKind::BoundChain => {
                let rep = bound_chain(&family, tour, &decomp, points)?;
                let mut s = CheckSummary::new(&format!("bound-chain[{label}]"), true);
                let failed: Vec<Value> = if rep.is_clean() {
                    Vec::new()
                } else {
                    rep.to_report("").violations
                };
                s.add(trial, &failed);
                out.push(s);
            }
            CheckKind::Isolation | CheckKind::LowerBound => {}
        }
    }
    Ok(())
}

fn run_trial(cfg: &VerifyConfig, checks: &[CheckKind], trial: usize) -> Result<TrialOutcome> {
    let seed = derive_seed(cfg.seed, cfg.n as u64, trial as u64);
    let points = sample(&cfg.space, cfg.n, seed)?;
    let mut out = Vec::new();

    let (nn, nn_trace) = nearest_neighbor_tour(&points, 0, NnTieRule::LowestIndex)?;
    heuristic_checks(checks, "nn", true, &points, &nn, &nn_trace, cfg, trial, &mut out)?;
    if cfg.include_greedy {
        let (g, g_trace) = greedy_tour(&points, GreedyTieRule::LengthThenLex)?;
        heuristic_checks(checks, "greedy", false, &points, &g, &g_trace, cfg, trial, &mut out)?;
    }

    let wants_iso = checks
        .iter()
        .any(|c| matches!(c, CheckKind::Isolation | CheckKind::LowerBound));
    let mut z_over_n = None;
    if wants_iso {
        let iso = isolation_stats(&points, &cfg.witness.witness)?;
        z_over_n = Some((iso.r, iso.isolated_fraction()));
        if checks.contains(&CheckKind::LowerBound) {
            let reference = if cfg.n <= EXACT_LOWER_BOUND_MAX_N {
                exact_tour_dp(&points)?
            } else {
                nn.clone()
            };
            let rep = verify_lower_bound(&points, &iso, &reference)?;
            let mut s = CheckSummary::new("lower-bound", true);
            let failed: Vec<Value> = if rep.holds {
                Vec::new()
            } else {
                rep.to_report("").violations
            };
            s.add(trial, &failed);
            out.push(s);
        }
    }
    Ok(TrialOutcome { checks: out, z_over_n })
}
