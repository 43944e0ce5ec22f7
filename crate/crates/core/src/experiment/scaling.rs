use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, resolve_witness, solve, with_threads, ExperimentConfig, ResolvedWitness};
use crate::analysis::{
    bound_chain, check_packing, check_star_property, dyadic_partition, extract_ball_family,
    fit_exponent, isolation_stats, verify_lower_bound, CheckKind, IsolationStats,
};
use crate::error::Result;
use crate::solvers::{SelectionTrace, SolverTag, Tour};
use crate::spaces::{format_f64, make_space, sample, similarity_dimension, PointSet, RegularityWitness};

/// Column order of the records CSV.
pub const RECORD_HEADER: [&str; 12] = [
    "space",
    "d",
    "solver",
    "n",
    "seed",
    "trial",
    "length",
    "z",
    "r",
    "lower_bound",
    "checks",
    "error",
];

/// One solver run on one sampled instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub space: String,
    pub d: f64,
    pub solver: SolverTag,
    pub n: usize,
    pub seed: u64,
    pub trial: usize,
    pub length: Option<f64>,
    pub z: usize,
    pub r: f64,
    pub lower_bound: f64,
    /// `name=pass|fail` pairs joined by `;`, in check order.
    pub checks: String,
    pub error: Option<String>,
    /// Solver wall time. Not part of the CSV, which must be reproducible.
    #[serde(skip)]
    pub wall_ms: f64,
}

impl ExperimentRecord {
    fn csv_row(&self) -> [String; 12] {
        [
            self.space.clone(),
            format_f64(self.d),
            self.solver.to_string(),
            self.n.to_string(),
            self.seed.to_string(),
            self.trial.to_string(),
            self.length.map(format_f64).unwrap_or_default(),
            self.z.to_string(),
            format_f64(self.r),
            format_f64(self.lower_bound),
            self.checks.clone(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub solver: SolverTag,
    pub records: usize,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub stderr: Option<f64>,
    pub expected: f64,
    /// Mean of `length / n^(1 - 1/d)` over the fitted records.
    pub empirical_constant: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub space: String,
    pub d: f64,
    pub expected_exponent: f64,
    pub witness: ResolvedWitness,
    pub n_grid: Vec<usize>,
    pub trials_per_n: usize,
    pub master_seed: u64,
    pub fits: Vec<FitSummary>,
}

#[derive(Debug, Clone)]
pub struct ScalingOutcome {
    pub records: Vec<ExperimentRecord>,
    pub summary: ScalingSummary,
}

/// Runs every `(n, trial)` cell of the grid on `threads` workers
/// (0 = all cores). Records come back in grid order whatever the schedule.
pub fn run_scaling(cfg: &ExperimentConfig, threads: usize) -> Result<ScalingOutcome> {
    cfg.validate()?;
    let spec = Arc::new(make_space(&cfg.space)?);
    let d = similarity_dimension(&spec);
    let resolved = resolve_witness(&spec, &cfg.regularity, derive_seed(cfg.master_seed, 0, u64::MAX))?;
    let cells: Vec<(usize, usize)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| (0..cfg.trials_per_n).map(move |t| (n, t)))
        .collect();

    let per_cell: Vec<Result<Vec<ExperimentRecord>>> = with_threads(threads, || {
        cells
            .par_iter()
            .map(|&(n, trial)| run_cell(cfg, &spec, &resolved.witness, n, trial))
            .collect()
    })?;
    let mut records = Vec::with_capacity(cells.len() * cfg.solvers.len());
    for cell in per_cell {
        records.extend(cell?);
    }

    let expected = 1.0 - 1.0 / d;
    let fits = cfg
        .solvers
        .iter()
        .map(|&solver| fit_solver(&records, solver, expected))
        .collect();
    let summary = ScalingSummary {
        space: spec.tag(),
        d,
        expected_exponent: expected,
        witness: resolved,
        n_grid: cfg.n_grid.clone(),
        trials_per_n: cfg.trials_per_n,
        master_seed: cfg.master_seed,
        fits,
    };
    Ok(ScalingOutcome { records, summary })
}

fn run_cell(
    cfg: &ExperimentConfig,
    spec: &Arc<crate::spaces::SpaceSpec>,
    witness: &RegularityWitness,
    n: usize,
    trial: usize,
) -> Result<Vec<ExperimentRecord>> {
    let seed = derive_seed(cfg.master_seed, n as u64, trial as u64);
    let points = sample(spec, n, seed)?;
    let iso = isolation_stats(&points, witness)?;
    let space = spec.tag();
    let d = witness.d;
    Ok(cfg
        .solvers
        .iter()
        .map(|&solver| {
            let started = Instant::now();
            let solved = solve(&points, solver, cfg.nn_start);
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            let (length, checks, error) = match solved {
                Ok((tour, trace)) => {
                    let checks = run_checks(&cfg.checks, &points, &tour, trace.as_ref(), &iso, witness);
                    match checks {
                        Ok(c) => (Some(tour.length()), c, None),
                        Err(e) => (Some(tour.length()), String::new(), Some(e.tag().to_string())),
                    }
                }
                Err(e) => (None, String::new(), Some(e.tag().to_string())),
            };
            ExperimentRecord {
                space: space.clone(),
                d,
                solver,
                n,
                seed,
                trial,
                length,
                z: iso.z,
                r: iso.r,
                lower_bound: iso.lower_bound,
                checks,
                error,
                wall_ms,
            }
        })
        .collect())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn run_checks(
    checks: &[CheckKind],
    points: &PointSet,
    tour: &Tour,
    trace: Option<&SelectionTrace>,
    iso: &IsolationStats,
    witness: &RegularityWitness,
) -> Result<String> {
    let mut out: Vec<String> = Vec::new();
    let mut sorted = checks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let family = trace.map(extract_ball_family).transpose()?;
    let needs_decomp = sorted
        .iter()
        .any(|c| matches!(c, CheckKind::Packing | CheckKind::BoundChain));
    let decomp = match (&family, needs_decomp) {
        (Some(f), true) => Some(dyadic_partition(f, points.space().diameter(), witness)?),
        _ => None,
    };
    for check in sorted {
        match check {
            CheckKind::Star => {
                if let Some(f) = &family {
                    out.push(format!("star={}", verdict(check_star_property(f, points).is_clean())));
                }
            }
            CheckKind::Packing => {
                if let Some(dec) = &decomp {
                    let rep = check_packing(dec, points, witness);
                    out.push(format!("packing={}", verdict(rep.is_clean())));
                    out.push(format!(
                        "packing-class={}",
                        verdict(rep.class_radius_overlaps.is_empty())
                    ));
                }
            }
            CheckKind::BoundChain => {
                if let (Some(f), Some(dec)) = (&family, &decomp) {
                    let rep = bound_chain(f, tour, dec, points)?;
                    out.push(format!("bound-chain={}", verdict(rep.is_clean())));
                }
            }
            // The statistics themselves are in the z, r and lower_bound columns.
            CheckKind::Isolation => {}
            CheckKind::LowerBound => {
                let rep = verify_lower_bound(points, iso, tour)?;
                out.push(format!("lower-bound={}", verdict(rep.holds)));
            }
        }
    }
    Ok(out.join(";"))
}

fn fit_solver(records: &[ExperimentRecord], solver: SolverTag, expected: f64) -> FitSummary {
    let pts: Vec<(usize, f64)> = records
        .iter()
        .filter(|r| r.solver == solver)
        .filter_map(|r| r.length.map(|l| (r.n, l)))
        .collect();
    let mut summary = FitSummary {
        solver,
        records: pts.len(),
        slope: None,
        intercept: None,
        stderr: None,
        expected,
        empirical_constant: None,
        error: None,
    };
    if !pts.is_empty() {
        let c: f64 = pts
            .iter()
            .map(|&(n, l)| l / (n as f64).powf(expected))
            .sum::<f64>()
            / pts.len() as f64;
        summary.empirical_constant = Some(c);
    }
    match fit_exponent(&pts) {
        Ok(f) => {
            summary.slope = Some(f.slope);
            summary.intercept = Some(f.intercept);
            summary.stderr = Some(f.stderr);
        }
        Err(e) => summary.error = Some(e.to_string()),
    }
    summary
}

/// Writes records as CSV. With `header` false only rows are written, for
/// appending to an existing file.
pub fn write_records_csv<W: Write>(out: W, records: &[ExperimentRecord], header: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if header {
        w.write_record(RECORD_HEADER)?;
    }
    for r in records {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

/// Per-record wall times, kept apart from the reproducible records file.
pub fn write_timings_csv<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["solver", "n", "trial", "wall_ms"])?;
    for r in records {
        w.write_record([
            r.solver.to_string(),
            r.n.to_string(),
            r.trial.to_string(),
            format!("{:.3}", r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}
