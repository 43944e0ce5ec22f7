use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use regtsp::adversarial::{adversarial_search, ratio_profile, AdversarialConfig, AdversarialRecord};
use regtsp::analysis::{
    bound_chain, check_packing, check_star_property, dyadic_partition, extract_ball_family,
    CheckKind, Report,
};
use regtsp::experiment::{
    derive_seed, resolve_witness, run_scaling, run_verify, with_threads, write_records_csv,
    write_timings_csv, ExperimentConfig, RegularityMode, RegularityPolicy, VerifyConfig,
    RECORD_HEADER,
};
use regtsp::solvers::{nearest_neighbor_all_starts, SelectionTrace, SolverTag, Tour, TourRecord};
use regtsp::spaces::{
    csv_column_count, make_space, sample as sample_points, similarity_dimension, IfsParams,
    ParamKind, PointSet, Ratios, SpaceParams, SpaceSpec,
};
use regtsp::stats::median;
use serde::Serialize;

use crate::args::{
    AdversarialArgs, Cli, Format, RegularityArg, RegularityArgs, SampleArgs, ScalingArgs,
    SolveArgs, SpaceArgs, VerifyArgs,
};
use crate::{code, CliError};

type CliResult<T = ()> = Result<T, CliError>;

/// Seed used for the regularity estimate, kept apart from the trial seeds.
fn witness_seed(master: u64) -> u64 {
    derive_seed(master, 0, u64::MAX)
}

fn build_space(args: &SpaceArgs, inferred_dim: Option<usize>) -> CliResult<Arc<SpaceSpec>> {
    let params = match &args.space_config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            SpaceParams::from_toml(&text).map_err(CliError::config)?
        }
        None => {
            let mut p = SpaceParams::new(args.space);
            p.metric = args.metric.into();
            p.depth = args.depth;
            p.dim = match args.space {
                ParamKind::Cube | ParamKind::Torus => args.dim.or(inferred_dim),
                _ => args.dim,
            };
            if args.ratio.is_some() || !args.translations.is_empty() {
                let ratio = args.ratio.ok_or_else(|| {
                    CliError::new(code::CONFIG, "--translation needs --ratio")
                })?;
                p.ifs = Some(IfsParams {
                    ratio: Ratios::Shared(ratio),
                    translations: args.translations.clone(),
                });
            }
            p
        }
    };
    Ok(Arc::new(make_space(&params).map_err(CliError::config)?))
}

fn policy(args: &RegularityArgs) -> RegularityPolicy {
    RegularityPolicy {
        mode: match args.regularity {
            RegularityArg::Auto => RegularityMode::Auto,
            RegularityArg::Estimate => RegularityMode::Estimate,
        },
        c_lower: args.c_lower,
        d_upper: args.d_upper,
        ..RegularityPolicy::default()
    }
}

/// Writes `bytes` to `path`, or stdout when there is none.
fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::new(code::OTHER, format!("json: {e}")))?;
    text.push('\n');
    Ok(text.into_bytes())
}

#[derive(Serialize)]
struct SampleJson<'a> {
    space: String,
    params: SpaceParams,
    seed: u64,
    diameter: f64,
    dimension: f64,
    points: Vec<&'a [f64]>,
}

pub fn sample(cli: &Cli, args: &SampleArgs) -> CliResult {
    let spec = build_space(&args.space, None)?;
    let seed = cli.seed.unwrap_or(0);
    let points = sample_points(&spec, args.n, seed)?;
    let dimension = similarity_dimension(&spec);
    let bytes = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            points.write_csv(&mut buf)?;
            buf
        }
        Format::Json => json_bytes(&SampleJson {
            space: spec.tag(),
            params: spec.to_params(),
            seed,
            diameter: spec.diameter(),
            dimension,
            points: points.iter().collect(),
        })?,
    };
    emit(cli.out.as_deref(), &bytes)?;
    eprintln!(
        "space={} n={} diameter={} dimension={}",
        spec.tag(),
        points.len(),
        spec.diameter(),
        dimension
    );
    Ok(())
}

#[derive(Serialize)]
struct StartSweep {
    starts: usize,
    min: f64,
    median: f64,
    max: f64,
    argmin: usize,
    argmax: usize,
}

#[derive(Serialize)]
struct SolveJson {
    #[serde(flatten)]
    tour: TourRecord,
    space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<StartSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reports: Option<Vec<Report>>,
}

fn sweep_starts(points: &PointSet) -> CliResult<StartSweep> {
    let tours = nearest_neighbor_all_starts(points)?;
    let lengths: Vec<f64> = tours.iter().map(Tour::length).collect();
    let mut argmin = 0;
    let mut argmax = 0;
    for (i, &l) in lengths.iter().enumerate() {
        if l < lengths[argmin] {
            argmin = i;
        }
        if l > lengths[argmax] {
            argmax = i;
        }
    }
    Ok(StartSweep {
        starts: lengths.len(),
        min: lengths[argmin],
        median: median(&lengths).expect("at least one start"),
        max: lengths[argmax],
        argmin,
        argmax,
    })
}

/// Runs the trace checks and returns the reports plus whether a guaranteed
/// invariant failed. Only the bound chain gates greedy traces; literal
/// half-radius packing is informational for both heuristics.
fn trace_reports(
    points: &PointSet,
    tour: &Tour,
    trace: &SelectionTrace,
    policy: &RegularityPolicy,
    seed: u64,
) -> CliResult<(Vec<Report>, bool)> {
    let witness = resolve_witness(points.space_arc(), policy, witness_seed(seed))?.witness;
    let family = extract_ball_family(trace)?;
    let decomp = dyadic_partition(&family, points.space().diameter(), &witness)?;
    let id = format!("{}:n={}", points.space().tag(), points.len());

    let star = check_star_property(&family, points);
    let packing = check_packing(&decomp, points, &witness);
    let chain = bound_chain(&family, tour, &decomp, points)?;
    let nn = trace.source == SolverTag::NearestNeighbor;
    let failed = (nn && (!star.is_clean() || !packing.class_radius_overlaps.is_empty()))
        || !chain.is_clean();
    let reports = vec![
        star.to_report(&id),
        packing.to_report(&id),
        chain.to_report(&id),
    ];
    Ok((reports, failed))
}

pub fn solve(cli: &Cli, args: &SolveArgs) -> CliResult {
    let seed = cli.seed.unwrap_or(0);
    let (points, record_seed) = match &args.input {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let spec = build_space(&args.space, csv_column_count(&text))?;
            let ps = PointSet::read_csv(spec, text.as_bytes()).map_err(CliError::input)?;
            (ps, None)
        }
        None => {
            let spec = build_space(&args.space, None)?;
            let n = args.n.expect("clap requires --n without --input");
            (sample_points(&spec, n, seed)?, Some(seed))
        }
    };
    let (tour, trace) = regtsp::experiment::solve(&points, args.solver, args.start)?;
    let sweep = args.sweep_starts.then(|| sweep_starts(&points)).transpose()?;
    let mut failed = false;
    let reports = match (&trace, args.verify) {
        (Some(tr), true) => {
            let (r, f) = trace_reports(&points, &tour, tr, &policy(&args.regularity), seed)?;
            failed = f;
            Some(r)
        }
        (None, true) => Some(Vec::new()),
        _ => None,
    };
    let out = SolveJson {
        tour: tour.record(record_seed),
        space: points.space().tag(),
        sweep,
        reports,
    };
    let bytes = match cli.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&out)?,
        Format::Csv => {
            let order: Vec<String> = tour.order().iter().map(usize::to_string).collect();
            format!(
                "solver,n,seed,length,order\n{},{},{},{},{}\n",
                out.tour.solver,
                out.tour.n,
                record_seed.map(|s| s.to_string()).unwrap_or_default(),
                regtsp::spaces::format_f64(tour.length()),
                order.join(" ")
            )
            .into_bytes()
        }
    };
    emit(cli.out.as_deref(), &bytes)?;
    if failed {
        return Err(CliError::new(
            code::VIOLATION,
            "a guaranteed invariant was violated; see the embedded reports",
        ));
    }
    Ok(())
}

pub fn verify(cli: &Cli, args: &VerifyArgs) -> CliResult {
    let spec = build_space(&args.space, None)?;
    let seed = cli.seed.unwrap_or(0);
    let checks = if args.checks.is_empty() {
        CheckKind::ALL.to_vec()
    } else {
        args.checks.clone()
    };
    let witness = resolve_witness(&spec, &policy(&args.regularity), witness_seed(seed))?;
    let cfg = VerifyConfig {
        space: spec,
        n: args.n,
        trials: args.trials,
        checks,
        seed,
        witness,
        include_greedy: !args.no_greedy,
    };
    let summary = run_verify(&cfg, cli.threads)?;
    let bytes = match cli.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&summary)?,
        Format::Csv => {
            let mut s = String::from("check,gating,instances,violating_instances,violations\n");
            for c in &summary.checks {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    c.check, c.gating, c.instances, c.violating_instances, c.violations
                ));
            }
            s.into_bytes()
        }
    };
    emit(cli.out.as_deref(), &bytes)?;
    for c in &summary.checks {
        eprintln!(
            "{:<22} {:>5}/{:<5} instances violating ({} violations){}",
            c.check,
            c.violating_instances,
            c.instances,
            c.violations,
            if c.gating { "" } else { " [report only]" }
        );
    }
    if let Some(iso) = &summary.isolation {
        eprintln!(
            "mean z/n = {:.4} (min {:.4}, max {:.4}, r = {:.6})",
            iso.mean_z_over_n, iso.min_z_over_n, iso.max_z_over_n, iso.r
        );
    }
    let gating = summary.gating_violations();
    if gating > 0 {
        return Err(CliError::new(
            code::VIOLATION,
            format!("{gating} violations of guaranteed invariants"),
        ));
    }
    Ok(())
}

pub fn scaling(cli: &Cli, args: &ScalingArgs) -> CliResult {
    let text = fs::read_to_string(&args.config)?;
    let mut cfg = ExperimentConfig::from_toml(&text).map_err(|e| match e {
        regtsp::Error::Parse(_) => CliError::new(code::CONFIG, e.to_string()),
        other => other.into(),
    })?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    let csv_path = cli
        .out
        .clone()
        .or_else(|| cfg.output.csv.clone())
        .ok_or_else(|| CliError::new(code::CONFIG, "no records path: set output.csv or --out"))?;
    let summary_path = args.summary.clone().or_else(|| cfg.output.json.clone());

    let outcome = run_scaling(&cfg, cli.threads)?;

    let existing = fs::metadata(&csv_path).map(|m| m.len() > 0).unwrap_or(false);
    if args.append && existing {
        let head = fs::read_to_string(&csv_path)?;
        let first = head.lines().next().unwrap_or("");
        if first != RECORD_HEADER.join(",") {
            return Err(CliError::new(
                code::CONFIG,
                format!("{} has a different header; refusing to append", csv_path.display()),
            ));
        }
        let f = OpenOptions::new().append(true).open(&csv_path)?;
        write_records_csv(BufWriter::new(f), &outcome.records, false)?;
    } else {
        write_records_csv(BufWriter::new(File::create(&csv_path)?), &outcome.records, true)?;
    }
    if let Some(path) = &args.timings {
        write_timings_csv(BufWriter::new(File::create(path)?), &outcome.records)?;
    }
    emit(summary_path.as_deref(), &json_bytes(&outcome.summary)?)?;
    for f in &outcome.summary.fits {
        match (f.slope, f.stderr) {
            (Some(s), Some(se)) => eprintln!(
                "{}: slope {:.4} ± {:.4} (expected {:.4}), {} records",
                f.solver, s, se, f.expected, f.records
            ),
            _ => eprintln!(
                "{}: no fit ({})",
                f.solver,
                f.error.as_deref().unwrap_or("no records")
            ),
        }
    }
    let failed = outcome.records.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} records carry an error tag");
    }
    Ok(())
}

#[derive(Serialize)]
struct Baseline {
    trials: usize,
    median_ratio_nn: f64,
    median_ratio_greedy: f64,
    median_opt_scale: f64,
}

#[derive(Serialize)]
struct AdversarialJson {
    #[serde(flatten)]
    record: AdversarialRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<Baseline>,
}

pub fn adversarial(cli: &Cli, args: &AdversarialArgs) -> CliResult {
    let spec = build_space(&args.space, None)?;
    let seed = cli.seed.unwrap_or(0);
    let mut config = AdversarialConfig::new(args.n, args.iterations, seed);
    config.restarts = args.restarts;
    let result = with_threads(cli.threads, || adversarial_search(&spec, &config))??;
    let (baseline, random) = if args.baseline > 0 {
        let recs = with_threads(cli.threads, || {
            ratio_profile(&spec, &[args.n], args.baseline, seed ^ 0x5EED)
        })??;
        let col = |f: fn(&regtsp::adversarial::RatioRecord) -> f64| -> CliResult<f64> {
            median(&recs.iter().map(f).collect::<Vec<_>>())
                .ok_or_else(|| CliError::new(code::OTHER, "empty baseline"))
        };
        let b = Baseline {
            trials: recs.len(),
            median_ratio_nn: col(|r| r.ratio_nn)?,
            median_ratio_greedy: col(|r| r.ratio_greedy)?,
            median_opt_scale: col(|r| r.opt_scale)?,
        };
        (Some(b), recs)
    } else {
        (None, Vec::new())
    };
    let record = result.record(&config);
    let bytes = match cli.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&AdversarialJson {
            record: record.clone(),
            baseline,
        })?,
        Format::Csv => {
            use regtsp::spaces::format_f64 as f;
            let mut s = String::from("source,n,ratio_nn,ratio_greedy,opt_scale\n");
            s.push_str(&format!(
                "adversarial,{},{},{},{}\n",
                record.n,
                f(record.ratio_nn),
                f(record.ratio_greedy),
                f(record.opt_vs_random_scale)
            ));
            for r in &random {
                s.push_str(&format!(
                    "random,{},{},{},{}\n",
                    r.n,
                    f(r.ratio_nn),
                    f(r.ratio_greedy),
                    f(r.opt_scale)
                ));
            }
            s.into_bytes()
        }
    };
    emit(cli.out.as_deref(), &bytes)?;
    eprintln!(
        "ratio_nn {:.4} (initial {:.4}), ratio_greedy {:.4}, opt_vs_random_scale {:.4}",
        record.ratio_nn, record.initial_ratio_nn, record.ratio_greedy, record.opt_vs_random_scale
    );
    Ok(())
}
