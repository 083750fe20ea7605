//! Subcommand implementations.

use crate::manifest::RunManifest;
use crate::{usage, AnalyzeArgs, CheckKind, CliResult, DiagnoseArgs, RadiiStat, SimulateArgs, StatKind};
use rand::Rng;
use serde_json::json;
use std::fmt::Write as _;
use std::time::Instant;
use tdaboot::{
    coverage_experiment, derive_rng, empirical_stabilization_radius, generate, result_json,
    run_bootstrap, true_mean_estimate, unique_fraction, verify_complex_conditions, BandSelection,
    BettiQuery, BootstrapConfig, BootstrapRun, ComplexKind, CoverageResult, DistributionId,
    PointCloud, PointSampler, StatisticSpec, Window,
};

fn parse_pairs(raw: &str) -> CliResult<Vec<(f64, f64)>> {
    raw.split(',')
        .map(|part| {
            let (r, s) = part
                .split_once(':')
                .ok_or_else(|| usage(format!("pair '{part}' is not of the form r:s")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("'{v}' is not a number in pair '{part}'")))
            };
            Ok((parse(r)?, parse(s)?))
        })
        .collect()
}

fn parse_grid(raw: &str) -> CliResult<Vec<f64>> {
    let bad = || usage(format!("grid '{raw}' is not of the form start:end:count"));
    let mut fields = raw.split(':');
    let (start, end, count) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
        (Some(a), Some(b), Some(c), None) => (a, b, c),
        _ => return Err(bad()),
    };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let end: f64 = end.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count == 0 {
        return Err(usage("grid count must be positive"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (end - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i == count - 1 { end } else { start + step * i as f64 })
        .collect())
}

fn query_from(pairs: &Option<String>, q: usize) -> CliResult<BettiQuery> {
    let raw = pairs
        .as_deref()
        .ok_or_else(|| usage("this statistic needs --pairs"))?;
    Ok(BettiQuery::new(q, parse_pairs(raw)?)?)
}

fn grid_from(grid: &Option<String>) -> CliResult<Vec<f64>> {
    let raw = grid
        .as_deref()
        .ok_or_else(|| usage("this statistic needs --grid"))?;
    parse_grid(raw)
}

fn build_spec(args: &AnalyzeArgs) -> CliResult<StatisticSpec> {
    let spec = match args.stat {
        StatKind::Pbn => StatisticSpec::PersistentBetti {
            complex: args.complex,
            query: query_from(&args.pairs, args.q)?,
            scale_by_n: args.scale_by_n,
        },
        StatKind::Betti => StatisticSpec::BettiCurve {
            complex: args.complex,
            q: args.q,
            grid: grid_from(&args.grid)?,
            scale_by_n: args.scale_by_n,
        },
        StatKind::Euler => StatisticSpec::Euler {
            complex: args.complex,
            q: args.q,
            grid: grid_from(&args.grid)?,
            scale_by_n: args.scale_by_n,
        },
        StatKind::TruncEuler => StatisticSpec::TruncatedEuler {
            complex: args.complex,
            q: args.q,
            grid: grid_from(&args.grid)?,
            scale_by_n: args.scale_by_n,
        },
        StatKind::BoundedPbn => StatisticSpec::BoundedBetti {
            complex: args.complex,
            query: query_from(&args.pairs, args.q)?,
            bound: args
                .bound
                .ok_or_else(|| usage("bounded-pbn needs --bound"))?,
            scale_by_n: args.scale_by_n,
        },
        StatKind::Knn => StatisticSpec::KnnLength {
            k: args.k,
            directed: args.directed,
            scale_by_n: args.scale_by_n,
        },
    };
    Ok(spec)
}

/// Grid radii the statistic was evaluated on, when it has any.
fn spec_grid(spec: &StatisticSpec) -> Option<&[f64]> {
    match spec {
        StatisticSpec::BettiCurve { grid, .. }
        | StatisticSpec::Euler { grid, .. }
        | StatisticSpec::TruncatedEuler { grid, .. } => Some(grid),
        _ => None,
    }
}

fn curve_csv(grid: &[f64], run: &BootstrapRun) -> String {
    let pw = run.pointwise.as_ref().expect("both bands requested");
    let sim = run.simultaneous.as_ref().expect("both bands requested");
    let mut out = String::from("r,estimate,pw_lo,pw_hi,sim_lo,sim_hi\n");
    for (j, r) in grid.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r,
            run.distribution.point_estimate()[j],
            pw.lower()[j],
            pw.upper()[j],
            sim.lower()[j],
            sim.upper()[j],
        )
        .expect("string write");
    }
    out
}

pub fn analyze(args: &AnalyzeArgs) -> CliResult<()> {
    let started = Instant::now();
    let spec = build_spec(args)?;
    let text = std::fs::read_to_string(&args.input).map_err(|e| {
        std::io::Error::new(e.kind(), format!("{}: {e}", args.input.display()))
    })?;
    let cloud = PointCloud::parse_csv(&text)?;
    let config = BootstrapConfig {
        replicates: args.replicates,
        resample_size: None,
        method: args.method,
        bandwidth: args.bandwidth,
        level: args.level,
        band: BandSelection::Both,
        percentile: args.percentile,
        seed: args.seed,
    };
    let run = run_bootstrap(&cloud, &spec, &config)?;

    std::fs::create_dir_all(&args.out_dir)?;
    let result = result_json(&spec, &config, &run);
    let result_text = serde_json::to_string_pretty(&result).expect("result serializes");
    std::fs::write(args.out_dir.join("result.json"), result_text + "\n")?;
    let mut outputs = vec!["result.json".to_string()];
    if let Some(grid) = spec_grid(&spec) {
        std::fs::write(args.out_dir.join("curve.csv"), curve_csv(grid, &run))?;
        outputs.push("curve.csv".to_string());
    }

    let mut manifest = RunManifest::new(
        "analyze",
        json!({
            "input": args.input.display().to_string(),
            "complex": args.complex.to_string(),
            "stat": args.stat.flag_name(),
            "q": args.q,
            "pairs": args.pairs,
            "grid": args.grid,
            "bound": args.bound,
            "k": args.k,
            "directed": args.directed,
            "scale_by_n": args.scale_by_n,
            "level": args.level,
            "replicates": args.replicates,
            "bandwidth": args.bandwidth.to_string(),
            "method": args.method.to_string(),
            "percentile": args.percentile,
        }),
        args.seed,
    );
    manifest.outputs = outputs;
    manifest.write(&args.out_dir, started)?;
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let started = Instant::now();
    let spec = StatisticSpec::PersistentBetti {
        complex: args.complex,
        query: BettiQuery::new(args.q, parse_pairs(&args.pairs)?)?,
        scale_by_n: true,
    };
    let config = BootstrapConfig {
        replicates: args.boot,
        resample_size: None,
        method: args.method,
        bandwidth: args.bandwidth,
        level: args.level,
        band: BandSelection::Pointwise,
        percentile: args.percentile,
        seed: args.seed,
    };
    let truth = true_mean_estimate(args.dist, args.n, &spec, args.truth_n, args.seed)?;
    let result = coverage_experiment(args.dist, &spec, args.n, args.reps as usize, &config, &truth)?;

    std::fs::create_dir_all(&args.out_dir)?;
    let csv = format!("{}\n{}\n", CoverageResult::CSV_HEADER, result.csv_row());
    std::fs::write(args.out_dir.join("coverage.csv"), csv)?;

    let mut manifest = RunManifest::new(
        "simulate",
        json!({
            "dist": args.dist,
            "q": args.q,
            "pairs": args.pairs,
            "n": args.n,
            "reps": args.reps,
            "boot": args.boot,
            "level": args.level,
            "complex": args.complex.to_string(),
            "bandwidth": args.bandwidth.to_string(),
            "method": args.method.to_string(),
            "percentile": args.percentile,
            "truth_n": args.truth_n,
            "truth_mean": truth.mean,
            "truth_standard_error": truth.standard_error,
        }),
        args.seed,
    );
    manifest.outputs = vec!["coverage.csv".to_string()];
    manifest.write(&args.out_dir, started)?;
    Ok(())
}

fn diagnose_radii(args: &DiagnoseArgs) -> CliResult<serde_json::Value> {
    let (spec, limit) = match args.stat {
        RadiiStat::BoundedPbn => {
            if !(args.bound.is_finite() && args.bound > 0.0) {
                return Err(usage("the radii check needs a positive --bound"));
            }
            let spec = StatisticSpec::BoundedBetti {
                complex: ComplexKind::VietorisRips,
                query: BettiQuery::new(args.q, vec![(0.3, 0.45)])?,
                bound: args.bound,
                scale_by_n: false,
            };
            (spec, 2.0 * args.bound)
        }
        RadiiStat::TruncEuler => {
            let grid = vec![0.2, 0.4];
            let limit = 2.0 * grid[grid.len() - 1];
            let spec = StatisticSpec::TruncatedEuler {
                complex: ComplexKind::VietorisRips,
                q: args.q,
                grid,
                scale_by_n: false,
            };
            (spec, limit)
        }
    };
    if args.trials == 0 {
        return Err(usage("the radii check needs at least one trial"));
    }
    // Radii are read off a grid straddling the limit, so a violation of
    // the locality lemma lands strictly above it.
    let l_grid = [0.5 * limit, limit, 1.5 * limit, (3.0 * limit).max(5.0)];
    let window = Window::new(vec![0.0, 0.0], vec![3.0, 3.0])?;
    let inner = Window::new(vec![1.0, 1.0], vec![2.0, 2.0])?;
    let mut max_radius: f64 = 0.0;
    for t in 0..args.trials {
        let mut rng = derive_rng(args.seed, &[t as u64]);
        let cloud = window.sample(args.n, &mut rng)?;
        let center = inner.sample(1, &mut rng)?;
        let rho = empirical_stabilization_radius(&spec, &cloud, center.point(0), &l_grid)?;
        max_radius = max_radius.max(rho);
    }
    Ok(json!({
        "check": "radii",
        "stat": match args.stat {
            RadiiStat::BoundedPbn => "bounded-pbn",
            RadiiStat::TruncEuler => "trunc-euler",
        },
        "trials": args.trials,
        "limit": limit,
        "max_radius": max_radius,
        "all_within_limit": max_radius <= limit,
    }))
}

fn diagnose_conditions(args: &DiagnoseArgs) -> CliResult<serde_json::Value> {
    let clouds: Vec<PointCloud> = (0..6u64)
        .map(|i| generate(DistributionId::F3, args.n.max(4), &mut derive_rng(args.seed, &[i])))
        .collect::<tdaboot::Result<_>>()?;
    let report = verify_complex_conditions(&args.complex, &clouds, &[0.3, 0.7, 1.1])?;
    Ok(json!({
        "check": "conditions",
        "complex": args.complex.to_string(),
        "report": report,
        "all_passed": report.all_passed(),
    }))
}

fn diagnose_unique_fraction(args: &DiagnoseArgs) -> CliResult<serde_json::Value> {
    if args.n < 2 || args.resamples == 0 {
        return Err(usage("the unique-fraction check needs --n >= 2 and --resamples >= 1"));
    }
    let base = generate(DistributionId::F3, args.n, &mut derive_rng(args.seed, &[]))?;
    let mut total = 0.0;
    for i in 0..args.resamples {
        let mut rng = derive_rng(args.seed, &[1, i as u64]);
        let indices: Vec<usize> = (0..args.n).map(|_| rng.random_range(0..args.n)).collect();
        total += unique_fraction(&base.select(&indices), &base);
    }
    let n = args.n as f64;
    Ok(json!({
        "check": "unique-fraction",
        "n": args.n,
        "resamples": args.resamples,
        "mean_unique_fraction": total / args.resamples as f64,
        "expected": 1.0 - (1.0 - 1.0 / n).powf(n),
    }))
}

pub fn diagnose(args: &DiagnoseArgs) -> CliResult<()> {
    let report = match args.check {
        CheckKind::Radii => diagnose_radii(args)?,
        CheckKind::Conditions => diagnose_conditions(args)?,
        CheckKind::UniqueFraction => diagnose_unique_fraction(args)?,
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}
