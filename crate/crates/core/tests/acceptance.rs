//! Release gate: one verdict line per criterion, printed straight to
//! stdout so it survives libtest capture. Tolerances and budgets are
//! pinned here, not configurable.
//!
//! The exhaustive cycle oracle in criterion 4 is deliberately written
//! from scratch against the simplex lists; it must not reuse the clique
//! construction it is checking.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};
use tdaboot::gf2::{kernel_basis, BitVec, Echelon};
use tdaboot::{
    bounded_cycle_space, bounded_geometric_lemma_check, build_cech, build_vr, compute_diagram,
    derive_rng, derive_seed, empirical_stabilization_radius, euler_characteristic, evaluate,
    generate, geometric_lemma_check, persistent_betti, persistent_betti_direct,
    smoothed_bootstrap, standard_bootstrap, true_mean_estimate, unique_fraction, w2_empirical,
    BettiQuery, BootstrapConfig, BootstrapDistribution, ComplexKind, CoverageResult,
    DistributionId, FilteredComplex, KernelDensityEstimate, PointCloud, QuadratureGrid,
    StatisticSpec, Window,
};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

const CORPUS_SEED: u64 = 0x0ACC_E501;

fn verdict(criterion: u32, pass: bool, detail: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "ACCEPTANCE {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    )
    .unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {criterion}: {detail}");
}

fn uniform_cloud(n: usize, d: usize, lo: f64, hi: f64, path: &[u64]) -> PointCloud {
    let mut rng = derive_rng(CORPUS_SEED, path);
    let coords = (0..n * d).map(|_| rng.random_range(lo..hi)).collect();
    PointCloud::new(d, coords).unwrap()
}

/// 300 clouds of 1..=8 points alternating between the plane and space.
fn oracle_corpus() -> Vec<PointCloud> {
    (0..300u64)
        .map(|i| {
            let d = if i % 2 == 0 { 2 } else { 3 };
            let n = 1 + (i as usize % 8);
            uniform_cloud(n, d, -1.0, 1.0, &[1, i])
        })
        .collect()
}

fn corpus_complex(i: usize, cloud: &PointCloud, r_max: f64, q_max: usize) -> FilteredComplex {
    if i % 2 == 0 {
        build_vr(cloud, r_max, q_max).unwrap()
    } else {
        build_cech(cloud, r_max, q_max).unwrap()
    }
}

const RADIUS_GRID: [f64; 5] = [0.15, 0.4, 0.65, 0.9, 1.15];

#[test]
fn criterion_01_diagram_route_matches_rank_oracle() {
    let start = Instant::now();
    let mut checks = 0u64;
    let mut mismatches = 0u64;
    for (i, cloud) in oracle_corpus().iter().enumerate() {
        let complex = corpus_complex(i, cloud, RADIUS_GRID[4] + 1e-9, 2);
        let diagram = compute_diagram(&complex).unwrap();
        for &a in &RADIUS_GRID {
            for &b in &RADIUS_GRID {
                let (r, s) = if a <= b { (a, b) } else { (b, a) };
                for q in 0..=2usize {
                    let fast = persistent_betti(&diagram, q, r, s).unwrap();
                    let slow = persistent_betti_direct(&complex, q, r, s).unwrap();
                    checks += 1;
                    if fast != slow {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches == 0 && elapsed < Duration::from_secs(60);
    verdict(
        1,
        pass,
        &format!("{mismatches} mismatches in {checks} checks over 300 clouds, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_euler_poincare_identity() {
    let mut checks = 0u64;
    let mut mismatches = 0u64;
    for (i, cloud) in oracle_corpus().iter().enumerate() {
        let n = cloud.len();
        // Full-dimensional build so every Betti number is available.
        let complex = corpus_complex(i, cloud, 3.5, n);
        let diagram = compute_diagram(&complex).unwrap();
        for &r in &RADIUS_GRID {
            let chi = euler_characteristic(&complex, r).unwrap();
            let mut alternating = 0i64;
            for q in 0..n {
                let beta = persistent_betti(&diagram, q, r, r).unwrap() as i64;
                alternating += if q % 2 == 0 { beta } else { -beta };
            }
            checks += 1;
            if chi != alternating {
                mismatches += 1;
            }
        }
    }
    verdict(
        2,
        mismatches == 0,
        &format!("{mismatches} mismatches in {checks} Euler checks"),
    );
}

#[test]
fn criterion_03_perturbation_bounds_hold() {
    let mut plain_violations = 0u32;
    let mut bounded_violations = 0u32;
    for i in 0..100u64 {
        let mut rng = derive_rng(CORPUS_SEED, &[3, i]);
        let d = if i % 2 == 0 { 2 } else { 3 };
        let n = rng.random_range(4..=8usize);
        let large_cloud = uniform_cloud(n, d, -1.0, 1.0, &[3, i, 1]);
        let keep = rng.random_range(2..n);
        let prefix: Vec<usize> = (0..keep).collect();
        let small_cloud = large_cloud.select(&prefix);
        let small = build_vr(&small_cloud, 1.2, 2).unwrap();
        let large = build_vr(&large_cloud, 1.2, 2).unwrap();
        let r = rng.random_range(0.0..1.0);
        let s = rng.random_range(r..1.15);
        let bound = rng.random_range(0.2..2.0);
        for q in 0..=1usize {
            if !geometric_lemma_check(&small, &large, q, r, s).unwrap().pass {
                plain_violations += 1;
            }
            if !bounded_geometric_lemma_check(&small, &large, q, bound, r, s)
                .unwrap()
                .pass
            {
                bounded_violations += 1;
            }
        }
    }
    verdict(
        3,
        plain_violations == 0 && bounded_violations == 0,
        &format!(
            "{plain_violations} plain and {bounded_violations} bounded violations over 100 nested pairs each"
        ),
    );
}

/// Spanning dimension of the cycles of diameter <= bound, found by brute
/// force: every GF(2) combination of a kernel basis of the boundary map.
fn exhaustive_bounded_cycle_dim(
    complex: &FilteredComplex,
    cloud: &PointCloud,
    q: usize,
    bound: f64,
    r: f64,
) -> usize {
    let simplices = complex.simplices();
    let level: Vec<usize> = complex.level_indices(q, r);
    let ncols = level.len();
    if ncols == 0 {
        return 0;
    }
    let n = cloud.len();
    assert!(n <= 16, "oracle relies on small vertex masks");
    let mut pair_dist = vec![0.0f64; n * n];
    for a in 0..n {
        for b in 0..n {
            pair_dist[a * n + b] = tdaboot::pointcloud::euclidean(cloud.point(a), cloud.point(b));
        }
    }
    let mut mask_diam = vec![0.0f64; 1 << n];
    for mask in 1usize..1 << n {
        let mut diam: f64 = 0.0;
        let mut rest = mask;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut others = rest;
            while others != 0 {
                let b = others.trailing_zeros() as usize;
                others &= others - 1;
                diam = diam.max(pair_dist[a * n + b]);
            }
        }
        mask_diam[mask] = diam;
    }
    let vertex_mask: Vec<usize> = level
        .iter()
        .map(|&gi| {
            simplices[gi]
                .vertices
                .iter()
                .fold(0usize, |m, &v| m | (1 << v as usize))
        })
        .collect();

    // Kernel of the boundary map restricted to the level; for q = 0 every
    // chain is a cycle.
    let basis: Vec<BitVec> = if q == 0 {
        (0..ncols)
            .map(|j| BitVec::from_indices(ncols, &[j]))
            .collect()
    } else {
        let faces: Vec<usize> = complex.level_indices(q - 1, r);
        let face_pos: std::collections::HashMap<&[u32], usize> = faces
            .iter()
            .enumerate()
            .map(|(p, &gi)| (simplices[gi].vertices.as_slice(), p))
            .collect();
        let columns: Vec<BitVec> = level
            .iter()
            .map(|&gi| {
                let verts = &simplices[gi].vertices;
                let mut col = BitVec::zeros(faces.len());
                for skip in 0..verts.len() {
                    let facet = tdaboot::complex::facet_vertices(verts, skip);
                    col.set(face_pos[facet.as_slice()], true);
                }
                col
            })
            .collect();
        kernel_basis(faces.len(), &columns)
    };
    let t = basis.len();
    assert!(t <= 20, "kernel too large for exhaustive sweep: {t}");
    let mut span = Echelon::new(ncols);
    for combo in 1u32..(1u32 << t) {
        let mut chain = BitVec::zeros(ncols);
        for (b, vec) in basis.iter().enumerate() {
            if combo & (1 << b) != 0 {
                chain.xor_assign(vec);
            }
        }
        if chain.is_zero() {
            continue;
        }
        let mut mask = 0usize;
        for j in chain.iter_ones() {
            mask |= vertex_mask[j];
        }
        if mask_diam[mask] <= bound {
            span.insert(chain);
        }
    }
    span.rank()
}

#[test]
fn criterion_04_bounded_cycles_match_exhaustive_enumeration() {
    let bounds = [0.0, 0.25, 0.5, 0.8, 1.2, 4.0];
    let r = 0.7;
    let mut checks = 0u64;
    let mut mismatches = 0u64;
    for i in 0..40u64 {
        let d = if i % 3 == 0 { 3 } else { 2 };
        let n = 3 + (i as usize % 5);
        let cloud = uniform_cloud(n, d, -1.0, 1.0, &[4, i]);
        let complex = build_vr(&cloud, r + 1e-9, 2).unwrap();
        for q in 0..=1usize {
            for &bound in &bounds {
                let direct = bounded_cycle_space(&complex, q, bound, r).unwrap().dim();
                let brute = exhaustive_bounded_cycle_dim(&complex, &cloud, q, bound, r);
                checks += 1;
                if direct != brute {
                    mismatches += 1;
                }
            }
        }
    }
    verdict(
        4,
        mismatches == 0,
        &format!("{mismatches} mismatches in {checks} bounded-cycle dimensions"),
    );
}

#[test]
fn criterion_05_stabilization_radii_respect_lemma_constants() {
    let start = Instant::now();
    let bound = 0.5;
    let bounded_spec = StatisticSpec::BoundedBetti {
        complex: ComplexKind::VietorisRips,
        query: BettiQuery::new(1, vec![(0.3, 0.45)]).unwrap(),
        bound,
        scale_by_n: false,
    };
    // Grid contains the exact constant 2B = 1.0 plus a window wide enough
    // to expose any violation.
    let bounded_grid = [0.25, 0.5, 0.75, 2.0 * bound, 5.0];
    let query_radius = 0.4;
    let euler_spec = StatisticSpec::TruncatedEuler {
        complex: ComplexKind::VietorisRips,
        q: 1,
        grid: vec![0.2, query_radius],
        scale_by_n: false,
    };
    let euler_grid = [0.3, 0.5, 2.0 * query_radius, 5.0];

    let mut bounded_violations = 0u32;
    let mut euler_violations = 0u32;
    for i in 0..200u64 {
        let cloud = uniform_cloud(25, 2, 0.0, 3.0, &[5, i]);
        let mut rng = derive_rng(CORPUS_SEED, &[5, i, 1]);
        let z = [rng.random_range(1.0..2.0), rng.random_range(1.0..2.0)];
        let rho_b =
            empirical_stabilization_radius(&bounded_spec, &cloud, &z, &bounded_grid).unwrap();
        if rho_b > 2.0 * bound {
            bounded_violations += 1;
        }
        let rho_e = empirical_stabilization_radius(&euler_spec, &cloud, &z, &euler_grid).unwrap();
        if rho_e > 2.0 * query_radius {
            euler_violations += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass =
        bounded_violations == 0 && euler_violations == 0 && elapsed < Duration::from_secs(300);
    verdict(
        5,
        pass,
        &format!(
            "{bounded_violations} radii above 2B and {euler_violations} above 2r over 200 trials each, {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_06_standard_resample_bias_and_dedup_invariance() {
    let n = 10_000;
    let base = generate(DistributionId::F3, n, &mut derive_rng(CORPUS_SEED, &[6])).unwrap();
    let mut fractions = Vec::with_capacity(50);
    for i in 0..50u64 {
        let mut rng = derive_rng(CORPUS_SEED, &[6, i]);
        let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        fractions.push(unique_fraction(&base.select(&indices), &base));
    }
    let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
    let bias_ok = (mean - 0.6321).abs() <= 0.01;

    let loop_spec = StatisticSpec::PersistentBetti {
        complex: ComplexKind::VietorisRips,
        query: BettiQuery::new(1, vec![(0.35, 0.45)]).unwrap(),
        scale_by_n: false,
    };
    let small = generate(DistributionId::F3, 40, &mut derive_rng(CORPUS_SEED, &[6, 100])).unwrap();
    let mut dedup_mismatches = 0u32;
    for i in 0..50u64 {
        let mut rng = derive_rng(CORPUS_SEED, &[6, 200 + i]);
        let indices: Vec<usize> = (0..40).map(|_| rng.random_range(0..40)).collect();
        let resample = small.select(&indices);
        let mut seen = std::collections::HashSet::new();
        let unique: Vec<usize> = (0..resample.len())
            .filter(|&j| {
                let key: Vec<u64> = resample.point(j).iter().map(|c| c.to_bits()).collect();
                seen.insert(key)
            })
            .collect();
        let deduped = resample.select(&unique);
        let with_dups = evaluate(&loop_spec, &resample).unwrap();
        let without = evaluate(&loop_spec, &deduped).unwrap();
        if with_dups.components() != without.components() {
            dedup_mismatches += 1;
        }
    }
    verdict(
        6,
        bias_ok && dedup_mismatches == 0,
        &format!(
            "mean unique fraction {mean:.4} (target 0.6321 +- 0.01), {dedup_mismatches} dedup mismatches in 50 trials"
        ),
    );
}

fn scaled_loop_spec(r: f64, s: f64) -> StatisticSpec {
    StatisticSpec::PersistentBetti {
        complex: ComplexKind::VietorisRips,
        query: BettiQuery::new(1, vec![(r, s)]).unwrap(),
        scale_by_n: true,
    }
}

#[test]
fn criterion_07_coverage_matches_reference_rows() {
    let start = Instant::now();
    let rows = [
        (DistributionId::F3, 3.03, 3.28, 0.903),
        (DistributionId::F2, 5.20, 5.60, 0.954),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (i, (dist, r, s, target)) in rows.into_iter().enumerate() {
        let spec = scaled_loop_spec(r, s);
        let truth = true_mean_estimate(dist, 200, &spec, 600, 0x712 + i as u64).unwrap();
        let config = BootstrapConfig::smoothed(200, 0x70C + i as u64);
        let result: CoverageResult =
            tdaboot::coverage_experiment(dist, &spec, 200, 150, &config, &truth).unwrap();
        let ok = (result.coverage - target).abs() <= 0.08;
        pass &= ok;
        details.push(format!(
            "{dist} coverage {:.3} (target {target} +- 0.08, truth {:.3}+-{:.3})",
            result.coverage, truth.mean[0], truth.standard_error[0]
        ));
    }
    let elapsed = start.elapsed();
    details.push(format!("{elapsed:.0?} (target < 30 min)"));
    verdict(7, pass, &details.join("; "));
}

struct ContrastOutcome {
    smoothed_wins: usize,
    trend_wins: usize,
    seeds: usize,
}

static CONTRAST: OnceLock<ContrastOutcome> = OnceLock::new();

/// Centered and root-m scaled replicate values, the bootstrap estimate of
/// the fluctuation law.
fn fluctuation_law(dist: &BootstrapDistribution) -> Vec<f64> {
    dist.values().iter().map(|row| row[0]).collect()
}

/// Monte Carlo sample of the true fluctuation law at sample size n: the
/// statistic over fresh clouds, centered and scaled by root n.
fn monte_carlo_truth(n: usize, spec: &StatisticSpec, count: usize, seed: u64) -> Vec<f64> {
    let raw: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(seed, &[20, i as u64]);
            let cloud = generate(DistributionId::F3, n, &mut rng).unwrap();
            evaluate(spec, &cloud).unwrap().components()[0]
        })
        .collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let scale = (n as f64).sqrt();
    raw.iter().map(|v| (v - mean) / scale).collect()
}

fn contrast_outcome() -> &'static ContrastOutcome {
    CONTRAST.get_or_init(|| {
        let spec = scaled_loop_spec(3.03, 3.28);
        let seeds = 20usize;
        let replicates = 80usize;
        let truth_large = monte_carlo_truth(400, &spec, 2000, 0x811);
        let truth_small = monte_carlo_truth(100, &spec, 2000, 0x812);
        let mut smoothed_wins = 0usize;
        let mut trend_wins = 0usize;
        for t in 0..seeds as u64 {
            let base = generate(
                DistributionId::F3,
                400,
                &mut derive_rng(0x820, &[t]),
            )
            .unwrap();
            let smoothed_cfg = BootstrapConfig::smoothed(replicates, derive_seed(0x821, &[t]));
            let smoothed_dist = smoothed_bootstrap(&base, &spec, &smoothed_cfg).unwrap();
            let w2_smoothed =
                w2_empirical(&fluctuation_law(&smoothed_dist), &truth_large).unwrap();
            let standard_cfg = BootstrapConfig {
                method: tdaboot::ResampleMethod::Standard,
                ..BootstrapConfig::smoothed(replicates, derive_seed(0x822, &[t]))
            };
            let standard_dist = standard_bootstrap(&base, &spec, &standard_cfg).unwrap();
            let w2_standard =
                w2_empirical(&fluctuation_law(&standard_dist), &truth_large).unwrap();
            if w2_smoothed < w2_standard {
                smoothed_wins += 1;
            }

            let base_small = generate(
                DistributionId::F3,
                100,
                &mut derive_rng(0x823, &[t]),
            )
            .unwrap();
            let small_cfg = BootstrapConfig::smoothed(replicates, derive_seed(0x824, &[t]));
            let small_dist = smoothed_bootstrap(&base_small, &spec, &small_cfg).unwrap();
            let w2_small =
                w2_empirical(&fluctuation_law(&small_dist), &truth_small).unwrap();
            if w2_smoothed < w2_small {
                trend_wins += 1;
            }
        }
        ContrastOutcome {
            smoothed_wins,
            trend_wins,
            seeds,
        }
    })
}

#[test]
fn criterion_08_smoothed_beats_standard_in_wasserstein() {
    let outcome = contrast_outcome();
    let needed = (outcome.seeds * 8).div_ceil(10);
    verdict(
        8,
        outcome.smoothed_wins >= needed,
        &format!(
            "smoothed closer to truth on {}/{} seeds (need >= {needed})",
            outcome.smoothed_wins, outcome.seeds
        ),
    );
}

#[test]
fn criterion_09_wasserstein_gap_shrinks_with_n() {
    let outcome = contrast_outcome();
    let needed = (outcome.seeds * 7).div_ceil(10);
    verdict(
        9,
        outcome.trend_wins >= needed,
        &format!(
            "n=400 gap below n=100 gap on {}/{} seeds (need >= {needed})",
            outcome.trend_wins, outcome.seeds
        ),
    );
}

#[test]
fn criterion_10_kde_l2_error_decreases_with_n() {
    let start = Instant::now();
    let grid = QuadratureGrid::new(Window::new(vec![-6.0], vec![6.0]).unwrap(), 481).unwrap();
    let truth = |x: &[f64]| (-x[0] * x[0] / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut medians = Vec::new();
    for (ni, n) in [100usize, 400, 1600].into_iter().enumerate() {
        let mut errors: Vec<f64> = (0..20u64)
            .map(|rep| {
                let mut rng = derive_rng(CORPUS_SEED, &[10, ni as u64, rep]);
                let coords: Vec<f64> =
                    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let cloud = PointCloud::new(1, coords).unwrap();
                let kde = KernelDensityEstimate::fit_silverman(&cloud).unwrap();
                tdaboot::lp_error(&kde, truth, 2.0, &grid).unwrap()
            })
            .collect();
        errors.sort_by(|a, b| a.total_cmp(b));
        medians.push((errors[9] + errors[10]) / 2.0);
    }
    let elapsed = start.elapsed();
    let decreasing = medians[0] > medians[1] && medians[1] > medians[2];
    let pass = decreasing && elapsed < Duration::from_secs(120);
    verdict(
        10,
        pass,
        &format!(
            "median L2 errors {:.4} > {:.4} > {:.4} across n = 100, 400, 1600, {elapsed:.2?}",
            medians[0], medians[1], medians[2]
        ),
    );
}
