//! Benchmark distributions and coverage experiments.
//!
//! Seven generators produce the test-bed clouds: two rotationally symmetric
//! planar laws with power-law radii, a noisy ring, a solid ball, five
//! clusters with exponential noise, a sphere embedded in five dimensions
//! with Cauchy noise, and a figure eight in ten dimensions. On top of them
//! sit Monte Carlo truth estimation and the bootstrap coverage experiment.

use crate::bootstrap::{
    confidence_band, smoothed_bootstrap, standard_bootstrap, BandKind, BootstrapConfig,
    ResampleMethod,
};
use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;
use crate::rng::{derive_rng, derive_seed, domain};
use crate::stats::{evaluate, PointSampler, StatisticSpec};
use rand::{Rng, RngCore};
use rand_distr::{Cauchy, Distribution, Exp, Normal, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

/// The benchmark distributions. Ambient dimension is fixed per id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DistributionId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
}

impl DistributionId {
    pub const ALL: [DistributionId; 7] = [
        DistributionId::F1,
        DistributionId::F2,
        DistributionId::F3,
        DistributionId::F4,
        DistributionId::F5,
        DistributionId::F6,
        DistributionId::F7,
    ];

    pub fn dim(&self) -> usize {
        match self {
            DistributionId::F1 | DistributionId::F2 | DistributionId::F3 => 2,
            DistributionId::F4 | DistributionId::F5 => 3,
            DistributionId::F6 => 5,
            DistributionId::F7 => 10,
        }
    }
}

impl fmt::Display for DistributionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DistributionId::F1 => "F1",
            DistributionId::F2 => "F2",
            DistributionId::F3 => "F3",
            DistributionId::F4 => "F4",
            DistributionId::F5 => "F5",
            DistributionId::F6 => "F6",
            DistributionId::F7 => "F7",
        };
        f.write_str(s)
    }
}

impl FromStr for DistributionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "F1" => Ok(DistributionId::F1),
            "F2" => Ok(DistributionId::F2),
            "F3" => Ok(DistributionId::F3),
            "F4" => Ok(DistributionId::F4),
            "F5" => Ok(DistributionId::F5),
            "F6" => Ok(DistributionId::F6),
            "F7" => Ok(DistributionId::F7),
            other => Err(Error::InvalidArgument(format!(
                "unknown distribution '{other}'; expected F1..F7"
            ))),
        }
    }
}

const CLUSTER_CENTERS: [[f64; 3]; 5] = [
    [0.38741799, 0.24263535, 0.09535272],
    [0.25147839, 0.63824409, 0.62425101],
    [0.73988542, 0.80749034, 0.84972394],
    [0.26811913, 0.35911205, 0.08316547],
    [0.65954757, 0.04704809, 0.02113341],
];

/// The five cluster centers used by F5.
pub fn cluster_centers() -> &'static [[f64; 3]; 5] {
    &CLUSTER_CENTERS
}

fn circle_point(rng: &mut dyn RngCore) -> (f64, f64) {
    let angle = rng.random_range(0.0..TAU);
    (angle.cos(), angle.sin())
}

/// Uniform in (0, 1], so negative powers stay finite.
fn open_unit(rng: &mut dyn RngCore) -> f64 {
    1.0 - rng.random::<f64>()
}

fn sign(rng: &mut dyn RngCore) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

fn unit_sphere3(rng: &mut dyn RngCore) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-12 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

fn finite_cauchy(dist: &Cauchy<f64>, rng: &mut dyn RngCore) -> f64 {
    loop {
        let draw = dist.sample(rng);
        if draw.is_finite() {
            return draw;
        }
    }
}

/// Rotationally symmetric law with radius R^(a S), R uniform on (0, 1]
/// and S a random sign.
fn radial_power(rng: &mut dyn RngCore, a: f64, coords: &mut Vec<f64>) {
    let (x, y) = circle_point(rng);
    let rho = open_unit(rng).powf(a * sign(rng));
    coords.push(x * rho);
    coords.push(y * rho);
}

/// Draws n points from the given benchmark distribution.
pub fn generate(dist: DistributionId, n: usize, rng: &mut dyn RngCore) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    let d = dist.dim();
    let mut coords = Vec::with_capacity(n * d);
    match dist {
        DistributionId::F1 => {
            for _ in 0..n {
                radial_power(rng, 0.9, &mut coords);
            }
        }
        DistributionId::F2 => {
            for _ in 0..n {
                radial_power(rng, 0.55, &mut coords);
            }
        }
        DistributionId::F3 => {
            let noise = Normal::new(0.0, 0.2).unwrap();
            for _ in 0..n {
                let (x, y) = circle_point(rng);
                coords.push(x + noise.sample(rng));
                coords.push(y + noise.sample(rng));
            }
        }
        DistributionId::F4 => {
            let noise = Normal::new(0.0, 0.1).unwrap();
            for _ in 0..n {
                let direction = unit_sphere3(rng);
                let radius = rng.random::<f64>().powf(1.0 / 3.0);
                for c in direction {
                    coords.push(c * radius + noise.sample(rng));
                }
            }
        }
        DistributionId::F5 => {
            let noise = Exp::new(25.0).unwrap();
            for _ in 0..n {
                let center = &CLUSTER_CENTERS[rng.random_range(0..CLUSTER_CENTERS.len())];
                for c in center {
                    coords.push(c + noise.sample(rng));
                }
            }
        }
        DistributionId::F6 => {
            let noise = Cauchy::new(0.0, 0.1).unwrap();
            for _ in 0..n {
                let sphere = unit_sphere3(rng);
                let base = [sphere[0], sphere[1], sphere[2], 0.0, 0.0];
                for c in base {
                    coords.push(c + finite_cauchy(&noise, rng));
                }
            }
        }
        DistributionId::F7 => {
            let noise = Normal::new(0.0, 0.2).unwrap();
            for _ in 0..n {
                let (x, y) = circle_point(rng);
                let shift = sign(rng);
                coords.push(x + shift + noise.sample(rng));
                coords.push(y + noise.sample(rng));
                for _ in 2..10 {
                    coords.push(noise.sample(rng));
                }
            }
        }
    }
    PointCloud::new(d, coords)
}

impl PointSampler for DistributionId {
    fn dim(&self) -> usize {
        DistributionId::dim(self)
    }

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Result<PointCloud> {
        generate(*self, n, rng)
    }
}

/// Monte Carlo estimate of the expected statistic with its standard error.
#[derive(Clone, Debug, Serialize)]
pub struct TruthEstimate {
    pub mean: Vec<f64>,
    pub standard_error: Vec<f64>,
    pub n_truth: usize,
}

/// Averages the statistic over `n_truth` fresh n-point samples. Samples
/// run in parallel on per-index streams derived from the seed.
pub fn true_mean_estimate(
    dist: DistributionId,
    n: usize,
    spec: &StatisticSpec,
    n_truth: usize,
    seed: u64,
) -> Result<TruthEstimate> {
    if n_truth < 100 {
        return Err(Error::InsufficientData {
            need: 100,
            got: n_truth,
        });
    }
    let rows: Vec<Vec<f64>> = (0..n_truth)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(seed, &[domain::TRUTH_SAMPLE, i as u64]);
            let cloud = generate(dist, n, &mut rng)?;
            evaluate(spec, &cloud).map(|v| v.into_components())
        })
        .collect::<Result<_>>()?;
    let k = rows[0].len();
    let count = n_truth as f64;
    let mean: Vec<f64> = (0..k)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / count)
        .collect();
    let standard_error: Vec<f64> = (0..k)
        .map(|j| {
            let var =
                rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / (count - 1.0);
            (var / count).sqrt()
        })
        .collect();
    Ok(TruthEstimate {
        mean,
        standard_error,
        n_truth,
    })
}

/// Outcome of one coverage experiment, one CSV row.
#[derive(Clone, Debug, Serialize)]
pub struct CoverageResult {
    pub dist: DistributionId,
    pub spec: String,
    pub n: usize,
    pub reps: usize,
    pub replicates: usize,
    pub selector: String,
    pub level: f64,
    pub coverage: f64,
    pub seed: u64,
}

impl CoverageResult {
    pub const CSV_HEADER: &'static str = "dist,spec,n,N,B,selector,level,coverage,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.dist,
            self.spec,
            self.n,
            self.reps,
            self.replicates,
            self.selector,
            self.level,
            self.coverage,
            self.seed
        )
    }
}

/// Estimates the coverage of the pointwise band: over `reps` fresh base
/// samples, the fraction whose band at `config.level` contains the truth
/// in every coordinate. Each repetition draws its base cloud and its
/// bootstrap seed from streams keyed by the repetition index, so results
/// do not depend on thread count.
pub fn coverage_experiment(
    dist: DistributionId,
    spec: &StatisticSpec,
    n: usize,
    reps: usize,
    config: &BootstrapConfig,
    truth: &TruthEstimate,
) -> Result<CoverageResult> {
    if reps == 0 {
        return Err(Error::InvalidArgument("need at least one repetition".into()));
    }
    config.validate()?;
    if truth.mean.len() != spec.output_len() {
        return Err(Error::InvalidArgument(format!(
            "truth has {} components, spec produces {}",
            truth.mean.len(),
            spec.output_len()
        )));
    }
    let kind = if config.percentile {
        BandKind::Percentile
    } else {
        BandKind::Pointwise
    };
    let covered: Vec<bool> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(config.seed, &[domain::COVERAGE_BASE, i as u64]);
            let base = generate(dist, n, &mut rng)?;
            let rep_config = BootstrapConfig {
                seed: derive_seed(config.seed, &[domain::COVERAGE_BOOT, i as u64]),
                ..config.clone()
            };
            let distribution = match rep_config.method {
                ResampleMethod::Smoothed => smoothed_bootstrap(&base, spec, &rep_config)?,
                ResampleMethod::Standard => standard_bootstrap(&base, spec, &rep_config)?,
            };
            let band = confidence_band(&distribution, n, rep_config.level, kind)?;
            Ok(band.contains(&truth.mean))
        })
        .collect::<Result<_>>()?;
    let coverage = covered.iter().filter(|&&c| c).count() as f64 / reps as f64;
    Ok(CoverageResult {
        dist,
        spec: spec.to_string(),
        n,
        reps,
        replicates: config.replicates,
        selector: format!("{}:{}", config.method, config.bandwidth),
        level: config.level,
        coverage,
        seed: config.seed,
    })
}
