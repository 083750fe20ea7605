//! Smoothed and standard bootstrap with confidence bands.
//!
//! A bootstrap run resamples the base cloud B times (from a kernel density
//! estimate, or with replacement), evaluates the statistic on each resample
//! of size m, and stores the replicate values centered by their mean and
//! scaled by 1/sqrt(m). Confidence bands for the expected statistic use the
//! centered raw replicate quantiles shrunk by sqrt(n) as error quantiles.

use crate::density::{kde_sample, KernelDensityEstimate};
use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;
use crate::rng::{derive_rng, domain};
use crate::stats::{evaluate, StatisticSpec};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleMethod {
    Smoothed,
    Standard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandwidthRule {
    Silverman,
    Adaptive,
}

/// Which bands an orchestrated run produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandSelection {
    Pointwise,
    Simultaneous,
    Both,
}

/// Band construction rule. Pointwise is the basic (reflection) interval;
/// percentile is its mirror image; simultaneous uses the studentized
/// max statistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandKind {
    Pointwise,
    Simultaneous,
    Percentile,
}

macro_rules! enum_strings {
    ($ty:ident { $($variant:ident => $text:literal),+ }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let s = match self {
                    $($ty::$variant => $text),+
                };
                f.write_str(s)
            }
        }
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    other => Err(Error::InvalidArgument(format!(
                        concat!("unknown ", stringify!($ty), " '{}'"), other
                    ))),
                }
            }
        }
    };
}

enum_strings!(ResampleMethod { Smoothed => "smoothed", Standard => "standard" });
enum_strings!(BandwidthRule { Silverman => "silverman", Adaptive => "adaptive" });
enum_strings!(BandSelection { Pointwise => "pointwise", Simultaneous => "simultaneous", Both => "both" });

#[derive(Clone, Debug, Serialize)]
pub struct BootstrapConfig {
    /// Number of bootstrap replicates B.
    pub replicates: usize,
    /// Resample size m; the base sample size when absent.
    pub resample_size: Option<usize>,
    pub method: ResampleMethod,
    pub bandwidth: BandwidthRule,
    /// Coverage target in (0, 1).
    pub level: f64,
    pub band: BandSelection,
    /// Use the percentile interval in place of the basic one.
    pub percentile: bool,
    pub seed: u64,
}

impl BootstrapConfig {
    /// Smoothed-bootstrap defaults: m = n, Silverman bandwidth, 95%
    /// pointwise and simultaneous bands.
    pub fn smoothed(replicates: usize, seed: u64) -> Self {
        BootstrapConfig {
            replicates,
            resample_size: None,
            method: ResampleMethod::Smoothed,
            bandwidth: BandwidthRule::Silverman,
            level: 0.95,
            band: BandSelection::Both,
            percentile: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InsufficientReplicates {
                what: "bootstrap",
                need: 2,
                got: self.replicates,
            });
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "level must lie in (0, 1), got {}",
                self.level
            )));
        }
        if self.resample_size == Some(0) {
            return Err(Error::InvalidArgument(
                "resample size must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Centered, scaled bootstrap replicates of one statistic.
#[derive(Clone, Debug)]
pub struct BootstrapDistribution {
    /// B rows of (psi(resample_b) - replicate mean) / sqrt(m).
    values: Vec<Vec<f64>>,
    replicate_means: Vec<f64>,
    point_estimate: Vec<f64>,
    resample_size: usize,
}

impl BootstrapDistribution {
    /// Assembles the distribution from raw replicate values of the
    /// statistic, the point estimate on the base cloud, and the resample
    /// size m used for scaling.
    pub fn from_parts(raw: Vec<Vec<f64>>, point_estimate: Vec<f64>, m: usize) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::InsufficientReplicates {
                what: "bootstrap",
                need: 2,
                got: raw.len(),
            });
        }
        if m == 0 {
            return Err(Error::InvalidArgument("resample size must be positive".into()));
        }
        let k = point_estimate.len();
        if point_estimate.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateData("non-finite point estimate".into()));
        }
        for (b, row) in raw.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Replicate {
                    index: b,
                    reason: format!("expected {k} components, got {}", row.len()),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Replicate {
                    index: b,
                    reason: "non-finite statistic".into(),
                });
            }
        }
        let count = raw.len() as f64;
        let replicate_means: Vec<f64> = (0..k)
            .map(|j| raw.iter().map(|row| row[j]).sum::<f64>() / count)
            .collect();
        let scale = 1.0 / (m as f64).sqrt();
        let values = raw
            .into_iter()
            .map(|row| {
                row.iter()
                    .zip(&replicate_means)
                    .map(|(v, mean)| (v - mean) * scale)
                    .collect()
            })
            .collect();
        Ok(BootstrapDistribution {
            values,
            replicate_means,
            point_estimate,
            resample_size: m,
        })
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn replicate_means(&self) -> &[f64] {
        &self.replicate_means
    }

    pub fn point_estimate(&self) -> &[f64] {
        &self.point_estimate
    }

    pub fn num_replicates(&self) -> usize {
        self.values.len()
    }

    /// Resample size m the replicate values were scaled by.
    pub fn resample_size(&self) -> usize {
        self.resample_size
    }

    /// Number of query coordinates.
    pub fn dim(&self) -> usize {
        self.point_estimate.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }
}

fn resample_size(cloud: &PointCloud, config: &BootstrapConfig) -> usize {
    config.resample_size.unwrap_or_else(|| cloud.len())
}

fn fit_kde(cloud: &PointCloud, rule: BandwidthRule) -> Result<KernelDensityEstimate> {
    match rule {
        BandwidthRule::Silverman => KernelDensityEstimate::fit_silverman(cloud),
        BandwidthRule::Adaptive => KernelDensityEstimate::fit_adaptive(cloud),
    }
}

fn collect_replicates<F>(
    spec: &StatisticSpec,
    config: &BootstrapConfig,
    point_estimate: Vec<f64>,
    m: usize,
    draw: F,
) -> Result<BootstrapDistribution>
where
    F: Fn(usize, &mut rand_chacha::ChaCha8Rng) -> Result<PointCloud> + Sync,
{
    let raw: Vec<Vec<f64>> = (0..config.replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = derive_rng(config.seed, &[domain::BOOT_REPLICATE, b as u64]);
            let resample = draw(b, &mut rng).map_err(|e| Error::Replicate {
                index: b,
                reason: e.to_string(),
            })?;
            evaluate(spec, &resample)
                .map(|v| v.into_components())
                .map_err(|e| Error::Replicate {
                    index: b,
                    reason: e.to_string(),
                })
        })
        .collect::<Result<_>>()?;
    BootstrapDistribution::from_parts(raw, point_estimate, m)
}

/// Smoothed bootstrap: replicates are m-point draws from a kernel density
/// estimate fitted on the cloud. Each replicate runs on its own stream
/// keyed by (seed, replicate index), so the matrix is identical across
/// thread counts.
pub fn smoothed_bootstrap(
    cloud: &PointCloud,
    spec: &StatisticSpec,
    config: &BootstrapConfig,
) -> Result<BootstrapDistribution> {
    config.validate()?;
    if config.method != ResampleMethod::Smoothed {
        return Err(Error::InvalidArgument(
            "config.method must be smoothed".into(),
        ));
    }
    let point_estimate = evaluate(spec, cloud)?.into_components();
    let kde = fit_kde(cloud, config.bandwidth)?;
    let m = resample_size(cloud, config);
    collect_replicates(spec, config, point_estimate, m, |_, rng| {
        kde_sample(&kde, m, rng)
    })
}

/// Standard nonparametric bootstrap: replicates are m points drawn from
/// the cloud with replacement.
pub fn standard_bootstrap(
    cloud: &PointCloud,
    spec: &StatisticSpec,
    config: &BootstrapConfig,
) -> Result<BootstrapDistribution> {
    config.validate()?;
    if config.method != ResampleMethod::Standard {
        return Err(Error::InvalidArgument(
            "config.method must be standard".into(),
        ));
    }
    if cloud.is_empty() {
        return Err(Error::EmptyInput);
    }
    let point_estimate = evaluate(spec, cloud)?.into_components();
    let m = resample_size(cloud, config);
    let n = cloud.len();
    collect_replicates(spec, config, point_estimate, m, |_, rng| {
        let indices: Vec<usize> = (0..m).map(|_| rng.random_range(0..n)).collect();
        Ok(cloud.select(&indices))
    })
}

/// Fraction of distinct base points that appear in the resample, matched
/// by exact coordinates.
pub fn unique_fraction(resample: &PointCloud, base: &PointCloud) -> f64 {
    if base.is_empty() {
        return 0.0;
    }
    let key = |p: &[f64]| -> Vec<u64> { p.iter().map(|c| c.to_bits()).collect() };
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    for i in 0..base.len() {
        index.entry(key(base.point(i))).or_insert(i);
    }
    let mut used: HashSet<usize> = HashSet::new();
    for i in 0..resample.len() {
        if let Some(&b) = index.get(&key(resample.point(i))) {
            used.insert(b);
        }
    }
    used.len() as f64 / base.len() as f64
}

/// Confidence band for the expected statistic of the base sample.
#[derive(Clone, Debug, Serialize)]
pub struct ConfidenceBand {
    kind: BandKind,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Achieved studentized multiplier; simultaneous bands only.
    multiplier: Option<f64>,
}

impl ConfidenceBand {
    pub fn kind(&self) -> BandKind {
        self.kind
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn multiplier(&self) -> Option<f64> {
        self.multiplier
    }

    /// True when every coordinate of the point lies inside the band.
    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.lower.len()
            && point
                .iter()
                .enumerate()
                .all(|(j, &x)| self.lower[j] <= x && x <= self.upper[j])
    }
}

/// Empirical quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo as f64)
}

/// Builds a band from the bootstrap distribution. The error quantiles are
/// the centered raw replicate quantiles shrunk by sqrt(n), which is the
/// stored values quantiles times sqrt(m)/sqrt(n): the basic interval is
/// [theta - e_hi, theta - e_lo], the percentile interval its mirror image,
/// and the simultaneous band theta +- c sigma_j sqrt(m)/sqrt(n) with c the
/// level quantile of the studentized max statistic, inflated minimally so
/// the band always contains the pointwise ones.
pub fn confidence_band(
    dist: &BootstrapDistribution,
    n: usize,
    level: f64,
    kind: BandKind,
) -> Result<ConfidenceBand> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level must lie in (0, 1), got {level}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("base sample size must be positive".into()));
    }
    let k = dist.dim();
    let b = dist.num_replicates();
    let stretch = (dist.resample_size() as f64).sqrt() / (n as f64).sqrt();
    let alpha = 1.0 - level;
    let mut sorted_cols: Vec<Vec<f64>> = (0..k).map(|j| dist.column(j)).collect();
    for col in &mut sorted_cols {
        col.sort_by(f64::total_cmp);
    }
    let q_lo: Vec<f64> = sorted_cols.iter().map(|c| quantile(c, alpha / 2.0)).collect();
    let q_hi: Vec<f64> = sorted_cols
        .iter()
        .map(|c| quantile(c, 1.0 - alpha / 2.0))
        .collect();
    let theta = dist.point_estimate();
    let (lower, upper, multiplier) = match kind {
        BandKind::Pointwise => (
            (0..k).map(|j| theta[j] - stretch * q_hi[j]).collect(),
            (0..k).map(|j| theta[j] - stretch * q_lo[j]).collect(),
            None,
        ),
        BandKind::Percentile => (
            (0..k).map(|j| theta[j] + stretch * q_lo[j]).collect(),
            (0..k).map(|j| theta[j] + stretch * q_hi[j]).collect(),
            None,
        ),
        BandKind::Simultaneous => {
            if b < 20 {
                return Err(Error::InsufficientReplicates {
                    what: "simultaneous band",
                    need: 20,
                    got: b,
                });
            }
            let sd: Vec<f64> = (0..k)
                .map(|j| {
                    let col = &sorted_cols[j];
                    let mean = col.iter().sum::<f64>() / b as f64;
                    (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b as f64 - 1.0))
                        .sqrt()
                })
                .collect();
            let mut ratios: Vec<f64> = dist
                .values()
                .iter()
                .map(|row| {
                    (0..k)
                        .filter(|&j| sd[j] > 0.0)
                        .map(|j| row[j].abs() / sd[j])
                        .fold(0.0, f64::max)
                })
                .collect();
            ratios.sort_by(f64::total_cmp);
            let mut c = quantile(&ratios, level);
            for j in 0..k {
                if sd[j] > 0.0 {
                    c = c.max(q_lo[j].abs().max(q_hi[j].abs()) / sd[j]);
                }
            }
            (
                (0..k).map(|j| theta[j] - c * sd[j] * stretch).collect(),
                (0..k).map(|j| theta[j] + c * sd[j] * stretch).collect(),
                Some(c),
            )
        }
    };
    Ok(ConfidenceBand {
        kind,
        lower,
        upper,
        multiplier,
    })
}

/// Exact 2-Wasserstein distance between two empirical distributions on the
/// line: the L2 distance of their quantile functions, integrated segment
/// by segment over the merged breakpoints.
pub fn w2_empirical(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut a = u.to_vec();
    let mut b = v.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (p, q) = (a.len(), b.len());
    let denom = (p * q) as f64;
    let mut total = 0.0;
    let mut prev = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < p && j < q {
        let na = (i + 1) * q;
        let nb = (j + 1) * p;
        let boundary = na.min(nb) as f64 / denom;
        let diff = a[i] - b[j];
        total += diff * diff * (boundary - prev);
        prev = boundary;
        if na <= nb {
            i += 1;
        }
        if nb <= na {
            j += 1;
        }
    }
    Ok(total.sqrt())
}

/// Scale factor sqrt(1 - 1/e) relating standard-bootstrap persistence
/// scales to the original sample; a diagnostic transform, never applied
/// implicitly.
pub fn standard_scale_correction() -> f64 {
    (1.0 - (-1.0f64).exp()).sqrt()
}

/// Distribution plus the bands the configuration asked for.
#[derive(Clone, Debug)]
pub struct BootstrapRun {
    pub distribution: BootstrapDistribution,
    pub pointwise: Option<ConfidenceBand>,
    pub simultaneous: Option<ConfidenceBand>,
}

/// Full pipeline: resample per the configured method, then build the
/// selected bands at the configured level.
pub fn run_bootstrap(
    cloud: &PointCloud,
    spec: &StatisticSpec,
    config: &BootstrapConfig,
) -> Result<BootstrapRun> {
    let distribution = match config.method {
        ResampleMethod::Smoothed => smoothed_bootstrap(cloud, spec, config)?,
        ResampleMethod::Standard => standard_bootstrap(cloud, spec, config)?,
    };
    let n = cloud.len();
    let pointwise_kind = if config.percentile {
        BandKind::Percentile
    } else {
        BandKind::Pointwise
    };
    let pointwise = match config.band {
        BandSelection::Pointwise | BandSelection::Both => Some(confidence_band(
            &distribution,
            n,
            config.level,
            pointwise_kind,
        )?),
        BandSelection::Simultaneous => None,
    };
    let simultaneous = match config.band {
        BandSelection::Simultaneous | BandSelection::Both => Some(confidence_band(
            &distribution,
            n,
            config.level,
            BandKind::Simultaneous,
        )?),
        BandSelection::Pointwise => None,
    };
    Ok(BootstrapRun {
        distribution,
        pointwise,
        simultaneous,
    })
}

const QUANTILE_LADDER: [f64; 7] = [0.025, 0.05, 0.25, 0.5, 0.75, 0.95, 0.975];

/// Serializable summary of a bootstrap run. Key order is alphabetical and
/// stable, so equal runs serialize to identical bytes.
pub fn result_json(
    spec: &StatisticSpec,
    config: &BootstrapConfig,
    run: &BootstrapRun,
) -> serde_json::Value {
    let dist = &run.distribution;
    let mut quantiles = serde_json::Map::new();
    let mut cols: Vec<Vec<f64>> = (0..dist.dim()).map(|j| dist.column(j)).collect();
    for col in &mut cols {
        col.sort_by(f64::total_cmp);
    }
    for p in QUANTILE_LADDER {
        let row: Vec<f64> = cols.iter().map(|c| quantile(c, p)).collect();
        quantiles.insert(p.to_string(), json!(row));
    }
    json!({
        "spec": spec,
        "config": config,
        "point_estimate": dist.point_estimate(),
        "replicate_quantiles": quantiles,
        "bands": {
            "pointwise": run.pointwise,
            "simultaneous": run.simultaneous,
        },
        "seed": config.seed,
    })
}
