//! Statistic specifications and stabilization diagnostics.
//!
//! A `StatisticSpec` names one vector-valued statistic of a point cloud:
//! persistent Betti numbers at query pairs, Betti or Euler curves over a
//! radius grid, their diameter-bounded variant, or the total edge length of
//! the k-nearest-neighbor graph. `evaluate` is the single entry point used
//! by the bootstrap; the add-one cost and empirical stabilization radius
//! drive the locality diagnostics.

use crate::bounded::bounded_persistent_betti;
use crate::complex::{ComplexBuilder, ComplexKind};
use crate::error::{Error, Result};
use crate::persistence::{
    betti_curve, compute_diagram, euler_characteristic, persistent_betti, truncated_euler,
    BettiQuery,
};
use crate::pointcloud::{euclidean, PointCloud};
use crate::rng::{derive_rng, domain};
use rand::distr::{Distribution, Uniform};
use rand::RngCore;
use rand_distr::Poisson;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;
use std::fmt;

/// One component per query coordinate of the evaluated statistic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatisticValue(Vec<f64>);

impl StatisticValue {
    fn new(components: Vec<f64>) -> Result<Self> {
        if components.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateData(
                "statistic produced a non-finite component".into(),
            ));
        }
        Ok(StatisticValue(components))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn into_components(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A statistic of point clouds. Each variant carries exactly the
/// parameters its family needs; `scale_by_n` rescales the cloud by
/// n^(1/d) before evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum StatisticSpec {
    /// Persistent Betti numbers at the query's (r, s) pairs.
    PersistentBetti {
        complex: ComplexKind,
        query: BettiQuery,
        scale_by_n: bool,
    },
    /// Betti numbers over an ascending radius grid.
    BettiCurve {
        complex: ComplexKind,
        q: usize,
        grid: Vec<f64>,
        scale_by_n: bool,
    },
    /// Euler characteristic of the complex built through dimension q+1
    /// (simplex dimension cap q), over a radius grid.
    Euler {
        complex: ComplexKind,
        q: usize,
        grid: Vec<f64>,
        scale_by_n: bool,
    },
    /// Alternating simplex-count sum through dimension q, over a radius
    /// grid.
    TruncatedEuler {
        complex: ComplexKind,
        q: usize,
        grid: Vec<f64>,
        scale_by_n: bool,
    },
    /// Diameter-bounded persistent Betti numbers at the query pairs.
    BoundedBetti {
        complex: ComplexKind,
        query: BettiQuery,
        bound: f64,
        scale_by_n: bool,
    },
    /// Total edge length of the k-nearest-neighbor graph.
    KnnLength {
        k: usize,
        directed: bool,
        scale_by_n: bool,
    },
}

impl StatisticSpec {
    pub fn scale_by_n(&self) -> bool {
        match self {
            StatisticSpec::PersistentBetti { scale_by_n, .. }
            | StatisticSpec::BettiCurve { scale_by_n, .. }
            | StatisticSpec::Euler { scale_by_n, .. }
            | StatisticSpec::TruncatedEuler { scale_by_n, .. }
            | StatisticSpec::BoundedBetti { scale_by_n, .. }
            | StatisticSpec::KnnLength { scale_by_n, .. } => *scale_by_n,
        }
    }

    /// Number of components `evaluate` produces.
    pub fn output_len(&self) -> usize {
        match self {
            StatisticSpec::PersistentBetti { query, .. }
            | StatisticSpec::BoundedBetti { query, .. } => query.pairs().len(),
            StatisticSpec::BettiCurve { grid, .. }
            | StatisticSpec::Euler { grid, .. }
            | StatisticSpec::TruncatedEuler { grid, .. } => grid.len(),
            StatisticSpec::KnnLength { .. } => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StatisticSpec::PersistentBetti { .. } => {}
            StatisticSpec::BettiCurve { grid, .. }
            | StatisticSpec::Euler { grid, .. }
            | StatisticSpec::TruncatedEuler { grid, .. } => validate_grid(grid)?,
            StatisticSpec::BoundedBetti { bound, .. } => {
                if !(bound.is_finite() && *bound >= 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "diameter bound must be finite and nonnegative, got {bound}"
                    )));
                }
            }
            StatisticSpec::KnnLength { k, .. } => {
                if *k == 0 {
                    return Err(Error::InvalidSpec("neighbor count k must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidSpec("radius grid is empty".into()));
    }
    if grid.iter().any(|r| !(r.is_finite() && *r >= 0.0))
        || grid.windows(2).any(|w| w[0] > w[1])
    {
        return Err(Error::InvalidSpec(
            "radius grid must be finite, nonnegative, ascending".into(),
        ));
    }
    Ok(())
}

fn fmt_grid(f: &mut fmt::Formatter<'_>, grid: &[f64]) -> fmt::Result {
    match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => write!(f, "{a}..{b}x{}", grid.len()),
        _ => write!(f, "empty"),
    }
}

fn fmt_pairs(f: &mut fmt::Formatter<'_>, pairs: &[(f64, f64)]) -> fmt::Result {
    for (i, (r, s)) in pairs.iter().enumerate() {
        if i > 0 {
            write!(f, "+")?;
        }
        write!(f, "{r}:{s}")?;
    }
    Ok(())
}

impl fmt::Display for StatisticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatisticSpec::PersistentBetti { complex, query, .. } => {
                write!(f, "persistent_betti({complex};q={};", query.q())?;
                fmt_pairs(f, query.pairs())?;
                write!(f, ")")?;
            }
            StatisticSpec::BettiCurve { complex, q, grid, .. } => {
                write!(f, "betti({complex};q={q};")?;
                fmt_grid(f, grid)?;
                write!(f, ")")?;
            }
            StatisticSpec::Euler { complex, q, grid, .. } => {
                write!(f, "euler({complex};q={q};")?;
                fmt_grid(f, grid)?;
                write!(f, ")")?;
            }
            StatisticSpec::TruncatedEuler { complex, q, grid, .. } => {
                write!(f, "truncated_euler({complex};q={q};")?;
                fmt_grid(f, grid)?;
                write!(f, ")")?;
            }
            StatisticSpec::BoundedBetti {
                complex,
                query,
                bound,
                ..
            } => {
                write!(f, "bounded_persistent_betti({complex};q={};B={bound};", query.q())?;
                fmt_pairs(f, query.pairs())?;
                write!(f, ")")?;
            }
            StatisticSpec::KnnLength { k, directed, .. } => {
                let mode = if *directed { "directed" } else { "undirected" };
                write!(f, "knn_length(k={k};{mode})")?;
            }
        }
        if self.scale_by_n() {
            write!(f, "[scaled]")?;
        }
        Ok(())
    }
}

/// Build radius covering the largest query level, padded so the level
/// checks never trip on rounding.
fn build_radius(target: f64) -> f64 {
    target + 1e-9 * target.max(1.0)
}

/// Evaluates the statistic on the cloud, rescaling first when the spec
/// asks for it. The complex is built only as far as the largest query
/// level requires.
pub fn evaluate(spec: &StatisticSpec, cloud: &PointCloud) -> Result<StatisticValue> {
    spec.validate()?;
    if cloud.is_empty() {
        return Err(Error::EmptyInput);
    }
    let rescaled;
    let cloud = if spec.scale_by_n() {
        let factor = (cloud.len() as f64).powf(1.0 / cloud.dim() as f64);
        rescaled = cloud.scale(factor)?;
        &rescaled
    } else {
        cloud
    };
    let components = match spec {
        StatisticSpec::PersistentBetti { complex, query, .. } => {
            let built = complex.build(cloud, build_radius(query.max_s()), query.q())?;
            let diagram = compute_diagram(&built)?;
            query
                .pairs()
                .iter()
                .map(|&(r, s)| persistent_betti(&diagram, query.q(), r, s).map(|v| v as f64))
                .collect::<Result<Vec<f64>>>()?
        }
        StatisticSpec::BettiCurve { complex, q, grid, .. } => {
            let built = complex.build(cloud, build_radius(*grid.last().unwrap()), *q)?;
            let diagram = compute_diagram(&built)?;
            betti_curve(&diagram, *q, grid)?
                .into_iter()
                .map(|v| v as f64)
                .collect()
        }
        StatisticSpec::Euler { complex, q, grid, .. } => {
            let built = complex.build(cloud, build_radius(*grid.last().unwrap()), *q)?;
            grid.iter()
                .map(|&r| euler_characteristic(&built, r).map(|v| v as f64))
                .collect::<Result<Vec<f64>>>()?
        }
        StatisticSpec::TruncatedEuler { complex, q, grid, .. } => {
            let built = complex.build(
                cloud,
                build_radius(*grid.last().unwrap()),
                q.saturating_sub(1),
            )?;
            grid.iter()
                .map(|&r| truncated_euler(&built, *q, r).map(|v| v as f64))
                .collect::<Result<Vec<f64>>>()?
        }
        StatisticSpec::BoundedBetti {
            complex,
            query,
            bound,
            ..
        } => {
            let built = complex.build(cloud, build_radius(query.max_s()), query.q())?;
            query
                .pairs()
                .iter()
                .map(|&(r, s)| {
                    bounded_persistent_betti(&built, query.q(), *bound, r, s).map(|v| v as f64)
                })
                .collect::<Result<Vec<f64>>>()?
        }
        StatisticSpec::KnnLength { k, directed, .. } => {
            vec![knn_total_length(cloud, *k, *directed)?]
        }
    };
    StatisticValue::new(components)
}

/// Total edge length of the k-nearest-neighbor graph. Directed sums the
/// distance from every point to each of its k nearest others; undirected
/// counts each unordered edge once. Ties break toward the smaller index.
pub fn knn_total_length(cloud: &PointCloud, k: usize, directed: bool) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("neighbor count k must be positive".into()));
    }
    let n = cloud.len();
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "k-nearest-neighbor graph needs more than k={k} points, got {n}"
        )));
    }
    let mut total = 0.0;
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        order.clear();
        order.extend((0..n).filter(|&j| j != i).map(|j| (cloud.distance(i, j), j)));
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(dist, j) in order.iter().take(k) {
            if directed || seen.insert((i.min(j), i.max(j))) {
                total += dist;
            }
        }
    }
    Ok(total)
}

/// Componentwise change of the statistic when `z` joins the cloud. The
/// empty cloud evaluates to zero, so the cost of the first point is the
/// statistic of the singleton.
pub fn add_one_cost(spec: &StatisticSpec, cloud: &PointCloud, z: &[f64]) -> Result<StatisticValue> {
    if spec.scale_by_n() {
        return Err(Error::InvalidSpec(
            "add-one costs act on already-scaled clouds; disable scale_by_n".into(),
        ));
    }
    let after = evaluate(spec, &cloud.with_point(z)?)?;
    let before = evaluate_or_zero(spec, cloud)?;
    let diff = after
        .components()
        .iter()
        .zip(before.components())
        .map(|(a, b)| a - b)
        .collect();
    StatisticValue::new(diff)
}

fn evaluate_or_zero(spec: &StatisticSpec, cloud: &PointCloud) -> Result<StatisticValue> {
    if cloud.is_empty() {
        spec.validate()?;
        Ok(StatisticValue(vec![0.0; spec.output_len()]))
    } else {
        evaluate(spec, cloud)
    }
}

fn validate_radius_grid(l_grid: &[f64]) -> Result<()> {
    if l_grid.is_empty() {
        return Err(Error::InvalidArgument("radius grid is empty".into()));
    }
    if l_grid.iter().any(|l| !(l.is_finite() && *l >= 0.0))
        || l_grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidArgument(
            "radius grid must be finite, nonnegative, strictly ascending".into(),
        ));
    }
    Ok(())
}

/// Smallest grid radius l such that the add-one cost of `z` over the
/// window `cloud` ∩ B_z(l) already equals the full-cloud cost at every
/// grid radius from l on. Returns +inf when even the largest grid radius
/// disagrees with the full cost, which cannot happen once the grid covers
/// the whole cloud.
pub fn empirical_stabilization_radius(
    spec: &StatisticSpec,
    cloud: &PointCloud,
    z: &[f64],
    l_grid: &[f64],
) -> Result<f64> {
    validate_radius_grid(l_grid)?;
    let full = add_one_cost(spec, cloud, z)?;
    let mut costs = Vec::with_capacity(l_grid.len());
    for &l in l_grid {
        let window: Vec<usize> = (0..cloud.len())
            .filter(|&i| euclidean(cloud.point(i), z) <= l)
            .collect();
        costs.push(add_one_cost(spec, &cloud.select(&window), z)?);
    }
    let mut idx = l_grid.len();
    while idx > 0 && costs[idx - 1] == full {
        idx -= 1;
    }
    if idx == l_grid.len() {
        return Ok(f64::INFINITY);
    }
    Ok(l_grid[idx])
}

/// A source of point clouds for Monte Carlo diagnostics.
pub trait PointSampler: Sync {
    fn dim(&self) -> usize;

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Result<PointCloud>;
}

/// Monte Carlo tail of the empirical stabilization radius: for each grid
/// value L, the fraction of trials in which the radius of a fresh center
/// over a fresh n-point sample, both rescaled by n^(1/d), exceeds L.
/// Trials run in parallel on per-trial streams, so the result depends only
/// on the seed.
pub fn stabilization_tail(
    spec: &StatisticSpec,
    sampler: &dyn PointSampler,
    n: usize,
    l_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    if spec.scale_by_n() {
        return Err(Error::InvalidSpec(
            "tail trials rescale clouds explicitly; disable scale_by_n".into(),
        ));
    }
    validate_radius_grid(l_grid)?;
    let factor = (n as f64).powf(1.0 / sampler.dim() as f64);
    let radii = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_rng(seed, &[domain::STAB_TRIAL, t as u64]);
            let sample = sampler.sample(n, &mut rng)?;
            let center = sampler.sample(1, &mut rng)?;
            let scaled = sample.scale(factor)?;
            let z: Vec<f64> = center.point(0).iter().map(|c| c * factor).collect();
            empirical_stabilization_radius(spec, &scaled, &z, l_grid)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(l_grid
        .iter()
        .map(|&l| radii.iter().filter(|&&rho| rho > l).count() as f64 / trials as f64)
        .collect())
}

/// Axis-aligned box with positive extent on every axis. Doubles as a
/// uniform sampler over itself.
#[derive(Clone, Debug, Serialize)]
pub struct Window {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Window {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidArgument(
                "window bounds must be nonempty and of equal dimension".into(),
            ));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidArgument(format!(
                    "window must have positive extent on every axis, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Window { lower, upper })
    }

    pub fn unit_cube(dim: usize) -> Result<Self> {
        Window::new(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }
}

impl PointSampler for Window {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Result<PointCloud> {
        let axes: Vec<Uniform<f64>> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| Uniform::new(lo, hi))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("window axis: {e}")))?;
        let mut coords = Vec::with_capacity(n * self.dim());
        for _ in 0..n {
            for axis in &axes {
                coords.push(axis.sample(rng));
            }
        }
        PointCloud::new(self.dim(), coords)
    }
}

/// Homogeneous Poisson process on the window: Poisson(intensity × volume)
/// many points, placed uniformly.
pub fn sample_homogeneous_poisson(
    window: &Window,
    intensity: f64,
    rng: &mut dyn RngCore,
) -> Result<PointCloud> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "intensity must be positive and finite, got {intensity}"
        )));
    }
    let mean = intensity * window.volume();
    let count = Poisson::new(mean)
        .map_err(|e| Error::InvalidArgument(format!("poisson mean {mean}: {e}")))?
        .sample(rng) as usize;
    window.sample(count, rng)
}
