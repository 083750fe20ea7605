//! Gaussian product-kernel density estimation.
//!
//! One estimator type covers both the fixed Silverman rule and the adaptive
//! square-root law: every center i carries a local factor lambda_i (all one
//! in the fixed case) multiplying the per-dimension bandwidths h_j. The
//! estimator doubles as the smoothed-bootstrap generator: sampling picks a
//! center uniformly and perturbs it by scaled Gaussian noise.

use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;
use crate::rng::{derive_rng, domain, splitmix64};
use crate::stats::{PointSampler, Window};
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn gaussian(u: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * u * u).exp()
}

/// Product-Gaussian kernel density estimate with per-dimension bandwidths
/// and per-center local factors.
#[derive(Clone, Debug)]
pub struct KernelDensityEstimate {
    centers: PointCloud,
    bandwidth: Vec<f64>,
    local_factors: Vec<f64>,
}

impl KernelDensityEstimate {
    /// Validates and assembles an estimator from explicit parts.
    pub fn from_parts(
        centers: PointCloud,
        bandwidth: Vec<f64>,
        local_factors: Vec<f64>,
    ) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptyInput);
        }
        if bandwidth.len() != centers.dim() {
            return Err(Error::InvalidArgument(format!(
                "expected {} bandwidths, got {}",
                centers.dim(),
                bandwidth.len()
            )));
        }
        if local_factors.len() != centers.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} local factors, got {}",
                centers.len(),
                local_factors.len()
            )));
        }
        if bandwidth.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidArgument(
                "bandwidths must be positive and finite".into(),
            ));
        }
        if local_factors.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidArgument(
                "local factors must be positive and finite".into(),
            ));
        }
        Ok(KernelDensityEstimate {
            centers,
            bandwidth,
            local_factors,
        })
    }

    /// Silverman-rule estimator with all local factors one.
    pub fn fit_silverman(cloud: &PointCloud) -> Result<Self> {
        let bandwidth = silverman_bandwidth(cloud)?;
        let ones = vec![1.0; cloud.len()];
        KernelDensityEstimate::from_parts(cloud.clone(), bandwidth, ones)
    }

    /// Adaptive estimator: Silverman bandwidths widened or narrowed per
    /// center by the square-root law against a Silverman pilot.
    pub fn fit_adaptive(cloud: &PointCloud) -> Result<Self> {
        let pilot = KernelDensityEstimate::fit_silverman(cloud)?;
        let factors = adaptive_bandwidth(cloud, &pilot)?;
        KernelDensityEstimate::from_parts(cloud.clone(), pilot.bandwidth.clone(), factors)
    }

    pub fn centers(&self) -> &PointCloud {
        &self.centers
    }

    pub fn bandwidth(&self) -> &[f64] {
        &self.bandwidth
    }

    pub fn local_factors(&self) -> &[f64] {
        &self.local_factors
    }
}

/// Per-dimension normal-reference bandwidths
/// h_j = (4/(d+2))^(1/(d+4)) n^(-1/(d+4)) sigma_j.
pub fn silverman_bandwidth(cloud: &PointCloud) -> Result<Vec<f64>> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::InsufficientData { need: 2, got: n });
    }
    let d = cloud.dim();
    let prefactor =
        (4.0 / (d as f64 + 2.0)).powf(1.0 / (d as f64 + 4.0)) * (n as f64).powf(-1.0 / (d as f64 + 4.0));
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let mean = (0..n).map(|i| cloud.point(i)[j]).sum::<f64>() / n as f64;
        let ss = (0..n).map(|i| (cloud.point(i)[j] - mean).powi(2)).sum::<f64>();
        let sd = (ss / (n as f64 - 1.0)).sqrt();
        if sd == 0.0 {
            return Err(Error::DegenerateData(format!(
                "coordinate {j} is constant; bandwidth undefined"
            )));
        }
        out.push(prefactor * sd);
    }
    Ok(out)
}

/// Square-root-law local factors lambda_i = (g / pilot(X_i))^(1/2) with g
/// the geometric mean of the pilot densities, renormalized so the factors'
/// own geometric mean is one.
pub fn adaptive_bandwidth(cloud: &PointCloud, pilot: &KernelDensityEstimate) -> Result<Vec<f64>> {
    let n = cloud.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut log_density = Vec::with_capacity(n);
    for i in 0..n {
        let f = kde_evaluate(pilot, cloud.point(i))?;
        if f <= 0.0 || !f.is_finite() {
            return Err(Error::DegeneratePilot(i));
        }
        log_density.push(f.ln());
    }
    let log_g = log_density.iter().sum::<f64>() / n as f64;
    let mut factors: Vec<f64> = log_density
        .iter()
        .map(|lf| (0.5 * (log_g - lf)).exp())
        .collect();
    let log_gm = factors.iter().map(|l| l.ln()).sum::<f64>() / n as f64;
    let gm = log_gm.exp();
    for l in &mut factors {
        *l /= gm;
    }
    Ok(factors)
}

/// Density value (1/n) sum_i prod_j phi((x_j - X_ij) / (lambda_i h_j)) /
/// (lambda_i h_j).
pub fn kde_evaluate(kde: &KernelDensityEstimate, x: &[f64]) -> Result<f64> {
    if x.len() != kde.centers.dim() {
        return Err(Error::InvalidArgument(format!(
            "point has dimension {}, estimator has {}",
            x.len(),
            kde.centers.dim()
        )));
    }
    let n = kde.centers.len();
    let mut total = 0.0;
    for i in 0..n {
        let center = kde.centers.point(i);
        let lambda = kde.local_factors[i];
        let mut term = 1.0;
        for j in 0..x.len() {
            let width = lambda * kde.bandwidth[j];
            term *= gaussian((x[j] - center[j]) / width) / width;
        }
        total += term;
    }
    Ok(total / n as f64)
}

/// Draws m points: per draw, a uniform center plus Gaussian noise scaled by
/// the center's factor and the bandwidths. Each draw uses its own stream
/// keyed by draw index, so a future parallel split cannot change output.
pub fn kde_sample(
    kde: &KernelDensityEstimate,
    m: usize,
    rng: &mut dyn RngCore,
) -> Result<PointCloud> {
    if m < 1 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let d = kde.centers.dim();
    let n = kde.centers.len();
    let sub_seed = splitmix64(rng.next_u64());
    let mut coords = Vec::with_capacity(m * d);
    for draw in 0..m {
        let mut draw_rng = derive_rng(sub_seed, &[domain::KDE_DRAW, draw as u64]);
        let i = draw_rng.random_range(0..n);
        let center = kde.centers.point(i);
        let lambda = kde.local_factors[i];
        for j in 0..d {
            let noise: f64 = draw_rng.sample(StandardNormal);
            coords.push(center[j] + noise * lambda * kde.bandwidth[j]);
        }
    }
    PointCloud::new(d, coords)
}

impl PointSampler for KernelDensityEstimate {
    fn dim(&self) -> usize {
        self.centers.dim()
    }

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Result<PointCloud> {
        kde_sample(self, n, rng)
    }
}

/// Tensor-product trapezoid rule over a box, at most three axes.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    window: Window,
    points_per_axis: usize,
}

impl QuadratureGrid {
    pub fn new(window: Window, points_per_axis: usize) -> Result<Self> {
        if window.dim() > 3 {
            return Err(Error::InvalidArgument(
                "tensor quadrature supports at most three axes".into(),
            ));
        }
        if points_per_axis < 2 {
            return Err(Error::InvalidArgument(
                "need at least two quadrature points per axis".into(),
            ));
        }
        Ok(QuadratureGrid {
            window,
            points_per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    fn axis_step(&self, j: usize) -> f64 {
        (self.window.upper()[j] - self.window.lower()[j]) / (self.points_per_axis - 1) as f64
    }

    /// Applies `f` to every node along with its trapezoid weight and sums.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        let d = self.dim();
        let m = self.points_per_axis;
        let steps: Vec<f64> = (0..d).map(|j| self.axis_step(j)).collect();
        let mut index = vec![0usize; d];
        let mut point = vec![0.0f64; d];
        let mut total = 0.0;
        loop {
            let mut weight = 1.0;
            for j in 0..d {
                point[j] = self.window.lower()[j] + steps[j] * index[j] as f64;
                let edge = index[j] == 0 || index[j] == m - 1;
                weight *= steps[j] * if edge { 0.5 } else { 1.0 };
            }
            total += weight * f(&point);
            let mut j = 0;
            loop {
                if j == d {
                    return total;
                }
                index[j] += 1;
                if index[j] < m {
                    break;
                }
                index[j] = 0;
                j += 1;
            }
        }
    }
}

/// Numeric ||kde - truth||_p over the grid, for p >= 2.
pub fn lp_error<F: FnMut(&[f64]) -> f64>(
    kde: &KernelDensityEstimate,
    mut truth: F,
    p: f64,
    grid: &QuadratureGrid,
) -> Result<f64> {
    if !(p.is_finite() && p >= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "Lp error is defined here for finite p >= 2, got {p}"
        )));
    }
    if grid.dim() != kde.centers.dim() {
        return Err(Error::InvalidArgument(format!(
            "grid dimension {} does not match estimator dimension {}",
            grid.dim(),
            kde.centers.dim()
        )));
    }
    let mut failure = None;
    let integral = grid.integrate(|x| match kde_evaluate(kde, x) {
        Ok(fhat) => (fhat - truth(x)).abs().powf(p),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(integral.powf(1.0 / p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{Continuous, ContinuousCDF, Normal};

    fn cloud_1d(values: &[f64]) -> PointCloud {
        PointCloud::new(1, values.to_vec()).unwrap()
    }

    /// 100 points with sample standard deviation exactly 1.
    fn unit_sd_cloud() -> PointCloud {
        let c = (99.0f64 / 100.0).sqrt();
        let mut values = vec![c; 50];
        values.extend(vec![-c; 50]);
        cloud_1d(&values)
    }

    #[test]
    fn silverman_reference_value() {
        let h = silverman_bandwidth(&unit_sd_cloud()).unwrap();
        let expected = (4.0f64 / 3.0).powf(0.2) * 100f64.powf(-0.2);
        assert!((h[0] - expected).abs() < 1e-12);
        assert!((h[0] - 0.4215).abs() < 1e-3);
    }

    #[test]
    fn silverman_scales_with_the_cloud() {
        let cloud = cloud_1d(&[0.0, 1.0, 3.0, 4.5, 9.0]);
        let h = silverman_bandwidth(&cloud).unwrap();
        let h2 = silverman_bandwidth(&cloud.scale(2.5).unwrap()).unwrap();
        assert!((h2[0] - 2.5 * h[0]).abs() < 1e-12);
    }

    #[test]
    fn silverman_rejects_degenerate_input() {
        assert!(matches!(
            silverman_bandwidth(&cloud_1d(&[1.0])),
            Err(Error::InsufficientData { need: 2, got: 1 })
        ));
        let flat = PointCloud::from_rows(&[vec![1.0, 5.0], vec![2.0, 5.0]]).unwrap();
        assert!(matches!(
            silverman_bandwidth(&flat),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn adaptive_factors_are_one_under_symmetry() {
        let kde = KernelDensityEstimate::fit_adaptive(&cloud_1d(&[-1.0, 1.0])).unwrap();
        for l in kde.local_factors() {
            assert!((l - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_centers_get_wider_kernels_and_unit_geometric_mean() {
        let cloud = cloud_1d(&[0.0, 0.1, 0.2, 0.3, 5.0]);
        let kde = KernelDensityEstimate::fit_adaptive(&cloud).unwrap();
        let factors = kde.local_factors();
        assert!(factors[4] > 1.0, "tail factor {}", factors[4]);
        assert!(factors[4] > factors[1]);
        let log_gm = factors.iter().map(|l| l.ln()).sum::<f64>() / factors.len() as f64;
        assert!(log_gm.abs() < 1e-9);
    }

    #[test]
    fn degenerate_pilot_is_reported() {
        // Two huge bandwidths underflow the product kernel to exactly zero.
        let center = PointCloud::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let pilot =
            KernelDensityEstimate::from_parts(center.clone(), vec![1e308, 1e308], vec![1.0])
                .unwrap();
        assert!(matches!(
            adaptive_bandwidth(&center, &pilot),
            Err(Error::DegeneratePilot(0))
        ));
    }

    #[test]
    fn evaluate_matches_the_normal_peak() {
        let kde =
            KernelDensityEstimate::from_parts(cloud_1d(&[0.0]), vec![1.0], vec![1.0]).unwrap();
        let peak = kde_evaluate(&kde, &[0.0]).unwrap();
        assert!((peak - INV_SQRT_2PI).abs() < 1e-12);
        assert!(matches!(
            kde_evaluate(&kde, &[0.0, 0.0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn evaluate_is_symmetric_for_symmetric_samples() {
        let kde = KernelDensityEstimate::fit_silverman(&cloud_1d(&[-2.0, -1.0, 1.0, 2.0])).unwrap();
        for x in [0.3, 0.9, 2.4] {
            let a = kde_evaluate(&kde, &[x]).unwrap();
            let b = kde_evaluate(&kde, &[-x]).unwrap();
            assert!((a - b).abs() < 1e-12);
            assert!(a >= 0.0);
        }
    }

    #[test]
    fn numeric_mass_is_one() {
        let cloud = PointCloud::from_rows(&[
            vec![0.0, 0.5],
            vec![1.0, -0.5],
            vec![-1.0, 0.2],
            vec![0.4, 1.5],
        ])
        .unwrap();
        let kde = KernelDensityEstimate::fit_adaptive(&cloud).unwrap();
        let window = Window::new(vec![-9.0, -9.0], vec![9.0, 9.0]).unwrap();
        let grid = QuadratureGrid::new(window, 301).unwrap();
        let mass = grid.integrate(|x| kde_evaluate(&kde, x).unwrap());
        assert!((mass - 1.0).abs() < 1e-3, "mass {mass}");
    }

    #[test]
    fn tiny_bandwidth_reproduces_the_centers() {
        let cloud = PointCloud::from_rows(&[vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        let kde =
            KernelDensityEstimate::from_parts(cloud.clone(), vec![1e-12, 1e-12], vec![1.0, 1.0])
                .unwrap();
        let mut rng = crate::rng::derive_rng(5, &[]);
        let draws = kde_sample(&kde, 40, &mut rng).unwrap();
        for i in 0..draws.len() {
            let nearest = (0..cloud.len())
                .map(|j| crate::pointcloud::euclidean(draws.point(i), cloud.point(j)))
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-9, "draw strayed by {nearest}");
        }
        assert!(matches!(
            kde_sample(&kde, 0, &mut rng),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn sample_mean_tracks_center_mean() {
        let cloud = cloud_1d(&[-1.0, 0.0, 0.5, 2.0, 3.5]);
        let kde = KernelDensityEstimate::fit_silverman(&cloud).unwrap();
        let m = 100_000;
        let mut rng = crate::rng::derive_rng(17, &[]);
        let draws = kde_sample(&kde, m, &mut rng).unwrap();
        let sample_mean = (0..m).map(|i| draws.point(i)[0]).sum::<f64>() / m as f64;
        let center_mean = 1.0;
        // Draw variance = center variance + h^2; 4 sigma / sqrt(m) band.
        let var = 4.0 * (0..5).map(|i| (cloud.point(i)[0] - center_mean).powi(2)).sum::<f64>()
            / 5.0
            / m as f64;
        assert!(
            (sample_mean - center_mean).abs() < 4.0 * var.sqrt(),
            "mean {sample_mean}"
        );
    }

    #[test]
    fn sampling_is_reproducible_for_a_fixed_stream() {
        let kde = KernelDensityEstimate::fit_silverman(&cloud_1d(&[0.0, 1.0, 4.0])).unwrap();
        let a = kde_sample(&kde, 25, &mut crate::rng::derive_rng(9, &[1])).unwrap();
        let b = kde_sample(&kde, 25, &mut crate::rng::derive_rng(9, &[1])).unwrap();
        for i in 0..25 {
            assert_eq!(a.point(i), b.point(i));
        }
    }

    #[test]
    fn kolmogorov_distance_of_samples_to_analytic_cdf() {
        let cloud = cloud_1d(&[-1.5, -0.4, 0.0, 0.3, 1.1, 2.2]);
        let kde = KernelDensityEstimate::fit_silverman(&cloud).unwrap();
        let m = 50_000;
        let mut rng = crate::rng::derive_rng(23, &[]);
        let draws = kde_sample(&kde, m, &mut rng).unwrap();
        let mut xs: Vec<f64> = (0..m).map(|i| draws.point(i)[0]).collect();
        xs.sort_by(f64::total_cmp);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let h = kde.bandwidth()[0];
        let cdf = |x: f64| {
            (0..cloud.len())
                .map(|i| normal.cdf((x - cloud.point(i)[0]) / h))
                .sum::<f64>()
                / cloud.len() as f64
        };
        let mut dist: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let theory = cdf(x);
            let lo = i as f64 / m as f64;
            let hi = (i + 1) as f64 / m as f64;
            dist = dist.max((theory - lo).abs()).max((theory - hi).abs());
        }
        assert!(dist < 0.01, "Kolmogorov distance {dist}");
    }

    #[test]
    fn lp_error_vanishes_against_itself_and_rejects_small_p() {
        let kde = KernelDensityEstimate::fit_silverman(&cloud_1d(&[0.0, 1.0])).unwrap();
        let grid =
            QuadratureGrid::new(Window::new(vec![-6.0], vec![7.0]).unwrap(), 257).unwrap();
        let clone = kde.clone();
        let zero = lp_error(&kde, move |x| kde_evaluate(&clone, x).unwrap(), 2.0, &grid).unwrap();
        assert_eq!(zero, 0.0);
        assert!(matches!(
            lp_error(&kde, |_| 0.0, 1.5, &grid),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn quadrature_refinement_is_stable() {
        let cloud = cloud_1d(&[-0.8, 0.1, 0.6, 1.4]);
        let kde = KernelDensityEstimate::fit_silverman(&cloud).unwrap();
        let normal = Normal::new(0.0, 1.0).unwrap();
        let truth = move |x: &[f64]| normal.pdf(x[0]);
        let window = || Window::new(vec![-8.0], vec![8.0]).unwrap();
        let coarse = lp_error(
            &kde,
            truth,
            2.0,
            &QuadratureGrid::new(window(), 512).unwrap(),
        )
        .unwrap();
        let fine = lp_error(
            &kde,
            truth,
            2.0,
            &QuadratureGrid::new(window(), 1024).unwrap(),
        )
        .unwrap();
        assert!((coarse - fine).abs() / fine < 0.02, "{coarse} vs {fine}");
    }
}
