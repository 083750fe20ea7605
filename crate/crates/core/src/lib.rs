//! Topological and geometric statistics of point clouds with resampling
//! confidence intervals.
//!
//! The crate builds Vietoris-Rips and Cech filtrations, computes persistent
//! Betti numbers (plain and diameter-bounded), Euler characteristics, and
//! nearest-neighbor graph lengths, and wraps those statistics in a smoothed
//! bootstrap that produces pointwise and simultaneous confidence bands.

pub mod bootstrap;
pub mod bounded;
pub mod complex;
pub mod density;
pub mod error;
pub mod gf2;
pub mod meb;
pub mod persistence;
pub mod pointcloud;
pub mod rng;
pub mod sim;
pub mod stats;

pub use bootstrap::{
    confidence_band, result_json, run_bootstrap, smoothed_bootstrap, standard_bootstrap,
    unique_fraction, w2_empirical, BandKind, BandSelection, BandwidthRule, BootstrapConfig,
    BootstrapDistribution, BootstrapRun, ConfidenceBand, ResampleMethod,
};
pub use bounded::{
    bounded_boundary_space, bounded_cycle_space, bounded_geometric_lemma_check,
    bounded_persistent_betti, maximal_cliques, ChainBasis,
};
pub use complex::{
    build_cech, build_vr, verify_complex_conditions, ComplexBuilder, ComplexKind,
    ConditionReport, FilteredComplex, Simplex,
};
pub use density::{
    adaptive_bandwidth, kde_evaluate, kde_sample, lp_error, silverman_bandwidth,
    KernelDensityEstimate, QuadratureGrid,
};
pub use error::{Error, Result};
pub use persistence::{
    betti_curve, compute_diagram, euler_characteristic, geometric_lemma_check, persistent_betti,
    persistent_betti_direct, rescale_diagram, truncated_euler, BettiQuery, BoundReport,
    DiagramPoint, PersistenceDiagram,
};
pub use pointcloud::PointCloud;
pub use rng::{derive_rng, derive_seed};
pub use sim::{
    cluster_centers, coverage_experiment, generate, true_mean_estimate, CoverageResult,
    DistributionId, TruthEstimate,
};
pub use stats::{
    add_one_cost, empirical_stabilization_radius, evaluate, knn_total_length,
    sample_homogeneous_poisson, stabilization_tail, PointSampler, StatisticSpec, StatisticValue,
    Window,
};

/// Version reported by the command-line tools and run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
