//! Estimation of the L₂² divergence `D(p, q) = ∫(p - q)²` between two
//! continuous distributions from samples.
//!
//! The estimator combines kernel U-statistics for `∫p²`, `∫q²` and `∫pq` with
//! an undersmoothed bandwidth `h ∝ n^{-2/(4β+d)}`. On top of it the crate
//! provides a plugin variance estimate and asymptotic confidence intervals, a
//! permutation two-sample test, quadrature ground truth, and a seeded Monte
//! Carlo harness.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below are the double-precision instantiations used by the CLI and
//! the experiment harness.

pub mod cli;
pub mod error;
pub mod estimator;
pub mod inference;
pub mod kernel;
pub mod oracle;
pub mod quadrature;
pub mod sample;
pub mod scalar;
pub mod simulate;

pub use error::{Error, Result};
pub use estimator::{
    bandwidth, kde, l2_divergence, BandwidthRule, DivergenceEstimate, EstimatorConfig,
    KdeEvaluator,
};
pub use inference::{
    confidence_interval, normal_cdf, normal_quantile, permutation_test, variance_plugin,
    ConfidenceInterval, PermutationResult, VarianceEstimate, VarianceForm,
};
pub use kernel::{check_moments, make_order_kernel, BaseKernel, Kernel1D, KernelSpec, MomentReport};
pub use oracle::{gaussian_l2, GaussianSpec, Grid, GridDensity, Which};
pub use sample::Sample;
pub use scalar::Scalar;

pub type Sample64 = Sample<f64>;
pub type Sample32 = Sample<f32>;
pub type Kernel1D64 = Kernel1D<f64>;
pub type KernelSpec64 = KernelSpec<f64>;
pub type KernelSpec32 = KernelSpec<f32>;
pub type EstimatorConfig64 = EstimatorConfig<f64>;
pub type EstimatorConfig32 = EstimatorConfig<f32>;
pub type DivergenceEstimate64 = DivergenceEstimate<f64>;
pub type DivergenceEstimate32 = DivergenceEstimate<f32>;
pub type VarianceEstimate64 = VarianceEstimate<f64>;
pub type ConfidenceInterval64 = ConfidenceInterval<f64>;
pub type PermutationResult64 = PermutationResult<f64>;
pub type GaussianSpec64 = GaussianSpec<f64>;
