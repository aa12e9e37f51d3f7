//! Plugin variance estimation, asymptotic confidence intervals and the
//! permutation two-sample test.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::estimator::{bandwidth, l2_divergence, BandwidthRule, EstimatorConfig, KdeEvaluator};
use crate::kernel::KernelSpec;
use crate::oracle::Grid;
use crate::sample::Sample;
use crate::scalar::Scalar;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse standard normal CDF.
///
/// Acklam's rational approximation (relative error about 1e-9) followed by a
/// Newton step against the erfc-based CDF.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("quantile level must lie in (0, 1), got {p}")));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p == 0.5 {
        return Ok(0.0);
    }
    let x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - P_LOW {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let pdf = normal_pdf(x);
    if pdf > 0.0 {
        Ok(x - (normal_cdf(x) - p) / pdf)
    } else {
        Ok(x)
    }
}

/// How the plugin integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceForm {
    /// Sample variances of the density estimates at the evaluation points.
    EmpiricalMoment,
    /// Trapezoid quadrature of `∫p̂³ - (∫p̂²)²` and friends (d ≤ 2).
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate<T> {
    pub sigma2_hat: T,
    pub h_density: T,
    pub n_used: usize,
    pub form: VarianceForm,
    /// The raw plugin value was negative and has been set to zero.
    pub clamped: bool,
}

/// Variance of `values` by Welford's recurrence; exactly zero for a constant
/// sequence.
fn sample_variance<T: Scalar>(values: &[T]) -> T {
    let mut mean = T::zero();
    let mut m2 = T::zero();
    for (k, &v) in values.iter().enumerate() {
        let delta = v - mean;
        mean = mean + delta / T::from_count(k + 1);
        m2 = m2 + delta * (v - mean);
    }
    m2 / T::from_count(values.len())
}

/// Plugin estimate of the asymptotic variance
/// `4[Var_p p(X) + Var_q q(Y) + Var_p q(X) + Var_q p(Y)]`
/// using kernel density estimates at the density-estimation bandwidth.
pub fn variance_plugin<T: Scalar>(
    xv: &Sample<T>,
    yv: &Sample<T>,
    beta: u32,
    kernel: &KernelSpec<T>,
    scale: T,
) -> Result<VarianceEstimate<T>> {
    variance_plugin_with_form(xv, yv, beta, kernel, scale, VarianceForm::EmpiricalMoment)
}

pub fn variance_plugin_with_form<T: Scalar>(
    xv: &Sample<T>,
    yv: &Sample<T>,
    beta: u32,
    kernel: &KernelSpec<T>,
    scale: T,
    form: VarianceForm,
) -> Result<VarianceEstimate<T>> {
    if xv.n() != yv.n() {
        return Err(Error::invalid(format!(
            "variance samples must have equal size, got {} and {}",
            xv.n(),
            yv.n()
        )));
    }
    if xv.dim() != yv.dim() {
        return Err(Error::invalid("variance samples have different dimensions"));
    }
    if xv.n() < 2 {
        return Err(Error::InsufficientSample {
            needed: 2,
            got: xv.n(),
        });
    }
    if beta == 0 {
        return Err(Error::invalid("beta must be a positive integer"));
    }
    if !(scale > T::zero() && scale.is_finite()) {
        return Err(Error::invalid("bandwidth scale must be positive"));
    }
    let n = xv.n();
    let d = xv.dim();
    let h = bandwidth(n, d, beta, BandwidthRule::Density, scale);
    let p_hat = KdeEvaluator::new(xv, kernel, h)?;
    let q_hat = KdeEvaluator::new(yv, kernel, h)?;
    let raw = match form {
        VarianceForm::EmpiricalMoment => {
            let var_pp = sample_variance(&p_hat.eval_sample(xv)?);
            let var_qq = sample_variance(&q_hat.eval_sample(yv)?);
            let var_pq = sample_variance(&q_hat.eval_sample(xv)?);
            let var_qp = sample_variance(&p_hat.eval_sample(yv)?);
            T::lit(4.0) * (var_pp + var_qq + var_pq + var_qp)
        }
        VarianceForm::Quadrature => T::lit(quadrature_plugin(xv, yv, kernel, h, &p_hat, &q_hat)?),
    };
    let clamped = raw < T::zero();
    Ok(VarianceEstimate {
        sigma2_hat: if clamped { T::zero() } else { raw },
        h_density: h,
        n_used: n,
        form,
        clamped,
    })
}

fn quadrature_plugin<T: Scalar>(
    xv: &Sample<T>,
    yv: &Sample<T>,
    kernel: &KernelSpec<T>,
    h: T,
    p_hat: &KdeEvaluator<'_, T>,
    q_hat: &KdeEvaluator<'_, T>,
) -> Result<f64> {
    let d = xv.dim();
    if d > 2 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "the quadrature plugin form is limited to d <= 2",
        });
    }
    let reach = kernel.support_radius().unwrap_or(T::lit(8.0)) * h;
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    for j in 0..d {
        let (min, max) = xv
            .rows()
            .chain(yv.rows())
            .map(|r| r[j])
            .fold((T::infinity(), T::neg_infinity()), |(a, b), v| (a.min(v), b.max(v)));
        lo.push((min - reach).as_f64());
        hi.push((max + reach).as_f64());
    }
    let points = if d == 1 { 4001 } else { 201 };
    let grid = Grid::new(lo, hi, vec![points; d])?;
    let weights = grid.weights();
    let mut m = [0.0f64; 7];
    for (i, &w) in weights.iter().enumerate() {
        let x: Vec<T> = grid.point(i).into_iter().map(T::lit).collect();
        let p = p_hat.eval(&x)?.as_f64();
        let q = q_hat.eval(&x)?.as_f64();
        for (slot, v) in m.iter_mut().zip([p * p, q * q, p * q, p * p * p, q * q * q, q * q * p, p * p * q]) {
            *slot += w * v;
        }
    }
    let [pp, qq, pq, p3, q3, q2p, p2q] = m;
    Ok(4.0 * ((p3 - pp * pp) + (q3 - qq * qq) + (q2p - pq * pq) + (p2q - pq * pq)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval<T> {
    pub lo: T,
    pub hi: T,
    pub alpha: f64,
    pub z: f64,
    pub d_hat: T,
    pub sigma_hat: T,
    pub n: usize,
}

impl<T: Scalar> ConfidenceInterval<T> {
    pub fn half_width(&self) -> T {
        T::lit(self.z) * self.sigma_hat / T::from_count(self.n).sqrt()
    }

    pub fn contains(&self, value: T) -> bool {
        self.lo <= value && value <= self.hi
    }
}

/// `[D̂ - z σ̂/√n, D̂ + z σ̂/√n]` with `z = Φ⁻¹(1 - α/2)`.
pub fn confidence_interval<T: Scalar>(
    d_hat: T,
    sigma_hat: T,
    n: usize,
    alpha: f64,
) -> Result<ConfidenceInterval<T>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if !(sigma_hat >= T::zero()) || !sigma_hat.is_finite() || !d_hat.is_finite() {
        return Err(Error::invalid("estimate and sigma must be finite, sigma nonnegative"));
    }
    let z = normal_quantile(1.0 - alpha / 2.0)?;
    let half = T::lit(z) * sigma_hat / T::from_count(n).sqrt();
    Ok(ConfidenceInterval {
        lo: d_hat - half,
        hi: d_hat + half,
        alpha,
        z,
        d_hat,
        sigma_hat,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationResult<T> {
    pub statistic: T,
    pub p_value: f64,
    pub replicates: usize,
    pub seed: u64,
    pub reject: bool,
    pub alpha: f64,
    /// Permuted statistics at least as large as the observed one.
    pub exceedances: usize,
}

/// Smallest replicate count that can resolve `alpha = 0.05`.
pub const MIN_REPLICATES: usize = 19;

/// Permutation test of `p = q` using the unsplit divergence estimate.
///
/// Replicate `b` (1-based) relabels the pooled sample with a Fisher–Yates
/// shuffle driven by a generator seeded with `seed + b`.
pub fn permutation_test<T: Scalar>(
    x: &Sample<T>,
    y: &Sample<T>,
    config: &EstimatorConfig<T>,
    replicates: usize,
    alpha: f64,
    seed: u64,
) -> Result<PermutationResult<T>> {
    if replicates < MIN_REPLICATES {
        return Err(Error::invalid(format!(
            "need at least {MIN_REPLICATES} permutation replicates, got {replicates}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let config = config.clone().with_split(false);
    let observed = l2_divergence(x, y, &config)?.d_hat;
    let n = x.n();
    let pooled = x.concat(y)?;
    let mut exceedances = 0;
    for b in 1..=replicates {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(b as u64));
        let mut idx: Vec<usize> = (0..2 * n).collect();
        idx.shuffle(&mut rng);
        let xb = pooled.select(&idx[..n]);
        let yb = pooled.select(&idx[n..]);
        if l2_divergence(&xb, &yb, &config)?.d_hat >= observed {
            exceedances += 1;
        }
    }
    let p_value = (1 + exceedances) as f64 / (replicates + 1) as f64;
    Ok(PermutationResult {
        statistic: observed,
        p_value,
        replicates,
        seed,
        reject: p_value <= alpha,
        alpha,
        exceedances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normal_sample(rng: &mut ChaCha8Rng, n: usize, mean: f64) -> Sample<f64> {
        let v: Vec<f64> = (0..n)
            .map(|_| mean + rng.sample::<f64, _>(StandardNormal))
            .collect();
        Sample::from_values(&v).unwrap()
    }

    #[test]
    fn quantile_reference_values() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert!((normal_quantile(0.975).unwrap() - 1.959963984540054).abs() < 1e-9);
        assert!((normal_quantile(0.95).unwrap() - 1.6448536269514722).abs() < 1e-9);
        assert!((normal_quantile(0.001).unwrap() + 3.090232306167813).abs() < 1e-9);
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let x = normal_quantile(p).unwrap();
            assert!((normal_cdf(x) - p).abs() < 1e-14, "p={p}");
        }
    }

    #[test]
    fn interval_examples() {
        let ci = confidence_interval(0.5f64, 1.0, 100, 0.10).unwrap();
        assert!((ci.lo - 0.335515).abs() < 1e-5);
        assert!((ci.hi - 0.664485).abs() < 1e-5);
        let ci = confidence_interval(0.2, 0.0, 10, 0.05).unwrap();
        assert_eq!((ci.lo, ci.hi), (0.2, 0.2));
        let a = confidence_interval(0.0, 2.0, 100, 0.05).unwrap();
        let b = confidence_interval(0.0, 2.0, 400, 0.05).unwrap();
        assert_eq!(a.half_width(), 2.0 * b.half_width());
        assert!(confidence_interval(0.0, 1.0, 10, 1.0).is_err());
        assert!(confidence_interval(0.0, 1.0, 10, 0.0).is_err());
    }

    #[test]
    fn constant_samples_have_zero_variance() {
        let x = Sample::from_values(&[0.3; 50]).unwrap();
        let y = Sample::from_values(&[-1.2; 50]).unwrap();
        let k = KernelSpec::uniform(1).unwrap();
        let v = variance_plugin(&x, &y, 1, &k, 1.0).unwrap();
        assert_eq!(v.sigma2_hat, 0.0);
        assert!(!v.clamped);
        assert_eq!(v.h_density, bandwidth(50, 1, 1, BandwidthRule::Density, 1.0));
        assert_eq!(v.n_used, 50);
    }

    #[test]
    fn variance_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = normal_sample(&mut rng, 300, 0.0);
        let y = normal_sample(&mut rng, 300, 1.0);
        let k = KernelSpec::legendre(2, 1).unwrap();
        let v = variance_plugin(&x, &y, 1, &k, 1.0).unwrap();
        let mut idx: Vec<usize> = (0..300).collect();
        idx.shuffle(&mut rng);
        let vp = variance_plugin(&x.select(&idx), &y.select(&idx), 1, &k, 1.0).unwrap();
        assert!((v.sigma2_hat - vp.sigma2_hat).abs() < 1e-12 * v.sigma2_hat);
    }

    #[test]
    fn variance_forms_agree_roughly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = normal_sample(&mut rng, 4000, 0.0);
        let y = normal_sample(&mut rng, 4000, 1.0);
        let k = KernelSpec::uniform(1).unwrap();
        let a = variance_plugin(&x, &y, 1, &k, 1.0).unwrap();
        let b = variance_plugin_with_form(&x, &y, 1, &k, 1.0, VarianceForm::Quadrature).unwrap();
        assert_eq!(b.form, VarianceForm::Quadrature);
        // Both estimate σ² ≈ 0.2413 for this setup.
        assert!((a.sigma2_hat - 0.2413).abs() < 0.05, "{}", a.sigma2_hat);
        assert!((b.sigma2_hat - 0.2413).abs() < 0.05, "{}", b.sigma2_hat);
    }

    #[test]
    fn variance_input_errors() {
        let x = Sample::from_values(&[0.0]).unwrap();
        let k = KernelSpec::uniform(1).unwrap();
        assert!(matches!(
            variance_plugin(&x, &x, 1, &k, 1.0),
            Err(Error::InsufficientSample { .. })
        ));
        let y = Sample::from_values(&[0.0, 1.0]).unwrap();
        assert!(variance_plugin(&x, &y, 1, &k, 1.0).is_err());
        let x3 = Sample::from_rows(&[[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]).unwrap();
        let k3 = KernelSpec::uniform(3).unwrap();
        assert!(matches!(
            variance_plugin_with_form(&x3, &x3, 1, &k3, 1.0, VarianceForm::Quadrature),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn permutation_basic_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = normal_sample(&mut rng, 40, 0.0);
        let y = normal_sample(&mut rng, 40, 0.0);
        let cfg = EstimatorConfig::new(1, KernelSpec::legendre(2, 1).unwrap());
        let r = permutation_test(&x, &y, &cfg, 99, 0.05, 17).unwrap();
        assert!(r.p_value >= 1.0 / 100.0);
        assert_eq!(r.p_value, (1 + r.exceedances) as f64 / 100.0);
        assert_eq!(r.reject, r.p_value <= 0.05);
        let again = permutation_test(&x, &y, &cfg, 99, 0.05, 17).unwrap();
        assert_eq!(r, again);
        let unsplit = l2_divergence(&x, &y, &cfg.clone().with_split(false)).unwrap();
        assert_eq!(r.statistic, unsplit.d_hat);

        assert!(permutation_test(&x, &y, &cfg, 18, 0.05, 1).is_err());
        assert!(permutation_test(&x, &y, &cfg, 19, 0.0, 1).is_err());
    }

    #[test]
    fn identical_samples_never_reject_at_low_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = normal_sample(&mut rng, 30, 0.0);
        let cfg = EstimatorConfig::new(1, KernelSpec::legendre(2, 1).unwrap());
        let r = permutation_test(&x, &x, &cfg, 199, 0.05, 3).unwrap();
        assert!(r.p_value >= 1.0 / 200.0);
        assert!(!r.reject);
    }

    #[test]
    fn separated_samples_reject() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = normal_sample(&mut rng, 200, 0.0);
        let y = normal_sample(&mut rng, 200, 3.0);
        let cfg = EstimatorConfig::new(1, KernelSpec::legendre(2, 1).unwrap());
        let r = permutation_test(&x, &y, &cfg, 199, 0.05, 5).unwrap();
        assert!(r.reject);
        assert_eq!(r.p_value, 1.0 / 200.0);
    }

    #[test]
    fn sample_variance_matches_two_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let v: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
        let m = v.iter().sum::<f64>() / 500.0;
        let two_pass = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / 500.0;
        assert!((sample_variance(&v) - two_pass).abs() < 1e-14);
    }
}
