//! Seeded Monte Carlo experiments on the two-Gaussian setup.
//!
//! Every number in a report is a pure function of the configuration: trial
//! `t` at dimension `d` and size `n` draws its data from a generator whose seed
//! is a hash of `(seed, d, n, t)`, so trials can be run in any order.
//!
//! Report columns, in order:
//!
//! ```text
//! experiment,d,n,trials,kernel,beta,alpha,seed,bandwidth_scale,mean1,mean2,
//! variance,replicates,sigma,target,h,mean_estimate,sd_estimate,
//! median_rel_err,q1_rel_err,q3_rel_err,mean_rel_err,rescaled_median,
//! coverage,coverage_se,ks,ks_centered,rejection_rate,rejection_se
//! ```
//!
//! `n` is the number of points per estimator term. Columns that do not apply
//! to an experiment are left empty.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::estimator::{l2_divergence, EstimatorConfig};
use crate::inference::{confidence_interval, normal_cdf, permutation_test, variance_plugin};
use crate::kernel::KernelSpec;
use crate::oracle::{gaussian_grids, gaussian_l2, quadrature_functionals, GaussianSpec, Which};
use crate::sample::Sample;

/// Smallest trial count accepted for a distributional summary.
pub const MIN_TRIALS: usize = 50;
pub const MAX_DIM: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Convergence,
    Coverage,
    Normality,
    BerryEsseen,
    PermutationLevel,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Convergence => "convergence",
            Experiment::Coverage => "coverage",
            Experiment::Normality => "normality",
            Experiment::BerryEsseen => "berry_esseen",
            Experiment::PermutationLevel => "permutation_level",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "convergence" => Experiment::Convergence,
            "coverage" => Experiment::Coverage,
            "normality" => Experiment::Normality,
            "berry_esseen" => Experiment::BerryEsseen,
            "permutation_level" => Experiment::PermutationLevel,
            other => return Err(Error::invalid(format!("unknown experiment '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dims: Vec<usize>,
    /// Points per estimator term.
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub beta: u32,
    pub kernel: String,
    pub alpha: f64,
    pub seed: u64,
    /// Every coordinate of the first mean.
    pub mean1: f64,
    /// Every coordinate of the second mean.
    pub mean2: f64,
    pub variance: f64,
    pub bandwidth_scale: f64,
    /// Permutation replicates per test.
    pub replicates: usize,
    /// Known asymptotic standard deviation; replaces the quadrature value in
    /// the normality experiment.
    pub sigma: Option<f64>,
}

impl ExperimentConfig {
    /// Defaults: d = 1, n ∈ {500, 2000, 8000}, 200 trials, β = 1, means 0 and
    /// 1 (0 and 0 for the permutation experiment), unit variance. Convergence
    /// and coverage use the Gaussian kernel, the others `legendre:2β`.
    pub fn new(experiment: Experiment) -> Self {
        let null = experiment == Experiment::PermutationLevel;
        let mut cfg = Self {
            experiment,
            dims: vec![1],
            n_grid: vec![500, 2000, 8000],
            trials: 200,
            beta: 1,
            kernel: String::new(),
            alpha: if null { 0.05 } else { 0.10 },
            seed: 0,
            mean1: 0.0,
            mean2: if null { 0.0 } else { 1.0 },
            variance: 1.0,
            bandwidth_scale: 1.0,
            replicates: 199,
            sigma: None,
        };
        cfg.kernel = cfg.default_kernel();
        cfg
    }

    fn default_kernel(&self) -> String {
        match self.experiment {
            Experiment::Convergence | Experiment::Coverage => "gauss".to_string(),
            _ => format!("legendre:{}", 2 * self.beta),
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. `experiment` is
    /// required, every other key falls back to [`ExperimentConfig::new`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key = value, got '{line}'"),
            })?;
            pairs.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let experiment = pairs
            .iter()
            .find(|(_, k, _)| k == "experiment")
            .ok_or_else(|| Error::invalid("config does not set 'experiment'"))?;
        let experiment: Experiment = experiment.2.parse()?;
        let mut cfg = Self::new(experiment);
        let mut kernel_set = false;
        let mut seen = std::collections::HashSet::new();
        for (line, key, value) in &pairs {
            if !seen.insert(key.clone()) {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("duplicate key '{key}'"),
                });
            }
            let bad = |what: &str| Error::Parse {
                line: *line,
                message: format!("invalid {what} for '{key}': '{value}'"),
            };
            match key.as_str() {
                "experiment" => {}
                "dims" => cfg.dims = parse_list(value).map_err(|_| bad("integer list"))?,
                "n_grid" => cfg.n_grid = parse_list(value).map_err(|_| bad("integer list"))?,
                "trials" => cfg.trials = value.parse().map_err(|_| bad("integer"))?,
                "beta" => cfg.beta = value.parse().map_err(|_| bad("integer"))?,
                "kernel" => {
                    cfg.kernel = value.clone();
                    kernel_set = true;
                }
                "alpha" => cfg.alpha = value.parse().map_err(|_| bad("number"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("integer"))?,
                "mean1" => cfg.mean1 = value.parse().map_err(|_| bad("number"))?,
                "mean2" => cfg.mean2 = value.parse().map_err(|_| bad("number"))?,
                "variance" => cfg.variance = value.parse().map_err(|_| bad("number"))?,
                "bandwidth_scale" => cfg.bandwidth_scale = value.parse().map_err(|_| bad("number"))?,
                "replicates" => cfg.replicates = value.parse().map_err(|_| bad("integer"))?,
                "sigma" => cfg.sigma = Some(value.parse().map_err(|_| bad("number"))?),
                _ => {
                    return Err(Error::Parse {
                        line: *line,
                        message: format!("unknown key '{key}'"),
                    })
                }
            }
        }
        if !kernel_set {
            cfg.kernel = cfg.default_kernel();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::invalid(format!(
                "trials must be at least {MIN_TRIALS}, got {}",
                self.trials
            )));
        }
        if self.dims.is_empty() || self.n_grid.is_empty() {
            return Err(Error::invalid("dims and n_grid must be non-empty"));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d == 0 || d > MAX_DIM) {
            return Err(Error::invalid(format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 8 || n % 2 != 0) {
            return Err(Error::invalid(format!("sample size {n} must be even and at least 8")));
        }
        if self.beta == 0 {
            return Err(Error::invalid("beta must be a positive integer"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.bandwidth_scale > 0.0 && self.bandwidth_scale.is_finite()) {
            return Err(Error::invalid("bandwidth_scale must be positive"));
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::invalid("sigma must be positive"));
            }
        }
        for &d in &self.dims {
            KernelSpec::<f64>::parse(&self.kernel, d)?;
            let spec = self.setup(d)?;
            match self.experiment {
                Experiment::Convergence | Experiment::Coverage if gaussian_l2(&spec) == 0.0 => {
                    return Err(Error::invalid(
                        "identical means give D = 0 and an undefined relative error",
                    ))
                }
                Experiment::Normality if d > 2 && self.sigma.is_none() => {
                    return Err(Error::UnsupportedDimension {
                        dim: d,
                        reason: "quadrature variance needs d <= 2; set sigma",
                    })
                }
                Experiment::BerryEsseen if d != 1 => {
                    return Err(Error::UnsupportedDimension {
                        dim: d,
                        reason: "the self-normalized experiment is one-dimensional",
                    })
                }
                _ => {}
            }
        }
        if self.experiment == Experiment::PermutationLevel {
            permutation_test_ready(self.replicates)?;
        }
        Ok(())
    }

    /// The Gaussian pair at dimension `d`.
    pub fn setup(&self, d: usize) -> Result<GaussianSpec<f64>> {
        GaussianSpec::new(vec![self.mean1; d], vec![self.mean2; d], self.variance)
    }

    fn estimator(&self, d: usize) -> Result<EstimatorConfig<f64>> {
        let kernel = KernelSpec::parse(&self.kernel, d)?;
        let cfg = EstimatorConfig::new(self.beta, kernel).with_scale(self.bandwidth_scale);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn permutation_test_ready(replicates: usize) -> Result<()> {
    if replicates < crate::inference::MIN_REPLICATES {
        return Err(Error::invalid(format!(
            "replicates must be at least {}",
            crate::inference::MIN_REPLICATES
        )));
    }
    Ok(())
}

/// Whether `text` assigns `key` on some non-comment line.
pub fn declares_key(text: &str, key: &str) -> bool {
    text.lines().any(|l| {
        let l = l.split('#').next().unwrap_or("");
        l.split_once('=').is_some_and(|(k, _)| k.trim() == key)
    })
}

fn parse_list(s: &str) -> std::result::Result<Vec<usize>, std::num::ParseIntError> {
    s.split(',').map(|t| t.trim().parse()).collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless seed for one trial.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6A09_E667_F3BC_C908, |h, &p| splitmix64(h ^ splitmix64(p)))
}

/// `n` independent draws from one component of `spec`.
pub fn sample_gaussian(spec: &GaussianSpec<f64>, which: Which, n: usize, seed: u64) -> Result<Sample<f64>> {
    if n == 0 {
        return Err(Error::InsufficientSample { needed: 1, got: 0 });
    }
    let tag = match which {
        Which::First => 1,
        Which::Second => 2,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, tag]));
    let sd = spec.variance.sqrt();
    let mean = spec.mean(which);
    let mut data = Vec::with_capacity(n * spec.dim);
    for _ in 0..n {
        for &m in mean {
            let z: f64 = rng.sample(StandardNormal);
            data.push(m + sd * z);
        }
    }
    Sample::new(data, n, spec.dim)
}

/// One report line. `None` cells are written empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportRow {
    pub d: usize,
    pub n: usize,
    pub sigma: Option<f64>,
    pub target: f64,
    pub h: f64,
    pub mean_estimate: f64,
    pub sd_estimate: f64,
    pub median_rel_err: Option<f64>,
    pub q1_rel_err: Option<f64>,
    pub q3_rel_err: Option<f64>,
    pub mean_rel_err: Option<f64>,
    pub rescaled_median: Option<f64>,
    pub coverage: Option<f64>,
    pub coverage_se: Option<f64>,
    pub ks: Option<f64>,
    pub ks_centered: Option<f64>,
    pub rejection_rate: Option<f64>,
    pub rejection_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub warnings: Vec<String>,
}

pub const REPORT_HEADER: &str = "experiment,d,n,trials,kernel,beta,alpha,seed,bandwidth_scale,mean1,mean2,\
variance,replicates,sigma,target,h,mean_estimate,sd_estimate,median_rel_err,q1_rel_err,q3_rel_err,\
mean_rel_err,rescaled_median,coverage,coverage_se,ks,ks_centered,rejection_rate,rejection_se";

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ExperimentReport {
    pub fn row(&self, d: usize, n: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.d == d && r.n == n)
    }

    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        out.push_str(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            let fields = [
                c.experiment.name().to_string(),
                r.d.to_string(),
                r.n.to_string(),
                c.trials.to_string(),
                c.kernel.clone(),
                c.beta.to_string(),
                c.alpha.to_string(),
                c.seed.to_string(),
                c.bandwidth_scale.to_string(),
                c.mean1.to_string(),
                c.mean2.to_string(),
                c.variance.to_string(),
                c.replicates.to_string(),
                cell(r.sigma),
                r.target.to_string(),
                r.h.to_string(),
                r.mean_estimate.to_string(),
                r.sd_estimate.to_string(),
                cell(r.median_rel_err),
                cell(r.q1_rel_err),
                cell(r.q3_rel_err),
                cell(r.mean_rel_err),
                cell(r.rescaled_median),
                cell(r.coverage),
                cell(r.coverage_se),
                cell(r.ks),
                cell(r.ks_centered),
                cell(r.rejection_rate),
                cell(r.rejection_se),
            ];
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0).max(1.0)).sqrt())
}

/// One-sample Kolmogorov–Smirnov distance between the empirical CDF of
/// `values` and the standard normal CDF.
pub fn ks_distance(values: &[f64]) -> f64 {
    let v = sorted(values);
    let m = v.len() as f64;
    v.iter().enumerate().fold(0.0, |acc, (i, &z)| {
        let f = normal_cdf(z);
        acc.max((i + 1) as f64 / m - f).max(f - i as f64 / m)
    })
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.experiment {
        Experiment::Convergence => run_convergence(config),
        Experiment::Coverage => run_coverage(config),
        Experiment::Normality => run_normality(config),
        Experiment::BerryEsseen => run_berry_esseen(config),
        Experiment::PermutationLevel => run_permutation_level(config),
    }
}

fn expect(config: &ExperimentConfig, e: Experiment) -> Result<()> {
    if config.experiment != e {
        return Err(Error::invalid(format!(
            "config is for '{}', not '{}'",
            config.experiment.name(),
            e.name()
        )));
    }
    config.validate()
}

fn initial_warnings(config: &ExperimentConfig) -> Result<Vec<String>> {
    let mut w = Vec::new();
    for &d in &config.dims {
        for msg in config.estimator(d)?.warnings() {
            if !w.contains(&msg) {
                w.push(msg);
            }
        }
    }
    Ok(w)
}

struct Draw {
    x: Sample<f64>,
    y: Sample<f64>,
}

fn draw(config: &ExperimentConfig, spec: &GaussianSpec<f64>, rows: usize, d: usize, n: usize, t: usize) -> Result<Draw> {
    let seed = derive_seed(&[config.seed, d as u64, n as u64, t as u64]);
    Ok(Draw {
        x: sample_gaussian(spec, Which::First, rows, seed)?,
        y: sample_gaussian(spec, Which::Second, rows, seed)?,
    })
}

fn base_row(d: usize, n: usize, target: f64, h: f64, estimates: &[f64]) -> ReportRow {
    let (mean_estimate, sd_estimate) = mean_sd(estimates);
    ReportRow {
        d,
        n,
        target,
        h,
        mean_estimate,
        sd_estimate,
        ..ReportRow::default()
    }
}

/// Relative error `|D̂ - D| / D` across trials: median, quartiles and the
/// `√n`-rescaled median.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(config, Experiment::Convergence)?;
    let mut warnings = initial_warnings(config)?;
    let mut rows = Vec::new();
    for &d in &config.dims {
        let spec = config.setup(d)?;
        let target = gaussian_l2(&spec);
        let est = config.estimator(d)?;
        for &n in &config.n_grid {
            let mut estimates = Vec::with_capacity(config.trials);
            for t in 0..config.trials {
                let s = draw(config, &spec, 2 * n, d, n, t)?;
                estimates.push(l2_divergence(&s.x, &s.y, &est)?.d_hat);
            }
            let rel: Vec<f64> = estimates.iter().map(|e| (e - target).abs() / target).collect();
            let sr = sorted(&rel);
            let median = quantile_sorted(&sr, 0.5);
            let mut row = base_row(d, n, target, est.bandwidth_for(n, d), &estimates);
            row.median_rel_err = Some(median);
            row.q1_rel_err = Some(quantile_sorted(&sr, 0.25));
            row.q3_rel_err = Some(quantile_sorted(&sr, 0.75));
            row.mean_rel_err = Some(mean_sd(&rel).0);
            row.rescaled_median = Some((n as f64).sqrt() * median);
            rows.push(row);
        }
    }
    for &n in &config.n_grid {
        let by_d: Vec<(usize, f64)> = config
            .dims
            .iter()
            .filter_map(|&d| rows.iter().find(|r| r.d == d && r.n == n))
            .map(|r| (r.d, r.median_rel_err.unwrap_or(0.0)))
            .collect();
        for w in by_d.windows(2) {
            if w[1].0 > w[0].0 && w[1].1 < w[0].1 {
                warnings.push(format!(
                    "median relative error at n={n} decreases from d={} to d={}",
                    w[0].0, w[1].0
                ));
            }
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        rows,
        warnings,
    })
}

/// Per trial: `2n` points per distribution for the estimate and a fresh `n`
/// for the variance plugin.
fn self_normalized_trial(
    config: &ExperimentConfig,
    spec: &GaussianSpec<f64>,
    est: &EstimatorConfig<f64>,
    d: usize,
    n: usize,
    t: usize,
) -> Result<(f64, f64)> {
    let s = draw(config, spec, 3 * n, d, n, t)?;
    let d_hat = l2_divergence(&s.x.slice_rows(0, 2 * n)?, &s.y.slice_rows(0, 2 * n)?, est)?.d_hat;
    let var = variance_plugin(
        &s.x.slice_rows(2 * n, 3 * n)?,
        &s.y.slice_rows(2 * n, 3 * n)?,
        config.beta,
        &est.kernel,
        config.bandwidth_scale,
    )?;
    Ok((d_hat, var.sigma2_hat.sqrt()))
}

/// Fraction of trials whose `1 - α` interval contains the true divergence.
pub fn run_coverage(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(config, Experiment::Coverage)?;
    let warnings = initial_warnings(config)?;
    let mut rows = Vec::new();
    for &d in &config.dims {
        let spec = config.setup(d)?;
        let target = gaussian_l2(&spec);
        let est = config.estimator(d)?;
        for &n in &config.n_grid {
            let mut estimates = Vec::with_capacity(config.trials);
            let mut hits = 0usize;
            for t in 0..config.trials {
                let (d_hat, sigma_hat) = self_normalized_trial(config, &spec, &est, d, n, t)?;
                let ci = confidence_interval(d_hat, sigma_hat, n, config.alpha)?;
                if ci.contains(target) {
                    hits += 1;
                }
                estimates.push(d_hat);
            }
            let cov = hits as f64 / config.trials as f64;
            let mut row = base_row(d, n, target, est.bandwidth_for(n, d), &estimates);
            row.coverage = Some(cov);
            row.coverage_se = Some((cov * (1.0 - cov) / config.trials as f64).sqrt());
            rows.push(row);
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        rows,
        warnings,
    })
}

/// Asymptotic standard deviation of `√n (D̂ - D)` from grid quadrature, or
/// the configured override.
pub fn oracle_sigma(config: &ExperimentConfig, d: usize) -> Result<f64> {
    if let Some(s) = config.sigma {
        return Ok(s);
    }
    let points = if d == 1 { 4001 } else { 601 };
    let (p, q, _) = gaussian_grids(&config.setup(d)?, points)?;
    Ok(quadrature_functionals(&p, &q)?.sigma2.sqrt())
}

/// Kolmogorov–Smirnov distance of `√n (D̂ - D)/σ` to the standard normal,
/// with `σ` known.
pub fn run_normality(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(config, Experiment::Normality)?;
    let mut warnings = initial_warnings(config)?;
    let mut rows = Vec::new();
    for &d in &config.dims {
        if 4 * config.beta as usize <= d {
            warnings.push(format!(
                "beta = {} <= d/4 at d = {d}; the estimator is not expected to be asymptotically normal",
                config.beta
            ));
        }
        let spec = config.setup(d)?;
        let target = gaussian_l2(&spec);
        let sigma = oracle_sigma(config, d)?;
        let est = config.estimator(d)?;
        for &n in &config.n_grid {
            let mut estimates = Vec::with_capacity(config.trials);
            for t in 0..config.trials {
                let s = draw(config, &spec, 2 * n, d, n, t)?;
                estimates.push(l2_divergence(&s.x, &s.y, &est)?.d_hat);
            }
            let root_n = (n as f64).sqrt();
            let z: Vec<f64> = estimates.iter().map(|e| root_n * (e - target) / sigma).collect();
            let zbar = mean_sd(&z).0;
            let centered: Vec<f64> = z.iter().map(|v| v - zbar).collect();
            let mut row = base_row(d, n, target, est.bandwidth_for(n, d), &estimates);
            row.sigma = Some(sigma);
            row.ks = Some(ks_distance(&z));
            row.ks_centered = Some(ks_distance(&centered));
            rows.push(row);
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        rows,
        warnings,
    })
}

/// Kolmogorov–Smirnov distance of the self-normalized `√n (D̂ - D)/σ̂` to the
/// standard normal.
pub fn run_berry_esseen(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(config, Experiment::BerryEsseen)?;
    let warnings = initial_warnings(config)?;
    let mut rows = Vec::new();
    for &d in &config.dims {
        let spec = config.setup(d)?;
        let target = gaussian_l2(&spec);
        let est = config.estimator(d)?;
        for &n in &config.n_grid {
            let mut estimates = Vec::with_capacity(config.trials);
            let mut z = Vec::with_capacity(config.trials);
            let root_n = (n as f64).sqrt();
            for t in 0..config.trials {
                let (d_hat, sigma_hat) = self_normalized_trial(config, &spec, &est, d, n, t)?;
                estimates.push(d_hat);
                z.push(root_n * (d_hat - target) / sigma_hat);
            }
            let mut row = base_row(d, n, target, est.bandwidth_for(n, d), &estimates);
            row.ks = Some(ks_distance(&z));
            rows.push(row);
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        rows,
        warnings,
    })
}

/// Rejection rate of the permutation test over repeated draws. `n` is the
/// size of each sample; the test statistic uses all points in every term.
pub fn run_permutation_level(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(config, Experiment::PermutationLevel)?;
    let warnings = initial_warnings(config)?;
    let mut rows = Vec::new();
    for &d in &config.dims {
        let spec = config.setup(d)?;
        let target = gaussian_l2(&spec);
        let est = config.estimator(d)?.with_split(false);
        for &n in &config.n_grid {
            let mut estimates = Vec::with_capacity(config.trials);
            let mut rejections = 0usize;
            for t in 0..config.trials {
                let s = draw(config, &spec, n, d, n, t)?;
                let test_seed = derive_seed(&[config.seed, d as u64, n as u64, t as u64, 3]);
                let res = permutation_test(&s.x, &s.y, &est, config.replicates, config.alpha, test_seed)?;
                if res.reject {
                    rejections += 1;
                }
                estimates.push(res.statistic);
            }
            let rate = rejections as f64 / config.trials as f64;
            let mut row = base_row(d, n, target, est.bandwidth_for(n, d), &estimates);
            row.rejection_rate = Some(rate);
            row.rejection_se = Some((rate * (1.0 - rate) / config.trials as f64).sqrt());
            rows.push(row);
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        rows,
        warnings,
    })
}
