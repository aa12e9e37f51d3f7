//! Kernel U-statistics for `θ_p = ∫p²`, `θ_pq = ∫pq` and the combined
//! L₂² divergence estimate, plus bandwidth rules and pointwise density
//! estimates.
//!
//! All pair sums are exact double sums. For compactly supported kernels the
//! rows are visited in order of their first coordinate and a pair is skipped
//! once that coordinate alone puts it outside the support; skipped pairs are
//! exactly the ones whose kernel value is zero.

use crate::error::{Error, Result};
use crate::kernel::{BaseKernel, KernelSpec};
use crate::sample::Sample;
use crate::scalar::Scalar;

/// Exponent family used by [`bandwidth`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandwidthRule {
    /// `n^{-2/(4β+d)}`: undersmoothed, used for the divergence terms.
    Divergence,
    /// `n^{-1/(2β+d)}`: density-estimation rate, used for the variance plugin.
    Density,
}

pub fn bandwidth<T: Scalar>(n: usize, d: usize, beta: u32, rule: BandwidthRule, scale: T) -> T {
    let b = beta as f64;
    let d = d as f64;
    let exponent = match rule {
        BandwidthRule::Divergence => -2.0 / (4.0 * b + d),
        BandwidthRule::Density => -1.0 / (2.0 * b + d),
    };
    scale * T::lit((n as f64).powf(exponent))
}

#[derive(Debug, Clone)]
pub struct EstimatorConfig<T> {
    /// Assumed smoothness of the densities.
    pub beta: u32,
    /// Feed disjoint halves of each sample to the quadratic and bilinear terms.
    pub split: bool,
    pub bandwidth_override: Option<T>,
    pub bandwidth_scale: T,
    pub kernel: KernelSpec<T>,
}

impl<T: Scalar> EstimatorConfig<T> {
    /// Splitting on, unit bandwidth scale, no override.
    pub fn new(beta: u32, kernel: KernelSpec<T>) -> Self {
        Self {
            beta,
            split: true,
            bandwidth_override: None,
            bandwidth_scale: T::one(),
            kernel,
        }
    }

    pub fn with_split(mut self, split: bool) -> Self {
        self.split = split;
        self
    }

    pub fn with_bandwidth(mut self, h: T) -> Self {
        self.bandwidth_override = Some(h);
        self
    }

    pub fn with_scale(mut self, scale: T) -> Self {
        self.bandwidth_scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta == 0 {
            return Err(Error::invalid("beta must be a positive integer"));
        }
        if !(self.bandwidth_scale > T::zero() && self.bandwidth_scale.is_finite()) {
            return Err(Error::invalid("bandwidth scale must be positive"));
        }
        if let Some(h) = self.bandwidth_override {
            if !(h > T::zero() && h.is_finite()) {
                return Err(Error::invalid("bandwidth must be positive"));
            }
        }
        Ok(())
    }

    /// Non-fatal mismatches between the kernel and the smoothness assumption.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let need = 2 * self.beta as usize;
        match self.kernel.base() {
            BaseKernel::Gaussian => out.push(
                "gauss kernel has unbounded support and order 1; it does not satisfy the kernel assumptions"
                    .to_string(),
            ),
            BaseKernel::Polynomial(k) if k.order() < need => out.push(format!(
                "kernel {} has order {} < 2*beta = {need}",
                self.kernel.name(),
                k.order()
            )),
            _ => {}
        }
        out
    }

    /// Bandwidth used when each term sees `n_per_term` points of dimension `d`.
    pub fn bandwidth_for(&self, n_per_term: usize, d: usize) -> T {
        self.bandwidth_override.unwrap_or_else(|| {
            bandwidth(n_per_term, d, self.beta, BandwidthRule::Divergence, self.bandwidth_scale)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceEstimate<T> {
    pub d_hat: T,
    pub theta_p: T,
    pub theta_q: T,
    pub theta_pq: T,
    pub h: T,
    pub n_per_term: usize,
    pub split: bool,
}

fn check_kernel<T: Scalar>(kernel: &KernelSpec<T>, d: usize) -> Result<()> {
    if kernel.dim() != d {
        return Err(Error::invalid(format!(
            "kernel dimension {} does not match sample dimension {d}",
            kernel.dim()
        )));
    }
    Ok(())
}

fn check_bandwidth<T: Scalar>(h: T) -> Result<()> {
    if !(h > T::zero() && h.is_finite()) {
        return Err(Error::invalid("bandwidth must be positive and finite"));
    }
    Ok(())
}

/// `1/(n(n-1)) Σ_{i≠j} h^{-d} K((X_i - X_j)/h)`.
pub fn quadratic_term<T: Scalar>(x: &Sample<T>, kernel: &KernelSpec<T>, h: T) -> Result<T> {
    if x.n() < 2 {
        return Err(Error::InsufficientSample {
            needed: 2,
            got: x.n(),
        });
    }
    check_kernel(kernel, x.dim())?;
    check_bandwidth(h)?;
    let n = x.n();
    let half_sum = if kernel.is_compact() {
        let sorted = x.sorted_by_first();
        let mut total = T::zero();
        for (a, &(ka, i)) in sorted.iter().enumerate() {
            let xi = x.row(i);
            let mut row = T::zero();
            for &(kb, j) in &sorted[a + 1..] {
                if (kb - ka) / h >= T::one() {
                    break;
                }
                row = row + kernel.eval_diff(xi, x.row(j), h);
            }
            total = total + row;
        }
        total
    } else {
        let mut total = T::zero();
        for i in 0..n {
            let xi = x.row(i);
            let mut row = T::zero();
            for j in i + 1..n {
                row = row + kernel.eval_diff(xi, x.row(j), h);
            }
            total = total + row;
        }
        total
    };
    let nf = T::from_count(n);
    let pairs = nf * (nf - T::one());
    Ok((half_sum + half_sum) / pairs / h.powi(x.dim() as i32))
}

/// `1/n² Σ_{i,j} h^{-d} K((X_i - Y_j)/h)`, diagonal pairs included.
pub fn bilinear_term<T: Scalar>(
    x: &Sample<T>,
    y: &Sample<T>,
    kernel: &KernelSpec<T>,
    h: T,
) -> Result<T> {
    if x.n() != y.n() {
        return Err(Error::invalid(format!(
            "bilinear term needs equal sample sizes, got {} and {}",
            x.n(),
            y.n()
        )));
    }
    if x.dim() != y.dim() {
        return Err(Error::invalid("samples have different dimensions"));
    }
    check_kernel(kernel, x.dim())?;
    check_bandwidth(h)?;
    let total = cross_sum(x, y, kernel, h);
    let nf = T::from_count(x.n());
    Ok(total / (nf * nf) / h.powi(x.dim() as i32))
}

/// `Σ_{i,j} K((X_i - Y_j)/h)` over all pairs.
fn cross_sum<T: Scalar>(x: &Sample<T>, y: &Sample<T>, kernel: &KernelSpec<T>, h: T) -> T {
    let mut total = T::zero();
    if kernel.is_compact() {
        let sx = x.sorted_by_first();
        let sy = y.sorted_by_first();
        let mut lo = 0;
        for &(kx, i) in &sx {
            while lo < sy.len() && (kx - sy[lo].0) / h >= T::one() {
                lo += 1;
            }
            let xi = x.row(i);
            let mut row = T::zero();
            for &(ky, j) in &sy[lo..] {
                if (ky - kx) / h >= T::one() {
                    break;
                }
                row = row + kernel.eval_diff(xi, y.row(j), h);
            }
            total = total + row;
        }
    } else {
        for xi in x.rows() {
            let mut row = T::zero();
            for yj in y.rows() {
                row = row + kernel.eval_diff(xi, yj, h);
            }
            total = total + row;
        }
    }
    total
}

/// `D̂ = θ̂_p + θ̂_q - 2 θ̂_pq`.
///
/// With splitting the first half of each sample (in row order) feeds the
/// quadratic terms and the second halves feed the bilinear term.
pub fn l2_divergence<T: Scalar>(
    x: &Sample<T>,
    y: &Sample<T>,
    config: &EstimatorConfig<T>,
) -> Result<DivergenceEstimate<T>> {
    config.validate()?;
    if x.n() != y.n() {
        return Err(Error::invalid(format!(
            "samples must have equal size, got {} and {}",
            x.n(),
            y.n()
        )));
    }
    if x.dim() != y.dim() {
        return Err(Error::invalid("samples have different dimensions"));
    }
    let n = x.n();
    let d = x.dim();
    let (theta_p, theta_q, theta_pq, h, n_per_term) = if config.split {
        if n % 2 != 0 || n < 4 {
            return Err(Error::invalid(format!(
                "data splitting needs an even sample size of at least 4, got {n}"
            )));
        }
        let m = n / 2;
        let h = config.bandwidth_for(m, d);
        let (x1, x2) = (x.slice_rows(0, m)?, x.slice_rows(m, n)?);
        let (y1, y2) = (y.slice_rows(0, m)?, y.slice_rows(m, n)?);
        (
            quadratic_term(&x1, &config.kernel, h)?,
            quadratic_term(&y1, &config.kernel, h)?,
            bilinear_term(&x2, &y2, &config.kernel, h)?,
            h,
            m,
        )
    } else {
        let h = config.bandwidth_for(n, d);
        (
            quadratic_term(x, &config.kernel, h)?,
            quadratic_term(y, &config.kernel, h)?,
            bilinear_term(x, y, &config.kernel, h)?,
            h,
            n,
        )
    };
    let two = T::lit(2.0);
    Ok(DivergenceEstimate {
        d_hat: theta_p + theta_q - two * theta_pq,
        theta_p,
        theta_q,
        theta_pq,
        h,
        n_per_term,
        split: config.split,
    })
}

/// Kernel density estimate `(1/(n h^d)) Σ K((x - X_i)/h)` at one point.
pub fn kde<T: Scalar>(train: &Sample<T>, x: &[T], kernel: &KernelSpec<T>, h: T) -> Result<T> {
    KdeEvaluator::new(train, kernel, h)?.eval(x)
}

/// Kernel density estimate over a fixed training sample, for repeated queries.
pub struct KdeEvaluator<'a, T> {
    train: &'a Sample<T>,
    kernel: &'a KernelSpec<T>,
    h: T,
    sorted: Vec<(T, usize)>,
    norm: T,
}

impl<'a, T: Scalar> KdeEvaluator<'a, T> {
    pub fn new(train: &'a Sample<T>, kernel: &'a KernelSpec<T>, h: T) -> Result<Self> {
        check_kernel(kernel, train.dim())?;
        check_bandwidth(h)?;
        let sorted = if kernel.is_compact() {
            train.sorted_by_first()
        } else {
            Vec::new()
        };
        let norm = T::from_count(train.n()) * h.powi(train.dim() as i32);
        Ok(Self {
            train,
            kernel,
            h,
            sorted,
            norm,
        })
    }

    pub fn eval(&self, x: &[T]) -> Result<T> {
        if x.len() != self.train.dim() {
            return Err(Error::invalid(format!(
                "query has dimension {} but training sample has dimension {}",
                x.len(),
                self.train.dim()
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[T]) -> T {
        let h = self.h;
        let mut total = T::zero();
        if self.kernel.is_compact() {
            let k0 = x[0];
            let start = self.sorted.partition_point(|&(v, _)| (k0 - v) / h >= T::one());
            for &(v, j) in &self.sorted[start..] {
                if (v - k0) / h >= T::one() {
                    break;
                }
                total = total + self.kernel.eval_diff(x, self.train.row(j), h);
            }
        } else {
            for r in self.train.rows() {
                total = total + self.kernel.eval_diff(x, r, h);
            }
        }
        total / self.norm
    }

    /// Density estimate at every row of `points`.
    pub fn eval_sample(&self, points: &Sample<T>) -> Result<Vec<T>> {
        if points.dim() != self.train.dim() {
            return Err(Error::invalid("query sample has the wrong dimension"));
        }
        Ok(points.rows().map(|r| self.eval_unchecked(r)).collect())
    }
}
