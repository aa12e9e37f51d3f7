//! Symmetric product kernels of arbitrary even order.
//!
//! The one-dimensional building block is a polynomial on `(-1, 1)` obtained by
//! projecting the point evaluation at zero onto the first orthonormal Legendre
//! polynomials:
//!
//! ```text
//! K(u) = Σ_{m=0}^{M} φ_m(0) φ_m(u),    φ_m = sqrt((2m+1)/2) P_m
//! ```
//!
//! For every monomial `u^r` with `r ≤ M` the projection reproduces `0^r`, so
//! `∫K = 1` and `∫u^r K = 0` for `1 ≤ r ≤ M`. Odd moments vanish by symmetry,
//! hence the kernel built from an even `M` has order `M + 1`. For `M ≥ 2` the
//! kernel takes negative values; nothing is clipped.

use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::Scalar;

/// Largest construction degree accepted by [`make_order_kernel`]. Monomial
/// coefficients of higher Legendre projections cancel badly in double precision.
pub const MAX_KERNEL_ORDER: usize = 12;

/// Even polynomial kernel supported on `(-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel1D<T> {
    order: usize,
    /// Monomial coefficients, index = power. Odd entries are exactly zero.
    coefficients: Vec<T>,
    /// Coefficients of the same polynomial in `u²`.
    even: Vec<T>,
}

impl<T: Scalar> Kernel1D<T> {
    /// The uniform kernel `1/2` on `(-1, 1)`.
    pub fn uniform() -> Self {
        Self::from_even_f64(&[0.5], 1)
    }

    fn from_even_f64(even: &[f64], order: usize) -> Self {
        let even: Vec<T> = even.iter().map(|&c| T::lit(c)).collect();
        let mut coefficients = vec![T::zero(); 2 * even.len() - 1];
        for (k, &c) in even.iter().enumerate() {
            coefficients[2 * k] = c;
        }
        Self {
            order,
            coefficients,
            even,
        }
    }

    /// Highest `r` such that every moment of degree `1..=r` vanishes.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    /// Evaluates the kernel; exactly zero for `|u| ≥ 1`.
    #[inline]
    pub fn eval(&self, u: T) -> T {
        if !(u.abs() < T::one()) {
            return T::zero();
        }
        let u2 = u * u;
        self.even
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * u2 + c)
    }

    /// True when the polynomial is nonnegative on its support.
    pub fn is_nonnegative(&self) -> bool {
        self.even.len() == 1
    }
}

/// Monomial coefficients of the Legendre polynomials `P_0..=P_max`.
fn legendre_monomials(max: usize) -> Vec<Vec<f64>> {
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
    for k in 2..=max {
        let kf = k as f64;
        let mut next = vec![0.0; k + 1];
        for (i, &c) in polys[k - 1].iter().enumerate() {
            next[i + 1] += (2.0 * kf - 1.0) * c / kf;
        }
        for (i, &c) in polys[k - 2].iter().enumerate() {
            next[i] -= (kf - 1.0) * c / kf;
        }
        polys.push(next);
    }
    polys.truncate(max + 1);
    polys
}

/// Builds the Legendre projection kernel of construction degree `order`.
///
/// `order` must be even and at most [`MAX_KERNEL_ORDER`]; orders 0 and 1 both
/// give the uniform kernel.
pub fn make_order_kernel<T: Scalar>(order: usize) -> Result<Kernel1D<T>> {
    if order % 2 != 0 && order != 1 {
        return Err(Error::invalid(format!("kernel order must be even, got {order}")));
    }
    if order > MAX_KERNEL_ORDER {
        return Err(Error::invalid(format!(
            "kernel order {order} exceeds the supported maximum {MAX_KERNEL_ORDER}"
        )));
    }
    if order <= 1 {
        return Ok(Kernel1D::uniform());
    }
    let polys = legendre_monomials(order);
    let mut even = vec![0.0; order / 2 + 1];
    for m in (0..=order).step_by(2) {
        // φ_m(0) φ_m(u) = (2m+1)/2 · P_m(0) · P_m(u)
        let scale = (2 * m + 1) as f64 / 2.0 * polys[m][0];
        for (i, &c) in polys[m].iter().enumerate().step_by(2) {
            even[i / 2] += scale * c;
        }
    }
    Ok(Kernel1D::from_even_f64(&even, order + 1))
}

/// One-dimensional factor of a product kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseKernel<T> {
    Polynomial(Kernel1D<T>),
    /// Standard normal density. Unbounded support, so it does not meet the
    /// compact-support requirement of the theory; accepted for experiments.
    Gaussian,
}

impl<T: Scalar> BaseKernel<T> {
    #[inline]
    pub fn eval(&self, u: T) -> T {
        match self {
            BaseKernel::Polynomial(k) => k.eval(u),
            BaseKernel::Gaussian => {
                let half = T::lit(0.5);
                (-half * u * u).exp() / (T::PI() + T::PI()).sqrt()
            }
        }
    }

    pub fn order(&self) -> usize {
        match self {
            BaseKernel::Polynomial(k) => k.order(),
            BaseKernel::Gaussian => 1,
        }
    }
}

/// Product kernel `K(x) = Π_i K₁(x_i)` on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec<T> {
    base: BaseKernel<T>,
    dim: usize,
    /// Construction degree for Legendre kernels, kept for display.
    legendre_degree: Option<usize>,
}

impl<T: Scalar> KernelSpec<T> {
    pub fn new(base: BaseKernel<T>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("kernel dimension must be positive"));
        }
        Ok(Self {
            base,
            dim,
            legendre_degree: None,
        })
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        Self::new(BaseKernel::Polynomial(Kernel1D::uniform()), dim)
    }

    pub fn gaussian(dim: usize) -> Result<Self> {
        Self::new(BaseKernel::Gaussian, dim)
    }

    pub fn legendre(order: usize, dim: usize) -> Result<Self> {
        let mut spec = Self::new(BaseKernel::Polynomial(make_order_kernel(order)?), dim)?;
        spec.legendre_degree = Some(order);
        Ok(spec)
    }

    /// Parses `uniform`, `gauss` or `legendre:<order>`.
    pub fn parse(s: &str, dim: usize) -> Result<Self> {
        let s = s.trim();
        match s {
            "uniform" => Self::uniform(dim),
            "gauss" | "gaussian" => Self::gaussian(dim),
            _ => {
                let order = s
                    .strip_prefix("legendre:")
                    .ok_or_else(|| Error::invalid(format!("unknown kernel '{s}'")))?;
                let order: usize = order
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad legendre order in '{s}'")))?;
                Self::legendre(order, dim)
            }
        }
    }

    /// Same base kernel in another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        let mut out = Self::new(self.base.clone(), dim)?;
        out.legendre_degree = self.legendre_degree;
        Ok(out)
    }

    pub fn base(&self) -> &BaseKernel<T> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.base.order()
    }

    /// Half-width of the support per coordinate, `None` when unbounded.
    pub fn support_radius(&self) -> Option<T> {
        match self.base {
            BaseKernel::Polynomial(_) => Some(T::one()),
            BaseKernel::Gaussian => None,
        }
    }

    pub fn is_compact(&self) -> bool {
        self.support_radius().is_some()
    }

    pub fn is_nonnegative(&self) -> bool {
        match &self.base {
            BaseKernel::Polynomial(k) => k.is_nonnegative(),
            BaseKernel::Gaussian => true,
        }
    }

    /// Gaussian bases violate the compact-support kernel assumption.
    pub fn assumption_violating(&self) -> bool {
        !self.is_compact()
    }

    /// Canonical specification string.
    pub fn name(&self) -> String {
        match (&self.base, self.legendre_degree) {
            (BaseKernel::Gaussian, _) => "gauss".to_string(),
            (BaseKernel::Polynomial(_), Some(m)) => format!("legendre:{m}"),
            (BaseKernel::Polynomial(_), None) => "uniform".to_string(),
        }
    }

    /// Evaluates `K(x)`.
    pub fn eval(&self, x: &[T]) -> Result<T> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "point has dimension {} but kernel has dimension {}",
                x.len(),
                self.dim
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("kernel argument must be finite"));
        }
        let mut acc = T::one();
        for &xi in x {
            let k = self.base.eval(xi);
            if k == T::zero() {
                return Ok(T::zero());
            }
            acc = acc * k;
        }
        Ok(acc)
    }

    /// `K((a - b) / h)` without dimension checks.
    #[inline]
    pub(crate) fn eval_diff(&self, a: &[T], b: &[T], h: T) -> T {
        let mut acc = T::one();
        for (&ai, &bi) in a.iter().zip(b) {
            let k = self.base.eval((ai - bi) / h);
            if k == T::zero() {
                return T::zero();
            }
            acc = acc * k;
        }
        acc
    }
}

impl<T: Scalar> fmt::Display for KernelSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// One entry of a [`MomentReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct Moment<T> {
    pub multi_index: Vec<usize>,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport<T> {
    pub entries: Vec<Moment<T>>,
    /// Quadrature nodes per axis.
    pub nodes_per_axis: usize,
}

impl<T: Scalar> MomentReport<T> {
    /// `∫K`, the first entry.
    pub fn normalization(&self) -> T {
        self.entries[0].value
    }

    /// Largest absolute moment over total degrees `1..=max_degree`.
    pub fn max_abs_moment(&self, max_degree: usize) -> T {
        self.entries
            .iter()
            .filter(|m| {
                let t: usize = m.multi_index.iter().sum();
                t >= 1 && t <= max_degree
            })
            .fold(T::zero(), |acc, m| acc.max(m.value.abs()))
    }
}

/// Positive half of a symmetric rule covering the support of `base`.
fn half_rule<T: Scalar>(base: &BaseKernel<T>, nodes: usize) -> Vec<(T, T)> {
    let gl = GaussLegendre::new(nodes);
    match base {
        BaseKernel::Polynomial(_) => gl.half().map(|(x, w)| (T::lit(x), T::lit(w))).collect(),
        BaseKernel::Gaussian => {
            // Composite rule on [0, 12] in unit panels; the tail beyond is < 1e-32.
            let mut out = Vec::new();
            for panel in 0..12 {
                let a = panel as f64;
                for (x, w) in gl.full() {
                    out.push((T::lit(a + 0.5 + 0.5 * x), T::lit(0.5 * w)));
                }
            }
            out
        }
    }
}

/// Tabulates `∫ Π x_i^{r_i} K(x) dx` for all multi-indices with total degree
/// up to `max_total_degree`, normalization first.
///
/// Uses a tensorized Gauss–Legendre rule with at least 32 nodes per axis.
/// Symmetric nodes are paired before summation, so any multi-index with an odd
/// component reports exactly zero.
pub fn check_moments<T: Scalar>(
    kernel: &KernelSpec<T>,
    max_total_degree: usize,
) -> Result<MomentReport<T>> {
    let d = kernel.dim();
    if d > 2 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "moment tables are computed for d <= 2",
        });
    }
    let poly_degree = match kernel.base() {
        BaseKernel::Polynomial(k) => k.coefficients().len(),
        BaseKernel::Gaussian => 0,
    };
    let nodes = 32.max((poly_degree + max_total_degree) / 2 + 2);
    let rule = half_rule(kernel.base(), nodes);

    let mut entries = Vec::new();
    for total in 0..=max_total_degree {
        if d == 1 {
            entries.push(Moment {
                multi_index: vec![total],
                value: moment_1d(kernel, &rule, total),
            });
        } else {
            for r2 in 0..=total {
                let r1 = total - r2;
                entries.push(Moment {
                    multi_index: vec![r1, r2],
                    value: moment_2d(kernel, &rule, r1, r2),
                });
            }
        }
    }
    Ok(MomentReport {
        entries,
        nodes_per_axis: nodes,
    })
}

fn moment_1d<T: Scalar>(kernel: &KernelSpec<T>, rule: &[(T, T)], r: usize) -> T {
    let f = |x: T| x.powi(r as i32) * kernel.eval_diff(&[x], &[T::zero()], T::one());
    rule.iter()
        .fold(T::zero(), |acc, &(x, w)| acc + w * (f(x) + f(-x)))
}

fn moment_2d<T: Scalar>(kernel: &KernelSpec<T>, rule: &[(T, T)], r1: usize, r2: usize) -> T {
    let zero = [T::zero(), T::zero()];
    let f = |a: T, b: T| {
        a.powi(r1 as i32) * b.powi(r2 as i32) * kernel.eval_diff(&[a, b], &zero, T::one())
    };
    let first_odd = r1 % 2 == 1;
    let mut acc = T::zero();
    for &(a, wa) in rule {
        for &(b, wb) in rule {
            let quad = if first_odd {
                (f(a, b) + f(-a, b)) + (f(a, -b) + f(-a, -b))
            } else {
                (f(a, b) + f(a, -b)) + (f(-a, b) + f(-a, -b))
            };
            acc = acc + wa * wb * quad;
        }
    }
    acc
}
