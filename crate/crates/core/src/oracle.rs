//! Ground truth for the estimators: closed-form Gaussian distances and
//! quadrature of density functionals on uniform grids.
//!
//! Grid computations always run in `f64`; they are the reference the generic
//! estimators are checked against.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::quadrature::{interpolate_uniform, trapezoid_weights, GaussLegendre};
use crate::scalar::Scalar;

/// Which of the two distributions of a two-sample setup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

/// Two isotropic Gaussians `N(mean1, v I)` and `N(mean2, v I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec<T> {
    pub dim: usize,
    pub mean1: Vec<T>,
    pub mean2: Vec<T>,
    pub variance: T,
}

impl<T: Scalar> GaussianSpec<T> {
    pub fn new(mean1: Vec<T>, mean2: Vec<T>, variance: T) -> Result<Self> {
        if mean1.is_empty() || mean1.len() != mean2.len() {
            return Err(Error::invalid("means must be non-empty and of equal dimension"));
        }
        if !(variance > T::zero() && variance.is_finite()) {
            return Err(Error::invalid("variance must be positive"));
        }
        if mean1.iter().chain(&mean2).any(|m| !m.is_finite()) {
            return Err(Error::invalid("means must be finite"));
        }
        Ok(Self {
            dim: mean1.len(),
            mean1,
            mean2,
            variance,
        })
    }

    /// Unit variance, means `(0,…,0)` and `(1,…,1)`.
    pub fn unit_shift(dim: usize) -> Self {
        Self {
            dim,
            mean1: vec![T::zero(); dim],
            mean2: vec![T::one(); dim],
            variance: T::one(),
        }
    }

    pub fn mean(&self, which: Which) -> &[T] {
        match which {
            Which::First => &self.mean1,
            Which::Second => &self.mean2,
        }
    }

    pub fn density(&self, which: Which, x: &[T]) -> T {
        let mu = self.mean(which);
        let two = T::lit(2.0);
        let r2 = x
            .iter()
            .zip(mu)
            .fold(T::zero(), |acc, (&a, &m)| acc + (a - m) * (a - m));
        let norm = (two * T::PI() * self.variance).powf(T::from_count(self.dim) / two);
        (-r2 / (two * self.variance)).exp() / norm
    }

    pub fn squared_mean_distance(&self) -> T {
        self.mean1
            .iter()
            .zip(&self.mean2)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
    }
}

/// Closed-form `∫(p - q)²` for two isotropic Gaussians with shared variance:
/// `2 (4πv)^{-d/2} (1 - exp(-|μ₁ - μ₂|² / (4v)))`.
pub fn gaussian_l2<T: Scalar>(spec: &GaussianSpec<T>) -> T {
    let four = T::lit(4.0);
    let d = T::from_count(spec.dim);
    let norm = (four * T::PI() * spec.variance).powf(-d / T::lit(2.0));
    let delta2 = spec.squared_mean_distance();
    T::lit(2.0) * norm * (T::one() - (-delta2 / (four * spec.variance)).exp())
}

/// Uniform tensor grid in one or two dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        let d = lo.len();
        if !(d == 1 || d == 2) || hi.len() != d || points.len() != d {
            return Err(Error::UnsupportedDimension {
                dim: d,
                reason: "grids are one- or two-dimensional",
            });
        }
        for a in 0..d {
            if !(lo[a].is_finite() && hi[a].is_finite() && hi[a] > lo[a]) || points[a] < 2 {
                return Err(Error::invalid(format!(
                    "axis {a}: need lo < hi and at least two points"
                )));
            }
        }
        Ok(Self { lo, hi, points })
    }

    pub fn line(lo: f64, hi: f64, points: usize) -> Result<Self> {
        Self::new(vec![lo], vec![hi], vec![points])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.points[axis] - 1) as f64
    }

    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        if k + 1 == self.points[axis] {
            self.hi[axis]
        } else {
            self.lo[axis] + self.spacing(axis) * k as f64
        }
    }

    /// Coordinates of the flat (row-major, first axis outer) index.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        match self.dim() {
            1 => vec![self.coord(0, idx)],
            _ => {
                let ny = self.points[1];
                vec![self.coord(0, idx / ny), self.coord(1, idx % ny)]
            }
        }
    }

    /// Tensorized trapezoid weights in flat order.
    pub fn weights(&self) -> Vec<f64> {
        let w0 = trapezoid_weights(self.points[0], self.spacing(0));
        if self.dim() == 1 {
            return w0;
        }
        let w1 = trapezoid_weights(self.points[1], self.spacing(1));
        w0.iter()
            .flat_map(|&a| w1.iter().map(move |&b| a * b))
            .collect()
    }

    fn same_as(&self, other: &Grid) -> bool {
        self.points == other.points
            && self
                .lo
                .iter()
                .chain(&self.hi)
                .zip(other.lo.iter().chain(&other.hi))
                .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()))
    }
}

/// Density tabulated on a [`Grid`]. Values are nonnegative and integrate to
/// one under the trapezoid rule within `1e-6`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    grid: Grid,
    values: Vec<f64>,
}

/// Tolerance on the trapezoid normalization of a [`GridDensity`].
pub const NORMALIZATION_TOL: f64 = 1e-6;

impl GridDensity {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(format!(
                "density values must be finite and nonnegative, found {v}"
            )));
        }
        let out = Self { grid, values };
        let total = out.integral();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid(format!(
                "density integrates to {total}, expected 1 within {NORMALIZATION_TOL}"
            )));
        }
        Ok(out)
    }

    /// Tabulates `f` on `grid` and validates the result.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::new(grid, values)
    }

    /// Unvalidated constructor for derived functions such as smoothed
    /// densities, which may dip below zero.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self) -> f64 {
        integrate(&self.grid, |i| self.values[i])
    }

    /// Reads `x,density` or `x,y,density` rows with a header line. Rows must
    /// enumerate a uniform grid with the first coordinate outer.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(Error::Parse {
                line: 1,
                message: "empty grid file".into(),
            })?;
        let header = header?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let dim = match cols.as_slice() {
            ["x", "density"] => 1,
            ["x", "y", "density"] => 2,
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header 'x,density' or 'x,y,density', got '{header}'"),
                })
            }
        };
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            if fields.len() != dim + 1 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {} fields, got {}", dim + 1, fields.len()),
                });
            }
            rows.push(fields);
        }
        let axis_values = |axis: usize| -> Vec<f64> {
            let mut v: Vec<f64> = rows.iter().map(|r| r[axis]).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            v.dedup();
            v
        };
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        let mut points = Vec::new();
        for axis in 0..dim {
            let v = axis_values(axis);
            if v.len() < 2 {
                return Err(Error::invalid(format!("axis {axis} has fewer than two grid points")));
            }
            lo.push(v[0]);
            hi.push(v[v.len() - 1]);
            points.push(v.len());
        }
        let grid = Grid::new(lo, hi, points)?;
        if rows.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} rows do not form a complete {:?} grid",
                rows.len(),
                grid.points
            )));
        }
        for (idx, row) in rows.iter().enumerate() {
            let expected = grid.point(idx);
            for axis in 0..dim {
                let tol = 1e-9 * (grid.hi[axis] - grid.lo[axis]);
                if (row[axis] - expected[axis]).abs() > tol {
                    return Err(Error::Parse {
                        line: idx + 2,
                        message: format!(
                            "coordinate {} is not on the uniform grid (expected {})",
                            row[axis], expected[axis]
                        ),
                    });
                }
            }
        }
        Self::new(grid, rows.iter().map(|r| r[dim]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        match self.grid.dim() {
            1 => writeln!(w, "x,density")?,
            _ => writeln!(w, "x,y,density")?,
        }
        for (i, v) in self.values.iter().enumerate() {
            let p = self.grid.point(i);
            let coords: Vec<String> = p.iter().map(|c| format!("{c:e}")).collect();
            writeln!(w, "{},{v:e}", coords.join(","))?;
        }
        Ok(())
    }
}

fn integrate(grid: &Grid, f: impl Fn(usize) -> f64) -> f64 {
    grid.weights()
        .iter()
        .enumerate()
        .map(|(i, &w)| w * f(i))
        .sum()
}

/// Truncation used when tabulating Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub lo: f64,
    pub hi: f64,
    /// Per-axis density level at the truncation bounds.
    pub threshold: f64,
}

/// Tail level below which Gaussian densities are truncated.
pub const GAUSSIAN_TAIL: f64 = 1e-12;

/// Tabulates both Gaussians of `spec` on a shared grid with `points` nodes per
/// axis. Each axis covers every point where a marginal density exceeds
/// [`GAUSSIAN_TAIL`].
pub fn gaussian_grids(
    spec: &GaussianSpec<f64>,
    points: usize,
) -> Result<(GridDensity, GridDensity, Truncation)> {
    let d = spec.dim;
    if d > 2 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "grid quadrature is limited to d <= 2",
        });
    }
    let v = spec.variance;
    // Solve φ_v(r) = GAUSSIAN_TAIL for the radius r.
    let r = (2.0 * v * (1.0 / (GAUSSIAN_TAIL * (2.0 * std::f64::consts::PI * v).sqrt())).ln()).sqrt();
    let all = spec.mean1.iter().chain(&spec.mean2);
    let lo = all.clone().fold(f64::INFINITY, |a, &m| a.min(m)) - r;
    let hi = all.fold(f64::NEG_INFINITY, |a, &m| a.max(m)) + r;
    let grid = Grid::new(vec![lo; d], vec![hi; d], vec![points; d])?;
    let p = GridDensity::from_fn(grid.clone(), |x| spec.density(Which::First, x))?;
    let q = GridDensity::from_fn(grid, |x| spec.density(Which::Second, x))?;
    Ok((
        p,
        q,
        Truncation {
            lo,
            hi,
            threshold: GAUSSIAN_TAIL,
        },
    ))
}

/// Integral functionals of a density pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Functionals {
    pub theta_p: f64,
    pub theta_q: f64,
    pub theta_pq: f64,
    pub d: f64,
    /// Asymptotic variance `4[Var_p p + Var_q q + Var_p q + Var_q p]`.
    pub sigma2: f64,
}

fn check_same_grid(p: &GridDensity, q: &GridDensity) -> Result<()> {
    if !p.grid.same_as(&q.grid) {
        return Err(Error::invalid("densities are tabulated on different grids"));
    }
    Ok(())
}

/// Trapezoid evaluation of `θ_p`, `θ_q`, `θ_pq`, `D` and the asymptotic variance.
pub fn quadrature_functionals(p: &GridDensity, q: &GridDensity) -> Result<Functionals> {
    check_same_grid(p, q)?;
    let (pv, qv) = (&p.values, &q.values);
    let g = &p.grid;
    let theta_p = integrate(g, |i| pv[i] * pv[i]);
    let theta_q = integrate(g, |i| qv[i] * qv[i]);
    let theta_pq = integrate(g, |i| pv[i] * qv[i]);
    let p3 = integrate(g, |i| pv[i] * pv[i] * pv[i]);
    let q3 = integrate(g, |i| qv[i] * qv[i] * qv[i]);
    let q2p = integrate(g, |i| qv[i] * qv[i] * pv[i]);
    let p2q = integrate(g, |i| pv[i] * pv[i] * qv[i]);
    let var_pp = p3 - theta_p * theta_p;
    let var_qq = q3 - theta_q * theta_q;
    let var_pq = q2p - theta_pq * theta_pq;
    let var_qp = p2q - theta_pq * theta_pq;
    Ok(Functionals {
        theta_p,
        theta_q,
        theta_pq,
        d: theta_p + theta_q - 2.0 * theta_pq,
        sigma2: 4.0 * (var_pp + var_qq + var_pq + var_qp),
    })
}

/// `∫ K_h(x - y) f(y) dy` at `x` for a density tabulated on a line.
///
/// The integral is split at grid nodes so each piece sees a single cubic of
/// the interpolant and is integrated with an 8-point Gauss–Legendre rule.
fn smooth_at(
    values: &[f64],
    lo: f64,
    dx: f64,
    kernel: &KernelSpec<f64>,
    h: f64,
    rule: &GaussLegendre,
    x: f64,
) -> f64 {
    let radius = kernel.support_radius().unwrap_or(10.0);
    let hi_grid = lo + dx * (values.len() - 1) as f64;
    let a = (x - radius * h).max(lo);
    let b = (x + radius * h).min(hi_grid);
    if a >= b {
        return 0.0;
    }
    let base = kernel.base();
    let mut total = 0.0;
    let mut left = a;
    let mut node = ((a - lo) / dx).floor() as i64 + 1;
    while left < b {
        let right = (lo + dx * node as f64).min(b);
        if right > left {
            total += rule.integrate(left, right, |y| {
                base.eval((x - y) / h) * interpolate_uniform(values, lo, dx, y)
            });
        }
        left = right;
        node += 1;
    }
    total / h
}

fn require_line(p: &GridDensity) -> Result<()> {
    if p.grid.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            dim: p.grid.dim(),
            reason: "kernel smoothing on grids is implemented for d = 1",
        });
    }
    Ok(())
}

fn check_kernel_line(kernel: &KernelSpec<f64>, h: f64) -> Result<()> {
    if kernel.dim() != 1 {
        return Err(Error::invalid("kernel must be one-dimensional"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("bandwidth must be positive"));
    }
    Ok(())
}

/// Kernel-smoothed density `p̄(x) = ∫ K_h(x - y) p(y) dy` on the grid of `p`.
///
/// The result can be negative for higher-order kernels, so it is returned
/// without the nonnegativity check.
pub fn smoothed_density(p: &GridDensity, kernel: &KernelSpec<f64>, h: f64) -> Result<GridDensity> {
    require_line(p)?;
    check_kernel_line(kernel, h)?;
    let g = &p.grid;
    let (lo, dx) = (g.lo[0], g.spacing(0));
    let rule = GaussLegendre::new(8);
    let values = (0..g.points[0])
        .map(|k| smooth_at(&p.values, lo, dx, kernel, h, &rule, g.coord(0, k)))
        .collect();
    Ok(GridDensity::from_raw(g.clone(), values))
}

/// Target of [`expected_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedTerm {
    ThetaP,
    ThetaPq,
}

/// Exact expectation of `θ̂_p` or `θ̂_pq` at bandwidth `h`:
/// `∫∫ K_h(x - y) p(y) g(x) dy dx` with `g = p` or `g = q`.
pub fn expected_estimate(
    p: &GridDensity,
    q: &GridDensity,
    kernel: &KernelSpec<f64>,
    h: f64,
    which: ExpectedTerm,
) -> Result<f64> {
    require_line(p)?;
    check_same_grid(p, q)?;
    let pbar = smoothed_density(p, kernel, h)?;
    let outer = match which {
        ExpectedTerm::ThetaP => &p.values,
        ExpectedTerm::ThetaPq => &q.values,
    };
    Ok(integrate(&p.grid, |i| pbar.values[i] * outer[i]))
}

/// `4[Var_p(p̄) + Var_q(q̄) + Var_p(q̄) + Var_q(p̄)]`, the variance that
/// normalizes the estimator around its own mean.
pub fn sigma2_bar(
    p: &GridDensity,
    q: &GridDensity,
    pbar: &GridDensity,
    qbar: &GridDensity,
) -> Result<f64> {
    for g in [q, pbar, qbar] {
        check_same_grid(p, g)?;
    }
    let grid = &p.grid;
    let var = |f: &[f64], w: &[f64]| {
        let m2 = integrate(grid, |i| f[i] * f[i] * w[i]);
        let m1 = integrate(grid, |i| f[i] * w[i]);
        m2 - m1 * m1
    };
    Ok(4.0
        * (var(&pbar.values, &p.values)
            + var(&qbar.values, &q.values)
            + var(&qbar.values, &p.values)
            + var(&pbar.values, &q.values)))
}
