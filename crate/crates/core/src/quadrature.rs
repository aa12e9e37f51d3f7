//! Fixed-order numerical integration rules.
//!
//! Gauss–Legendre rules are stored as the positive half of a symmetric rule so
//! callers can pair `f(x) + f(-x)` before accumulating; odd integrands then
//! cancel exactly.

use std::f64::consts::PI;

/// Symmetric Gauss–Legendre rule on `[-1, 1]` with an even number of nodes.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    /// Positive nodes in increasing order.
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule. `n` is rounded up to the next even number.
    pub fn new(n: usize) -> Self {
        let n = (n.max(2) + 1) & !1;
        let half = n / 2;
        let mut nodes = Vec::with_capacity(half);
        let mut weights = Vec::with_capacity(half);
        for i in 0..half {
            // Tricomi initial guess for the i-th largest root.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(node, weight)` pairs for the positive half of the rule.
    pub fn half(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// All `(node, weight)` pairs in increasing node order.
    pub fn full(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = self.half().map(|(x, w)| (-x, w)).collect();
        out.reverse();
        out.extend(self.half());
        out
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let rad = 0.5 * (b - a);
        let s: f64 = self
            .half()
            .map(|(x, w)| w * (f(mid - rad * x) + f(mid + rad * x)))
            .sum();
        s * rad
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite trapezoid weights for `m` equally spaced points with spacing `dx`.
pub fn trapezoid_weights(m: usize, dx: f64) -> Vec<f64> {
    let mut w = vec![dx; m];
    if m >= 2 {
        w[0] = 0.5 * dx;
        w[m - 1] = 0.5 * dx;
    } else if m == 1 {
        w[0] = 0.0;
    }
    w
}

/// Local four-point Lagrange interpolation of values on a uniform grid
/// `lo + k * dx`, `k = 0..values.len()`. Returns 0 outside `[lo, hi]`.
pub fn interpolate_uniform(values: &[f64], lo: f64, dx: f64, x: f64) -> f64 {
    let m = values.len();
    if m == 0 {
        return 0.0;
    }
    let hi = lo + dx * (m - 1) as f64;
    if !(x >= lo && x <= hi) {
        return 0.0;
    }
    if m == 1 {
        return values[0];
    }
    let t = (x - lo) / dx;
    let cell = (t.floor() as usize).min(m - 2);
    if m < 4 {
        let f = t - cell as f64;
        return values[cell] * (1.0 - f) + values[cell + 1] * f;
    }
    // Stencil start, shifted inward at the grid edges.
    let start = cell.saturating_sub(1).min(m - 4);
    let s = t - start as f64;
    let (y0, y1, y2, y3) = (
        values[start],
        values[start + 1],
        values[start + 2],
        values[start + 3],
    );
    let l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
    let l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
    let l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
    let l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
    y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3
}
