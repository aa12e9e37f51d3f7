use l2div::estimator::{bilinear_term, quadratic_term};
use l2div::simulate::ks_distance;
use l2div::{confidence_interval, l2_divergence, permutation_test, EstimatorConfig, KernelSpec, Sample};
use proptest::prelude::*;

const KERNELS: [&str; 4] = ["uniform", "gauss", "legendre:2", "legendre:4"];

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-300
}

/// Two samples of equal size `n` in dimension `d`, plus a bandwidth and a
/// kernel name.
fn instance() -> impl Strategy<Value = (Sample<f64>, Sample<f64>, f64, &'static str)> {
    (2usize..40, 1usize..=3, 0.1f64..2.0, 0usize..KERNELS.len()).prop_flat_map(|(n, d, h, k)| {
        (
            prop::collection::vec(-3.0f64..3.0, n * d),
            prop::collection::vec(-2.0f64..4.0, n * d),
        )
            .prop_map(move |(a, b)| {
                (
                    Sample::new(a, n, d).unwrap(),
                    Sample::new(b, n, d).unwrap(),
                    h,
                    KERNELS[k],
                )
            })
    })
}

fn reversed(s: &Sample<f64>) -> Sample<f64> {
    let idx: Vec<usize> = (0..s.n()).rev().collect();
    s.select(&idx)
}

fn rotated(s: &Sample<f64>, by: usize) -> Sample<f64> {
    let idx: Vec<usize> = (0..s.n()).map(|i| (i + by) % s.n()).collect();
    s.select(&idx)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn terms_ignore_row_order((x, y, h, k) in instance(), by in 0usize..40) {
        let k = KernelSpec::parse(k, x.dim()).unwrap();
        let q = quadratic_term(&x, &k, h).unwrap();
        prop_assert!(close(q, quadratic_term(&reversed(&x), &k, h).unwrap(), 1e-12));
        prop_assert!(close(q, quadratic_term(&rotated(&x, by), &k, h).unwrap(), 1e-12));
        let b = bilinear_term(&x, &y, &k, h).unwrap();
        let b2 = bilinear_term(&rotated(&x, by), &reversed(&y), &k, h).unwrap();
        prop_assert!(close(b, b2, 1e-12));
    }

    #[test]
    fn bilinear_is_symmetric((x, y, h, k) in instance()) {
        let k = KernelSpec::parse(k, x.dim()).unwrap();
        let a = bilinear_term(&x, &y, &k, h).unwrap();
        let b = bilinear_term(&y, &x, &k, h).unwrap();
        prop_assert!(close(a, b, 1e-12));
    }

    #[test]
    fn estimate_is_translation_invariant(
        (x, y, h, k) in instance(),
        shift in prop::collection::vec(-5.0f64..5.0, 3),
    ) {
        let d = x.dim();
        let k = KernelSpec::parse(k, d).unwrap();
        let cfg = EstimatorConfig::new(1, k).with_split(false).with_bandwidth(h);
        let a = l2_divergence(&x, &y, &cfg).unwrap();
        let b = l2_divergence(&x.translate(&shift[..d]).unwrap(), &y.translate(&shift[..d]).unwrap(), &cfg).unwrap();
        for (u, v) in [(a.theta_p, b.theta_p), (a.theta_q, b.theta_q), (a.theta_pq, b.theta_pq)] {
            prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(v.abs()).max(1.0), "{u} vs {v}");
        }
    }

    #[test]
    fn terms_are_scale_equivariant((x, y, h, k) in instance(), c in 0.2f64..5.0) {
        let d = x.dim() as i32;
        let k = KernelSpec::parse(k, x.dim()).unwrap();
        let (cx, cy) = (x.map(|v| c * v).unwrap(), y.map(|v| c * v).unwrap());
        let q = quadratic_term(&x, &k, h).unwrap();
        let qc = quadratic_term(&cx, &k, c * h).unwrap();
        prop_assert!((qc - c.powi(-d) * q).abs() <= 1e-12 * q.abs().max(1.0) * c.powi(-d).max(1.0));
        let b = bilinear_term(&x, &y, &k, h).unwrap();
        let bc = bilinear_term(&cx, &cy, &k, c * h).unwrap();
        prop_assert!((bc - c.powi(-d) * b).abs() <= 1e-12 * b.abs().max(1.0) * c.powi(-d).max(1.0));
    }

    #[test]
    fn estimate_composes_exactly((x, y, h, k) in instance(), split in any::<bool>()) {
        let k = KernelSpec::parse(k, x.dim()).unwrap();
        let nonnegative = k.is_nonnegative();
        let cfg = EstimatorConfig::new(1, k).with_split(split).with_bandwidth(h);
        match l2_divergence(&x, &y, &cfg) {
            Ok(e) => {
                prop_assert_eq!(e.d_hat, e.theta_p + e.theta_q - 2.0 * e.theta_pq);
                prop_assert_eq!(e.n_per_term, if split { x.n() / 2 } else { x.n() });
                if nonnegative {
                    prop_assert!(e.theta_p >= 0.0 && e.theta_q >= 0.0 && e.theta_pq >= 0.0);
                }
            }
            Err(_) => prop_assert!(split && (x.n() % 2 == 1 || x.n() < 4)),
        }
    }

    #[test]
    fn interval_is_centered(d_hat in -1.0f64..1.0, sigma in 0.0f64..3.0, n in 1usize..10_000, alpha in 0.001f64..0.999) {
        let ci = confidence_interval(d_hat, sigma, n, alpha).unwrap();
        prop_assert!(ci.contains(d_hat));
        let rounding = 4.0 * f64::EPSILON * ci.lo.abs().max(ci.hi.abs());
        prop_assert!((ci.hi - ci.lo - 2.0 * ci.half_width()).abs() <= 1e-12 * ci.half_width() + rounding);
        prop_assert!(ci.z > 0.0);
    }

    #[test]
    fn ks_distance_is_a_distance(values in prop::collection::vec(-10.0f64..10.0, 1..200)) {
        let k = ks_distance(&values);
        prop_assert!((0.0..=1.0).contains(&k));
        prop_assert!(k >= 0.5 / values.len() as f64 - 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn permutation_p_value_is_bounded((x, y, _h, k) in instance(), seed in any::<u64>(), b in 19usize..60) {
        let k = KernelSpec::parse(k, x.dim()).unwrap();
        let cfg = EstimatorConfig::new(1, k);
        let r = permutation_test(&x, &y, &cfg, b, 0.05, seed).unwrap();
        prop_assert!(r.p_value >= 1.0 / (b as f64 + 1.0) && r.p_value <= 1.0);
        prop_assert_eq!(r.p_value, (1 + r.exceedances) as f64 / (b + 1) as f64);
        prop_assert_eq!(r, permutation_test(&x, &y, &cfg, b, 0.05, seed).unwrap());
    }
}
