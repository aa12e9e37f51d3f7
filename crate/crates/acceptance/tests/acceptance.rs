//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run a subset with `cargo test --test acceptance -- 3 7`.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use l2div::kernel::BaseKernel;
use l2div::oracle::{expected_estimate, gaussian_grids, quadrature_functionals, ExpectedTerm};
use l2div::simulate::{self, derive_seed, sample_gaussian, Experiment, ExperimentConfig};
use l2div::{
    check_moments, l2_divergence, make_order_kernel, permutation_test, variance_plugin,
    EstimatorConfig, GaussianSpec, GridDensity, Grid, KernelSpec, Sample, Which,
};
use l2div_acceptance::{brute_bilinear, brute_quadratic, cli_binary, loglog_slope, median, run_cli};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Closed-form divergence of the unit-shift Gaussians in one dimension.
const GAUSSIAN_D1: f64 = 0.124799;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn legendre2(d: usize) -> KernelSpec<f64> {
    KernelSpec::legendre(2, d).unwrap()
}


fn kernel_moments() -> Outcome {
    let mut worst_norm: f64 = 0.0;
    let mut worst_moment: f64 = 0.0;
    for beta in 1..=3usize {
        let k = make_order_kernel::<f64>(2 * beta).unwrap();
        let spec = KernelSpec::new(BaseKernel::Polynomial(k), 1).unwrap();
        let report = check_moments(&spec, 2 * beta).unwrap();
        worst_norm = worst_norm.max((report.normalization() - 1.0).abs());
        worst_moment = worst_moment.max(report.max_abs_moment(2 * beta));
    }
    outcome(
        worst_norm < 1e-10 && worst_moment < 1e-8,
        format!("max |∫K - 1| = {worst_norm:.2e}, max |moment| = {worst_moment:.2e}"),
    )
}



fn brute_force_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_001);
    let kernels = ["uniform", "gauss", "legendre:2", "legendre:4"];
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let n = rng.random_range(2..=100);
        let d = rng.random_range(1..=3);
        let k = KernelSpec::<f64>::parse(kernels[case % kernels.len()], d).unwrap();
        let h = rng.random_range(0.2..1.5);
        let spread = rng.random_range(0.5..3.0);
        let mut draw = |shift: f64| {
            let v: Vec<f64> = (0..n * d).map(|_| shift + spread * rng.random::<f64>()).collect();
            Sample::new(v, n, d).unwrap()
        };
        let x = draw(0.0);
        let y = draw(0.3);
        let q = l2div::estimator::quadratic_term(&x, &k, h).unwrap();
        let b = l2div::estimator::bilinear_term(&x, &y, &k, h).unwrap();
        for (fast, slow) in [(q, brute_quadratic(&x, &k, h)), (b, brute_bilinear(&x, &y, &k, h))] {
            let rel = if slow == 0.0 { fast.abs() } else { ((fast - slow) / slow).abs() };
            worst = worst.max(rel);
        }
    }
    outcome(worst <= 1e-12, format!("50 instances, worst relative difference {worst:.2e}"))
}

fn trial_pair(spec: &GaussianSpec<f64>, rows: usize, seed: u64) -> (Sample<f64>, Sample<f64>) {
    (
        sample_gaussian(spec, Which::First, rows, seed).unwrap(),
        sample_gaussian(spec, Which::Second, rows, seed).unwrap(),
    )
}

fn closed_form_target() -> Outcome {
    let spec = GaussianSpec::<f64>::unit_shift(1);
    let cfg = EstimatorConfig::new(1, legendre2(1));
    let n = 10_000;
    let trials = 200;
    let est: Vec<f64> = (0..trials)
        .map(|t| {
            let (x, y) = trial_pair(&spec, 2 * n, derive_seed(&[3, t as u64]));
            l2_divergence(&x, &y, &cfg).unwrap().d_hat
        })
        .collect();
    let mean = est.iter().sum::<f64>() / trials as f64;
    let var = est.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (trials as f64 - 1.0);
    let se = (var / trials as f64).sqrt();
    let dev = (mean - GAUSSIAN_D1).abs();
    outcome(
        dev <= 3.0 * se,
        format!("mean {mean:.6}, |mean - {GAUSSIAN_D1}| = {dev:.2e}, 3 SE = {:.2e}", 3.0 * se),
    )
}

fn rate_flattening() -> Outcome {
    let mut cfg = ExperimentConfig::new(Experiment::Convergence);
    cfg.n_grid = vec![500, 2000, 8000];
    cfg.trials = 200;
    cfg.beta = 1;
    cfg.kernel = "legendre:2".into();
    cfg.seed = 4;
    let rep = simulate::run(&cfg).unwrap();
    let med: Vec<f64> = rep.rows.iter().map(|r| r.median_rel_err.unwrap()).collect();
    let resc: Vec<f64> = rep.rows.iter().map(|r| r.rescaled_median.unwrap()).collect();
    let decreasing = med[0] > med[1] && med[1] > med[2];
    let ratio = resc[2] / resc[1];
    outcome(
        decreasing && (0.5..=2.0).contains(&ratio),
        format!(
            "median rel err {:.4} > {:.4} > {:.4}: {decreasing}; rescaled 8000/2000 ratio {ratio:.3}",
            med[0], med[1], med[2]
        ),
    )
}

fn bias_slope() -> Outcome {
    // Standard normal density, tabulated well beyond the kernel reach.
    let grid = Grid::line(-10.0, 10.0, 8001).unwrap();
    let p = GridDensity::from_fn(grid, |x| (-0.5 * x[0] * x[0]).exp() / (2.0 * std::f64::consts::PI).sqrt())
        .unwrap();
    let theta = quadrature_functionals(&p, &p).unwrap().theta_p;
    let k = legendre2(1);
    let hs = [0.4, 0.2, 0.1, 0.05];
    let bias: Vec<f64> = hs
        .iter()
        .map(|&h| (expected_estimate(&p, &p, &k, h, ExpectedTerm::ThetaP).unwrap() - theta).abs())
        .collect();
    let slope = loglog_slope(&hs, &bias);
    outcome(
        (1.6..=2.4).contains(&slope),
        format!(
            "log-log slope {slope:.3} (biases {})",
            bias.iter().map(|b| format!("{b:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn ci_coverage() -> Outcome {
    let mut cfg = ExperimentConfig::new(Experiment::Coverage);
    cfg.n_grid = vec![2500];
    cfg.trials = 500;
    cfg.alpha = 0.10;
    cfg.kernel = "legendre:2".into();
    cfg.seed = 6;
    let rep = simulate::run(&cfg).unwrap();
    let cov = rep.rows[0].coverage.unwrap();
    outcome(
        (0.85..=0.95).contains(&cov),
        format!("coverage {cov:.3} (se {:.3})", rep.rows[0].coverage_se.unwrap()),
    )
}

fn normality() -> Outcome {
    let mut cfg = ExperimentConfig::new(Experiment::Normality);
    cfg.n_grid = vec![500, 8000];
    cfg.trials = 2000;
    cfg.seed = 7;
    let rep = simulate::run(&cfg).unwrap();
    let small = rep.rows[0].ks.unwrap();
    let large = rep.rows[1].ks.unwrap();
    outcome(
        large < small && large < 0.1,
        format!("KS at n=500 {small:.4}, at n=8000 {large:.4}"),
    )
}

fn berry_esseen() -> Outcome {
    let mut cfg = ExperimentConfig::new(Experiment::BerryEsseen);
    cfg.n_grid = vec![500, 2000, 8000];
    cfg.trials = 2000;
    cfg.seed = 8;
    let rep = simulate::run(&cfg).unwrap();
    let ks: Vec<f64> = rep.rows.iter().map(|r| r.ks.unwrap()).collect();
    outcome(
        ks[0] > ks[1] && ks[1] > ks[2],
        format!("sup-CDF distance {:.4}, {:.4}, {:.4}", ks[0], ks[1], ks[2]),
    )
}

fn permutation_level_and_power() -> Outcome {
    let mut null = ExperimentConfig::new(Experiment::PermutationLevel);
    null.n_grid = vec![50];
    null.trials = 400;
    null.replicates = 199;
    null.alpha = 0.05;
    null.seed = 9;
    let level = simulate::run(&null).unwrap().rows[0].rejection_rate.unwrap();

    let spec = GaussianSpec::new(vec![0.0], vec![3.0], 1.0).unwrap();
    let cfg = EstimatorConfig::new(1, legendre2(1));
    let reps = 100;
    let mut rejected = 0;
    for t in 0..reps {
        let (x, y) = trial_pair(&spec, 200, derive_seed(&[90, t]));
        if permutation_test(&x, &y, &cfg, 199, 0.05, derive_seed(&[91, t])).unwrap().reject {
            rejected += 1;
        }
    }
    let power = rejected as f64 / reps as f64;
    outcome(
        (0.02..=0.09).contains(&level) && power >= 0.95,
        format!("null rejection rate {level:.4}, power {power:.3}"),
    )
}

fn variance_consistency() -> Outcome {
    let spec = GaussianSpec::<f64>::unit_shift(1);
    let (p, q, _) = gaussian_grids(&spec, 4001).unwrap();
    let sigma2 = quadrature_functionals(&p, &q).unwrap().sigma2;
    let k = legendre2(1);
    let trials = 60;
    let err_at = |n: usize| {
        let errs: Vec<f64> = (0..trials)
            .map(|t| {
                let (x, y) = trial_pair(&spec, n, derive_seed(&[10, n as u64, t]));
                let v = variance_plugin(&x, &y, 1, &k, 1.0).unwrap();
                (v.sigma2_hat - sigma2).abs()
            })
            .collect();
        median(&errs)
    };
    let small = err_at(2500);
    let large = err_at(40_000);
    outcome(
        large < 0.5 * small,
        format!("sigma2 = {sigma2:.6}; median error at n=2500 {small:.3e}, at n=40000 {large:.3e}"),
    )
}

fn write_csv(path: &Path, s: &Sample<f64>) {
    let mut text = String::new();
    for r in s.rows() {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = GaussianSpec::<f64>::unit_shift(1);
    let (x, y) = trial_pair(&spec, 600, 11);
    let (xp, yp) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
    write_csv(&xp, &x);
    write_csv(&yp, &y);
    let cfg = dir.path().join("sim.conf");
    std::fs::write(&cfg, "experiment = coverage\nn_grid = 100\ntrials = 50\nkernel = legendre:2\nseed = 11\n")
        .unwrap();
    let (xs, ys) = (xp.to_str().unwrap(), yp.to_str().unwrap());
    let invocations: Vec<Vec<&str>> = vec![
        vec!["estimate", xs, ys],
        vec!["ci", xs, ys, "--alpha", "0.1"],
        vec!["twosample", xs, ys, "--seed", "5", "--replicates", "99"],
        vec!["simulate", cfg.to_str().unwrap()],
        vec!["kernel-check", "legendre:4", "4"],
        vec!["oracle", "--gaussian", "--d", "2"],
    ];
    let mut failures = Vec::new();
    for args in &invocations {
        let a = run_cli(args);
        let b = run_cli(args);
        if !(a.0 == 0 && a == b && !a.1.is_empty()) {
            failures.push(args[0]);
        }
    }
    let via = if cli_binary().is_some() { "executable" } else { "library entry point" };
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} subcommands byte-identical across reruns ({via})", invocations.len())
        } else {
            format!("differing or failing: {}", failures.join(", "))
        },
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 11] = [
    (1, "kernel moments", kernel_moments),
    (2, "brute-force equivalence", brute_force_equivalence),
    (3, "closed-form target", closed_form_target),
    (4, "sqrt(n) rate flattening", rate_flattening),
    (5, "deterministic bias slope", bias_slope),
    (6, "confidence interval coverage", ci_coverage),
    (7, "asymptotic normality", normality),
    (8, "self-normalized CDF distance decay", berry_esseen),
    (9, "permutation level and power", permutation_level_and_power),
    (10, "variance estimator consistency", variance_consistency),
    (11, "CLI determinism", cli_determinism),
];

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (id, name, run) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{status} criterion {id:>2} ({name}): {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        let _ = out.flush();
        if !o.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        let _ = writeln!(out, "failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
