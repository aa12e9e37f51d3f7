//! Reference computations shared by the acceptance suite.
//!
//! The pair sums here are deliberately naive: every ordered pair, evaluated
//! through the public kernel API, with no pruning or reordering.

use std::path::PathBuf;
use std::process::Command;

use l2div::{KernelSpec, Sample};

pub fn brute_quadratic(x: &Sample<f64>, k: &KernelSpec<f64>, h: f64) -> f64 {
    let n = x.n();
    let d = x.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let u: Vec<f64> = (0..d).map(|c| (x.row(i)[c] - x.row(j)[c]) / h).collect();
                s += k.eval(&u).unwrap();
            }
        }
    }
    s / (n as f64 * (n as f64 - 1.0) * h.powi(d as i32))
}

pub fn brute_bilinear(x: &Sample<f64>, y: &Sample<f64>, k: &KernelSpec<f64>, h: f64) -> f64 {
    let n = x.n();
    let d = x.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let u: Vec<f64> = (0..d).map(|c| (x.row(i)[c] - y.row(j)[c]) / h).collect();
            s += k.eval(&u).unwrap();
        }
    }
    s / ((n * n) as f64 * h.powi(d as i32))
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len();
    if m % 2 == 1 {
        s[m / 2]
    } else {
        0.5 * (s[m / 2 - 1] + s[m / 2])
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// The `l2div` executable next to the running test, when the build produced one.
pub fn cli_binary() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let bin = dir.join(format!("l2div{}", std::env::consts::EXE_SUFFIX));
    bin.is_file().then_some(bin)
}

/// Runs the command line and returns its exit code and stdout. Uses the
/// built executable when available, otherwise the library entry point.
pub fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    match cli_binary() {
        Some(bin) => {
            let out = Command::new(bin).args(args).output().expect("spawn l2div");
            (out.status.code().unwrap_or(-1), out.stdout)
        }
        None => {
            let mut stdout = Vec::new();
            let mut stderr = Vec::new();
            let argv = std::iter::once("l2div").chain(args.iter().copied());
            let code = l2div::cli::run_with(argv, &mut stdout, &mut stderr);
            (code, stdout)
        }
    }
}
