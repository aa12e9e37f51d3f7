//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for invalid arguments or input data, 2 for
//! I/O failures. Machine-readable output goes to stdout or `--output`;
//! diagnostics go to stderr.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::estimator::{l2_divergence, DivergenceEstimate, EstimatorConfig};
use crate::inference::{confidence_interval, permutation_test, variance_plugin};
use crate::kernel::{check_moments, KernelSpec};
use crate::oracle::{gaussian_grids, gaussian_l2, quadrature_functionals, GaussianSpec, GridDensity};
use crate::sample::Sample;
use crate::simulate::{self, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "l2div", version, about = "L2-squared divergence estimation between two samples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate D(p, q) from two CSV samples.
    Estimate(EstimateArgs),
    /// Estimate with an asymptotic confidence interval.
    Ci(CiArgs),
    /// Permutation test of p = q.
    Twosample(TwosampleArgs),
    /// Run a Monte Carlo experiment described by a key=value file.
    Simulate(SimulateArgs),
    /// Print the moment table of a kernel.
    KernelCheck(KernelCheckArgs),
    /// Exact functionals of two Gaussians or of two tabulated densities.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Sample from p, one row per point, comma separated.
    pub x: PathBuf,
    /// Sample from q.
    pub y: PathBuf,
    /// Skip the first line of each file.
    #[arg(long)]
    pub header: bool,
    /// Write the result here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1)]
    pub beta: u32,
    /// uniform, gauss or legendre:<order> (default legendre:2beta).
    #[arg(long)]
    pub kernel: Option<String>,
    /// Bandwidth constant c in h = c n^(-2/(4beta+d)).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

impl ModelArgs {
    fn kernel_name(&self) -> String {
        self.kernel
            .clone()
            .unwrap_or_else(|| format!("legendre:{}", 2 * self.beta))
    }

    fn config(&self, d: usize) -> Result<EstimatorConfig<f64>> {
        let kernel = KernelSpec::parse(&self.kernel_name(), d)?;
        let cfg = EstimatorConfig::new(self.beta, kernel).with_scale(self.scale);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Use every point in every term.
    #[arg(long)]
    pub no_split: bool,
    /// Fixed bandwidth, overriding the rate rule.
    #[arg(long)]
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.10)]
    pub alpha: f64,
    /// Rows at the end of each file reserved for the variance estimate
    /// (default: the last third).
    #[arg(long)]
    pub var_rows: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TwosampleArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 199)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelCheckArgs {
    pub kernel: String,
    pub max_degree: usize,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Two isotropic Gaussians.
    #[arg(long, conflicts_with_all = ["grid_p", "grid_q"])]
    pub gaussian: bool,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// First mean: one value for every coordinate, or a comma separated vector.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub mean1: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub mean2: String,
    #[arg(long, default_value_t = 1.0)]
    pub variance: f64,
    /// Tabulated density p as `x,density` or `x,y,density` rows.
    #[arg(long, requires = "grid_q")]
    pub grid_p: Option<PathBuf>,
    #[arg(long, requires = "grid_p")]
    pub grid_q: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Formats with 17 significant digits, which round-trips every `f64`.
pub fn json_number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&format!("{x:.16e}")).map(Value::Number).unwrap_or(Value::Null)
}

fn io_context(path: &Path, e: io::Error) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Reads a comma separated numeric matrix. Blank lines are ignored.
pub fn read_sample<R: BufRead>(reader: R, header: bool) -> Result<Sample<f64>> {
    let mut data = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if header && i == 0 {
            continue;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut count = 0;
        for (c, cell) in line.split(',').enumerate() {
            let cell = cell.trim();
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("column {}: '{cell}' is not a number", c + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("column {}: non-finite value '{cell}'", c + 1),
                });
            }
            data.push(v);
            count += 1;
        }
        match width {
            None => width = Some(count),
            Some(w) if w != count => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected {w} columns, found {count}"),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    let d = width.ok_or_else(|| Error::invalid("no data rows"))?;
    Sample::new(data, rows, d)
}

fn load_sample(path: &Path, header: bool) -> Result<Sample<f64>> {
    let file = File::open(path).map_err(|e| io_context(path, e))?;
    read_sample(BufReader::new(file), header).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        Error::Io(e) => io_context(path, e),
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load_pair(inputs: &Inputs) -> Result<(Sample<f64>, Sample<f64>)> {
    let x = load_sample(&inputs.x, inputs.header)?;
    let y = load_sample(&inputs.y, inputs.header)?;
    if x.dim() != y.dim() {
        return Err(Error::invalid(format!(
            "samples have {} and {} columns",
            x.dim(),
            y.dim()
        )));
    }
    if x.n() != y.n() {
        return Err(Error::invalid(format!(
            "samples have {} and {} rows; equal sizes are required",
            x.n(),
            y.n()
        )));
    }
    Ok((x, y))
}

fn estimate_fields(e: &DivergenceEstimate<f64>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("d_hat".into(), json_number(e.d_hat));
    m.insert("theta_p".into(), json_number(e.theta_p));
    m.insert("theta_q".into(), json_number(e.theta_q));
    m.insert("theta_pq".into(), json_number(e.theta_pq));
    m.insert("h".into(), json_number(e.h));
    m.insert("n_per_term".into(), json!(e.n_per_term));
    m.insert("split".into(), json!(e.split));
    m
}

fn input_fields(inputs: &Inputs, model: &ModelArgs, x: &Sample<f64>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("x".into(), json!(inputs.x.display().to_string()));
    m.insert("y".into(), json!(inputs.y.display().to_string()));
    m.insert("header".into(), json!(inputs.header));
    m.insert("n".into(), json!(x.n()));
    m.insert("d".into(), json!(x.dim()));
    m.insert("kernel".into(), json!(model.kernel_name()));
    m.insert("beta".into(), json!(model.beta));
    m.insert("scale".into(), json_number(model.scale));
    m
}

fn emit(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| io_context(path, e)),
        None => stdout.write_all(text.as_bytes()).map_err(Error::Io),
    }
}

fn emit_json(output: Option<&Path>, value: &Value, stdout: &mut dyn Write) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::invalid(e.to_string()))?;
    text.push('\n');
    emit(output, &text, stdout)
}

fn warn_all(warnings: &[String], stderr: &mut dyn Write) {
    for w in warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
}

fn cmd_estimate(a: &EstimateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let (x, y) = load_pair(&a.inputs)?;
    let mut cfg = a.model.config(x.dim())?.with_split(!a.no_split);
    if let Some(h) = a.bandwidth {
        cfg = cfg.with_bandwidth(h);
    }
    warn_all(&cfg.warnings(), stderr);
    let est = l2_divergence(&x, &y, &cfg)?;
    let mut m = input_fields(&a.inputs, &a.model, &x);
    m.insert("bandwidth".into(), a.bandwidth.map(json_number).unwrap_or(Value::Null));
    m.extend(estimate_fields(&est));
    emit_json(a.inputs.output.as_deref(), &Value::Object(m), stdout)
}

fn cmd_ci(a: &CiArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let (x, y) = load_pair(&a.inputs)?;
    let total = x.n();
    let var_rows = match a.var_rows {
        Some(v) => v,
        None if total % 3 == 0 => total / 3,
        None => {
            return Err(Error::invalid(format!(
                "{total} rows cannot be split 2:1 into estimation and variance rows; pass --var-rows"
            )))
        }
    };
    if var_rows < 2 || var_rows >= total {
        return Err(Error::invalid(format!(
            "--var-rows must be between 2 and {}, got {var_rows}",
            total.saturating_sub(1)
        )));
    }
    let est_rows = total - var_rows;
    let cfg = a.model.config(x.dim())?;
    warn_all(&cfg.warnings(), stderr);
    let est = l2_divergence(&x.slice_rows(0, est_rows)?, &y.slice_rows(0, est_rows)?, &cfg)?;
    let var = variance_plugin(
        &x.slice_rows(est_rows, total)?,
        &y.slice_rows(est_rows, total)?,
        a.model.beta,
        &cfg.kernel,
        a.model.scale,
    )?;
    if var.clamped {
        let _ = writeln!(stderr, "warning: negative variance estimate set to zero");
    }
    let sigma_hat = var.sigma2_hat.sqrt();
    let ci = confidence_interval(est.d_hat, sigma_hat, est.n_per_term, a.alpha)?;
    let mut m = input_fields(&a.inputs, &a.model, &x);
    m.insert("alpha".into(), json_number(a.alpha));
    m.insert("estimate_rows".into(), json!([0, est_rows]));
    m.insert("variance_rows".into(), json!([est_rows, total]));
    m.insert("estimate".into(), Value::Object(estimate_fields(&est)));
    m.insert("sigma2_hat".into(), json_number(var.sigma2_hat));
    m.insert("sigma_hat".into(), json_number(sigma_hat));
    m.insert("h_density".into(), json_number(var.h_density));
    m.insert("clamped".into(), json!(var.clamped));
    m.insert("z".into(), json_number(ci.z));
    m.insert("n_ci".into(), json!(ci.n));
    m.insert("lo".into(), json_number(ci.lo));
    m.insert("hi".into(), json_number(ci.hi));
    emit_json(a.inputs.output.as_deref(), &Value::Object(m), stdout)
}

fn cmd_twosample(a: &TwosampleArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let (x, y) = load_pair(&a.inputs)?;
    let mut cfg = a.model.config(x.dim())?.with_split(false);
    if let Some(h) = a.bandwidth {
        cfg = cfg.with_bandwidth(h);
    }
    warn_all(&cfg.warnings(), stderr);
    let res = permutation_test(&x, &y, &cfg, a.replicates, a.alpha, a.seed)?;
    let mut m = input_fields(&a.inputs, &a.model, &x);
    m.insert("bandwidth".into(), a.bandwidth.map(json_number).unwrap_or(Value::Null));
    m.insert("h".into(), json_number(cfg.bandwidth_for(x.n(), x.dim())));
    m.insert("statistic".into(), json_number(res.statistic));
    m.insert("p_value".into(), json_number(res.p_value));
    m.insert("replicates".into(), json!(res.replicates));
    m.insert("exceedances".into(), json!(res.exceedances));
    m.insert("seed".into(), json!(res.seed));
    m.insert("alpha".into(), json_number(res.alpha));
    m.insert("reject".into(), json!(res.reject));
    emit_json(a.inputs.output.as_deref(), &Value::Object(m), stdout)
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&a.config).map_err(|e| io_context(&a.config, e))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    match a.seed {
        Some(s) => cfg.seed = s,
        None if !simulate::declares_key(&text, "seed") => {
            return Err(Error::invalid("no seed: set 'seed' in the config or pass --seed"))
        }
        None => {}
    }
    let report = simulate::run(&cfg)?;
    warn_all(&report.warnings, stderr);
    emit(a.output.as_deref(), &report.to_csv(), stdout)
}

fn cmd_kernel_check(a: &KernelCheckArgs, stdout: &mut dyn Write) -> Result<()> {
    let kernel = KernelSpec::<f64>::parse(&a.kernel, a.dim)?;
    let report = check_moments(&kernel, a.max_degree)?;
    let mut out = String::new();
    let idx: Vec<String> = (1..=a.dim).map(|j| format!("k{j}")).collect();
    out.push_str(&format!("degree,{},moment\n", idx.join(",")));
    for m in &report.entries {
        let degree: usize = m.multi_index.iter().sum();
        let cells: Vec<String> = m.multi_index.iter().map(|k| k.to_string()).collect();
        out.push_str(&format!("{degree},{},{:.16e}\n", cells.join(","), m.value));
    }
    emit(a.output.as_deref(), &out, stdout)
}

fn parse_mean(s: &str, d: usize) -> Result<Vec<f64>> {
    let values: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::invalid(format!("bad mean '{s}'")))?;
    match values.len() {
        1 => Ok(vec![values[0]; d]),
        k if k == d => Ok(values),
        k => Err(Error::invalid(format!("mean has {k} components, expected 1 or {d}"))),
    }
}

fn load_grid(path: &Path) -> Result<GridDensity> {
    let file = File::open(path).map_err(|e| io_context(path, e))?;
    GridDensity::read_csv(BufReader::new(file)).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        Error::Io(e) => io_context(path, e),
        other => other,
    })
}

fn cmd_oracle(a: &OracleArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut m = Map::new();
    if a.gaussian {
        if a.d == 0 {
            return Err(Error::invalid("--d must be positive"));
        }
        let spec = GaussianSpec::new(parse_mean(&a.mean1, a.d)?, parse_mean(&a.mean2, a.d)?, a.variance)?;
        let norm = (4.0 * std::f64::consts::PI * a.variance).powf(-(a.d as f64) / 2.0);
        let cross = norm * (-spec.squared_mean_distance() / (4.0 * a.variance)).exp();
        m.insert("source".into(), json!("gaussian"));
        m.insert("d".into(), json!(a.d));
        m.insert("mean1".into(), Value::Array(spec.mean1.iter().map(|&v| json_number(v)).collect()));
        m.insert("mean2".into(), Value::Array(spec.mean2.iter().map(|&v| json_number(v)).collect()));
        m.insert("variance".into(), json_number(a.variance));
        m.insert("D".into(), json_number(gaussian_l2(&spec)));
        m.insert("theta_p".into(), json_number(norm));
        m.insert("theta_q".into(), json_number(norm));
        m.insert("theta_pq".into(), json_number(cross));
        let sigma2 = if a.d <= 2 {
            let points = if a.d == 1 { 4001 } else { 601 };
            let (p, q, _) = gaussian_grids(&spec, points)?;
            json_number(quadrature_functionals(&p, &q)?.sigma2)
        } else {
            Value::Null
        };
        m.insert("sigma2".into(), sigma2);
    } else {
        let (Some(pp), Some(qp)) = (&a.grid_p, &a.grid_q) else {
            return Err(Error::invalid("pass --gaussian or both --grid-p and --grid-q"));
        };
        let f = quadrature_functionals(&load_grid(pp)?, &load_grid(qp)?)?;
        m.insert("source".into(), json!("grid"));
        m.insert("grid_p".into(), json!(pp.display().to_string()));
        m.insert("grid_q".into(), json!(qp.display().to_string()));
        m.insert("D".into(), json_number(f.d));
        m.insert("theta_p".into(), json_number(f.theta_p));
        m.insert("theta_q".into(), json_number(f.theta_q));
        m.insert("theta_pq".into(), json_number(f.theta_pq));
        m.insert("sigma2".into(), json_number(f.sigma2));
    }
    emit_json(a.output.as_deref(), &Value::Object(m), stdout)
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a, stdout, stderr),
        Command::Ci(a) => cmd_ci(a, stdout, stderr),
        Command::Twosample(a) => cmd_twosample(a, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(a, stdout, stderr),
        Command::KernelCheck(a) => cmd_kernel_check(a, stdout),
        Command::Oracle(a) => cmd_oracle(a, stdout),
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run_with<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_io() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["l2div"];
        full.extend_from_slice(args);
        let code = run_with(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn reads_csv_with_and_without_header() {
        let s = read_sample("1,2\n3e0, 4.5\n\n".as_bytes(), false).unwrap();
        assert_eq!((s.n(), s.dim()), (2, 2));
        assert_eq!(s.row(1), &[3.0, 4.5]);
        let s = read_sample("a,b\n1,2\n".as_bytes(), true).unwrap();
        assert_eq!(s.n(), 1);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        assert!(matches!(read_sample("1,2\n3\n".as_bytes(), false), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_sample("1\nx\n".as_bytes(), false), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_sample("1\nNaN\n".as_bytes(), false), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_sample("1\ninf\n".as_bytes(), false), Err(Error::Parse { line: 2, .. })));
        assert!(read_sample("".as_bytes(), false).is_err());
    }

    #[test]
    fn json_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 0.124_799, f64::MAX, f64::MIN_POSITIVE] {
            let v = json_number(x);
            let s = serde_json::to_string(&v).unwrap();
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(json_number(f64::NAN), Value::Null);
    }

    #[test]
    fn kernel_check_table() {
        let (code, out, _) = run_capture(&["kernel-check", "legendre:2", "2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "degree,k1,moment");
        let values: Vec<f64> = lines[1..]
            .iter()
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(values.len(), 3);
        assert!((values[0] - 1.0).abs() < 1e-8);
        assert!(values[1].abs() < 1e-8 && values[2].abs() < 1e-8);
    }

    #[test]
    fn oracle_gaussian() {
        let (code, out, _) = run_capture(&["oracle", "--gaussian", "--d", "1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let d: f64 = v["D"].to_string().parse().unwrap();
        assert!((d - 0.124799).abs() < 1e-6);
        let (code, _, _) = run_capture(&["oracle", "--gaussian", "--d", "2", "--mean1", "0,1,2"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn argument_errors_exit_one() {
        assert_eq!(run_capture(&["estimate"]).0, 1);
        assert_eq!(run_capture(&["bogus"]).0, 1);
        assert_eq!(run_capture(&["kernel-check", "box", "2"]).0, 1);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn missing_files_exit_two() {
        let (code, _, err) = run_capture(&["estimate", "/nonexistent/x.csv", "/nonexistent/y.csv"]);
        assert_eq!(code, 2);
        assert!(err.contains("/nonexistent/x.csv"));
    }
}
