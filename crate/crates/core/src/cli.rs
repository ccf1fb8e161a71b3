//! Command-line front end.
//!
//! Exit codes: 0 when every verdict is determinate, 2 when any verdict is
//! inconclusive, 1 on errors and on theorem/oracle disagreements.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::aging::{aging_report, IfraClass, IhrwaClass, MrlClass};
use crate::dsl::{self, Bindings};
use crate::empirical::{convexity_scan, load_samples, qq_transform};
use crate::error::{Error, Result};
use crate::grid::GridConfig;
use crate::model::QuantileModel;
use crate::oracle::OracleCurves;
use crate::order::{compare_all, predict_quantile_ratio_shape, CompareOptions, MethodChoice, Status};
use crate::report::{self, arr, obj};
use crate::sweep::{run_sweep, sweep_csv, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qorder", version, about = "Transform stochastic orders and aging classes from quantile models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide every order between two models.
    Compare(CompareArgs),
    /// Classify one model against the unit exponential.
    Aging(AgingArgs),
    /// Q-Q transform of two samples with a curvature diagnostic.
    Empirical(EmpiricalArgs),
    /// Region map over the shape parameters of two Tukey models.
    Sweep(SweepArgs),
    /// Evaluate a quantile expression.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Model X, e.g. `tukey:4,1,2.5`, `exp1`, `govindarajulu:0,2,2`, `dsl:-log(1-p)`.
    #[arg(long)]
    pub x: String,
    /// Model Y.
    #[arg(long)]
    pub y: String,
    /// theorem, theorem-only, oracle or both.
    #[arg(long, default_value = "both")]
    pub method: String,
    /// Number of working grid points.
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    /// Add the quantile-ratio prediction to the report and print a summary to stderr.
    #[arg(long)]
    pub explain: bool,
    /// Write p, ratio_qd, delta, delta_ps, quantile_ratio, eps_x, eps_y as CSV.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgingArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    /// Write p, hazard, mrl, weighted_average as CSV.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmpiricalArgs {
    /// CSV file with the X sample.
    #[arg(long)]
    pub x: PathBuf,
    /// CSV file with the Y sample.
    #[arg(long)]
    pub y: PathBuf,
    /// Write the transformed points as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the JSON diagnostic here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Range of α₁ as `lo:hi`.
    #[arg(long, default_value = "0.05:4.95")]
    pub alpha1: String,
    /// Range of α₂ as `lo:hi`.
    #[arg(long, default_value = "0.05:4.95")]
    pub alpha2: String,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta2: f64,
    /// λᵢ = ηᵢ + this offset.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub lambda_offset: f64,
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Quantile expression in p.
    #[arg(long, allow_hyphen_values = true)]
    pub qf: String,
    /// Optional quantile-density expression in p.
    #[arg(long, allow_hyphen_values = true)]
    pub qdf: Option<String>,
    /// Parameter binding `name=value`; repeatable.
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// Probability at which to evaluate; repeatable.
    #[arg(long, required = true)]
    pub at: Vec<f64>,
}

/// Parses `args` and runs the command, writing the report to `stdout` and
/// diagnostics to `stderr`. Returns the process exit code.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, stdout, stderr),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_ERROR
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let name = match &cli.command {
        Command::Compare(_) => "compare",
        Command::Aging(_) => "aging",
        Command::Empirical(_) => "empirical",
        Command::Sweep(_) => "sweep",
        Command::Eval(_) => "eval",
    };
    let result = match cli.command {
        Command::Compare(a) => compare(a, stdout, stderr),
        Command::Aging(a) => aging(a, stdout),
        Command::Empirical(a) => empirical(a, stdout),
        Command::Sweep(a) => sweep(a, stdout),
        Command::Eval(a) => eval(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let mut j = report::header(name);
            j.push("error", obj([("kind", e.kind().into()), ("message", e.to_string().into())]));
            let _ = stdout.write_all(j.render().as_bytes());
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn grid_config(n: usize) -> Result<GridConfig> {
    if n < 16 {
        return Err(Error::InvalidParameter(format!("grid must have at least 16 points, got {n}")));
    }
    Ok(GridConfig::with_n(n))
}

fn compare(a: CompareArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let x = QuantileModel::from_spec(&a.x)?;
    let y = QuantileModel::from_spec(&a.y)?;
    let opts = CompareOptions {
        method: a.method.parse::<MethodChoice>()?,
        grid: grid_config(a.grid)?,
    };
    let cmp = compare_all(&x, &y, &opts)?;

    let mut j = report::header("compare");
    j.push("x", x.to_string().into());
    j.push("y", y.to_string().into());
    j.push("method", a.method.as_str().into());
    j.push("grid", opts.grid.n.into());
    report::comparison_fields(&cmp, &mut j);
    if a.explain {
        let pred = predict_quantile_ratio_shape(&x, &y);
        j.push(
            "prediction",
            match &pred {
                Ok(p) => report::prediction_json(p),
                Err(e) => obj([("error", e.to_string().into())]),
            },
        );
        let _ = stderr.write_all(explain_text(&cmp, pred.as_ref().ok()).as_bytes());
    }
    emit(&j.render(), a.out.as_deref(), stdout)?;

    if let Some(path) = &a.curves {
        fs::write(path, compare_curves(&x, &y, &opts.grid)?)?;
    }

    if !cmp.disagreements.is_empty() {
        let names: Vec<_> = cmp.disagreements.iter().map(|o| o.label()).collect();
        let _ = writeln!(stderr, "error: theorem and oracle disagree on {}", names.join(", "));
        return Ok(EXIT_ERROR);
    }
    let inconclusive = cmp.verdicts.iter().chain(cmp.oracle.iter().flatten()).any(|v| v.status == Status::Inconclusive);
    Ok(if inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK })
}

fn explain_text(cmp: &crate::order::Comparison, pred: Option<&crate::order::RatioPrediction>) -> String {
    let mut s = String::new();
    if let Some(shape) = &cmp.ratio_shape {
        let _ = write!(s, "ratio of quantile densities: {}", shape.classification.label());
        for m in &shape.modes {
            let _ = write!(s, ", {} at p = {:.10}", m.kind.label(), m.p.value());
        }
        s.push('\n');
    }
    if let Some(p) = pred {
        let _ = writeln!(s, "quantile ratio prediction: {}", p.case.map_or("none", |c| c.label()));
    }
    for v in &cmp.verdicts {
        let _ = writeln!(s, "{:>7}: {} [{}] {}", v.order.label(), v.status.label(), v.method.label(), v.certificate.theorem);
        for c in &v.certificate.conditions {
            let ok = match c.satisfied {
                Some(true) => "yes",
                Some(false) => "no",
                None => "unsure",
            };
            let _ = writeln!(s, "         {} = {:.6e} {} {:e}: {ok}", c.name, c.value, c.relation.symbol(), c.threshold);
        }
        for n in &v.certificate.notes {
            let _ = writeln!(s, "         note: {n}");
        }
    }
    s
}

fn compare_curves(x: &QuantileModel, y: &QuantileModel, grid: &GridConfig) -> Result<String> {
    let mut c = OracleCurves::new(x, y, grid);
    let r = c.ratio_qd();
    let qr = c.quantile_ratio();
    let (mx, my) = (x.mean()?, y.mean()?);
    let ex = c.eps(0)?;
    let ey = c.eps(1)?;
    let mut s = String::from("p,ratio_qd,delta,delta_ps,quantile_ratio,eps_x,eps_y\n");
    for i in 0..c.grid.len() {
        let delta = c.qx[i] * r[i] - c.qy[i];
        let delta_ps = c.qx[i] / mx - c.qy[i] / my;
        let _ = writeln!(s, "{},{},{},{},{},{},{}", c.grid[i].value(), r[i], delta, delta_ps, qr[i], ex[i], ey[i]);
    }
    Ok(s)
}

fn aging(a: AgingArgs, stdout: &mut dyn Write) -> Result<i32> {
    let x = QuantileModel::from_spec(&a.x)?;
    let grid = grid_config(a.grid)?;
    let r = aging_report(&x, &grid)?;
    let mut j = report::header("aging");
    j.push("x", x.to_string().into());
    j.push("grid", grid.n.into());
    report::aging_fields(&r, &mut j);
    emit(&j.render(), a.out.as_deref(), stdout)?;
    if let Some(path) = &a.curves {
        let mut s = String::from("p,hazard,mrl,weighted_average\n");
        let c = &r.curves;
        for i in 0..c.p.len() {
            let _ = writeln!(s, "{},{},{},{}", c.p[i], c.hazard[i], c.mrl[i], c.weighted_average[i]);
        }
        fs::write(path, s)?;
    }
    let inconclusive = r.mrl == MrlClass::Inconclusive || r.ihrwa == IhrwaClass::Inconclusive || r.ifra == IfraClass::Inconclusive;
    Ok(if inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK })
}

fn empirical(a: EmpiricalArgs, stdout: &mut dyn Write) -> Result<i32> {
    let sx = load_samples(&a.x)?;
    let sy = load_samples(&a.y)?;
    let curve = qq_transform(&sx, &sy);
    let diag = convexity_scan(&curve)?;
    if let Some(path) = &a.out {
        let mut s = String::from("x,y\n");
        for (u, v) in &curve {
            let _ = writeln!(s, "{u},{v}");
        }
        fs::write(path, s)?;
    }
    let mut j = report::header("empirical");
    j.push("n_x", sx.len().into());
    j.push("n_y", sy.len().into());
    j.push("points", curve.len().into());
    j.push("convexity", report::convexity_json(&diag));
    emit(&j.render(), a.report.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidParameter(format!("expected a range lo:hi, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn sweep(a: SweepArgs, stdout: &mut dyn Write) -> Result<i32> {
    let cfg = SweepConfig {
        alpha1: parse_range(&a.alpha1)?,
        alpha2: parse_range(&a.alpha2)?,
        step: a.step,
        eta1: a.eta1,
        eta2: a.eta2,
        lambda_offset: a.lambda_offset,
        grid: grid_config(a.grid)?,
    };
    let rows = run_sweep(&cfg)?;
    emit(&sweep_csv(&rows), a.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn eval(a: EvalArgs, stdout: &mut dyn Write) -> Result<i32> {
    let mut bindings = Bindings::new();
    for p in &a.params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected name=value, got `{p}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad value in `{p}`")))?;
        bindings.insert(k.trim().to_string(), v);
    }
    let qf = dsl::parse(&a.qf)?;
    let qdf = a.qdf.as_deref().map(dsl::parse).transpose()?;
    let mut points = Vec::new();
    for &p in &a.at {
        let mut pt = obj([("p", p.into()), ("value", qf.evaluate(p, &bindings)?.into())]);
        if let Some(d) = &qdf {
            pt.push("density", d.evaluate(p, &bindings)?.into());
        }
        points.push(pt);
    }
    let mut j = report::header("eval");
    j.push("qf", qf.to_string().into());
    j.push("qdf", qdf.map(|d| d.to_string()).into());
    j.push("points", arr(points, |p| p));
    emit(&j.render(), None, stdout)?;
    Ok(EXIT_OK)
}
