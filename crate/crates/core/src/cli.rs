//! Command-line front end.
//!
//! ```text
//! pearsonprob prob     (--mu2 M2 --mu3 M3 --mu4 M4 | --data FILE) --x0 X [--plot OUT.svg] [--format text|json]
//! pearsonprob fit      (--mu2 M2 --mu3 M3 --mu4 M4 | --data FILE) [--format text|json]
//! pearsonprob quantile (--mu2 M2 --mu3 M3 --mu4 M4 | --data FILE) --p P [--format text|json]
//! ```
//!
//! Exit status: 0 on success (including an out-of-domain `x0`), 2 for invalid
//! input, 3 for numerical failures.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::classify::ClassifyTolerances;
use crate::error::Error;
use crate::fit::{fit, FittedPearson};
use crate::moments::{compute_sample_moments, CentralMoments, RawSample};
use crate::plot::{render_density_plot, PlotOptions};
use crate::quadrature::{cdf, quantile, IntegrationSettings, ProbabilityResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable holding a JSON object of tolerance overrides.
pub const TOLERANCES_ENV: &str = "PEARSONPROB_TOLERANCES";

#[derive(Debug, Parser)]
#[command(
    name = "pearsonprob",
    version,
    about = "Fit a Pearson curve to central moments and compute probability values"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability value P(X <= x0), x0 measured from the mean.
    Prob {
        #[command(flatten)]
        input: InputArgs,
        /// Percentage point, as a deviation from the mean.
        #[arg(long, allow_negative_numbers = true)]
        x0: f64,
        /// Write an SVG plot of the density and the probability region.
        #[arg(long, value_name = "PATH")]
        plot: Option<PathBuf>,
    },
    /// Classify and fit only.
    Fit {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Percentage point for a probability value.
    Quantile {
        #[command(flatten)]
        input: InputArgs,
        /// Probability in (0, 1).
        #[arg(long)]
        p: f64,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Second central moment.
    #[arg(long, allow_negative_numbers = true)]
    pub mu2: Option<f64>,
    /// Third central moment.
    #[arg(long, allow_negative_numbers = true)]
    pub mu3: Option<f64>,
    /// Fourth central moment.
    #[arg(long, allow_negative_numbers = true)]
    pub mu4: Option<f64>,
    /// Whitespace-separated sample values; lines starting with '#' are skipped.
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub tolerances: ToleranceOverrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Optional overrides for every numerical tolerance. Also accepted as the
/// JSON value of `PEARSONPROB_TOLERANCES`; flags win over the environment.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_subdivisions: Option<usize>,
    #[arg(long)]
    pub tail_cut_epsilon: Option<f64>,
    #[arg(long)]
    pub eps_beta1: Option<f64>,
    #[arg(long)]
    pub eps_kappa_one: Option<f64>,
    #[arg(long)]
    pub eps_beta2_normal: Option<f64>,
    #[arg(long)]
    pub eps_type3: Option<f64>,
}

impl ToleranceOverrides {
    /// Fields set in `self` take precedence over `base`.
    fn or(self, base: ToleranceOverrides) -> ToleranceOverrides {
        ToleranceOverrides {
            abs_tol: self.abs_tol.or(base.abs_tol),
            rel_tol: self.rel_tol.or(base.rel_tol),
            max_subdivisions: self.max_subdivisions.or(base.max_subdivisions),
            tail_cut_epsilon: self.tail_cut_epsilon.or(base.tail_cut_epsilon),
            eps_beta1: self.eps_beta1.or(base.eps_beta1),
            eps_kappa_one: self.eps_kappa_one.or(base.eps_kappa_one),
            eps_beta2_normal: self.eps_beta2_normal.or(base.eps_beta2_normal),
            eps_type3: self.eps_type3.or(base.eps_type3),
        }
    }

    fn apply(&self) -> (IntegrationSettings, ClassifyTolerances) {
        let mut s = IntegrationSettings::default();
        let mut c = ClassifyTolerances::default();
        if let Some(v) = self.abs_tol {
            s.abs_tol = v;
        }
        if let Some(v) = self.rel_tol {
            s.rel_tol = v;
        }
        if let Some(v) = self.max_subdivisions {
            s.max_subdivisions = v;
        }
        if let Some(v) = self.tail_cut_epsilon {
            s.tail_cut_epsilon = v;
        }
        if let Some(v) = self.eps_beta1 {
            c.eps_beta1 = v;
        }
        if let Some(v) = self.eps_kappa_one {
            c.eps_kappa_one = v;
        }
        if let Some(v) = self.eps_beta2_normal {
            c.eps_beta2_normal = v;
        }
        if let Some(v) = self.eps_type3 {
            c.eps_type3 = v;
        }
        (s, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Prob,
    Fit,
    Quantile,
}

/// Where the moments come from.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentSource {
    Moments { mu2: f64, mu3: f64, mu4: f64 },
    DataFile(PathBuf),
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CliRequest {
    pub mode: Mode,
    pub source: MomentSource,
    pub x0: Option<f64>,
    pub p: Option<f64>,
    pub plot_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub settings: IntegrationSettings,
    pub tolerances: ClassifyTolerances,
}

impl CliRequest {
    /// Resolves parsed flags plus the optional environment override blob.
    pub fn from_cli(cli: Cli, env_tolerances: Option<&str>) -> Result<CliRequest, String> {
        let (mode, input, x0, p, plot_path) = match cli.command {
            Command::Prob { input, x0, plot } => (Mode::Prob, input, Some(x0), None, plot),
            Command::Fit { input } => (Mode::Fit, input, None, None, None),
            Command::Quantile { input, p } => (Mode::Quantile, input, None, Some(p), None),
        };

        let source = match (input.mu2, input.mu3, input.mu4, input.data) {
            (Some(mu2), Some(mu3), Some(mu4), None) => MomentSource::Moments { mu2, mu3, mu4 },
            (None, None, None, Some(path)) => MomentSource::DataFile(path),
            (None, None, None, None) => {
                return Err("provide either --mu2/--mu3/--mu4 or --data".into())
            }
            (_, _, _, Some(_)) => {
                return Err("--data cannot be combined with --mu2/--mu3/--mu4".into())
            }
            _ => return Err("--mu2, --mu3 and --mu4 must all be given".into()),
        };

        let env = match env_tolerances {
            Some(text) if !text.trim().is_empty() => serde_json::from_str(text)
                .map_err(|e| format!("{TOLERANCES_ENV} is not a valid tolerance object: {e}"))?,
            _ => ToleranceOverrides::default(),
        };
        let (settings, tolerances) = input.tolerances.or(env).apply();
        settings.validate().map_err(|e| e.to_string())?;
        tolerances.validate().map_err(|e| e.to_string())?;

        if let Some(p) = p {
            if !(p > 0.0 && p < 1.0) {
                return Err(format!("--p must lie strictly between 0 and 1, got {p}"));
            }
        }
        if let Some(x0) = x0 {
            if !x0.is_finite() {
                return Err(format!("--x0 must be finite, got {x0}"));
            }
        }

        Ok(CliRequest {
            mode,
            source,
            x0,
            p,
            plot_path,
            output_format: input.format,
            settings,
            tolerances,
        })
    }
}

/// Parses a data file: whitespace-separated decimal values, `#` lines skipped.
pub fn parse_sample(text: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for token in line.split_whitespace() {
            let v: f64 = token
                .parse()
                .map_err(|_| format!("line {}: '{token}' is not a number", lineno + 1))?;
            values.push(v);
        }
    }
    Ok(values)
}

fn load_moments(source: &MomentSource) -> Result<CentralMoments, Failure> {
    match source {
        MomentSource::Moments { mu2, mu3, mu4 } => Ok(CentralMoments::new(*mu2, *mu3, *mu4)?),
        MomentSource::DataFile(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            let values = parse_sample(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let sample = RawSample::new(values)?;
            Ok(compute_sample_moments(&sample)?)
        }
    }
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

struct Outcome {
    fitted: FittedPearson,
    x0: Option<f64>,
    prob: Option<ProbabilityResult>,
    quantile: Option<f64>,
    plot: Option<PathBuf>,
}

fn execute(req: &CliRequest) -> Result<Outcome, Failure> {
    let moments = load_moments(&req.source)?;
    let fitted = fit(&moments, &req.tolerances)?;
    let mut out = Outcome {
        fitted,
        x0: req.x0,
        prob: None,
        quantile: None,
        plot: None,
    };
    match req.mode {
        Mode::Fit => {}
        Mode::Quantile => {
            let p = req
                .p
                .ok_or_else(|| Failure::Input("quantile mode needs --p".into()))?;
            out.quantile = Some(quantile(&out.fitted, p, &req.settings)?);
        }
        Mode::Prob => {
            let x0 = req
                .x0
                .ok_or_else(|| Failure::Input("prob mode needs --x0".into()))?;
            let r = cdf(&out.fitted, x0, &req.settings)?;
            if let Some(path) = &req.plot_path {
                let svg = render_density_plot(&out.fitted, x0, &r, &PlotOptions::default())?;
                std::fs::write(path, svg)
                    .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
                out.plot = Some(path.clone());
            }
            out.prob = Some(r);
        }
    }
    Ok(out)
}

/// The JSON document printed in `--format json`.
fn to_json(o: &Outcome) -> Value {
    let f = &o.fitted;
    let shape = f.shape();
    let mut doc = Map::new();
    doc.insert("type".into(), json!(f.pearson_type()));
    doc.insert("kappa".into(), json!(shape.kappa));
    doc.insert("sqrt_beta1".into(), json!(shape.sqrt_beta1));
    doc.insert("beta1".into(), json!(shape.beta1));
    doc.insert("beta2".into(), json!(shape.beta2));
    if let Some(r) = f.r() {
        doc.insert("r".into(), json!(r));
    }
    doc.insert("params".into(), json!(f.params()));
    doc.insert("log_y0".into(), json!(f.log_y0()));
    doc.insert("origin_shift".into(), json!(f.origin_shift()));
    doc.insert("mirrored".into(), json!(f.mirrored()));
    doc.insert("support".into(), json!(f.support()));
    doc.insert("moments".into(), json!(f.moments()));
    if let Some(x0) = o.x0 {
        doc.insert("x0".into(), json!(x0));
    }
    if let Some(r) = &o.prob {
        doc.insert("p".into(), json!(r.p));
        doc.insert("error_estimate".into(), json!(r.error_estimate));
        if let Some(w) = &r.domain_warning {
            doc.insert("warning".into(), json!(w));
        }
    }
    if let Some(q) = o.quantile {
        doc.insert("quantile".into(), json!(q));
    }
    if let Some(path) = &o.plot {
        doc.insert("plot".into(), json!(path.display().to_string()));
    }
    Value::Object(doc)
}

fn write_text(o: &Outcome, out: &mut dyn Write) -> std::io::Result<()> {
    let f = &o.fitted;
    let shape = f.shape();
    writeln!(out, "Pearson type:  {}", f.pearson_type())?;
    writeln!(out, "kappa:         {:.7}", shape.kappa)?;
    writeln!(out, "sqrt(beta1):   {:.7}", shape.sqrt_beta1)?;
    writeln!(out, "beta1:         {:.7}", shape.beta1)?;
    writeln!(out, "beta2:         {:.7}", shape.beta2)?;
    if let Some(r) = f.r() {
        writeln!(out, "r:             {r:.7}")?;
    }
    writeln!(out, "parameters:")?;
    for (name, v) in f.params().named() {
        writeln!(out, "  {name:<6} = {v:.7}")?;
    }
    writeln!(out, "  ln y0  = {:.7}", f.log_y0())?;
    writeln!(out, "origin shift:  {:.7}", f.origin_shift())?;
    if f.mirrored() {
        writeln!(out, "mirrored:      yes (fitted to -mu3 and reflected)")?;
    }
    writeln!(out, "support:       {:.7}", f.support())?;
    if let Some(r) = &o.prob {
        writeln!(out, "x0:            {:.7}", o.x0.unwrap_or(f64::NAN))?;
        writeln!(out, "probability:   {:.7}", r.p)?;
    }
    if let Some(q) = o.quantile {
        writeln!(out, "quantile:      {q:.7}")?;
    }
    if let Some(path) = &o.plot {
        writeln!(out, "plot:          {}", path.display())?;
    }
    Ok(())
}

/// Runs one request, writing results to `out` and diagnostics to `err`.
/// Returns the process exit status.
pub fn run(req: &CliRequest, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = match execute(req) {
        Ok(o) => o,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_INVALID_INPUT;
        }
        Err(Failure::Numerical(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_NUMERICAL;
        }
    };
    let written = match req.output_format {
        OutputFormat::Json => {
            let doc = to_json(&outcome);
            writeln!(out, "{doc}")
        }
        OutputFormat::Text => {
            if let Some(w) = outcome
                .prob
                .as_ref()
                .and_then(|r| r.domain_warning.as_ref())
            {
                let _ = writeln!(err, "{w}");
            }
            write_text(&outcome, out)
        }
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: cannot write output: {e}");
            EXIT_INVALID_INPUT
        }
    }
}

/// Parses `args` (including the program name) and runs the request.
pub fn main_with_args<I, T>(
    args: I,
    env_tolerances: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return e.exit_code();
        }
    };
    match CliRequest::from_cli(cli, env_tolerances) {
        Ok(req) => run(&req, out, err),
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID_INPUT
        }
    }
}
