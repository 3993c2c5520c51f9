//! Command-line front end: argument parsing, dispatch to `rankone_core`,
//! and JSON / CSV report emission.
//!
//! Every report starts with a `config` object echoing the resolved run
//! configuration. Floating-point values are written with 17 significant
//! digits; non-finite values become JSON `null` (empty CSV cells).

use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use rankone_core::{
    best_rank_one, check_geodesic_curvature, check_metric_pullback, curvature_table,
    entanglement_geometric, entanglement_log, geodesic_curvature_norm, goe_det_expectation,
    mc_goe_det, mc_probability, mc_weingarten_stats, normal_split, prob_close_rank_one,
    pullback_factor, reach, tube_volume, unique_approx_lower_bound, veronese_volume, BwPolynomial,
    McConfig, ReachResult, SampleRecord, SeedSpec, SolverMethod, SolverOptions, SpaceParams,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NONCONVERGED: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rankone_core::Error),
    #[error("{0}")]
    Input(String),
    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(_) | CliError::Input(_) => EXIT_INVALID,
            CliError::Output(_) => EXIT_IO,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "rankone",
    version,
    about = "Closeness of random symmetric tensors to rank one: closed forms and Monte-Carlo checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format.
    #[arg(
        long,
        global = true,
        value_enum,
        default_value = "json",
        env = "RANKONE_FORMAT"
    )]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, env = "RANKONE_OUT")]
    pub out: Option<PathBuf>,
    /// Exit with status 3 if any solver run fails to converge.
    #[arg(long, global = true, env = "RANKONE_STRICT")]
    pub strict: bool,
    /// Master seed for sampling and solver restarts.
    #[arg(long, global = true, default_value_t = 0, env = "RANKONE_SEED")]
    pub seed: u64,
    /// Monte-Carlo sample count.
    #[arg(
        long,
        global = true,
        default_value_t = 100_000,
        env = "RANKONE_SAMPLES"
    )]
    pub samples: usize,
    /// Solver restarts (default 8·(n+1)).
    #[arg(long, global = true, env = "RANKONE_RESTARTS")]
    pub restarts: Option<usize>,
    /// Worker threads for Monte-Carlo runs; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0, env = "RANKONE_WORKERS")]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Eigen,
    Grid,
    Multistart,
}

impl From<Method> for SolverMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Auto => SolverMethod::Auto,
            Method::Eigen => SolverMethod::Eigen,
            Method::Grid => SolverMethod::Grid,
            Method::Multistart => SolverMethod::Multistart,
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Shape {
    /// Number of variables minus one.
    #[arg(long)]
    pub n: usize,
    /// Degree (tensor order).
    #[arg(long)]
    pub d: usize,
}

#[derive(Debug, Clone, Copy, Args)]
#[group(required = true, multiple = false)]
pub struct Radius {
    /// Relative Frobenius distance δ ∈ [0, 1].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Geodesic radius ε = arcsin δ.
    #[arg(long)]
    pub eps: Option<f64>,
}

impl Radius {
    fn delta(&self) -> Result<f64> {
        match (self.delta, self.eps) {
            (Some(d), _) => Ok(d),
            (None, Some(e)) => {
                if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&e) {
                    return Err(CliError::Input(format!("--eps {e} outside [0, pi/2]")));
                }
                Ok(e.sin())
            }
            (None, None) => unreachable!("clap requires one of --delta / --eps"),
        }
    }

    fn eps(&self) -> Result<f64> {
        match (self.delta, self.eps) {
            (_, Some(e)) => Ok(e),
            (Some(d), None) => {
                if !(0.0..=1.0).contains(&d) {
                    return Err(CliError::Input(format!("--delta {d} outside [0, 1]")));
                }
                Ok(d.asin())
            }
            (None, None) => unreachable!("clap requires one of --delta / --eps"),
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Probability that a random tensor lies within relative distance δ of rank one.
    Prob {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        radius: Radius,
    },
    /// Reach of the spherical Veronese variety.
    Reach {
        #[command(flatten)]
        shape: Shape,
    },
    /// Nonzero curvature coefficients.
    Curvature {
        #[command(flatten)]
        shape: Shape,
    },
    /// Volume of the ε-tube around the spherical Veronese.
    TubeVolume {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        radius: Radius,
    },
    /// Normal-space split sizes, pullback factor and geodesic curvature.
    Geometry {
        #[command(flatten)]
        shape: Shape,
    },
    /// Coefficients of E[det(I − λQ)] for Q ~ GOE(n).
    GoeDet {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Best rank-one approximation of a polynomial read from JSON.
    Approx {
        /// JSON file `{"n", "d", "coeffs"}`; `-` reads standard input.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Geometric measures of entanglement of a polynomial read from JSON.
    Entangle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Monte-Carlo and finite-difference checks.
    Mc {
        #[command(subcommand)]
        check: McCommand,
    },
    /// Closed-form probability (and optional Monte-Carlo estimate) over a δ grid.
    Sweep {
        #[command(flatten)]
        shape: Shape,
        /// `start:step:stop` or a comma-separated list.
        #[arg(long)]
        grid: String,
        /// Add Monte-Carlo estimates for grid points below the reach.
        #[arg(long)]
        mc: bool,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum McCommand {
    /// Empirical closeness probability against the closed form.
    Prob {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        radius: Radius,
        /// Also write per-sample records (index, distance, indicator) as CSV.
        #[arg(long)]
        samples_csv: Option<PathBuf>,
    },
    /// Sample mean of det(I − λQ) over GOE(n).
    GoeDet {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda: f64,
    },
    /// Entry variances of Weingarten matrices of Gaussian normal vectors.
    Weingarten {
        #[command(flatten)]
        shape: Shape,
    },
    /// Finite-difference speed of Veronese great circles.
    Pullback {
        #[command(flatten)]
        shape: Shape,
    },
    /// Finite-difference curvature of Veronese geodesics.
    Curvature {
        #[command(flatten)]
        shape: Shape,
    },
}

/// The resolved configuration echoed at the top of every report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Stream layout: sample `i` uses stream `i` of the master seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_streams: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub format: Format,
    pub output: String,
    pub strict: bool,
}

/// A finished run: the report text and whether strict mode should fail it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub nonconverged: bool,
}

/// 17 significant digits for every float, pretty-printed structure.
struct Digits17 {
    inner: PrettyFormatter<'static>,
}

macro_rules! forward {
    ($($name:ident),* $(,)?) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
            self.inner.$name(w)
        })*
    };
}

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", fmt_float(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    forward!(
        begin_array,
        end_array,
        end_array_value,
        begin_object,
        end_object,
        begin_object_value,
        end_object_value,
    );
}

pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        Digits17 {
            inner: PrettyFormatter::new(),
        },
    );
    value.serialize(&mut ser).expect("report types serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Flattens nested objects and arrays into dotted column names.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => {
            let text = match (n.as_u64(), n.as_i64(), n.as_f64()) {
                (Some(u), _, _) => u.to_string(),
                (_, Some(i), _) => i.to_string(),
                (_, _, Some(f)) => fmt_float(f),
                _ => n.to_string(),
            };
            out.push((prefix.to_string(), text));
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
    }
}

fn csv_table(config: &RunConfig, rows: &[Value]) -> Result<String> {
    let mut text = String::new();
    let header = serde_json::to_string(config).expect("config serializes");
    writeln!(text, "# config: {header}").expect("write to String");
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut columns: Option<Vec<String>> = None;
    for row in rows {
        let mut cells = Vec::new();
        flatten("", row, &mut cells);
        if columns.is_none() {
            let names: Vec<String> = cells.iter().map(|(k, _)| k.clone()).collect();
            writer.write_record(&names).map_err(csv_error)?;
            columns = Some(names);
        }
        writer
            .write_record(cells.iter().map(|(_, v)| v))
            .map_err(csv_error)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Output(e.into_error()))?;
    text.push_str(&String::from_utf8(bytes).expect("CSV is UTF-8"));
    Ok(text)
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Output(io::Error::other(e))
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(config: &RunConfig, body: T) -> Result<String> {
    match config.format {
        Format::Json => Ok(to_json(&Report { config, body })),
        Format::Csv => {
            let row = serde_json::to_value(&body).expect("report serializes");
            csv_table(config, &[row])
        }
    }
}

fn space(shape: Shape) -> Result<SpaceParams> {
    Ok(SpaceParams::new(shape.n, shape.d)?)
}

#[derive(Serialize)]
struct ShapeOut {
    n: usize,
    d: usize,
    #[serde(rename = "N")]
    big_n: usize,
}

impl From<SpaceParams> for ShapeOut {
    fn from(p: SpaceParams) -> Self {
        Self {
            n: p.n(),
            d: p.d(),
            big_n: p.sphere_dim(),
        }
    }
}

#[derive(Serialize)]
struct ProbOut {
    #[serde(flatten)]
    shape: ShapeOut,
    delta: f64,
    value: f64,
    /// The raw value clamped to [0, 1], for reporting only.
    probability: f64,
    valid_range: bool,
    reach: ReachResult,
}

#[derive(Serialize)]
struct TubeOut {
    #[serde(flatten)]
    shape: ShapeOut,
    eps: f64,
    value: f64,
    valid_range: bool,
    reach: ReachResult,
}

#[derive(Serialize)]
struct ReachOut {
    #[serde(flatten)]
    shape: ShapeOut,
    #[serde(flatten)]
    reach: ReachResult,
    unique_approx_lower_bound: f64,
}

#[derive(Serialize)]
struct CurvatureOut {
    #[serde(flatten)]
    shape: ShapeOut,
    /// `K_{N−n+j}` keyed by `j`.
    coefficients: std::collections::BTreeMap<String, f64>,
    veronese_volume: f64,
}

#[derive(Serialize)]
struct GeometryOut {
    #[serde(flatten)]
    shape: ShapeOut,
    tangent_dim: usize,
    w_dim: usize,
    p_dim: usize,
    pullback_factor: f64,
    geodesic_curvature_norm: f64,
    reach: ReachResult,
}

#[derive(Serialize)]
struct GoeDetOut {
    n: usize,
    coeffs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

#[derive(Serialize)]
struct ApproxOut {
    #[serde(flatten)]
    shape: ShapeOut,
    norm: f64,
    #[serde(flatten)]
    result: rankone_core::RankOneResult,
}

#[derive(Serialize)]
struct EntangleOut {
    #[serde(flatten)]
    shape: ShapeOut,
    #[serde(rename = "E_G")]
    e_g: f64,
    #[serde(rename = "E_G_log")]
    e_g_log: f64,
    #[serde(rename = "E_G_log_infinite")]
    e_g_log_infinite: bool,
    distance: f64,
    converged: bool,
}

#[derive(Serialize)]
struct McProbOut {
    #[serde(flatten)]
    shape: ShapeOut,
    delta: f64,
    oracle: rankone_core::OracleKind,
    nonconverged: usize,
    #[serde(flatten)]
    report: rankone_core::McReport,
}

#[derive(Serialize)]
struct McGoeOut {
    n: usize,
    lambda: f64,
    #[serde(flatten)]
    report: rankone_core::McReport,
}

#[derive(Serialize)]
struct SweepRow {
    delta: f64,
    eps: f64,
    probability: f64,
    valid_range: bool,
    mc_estimate: Option<f64>,
    mc_stderr: Option<f64>,
    mc_ci_low: Option<f64>,
    mc_ci_high: Option<f64>,
}

#[derive(Serialize)]
struct SweepOut {
    #[serde(flatten)]
    shape: ShapeOut,
    rows: Vec<SweepRow>,
}

fn read_polynomial(path: &PathBuf) -> Result<BwPolynomial> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!(
            "invalid polynomial JSON in {}: {e}",
            path.display()
        ))
    })
}

/// Parses `start:step:stop` (inclusive, with a small slack for rounding)
/// or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| CliError::Input(format!("invalid grid {spec:?}: {what}"));
    let values: Vec<f64> = if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("expected start:step:stop"))?;
        let [start, step, stop] = parts[..] else {
            return Err(bad("expected start:step:stop"));
        };
        if !(step > 0.0) || !step.is_finite() {
            return Err(bad("step must be positive"));
        }
        let count = ((stop - start) / step + 1e-9).floor();
        if !(0.0..=1e7).contains(&count) {
            return Err(bad("empty or oversized range"));
        }
        // snap to 12 decimals so `0:0.1:0.3` yields 0.3, not 0.30000000000000004
        (0..=count as usize)
            .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        spec.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(bad("empty grid"));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(bad(&format!("{v} outside [0, 1]")));
    }
    Ok(values)
}

fn solver_options(common: &Common, method: SolverMethod) -> SolverOptions {
    SolverOptions {
        method,
        restarts: common.restarts,
        ..SolverOptions::default()
    }
    .with_seed(SeedSpec::new(common.seed, 0))
}

fn write_sample_csv(path: &PathBuf, records: &[SampleRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record([
        "index",
        "distance",
        "relative_distance",
        "indicator",
        "converged",
    ])
    .map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.index.to_string(),
            fmt_float(r.distance),
            fmt_float(r.relative_distance),
            u8::from(r.indicator).to_string(),
            r.converged.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs one command and renders its report.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let common = &cli.common;
    let mut cfg = RunConfig {
        format: common.format,
        output: common
            .out
            .as_ref()
            .map_or_else(|| "stdout".to_string(), |p| p.display().to_string()),
        strict: common.strict,
        ..RunConfig::default()
    };
    let set_shape = |cfg: &mut RunConfig, p: SpaceParams| {
        cfg.n = Some(p.n());
        cfg.d = Some(p.d());
        cfg.big_n = Some(p.sphere_dim());
    };
    let set_sampling = |cfg: &mut RunConfig| {
        cfg.samples = Some(common.samples);
        cfg.seed = Some(common.seed);
        cfg.seed_streams = Some("sample i -> (seed, stream i)");
        cfg.workers = Some(common.workers);
    };
    let mc_config = McConfig::new(common.samples, common.seed).with_workers(common.workers);
    let mut nonconverged = false;

    let text = match &cli.command {
        Command::Prob { shape, radius } => {
            cfg.subcommand = "prob".into();
            let p = space(*shape)?;
            set_shape(&mut cfg, p);
            let delta = radius.delta()?;
            cfg.delta = Some(delta);
            cfg.eps = radius.eps;
            let r = prob_close_rank_one(p, delta)?;
            emit(
                &cfg,
                ProbOut {
                    shape: p.into(),
                    delta,
                    value: r.value,
                    probability: r.value.clamp(0.0, 1.0),
                    valid_range: r.valid_range,
                    reach: reach(p),
                },
            )?
        }
        Command::Reach { shape } => {
            cfg.subcommand = "reach".into();
            let p = space(*shape)?;
            set_shape(&mut cfg, p);
            emit(
                &cfg,
                ReachOut {
                    shape: p.into(),
                    reach: reach(p),
                    unique_approx_lower_bound: unique_approx_lower_bound(p),
                },
            )?
        }
        Command::Curvature { shape } => {
            cfg.subcommand = "curvature".into();
            let p = space(*shape)?;
            set_shape(&mut cfg, p);
            let table = curvature_table(p);
            emit(
                &cfg,
                CurvatureOut {
                    shape: p.into(),
                    coefficients: table
                        .entries
                        .iter()
                        .map(|(j, v)| (j.to_string(), *v))
                        .collect(),
                    veronese_volume: veronese_volume(p),
                },
            )?
        }
        Command::TubeVolume { shape, radius } => {
            cfg.subcommand = "tube-volume".into();
            let p = space(*shape)?;
            set_shape(&mut cfg, p);
            let eps = radius.eps()?;
            cfg.eps = Some(eps);
            cfg.delta = radius.delta;
            let r = tube_volume(p, eps)?;
            emit(
                &cfg,
                TubeOut {
                    shape: p.into(),
                    eps,
                    value: r.value,
                    valid_range: r.valid_range,
                    reach: reach(p),
                },
            )?
        }
        Command::Geometry { shape } => {
            cfg.subcommand = "geometry".into();
            let p = space(*shape)?;
            set_shape(&mut cfg, p);
            let split = normal_split(p);
            emit(
                &cfg,
                GeometryOut {
                    shape: p.into(),
                    tangent_dim: split.tangent_dim(),
                    w_dim: split.w_dim(),
                    p_dim: split.p_dim(),
                    pullback_factor: pullback_factor(p),
                    geodesic_curvature_norm: geodesic_curvature_norm(p),
                    reach: reach(p),
                },
            )?
        }
        Command::GoeDet { n, lambda } => {
            cfg.subcommand = "goe-det".into();
            cfg.n = Some(*n);
            cfg.lambda = *lambda;
            let poly = goe_det_expectation(*n)?;
            emit(
                &cfg,
                GoeDetOut {
                    n: *n,
                    value: lambda.map(|l| poly.evaluate(l)),
                    coeffs: poly.coeffs,
                    lambda: *lambda,
                },
            )?
        }
        Command::Approx { input, method } => {
            cfg.subcommand = "approx".into();
            cfg.input = Some(input.display().to_string());
            cfg.method = Some(*method);
            let poly = read_polynomial(input)?;
            set_shape(&mut cfg, poly.params());
            cfg.seed = Some(common.seed);
            cfg.restarts = common.restarts;
            let result = best_rank_one(&poly, &solver_options(common, (*method).into()))?;
            nonconverged = !result.converged;
            emit(
                &cfg,
                ApproxOut {
                    shape: poly.params().into(),
                    norm: poly.norm(),
                    result,
                },
            )?
        }
        Command::Entangle { input, method } => {
            cfg.subcommand = "entangle".into();
            cfg.input = Some(input.display().to_string());
            cfg.method = Some(*method);
            let poly = read_polynomial(input)?;
            set_shape(&mut cfg, poly.params());
            cfg.seed = Some(common.seed);
            cfg.restarts = common.restarts;
            let opts = solver_options(common, (*method).into());
            let unit = poly.scaled(1.0 / poly.norm().max(f64::MIN_POSITIVE));
            let result = best_rank_one(&unit, &opts)?;
            let e_g = entanglement_geometric(&poly, &opts)?;
            let e_log = entanglement_log(&poly, &opts)?;
            nonconverged = !result.converged;
            emit(
                &cfg,
                EntangleOut {
                    shape: poly.params().into(),
                    e_g,
                    e_g_log: e_log.value,
                    e_g_log_infinite: e_log.infinite,
                    distance: result.distance,
                    converged: result.converged,
                },
            )?
        }
        Command::Mc { check } => match check {
            McCommand::Prob {
                shape,
                radius,
                samples_csv,
            } => {
                cfg.subcommand = "mc prob".into();
                let p = space(*shape)?;
                set_shape(&mut cfg, p);
                set_sampling(&mut cfg);
                cfg.restarts = common.restarts;
                let delta = radius.delta()?;
                cfg.delta = Some(delta);
                cfg.eps = radius.eps;
                let run = mc_probability(
                    p,
                    delta,
                    &mc_config,
                    &solver_options(common, SolverMethod::Auto),
                    samples_csv.is_some(),
                )?;
                if let (Some(path), Some(records)) = (samples_csv, &run.records) {
                    write_sample_csv(path, records)?;
                }
                nonconverged = run.nonconverged > 0;
                emit(
                    &cfg,
                    McProbOut {
                        shape: p.into(),
                        delta,
                        oracle: run.oracle,
                        nonconverged: run.nonconverged,
                        report: run.report,
                    },
                )?
            }
            McCommand::GoeDet { n, lambda } => {
                cfg.subcommand = "mc goe-det".into();
                cfg.n = Some(*n);
                cfg.lambda = Some(*lambda);
                set_sampling(&mut cfg);
                let report = mc_goe_det(*n, *lambda, &mc_config)?;
                emit(
                    &cfg,
                    McGoeOut {
                        n: *n,
                        lambda: *lambda,
                        report,
                    },
                )?
            }
            McCommand::Weingarten { shape } => {
                cfg.subcommand = "mc weingarten".into();
                let p = space(*shape)?;
                set_shape(&mut cfg, p);
                set_sampling(&mut cfg);
                emit(&cfg, mc_weingarten_stats(p, &mc_config)?)?
            }
            McCommand::Pullback { shape } => {
                cfg.subcommand = "mc pullback".into();
                let p = space(*shape)?;
                set_shape(&mut cfg, p);
                emit(&cfg, check_metric_pullback(p))?
            }
            McCommand::Curvature { shape } => {
                cfg.subcommand = "mc curvature".into();
                let p = space(*shape)?;
                set_shape(&mut cfg, p);
                emit(&cfg, check_geodesic_curvature(p))?
            }
        },
        Command::Sweep { shape, grid, mc } => {
            cfg.subcommand = "sweep".into();
            let p = space(*shape)?;
            set_shape(&mut cfg, p);
            let deltas = parse_grid(grid)?;
            cfg.grid = Some(deltas.clone());
            if *mc {
                set_sampling(&mut cfg);
                cfg.restarts = common.restarts;
            }
            let rho = reach(p).rho;
            let opts = solver_options(common, SolverMethod::Auto);
            let mut rows = Vec::with_capacity(deltas.len());
            for &delta in &deltas {
                let r = prob_close_rank_one(p, delta)?;
                let mut row = SweepRow {
                    delta,
                    eps: delta.asin(),
                    probability: r.value,
                    valid_range: r.valid_range,
                    mc_estimate: None,
                    mc_stderr: None,
                    mc_ci_low: None,
                    mc_ci_high: None,
                };
                if *mc && delta.asin() < rho {
                    let run = mc_probability(p, delta, &mc_config, &opts, false)?;
                    nonconverged |= run.nonconverged > 0;
                    row.mc_estimate = Some(run.report.estimate);
                    row.mc_stderr = Some(run.report.stderr);
                    row.mc_ci_low = Some(run.report.ci_low);
                    row.mc_ci_high = Some(run.report.ci_high);
                }
                rows.push(row);
            }
            match cfg.format {
                Format::Json => to_json(&Report {
                    config: &cfg,
                    body: SweepOut {
                        shape: p.into(),
                        rows,
                    },
                }),
                Format::Csv => {
                    let rows: Vec<Value> = rows
                        .iter()
                        .map(|r| serde_json::to_value(r).expect("row serializes"))
                        .collect();
                    csv_table(&cfg, &rows)?
                }
            }
        }
    };
    Ok(Outcome { text, nonconverged })
}

/// Parses arguments, runs, writes the report and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    match run(&cli).and_then(|outcome| {
        match &cli.common.out {
            Some(path) => std::fs::write(path, &outcome.text)?,
            None => io::stdout().write_all(outcome.text.as_bytes())?,
        }
        Ok(outcome)
    }) {
        Ok(outcome) if cli.common.strict && outcome.nonconverged => {
            eprintln!("error: solver did not converge (strict mode)");
            EXIT_NONCONVERGED
        }
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
