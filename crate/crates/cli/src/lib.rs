//! Command-line front end: argument definitions, dispatch and rendering.

pub mod input;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use iacm::approx::{approximate, iacm, trivariate_targets, ApproximationResult, MAX_APPROX_RANGE};
use iacm::causation::{calc_causal_probabilities, CausationReport};
use iacm::discovery::{discover, DiscoveryConfig, DiscoveryVerdict, PreprocessMode, DEFAULT_EPSILON};
use iacm::synth::{run_benchmark, BenchmarkConfig, BenchmarkMethod, BenchmarkReport, NoiseKind};
use iacm::{CausalModelSpec, ErrorMode, ModelVariant};
use serde::Serialize;

use input::{ColumnSpec, Dataset};

#[derive(Debug, Parser)]
#[command(name = "iacm", version, about = "Approximate data to causal models and infer causal directions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide between x -> y, y -> x and no decision.
    Discover(DataArgs),
    /// PN, PS and PNS of x for y under the best monotone model (binary data).
    Causation(DataArgs),
    /// Project the data onto one causal model and report the approximation error.
    Approx {
        #[command(flatten)]
        data: DataArgs,
        /// Model name, e.g. x_to_y, y_to_x_mono_inc, anm_s2, z_confounder.
        #[arg(long, value_parser = parse_model)]
        model: ModelVariant,
    },
    /// Run discovery on synthetic noise models with known direction.
    Bench(BenchArgs),
}

fn parse_model(s: &str) -> std::result::Result<ModelVariant, String> {
    s.parse::<ModelVariant>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preprocess {
    None,
    Split,
    #[value(alias = "split_and_balance")]
    SplitAndBalance,
}

impl From<Preprocess> for PreprocessMode {
    fn from(p: Preprocess) -> Self {
        match p {
            Preprocess::None => PreprocessMode::None,
            Preprocess::Split => PreprocessMode::Split,
            Preprocess::SplitAndBalance => PreprocessMode::SplitAndBalance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ErrorArg {
    Local,
    Global,
}

impl From<ErrorArg> for ErrorMode {
    fn from(e: ErrorArg) -> Self {
        match e {
            ErrorArg::Local => ErrorMode::Local,
            ErrorArg::Global => ErrorMode::Global,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV file with a header row, or `-` for stdin.
    pub input: String,
    /// Cause candidate column (name or index); default: first non-env column.
    #[arg(long)]
    pub x: Option<String>,
    /// Effect candidate column; default: second non-env column.
    #[arg(long)]
    pub y: Option<String>,
    /// Third variable for trivariate models.
    #[arg(long)]
    pub z: Option<String>,
    /// Environment column with labels obs, do:<v>, do:x=<v>, do:y=<v>, do:z=<v>; default: a column named env.
    #[arg(long)]
    pub env: Option<String>,
    #[arg(long)]
    pub bx: Option<usize>,
    #[arg(long)]
    pub by: Option<usize>,
    #[arg(long)]
    pub bz: Option<usize>,
    /// Split for unlabeled data.
    #[arg(long, value_enum, default_value = "none")]
    pub preprocess: Preprocess,
    #[arg(long, value_enum, default_value = "local")]
    pub error_mode: ErrorArg,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Pair x at time t with y at time t + lag.
    #[arg(long, default_value_t = 0)]
    pub lag: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Additive smoothing of empirical counts.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Use the additive-noise objectives (binary discovery only).
    #[arg(long)]
    pub anm: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub output: OutputFormat,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        let cols = ColumnSpec {
            x: self.x.clone(),
            y: self.y.clone(),
            z: self.z.clone(),
            env: self.env.clone(),
        };
        Dataset::from_path(&self.input, &cols)?.with_lag(self.lag)
    }

    fn discovery_config(&self) -> DiscoveryConfig {
        DiscoveryConfig {
            mode: self.preprocess.into(),
            error_mode: self.error_mode.into(),
            epsilon: self.epsilon,
            epsilon_mono: self.epsilon,
            anm_objectives: self.anm,
            alpha: self.alpha,
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "additive")]
    pub noise: NoiseArg,
    /// Comma-separated range configurations, e.g. 2x2,3x3,2x10.
    #[arg(long, default_value = "2x2,3x3")]
    pub ranges: String,
    #[arg(long, default_value_t = 200)]
    pub models: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also run the additive-noise-objective variant.
    #[arg(long)]
    pub plus: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Additive,
    Multiplicative,
}

fn parse_ranges(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|part| {
            let (a, b) = part
                .trim()
                .split_once('x')
                .with_context(|| format!("range '{part}' is not of the form <bx>x<by>"))?;
            Ok((a.parse()?, b.parse()?))
        })
        .collect()
}

/// Six significant digits; `inf`/`-inf`/`nan` spelled out.
pub fn fmt6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.5e}").parse().unwrap_or(v);
    if (1e-4..1e6).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{v:.5e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), fmt6)
}

fn key_values(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn render_verdict(v: &DiscoveryVerdict, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => json(v),
        OutputFormat::Table => Ok(key_values(&[
            ("decision", v.decision.to_string()),
            ("d_xy", fmt6(v.d_xy)),
            ("d_yx", fmt6(v.d_yx)),
            ("pns_xy", fmt_opt(v.pns_xy)),
            ("pns_yx", fmt_opt(v.pns_yx)),
            ("monotone_path", v.used_monotone_path.to_string()),
            ("epsilon", fmt6(v.epsilon)),
        ])),
    }
}

pub fn render_causation(r: &CausationReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => json(r),
        OutputFormat::Table => Ok(key_values(&[
            ("direction", r.direction_assumed.to_string()),
            ("monotone_kind", format!("{:?}", r.monotone_kind).to_lowercase()),
            ("pn", fmt_opt(r.pn)),
            ("ps", fmt_opt(r.ps)),
            ("pns", fmt6(r.pns)),
            ("d_increasing", fmt6(r.d_increasing)),
            ("d_decreasing", fmt6(r.d_decreasing)),
        ])),
    }
}

pub fn render_approximation(r: &ApproximationResult, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => json(r),
        OutputFormat::Table => Ok(key_values(&[
            ("model", r.model.variant.to_string()),
            ("s_value", fmt6(r.s_value)),
            ("global_error", fmt6(r.global_error)),
            ("local_error", fmt6(r.local_error)),
            ("error", fmt6(r.error())),
            ("fallback_used", format!("{:?}", r.fallback_used)),
        ])),
    }
}

pub fn render_benchmark(r: &BenchmarkReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => json(r),
        OutputFormat::Table => Ok(r.to_table()),
    }
}

pub fn cmd_discover(args: &DataArgs) -> Result<DiscoveryVerdict> {
    let data = args.load()?;
    let (b_x, b_y, _) = data.ranges(args.bx, args.by, None);
    check_range(b_x, b_y)?;
    let d = data.discovery_data(b_x, b_y)?;
    Ok(discover(&d, b_x, b_y, &args.discovery_config())?)
}

pub fn cmd_causation(args: &DataArgs) -> Result<CausationReport> {
    let data = args.load()?;
    let (b_x, b_y, _) = data.ranges(args.bx, args.by, None);
    if (b_x, b_y) != (2, 2) {
        return Err(iacm::IacmError::BinaryOnly { b_x, b_y }.into());
    }
    let cfg = args.discovery_config();
    let inputs = data
        .discovery_data(2, 2)?
        .split(2, cfg.mode, cfg.seed)?
        .inputs(2, 2, cfg.alpha)?;
    Ok(calc_causal_probabilities(&inputs, cfg.error_mode)?)
}

pub fn cmd_approx(args: &DataArgs, model: ModelVariant) -> Result<ApproximationResult> {
    let data = args.load()?;
    let (b_x, b_y, b_z) = data.ranges(args.bx, args.by, args.bz);
    let cfg = args.discovery_config();
    if model.is_trivariate() {
        let spec = CausalModelSpec::trivariate(model, b_x, b_y, b_z);
        spec.validate()?;
        let sample = data.trivariate_sample((b_x, b_y, b_z))?;
        let (targets, fallback) = trivariate_targets(&spec, &sample, cfg.alpha)?;
        let mut result = approximate(&spec, &targets, cfg.error_mode)?;
        result.fallback_used = fallback;
        return Ok(result);
    }
    check_range(b_x, b_y)?;
    let spec = CausalModelSpec::bivariate(model, b_x, b_y);
    spec.validate()?;
    let d = data.discovery_data(b_x, b_y)?;
    let inputs = if model.is_reversed() {
        d.swapped().split(b_y, cfg.mode, cfg.seed)?.inputs(b_y, b_x, cfg.alpha)?
    } else {
        d.split(b_x, cfg.mode, cfg.seed)?.inputs(b_x, b_y, cfg.alpha)?
    };
    Ok(iacm(&inputs, &spec, cfg.error_mode)?)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<BenchmarkReport> {
    let mut methods = vec![BenchmarkMethod::iacm()];
    if args.plus {
        methods.push(BenchmarkMethod::iacm_plus());
    }
    let cfg = BenchmarkConfig {
        ranges: parse_ranges(&args.ranges)?,
        noise_kind: match args.noise {
            NoiseArg::Additive => NoiseKind::Additive,
            NoiseArg::Multiplicative => NoiseKind::Multiplicative,
        },
        n_models: args.models,
        n_samples: args.samples,
        methods,
        seed: args.seed,
    };
    Ok(run_benchmark(&cfg)?)
}

fn check_range(b_x: usize, b_y: usize) -> Result<()> {
    if b_x > MAX_APPROX_RANGE || b_y > MAX_APPROX_RANGE {
        bail!("ranges ({b_x}, {b_y}) exceed the supported maximum of {MAX_APPROX_RANGE}");
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Discover(a) => render_verdict(&cmd_discover(a)?, a.output),
        Command::Causation(a) => render_causation(&cmd_causation(a)?, a.output),
        Command::Approx { data, model } => render_approximation(&cmd_approx(data, *model)?, data.output),
        Command::Bench(a) => render_benchmark(&cmd_bench(a)?, a.output),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt6(0.143_841_036_225_890_46), "0.143841");
        assert_eq!(fmt6(1.0), "1");
        assert_eq!(fmt6(0.0), "0");
        assert_eq!(fmt6(123_456_789.0), "1.23457e8");
        assert_eq!(fmt6(2.5e-9), "2.50000e-9");
        assert_eq!(fmt6(f64::INFINITY), "inf");
        assert_eq!(fmt6(-0.01), "-0.01");
    }

    #[test]
    fn range_lists() {
        assert_eq!(parse_ranges("2x2, 3x3,2x10").unwrap(), vec![(2, 2), (3, 3), (2, 10)]);
        assert!(parse_ranges("22").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
