use std::ffi::OsString;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::failure::Failure;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "rwalk",
    version,
    about = "Endpoint laws of planar random walks with unit steps on a symmetric arc"
)]
pub struct Cli {
    /// Output format; `compare` defaults to json, everything else to csv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// JSON object of flag values; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "RWALK_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Closed-form radius and angle laws of the two-step walk.
    Exact2(Exact2Args),
    /// Boundary curves of the reachable set.
    Support(SupportArgs),
    /// Joint law on a polar grid, built one step at a time.
    Recurse(RecurseArgs),
    /// Gaussian large-N approximations.
    Approx(ApproxArgs),
    /// CDF and density of a generalized chi-square law.
    Genchi2(Genchi2Args),
    /// Monte-Carlo endpoints or their histograms.
    Sample(SampleArgs),
    /// Kolmogorov-Smirnov distances and histogram overlays of a model
    /// against Monte-Carlo samples.
    Compare(CompareArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Exact2(_) => "exact2",
            Command::Support(_) => "support",
            Command::Recurse(_) => "recurse",
            Command::Approx(_) => "approx",
            Command::Genchi2(_) => "genchi2",
            Command::Sample(_) => "sample",
            Command::Compare(_) => "compare",
        }
    }
}

/// Accepts plain numbers and `pi`, `pi/k`, `k*pi`, `k*pi/m`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || format!("cannot read angle `{s}`; use a number or a form like pi/4");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(f) => f.trim_end_matches('*').trim().parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(factor * std::f64::consts::PI / den)
}

#[derive(Args, Debug, Clone)]
pub struct Exact2Args {
    /// Maximum step angle in radians.
    #[arg(long, value_parser = parse_angle)]
    pub a: f64,
    /// Rows in the table.
    #[arg(long, default_value_t = 500)]
    pub points: usize,
}

#[derive(Args, Debug, Clone)]
pub struct WalkArgs {
    /// Number of steps.
    #[arg(long)]
    pub n: usize,
    /// Maximum step angle in radians.
    #[arg(long, value_parser = parse_angle)]
    pub a: f64,
    /// Allow maximum angles up to pi.
    #[arg(long)]
    pub extended: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SupportArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Samples along each boundary curve.
    #[arg(long, default_value_t = 512)]
    pub points: usize,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long, default_value_t = 400)]
    pub radii: usize,
    #[arg(long, default_value_t = 400)]
    pub angles: usize,
    /// Quadrature nodes per step-angle piece.
    #[arg(long, default_value_t = 64)]
    pub phi_nodes: usize,
}

#[derive(Args, Debug, Clone)]
pub struct RecurseArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Also emit the full joint grid.
    #[arg(long)]
    pub joint: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 500)]
    pub points: usize,
}

#[derive(Args, Debug, Clone)]
pub struct Genchi2Args {
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub weights: Vec<f64>,
    /// Degrees of freedom per term; defaults to 1 each.
    #[arg(long, value_delimiter = ',')]
    pub dofs: Vec<u32>,
    /// Noncentralities per term; defaults to 0 each.
    #[arg(long, value_delimiter = ',')]
    pub noncentralities: Vec<f64>,
    /// Standard deviation of the added normal term.
    #[arg(long, default_value_t = 0.0)]
    pub sd: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub offset: f64,
    /// Evaluation points.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub x: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit radius and angle histograms with this many bins instead of
    /// the raw endpoints.
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Exact2,
    Recurse,
    Approx,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    #[arg(long, value_enum)]
    pub regime: Regime,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = rwalk_core::mc::DEFAULT_BINS)]
    pub bins: usize,
    /// Points at which an expensive model CDF is evaluated before
    /// interpolation.
    #[arg(long, default_value_t = 2000)]
    pub cdf_nodes: usize,
    #[command(flatten)]
    pub grid: GridArgs,
}

/// Parses `argv`, filling flags not given on the command line from the
/// `--config` file when there is one.
pub fn parse<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    // Required flags may come from the config, so look for it leniently.
    let lenient = Cli::command().ignore_errors(true).try_get_matches_from(&argv);
    let found = lenient
        .ok()
        .filter(|m| m.subcommand().is_some())
        .and_then(|m| m.get_one::<PathBuf>("config").cloned().map(|p| (p, m)));
    let Some((path, matches)) = found else {
        let matches = Cli::command().try_get_matches_from(&argv)?;
        return Cli::from_arg_matches(&matches);
    };
    let extra = config_args(&path, &matches)?;
    let mut full = argv;
    full.extend(extra);
    let matches = Cli::command().try_get_matches_from(&full)?;
    Cli::from_arg_matches(&matches)
}

fn config_error(msg: String) -> clap::Error {
    Cli::command().error(clap::error::ErrorKind::ValueValidation, msg)
}

fn config_args(path: &PathBuf, matches: &ArgMatches) -> Result<Vec<OsString>, clap::Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| config_error(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(entries) = value else {
        return Err(config_error("config must be a JSON object".into()));
    };
    let (sub_name, sub_matches) = matches.subcommand().expect("subcommand is required");
    let root = Cli::command();
    let sub = root.find_subcommand(sub_name).expect("parsed subcommand exists");
    let mut out = Vec::new();
    for (key, value) in entries {
        let id = key.replace('-', "_");
        if id == "config" {
            continue;
        }
        let Some(arg) = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_id().as_str() == id)
        else {
            return Err(config_error(format!("unknown config key `{key}` for {sub_name}")));
        };
        let given = [sub_matches, matches]
            .iter()
            .any(|m| matches!(m.try_contains_id(&id), Ok(true)) && m.value_source(&id) == Some(ValueSource::CommandLine));
        if given {
            continue;
        }
        let flag = format!("--{}", arg.get_long().unwrap_or(&id));
        let is_switch = matches!(arg.get_action(), clap::ArgAction::SetTrue);
        match value {
            Value::Bool(true) if is_switch => out.push(flag.into()),
            Value::Bool(false) if is_switch => {}
            Value::Null => {}
            Value::Array(items) => {
                let joined: Vec<String> = items.iter().map(scalar_text).collect::<Result<_, _>>()?;
                out.push(format!("{flag}={}", joined.join(",")).into());
            }
            other => out.push(format!("{flag}={}", scalar_text(&other)?).into()),
        }
    }
    Ok(out)
}

fn scalar_text(v: &Value) -> Result<String, clap::Error> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        other => Err(config_error(format!("unsupported config value {other}"))),
    }
}

/// Usage errors found while parsing, mapped to the CLI's exit codes.
pub fn clap_failure(e: clap::Error) -> Option<Failure> {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = e.print();
            None
        }
        _ => Some(Failure::Usage(e.render().to_string())),
    }
}
