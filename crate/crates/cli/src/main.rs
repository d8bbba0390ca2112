//! `hypconv` command-line driver.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 resource limit,
//! 3 failed assertion.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hypconv", version, about = "Geodesic hulls, drop sets and convex separators", args_override_self = true)]
struct Cli {
    /// Worker threads for parallel passes (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// TOML file of flag values (`res = 0.006`, `space = "h2xr"`, ...); flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Approximate the convex hull of seed points by the Kantorovich iteration.
    #[command(args_override_self = true)]
    Hull(HullArgs),
    /// Cut an `h2xr` cloud with the plane over a base geodesic.
    #[command(args_override_self = true)]
    Slice(SliceArgs),
    /// Verify that the vertical extension of H² is not drop complete.
    #[command(args_override_self = true)]
    Counterexample(CounterexampleArgs),
    /// Build a convex separator below g and check f ≤ φ ≤ g.
    #[command(args_override_self = true)]
    Separate(SeparateArgs),
    /// Run the ruler, betweenness and incidence checks on a space.
    #[command(args_override_self = true)]
    Axioms(AxiomsArgs),
    /// Map points between the half-plane and the Klein disk.
    #[command(args_override_self = true)]
    Convert(ConvertArgs),
}

const SUBCOMMANDS: [&str; 6] = ["hull", "slice", "counterexample", "separate", "axioms", "convert"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceId {
    E1,
    E2,
    E3,
    H2,
    H2xr,
    E2xr,
}

#[derive(Debug, Args)]
pub struct HullArgs {
    #[arg(long, value_enum, default_value = "h2xr")]
    pub space: SpaceId,
    /// Inline seeds: `;` between points, `,` between coordinates, height last.
    #[arg(long, conflicts_with = "seeds_file")]
    pub seeds: Option<String>,
    /// Seeds as a point-cloud CSV (every row is used).
    #[arg(long, value_name = "FILE")]
    pub seeds_file: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0.006)]
    pub res: f64,
    /// Deduplication radius [default: res/2]; 0 disables it.
    #[arg(long)]
    pub dedup_tol: Option<f64>,
    #[arg(long, default_value_t = hypconv::hull::DEFAULT_MAX_POINTS)]
    pub max_points: usize,
    /// Track generator witnesses and print the witness-size histogram.
    #[arg(long)]
    pub witnesses: bool,
    /// Output CSV [default: stdout].
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    /// `h2xr` point-cloud CSV.
    #[arg(long, value_name = "FILE")]
    pub cloud: PathBuf,
    /// Two base points `x1,y1;x2,y2`; s is measured from the first towards the second.
    #[arg(long)]
    pub plane: String,
    #[arg(long, default_value_t = 0.01)]
    pub plane_tol: f64,
    /// Output CSV [default: stdout].
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 2)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0.006)]
    pub res: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Deduplication radius [default: res/2].
    #[arg(long)]
    pub dedup_tol: Option<f64>,
    /// Base-distance window around x for the drop-height test.
    #[arg(long, default_value_t = hypconv::counterexample::DEFAULT_WINDOW)]
    pub window: f64,
    /// Required excess of the drop heights over eps1.
    #[arg(long, default_value_t = hypconv::counterexample::DEFAULT_MARGIN)]
    pub margin: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub incidence_tol: f64,
    #[arg(long, default_value_t = hypconv::hull::DEFAULT_MAX_POINTS)]
    pub max_points: usize,
    /// Recorded in the report; the construction itself is not random.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Machine-readable JSON record.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseSpaceId {
    E1,
    E2,
    E3,
    H2,
}

#[derive(Debug, Args)]
pub struct SeparateArgs {
    #[arg(long, value_enum, default_value = "e1")]
    pub space: BaseSpaceId,
    /// Lower function CSV (`x1[,x2..],value`).
    #[arg(long, value_name = "FILE")]
    pub f: PathBuf,
    /// Upper function CSV on the same domain.
    #[arg(long, value_name = "FILE")]
    pub g: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0.01)]
    pub res: f64,
    /// Deduplication radius [default: res/2].
    #[arg(long)]
    pub dedup_tol: Option<f64>,
    /// Base radius searched around each domain point when reading off φ.
    #[arg(long, default_value_t = 0.02)]
    pub snap: f64,
    #[arg(long, default_value_t = 11)]
    pub t_steps: usize,
    /// Random domain pairs for the convexity check.
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// Random tuples for the (sep2) falsifier; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub sep2_tuples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = hypconv::hull::DEFAULT_MAX_POINTS)]
    pub max_points: usize,
    /// φ as a function CSV [default: stdout].
    #[arg(long, value_name = "FILE")]
    pub phi_out: Option<PathBuf>,
    /// Machine-readable JSON record.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AxiomsArgs {
    #[arg(long, value_enum, default_value = "h2")]
    pub space: SpaceId,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Machine-readable JSON record.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Klein,
    HalfPlane,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub to: Model,
    /// Inline points `a,b;c,d`.
    #[arg(long, conflicts_with = "input")]
    pub points: Option<String>,
    /// Two-column CSV with a header row.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Output CSV [default: stdout].
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Failure classes, one per non-zero exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Resource(String),
    Assertion(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Resource(_) => 2,
            Failure::Assertion(_) => 3,
        }
    }
}

impl From<hypconv::Error> for Failure {
    fn from(e: hypconv::Error) -> Self {
        match e {
            hypconv::Error::ResourceLimit { .. } => Failure::Resource(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Position of the config path in `args`, if given.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Turns a flat TOML table into `--key value` arguments.
fn config_args(path: &PathBuf) -> Result<Vec<OsString>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => out.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => out.extend([flag.into(), s.into()]),
            toml::Value::Integer(i) => out.extend([flag.into(), i.to_string().into()]),
            toml::Value::Float(f) => out.extend([flag.into(), f.to_string().into()]),
            other => return Err(Failure::Config(format!("config key {key}: unsupported value {other}"))),
        }
    }
    Ok(out)
}

fn run(mut args: Vec<OsString>) -> Result<(), Failure> {
    if let Some(path) = config_path(&args) {
        let extra = config_args(&path)?;
        // Config values go right after the subcommand so later command-line flags override them.
        let at = args
            .iter()
            .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
            .map_or(args.len(), |i| i + 1);
        args.splice(at..at, extra);
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Failure::Config(e.to_string())),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Hull(a) => commands::hull(&a),
        Command::Slice(a) => commands::slice(&a),
        Command::Counterexample(a) => commands::counterexample(&a),
        Command::Separate(a) => commands::separate(&a),
        Command::Axioms(a) => commands::axioms(&a),
        Command::Convert(a) => commands::convert(&a),
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(m) if m.starts_with("error:") => eprintln!("{}", m.trim_end()),
                Failure::Config(m) => eprintln!("error: {}", m.trim_end()),
                Failure::Resource(m) => eprintln!("resource limit: {m}"),
                Failure::Assertion(m) => eprintln!("assertion failed: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
