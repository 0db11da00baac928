mod commands;
mod svg;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "geotan", version, about = "Tangent analysis of sampled sets in Euclidean space")]
pub struct Cli {
    /// Seed for randomized instances and searches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Include wall-clock runtime in demo reports.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a generated point set as CSV.
    Generate(GenerateArgs),
    /// Multi-scale tangent report at a point.
    Analyze(AnalyzeArgs),
    /// Hausdorff/packing content estimates or an expansive ball tree.
    Pack(PackArgs),
    /// Pointed Gromov-Hausdorff estimate between two based sets.
    Ghdist(GhArgs),
    /// Run a scripted demo (or `all`).
    Demo(DemoArgs),
    /// Scatter plot of a point set or of a blow-up window.
    Svg(SvgArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// spiral | spiked_cube | whitney_disks | cantor_cone_graph | poke_graph | comb
    #[arg(long)]
    pub name: Option<String>,
    /// JSON generator spec (tagged by "name"); overrides the flags.
    #[arg(long)]
    pub spec: Option<std::path::PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Whitney radii exponent: r = side^p.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub spike_step: Option<f64>,
    #[arg(long)]
    pub alpha_margin: Option<f64>,
    /// Comma-separated lambda schedule for the poke graph.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    #[arg(long)]
    pub teeth: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Aw,
    Gh,
    Approx,
    Expansive,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    pub input: std::path::PathBuf,
    /// Comma-separated coordinates of the point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "index")]
    pub point: Option<Vec<f64>>,
    /// Sample index of the point.
    #[arg(long)]
    pub index: Option<usize>,
    /// Comma-separated scales.
    #[arg(long, value_delimiter = ',', conflicts_with = "dyadic")]
    pub scales: Option<Vec<f64>>,
    /// Dyadic scales 2^-a..2^-b given as `a:b`.
    #[arg(long)]
    pub dyadic: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Aw)]
    pub mode: Mode,
    /// Dimension of the fitted planes.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Content exponent.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 8)]
    pub subsample: usize,
    #[arg(long, default_value_t = 0.1)]
    pub slab: f64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Fit a planar norm with this many directions at the finest scale.
    #[arg(long)]
    pub norm_directions: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PackMode {
    Upper,
    Lower,
    Premeasure,
    BallTree,
}

#[derive(Args, Debug)]
pub struct PackArgs {
    pub input: std::path::PathBuf,
    /// Read the input as a distance matrix instead of points.
    #[arg(long)]
    pub metric: bool,
    #[arg(long, value_enum, default_value_t = PackMode::Lower)]
    pub mode: PackMode,
    #[arg(long)]
    pub s: f64,
    /// Comma-separated radius schedule (lower mode).
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<f64>>,
    /// Scale bound delta (upper and premeasure modes).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Marker naming the subset F (ball-tree mode).
    #[arg(long)]
    pub marker: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long)]
    pub min_radius: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Search {
    Exhaustive,
    Heuristic,
    Auto,
}

#[derive(Args, Debug)]
pub struct GhArgs {
    pub a: std::path::PathBuf,
    pub b: std::path::PathBuf,
    /// Inputs are distance matrices.
    #[arg(long)]
    pub metric: bool,
    /// Base sample of the first input (point inputs; metric inputs carry their own).
    #[arg(long, default_value_t = 0)]
    pub base_a: usize,
    #[arg(long, default_value_t = 0)]
    pub base_b: usize,
    #[arg(long, value_enum, default_value_t = Search::Auto)]
    pub search: Search,
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    /// Windowed distance D_GH^r instead of the pointed distance.
    #[arg(long)]
    pub window: Option<f64>,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    /// Demo name, or `all`.
    pub name: String,
}

#[derive(Args, Debug)]
pub struct SvgArgs {
    pub input: std::path::PathBuf,
    /// Two coordinate axes to project on (required above two dimensions).
    #[arg(long, value_delimiter = ',')]
    pub axes: Option<Vec<usize>>,
    /// Plot the blow-up window at this point (needs --scale).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "scale")]
    pub point: Option<Vec<f64>>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
}

pub enum Failure {
    Usage(String),
    Data(String),
    Claims(String),
}

impl From<geotan_core::GeoError> for Failure {
    fn from(e: geotan_core::GeoError) -> Self {
        Failure::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Claims(m)) => {
            eprintln!("{m}");
            ExitCode::from(3)
        }
    }
}
