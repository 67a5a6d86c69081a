//! The `geolab` command-line front end. Every command is a thin shell over
//! the library: it merges flags with the `GEOLAB_CONFIG` file, runs one
//! computation and writes its output once, atomically.

pub mod classify;
pub mod config;
pub mod figure1;
pub mod holonomy;
pub mod output;
pub mod trace;

use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{GeoError, Result};
use crate::geometry_core::GeometryId;
use crate::preservation_lab::{verify, Suite, VerifyOptions, VerifyReport, DEFAULT_GEODESICS, DEFAULT_PAIRS};
use config::{parse_reals, ConfigFile, Format, Overrides, RunConfig};
use output::{emit, json_bytes};

pub const EXIT_OK: i32 = 0;
/// Usage errors, domain errors and verdicts that contradict a prediction.
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
/// A trace left its chart; the truncated sample was still written.
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "geolab", version, about = "Geodesics and geodesic-preserving maps of the fibered Thurston geometries")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// e2, h2, cylinder, h2xr, s2xr, sl2r, nil or sol.
    #[arg(long, global = true)]
    geometry: Option<GeometryId>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// RK4 steps (trace) or samples per arc (figure1).
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a geodesic and print its class.
    Trace {
        /// Initial point, comma separated; a per-geometry default otherwise.
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        /// Initial velocity, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Run the preservation and totally-geodesic suites.
    Verify {
        /// Every geometry (the default when --geometry is absent).
        #[arg(long, conflicts_with = "geometry")]
        all: bool,
        /// all, preservation, totally_geodesic, or a geometry id.
        #[arg(long)]
        suite: Option<String>,
        /// Geodesics sampled per map.
        #[arg(long)]
        geodesics: Option<usize>,
        /// Chord pairs per surface.
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Classify a sampled curve read from CSV or JSON.
    Classify {
        /// Input file; stdin when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Parallel-transport holonomy of a half-plane triangle.
    Holonomy {
        /// A vertex `u,v`; give exactly three.
        #[arg(long, allow_hyphen_values = true, required = true)]
        p: Vec<String>,
    },
    /// Disk-model data of a nested geodesic family and a chord.
    Figure1,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Trace { .. } => "trace",
            Command::Verify { .. } => "verify",
            Command::Classify { .. } => "classify",
            Command::Holonomy { .. } => "holonomy",
            Command::Figure1 => "figure1",
        }
    }
}

/// Human-readable lines go to stdout when the data goes to a file and to
/// stderr otherwise, so piped data stays clean.
fn note(config: &RunConfig, text: &str) {
    if config.out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn out_path(config: &RunConfig) -> Option<&Path> {
    config.out.as_deref()
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("geolab: error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let file = ConfigFile::from_env()?;
    let g = cli.global;
    let (t, suite) = match &cli.command {
        Command::Trace { t, .. } => (*t, None),
        Command::Verify { suite, .. } => (None, suite.clone()),
        _ => (None, None),
    };
    let flags = Overrides {
        geometry: g.geometry,
        seed: g.seed,
        tol: g.tol,
        steps: g.steps,
        t,
        out: g.out,
        format: g.format,
        suite,
    };
    let config = RunConfig::resolve(cli.command.name(), flags, &file)?;
    match cli.command {
        Command::Trace { p, v, .. } => cmd_trace(&config, p.as_deref(), &v),
        Command::Verify {
            all,
            geodesics,
            pairs,
            ..
        } => cmd_verify(&config, all, geodesics, pairs),
        Command::Classify { input } => cmd_classify(&config, input.as_deref()),
        Command::Holonomy { p } => cmd_holonomy(&config, &p),
        Command::Figure1 => cmd_figure1(&config),
    }
}

fn cmd_trace(config: &RunConfig, p: Option<&str>, v: &str) -> Result<i32> {
    let p = p.map(parse_reals).transpose()?;
    let v = parse_reals(v)?;
    let result = trace::trace(config, p.as_deref(), &v)?;
    emit(out_path(config), &result.to_bytes(config.format)?)?;
    note(config, &format!("class: {}\n", result.class.class));
    if result.partial {
        let reached = result.sample.params.last().copied().unwrap_or(0.0);
        eprintln!(
            "geolab: warning: geodesic left the {} chart at t = {reached}; sample truncated",
            result.geometry
        );
        return Ok(EXIT_PARTIAL);
    }
    Ok(EXIT_OK)
}

/// Splits `--suite` into a check family and an optional geometry filter.
fn suite_and_geometry(config: &RunConfig, all: bool) -> Result<(Suite, Option<GeometryId>)> {
    let mut geometry = if all { None } else { config.geometry };
    let suite = match config.suite.as_deref() {
        None => Suite::All,
        Some(s) => match s.parse::<Suite>() {
            Ok(suite) => suite,
            Err(_) => {
                let g: GeometryId = s
                    .parse()
                    .map_err(|_| GeoError::InvalidArgument(format!("unknown suite `{s}`")))?;
                if geometry.is_some_and(|h| h != g) {
                    return Err(GeoError::InvalidArgument(format!(
                        "--suite {s} conflicts with --geometry {}",
                        geometry.unwrap()
                    )));
                }
                geometry = Some(g);
                Suite::All
            }
        },
    };
    Ok((suite, geometry))
}

fn cmd_verify(config: &RunConfig, all: bool, geodesics: Option<usize>, pairs: Option<usize>) -> Result<i32> {
    let (suite, geometry) = suite_and_geometry(config, all)?;
    let opts = VerifyOptions {
        suite,
        seed: config.seed,
        n_geodesics: geodesics.unwrap_or(DEFAULT_GEODESICS),
        tol: config.tol,
        n_pairs: pairs.unwrap_or(DEFAULT_PAIRS),
        ..VerifyOptions::default()
    };
    let report = verify(geometry, &opts)?;
    emit(out_path(config), &json_bytes(&report)?)?;
    note(config, &verify_summary(&report));
    Ok(report.exit_code())
}

fn verify_summary(report: &VerifyReport) -> String {
    let s = &report.summary;
    let mut text = format!("verify: {} checks, {} as expected\n", s.checks, s.as_expected);
    for id in &s.unexpected {
        text.push_str(&format!("unexpected: {id}\n"));
    }
    for id in &s.inconclusive {
        text.push_str(&format!("inconclusive: {id}\n"));
    }
    text
}

fn cmd_classify(config: &RunConfig, input: Option<&Path>) -> Result<i32> {
    let g = config.require_geometry()?;
    let text = match input {
        Some(p) => std::fs::read_to_string(p).map_err(|e| GeoError::Io(format!("{}: {e}", p.display())))?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let sample = classify::read_sample(&text)?;
    let class = classify::classify_sample(g, &sample)?;
    emit(out_path(config), &json_bytes(&class)?)?;
    note(config, &format!("class: {}\n", class.class));
    Ok(EXIT_OK)
}

fn cmd_holonomy(config: &RunConfig, points: &[String]) -> Result<i32> {
    let points = points.iter().map(|p| parse_reals(p)).collect::<Result<Vec<_>>>()?;
    let out = holonomy::holonomy(&points)?;
    emit(out_path(config), &json_bytes(&out)?)?;
    note(config, &out.summary());
    Ok(EXIT_OK)
}

fn cmd_figure1(config: &RunConfig) -> Result<i32> {
    let fig = figure1::figure1(config.steps.unwrap_or(figure1::DEFAULT_SAMPLES))?;
    let bytes = match config.format {
        Format::Csv => fig.to_csv().into_bytes(),
        Format::Json => json_bytes(&fig)?,
    };
    emit(out_path(config), &bytes)?;
    note(
        config,
        &format!(
            "figure1: {} arcs, chord crosses r = {:?}, min sampled distance {:.6}\n",
            fig.family.len(),
            fig.crossed,
            fig.min_sampled_distance
        ),
    );
    Ok(EXIT_OK)
}
